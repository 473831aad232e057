#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsgan/training.hpp"

namespace tsgan {

inline constexpr char kCheckpointMagic[8] = {'T', 'S', 'G', 'A', 'N', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// On-disk layout, all integers little-endian:
//   magic[8] | u32 version | u32 n | config text[n]
//   | u32 count | count x (u16 name_len | name | u32 rank | u64 dims[rank] | f32 data[])
//   | u64 FNV-1a hash of every preceding byte
struct Checkpoint {
  std::string config;  // ini text: run spec plus a [state] section
  std::vector<std::pair<std::string, Tensor<float>>> tensors;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck);
// FormatError on bad magic, version mismatch, truncation or hash mismatch.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n);

// Models, batch-norm buffers, optimizer moments, normalization statistics and
// counters.
Checkpoint to_checkpoint(const TrainState& s);
TrainState from_checkpoint(const Checkpoint& ck);

void save_state(const std::string& path, const TrainState& s);
TrainState load_state(const std::string& path);

}  // namespace tsgan
