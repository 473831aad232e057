#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsgan/nn.hpp"

namespace tsgan {

enum class Mode { infogan, cgan, wgan };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

struct LatentSpec {
  std::size_t z_dim = 100;
  std::size_t n_categories = 2;
  std::size_t n_continuous = 0;
  double cont_lo = -2.0;
  double cont_hi = 2.0;

  std::size_t code_dim() const { return n_categories + n_continuous; }
  std::size_t input_dim() const { return z_dim + code_dim(); }
  void validate() const;
};

template <typename T>
struct LatentInput {
  Tensor<T> z;     // [B, z_dim]
  Tensor<T> cat;   // [B, n_categories], one-hot rows
  Tensor<T> cont;  // [B, n_continuous]

  std::size_t batch() const { return z.rank() ? z.dim(0) : 0; }
  // [z | cat | cont] as the generator consumes it.
  Tensor<T> joined() const;
  // Index of the hot entry of each cat row.
  std::vector<int> categories() const;
};

struct ArchConfig {
  std::size_t base_channels = 256;
  std::size_t profile_len = 96;
  std::size_t seed_len = 6;
  std::size_t blocks = 4;
  std::size_t kernel = 4;
  std::size_t stride = 2;
  std::size_t pad = 1;
  double slope = 0.2;
  nn::Init init = nn::Init::normal;

  // Channels entering each generator up-block, ending with the output channel.
  std::vector<std::size_t> generator_channels() const;
  std::size_t trunk_len() const;
  std::size_t feature_dim() const { return base_channels * trunk_len(); }
  void validate() const;
};

template <typename T>
class Generator {
 public:
  Generator() = default;
  Generator(const LatentSpec& spec, const ArchConfig& arch, nn::Rng& rng);

  // latent [B, input_dim] -> profiles [B, profile_len] in [0, 1].
  ad::Var<T> forward(const ad::Var<T>& latent, bool train);

  nn::NamedParams<T> parameters() const;
  std::vector<std::pair<std::string, Tensor<T>*>> buffers();
  std::vector<nn::BatchNorm1d<T>*> norms();

  const LatentSpec& spec() const { return spec_; }
  const ArchConfig& arch() const { return arch_; }

 private:
  LatentSpec spec_;
  ArchConfig arch_;
  nn::Linear<T> proj_;
  nn::BatchNorm1d<T> bn0_;
  std::vector<nn::ConvTranspose1d<T>> ups_;
  std::vector<nn::BatchNorm1d<T>> bns_;
};

// Shared convolutional trunk with a score head (critic) and, in infogan mode,
// a code head. In cgan mode the one-hot condition enters as constant extra
// input channels.
template <typename T>
class Critic {
 public:
  Critic() = default;
  Critic(const LatentSpec& spec, const ArchConfig& arch, Mode mode, nn::Rng& rng);

  // x [B, profile_len] (cond [B, n_categories] in cgan mode) -> features [B, F].
  ad::Var<T> trunk(const ad::Var<T>& x, const Tensor<T>* cond = nullptr) const;
  ad::Var<T> score(const ad::Var<T>& features) const;  // [B]
  ad::Var<T> code(const ad::Var<T>& features) const;   // [B, n_categories + n_continuous]

  bool has_code_head() const { return code_head_.has_value(); }
  Mode mode() const { return mode_; }

  nn::NamedParams<T> trunk_parameters() const;
  nn::NamedParams<T> score_parameters() const;
  nn::NamedParams<T> code_parameters() const;
  nn::NamedParams<T> parameters() const;

  const LatentSpec& spec() const { return spec_; }

 private:
  LatentSpec spec_;
  ArchConfig arch_;
  Mode mode_ = Mode::infogan;
  std::vector<nn::Conv1d<T>> convs_;
  nn::Linear<T> score_head_;
  std::optional<nn::Linear<T>> code_head_;
};

template <typename T>
struct Models {
  Generator<T> generator;
  Critic<T> critic;
};

// Deterministic given seed. Throws ConfigError when the architecture cannot
// produce profile_len samples.
template <typename T>
Models<T> build_models(const LatentSpec& spec, const ArchConfig& arch, Mode mode,
                       std::uint64_t seed);

// Eval-mode generation, no graph recorded.
template <typename T>
Tensor<T> generate(Generator<T>& g, const LatentInput<T>& latent);

template <typename T>
struct CodeEstimate {
  Tensor<T> cat_probs;  // [B, n_categories]
  Tensor<T> cont_mean;  // [B, n_continuous]
};

template <typename T>
Tensor<T> critic_score(const Critic<T>& c, const Tensor<T>& x, const Tensor<T>* cond = nullptr);

template <typename T>
CodeEstimate<T> q_infer(const Critic<T>& c, const Tensor<T>& x);

// Both heads from a single trunk pass.
template <typename T>
std::pair<Tensor<T>, CodeEstimate<T>> critic_outputs(const Critic<T>& c, const Tensor<T>& x);

// Splits raw code-head output into probabilities and continuous means.
template <typename T>
CodeEstimate<T> split_code(const LatentSpec& spec, const Tensor<T>& raw);

// One-hot rows for given labels.
template <typename T>
Tensor<T> one_hot(const std::vector<int>& labels, std::size_t n_categories);

// z ~ N(0, 1), cat uniform over categories, cont ~ U(cont_lo, cont_hi);
// drawn in that order.
template <typename T>
LatentInput<T> sample_latent(const LatentSpec& spec, std::size_t batch, nn::Rng& rng);

// cgan latent: z and cont sampled, cat fixed to the supplied labels.
template <typename T>
LatentInput<T> conditioned_latent(const LatentSpec& spec, const std::vector<int>& labels,
                                  nn::Rng& rng);

}  // namespace tsgan
