#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tsgan/training.hpp"

namespace tsgan {

// Ordered "section.key" -> value pairs.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

// key = value lines grouped under [section] headers; '#' and ';' start
// comments. Keys before any header belong to the "" section.
KeyValues parse_ini(const std::string& text);
KeyValues read_ini(const std::string& path);

// Sections: [latent], [model], [train]. Unknown sections or keys, and values
// that fail to parse, raise ConfigError.
void apply_config(RunSpec& spec, const KeyValues& kv);
RunSpec load_run_spec(const std::string& path);

// Every key with its effective value, in a fixed order.
KeyValues to_key_values(const RunSpec& spec);
std::string to_ini(const RunSpec& spec);

}  // namespace tsgan
