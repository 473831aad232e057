#include "tsgan/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tsgan {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename N>
N parse_num(const std::string& key, const std::string& v) {
  N out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) {
    throw ConfigError("config: bad value '" + v + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean '" + v + "' for " + key);
}

using Setter = std::function<void(RunSpec&, const std::string& key, const std::string& v)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto sz = [&](const char* k, auto get) {
      t[k] = [get](RunSpec& s, const std::string& key, const std::string& v) {
        get(s) = parse_num<std::size_t>(key, v);
      };
    };
    auto dbl = [&](const char* k, auto get) {
      t[k] = [get](RunSpec& s, const std::string& key, const std::string& v) {
        get(s) = parse_num<double>(key, v);
      };
    };
    sz("latent.z_dim", [](RunSpec& s) -> auto& { return s.latent.z_dim; });
    sz("latent.n_categories", [](RunSpec& s) -> auto& { return s.latent.n_categories; });
    sz("latent.n_continuous", [](RunSpec& s) -> auto& { return s.latent.n_continuous; });
    dbl("latent.cont_lo", [](RunSpec& s) -> auto& { return s.latent.cont_lo; });
    dbl("latent.cont_hi", [](RunSpec& s) -> auto& { return s.latent.cont_hi; });

    sz("model.base_channels", [](RunSpec& s) -> auto& { return s.arch.base_channels; });
    sz("model.profile_len", [](RunSpec& s) -> auto& { return s.arch.profile_len; });
    dbl("model.slope", [](RunSpec& s) -> auto& { return s.arch.slope; });
    t["model.init"] = [](RunSpec& s, const std::string&, const std::string& v) {
      s.arch.init = nn::parse_init(v);
    };

    t["train.mode"] = [](RunSpec& s, const std::string&, const std::string& v) {
      s.train.mode = parse_mode(v);
    };
    sz("train.epochs", [](RunSpec& s) -> auto& { return s.train.epochs; });
    sz("train.batch_size", [](RunSpec& s) -> auto& { return s.train.batch_size; });
    sz("train.n_critic", [](RunSpec& s) -> auto& { return s.train.n_critic; });
    dbl("train.lr", [](RunSpec& s) -> auto& { return s.train.lr; });
    dbl("train.beta1", [](RunSpec& s) -> auto& { return s.train.beta1; });
    dbl("train.beta2", [](RunSpec& s) -> auto& { return s.train.beta2; });
    dbl("train.eps", [](RunSpec& s) -> auto& { return s.train.eps_adam; });
    dbl("train.lambda_gp", [](RunSpec& s) -> auto& { return s.train.lambda_gp; });
    dbl("train.lambda_cat", [](RunSpec& s) -> auto& { return s.train.lambda_cat; });
    dbl("train.lambda_cont", [](RunSpec& s) -> auto& { return s.train.lambda_cont; });
    t["train.seed"] = [](RunSpec& s, const std::string& key, const std::string& v) {
      s.train.seed = parse_num<std::uint64_t>(key, v);
    };
    sz("train.checkpoint_every", [](RunSpec& s) -> auto& { return s.train.checkpoint_every; });
    t["train.lr_decay"] = [](RunSpec& s, const std::string& key, const std::string& v) {
      s.train.lr_decay = parse_bool(key, v);
    };
    sz("train.eval_samples", [](RunSpec& s) -> auto& { return s.train.eval_samples; });
    return t;
  }();
  return table;
}

}  // namespace

KeyValues parse_ini(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(section.empty() ? key : section + "." + key, trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues read_ini(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_ini(ss.str());
}

void apply_config(RunSpec& spec, const KeyValues& kv) {
  const auto& table = setters();
  for (const auto& [key, value] : kv) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(spec, key, value);
  }
  spec.latent.validate();
  spec.arch.validate();
  spec.train.validate();
}

RunSpec load_run_spec(const std::string& path) {
  RunSpec spec;
  apply_config(spec, read_ini(path));
  return spec;
}

KeyValues to_key_values(const RunSpec& s) {
  auto n = [](double v) { return format_number(v); };
  auto u = [](std::uint64_t v) { return std::to_string(v); };
  return {
      {"latent.z_dim", u(s.latent.z_dim)},
      {"latent.n_categories", u(s.latent.n_categories)},
      {"latent.n_continuous", u(s.latent.n_continuous)},
      {"latent.cont_lo", n(s.latent.cont_lo)},
      {"latent.cont_hi", n(s.latent.cont_hi)},
      {"model.base_channels", u(s.arch.base_channels)},
      {"model.profile_len", u(s.arch.profile_len)},
      {"model.slope", n(s.arch.slope)},
      {"model.init", nn::init_name(s.arch.init)},
      {"train.mode", mode_name(s.train.mode)},
      {"train.epochs", u(s.train.epochs)},
      {"train.batch_size", u(s.train.batch_size)},
      {"train.n_critic", u(s.train.n_critic)},
      {"train.lr", n(s.train.lr)},
      {"train.beta1", n(s.train.beta1)},
      {"train.beta2", n(s.train.beta2)},
      {"train.eps", n(s.train.eps_adam)},
      {"train.lambda_gp", n(s.train.lambda_gp)},
      {"train.lambda_cat", n(s.train.lambda_cat)},
      {"train.lambda_cont", n(s.train.lambda_cont)},
      {"train.seed", u(s.train.seed)},
      {"train.checkpoint_every", u(s.train.checkpoint_every)},
      {"train.lr_decay", s.train.lr_decay ? "true" : "false"},
      {"train.eval_samples", u(s.train.eval_samples)},
  };
}

std::string to_ini(const RunSpec& spec) {
  std::ostringstream os;
  std::string section;
  for (const auto& [key, value] : to_key_values(spec)) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << key.substr(dot + 1) << " = " << value << '\n';
  }
  return os.str();
}

}  // namespace tsgan
