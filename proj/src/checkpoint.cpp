#include "tsgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "tsgan/config.hpp"

namespace tsgan {

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Writer {
  std::vector<std::uint8_t> out;
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
};

struct Reader {
  const std::vector<std::uint8_t>& in;
  std::size_t pos = 0;
  std::size_t limit;

  void need(std::size_t n) const {
    if (n > limit - pos) throw FormatError("checkpoint truncated at byte " + std::to_string(pos));
  }
  template <typename U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(in[pos + i]) << (8 * i));
    pos += sizeof(U);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in.data() + pos), n);
    pos += n;
    return s;
  }
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  Writer w;
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.uint<std::uint32_t>(kCheckpointVersion);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(ck.config.size()));
  w.bytes(ck.config.data(), ck.config.size());
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(ck.tensors.size()));
  for (const auto& [name, t] : ck.tensors) {
    if (name.size() > 0xffff) throw FormatError("checkpoint: tensor name too long");
    w.uint<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) w.uint<std::uint64_t>(d);
    for (std::size_t i = 0; i < t.numel(); ++i) w.uint<std::uint32_t>(std::bit_cast<std::uint32_t>(t[i]));
  }
  w.uint<std::uint64_t>(fnv1a(w.out.data(), w.out.size()));
  return std::move(w.out);
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof kCheckpointMagic ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  Reader r{bytes, sizeof kCheckpointMagic, bytes.size()};
  const auto version = r.uint<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint version " + std::to_string(version) + ", expected " +
                      std::to_string(kCheckpointVersion));
  }
  if (bytes.size() < r.pos + 8) throw FormatError("checkpoint truncated");
  r.limit = bytes.size() - 8;

  Checkpoint ck;
  ck.config = r.str(r.uint<std::uint32_t>());
  const auto count = r.uint<std::uint32_t>();
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name = r.str(r.uint<std::uint16_t>());
    const auto rank = r.uint<std::uint32_t>();
    if (rank > 8) throw FormatError("checkpoint: tensor '" + name + "' has rank " + std::to_string(rank));
    Shape shape(rank);
    std::size_t numel = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(r.uint<std::uint64_t>());
      if (d != 0 && numel > (r.limit - r.pos) / d) throw FormatError("checkpoint truncated in '" + name + "'");
      numel *= d;
    }
    r.need(numel * 4);
    std::vector<float> data(numel);
    for (auto& v : data) v = std::bit_cast<float>(r.uint<std::uint32_t>());
    ck.tensors.emplace_back(std::move(name), Tensor<float>(std::move(shape), std::move(data)));
  }
  if (r.pos != r.limit) throw FormatError("checkpoint: trailing bytes before hash");
  Reader tail{bytes, r.limit, bytes.size()};
  if (tail.uint<std::uint64_t>() != fnv1a(bytes.data(), r.limit)) {
    throw FormatError("checkpoint hash mismatch (corrupted file)");
  }
  return ck;
}

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  const auto bytes = encode_checkpoint(ck);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write checkpoint " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("failed writing checkpoint " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

namespace {

struct Slot {
  std::string name;
  Tensor<float>* target;
};

// Every stored tensor of a state, in file order. Optimizer moments are present
// only once the optimizer has stepped.
std::vector<Slot> slots(TrainState& s, bool with_empty_moments) {
  std::vector<Slot> out;
  auto add_params = [&](const nn::NamedParams<float>& p) {
    for (const auto& [name, v] : p) out.push_back({name, &const_cast<ad::Var<float>&>(v).mutable_value()});
  };
  add_params(s.models.generator.parameters());
  for (auto& [name, t] : s.models.generator.buffers()) out.push_back({name, t});
  add_params(s.models.critic.parameters());

  auto& C = s.models.critic;
  auto names = [](nn::NamedParams<float> a, const nn::NamedParams<float>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::vector<std::string> n;
    for (const auto& [k, v] : a) n.push_back(k);
    return n;
  };
  auto add_opt = [&](const std::string& tag, nn::Adam<float>& opt, const std::vector<std::string>& pn) {
    if (opt.m.empty() && !with_empty_moments) return;
    opt.m.resize(pn.size());
    opt.v.resize(pn.size());
    for (std::size_t i = 0; i < pn.size(); ++i) out.push_back({"opt." + tag + ".m." + pn[i], &opt.m[i]});
    for (std::size_t i = 0; i < pn.size(); ++i) out.push_back({"opt." + tag + ".v." + pn[i], &opt.v[i]});
  };
  add_opt("critic", s.opt_critic, names(C.trunk_parameters(), C.score_parameters()));
  std::vector<std::string> gen;
  for (const auto& [k, v] : s.models.generator.parameters()) gen.push_back(k);
  add_opt("gen", s.opt_gen, gen);
  if (C.has_code_head()) add_opt("code", s.opt_code, names(C.trunk_parameters(), C.code_parameters()));
  return out;
}

}  // namespace

Checkpoint to_checkpoint(const TrainState& state) {
  auto& s = const_cast<TrainState&>(state);
  Checkpoint ck;
  ck.config = to_ini(s.spec);
  ck.config += "\n[state]\n";
  ck.config += "epoch = " + std::to_string(s.epoch) + "\n";
  ck.config += "critic_steps = " + std::to_string(s.critic_steps) + "\n";
  ck.config += "norm_min = " + format_number(s.norm.x_min) + "\n";
  ck.config += "norm_max = " + format_number(s.norm.x_max) + "\n";
  ck.config += "opt_critic_steps = " + std::to_string(s.opt_critic.steps) + "\n";
  ck.config += "opt_gen_steps = " + std::to_string(s.opt_gen.steps) + "\n";
  ck.config += "opt_code_steps = " + std::to_string(s.opt_code.steps) + "\n";
  ck.config += "opt_lr = " + format_number(s.opt_gen.lr) + "\n";
  for (const auto& slot : slots(s, false)) ck.tensors.emplace_back(slot.name, *slot.target);
  return ck;
}

TrainState from_checkpoint(const Checkpoint& ck) {
  KeyValues spec_kv;
  std::map<std::string, std::string> st;
  for (auto& [k, v] : parse_ini(ck.config)) {
    if (k.rfind("state.", 0) == 0) {
      st[k.substr(6)] = v;
    } else {
      spec_kv.emplace_back(k, v);
    }
  }
  RunSpec spec;
  try {
    apply_config(spec, spec_kv);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config block: ") + e.what());
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = st.find(key);
    if (it == st.end()) throw FormatError(std::string("checkpoint: missing state.") + key);
    return it->second;
  };
  auto as_u64 = [&](const char* key) {
    try {
      return static_cast<std::uint64_t>(std::stoull(get(key)));
    } catch (const std::logic_error&) {
      throw FormatError(std::string("checkpoint: bad state.") + key);
    }
  };
  auto as_double = [&](const char* key) {
    try {
      return std::stod(get(key));
    } catch (const std::logic_error&) {
      throw FormatError(std::string("checkpoint: bad state.") + key);
    }
  };
  TrainState s = init_state(spec, NormStats{as_double("norm_min"), as_double("norm_max")});
  s.epoch = static_cast<std::size_t>(as_u64("epoch"));
  s.critic_steps = as_u64("critic_steps");
  s.opt_critic.steps = static_cast<std::int64_t>(as_u64("opt_critic_steps"));
  s.opt_gen.steps = static_cast<std::int64_t>(as_u64("opt_gen_steps"));
  s.opt_code.steps = static_cast<std::int64_t>(as_u64("opt_code_steps"));
  const auto lr = static_cast<float>(as_double("opt_lr"));
  s.opt_critic.lr = s.opt_gen.lr = s.opt_code.lr = lr;

  std::map<std::string, const Tensor<float>*> stored;
  for (const auto& [name, t] : ck.tensors) {
    if (!stored.emplace(name, &t).second) throw FormatError("checkpoint: duplicate tensor " + name);
  }
  std::size_t used = 0;
  auto targets = slots(s, true);
  for (const auto& slot : targets) {
    const auto it = stored.find(slot.name);
    if (it == stored.end()) {
      if (slot.name.rfind("opt.", 0) == 0) continue;
      throw FormatError("checkpoint: missing tensor " + slot.name);
    }
    if (slot.name.rfind("opt.", 0) != 0 && it->second->shape() != slot.target->shape()) {
      throw FormatError("checkpoint: tensor " + slot.name + " has shape " +
                        shape_str(it->second->shape()) + ", model expects " +
                        shape_str(slot.target->shape()));
    }
    *slot.target = *it->second;
    ++used;
  }
  if (used != stored.size()) throw FormatError("checkpoint: unexpected tensors for this model");
  // Optimizers absent from the file have not stepped yet.
  for (auto* opt : {&s.opt_critic, &s.opt_gen, &s.opt_code}) {
    bool any = false;
    for (const auto& t : opt->m) any = any || !t.empty();
    if (!any) opt->m.clear(), opt->v.clear();
  }
  return s;
}

void save_state(const std::string& path, const TrainState& s) { write_checkpoint(path, to_checkpoint(s)); }

TrainState load_state(const std::string& path) { return from_checkpoint(read_checkpoint(path)); }

}  // namespace tsgan
