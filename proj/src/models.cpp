#include "tsgan/models.hpp"

namespace tsgan {

Mode parse_mode(const std::string& name) {
  if (name == "infogan") return Mode::infogan;
  if (name == "cgan") return Mode::cgan;
  if (name == "wgan") return Mode::wgan;
  throw ConfigError("unknown mode '" + name + "' (expected infogan, cgan or wgan)");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::infogan: return "infogan";
    case Mode::cgan: return "cgan";
    case Mode::wgan: return "wgan";
  }
  return "?";
}

void LatentSpec::validate() const {
  if (z_dim < 1) throw ConfigError("latent: z_dim must be >= 1");
  if (n_categories == 1) throw ConfigError("latent: n_categories must be 0 or >= 2");
  if (!(cont_lo < cont_hi)) throw ConfigError("latent: continuous range must satisfy lo < hi");
}

template <typename T>
Tensor<T> LatentInput<T>::joined() const {
  const std::size_t b = batch();
  const std::size_t nz = z.dim(1);
  const std::size_t nc = cat.rank() ? cat.dim(1) : 0;
  const std::size_t nq = cont.rank() ? cont.dim(1) : 0;
  const std::size_t w = nz + nc + nq;
  Tensor<T> out(Shape{b, w});
  for (std::size_t i = 0; i < b; ++i) {
    T* row = out.ptr() + i * w;
    std::copy_n(z.ptr() + i * nz, nz, row);
    if (nc) std::copy_n(cat.ptr() + i * nc, nc, row + nz);
    if (nq) std::copy_n(cont.ptr() + i * nq, nq, row + nz + nc);
  }
  return out;
}

template <typename T>
std::vector<int> LatentInput<T>::categories() const {
  std::vector<int> out(batch(), 0);
  if (!cat.rank()) return out;
  const std::size_t nc = cat.dim(1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (cat[i * nc + j] == T(1)) out[i] = static_cast<int>(j);
    }
  }
  return out;
}

std::vector<std::size_t> ArchConfig::generator_channels() const {
  std::vector<std::size_t> ch;
  for (std::size_t i = 0; i < blocks; ++i) ch.push_back(base_channels >> i);
  ch.push_back(1);
  return ch;
}

std::size_t ArchConfig::trunk_len() const {
  std::size_t len = profile_len;
  for (std::size_t i = 0; i < blocks; ++i) len = kernels::conv_out_len(len, kernel, stride, pad);
  return len;
}

void ArchConfig::validate() const {
  if (blocks < 1) throw ConfigError("arch: need at least one block");
  if ((base_channels >> (blocks - 1)) < 1) {
    throw ConfigError("arch: base_channels " + std::to_string(base_channels) + " too small for " +
                      std::to_string(blocks) + " blocks");
  }
  std::size_t len = seed_len;
  for (std::size_t i = 0; i < blocks; ++i) {
    if (len == 0 || (len - 1) * stride + kernel <= 2 * pad) {
      throw ConfigError("arch: transposed convolution collapses to empty output");
    }
    len = (len - 1) * stride + kernel - 2 * pad;
  }
  if (len != profile_len) {
    throw ConfigError("arch: generator reaches length " + std::to_string(len) + ", expected " +
                      std::to_string(profile_len));
  }
  if (trunk_len() == 0) throw ConfigError("arch: critic trunk collapses to empty output");
}

template <typename T>
Generator<T>::Generator(const LatentSpec& spec, const ArchConfig& arch, nn::Rng& rng)
    : spec_(spec), arch_(arch) {
  spec.validate();
  arch.validate();
  const auto ch = arch.generator_channels();
  proj_ = nn::Linear<T>(spec.input_dim(), ch[0] * arch.seed_len, arch.init, rng);
  bn0_ = nn::BatchNorm1d<T>(ch[0], arch.init, rng);
  for (std::size_t i = 0; i < arch.blocks; ++i) {
    ups_.emplace_back(ch[i], ch[i + 1], arch.kernel, arch.stride, arch.pad, arch.init, rng);
    if (i + 1 < arch.blocks) bns_.emplace_back(ch[i + 1], arch.init, rng);
  }
}

template <typename T>
ad::Var<T> Generator<T>::forward(const ad::Var<T>& latent, bool train) {
  if (latent.shape().size() != 2 || latent.shape()[1] != spec_.input_dim()) {
    throw ShapeError("generator: latent " + shape_str(latent.shape()) + ", expected [B x " +
                     std::to_string(spec_.input_dim()) + "]");
  }
  const std::size_t b = latent.shape()[0];
  const std::size_t c0 = arch_.base_channels;
  ad::Var<T> h = ad::reshape(proj_(latent), {b, c0, arch_.seed_len});
  h = ad::gelu(bn0_.forward(h, train));
  for (std::size_t i = 0; i < ups_.size(); ++i) {
    h = ups_[i](h);
    if (i < bns_.size()) h = ad::gelu(bns_[i].forward(h, train));
  }
  return ad::reshape(ad::sigmoid(h), {b, arch_.profile_len});
}

template <typename T>
nn::NamedParams<T> Generator<T>::parameters() const {
  nn::NamedParams<T> out;
  proj_.collect("gen.proj", out);
  bn0_.collect("gen.bn0", out);
  for (std::size_t i = 0; i < ups_.size(); ++i) {
    ups_[i].collect("gen.up" + std::to_string(i), out);
    if (i < bns_.size()) bns_[i].collect("gen.bn" + std::to_string(i + 1), out);
  }
  return out;
}

template <typename T>
std::vector<std::pair<std::string, Tensor<T>*>> Generator<T>::buffers() {
  std::vector<std::pair<std::string, Tensor<T>*>> out;
  bn0_.collect_buffers("gen.bn0", out);
  for (std::size_t i = 0; i < bns_.size(); ++i) {
    bns_[i].collect_buffers("gen.bn" + std::to_string(i + 1), out);
  }
  return out;
}

template <typename T>
std::vector<nn::BatchNorm1d<T>*> Generator<T>::norms() {
  std::vector<nn::BatchNorm1d<T>*> out{&bn0_};
  for (auto& bn : bns_) out.push_back(&bn);
  return out;
}

template <typename T>
Critic<T>::Critic(const LatentSpec& spec, const ArchConfig& arch, Mode mode, nn::Rng& rng)
    : spec_(spec), arch_(arch), mode_(mode) {
  spec.validate();
  arch.validate();
  if (mode == Mode::cgan && spec.n_categories < 2) {
    throw ConfigError("cgan mode needs n_categories >= 2");
  }
  std::size_t in = mode == Mode::cgan ? 1 + spec.n_categories : 1;
  for (std::size_t i = 0; i < arch.blocks; ++i) {
    const std::size_t out = arch.base_channels >> (arch.blocks - 1 - i);
    convs_.emplace_back(in, out, arch.kernel, arch.stride, arch.pad, arch.init, rng);
    in = out;
  }
  score_head_ = nn::Linear<T>(arch.feature_dim(), 1, arch.init, rng);
  if (mode == Mode::infogan && spec.code_dim() > 0) {
    code_head_.emplace(arch.feature_dim(), spec.code_dim(), arch.init, rng);
  }
}

template <typename T>
ad::Var<T> Critic<T>::trunk(const ad::Var<T>& x, const Tensor<T>* cond) const {
  if (x.shape().size() != 2 || x.shape()[1] != arch_.profile_len) {
    throw ShapeError("critic: input " + shape_str(x.shape()) + ", expected [B x " +
                     std::to_string(arch_.profile_len) + "]");
  }
  const std::size_t b = x.shape()[0];
  const std::size_t len = arch_.profile_len;
  ad::Var<T> h = ad::reshape(x, {b, 1, len});
  if (mode_ == Mode::cgan) {
    if (!cond || cond->shape() != Shape{b, spec_.n_categories}) {
      throw ShapeError("critic: cgan mode needs a [B x n_categories] condition");
    }
    const std::size_t nc = spec_.n_categories;
    Tensor<T> planes(Shape{b, nc, len});
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t j = 0; j < nc; ++j) {
        std::fill_n(planes.ptr() + (i * nc + j) * len, len, (*cond)[i * nc + j]);
      }
    }
    h = ad::concat1<T>({h, ad::Var<T>::constant(std::move(planes))});
  }
  const T slope = static_cast<T>(arch_.slope);
  for (const auto& conv : convs_) h = ad::leaky_relu(conv(h), slope);
  return ad::reshape(h, {b, arch_.feature_dim()});
}

template <typename T>
ad::Var<T> Critic<T>::score(const ad::Var<T>& features) const {
  ad::Var<T> s = score_head_(features);
  return ad::reshape(s, {features.shape()[0]});
}

template <typename T>
ad::Var<T> Critic<T>::code(const ad::Var<T>& features) const {
  if (!code_head_) throw ConfigError("critic has no code head in mode " + mode_name(mode_));
  return (*code_head_)(features);
}

template <typename T>
nn::NamedParams<T> Critic<T>::trunk_parameters() const {
  nn::NamedParams<T> out;
  for (std::size_t i = 0; i < convs_.size(); ++i) convs_[i].collect("trunk.conv" + std::to_string(i), out);
  return out;
}

template <typename T>
nn::NamedParams<T> Critic<T>::score_parameters() const {
  nn::NamedParams<T> out;
  score_head_.collect("score", out);
  return out;
}

template <typename T>
nn::NamedParams<T> Critic<T>::code_parameters() const {
  nn::NamedParams<T> out;
  if (code_head_) code_head_->collect("code", out);
  return out;
}

template <typename T>
nn::NamedParams<T> Critic<T>::parameters() const {
  nn::NamedParams<T> out = trunk_parameters();
  for (auto& p : score_parameters()) out.push_back(p);
  for (auto& p : code_parameters()) out.push_back(p);
  return out;
}

template <typename T>
Models<T> build_models(const LatentSpec& spec, const ArchConfig& arch, Mode mode,
                       std::uint64_t seed) {
  LatentSpec s = spec;
  if (mode == Mode::wgan) {
    s.n_categories = 0;
    s.n_continuous = 0;
  }
  if (mode == Mode::cgan) s.n_continuous = 0;
  nn::Rng rng(seed);
  Models<T> m;
  m.generator = Generator<T>(s, arch, rng);
  m.critic = Critic<T>(s, arch, mode, rng);
  return m;
}

template <typename T>
Tensor<T> generate(Generator<T>& g, const LatentInput<T>& latent) {
  ad::NoGrad off;
  return g.forward(ad::Var<T>::constant(latent.joined()), false).value();
}

template <typename T>
CodeEstimate<T> split_code(const LatentSpec& spec, const Tensor<T>& raw) {
  const std::size_t b = raw.dim(0);
  const std::size_t nc = spec.n_categories;
  const std::size_t nq = spec.n_continuous;
  CodeEstimate<T> out{Tensor<T>(Shape{b, nc}), Tensor<T>(Shape{b, nq})};
  const std::size_t w = nc + nq;
  for (std::size_t i = 0; i < b; ++i) {
    const T* row = raw.ptr() + i * w;
    if (nc) {
      T mx = row[0];
      for (std::size_t j = 1; j < nc; ++j) mx = std::max(mx, row[j]);
      T sum = 0;
      for (std::size_t j = 0; j < nc; ++j) sum += std::exp(row[j] - mx);
      for (std::size_t j = 0; j < nc; ++j) out.cat_probs[i * nc + j] = std::exp(row[j] - mx) / sum;
    }
    for (std::size_t j = 0; j < nq; ++j) out.cont_mean[i * nq + j] = row[nc + j];
  }
  return out;
}

template <typename T>
Tensor<T> critic_score(const Critic<T>& c, const Tensor<T>& x, const Tensor<T>* cond) {
  ad::NoGrad off;
  return c.score(c.trunk(ad::Var<T>::constant(x), cond)).value();
}

template <typename T>
CodeEstimate<T> q_infer(const Critic<T>& c, const Tensor<T>& x) {
  ad::NoGrad off;
  return split_code(c.spec(), c.code(c.trunk(ad::Var<T>::constant(x))).value());
}

template <typename T>
std::pair<Tensor<T>, CodeEstimate<T>> critic_outputs(const Critic<T>& c, const Tensor<T>& x) {
  ad::NoGrad off;
  ad::Var<T> f = c.trunk(ad::Var<T>::constant(x));
  return {c.score(f).value(), split_code(c.spec(), c.code(f).value())};
}

template <typename T>
Tensor<T> one_hot(const std::vector<int>& labels, std::size_t n_categories) {
  Tensor<T> out(Shape{labels.size(), n_categories});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_categories) {
      throw ConfigError("label " + std::to_string(labels[i]) + " outside [0, " +
                        std::to_string(n_categories) + ")");
    }
    out[i * n_categories + static_cast<std::size_t>(labels[i])] = T(1);
  }
  return out;
}

namespace {

template <typename T>
Tensor<T> draw_normal(std::size_t rows, std::size_t cols, nn::Rng& rng) {
  Tensor<T> t(Shape{rows, cols});
  std::normal_distribution<double> d(0.0, 1.0);
  for (auto& v : t.data()) v = static_cast<T>(d(rng));
  return t;
}

template <typename T>
Tensor<T> draw_uniform(std::size_t rows, std::size_t cols, double lo, double hi, nn::Rng& rng) {
  Tensor<T> t(Shape{rows, cols});
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.data()) v = static_cast<T>(d(rng));
  return t;
}

}  // namespace

template <typename T>
LatentInput<T> sample_latent(const LatentSpec& spec, std::size_t batch, nn::Rng& rng) {
  LatentInput<T> in;
  in.z = draw_normal<T>(batch, spec.z_dim, rng);
  std::vector<int> labels(batch, 0);
  if (spec.n_categories) {
    std::uniform_int_distribution<int> d(0, static_cast<int>(spec.n_categories) - 1);
    for (auto& l : labels) l = d(rng);
  }
  in.cat = one_hot<T>(labels, spec.n_categories);
  in.cont = draw_uniform<T>(batch, spec.n_continuous, spec.cont_lo, spec.cont_hi, rng);
  return in;
}

template <typename T>
LatentInput<T> conditioned_latent(const LatentSpec& spec, const std::vector<int>& labels,
                                  nn::Rng& rng) {
  LatentInput<T> in;
  in.cat = one_hot<T>(labels, spec.n_categories);
  in.z = draw_normal<T>(labels.size(), spec.z_dim, rng);
  in.cont = draw_uniform<T>(labels.size(), spec.n_continuous, spec.cont_lo, spec.cont_hi, rng);
  return in;
}

#define TSGAN_INSTANTIATE_MODELS(T)                                                             \
  template struct LatentInput<T>;                                                               \
  template class Generator<T>;                                                                  \
  template class Critic<T>;                                                                     \
  template Models<T> build_models(const LatentSpec&, const ArchConfig&, Mode, std::uint64_t);   \
  template Tensor<T> generate(Generator<T>&, const LatentInput<T>&);                            \
  template CodeEstimate<T> split_code(const LatentSpec&, const Tensor<T>&);                     \
  template Tensor<T> critic_score(const Critic<T>&, const Tensor<T>&, const Tensor<T>*);        \
  template CodeEstimate<T> q_infer(const Critic<T>&, const Tensor<T>&);                         \
  template std::pair<Tensor<T>, CodeEstimate<T>> critic_outputs(const Critic<T>&,               \
                                                                const Tensor<T>&);              \
  template Tensor<T> one_hot(const std::vector<int>&, std::size_t);                             \
  template LatentInput<T> sample_latent(const LatentSpec&, std::size_t, nn::Rng&);              \
  template LatentInput<T> conditioned_latent(const LatentSpec&, const std::vector<int>&, nn::Rng&);

TSGAN_INSTANTIATE_MODELS(float)
TSGAN_INSTANTIATE_MODELS(double)

#undef TSGAN_INSTANTIATE_MODELS

}  // namespace tsgan
