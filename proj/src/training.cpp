#include "tsgan/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tsgan/labeling.hpp"

namespace tsgan {

using ad::Var;

void TrainingConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (batch_size < 2) throw ConfigError("train.batch_size must be >= 2");
  if (n_critic < 1) throw ConfigError("train.n_critic must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train.beta1/beta2 must lie in [0, 1)");
  }
  if (!(eps_adam > 0.0)) throw ConfigError("train.eps must be positive");
  if (lambda_gp < 0.0 || lambda_cat < 0.0 || lambda_cont < 0.0) {
    throw ConfigError("train: loss weights must be non-negative");
  }
  if (checkpoint_every < 1) throw ConfigError("train.checkpoint_every must be >= 1");
  if (eval_samples < 2) throw ConfigError("train.eval_samples must be >= 2");
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kEvalStream = 1;
constexpr std::uint64_t kRecalStream = 2;
constexpr std::uint64_t kEpochStream = 1000;

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& m, const std::size_t* idx, std::size_t count) {
  const std::size_t len = m.dim(1);
  std::vector<T> out(count * len);
  for (std::size_t i = 0; i < count; ++i) {
    std::copy_n(m.ptr() + idx[i] * len, len, out.begin() + static_cast<long>(i * len));
  }
  return Tensor<T>(Shape{count, len}, std::move(out));
}

template <typename T>
std::vector<T> draw_eps(std::size_t n, nn::Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<T> eps(n);
  for (auto& e : eps) e = static_cast<T>(u(rng));
  return eps;
}

double scalar_of(const Var<float>& v) { return static_cast<double>(v.value().item()); }

}  // namespace

TrainState init_state(const RunSpec& spec, const NormStats& norm) {
  spec.latent.validate();
  spec.arch.validate();
  spec.train.validate();
  const auto& tc = spec.train;
  if (tc.mode == Mode::infogan && spec.latent.code_dim() == 0) {
    throw ConfigError("infogan mode needs at least one latent code");
  }
  if (tc.mode == Mode::cgan && spec.latent.n_categories < 2) {
    throw ConfigError("cgan mode needs n_categories >= 2");
  }
  TrainState s;
  s.spec = spec;
  s.models = build_models<float>(spec.latent, spec.arch, tc.mode, tc.seed);
  const auto lr = static_cast<float>(tc.lr);
  const auto b1 = static_cast<float>(tc.beta1);
  const auto b2 = static_cast<float>(tc.beta2);
  const auto eps = static_cast<float>(tc.eps_adam);
  s.opt_critic = nn::Adam<float>(lr, b1, b2, eps);
  s.opt_gen = nn::Adam<float>(lr, b1, b2, eps);
  s.opt_code = nn::Adam<float>(lr, b1, b2, eps);
  s.norm = norm;
  return s;
}

template <typename T>
Var<T> gradient_penalty_at(const Critic<T>& critic, const Tensor<T>& x_real,
                           const Tensor<T>& x_fake, const std::vector<T>& eps,
                           const Tensor<T>* cond) {
  if (x_real.shape() != x_fake.shape() || x_real.rank() != 2) {
    throw ShapeError("gradient penalty: real " + shape_str(x_real.shape()) + " vs fake " +
                     shape_str(x_fake.shape()));
  }
  const std::size_t b = x_real.dim(0);
  const std::size_t len = x_real.dim(1);
  if (eps.size() != b) throw ShapeError("gradient penalty: one eps per row expected");
  Tensor<T> mixed(x_real.shape());
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < len; ++j) {
      const std::size_t k = i * len + j;
      mixed[k] = eps[i] * x_real[k] + (T(1) - eps[i]) * x_fake[k];
    }
  }
  ad::RecordingGuard rec(ad::Recording::higher);
  Var<T> x_hat = Var<T>::parameter(std::move(mixed));
  Var<T> scores = critic.score(critic.trunk(x_hat, cond));
  Var<T> g = ad::input_gradient(scores, x_hat);
  Var<T> norm = ad::sqrt(ad::add_scalar(ad::row_sum(ad::mul(g, g)), T(1e-12)));
  Var<T> dev = ad::add_scalar(norm, T(-1));
  return ad::mean_all(ad::mul(dev, dev));
}

template <typename T>
Var<T> gradient_penalty(const Critic<T>& critic, const Tensor<T>& x_real, const Tensor<T>& x_fake,
                        nn::Rng& rng, const Tensor<T>* cond) {
  return gradient_penalty_at(critic, x_real, x_fake, draw_eps<T>(x_real.dim(0), rng), cond);
}

template <typename T>
Var<T> critic_loss(const Critic<T>& critic, const Tensor<T>& x_real, const Tensor<T>& x_fake,
                   T lambda_gp, nn::Rng& rng, const Tensor<T>* cond_real,
                   const Tensor<T>* cond_fake, CriticLossParts* parts) {
  Var<T> s_real = ad::mean_all(critic.score(critic.trunk(Var<T>::constant(x_real), cond_real)));
  Var<T> s_fake = ad::mean_all(critic.score(critic.trunk(Var<T>::constant(x_fake), cond_fake)));
  // The interpolate keeps the real batch's condition.
  Var<T> gp = gradient_penalty(critic, x_real, x_fake, rng, cond_real);
  if (parts) {
    parts->wasserstein = static_cast<double>(s_real.value().item() - s_fake.value().item());
    parts->gp = static_cast<double>(gp.value().item());
  }
  return ad::add(ad::sub(s_fake, s_real), ad::mul_scalar(gp, lambda_gp));
}

template <typename T>
Var<T> info_loss(const Var<T>& code_out, const LatentInput<T>& latent, T lambda_cat,
                 T lambda_cont, InfoLossParts* parts) {
  const std::size_t b = latent.batch();
  const std::size_t nc = latent.cat.rank() ? latent.cat.dim(1) : 0;
  const std::size_t nk = latent.cont.rank() ? latent.cont.dim(1) : 0;
  if (code_out.shape() != Shape{b, nc + nk}) {
    throw ShapeError("info loss: code output " + shape_str(code_out.shape()) + " for " +
                     std::to_string(nc) + "+" + std::to_string(nk) + " codes");
  }
  Var<T> total;
  if (nc) {
    Var<T> logp = ad::log_softmax(ad::slice1(code_out, 0, nc));
    Var<T> ce = ad::mul_scalar(ad::sum_all(ad::mul(logp, Var<T>::constant(latent.cat))),
                               T(-1) / static_cast<T>(b));
    if (parts) parts->cat = static_cast<double>(ce.value().item());
    total = ad::mul_scalar(ce, lambda_cat);
  }
  if (nk) {
    Var<T> d = ad::sub(ad::slice1(code_out, nc, nk), Var<T>::constant(latent.cont));
    Var<T> mse = ad::mean_all(ad::mul(d, d));
    if (parts) parts->cont = static_cast<double>(mse.value().item());
    Var<T> w = ad::mul_scalar(mse, lambda_cont);
    total = total.defined() ? ad::add(total, w) : w;
  }
  if (!total.defined()) throw ConfigError("info loss: latent has no codes");
  return total;
}

template <typename T>
Var<T> generator_loss(const Var<T>& scores_fake, const Var<T>& code_out,
                      const LatentInput<T>& latent, T lambda_cat, T lambda_cont) {
  Var<T> adv = ad::neg(ad::mean_all(scores_fake));
  if (!code_out.defined()) return adv;
  return ad::add(adv, info_loss(code_out, latent, lambda_cat, lambda_cont));
}

std::string TrainingLog::csv() const {
  std::ostringstream os;
  os << "epoch,wasserstein,critic_loss,gp,info_cat,info_cont";
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t k = 0; k < n_clusters; ++k) os << ",ratio_c" << c << "_clu" << k;
  }
  os << '\n';
  for (const auto& r : rows) {
    os << r.epoch << ',' << format_number(r.wasserstein) << ',' << format_number(r.critic_loss)
       << ',' << format_number(r.gp) << ',' << format_number(r.info_cat) << ','
       << format_number(r.info_cont);
    for (std::size_t c = 0; c < n_classes; ++c) {
      for (std::size_t k = 0; k < n_clusters; ++k) {
        const bool have = c < r.ratios.size() && k < r.ratios[c].size();
        os << ',' << (have ? format_number(r.ratios[c][k]) : std::string("nan"));
      }
    }
    os << '\n';
  }
  return os.str();
}

void TrainingLog::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write training log " + path);
  f << csv();
}

namespace {

struct EvalBatch {
  Tensor<float> real;
  Tensor<float> real_cond;  // cgan only
  LatentInput<float> latent;
};

EvalBatch eval_batch(const TrainState& s, const Tensor<float>& x, const std::vector<int>& tags) {
  const std::size_t n = x.dim(0);
  const std::size_t m = std::min(n, s.spec.train.eval_samples);
  nn::Rng rng(derive_seed(s.spec.train.seed, kEvalStream));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  EvalBatch e;
  e.real = gather_rows(x, idx.data(), m);
  const LatentSpec& ls = s.models.generator.spec();
  if (s.spec.train.mode == Mode::cgan) {
    std::vector<int> lab(m);
    for (std::size_t i = 0; i < m; ++i) lab[i] = tags[idx[i]];
    e.real_cond = one_hot<float>(lab, ls.n_categories);
    e.latent = conditioned_latent<float>(ls, lab, rng);
  } else {
    e.latent = sample_latent<float>(ls, m, rng);
  }
  return e;
}

double eval_wasserstein(TrainState& s, const EvalBatch& e) {
  const Tensor<float> fake = generate(s.models.generator, e.latent);
  const bool cg = s.spec.train.mode == Mode::cgan;
  const Tensor<float>* cond = cg ? &e.real_cond : nullptr;
  const Tensor<float> sr = critic_score(s.models.critic, e.real, cond);
  const Tensor<float> sf = critic_score(s.models.critic, fake, cond);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < sr.numel(); ++i) a += sr[i];
  for (std::size_t i = 0; i < sf.numel(); ++i) b += sf[i];
  return a / static_cast<double>(sr.numel()) - b / static_cast<double>(sf.numel());
}

std::vector<std::vector<double>> class_ratios(const TrainState& s, const ProfileDataset& ds,
                                              const std::vector<int>& tags) {
  const auto& critic = s.models.critic;
  if (tags.empty() || !critic.has_code_head() || critic.spec().n_categories < 2) return {};
  const std::size_t nc = critic.spec().n_categories;
  const auto pred = label_with_q(critic, ds);
  const int max_tag = *std::max_element(tags.begin(), tags.end());
  const std::size_t ncls = static_cast<std::size_t>(max_tag) + 1;
  std::vector<std::vector<double>> r(ncls, std::vector<double>(nc, 0.0));
  std::vector<double> rows(ncls, 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    r[tags[i]][pred[i]] += 1.0;
    rows[tags[i]] += 1.0;
  }
  for (std::size_t c = 0; c < ncls; ++c) {
    if (rows[c] > 0) {
      for (double& v : r[c]) v /= rows[c];
    }
  }
  return r;
}

}  // namespace

double wasserstein_estimate(TrainState& state, const ProfileDataset& normalized) {
  if (!normalized.normalized) throw DataError("wasserstein estimate: dataset must be normalized");
  const bool cg = state.spec.train.mode == Mode::cgan;
  if (cg && !normalized.labeled()) throw DataError("cgan: every profile needs a class tag");
  const auto x = normalized.matrix<float>();
  return eval_wasserstein(state, eval_batch(state, x, cg ? normalized.tags() : std::vector<int>{}));
}

void recalibrate_batchnorm(Generator<float>& g, std::uint64_t seed, std::size_t batches,
                           std::size_t batch_size) {
  auto norms = g.norms();
  std::vector<float> saved;
  for (auto* bn : norms) {
    saved.push_back(bn->momentum);
    bn->momentum = 0.0f;
    bn->reset_running();
  }
  nn::Rng rng(seed);
  {
    ad::NoGrad off;
    for (std::size_t i = 0; i < batches; ++i) {
      const auto latent = sample_latent<float>(g.spec(), batch_size, rng);
      g.forward(Var<float>::constant(latent.joined()), true);
    }
  }
  for (std::size_t i = 0; i < norms.size(); ++i) norms[i]->momentum = saved[i];
}

TrainingLog train(TrainState& s, const ProfileDataset& normalized, const TrainHooks& hooks) {
  if (!normalized.normalized) throw DataError("train: dataset must be min-max normalized first");
  if (normalized.size() < 2) throw DataError("train: need at least 2 profiles");
  if (normalized.length != s.spec.arch.profile_len) {
    throw DataError("train: profile length " + std::to_string(normalized.length) +
                    " does not match the model's " + std::to_string(s.spec.arch.profile_len));
  }
  const TrainingConfig& tc = s.spec.train;
  const Mode mode = tc.mode;
  const bool cg = mode == Mode::cgan;
  if (cg && !normalized.labeled()) throw DataError("cgan: every profile needs a class tag");

  // Tags feed only the monitoring, except as the cgan condition.
  const std::vector<int> tags = normalized.labeled() ? normalized.tags() : std::vector<int>{};
  const ProfileDataset blind = normalized.untagged();
  const Tensor<float> x = blind.matrix<float>();
  const std::size_t n = x.dim(0);
  const std::size_t bs = std::min(tc.batch_size, n);
  const std::size_t n_batches = n / bs;

  auto& G = s.models.generator;
  auto& C = s.models.critic;
  const LatentSpec& ls = G.spec();
  const bool info = mode == Mode::infogan && C.has_code_head();
  const auto critic_named = [&] {
    auto p = C.trunk_parameters();
    auto h = C.score_parameters();
    p.insert(p.end(), h.begin(), h.end());
    return p;
  }();
  const auto code_named = [&] {
    auto p = C.trunk_parameters();
    auto h = C.code_parameters();
    p.insert(p.end(), h.begin(), h.end());
    return p;
  }();
  const auto critic_params = nn::vars_of(critic_named);
  const auto code_params = nn::vars_of(code_named);
  const auto gen_params = nn::vars_of(G.parameters());

  const EvalBatch eval = eval_batch(s, x, tags);

  TrainingLog log;
  log.n_classes = tags.empty() ? ls.n_categories : static_cast<std::size_t>(
                                                        *std::max_element(tags.begin(), tags.end()) + 1);
  log.n_clusters = ls.n_categories;
  if (!info) log.n_classes = log.n_clusters = 0;

  // Consecutive non-finite values, counted per loss.
  int critic_streak = 0, gen_streak = 0;
  auto guard = [&](int& streak, double v, const char* what) {
    if (std::isfinite(v)) {
      streak = 0;
      return true;
    }
    if (++streak >= 3) {
      throw DivergenceError(std::string("training diverged: ") + what +
                            " non-finite for 3 consecutive steps at epoch " +
                            std::to_string(s.epoch + 1));
    }
    return false;
  };

  const auto lambda_gp = static_cast<float>(tc.lambda_gp);
  const auto lambda_cat = static_cast<float>(tc.lambda_cat);
  const auto lambda_cont = static_cast<float>(tc.lambda_cont);

  while (s.epoch < tc.epochs) {
    const std::size_t e = s.epoch;
    if (tc.lr_decay) {
      const auto lr = static_cast<float>(tc.lr * (1.0 - static_cast<double>(e) /
                                                            static_cast<double>(tc.epochs)));
      s.opt_critic.lr = s.opt_gen.lr = s.opt_code.lr = lr;
    }
    nn::Rng rng(derive_seed(tc.seed, kEpochStream + e));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    double sum_loss = 0.0, sum_gp = 0.0, sum_cat = 0.0, sum_cont = 0.0;
    std::size_t n_crit = 0, n_gen = 0;
    for (std::size_t bi = 0; bi < n_batches; ++bi) {
      const std::size_t* idx = perm.data() + bi * bs;
      const Tensor<float> real = gather_rows(x, idx, bs);
      Tensor<float> cond;
      LatentInput<float> latent;
      if (cg) {
        std::vector<int> lab(bs);
        for (std::size_t i = 0; i < bs; ++i) lab[i] = tags[idx[i]];
        cond = one_hot<float>(lab, ls.n_categories);
        latent = conditioned_latent<float>(ls, lab, rng);
      } else {
        latent = sample_latent<float>(ls, bs, rng);
      }
      Tensor<float> fake;
      {
        ad::NoGrad off;
        fake = G.forward(Var<float>::constant(latent.joined()), true).value();
      }
      const Tensor<float>* cp = cg ? &cond : nullptr;
      CriticLossParts parts;
      Var<float> loss = critic_loss(C, real, fake, lambda_gp, rng, cp, cp, &parts);
      if (guard(critic_streak, scalar_of(loss), "critic loss")) {
        s.opt_critic.step(critic_params, ad::grad(loss, critic_params));
        sum_loss += scalar_of(loss);
        sum_gp += parts.gp;
        ++n_crit;
      }
      ++s.critic_steps;
      if (s.critic_steps % tc.n_critic != 0) continue;

      // Generator (and code head) step.
      LatentInput<float> gl;
      Tensor<float> gcond;
      if (cg) {
        std::vector<int> lab(bs);
        std::uniform_int_distribution<int> d(0, static_cast<int>(ls.n_categories) - 1);
        for (auto& l : lab) l = d(rng);
        gl = conditioned_latent<float>(ls, lab, rng);
        gcond = one_hot<float>(lab, ls.n_categories);
      } else {
        gl = sample_latent<float>(ls, bs, rng);
      }
      ad::RecordingGuard rec(ad::Recording::first);
      Var<float> xg = G.forward(Var<float>::constant(gl.joined()), true);
      Var<float> feat = C.trunk(xg, cg ? &gcond : nullptr);
      Var<float> adv = ad::neg(ad::mean_all(C.score(feat)));
      InfoLossParts ip;
      Var<float> info_term;
      if (info) info_term = info_loss(C.code(feat), gl, lambda_cat, lambda_cont, &ip);
      Var<float> gloss = info ? ad::add(adv, info_term) : adv;
      if (!guard(gen_streak, scalar_of(gloss), "generator loss")) continue;
      auto gg = ad::grad(gloss, gen_params);
      if (info) {
        auto gq = ad::grad(info_term, code_params);
        s.opt_code.step(code_params, gq);
      }
      s.opt_gen.step(gen_params, gg);
      sum_cat += ip.cat;
      sum_cont += ip.cont;
      ++n_gen;
    }

    ++s.epoch;
    const bool last = s.epoch == tc.epochs;
    if (last) recalibrate_batchnorm(G, derive_seed(tc.seed, kRecalStream));

    EpochRecord rec;
    rec.epoch = s.epoch;
    rec.wasserstein = eval_wasserstein(s, eval);
    rec.critic_loss = n_crit ? sum_loss / static_cast<double>(n_crit) : 0.0;
    rec.gp = n_crit ? sum_gp / static_cast<double>(n_crit) : 0.0;
    rec.info_cat = n_gen ? sum_cat / static_cast<double>(n_gen) : 0.0;
    rec.info_cont = n_gen ? sum_cont / static_cast<double>(n_gen) : 0.0;
    if (info) rec.ratios = class_ratios(s, blind, tags);
    log.rows.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);
    if ((last || s.epoch % tc.checkpoint_every == 0) && hooks.on_checkpoint) {
      hooks.on_checkpoint(s);
    }
  }
  return log;
}

ProfileDataset generate_profiles(TrainState& s, const GenerateRequest& req) {
  const LatentSpec& ls = s.models.generator.spec();
  if (req.n == 0) throw ConfigError("generate: n must be positive");
  if (req.cat && (ls.n_categories == 0 || *req.cat < 0 ||
                  static_cast<std::size_t>(*req.cat) >= ls.n_categories)) {
    throw ConfigError("generate: category " + std::to_string(*req.cat) + " outside the model's " +
                      std::to_string(ls.n_categories) + " categories");
  }
  if (!req.cont.empty() && req.cont.size() != ls.n_continuous) {
    throw ConfigError("generate: " + std::to_string(req.cont.size()) + " continuous values for " +
                      std::to_string(ls.n_continuous) + " continuous codes");
  }
  nn::Rng rng(req.seed);
  LatentInput<float> latent = sample_latent<float>(ls, req.n, rng);
  if (req.cat) latent.cat = one_hot<float>(std::vector<int>(req.n, *req.cat), ls.n_categories);
  for (std::size_t i = 0; i < req.n && !req.cont.empty(); ++i) {
    for (std::size_t j = 0; j < ls.n_continuous; ++j) {
      latent.cont[i * ls.n_continuous + j] = static_cast<float>(req.cont[j]);
    }
  }
  const Tensor<float> out = generate(s.models.generator, latent);
  std::vector<int> tags;
  if (ls.n_categories) tags = latent.categories();
  ProfileDataset ds = dataset_from_matrix(out, tags);
  ds.normalized = true;
  ds.norm_stats = s.norm;
  return req.denormalize ? denormalize(ds, s.norm) : ds;
}

metrics::CodeSampler traversal_sampler(TrainState& s, std::size_t batch, std::uint64_t seed) {
  if (s.models.generator.spec().n_continuous == 0) {
    throw ConfigError("traverse: checkpoint has no continuous latent code");
  }
  if (batch == 0) throw ConfigError("traverse: batch must be positive");
  return [&s, batch, seed](double code) {
    const LatentSpec& ls = s.models.generator.spec();
    nn::Rng rng(seed);
    LatentInput<float> latent = sample_latent<float>(ls, batch, rng);
    for (std::size_t i = 0; i < batch; ++i) latent.cont[i * ls.n_continuous] = static_cast<float>(code);
    const Tensor<float> out = generate(s.models.generator, latent);
    std::vector<std::vector<double>> rows(batch, std::vector<double>(out.dim(1)));
    const double span = s.norm.x_max - s.norm.x_min;
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < out.dim(1); ++j) {
        rows[i][j] = static_cast<double>(out.at(i, j)) * span + s.norm.x_min;
      }
    }
    return rows;
  };
}

TrainingLog train_cgan(TrainState& state, const ProfileDataset& normalized,
                       const TrainHooks& hooks) {
  if (state.spec.train.mode != Mode::cgan) throw ConfigError("train_cgan: state is not in cgan mode");
  return train(state, normalized, hooks);
}

#define TSGAN_INSTANTIATE_TRAINING(T)                                                            \
  template Var<T> gradient_penalty(const Critic<T>&, const Tensor<T>&, const Tensor<T>&,        \
                                   nn::Rng&, const Tensor<T>*);                                 \
  template Var<T> gradient_penalty_at(const Critic<T>&, const Tensor<T>&, const Tensor<T>&,     \
                                      const std::vector<T>&, const Tensor<T>*);                 \
  template Var<T> critic_loss(const Critic<T>&, const Tensor<T>&, const Tensor<T>&, T,          \
                              nn::Rng&, const Tensor<T>*, const Tensor<T>*, CriticLossParts*);  \
  template Var<T> info_loss(const Var<T>&, const LatentInput<T>&, T, T, InfoLossParts*);        \
  template Var<T> generator_loss(const Var<T>&, const Var<T>&, const LatentInput<T>&, T, T);

TSGAN_INSTANTIATE_TRAINING(float)
TSGAN_INSTANTIATE_TRAINING(double)

#undef TSGAN_INSTANTIATE_TRAINING

}  // namespace tsgan
