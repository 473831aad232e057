#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsgan/metrics.hpp"
#include "tsgan/models.hpp"
#include "tsgan/profile_data.hpp"

namespace tsgan {

struct TrainingConfig {
  Mode mode = Mode::infogan;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  std::size_t n_critic = 5;
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double eps_adam = 1e-8;
  double lambda_gp = 10.0;
  double lambda_cat = 1.0;
  double lambda_cont = 0.1;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 10;
  // Linear learning-rate decay to zero over the run.
  bool lr_decay = false;
  // Real/fake samples in the fixed batch behind the logged Wasserstein estimate.
  std::size_t eval_samples = 256;

  void validate() const;
};

// Everything needed to rebuild the models and resume the run.
struct RunSpec {
  LatentSpec latent;
  ArchConfig arch;
  TrainingConfig train;
};

struct TrainState {
  RunSpec spec;
  Models<float> models;
  nn::Adam<float> opt_critic;  // trunk + score head
  nn::Adam<float> opt_gen;     // generator
  nn::Adam<float> opt_code;    // trunk + code head
  NormStats norm;
  std::size_t epoch = 0;  // completed epochs
  std::uint64_t critic_steps = 0;
};

TrainState init_state(const RunSpec& spec, const NormStats& norm);

// Loss pieces. All take recorded Vars so they can be differentiated.
// Penalty mean((||grad_x D(x_hat)||_2 - 1)^2) on x_hat = eps x_real + (1 - eps) x_fake,
// eps ~ U(0, 1) per row. Recorded for differentiation w.r.t. critic parameters.
template <typename T>
ad::Var<T> gradient_penalty(const Critic<T>& critic, const Tensor<T>& x_real,
                            const Tensor<T>& x_fake, nn::Rng& rng,
                            const Tensor<T>* cond = nullptr);
// Same, with the interpolation weights given.
template <typename T>
ad::Var<T> gradient_penalty_at(const Critic<T>& critic, const Tensor<T>& x_real,
                               const Tensor<T>& x_fake, const std::vector<T>& eps,
                               const Tensor<T>* cond = nullptr);

struct CriticLossParts {
  double wasserstein = 0.0;  // mean D(real) - mean D(fake)
  double gp = 0.0;
};

// mean D(fake) - mean D(real) + lambda_gp * GP.
template <typename T>
ad::Var<T> critic_loss(const Critic<T>& critic, const Tensor<T>& x_real, const Tensor<T>& x_fake,
                       T lambda_gp, nn::Rng& rng, const Tensor<T>* cond_real = nullptr,
                       const Tensor<T>* cond_fake = nullptr, CriticLossParts* parts = nullptr);

struct InfoLossParts {
  double cat = 0.0;   // cross-entropy, before weighting
  double cont = 0.0;  // mean squared error, before weighting
};

// lambda_cat * CE(softmax(code[:, :nc]), cat) + lambda_cont * MSE(code[:, nc:], cont).
template <typename T>
ad::Var<T> info_loss(const ad::Var<T>& code_out, const LatentInput<T>& latent, T lambda_cat,
                     T lambda_cont, InfoLossParts* parts = nullptr);

// -mean D(x_fake) (+ info_loss when code_out is defined).
template <typename T>
ad::Var<T> generator_loss(const ad::Var<T>& scores_fake, const ad::Var<T>& code_out,
                          const LatentInput<T>& latent, T lambda_cat, T lambda_cont);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double wasserstein = 0.0;
  double critic_loss = 0.0;
  double gp = 0.0;
  double info_cat = 0.0;
  double info_cont = 0.0;
  // [true class][Q cluster] fractions; empty without tags or code head.
  std::vector<std::vector<double>> ratios;
};

struct TrainingLog {
  std::size_t n_classes = 2;
  std::size_t n_clusters = 2;
  std::vector<EpochRecord> rows;

  std::string csv() const;
  void write_csv(const std::string& path) const;
};

struct TrainHooks {
  // Called after each checkpointed epoch with the state to persist.
  std::function<void(const TrainState&)> on_checkpoint;
  std::function<void(const EpochRecord&)> on_epoch;
};

// Runs the alternating loop over a normalized dataset. Class tags (when
// present) are used only for the per-epoch ratio monitoring, except in cgan
// mode where they are the conditioning signal.
TrainingLog train(TrainState& state, const ProfileDataset& normalized, const TrainHooks& hooks = {});

// Convenience: cgan-mode training; requires tags.
TrainingLog train_cgan(TrainState& state, const ProfileDataset& normalized,
                       const TrainHooks& hooks = {});

// mean D(real) - mean D(fake) on the fixed evaluation batch derived from the
// run seed; used for the log and for offline re-computation.
double wasserstein_estimate(TrainState& state, const ProfileDataset& normalized);

// Replaces generator batch-norm running statistics by a cumulative average
// over freshly generated batches.
void recalibrate_batchnorm(Generator<float>& g, std::uint64_t seed, std::size_t batches = 20,
                           std::size_t batch_size = 64);

struct GenerateRequest {
  std::size_t n = 320;
  std::optional<int> cat;    // fixed category, or sampled uniformly
  std::vector<double> cont;  // one value per continuous code, or sampled
  std::uint64_t seed = 0;
  bool denormalize = true;
};

// Eval-mode generation. Rows are tagged with their category when the model
// has one.
ProfileDataset generate_profiles(TrainState& s, const GenerateRequest& req);

// Fixes the first continuous code to the requested value; z, the category and
// any further codes are drawn from the same seed at every grid point.
metrics::CodeSampler traversal_sampler(TrainState& s, std::size_t batch, std::uint64_t seed);

}  // namespace tsgan
