#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "tsgan/models.hpp"
#include "tsgan/profile_data.hpp"

using namespace tsgan;

namespace {

ArchConfig small_arch() {
  ArchConfig a;
  a.base_channels = 8;
  return a;
}

Tensor<float> uniform_rows(std::size_t b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Tensor<float> x({b, kProfileLen});
  for (std::size_t i = 0; i < x.numel(); ++i) x[i] = u(rng);
  return x;
}

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("default architecture reaches 96 samples") {
    const ArchConfig arch;
    std::size_t len = arch.seed_len;
    for (std::size_t b = 0; b < arch.blocks; ++b) len = (len - 1) * arch.stride - 2 * arch.pad + arch.kernel;
    CHECK(len == 96);
    CHECK(arch.generator_channels() == std::vector<std::size_t>{256, 128, 64, 32, 1});
    CHECK(arch.feature_dim() == 256 * 6);

    auto m = build_models<float>(LatentSpec{}, arch, Mode::infogan, 1);
    nn::Rng rng(2);
    const auto lat = sample_latent<float>(LatentSpec{}, 3, rng);
    const auto out = generate(m.generator, lat);
    CHECK(out.shape() == Shape{3, 96});

    ArchConfig bad = arch;
    bad.blocks = 3;
    CHECK_THROWS_AS(build_models<float>(LatentSpec{}, bad, Mode::infogan, 1), ConfigError);
  }

  TEST_CASE("construction is reproducible from the seed") {
    const auto a = build_models<float>(LatentSpec{}, small_arch(), Mode::infogan, 9);
    const auto b = build_models<float>(LatentSpec{}, small_arch(), Mode::infogan, 9);
    const auto c = build_models<float>(LatentSpec{}, small_arch(), Mode::infogan, 10);
    const auto pa = a.generator.parameters(), pb = b.generator.parameters(), pc = c.generator.parameters();
    bool differs = false;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].second.value() == pb[i].second.value());
      differs = differs || !(pa[i].second.value() == pc[i].second.value());
    }
    CHECK(differs);
    const auto ca = a.critic.parameters(), cb = b.critic.parameters();
    for (std::size_t i = 0; i < ca.size(); ++i) CHECK(ca[i].second.value() == cb[i].second.value());
  }

  TEST_CASE("plain wgan has no code head") {
    const auto m = build_models<float>(LatentSpec{100, 0, 0}, small_arch(), Mode::wgan, 1);
    CHECK_FALSE(m.critic.has_code_head());
    CHECK(m.critic.code_parameters().empty());
    const auto info = build_models<float>(LatentSpec{}, small_arch(), Mode::infogan, 1);
    CHECK(info.critic.has_code_head());
  }

  TEST_CASE("generator output is bounded, equivariant and deterministic") {
    auto m = build_models<float>(LatentSpec{}, small_arch(), Mode::infogan, 4);
    nn::Rng rng(5);
    auto lat = sample_latent<float>(LatentSpec{}, 6, rng);
    for (std::size_t i = 0; i < lat.z.numel(); ++i) lat.z[i] *= 20.0f;
    const auto out = generate(m.generator, lat);
    for (float v : out.vec()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
    CHECK(generate(m.generator, lat) == out);

    const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
    LatentInput<float> p = lat;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < lat.z.dim(1); ++j) p.z.at(i, j) = lat.z.at(perm[i], j);
      for (std::size_t j = 0; j < 2; ++j) p.cat.at(i, j) = lat.cat.at(perm[i], j);
    }
    const auto pout = generate(m.generator, p);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 96; ++j) CHECK(pout.at(i, j) == out.at(perm[i], j));
    }
  }

  TEST_CASE("critic heads") {
    const auto m = build_models<float>(LatentSpec{100, 3, 1}, small_arch(), Mode::infogan, 6);
    const auto x = uniform_rows(5, 7);
    const auto q = q_infer(m.critic, x);
    CHECK(q.cat_probs.shape() == Shape{5, 3});
    CHECK(q.cont_mean.shape() == Shape{5, 1});
    for (std::size_t i = 0; i < 5; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 3; ++j) s += q.cat_probs.at(i, j);
      CHECK(std::abs(s - 1.0) <= 1e-6);
    }
    const auto scores = critic_score(m.critic, x);
    CHECK(scores.shape() == Shape{5});
    CHECK(scores[0] != scores[1]);

    const auto [s2, q2] = critic_outputs(m.critic, x);
    CHECK(s2 == scores);
    CHECK(q2.cat_probs == q.cat_probs);
    CHECK(q2.cont_mean == q.cont_mean);

    Tensor<float> short_x({2, 95});
    CHECK_THROWS_AS(critic_score(m.critic, short_x), ShapeError);
  }

  TEST_CASE("property: trunk is shared and heads are separate") {
    auto m = build_models<float>(LatentSpec{}, small_arch(), Mode::infogan, 8);
    const auto x = uniform_rows(4, 1);
    const auto s0 = critic_score(m.critic, x);
    const auto q0 = q_infer(m.critic, x).cat_probs;

    auto trunk = m.critic.trunk_parameters();
    trunk.front().second.mutable_value()[0] += 0.5f;
    const auto s1 = critic_score(m.critic, x);
    const auto q1 = q_infer(m.critic, x).cat_probs;
    CHECK_FALSE(s1 == s0);
    CHECK_FALSE(q1 == q0);

    auto score_head = m.critic.score_parameters();
    for (auto& [name, v] : score_head) v.mutable_value()[0] += 0.5f;
    CHECK(q_infer(m.critic, x).cat_probs == q1);
    const auto s2 = critic_score(m.critic, x);
    CHECK_FALSE(s2 == s1);

    auto code_head = m.critic.code_parameters();
    for (auto& [name, v] : code_head) v.mutable_value()[0] += 0.5f;
    CHECK(critic_score(m.critic, x) == s2);
    CHECK_FALSE(q_infer(m.critic, x).cat_probs == q1);
  }

  TEST_CASE("latent sampling") {
    const LatentSpec spec{100, 2, 1};
    nn::Rng rng(12);
    const auto lat = sample_latent<float>(spec, 10000, rng);
    CHECK(lat.z.shape() == Shape{10000, 100});
    std::size_t first = 0;
    for (std::size_t i = 0; i < 10000; ++i) {
      CHECK(lat.cat.at(i, 0) + lat.cat.at(i, 1) == 1.0f);
      CHECK((lat.cat.at(i, 0) == 0.0f || lat.cat.at(i, 0) == 1.0f));
      if (lat.cat.at(i, 0) == 1.0f) ++first;
      CHECK(lat.cont[i] >= -2.0f);
      CHECK(lat.cont[i] <= 2.0f);
    }
    CHECK(std::abs(static_cast<double>(first) / 10000.0 - 0.5) <= 0.02);
    nn::Rng r1(3), r2(3);
    const auto a = sample_latent<float>(spec, 7, r1);
    const auto b = sample_latent<float>(spec, 7, r2);
    CHECK(a.z == b.z);
    CHECK(a.cat == b.cat);
    CHECK(a.cont == b.cont);
    CHECK(a.joined().shape() == Shape{7, 103});
  }

  TEST_CASE("conditioned latent uses the given labels") {
    nn::Rng rng(1);
    const auto lat = conditioned_latent<float>(LatentSpec{}, {0, 1}, rng);
    CHECK(lat.cat.vec() == std::vector<float>{1, 0, 0, 1});
    CHECK(lat.categories() == std::vector<int>{0, 1});
    CHECK_THROWS(conditioned_latent<float>(LatentSpec{}, {2}, rng));
    CHECK_THROWS(conditioned_latent<float>(LatentSpec{}, {-1}, rng));
  }

  TEST_CASE("cgan critic takes the condition as input channels") {
    const auto m = build_models<float>(LatentSpec{}, small_arch(), Mode::cgan, 3);
    CHECK_FALSE(m.critic.has_code_head());
    const auto x = uniform_rows(2, 2);
    const auto c0 = one_hot<float>({0, 0}, 2);
    const auto c1 = one_hot<float>({1, 1}, 2);
    CHECK_FALSE(critic_score(m.critic, x, &c0) == critic_score(m.critic, x, &c1));
  }
}
