#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "tsgan/metrics.hpp"

using namespace tsgan;
using namespace tsgan::metrics;
using tsgan::testing::random_profiles;

namespace {

bool close(double a, double b, double rtol = 1e-9) {
  return std::abs(a - b) <= rtol * std::max({std::abs(a), std::abs(b), 1e-300}) || a == b;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("near peak / near base examples") {
    CHECK(near_peak(std::vector<double>(96, 5.0)) == 5.0);
    CHECK(near_base(std::vector<double>(96, 5.0)) == 5.0);
    std::vector<double> ramp(96);
    for (std::size_t i = 0; i < 96; ++i) ramp[i] = static_cast<double>(i + 1) / 96.0;
    // max removed, rank 0.975 * 94 = 91.65 between the 92nd and 93rd values
    CHECK(near_peak(ramp) == doctest::Approx(92.65 / 96.0).epsilon(1e-12));
    std::vector<double> spike(96, 1.0);
    spike[40] = 100.0;
    CHECK(near_peak(spike) == 1.0);
    std::vector<double> dropout(96, 3.0);
    for (std::size_t i = 0; i < 96; ++i) dropout[i] += 0.01 * static_cast<double>(i % 7);
    auto with_zero = dropout;
    with_zero[10] = 0.0;
    CHECK(near_base(with_zero) == doctest::Approx(oracle::near_base(with_zero)).epsilon(1e-12));
    CHECK(near_base(with_zero) > 2.9);
    CHECK_THROWS_AS(near_peak(std::vector<double>{1.0, 2.0}), DataError);
  }

  TEST_CASE("high-load duration examples") {
    std::vector<double> p(96, 1.0);
    for (std::size_t i = 10; i <= 21; ++i) p[i] = 5.0;
    CHECK(high_load_duration(p) == 3.0);
    CHECK(high_load_duration(std::vector<double>(96, 2.0)) == 0.0);
  }

  TEST_CASE("rising events examples") {
    std::vector<double> ramp(96, 0.0);
    for (std::size_t i = 40; i < 96; ++i) ramp[i] = 10.0;
    for (std::size_t i = 30; i < 40; ++i) ramp[i] = static_cast<double>(i - 29);  // 1..10
    const auto ev = rising_events(ramp);
    REQUIRE(ev.size() == 1);
    // last base sample 29, first above 5 at index 35
    CHECK(ev[0].start == 29);
    CHECK(ev[0].end == 35);
    CHECK(rising_duration(ramp) == 6 * 0.25);

    std::vector<double> square(96);
    for (std::size_t i = 0; i < 96; ++i) square[i] = (i / 12) % 2 ? 8.0 : 2.0;
    CHECK(rising_frequency(square) == 4);
    CHECK(rising_events(std::vector<double>(96, 3.0)).empty());
  }

  TEST_CASE("volatility examples") {
    CHECK(safod(std::vector<double>(10, 3.0)) == 0.0);
    CHECK(cv(std::vector<double>(10, 3.0)) == 0.0);
    CHECK(safod(std::vector<double>{0, 1, 0, 1}) == 3.0);
    CHECK(rsafodm(std::vector<double>{0, 1, 0, 1}) == 3.0);
    CHECK(cv(std::vector<double>{1, 3}) == 0.5);
    CHECK_THROWS_AS(cv(std::vector<double>{-1, 1}), DataError);
    CHECK_THROWS_AS(rsafodm(std::vector<double>{0, 0, 0}), DataError);
  }

  TEST_CASE("every metric matches its brute-force oracle on random profiles") {
    const auto profiles = random_profiles(200, 7);
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      const auto& p = profiles[k];
      INFO("profile " << k);
      CHECK(close(near_peak(p), oracle::near_peak(p)));
      CHECK(close(near_base(p), oracle::near_base(p)));
      CHECK(close(high_load_duration(p), oracle::high_load_hours(p)));
      const auto ev = rising_events(p);
      const auto ref = oracle::rising(p);
      REQUIRE(ev.size() == ref.size());
      for (std::size_t e = 0; e < ev.size(); ++e) {
        CHECK(ev[e].start == ref[e].start);
        CHECK(ev[e].end == ref[e].end);
      }
      double dur = 0.0;
      for (const auto& e : ref) dur += 0.25 * static_cast<double>(e.end - e.start);
      if (!ref.empty()) dur /= static_cast<double>(ref.size());
      CHECK(close(rising_duration(p), dur));
      CHECK(close(safod(p), oracle::safod(p)));
      CHECK(close(cv(p), oracle::cv(p)));
      CHECK(close(rsafodm(p), oracle::rsafodm(p)));
    }
  }

  TEST_CASE("kl divergence matches the oracle and is exactly zero on itself") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> p(50 + trial), q(80 + 2 * trial);
      for (auto& v : p) v = n(rng);
      for (auto& v : q) v = 0.5 + 1.3 * n(rng);
      const auto r = kl_divergence(p, q);
      const auto o = oracle::kl(p, q);
      CHECK(close(r.p_to_q, o.pq));
      CHECK(close(r.q_to_p, o.qp));
      CHECK(r.p_to_q >= 0.0);
      CHECK(r.q_to_p >= 0.0);
      const auto self = kl_divergence(p, p);
      CHECK(self.p_to_q == 0.0);
      CHECK(self.q_to_p == 0.0);
    }
  }

  TEST_CASE("kl divergence: hand-summed 4-bin case, disjoint support, degenerate range") {
    // p: bins {0.5, 0.5, 0, 0}, q: {0.25, 0.25, 0.25, 0.25} over [0, 4)
    const std::vector<double> p{0.5, 1.5};
    const std::vector<double> q{0.0, 1.5, 2.5, 4.0};
    const double eps = 1e-10;
    const auto r = kl_divergence(p, q, 4, eps);
    std::vector<double> hp{0.5 + eps, 0.5 + eps, eps, eps}, hq{0.25 + eps, 0.25 + eps, 0.25 + eps, 0.25 + eps};
    double sp = 0, sq = 0;
    for (int i = 0; i < 4; ++i) sp += hp[i], sq += hq[i];
    double pq = 0, qp = 0;
    for (int i = 0; i < 4; ++i) {
      const double a = hp[i] / sp, b = hq[i] / sq;
      pq += a * std::log(a / b);
      qp += b * std::log(b / a);
    }
    CHECK(r.p_to_q == doctest::Approx(pq).epsilon(1e-12));
    CHECK(r.q_to_p == doctest::Approx(qp).epsilon(1e-12));
    const auto far = kl_divergence(std::vector<double>{0, 0.1}, std::vector<double>{10, 10.1});
    CHECK(far.p_to_q > 10.0);
    CHECK(far.q_to_p > 10.0);
    CHECK_THROWS_AS(kl_divergence(std::vector<double>{2, 2}, std::vector<double>{2}), DataError);
  }

  TEST_CASE("property: time reversal, ordering, translation") {
    const auto profiles = random_profiles(120, 9);
    for (const auto& p : profiles) {
      std::vector<double> r(p.rbegin(), p.rend());
      CHECK(near_peak(r) == near_peak(p));
      CHECK(near_base(r) == near_base(p));
      CHECK(high_load_duration(r) == high_load_duration(p));
      CHECK(near_peak(p) >= near_base(p));
      CHECK(safod(p) >= 0.0);
      CHECK(cv(p) >= 0.0);
      CHECK(rsafodm(p) >= 0.0);
      std::vector<double> shifted = p;
      for (auto& v : shifted) v += 3.5;
      CHECK(safod(shifted) == doctest::Approx(safod(p)).epsilon(1e-12));
    }
  }

  TEST_CASE("shape report aggregates per class with population std") {
    ProfileDataset ds;
    std::vector<double> a(96, 1.0), b(96, 1.0);
    for (std::size_t i = 10; i < 22; ++i) a[i] = 5.0;  // 3 h high
    for (std::size_t i = 10; i < 18; ++i) b[i] = 5.0;  // 2 h high
    ds.profiles = {{a, 0}, {b, 0}, {a, 1}, {a, 1}};
    const auto rep = shape_report(ds);
    REQUIRE(rep.size() == 2);
    CHECK(rep[0].class_tag == 0);
    CHECK(rep[0].high_load_hours.mean == 2.5);
    CHECK(rep[0].high_load_hours.std == 0.5);
    CHECK(rep[1].high_load_hours.std == 0.0);
    CHECK(rep[1].near_peak.std == 0.0);
    CHECK(rep[0].rising_frequency == 1.0);
    CHECK_THROWS_AS(shape_report(ProfileDataset{}), DataError);
  }

  TEST_CASE("mean and peak samples") {
    ProfileDataset ds;
    std::vector<double> z(96, 0.0);
    z.back() = 1.0;
    ds.profiles = {{std::vector<double>(96, 2.5), std::nullopt}, {z, std::nullopt}};
    const auto mp = mean_peak_samples(ds);
    CHECK(mp.means[0] == 2.5);
    CHECK(mp.peaks[0] == 2.5);
    CHECK(mp.means[1] == doctest::Approx(1.0 / 96.0));
    CHECK(mp.peaks[1] == 1.0);
  }

  TEST_CASE("spearman with ties and traversal evaluation") {
    CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{4, 3, 2, 1}) == doctest::Approx(-1.0));
    // ties get average ranks: y ranks (1.5, 1.5, 3, 4)
    CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{5, 5, 6, 7}) ==
          doctest::Approx(0.9486832980505138));
    CHECK(std::isnan(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1})));

    const auto grid = default_traversal_grid();
    REQUIRE(grid.size() == 8);
    const double expected[] = {-2.0, -1.428, -0.857, -0.286, 0.286, 0.857, 1.428, 2.0};
    for (int i = 0; i < 8; ++i) CHECK(grid[static_cast<std::size_t>(i)] == doctest::Approx(expected[i]).epsilon(1e-3));

    // Noise amplitude proportional to -code gives a strictly decreasing SAFOD.
    auto monotone = [](double code) {
      std::vector<std::vector<double>> batch;
      for (int b = 0; b < 4; ++b) {
        std::vector<double> p(96);
        for (std::size_t i = 0; i < 96; ++i) p[i] = 5.0 + (2.5 - code) * ((i + b) % 2 ? 1.0 : -1.0) * 0.5;
        batch.push_back(p);
      }
      return batch;
    };
    const auto rep = traversal_eval(monotone, grid);
    CHECK(rep.rho_safod == doctest::Approx(-1.0));
    CHECK(rep.rho_cv == doctest::Approx(-1.0));
    CHECK(rep.rho_rsafodm == doctest::Approx(-1.0));

    // Code-independent noise: |rho| averaged over repetitions stays small.
    double mean_abs = 0.0;
    const int reps = 200;
    std::mt19937_64 rng(5);
    for (int r = 0; r < reps; ++r) {
      auto null = [&rng](double) {
        std::uniform_real_distribution<double> u(1.0, 2.0);
        std::vector<std::vector<double>> batch(8, std::vector<double>(96));
        for (auto& p : batch) {
          for (auto& v : p) v = u(rng);
        }
        return batch;
      };
      mean_abs += std::abs(traversal_eval(null, grid).rho_safod);
    }
    mean_abs /= reps;
    // E|rho| under independence with n = 8 is about 0.3
    CHECK(mean_abs < 0.45);
  }
}
