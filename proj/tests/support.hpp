#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tsgan/autodiff.hpp"
#include "tsgan/ops.hpp"

namespace tsgan::testing {

using VarD = ad::Var<double>;
using TensorD = Tensor<double>;

inline TensorD random_tensor(const Shape& shape, std::mt19937_64& rng, double lo = -1.0,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  TensorD t(shape);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = u(rng);
  return t;
}

struct GradCheck {
  double worst = 0.0;  // largest |analytic - numeric| / (rtol |numeric| + atol)
  std::size_t checked = 0;
  std::size_t refined = 0;  // entries that needed a smaller step
  std::string where;
  bool ok = true;
};

// Central differences of a scalar function of several parameters, compared to
// reverse-mode gradients: |a - n| <= rtol |n| + atol elementwise. Networks with
// LeakyReLU are only piecewise smooth: when a +-h step straddles a kink the
// central difference is biased, so a failing entry is retried with h/10 and
// h/100 before it counts as a mismatch.
inline GradCheck check_gradients(const std::function<VarD(const std::vector<VarD>&)>& f,
                                 const std::vector<VarD>& params, double h = 1e-5,
                                 double rtol = 1e-4, double atol = 1e-8) {
  GradCheck out;
  VarD y = f(params);
  const auto grads = ad::grad(y, params);
  for (std::size_t p = 0; p < params.size(); ++p) {
    VarD param = params[p];
    TensorD& v = param.mutable_value();
    for (std::size_t i = 0; i < v.numel(); ++i) {
      const double keep = v[i];
      const double ana = grads[p].value()[i];
      double num = 0.0, score = 0.0;
      for (int attempt = 0; attempt < 3; ++attempt) {
        const double step = h * std::pow(0.1, attempt);
        v[i] = keep + step;
        const double fp = f(params).value().item();
        v[i] = keep - step;
        const double fm = f(params).value().item();
        v[i] = keep;
        num = (fp - fm) / (2.0 * step);
        score = std::abs(ana - num) / (rtol * std::abs(num) + atol);
        if (score <= 1.0) {
          out.refined += attempt > 0;
          break;
        }
      }
      ++out.checked;
      if (score > out.worst) {
        out.worst = score;
        out.where = "param " + std::to_string(p) + " entry " + std::to_string(i) + ": analytic " +
                    std::to_string(ana) + " numeric " + std::to_string(num);
      }
      if (!(score <= 1.0)) out.ok = false;
    }
  }
  return out;
}

inline double dot(const TensorD& a, const TensorD& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.numel(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

// Mixture of profile families: smooth shapes with noise, random walks, and
// quantized series with many ties and plateaus.
inline std::vector<std::vector<double>> random_profiles(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> p(96);
    switch (c % 4) {
      case 0: {
        const double center = 24 + 48 * u(rng), width = 4 + 12 * u(rng);
        for (std::size_t i = 0; i < 96; ++i) {
          const double d = (static_cast<double>(i) - center) / width;
          p[i] = 1 + 5 * std::exp(-0.5 * d * d) + 0.2 * n01(rng);
        }
        break;
      }
      case 1: {
        double x = 5;
        for (auto& v : p) v = x = std::max(0.01, x + n01(rng));
        break;
      }
      case 2:
        for (auto& v : p) v = std::floor(4 * u(rng)) + 0.5;
        break;
      default:
        for (std::size_t i = 0; i < 96; ++i) {
          p[i] = (i / 12) % 2 ? 6.0 + 0.1 * u(rng) : 1.0 + 0.1 * u(rng);
        }
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace tsgan::testing
