#pragma once

// Brute-force reference implementations of the profile metrics, written
// independently of the library code (selection instead of sorting, quadratic
// scans instead of single passes, long double accumulation).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace tsgan::oracle {

inline double order_stat(std::vector<double> v, std::size_t k) {
  std::nth_element(v.begin(), v.begin() + static_cast<long>(k), v.end());
  return v[k];
}

inline double linear_percentile(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const double fl = std::floor(pos);
  const auto k = static_cast<std::size_t>(fl);
  const double lo = order_stat(v, k);
  if (k + 1 >= v.size()) return lo;
  const double hi = order_stat(v, k + 1);
  return lo + (pos - fl) * (hi - lo);
}

inline std::vector<double> drop_one(const std::vector<double>& p, bool max) {
  std::size_t at = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (max ? p[i] > p[at] : p[i] < p[at]) at = i;
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i != at) out.push_back(p[i]);
  }
  return out;
}

inline double near_peak(const std::vector<double>& p) {
  return linear_percentile(drop_one(p, true), 0.975);
}
inline double near_base(const std::vector<double>& p) {
  return linear_percentile(drop_one(p, false), 0.025);
}

inline double high_load_hours(const std::vector<double>& p) {
  const double thr = 0.5 * (near_peak(p) + near_base(p));
  std::size_t best = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t j = i;
    while (j < p.size() && p[j] > thr) ++j;
    best = std::max(best, j - i);
  }
  return 0.25 * static_cast<double>(best);
}

struct Event {
  std::size_t start, end;
};

// An event ends at a sample above the threshold whose most recent base-band
// visit is later than any earlier above-threshold sample.
inline std::vector<Event> rising(const std::vector<double>& p) {
  const double pk = near_peak(p), bs = near_base(p);
  std::vector<Event> ev;
  if (!(pk > bs)) return ev;
  const double band = bs + 0.05 * (pk - bs);
  const double thr = 0.5 * (pk + bs);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] > thr)) continue;
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(j) - 1;
    bool high_between = false;
    while (k >= 0 && !(p[static_cast<std::size_t>(k)] <= band)) {
      if (p[static_cast<std::size_t>(k)] > thr) high_between = true;
      --k;
    }
    if (k >= 0 && !high_between) ev.push_back({static_cast<std::size_t>(k), j});
  }
  return ev;
}

inline double safod(const std::vector<double>& p) {
  long double s = 0.0L;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) s += std::fabs(static_cast<long double>(p[i + 1]) - p[i]);
  return static_cast<double>(s);
}

inline double cv(const std::vector<double>& p) {
  long double m = 0.0L;
  for (double v : p) m += v;
  m /= static_cast<long double>(p.size());
  long double ss = 0.0L;
  for (double v : p) ss += (v - m) * (v - m);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(p.size())) / m);
}

inline double rsafodm(const std::vector<double>& p) {
  return safod(p) / *std::max_element(p.begin(), p.end());
}

struct KL {
  double pq, qp;
};

inline KL kl(const std::vector<double>& p, const std::vector<double>& q, std::size_t bins = 30,
             double eps = 1e-10) {
  double lo = p[0], hi = p[0];
  for (const auto* s : {&p, &q}) {
    for (double v : *s) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  auto hist = [&](const std::vector<double>& s) {
    std::vector<long double> h(bins, 0.0L);
    for (double v : s) {
      std::size_t b = 0;
      // bin = number of interior edges at or below v
      for (std::size_t e = 1; e < bins; ++e) {
        if (v >= lo + (hi - lo) * static_cast<double>(e) / static_cast<double>(bins)) b = e;
      }
      h[b] += 1.0L;
    }
    long double tot = 0.0L;
    for (auto& x : h) {
      x = x / static_cast<long double>(s.size()) + eps;
      tot += x;
    }
    for (auto& x : h) x /= tot;
    return h;
  };
  const auto hp = hist(p), hq = hist(q);
  long double a = 0.0L, b = 0.0L;
  for (std::size_t i = 0; i < bins; ++i) {
    a += hp[i] * std::log(hp[i] / hq[i]);
    b += hq[i] * std::log(hq[i] / hp[i]);
  }
  return {static_cast<double>(a), static_cast<double>(b)};
}

}  // namespace tsgan::oracle
