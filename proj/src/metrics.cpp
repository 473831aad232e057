#include "tsgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>

namespace tsgan::metrics {

double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DataError("percentile of an empty sample");
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

void require_len(Series p, std::size_t n, const char* what) {
  if (p.size() < n) {
    throw DataError(std::string(what) + ": profile needs at least " + std::to_string(n) +
                    " samples");
  }
}

// Exceptions cannot cross an OpenMP region; loops park them per index.
void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

double near_peak(Series p) {
  require_len(p, 3, "near_peak");
  std::vector<double> v(p.begin(), p.end());
  std::sort(v.begin(), v.end());
  v.pop_back();
  return percentile_sorted(v, 0.975);
}

double near_base(Series p) {
  require_len(p, 3, "near_base");
  std::vector<double> v(p.begin(), p.end());
  std::sort(v.begin(), v.end());
  v.erase(v.begin());
  return percentile_sorted(v, 0.025);
}

double high_load_duration(Series p) {
  const double thr = 0.5 * (near_peak(p) + near_base(p));
  std::size_t best = 0, run = 0;
  for (double x : p) {
    run = x > thr ? run + 1 : 0;
    best = std::max(best, run);
  }
  return static_cast<double>(best) * kHoursPerSample;
}

std::vector<RisingEvent> rising_events(Series p) {
  const double peak = near_peak(p);
  const double base = near_base(p);
  std::vector<RisingEvent> events;
  if (!(peak > base)) return events;
  const double band = base + 0.05 * (peak - base);
  const double thr = 0.5 * (peak + base);
  bool armed = false;
  std::size_t last_base = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= band) {
      armed = true;
      last_base = i;
    } else if (p[i] > thr && armed) {
      events.push_back({last_base, i});
      armed = false;
    }
  }
  return events;
}

double rising_duration(Series p) {
  const auto ev = rising_events(p);
  if (ev.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : ev) total += static_cast<double>(e.end - e.start);
  return total / static_cast<double>(ev.size()) * kHoursPerSample;
}

std::size_t rising_frequency(Series p) { return rising_events(p).size(); }

double safod(Series p) {
  double s = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) s += std::abs(p[i] - p[i - 1]);
  return s;
}

Moments moments(std::span<const double> v) {
  Moments m;
  if (v.empty()) return m;
  const double n = static_cast<double>(v.size());
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / n);
  return m;
}

double cv(Series p) {
  const Moments m = moments(p);
  if (m.mean == 0.0) throw DataError("cv: undefined for a zero-mean profile");
  return m.std / m.mean;
}

double rsafodm(Series p) {
  if (p.empty()) throw DataError("rsafodm: empty profile");
  const double mx = *std::max_element(p.begin(), p.end());
  if (!(mx > 0.0)) throw DataError("rsafodm: undefined for a profile with max <= 0");
  return safod(p) / mx;
}

ShapeIndexes shape_indexes(const std::vector<const std::vector<double>*>& profiles) {
  if (profiles.empty()) throw DataError("shape report: empty dataset");
  const std::size_t n = profiles.size();
  std::vector<double> peak(n), base(n), high(n), rise_sum(n), rise_count(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const Series s(*profiles[i]);
      peak[i] = near_peak(s);
      base[i] = near_base(s);
      high[i] = high_load_duration(s);
      const auto ev = rising_events(s);
      double len = 0.0;
      for (const auto& e : ev) len += static_cast<double>(e.end - e.start) * kHoursPerSample;
      rise_sum[i] = len;
      rise_count[i] = static_cast<double>(ev.size());
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(errors);
  ShapeIndexes out;
  out.count = n;
  out.near_peak = moments(peak);
  out.near_base = moments(base);
  out.high_load_hours = moments(high);
  const double events = std::accumulate(rise_count.begin(), rise_count.end(), 0.0);
  const double hours = std::accumulate(rise_sum.begin(), rise_sum.end(), 0.0);
  out.rising_hours = events > 0 ? hours / events : 0.0;
  out.rising_frequency = events / static_cast<double>(n);
  return out;
}

std::vector<ShapeIndexes> shape_report(const ProfileDataset& ds) {
  if (ds.empty()) throw DataError("shape report: empty dataset");
  std::map<int, std::vector<const std::vector<double>*>> groups;
  const bool tagged = ds.labeled();
  for (const auto& p : ds.profiles) groups[tagged ? *p.class_tag : -1].push_back(&p.values);
  std::vector<ShapeIndexes> out;
  for (const auto& [tag, members] : groups) {
    ShapeIndexes s = shape_indexes(members);
    s.class_tag = tag;
    out.push_back(s);
  }
  return out;
}

KLReport kl_divergence(std::span<const double> p, std::span<const double> q, std::size_t n_bins,
                       double smoothing) {
  if (p.empty() || q.empty()) throw DataError("kl: both sample sets must be non-empty");
  if (n_bins < 1) throw ConfigError("kl: need at least one bin");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : p) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : q) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(hi > lo)) throw DataError("kl: degenerate sample range, all samples fall in a single bin");

  KLReport r;
  r.smoothing = smoothing;
  r.edges.resize(n_bins + 1);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i <= n_bins; ++i) r.edges[i] = lo + width * static_cast<double>(i);
  r.edges.back() = hi;

  auto histogram = [&](std::span<const double> s) {
    std::vector<double> h(n_bins, 0.0);
    for (double v : s) {
      auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n_bins));
      h[std::min(b, n_bins - 1)] += 1.0;
    }
    double total = 0.0;
    for (double& x : h) {
      x = x / static_cast<double>(s.size()) + smoothing;
      total += x;
    }
    for (double& x : h) x /= total;
    return h;
  };
  r.p_density = histogram(p);
  r.q_density = histogram(q);
  for (std::size_t i = 0; i < n_bins; ++i) {
    r.p_to_q += r.p_density[i] * std::log(r.p_density[i] / r.q_density[i]);
    r.q_to_p += r.q_density[i] * std::log(r.q_density[i] / r.p_density[i]);
  }
  return r;
}

MeanPeak mean_peak_samples(const ProfileDataset& ds) {
  MeanPeak mp;
  for (const auto& p : ds.profiles) {
    if (p.values.empty()) throw DataError("mean/peak: empty profile");
    mp.means.push_back(std::accumulate(p.values.begin(), p.values.end(), 0.0) /
                       static_cast<double>(p.values.size()));
    mp.peaks.push_back(*std::max_element(p.values.begin(), p.values.end()));
  }
  return mp;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("spearman: need two equal series");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const Moments mx = moments(rx), my = moments(ry);
  if (mx.std == 0.0 || my.std == 0.0) return std::numeric_limits<double>::quiet_NaN();
  double cov = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) cov += (rx[i] - mx.mean) * (ry[i] - my.mean);
  cov /= static_cast<double>(rx.size());
  return cov / (mx.std * my.std);
}

VolatilityReport traversal_eval(const CodeSampler& sample, const std::vector<double>& grid) {
  if (grid.size() < 2) throw ConfigError("traversal: grid needs at least two points");
  VolatilityReport rep;
  for (double code : grid) {
    const auto batch = sample(code);
    if (batch.empty()) throw DataError("traversal: sampler returned no profiles");
    const std::size_t n = batch.size();
    std::vector<double> s(n), c(n), r(n);
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      try {
        s[i] = safod(batch[i]);
        c[i] = cv(batch[i]);
        r[i] = rsafodm(batch[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    rethrow_first(errors);
    rep.rows.push_back({code, moments(s).mean, moments(c).mean, moments(r).mean});
  }
  std::vector<double> s, c, r;
  for (const auto& row : rep.rows) {
    s.push_back(row.safod);
    c.push_back(row.cv);
    r.push_back(row.rsafodm);
  }
  rep.rho_safod = spearman(grid, s);
  rep.rho_cv = spearman(grid, c);
  rep.rho_rsafodm = spearman(grid, r);
  return rep;
}

std::vector<double> default_traversal_grid() {
  std::vector<double> g(8);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = -2.0 + 4.0 * static_cast<double>(i) / 7.0;
  return g;
}

}  // namespace tsgan::metrics
