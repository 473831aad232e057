#include "tsgan/labeling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace tsgan {

LabelReport score_labels(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw DataError("score_labels: prediction/truth size mismatch");
  if (pred.empty()) throw DataError("score_labels: no labels");
  int max_pred = 0, max_truth = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || truth[i] < 0) throw DataError("score_labels: negative label");
    max_pred = std::max(max_pred, pred[i]);
    max_truth = std::max(max_truth, truth[i]);
  }
  LabelReport r;
  r.n_classes = static_cast<std::size_t>(max_truth) + 1;
  r.n_clusters = static_cast<std::size_t>(max_pred) + 1;
  const std::size_t dim = std::max(r.n_classes, r.n_clusters);
  if (dim > 8) throw ConfigError("score_labels: at most 8 clusters/classes supported");

  std::vector<std::vector<double>> counts(dim, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < pred.size(); ++i) counts[truth[i]][pred[i]] += 1.0;

  r.assignment.assign(r.n_classes, std::vector<double>(r.n_clusters, 0.0));
  for (std::size_t c = 0; c < r.n_classes; ++c) {
    const double row = std::accumulate(counts[c].begin(), counts[c].end(), 0.0);
    for (std::size_t k = 0; k < r.n_clusters; ++k) {
      r.assignment[c][k] = row > 0 ? counts[c][k] / row : 0.0;
    }
  }

  // perm[k] = class assigned to cluster k.
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  do {
    double hits = 0.0;
    for (std::size_t k = 0; k < dim; ++k) hits += counts[perm[k]][k];
    if (hits > best) {
      best = hits;
      r.best_permutation.assign(perm.begin(), perm.begin() + static_cast<long>(r.n_clusters));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  r.accuracy = best / static_cast<double>(pred.size());
  return r;
}

template <typename T>
std::vector<int> label_with_q(const Critic<T>& critic, const ProfileDataset& normalized,
                              std::size_t batch) {
  if (!critic.has_code_head() || critic.spec().n_categories < 2) {
    throw ConfigError("label: checkpoint has no categorical code head");
  }
  if (!normalized.normalized) throw DataError("label: dataset must be normalized first");
  const std::size_t n = normalized.size();
  const std::size_t len = normalized.length;
  const std::size_t nc = critic.spec().n_categories;
  const Tensor<T> all = normalized.matrix<T>();
  std::vector<int> labels(n, 0);
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t b = std::min(batch, n - start);
    std::vector<T> rows(all.ptr() + start * len, all.ptr() + (start + b) * len);
    const auto est = q_infer(critic, Tensor<T>(Shape{b, len}, std::move(rows)));
    for (std::size_t i = 0; i < b; ++i) {
      const T* p = est.cat_probs.ptr() + i * nc;
      labels[start + i] = static_cast<int>(std::max_element(p, p + nc) - p);
    }
  }
  return labels;
}

template std::vector<int> label_with_q(const Critic<float>&, const ProfileDataset&, std::size_t);
template std::vector<int> label_with_q(const Critic<double>&, const ProfileDataset&, std::size_t);

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::uint64_t restart_seed(std::uint64_t master, std::uint64_t r) {
  // splitmix64 step
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (r + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Single-point transfers that lower inertia once the centroids move with the
// point (Hartigan's criterion). Lloyd fixed points can still admit such moves.
void transfer_refine(const std::vector<std::vector<double>>& pts, KMeansResult& r) {
  const std::size_t n = pts.size();
  const std::size_t k = r.centroids.size();
  const std::size_t dim = pts[0].size();
  std::vector<std::vector<double>> sum(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(r.labels[i]);
    for (std::size_t j = 0; j < dim; ++j) sum[c][j] += pts[i][j];
    ++count[c];
  }
  auto refresh = [&](std::size_t c) {
    if (count[c] == 0) return;
    for (std::size_t j = 0; j < dim; ++j) r.centroids[c][j] = sum[c][j] / static_cast<double>(count[c]);
  };
  for (std::size_t c = 0; c < k; ++c) refresh(c);
  auto total = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sqdist(pts[i], r.centroids[static_cast<std::size_t>(r.labels[i])]);
    return s;
  };
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto from = static_cast<std::size_t>(r.labels[i]);
      if (count[from] < 2) continue;
      const double nf = static_cast<double>(count[from]);
      const double leave = nf / (nf - 1.0) * sqdist(pts[i], r.centroids[from]);
      std::size_t to = from;
      double best = leave;
      for (std::size_t c = 0; c < k; ++c) {
        if (c == from) continue;
        const double nc = static_cast<double>(count[c]);
        const double join = nc / (nc + 1.0) * sqdist(pts[i], r.centroids[c]);
        if (join < best * (1.0 - 1e-12)) {
          best = join;
          to = c;
        }
      }
      if (to == from) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        sum[from][j] -= pts[i][j];
        sum[to][j] += pts[i][j];
      }
      --count[from];
      ++count[to];
      r.labels[i] = static_cast<int>(to);
      refresh(from);
      refresh(to);
      moved = true;
    }
  }
  r.inertia = total();
  if (r.inertia_trace.empty() || r.inertia < r.inertia_trace.back()) r.inertia_trace.push_back(r.inertia);
}

KMeansResult lloyd(const std::vector<std::vector<double>>& pts, const KMeansOptions& opt,
                   std::uint64_t seed) {
  const std::size_t n = pts.size();
  const std::size_t k = opt.k;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  KMeansResult r;
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  r.centroids.push_back(pts[first(rng)]);
  std::vector<double> d2(n);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& cen : r.centroids) best = std::min(best, sqdist(pts[i], cen));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double u = unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    r.centroids.push_back(pts[pick]);
  }

  r.labels.assign(n, 0);
  std::vector<double> dist(n);
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sqdist(pts[i], r.centroids[c]);
        if (d < best) {
          best = d;
          arg = static_cast<int>(c);
        }
      }
      r.labels[i] = arg;
      dist[i] = best;
      inertia += best;
    }
    r.inertia = inertia;
    r.inertia_trace.push_back(inertia);
    r.iterations = it + 1;

    std::vector<std::vector<double>> next(k, std::vector<double>(pts[0].size(), 0.0));
    std::vector<std::size_t> members(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& c = next[static_cast<std::size_t>(r.labels[i])];
      for (std::size_t j = 0; j < c.size(); ++j) c[j] += pts[i][j];
      ++members[static_cast<std::size_t>(r.labels[i])];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (members[c] == 0) {
        const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        next[c] = pts[far];
        dist[far] = 0.0;
        continue;
      }
      for (double& v : next[c]) v /= static_cast<double>(members[c]);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) shift += sqdist(next[c], r.centroids[c]);
    r.centroids = std::move(next);
    if (shift <= opt.tol) break;
  }
  // Final assignment against the converged centroids.
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = sqdist(pts[i], r.centroids[c]);
      if (d < best) {
        best = d;
        r.labels[i] = static_cast<int>(c);
      }
    }
  }
  transfer_refine(pts, r);
  return r;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, const KMeansOptions& opt) {
  if (opt.k < 1) throw ConfigError("kmeans: k must be >= 1");
  if (points.size() < opt.k) throw DataError("kmeans: fewer points than clusters");
  if (opt.restarts < 1) throw ConfigError("kmeans: need at least one restart");
  for (const auto& p : points) {
    if (p.size() != points[0].size()) throw DataError("kmeans: points differ in dimension");
  }
  std::vector<KMeansResult> runs(opt.restarts);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    runs[r] = lloyd(points, opt, restart_seed(opt.seed, r));
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return runs[best];
}

KMeansResult kmeans(const ProfileDataset& ds, const KMeansOptions& opt) {
  std::vector<std::vector<double>> pts;
  pts.reserve(ds.size());
  for (const auto& p : ds.profiles) pts.push_back(p.values);
  return kmeans(pts, opt);
}

}  // namespace tsgan
