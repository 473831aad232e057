#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsgan/profile_data.hpp"

namespace tsgan::metrics {

using Series = std::span<const double>;

// Linear-interpolation percentile on sorted data (rank q * (n - 1)).
double percentile_sorted(const std::vector<double>& sorted, double q);

// 97.5th percentile after dropping one occurrence of the maximum.
double near_peak(Series p);
// 2.5th percentile after dropping one occurrence of the minimum.
double near_base(Series p);
// Longest run strictly above (near_peak + near_base) / 2, in hours.
double high_load_duration(Series p);

struct RisingEvent {
  std::size_t start;  // last sample inside the base band
  std::size_t end;    // first sample above the high-load threshold
};

// Base band: <= near_base + 0.05 (near_peak - near_base).
std::vector<RisingEvent> rising_events(Series p);
// Mean event length in hours; 0 without events.
double rising_duration(Series p);
std::size_t rising_frequency(Series p);

double safod(Series p);
double cv(Series p);       // population standard deviation over mean
double rsafodm(Series p);  // safod / max

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // population
};
Moments moments(std::span<const double> v);

struct ShapeIndexes {
  int class_tag = -1;  // -1 when the dataset is untagged
  std::size_t count = 0;
  Moments near_peak;
  Moments near_base;
  Moments high_load_hours;
  double rising_hours = 0.0;      // mean over all rising events
  double rising_frequency = 0.0;  // mean events per profile
};

// One entry per class tag (ascending), or a single entry for untagged data.
std::vector<ShapeIndexes> shape_report(const ProfileDataset& ds);
ShapeIndexes shape_indexes(const std::vector<const std::vector<double>*>& profiles);

struct KLReport {
  double p_to_q = 0.0;  // D(P || Q)
  double q_to_p = 0.0;  // D(Q || P)
  std::vector<double> edges;
  std::vector<double> p_density;  // smoothed, renormalized bin probabilities
  std::vector<double> q_density;
  double smoothing = 1e-10;
};

KLReport kl_divergence(std::span<const double> p, std::span<const double> q,
                       std::size_t n_bins = 30, double smoothing = 1e-10);

struct MeanPeak {
  std::vector<double> means;
  std::vector<double> peaks;
};
MeanPeak mean_peak_samples(const ProfileDataset& ds);

// Spearman rank correlation with average ranks for ties; NaN when either
// side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

struct VolatilityRow {
  double code = 0.0;
  double safod = 0.0;
  double cv = 0.0;
  double rsafodm = 0.0;
};

struct VolatilityReport {
  std::vector<VolatilityRow> rows;
  double rho_safod = 0.0;
  double rho_cv = 0.0;
  double rho_rsafodm = 0.0;
};

// Produces a batch of profiles (original units) for one code value.
using CodeSampler = std::function<std::vector<std::vector<double>>(double code)>;

VolatilityReport traversal_eval(const CodeSampler& sample, const std::vector<double>& grid);

// Eight evenly spaced points over [-2, 2].
std::vector<double> default_traversal_grid();

}  // namespace tsgan::metrics
