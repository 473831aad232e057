#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsgan/tensor.hpp"

namespace tsgan {

// Samples per daily profile at 15-minute granularity.
inline constexpr std::size_t kProfileLen = 96;
inline constexpr double kHoursPerSample = 0.25;

struct Profile {
  std::vector<double> values;
  std::optional<int> class_tag;
};

struct NormStats {
  double x_min = 0.0;
  double x_max = 1.0;
};

struct ProfileDataset {
  std::vector<Profile> profiles;
  std::optional<NormStats> norm_stats;
  bool normalized = false;
  std::size_t length = kProfileLen;

  std::size_t size() const { return profiles.size(); }
  bool empty() const { return profiles.empty(); }
  // True when every profile carries a class tag.
  bool labeled() const;
  std::vector<int> tags() const;
  // Copy with class tags removed; what the unsupervised paths consume.
  ProfileDataset untagged() const;

  template <typename T>
  Tensor<T> matrix() const;
};

ProfileDataset load_csv(const std::string& path, std::size_t length = kProfileLen);

// One row per profile; the label column is written when every profile has a
// tag and include_tags is set. Lines in `comments` are emitted as '#' headers.
void write_csv(const std::string& path, const ProfileDataset& ds, bool include_tags = true,
               const std::vector<std::string>& comments = {});

// Shortest round-trip decimal form, used for every numeric output.
std::string format_number(double v);

std::pair<ProfileDataset, NormStats> minmax_normalize(const ProfileDataset& ds);
// Applies existing statistics (values may fall outside [0, 1]).
ProfileDataset normalize_with(const ProfileDataset& ds, const NormStats& s);
Profile denormalize(const Profile& p, const NormStats& s);
ProfileDataset denormalize(const ProfileDataset& ds, const NormStats& s);

template <typename T>
ProfileDataset dataset_from_matrix(const Tensor<T>& m, const std::vector<int>& tags = {});

// Parametric generator for one class of the surrogate datasets.
struct ClassSpec {
  std::string name = "class";
  std::string kind = "peaks";  // peaks | plateau | flat
  double base = 1.0;
  double peak = 4.0;
  std::vector<double> centers{12.0};  // peaks: hours
  double width = 1.5;                 // peaks: gaussian sigma, hours
  double start = 8.0;                 // plateau: hours
  double end = 18.0;
  double edge = 0.5;                  // plateau: logistic edge scale, hours
  double noise_lo = 0.0;              // AR(1) noise amplitude range, fraction of (peak - base)
  double noise_hi = 0.0;
  double rho = 0.0;                   // AR(1) coefficient
  bool gate = false;                  // scale noise by the shape
  double ripple_lo = 0.0;             // multiplicative ripple depth range
  double ripple_hi = 0.0;
  double ripple_period = 1.5;         // hours
  std::optional<double> ripple_phase; // radians; random when unset
  double scale_jitter = 0.0;          // log-normal sigma of an overall gain
  double time_jitter = 0.0;           // gaussian sigma of a time shift, hours

  void validate() const;
};

// Named class pairs: "load" (residential vs industrial), "overlap" (same
// magnitudes, different shapes) and "power" (photovoltaic vs wind-like with
// varying intraday fluctuation depth).
std::vector<ClassSpec> surrogate_preset(const std::string& name);
std::vector<std::string> surrogate_preset_names();

// Deterministic in (specs, seed). Profiles are grouped by class, tags attached.
ProfileDataset make_surrogate(std::size_t n_per_class, const std::vector<ClassSpec>& specs,
                              std::uint64_t seed);

}  // namespace tsgan
