#include "tsgan/profile_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace tsgan {

bool ProfileDataset::labeled() const {
  if (profiles.empty()) return false;
  for (const auto& p : profiles) {
    if (!p.class_tag) return false;
  }
  return true;
}

std::vector<int> ProfileDataset::tags() const {
  std::vector<int> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.push_back(p.class_tag.value_or(-1));
  return out;
}

ProfileDataset ProfileDataset::untagged() const {
  ProfileDataset out = *this;
  for (auto& p : out.profiles) p.class_tag.reset();
  return out;
}

template <typename T>
Tensor<T> ProfileDataset::matrix() const {
  Tensor<T> m(Shape{profiles.size(), length});
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    for (std::size_t j = 0; j < length; ++j) m[i * length + j] = static_cast<T>(profiles[i].values[j]);
  }
  return m;
}

template Tensor<float> ProfileDataset::matrix<float>() const;
template Tensor<double> ProfileDataset::matrix<double>() const;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

}  // namespace

ProfileDataset load_csv(const std::string& path, std::size_t length) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  ProfileDataset ds;
  ds.length = length;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    ++row;
    const auto cells = split_commas(view);
    if (cells.size() != length && cells.size() != length + 1) {
      throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(length) +
                      " values, got " + std::to_string(cells.size()));
    }
    Profile p;
    p.values.resize(length);
    for (std::size_t j = 0; j < length; ++j) {
      double v = 0.0;
      const auto cell = cells[j];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError("row " + std::to_string(row) + ", column " + std::to_string(j + 1) +
                        ": not a finite number '" + std::string(cell) + "'");
      }
      p.values[j] = v;
    }
    if (cells.size() == length + 1) {
      int tag = 0;
      const auto cell = cells[length];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), tag);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || tag < 0) {
        throw DataError("row " + std::to_string(row) + ": label '" + std::string(cell) +
                        "' is not a non-negative integer");
      }
      p.class_tag = tag;
    }
    ds.profiles.push_back(std::move(p));
  }
  if (ds.profiles.empty()) throw DataError("'" + path + "' contains no profiles");
  return ds;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_csv(const std::string& path, const ProfileDataset& ds, bool include_tags,
               const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto& c : comments) out << "# " << c << "\n";
  const bool tags = include_tags && ds.labeled();
  for (const auto& p : ds.profiles) {
    for (std::size_t j = 0; j < p.values.size(); ++j) {
      if (j) out << ',';
      out << format_number(p.values[j]);
    }
    if (tags) out << ',' << *p.class_tag;
    out << '\n';
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::pair<ProfileDataset, NormStats> minmax_normalize(const ProfileDataset& ds) {
  if (ds.empty()) throw DataError("normalize: empty dataset");
  if (ds.normalized) throw DataError("normalize: dataset is already normalized");
  NormStats s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : ds.profiles) {
    for (double v : p.values) {
      s.x_min = std::min(s.x_min, v);
      s.x_max = std::max(s.x_max, v);
    }
  }
  if (!(s.x_max > s.x_min)) {
    throw DataError("normalize: degenerate dataset (all values equal " + format_number(s.x_min) +
                    ")");
  }
  return {normalize_with(ds, s), s};
}

ProfileDataset normalize_with(const ProfileDataset& ds, const NormStats& s) {
  if (!(s.x_max > s.x_min)) throw DataError("normalize: invalid statistics");
  ProfileDataset out = ds;
  const double span = s.x_max - s.x_min;
  for (auto& p : out.profiles) {
    for (double& v : p.values) v = (v - s.x_min) / span;
  }
  out.normalized = true;
  out.norm_stats = s;
  return out;
}

Profile denormalize(const Profile& p, const NormStats& s) {
  Profile out = p;
  const double span = s.x_max - s.x_min;
  for (double& v : out.values) v = v * span + s.x_min;
  return out;
}

ProfileDataset denormalize(const ProfileDataset& ds, const NormStats& s) {
  ProfileDataset out = ds;
  for (auto& p : out.profiles) p = denormalize(p, s);
  out.normalized = false;
  out.norm_stats.reset();
  return out;
}

template <typename T>
ProfileDataset dataset_from_matrix(const Tensor<T>& m, const std::vector<int>& tags) {
  if (m.rank() != 2) throw ShapeError("dataset_from_matrix: expected a matrix");
  ProfileDataset ds;
  ds.length = m.dim(1);
  for (std::size_t i = 0; i < m.dim(0); ++i) {
    Profile p;
    p.values.assign(m.ptr() + i * ds.length, m.ptr() + (i + 1) * ds.length);
    if (!tags.empty()) p.class_tag = tags.at(i);
    ds.profiles.push_back(std::move(p));
  }
  return ds;
}

template ProfileDataset dataset_from_matrix(const Tensor<float>&, const std::vector<int>&);
template ProfileDataset dataset_from_matrix(const Tensor<double>&, const std::vector<int>&);

void ClassSpec::validate() const {
  auto bad = [&](const std::string& what) {
    throw ConfigError("surrogate class '" + name + "': " + what);
  };
  if (kind != "peaks" && kind != "plateau" && kind != "flat") bad("unknown kind '" + kind + "'");
  if (base < 0 || peak < 0) bad("levels must be non-negative");
  if (noise_lo < 0 || noise_hi < noise_lo) bad("noise range must satisfy 0 <= lo <= hi");
  if (ripple_lo < 0 || ripple_hi < ripple_lo || ripple_hi > 1) {
    bad("ripple range must satisfy 0 <= lo <= hi <= 1");
  }
  if (scale_jitter < 0 || time_jitter < 0) bad("jitter must be non-negative");
  if (rho <= -1 || rho >= 1) bad("rho must lie in (-1, 1)");
  if (kind == "peaks" && (centers.empty() || width <= 0)) bad("peaks need centers and width > 0");
  if (kind == "plateau" && (end <= start || edge <= 0)) bad("plateau needs start < end, edge > 0");
  if (ripple_period <= 0) bad("ripple period must be positive");
}

std::vector<ClassSpec> surrogate_preset(const std::string& name) {
  if (name == "load") {
    ClassSpec res;
    res.name = "residential";
    res.kind = "peaks";
    res.base = 1.0;
    res.peak = 4.0;
    res.centers = {7.5, 19.5};
    res.width = 1.2;
    res.noise_lo = res.noise_hi = 0.08;
    res.scale_jitter = 0.2;
    res.time_jitter = 0.7;
    ClassSpec ind;
    ind.name = "industrial";
    ind.kind = "plateau";
    ind.base = 3.0;
    ind.peak = 8.0;
    ind.start = 8.0;
    ind.end = 18.0;
    ind.edge = 0.5;
    ind.noise_lo = ind.noise_hi = 0.03;
    ind.scale_jitter = 0.2;
    ind.time_jitter = 0.7;
    return {res, ind};
  }
  if (name == "overlap") {
    auto specs = surrogate_preset("load");
    specs[0].peak = 5.0;
    specs[1].base = 1.5;
    specs[1].peak = 5.0;
    for (auto& s : specs) {
      s.scale_jitter = 0.6;
      s.time_jitter = 1.0;
    }
    return specs;
  }
  if (name == "power") {
    ClassSpec pv;
    pv.name = "photovoltaic";
    pv.kind = "peaks";
    pv.base = 0.2;
    pv.peak = 6.0;
    pv.centers = {12.0};
    pv.width = 2.5;
    pv.noise_lo = pv.noise_hi = 0.02;
    pv.ripple_lo = 0.0;
    pv.ripple_hi = 0.8;
    pv.ripple_period = 2.0;
    pv.ripple_phase = 0.0;
    ClassSpec wind;
    wind.name = "wind";
    wind.kind = "plateau";
    wind.base = 1.0;
    wind.peak = 4.0;
    wind.start = -1.0;
    wind.end = 25.0;
    wind.edge = 0.5;
    wind.noise_lo = wind.noise_hi = 0.02;
    wind.ripple_lo = 0.0;
    wind.ripple_hi = 0.8;
    wind.ripple_period = 2.0;
    wind.ripple_phase = 0.0;
    return {pv, wind};
  }
  if (name == "pv") {
    // Photovoltaic days whose intraday fluctuation depth varies from clear
    // (smooth bell) to broken cloud (deep periodic dips).
    ClassSpec pv = surrogate_preset("power")[0];
    pv.gate = true;
    pv.scale_jitter = 0.05;
    return {pv};
  }
  throw ConfigError("unknown surrogate preset '" + name + "'");
}

std::vector<std::string> surrogate_preset_names() { return {"load", "overlap", "power", "pv"}; }

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> draw_profile(const ClassSpec& s, std::size_t len, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = std::exp(s.scale_jitter * normal(rng));
  const double shift = s.time_jitter * normal(rng);

  std::vector<double> shape(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const double h = static_cast<double>(i) * kHoursPerSample;
    if (s.kind == "plateau") {
      shape[i] = logistic((h - s.start - shift) / s.edge) * logistic((s.end + shift - h) / s.edge);
    } else if (s.kind == "peaks") {
      for (double c : s.centers) {
        const double d = (h - c - shift) / s.width;
        shape[i] = std::max(shape[i], std::exp(-0.5 * d * d));
      }
    }
  }

  const double ripple = s.ripple_lo + (s.ripple_hi - s.ripple_lo) * unit(rng);
  double phase = 2.0 * M_PI * unit(rng);
  if (s.ripple_phase) phase = *s.ripple_phase;
  const double noise = s.noise_lo + (s.noise_hi - s.noise_lo) * unit(rng);
  const double innov = std::sqrt(1.0 - s.rho * s.rho);

  std::vector<double> x(len);
  double ar = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double h = static_cast<double>(i) * kHoursPerSample;
    const double wave = 0.5 + 0.5 * std::sin(2.0 * M_PI * h / s.ripple_period + phase);
    const double sh = shape[i] * (1.0 - ripple * wave);
    const double e = normal(rng);
    ar = i == 0 ? e : s.rho * ar + innov * e;
    const double gate = s.gate ? shape[i] : 1.0;
    const double v = s.base + (s.peak - s.base) * sh + noise * ar * (s.peak - s.base) * gate;
    x[i] = std::max(v * scale, 0.0);
  }
  return x;
}

}  // namespace

ProfileDataset make_surrogate(std::size_t n_per_class, const std::vector<ClassSpec>& specs,
                              std::uint64_t seed) {
  if (n_per_class < 1) throw ConfigError("surrogate: n_per_class must be >= 1");
  if (specs.empty()) throw ConfigError("surrogate: no class specs");
  for (const auto& s : specs) s.validate();
  std::mt19937_64 rng(seed);
  ProfileDataset ds;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      ds.profiles.push_back({draw_profile(specs[k], ds.length, rng), static_cast<int>(k)});
    }
  }
  return ds;
}

}  // namespace tsgan
