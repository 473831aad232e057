#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "oracles.hpp"
#include "tsgan/profile_data.hpp"

using namespace tsgan;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content, const std::string& name = "data.csv") {
    const auto dir = fs::temp_directory_path() / ("tsgan_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    path = (dir / name).string();
    std::ofstream(path, std::ios::binary) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::string row(std::size_t n, const std::string& v, const std::string& tail = "") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + v;
  return s + tail + "\n";
}

std::string read_all(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("profile-data") {
  TEST_CASE("csv loading") {
    TempFile zeros("# header\n" + row(96, "0") + row(96, "0"));
    const auto ds = load_csv(zeros.path);
    CHECK(ds.size() == 2);
    CHECK_FALSE(ds.normalized);
    CHECK_FALSE(ds.labeled());
    for (const auto& p : ds.profiles) CHECK(p.values == std::vector<double>(96, 0.0));

    TempFile labeled(row(96, "1", ",0") + row(96, "2", ",1") + row(96, "3", ",0"));
    const auto lab = load_csv(labeled.path);
    CHECK(lab.tags() == std::vector<int>{0, 1, 0});
    CHECK(lab.profiles[1].values[5] == 2.0);
    CHECK(lab.untagged().labeled() == false);

    TempFile short_row(row(95, "1"));
    try {
      load_csv(short_row.path);
      FAIL("expected an error");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("row 1: expected 96 values") != std::string::npos);
    }
    TempFile bad_cell(row(96, "1") + row(95, "1", ",x"));
    CHECK_THROWS_AS(load_csv(bad_cell.path), DataError);
    TempFile bad_label(row(96, "1", ",-1"));
    CHECK_THROWS_AS(load_csv(bad_label.path), DataError);
    TempFile empty("# only a comment\n");
    CHECK_THROWS_AS(load_csv(empty.path), DataError);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
  }

  TEST_CASE("csv write/read round trip is exact") {
    const auto ds = make_surrogate(5, surrogate_preset("load"), 3);
    TempFile out("", "roundtrip.csv");
    write_csv(out.path, ds, true, {"comment"});
    const auto back = load_csv(out.path);
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(back.profiles[i].values == ds.profiles[i].values);
      CHECK(back.profiles[i].class_tag == ds.profiles[i].class_tag);
    }
  }

  TEST_CASE("min-max normalization and its inverse") {
    ProfileDataset ds;
    ds.length = 3;
    ds.profiles = {{{2, 3, 4}, std::nullopt}};
    auto [n, s] = minmax_normalize(ds);
    CHECK(n.profiles[0].values == std::vector<double>{0, 0.5, 1});
    CHECK(n.normalized);
    CHECK(s.x_min == 2);
    CHECK(s.x_max == 4);
    CHECK_THROWS_AS(minmax_normalize(n), DataError);

    ProfileDataset flat;
    flat.length = 3;
    flat.profiles = {{{5, 5, 5}, std::nullopt}};
    CHECK_THROWS_AS(minmax_normalize(flat), DataError);
    CHECK_THROWS_AS(minmax_normalize(ProfileDataset{}), DataError);

    ProfileDataset wide;
    wide.length = 3;
    wide.profiles = {{{10, 35, 110}, std::nullopt}};
    CHECK(minmax_normalize(wide).first.profiles[0].values[1] == 0.25);

    CHECK(denormalize(Profile{{0.5}, {}}, NormStats{0, 10}).values[0] == 5.0);
    CHECK(denormalize(Profile{{0.0}, {}}, NormStats{3, 7}).values[0] == 3.0);
    CHECK(denormalize(Profile{{1.0}, {}}, NormStats{3, 7}).values[0] == 7.0);
  }

  TEST_CASE("property: normalization hits 0 and 1 exactly and round-trips") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int trial = 0; trial < 50; ++trial) {
      ProfileDataset ds;
      for (int i = 0; i < 4; ++i) {
        Profile p;
        p.values.resize(96);
        for (auto& v : p.values) v = u(rng);
        ds.profiles.push_back(p);
      }
      auto [n, s] = minmax_normalize(ds);
      double lo = 1, hi = 0;
      for (const auto& p : n.profiles) {
        for (double v : p.values) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      CHECK(lo == 0.0);
      CHECK(hi == 1.0);
      const auto back = denormalize(n, s);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < 96; ++j) {
          const double a = ds.profiles[i].values[j], b = back.profiles[i].values[j];
          CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
      }
    }
  }

  TEST_CASE("surrogate generation") {
    for (const auto& name : surrogate_preset_names()) {
      auto specs = surrogate_preset(name);
      const auto a = make_surrogate(2, specs, 7);
      const auto b = make_surrogate(2, specs, 7);
      CHECK(a.size() == 2 * specs.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.profiles[i].values == b.profiles[i].values);
      for (const auto& p : a.profiles) {
        CHECK(p.values.size() == 96);
        for (double v : p.values) CHECK(v >= 0.0);
      }
    }
    CHECK_THROWS_AS(make_surrogate(0, surrogate_preset("load"), 1), ConfigError);
    CHECK_THROWS_AS(surrogate_preset("nope"), ConfigError);
    ClassSpec bad;
    bad.peak = -1;
    CHECK_THROWS_AS(make_surrogate(1, {bad}, 1), ConfigError);

    // Noise-free plateau: near-peak at the plateau level, near-base at the floor.
    ClassSpec ind;
    ind.kind = "plateau";
    ind.base = 3.0;
    ind.peak = 8.0;
    ind.start = 8.0;
    ind.end = 18.0;
    ind.edge = 0.3;
    const auto ds = make_surrogate(3, {ind}, 5);
    for (const auto& p : ds.profiles) {
      CHECK(oracle::near_peak(p.values) == doctest::Approx(8.0).epsilon(1e-3));
      CHECK(oracle::near_base(p.values) == doctest::Approx(3.0).epsilon(1e-3));
    }
  }

  TEST_CASE("surrogate csv output is byte-identical for a fixed seed") {
    TempFile a("", "a.csv"), b("", "b.csv");
    write_csv(a.path, make_surrogate(3, surrogate_preset("pv"), 9));
    write_csv(b.path, make_surrogate(3, surrogate_preset("pv"), 9));
    CHECK(read_all(a.path) == read_all(b.path));
  }
}
