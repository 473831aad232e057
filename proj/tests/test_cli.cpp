#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "tsgan/profile_data.hpp"
#include "tsgan/version.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(TSGAN_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tsgan_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_tiny_config(const fs::path& path) {
  std::ofstream(path) << "[latent]\nz_dim = 8\nn_continuous = 1\n[model]\nbase_channels = 8\n"
                         "[train]\nepochs = 1\nbatch_size = 4\nseed = 3\n";
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors") {
    auto r = run_cli("make-surrogate");
    CHECK(r.code == 2);
    CHECK(r.output.rfind("error[usage]:", 0) == 0);
    CHECK(run_cli("no-such-command").code == 2);
    CHECK(run_cli("").code == 2);
  }

  TEST_CASE("make-surrogate is reproducible") {
    const auto dir = scratch("surrogate");
    REQUIRE(run_cli("make-surrogate --out " + (dir / "a.csv").string()).code == 0);
    REQUIRE(run_cli("make-surrogate --out " + (dir / "b.csv").string()).code == 0);
    const auto a = tsgan::load_csv((dir / "a.csv").string());
    CHECK(a.size() == 1400);
    CHECK(a.labeled());
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    const auto echo = slurp(dir / "a.csv.config.ini");
    CHECK(echo.find(tsgan::kVersion) != std::string::npos);
    CHECK(echo.find("n-per-class") != std::string::npos);
    REQUIRE(run_cli("make-surrogate --seed 1 --out " + (dir / "c.csv").string()).code == 0);
    CHECK_FALSE(slurp(dir / "a.csv") == slurp(dir / "c.csv"));
    CHECK(run_cli("make-surrogate --classes nope --out " + (dir / "d.csv").string()).code == 4);
  }

  TEST_CASE("train, generate, label and traverse") {
    const auto dir = scratch("pipeline");
    const auto data = (dir / "data.csv").string();
    const auto cfg = (dir / "tiny.ini").string();
    write_tiny_config(cfg);
    REQUIRE(run_cli("make-surrogate --n-per-class 4 --out " + data).code == 0);

    const auto out = dir / "run";
    auto r = run_cli("train --quiet --data " + data + " --config " + cfg + " --out-dir " + out.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    for (const char* f : {"effective_config.ini", "VERSION", "training_log.csv", "final.tsgan",
                          "ckpt_epoch_0001.tsgan"}) {
      CHECK(fs::exists(out / f));
    }
    CHECK(slurp(out / "VERSION") == std::string(tsgan::kVersion) + "\n");
    CHECK(slurp(out / "effective_config.ini").find("batch_size = 4") != std::string::npos);

    const auto out2 = dir / "run2";
    REQUIRE(run_cli("train --quiet --data " + data + " --config " + cfg + " --out-dir " + out2.string()).code == 0);
    CHECK(slurp(out / "training_log.csv") == slurp(out2 / "training_log.csv"));
    CHECK(slurp(out / "final.tsgan") == slurp(out2 / "final.tsgan"));

    const auto ckpt = (out / "final.tsgan").string();
    const auto gen = (dir / "gen.csv").string();
    REQUIRE(run_cli("generate --ckpt " + ckpt + " --n 17 --cat 1 --out " + gen).code == 0);
    CHECK(tsgan::load_csv(gen).size() == 17);
    CHECK(fs::exists(gen + ".config.ini"));

    r = run_cli("generate --ckpt " + ckpt + " --cont 3.5 --out " + gen);
    CHECK(r.code == 0);
    CHECK(r.output.find("warning") != std::string::npos);
    CHECK(run_cli("generate --ckpt " + ckpt + " --cat 5 --out " + gen).code == 4);
    CHECK(run_cli("generate --ckpt " + data + " --out " + gen).code == 3);

    const auto lab = dir / "label";
    REQUIRE(run_cli("label --ckpt " + ckpt + " --data " + data + " --out " + lab.string()).code == 0);
    CHECK(fs::exists(lab / "labels.csv"));
    CHECK(fs::exists(lab / "label_report.csv"));
    CHECK(fs::exists(lab / "VERSION"));

    const auto tv1 = dir / "tv1", tv2 = dir / "tv2";
    REQUIRE(run_cli("traverse --ckpt " + ckpt + " --batch 8 --out " + tv1.string()).code == 0);
    REQUIRE(run_cli("traverse --ckpt " + ckpt + " --batch 8 --out " + tv2.string()).code == 0);
    CHECK(slurp(tv1 / "volatility.csv") == slurp(tv2 / "volatility.csv"));
    CHECK(fs::exists(tv1 / "spearman.csv"));
  }

  TEST_CASE("cgan on unlabeled data is a data error") {
    const auto dir = scratch("cgan");
    const auto data = (dir / "data.csv").string();
    REQUIRE(run_cli("make-surrogate --n-per-class 4 --out " + data).code == 0);
    auto ds = tsgan::load_csv(data).untagged();
    const auto blind = (dir / "blind.csv").string();
    tsgan::write_csv(blind, ds);
    const auto cfg = (dir / "tiny.ini").string();
    write_tiny_config(cfg);
    auto r = run_cli("train --quiet --mode cgan --data " + blind + " --config " + cfg + " --out-dir " +
                     (dir / "run").string());
    CHECK(r.code == 3);
    CHECK(r.output.find("error[data]:") != std::string::npos);
    CHECK(run_cli("train --data " + blind + " --config /nonexistent.ini").code == 4);
  }

  TEST_CASE("evaluate and kmeans") {
    const auto dir = scratch("evaluate");
    const auto data = (dir / "data.csv").string();
    REQUIRE(run_cli("make-surrogate --n-per-class 20 --out " + data).code == 0);
    const auto ev = dir / "ev";
    REQUIRE(run_cli("evaluate --real " + data + " --synthetic " + data + " --out " + ev.string()).code == 0);
    std::istringstream kl(slurp(ev / "kl.csv"));
    std::string line;
    std::getline(kl, line);
    int rows = 0;
    while (std::getline(kl, line)) {
      ++rows;
      std::stringstream ss(line);
      std::vector<std::string> cells;
      std::string c;
      while (std::getline(ss, c, ',')) cells.push_back(c);
      REQUIRE(cells.size() >= 4);
      CHECK(std::stod(cells[2]) == 0.0);
      CHECK(std::stod(cells[3]) == 0.0);
    }
    CHECK(rows > 0);
    CHECK(fs::exists(ev / "shape_report.csv"));

    const auto km = dir / "km";
    REQUIRE(run_cli("kmeans --data " + data + " --k 2 --out " + km.string()).code == 0);
    CHECK(fs::exists(km / "labels.csv"));
    CHECK(fs::exists(km / "centroids.csv"));
    CHECK(fs::exists(km / "effective_config.ini"));
  }
}
