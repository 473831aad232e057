// Command-line front end: surrogate data, training, generation, labeling and
// evaluation. Exit codes: 0 ok, 2 usage, 3 data, 4 config, 5 divergence.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "tsgan/checkpoint.hpp"
#include "tsgan/config.hpp"
#include "tsgan/kernels.hpp"
#include "tsgan/labeling.hpp"
#include "tsgan/metrics.hpp"
#include "tsgan/version.hpp"

namespace fs = std::filesystem;
using namespace tsgan;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kConfig = 4, kDivergence = 5 };

std::string report_root() {
  if (const char* env = std::getenv("TSGAN_REPORT_DIR"); env && *env) return env;
  return "reports";
}

std::string resolve_dir(const std::string& given, const std::string& command) {
  return given.empty() ? (fs::path(report_root()) / command).string() : given;
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

std::string echo_header(const std::string& command) {
  return "# tsgan " + std::string(kVersion) + " " + command + "\n";
}

// Effective settings and tool version next to every output.
void echo_into_dir(const std::string& dir, const std::string& command, const std::string& config) {
  write_text(fs::path(dir) / "effective_config.ini", echo_header(command) + config);
  write_text(fs::path(dir) / "VERSION", std::string(kVersion) + "\n");
}

void echo_beside_file(const std::string& file, const std::string& command, const std::string& config) {
  write_text(file + ".config.ini", echo_header(command) + "version = " + kVersion + "\n" + config);
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(std::string(what) + ": cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

std::string matrix_csv_row(const std::vector<double>& row) {
  std::string s;
  for (double v : row) s += "," + format_number(v);
  return s;
}

void write_label_outputs(const std::string& dir, const std::vector<int>& labels,
                         const ProfileDataset& data) {
  std::ostringstream os;
  os << (data.labeled() ? "row,cluster,class\n" : "row,cluster\n");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    os << i << ',' << labels[i];
    if (data.labeled()) os << ',' << *data.profiles[i].class_tag;
    os << '\n';
  }
  write_text(fs::path(dir) / "labels.csv", os.str());
  if (!data.labeled()) {
    std::cout << "labeled " << labels.size() << " profiles (no class tags to score against)\n";
    return;
  }
  const LabelReport rep = score_labels(labels, data.tags());
  std::ostringstream r;
  r << "accuracy," << format_number(rep.accuracy) << '\n';
  r << "cluster_to_class";
  for (int c : rep.best_permutation) r << ',' << c;
  r << '\n';
  for (std::size_t c = 0; c < rep.assignment.size(); ++c) {
    r << "class" << c << matrix_csv_row(rep.assignment[c]) << '\n';
  }
  write_text(fs::path(dir) / "label_report.csv", r.str());
  std::cout << "accuracy " << format_number(rep.accuracy) << " (permutation-matched, "
            << labels.size() << " profiles)\n";
}

// ---- commands ----

struct SurrogateArgs {
  std::string out;
  std::size_t n_per_class = 700;
  std::string classes = "load";
  std::uint64_t seed = 0;
};

int cmd_make_surrogate(const SurrogateArgs& a, const std::string& config) {
  const auto specs = surrogate_preset(a.classes);
  const ProfileDataset ds = make_surrogate(a.n_per_class, specs, a.seed);
  const auto parent = fs::path(a.out).parent_path();
  if (!parent.empty()) make_dir(parent.string());
  std::vector<std::string> comments{"tsgan " + std::string(kVersion) + " surrogate preset=" + a.classes +
                                    " n_per_class=" + std::to_string(a.n_per_class) +
                                    " seed=" + std::to_string(a.seed)};
  write_csv(a.out, ds, true, comments);
  echo_beside_file(a.out, "make-surrogate", config);
  std::cout << "wrote " << ds.size() << " profiles to " << a.out << '\n';
  return kOk;
}

struct TrainArgs {
  std::string data;
  std::string config;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::string out_dir;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a) {
  RunSpec spec;
  KeyValues kv;
  if (!a.config.empty()) kv = read_ini(a.config);
  if (!a.mode.empty()) kv.emplace_back("train.mode", a.mode);
  if (a.seed) kv.emplace_back("train.seed", std::to_string(*a.seed));
  if (a.epochs) kv.emplace_back("train.epochs", std::to_string(*a.epochs));
  apply_config(spec, kv);

  const ProfileDataset raw = load_csv(a.data);
  if (spec.train.mode == Mode::cgan && !raw.labeled()) {
    throw DataError("cgan mode requires labeled data: every row needs a class column");
  }
  auto [normalized, stats] = minmax_normalize(raw);
  const std::string dir = resolve_dir(a.out_dir, "train");
  make_dir(dir);
  echo_into_dir(dir, "train",
                to_ini(spec) + "\n[paths]\ndata = " + a.data + "\nout_dir = " + dir + "\n");

  TrainState state = init_state(spec, stats);
  TrainHooks hooks;
  std::string last_ckpt;
  hooks.on_checkpoint = [&](const TrainState& s) {
    char name[64];
    std::snprintf(name, sizeof name, "ckpt_epoch_%04zu.tsgan", s.epoch);
    last_ckpt = (fs::path(dir) / name).string();
    save_state(last_ckpt, s);
  };
  hooks.on_epoch = [&](const EpochRecord& r) {
    if (a.quiet) return;
    std::cout << "epoch " << r.epoch << " W " << format_number(r.wasserstein) << " critic "
              << format_number(r.critic_loss) << " gp " << format_number(r.gp);
    if (!r.ratios.empty()) {
      std::cout << " ratios";
      for (const auto& row : r.ratios) std::cout << " [" << join(row) << "]";
    }
    std::cout << '\n';
  };
  TrainingLog log;
  try {
    log = train(state, normalized, hooks);
  } catch (const DivergenceError&) {
    // Keep what was logged so far for inspection.
    if (!log.rows.empty()) log.write_csv((fs::path(dir) / "training_log.csv").string());
    throw;
  }
  log.write_csv((fs::path(dir) / "training_log.csv").string());
  fs::copy_file(last_ckpt, fs::path(dir) / "final.tsgan", fs::copy_options::overwrite_existing);
  std::cout << "trained " << state.epoch << " epochs; checkpoint " << (fs::path(dir) / "final.tsgan").string()
            << '\n';
  return kOk;
}

struct GenerateArgs {
  std::string ckpt;
  std::size_t n = 320;
  std::optional<int> cat;
  std::string cont;
  std::uint64_t seed = 0;
  std::string out;
  bool keep_normalized = false;
};

int cmd_generate(const GenerateArgs& a, const std::string& config) {
  TrainState s = load_state(a.ckpt);
  GenerateRequest req;
  req.n = a.n;
  req.cat = a.cat;
  req.seed = a.seed;
  req.denormalize = !a.keep_normalized;
  if (!a.cont.empty()) {
    req.cont = parse_list(a.cont, "--cont");
    const LatentSpec& ls = s.models.generator.spec();
    for (double v : req.cont) {
      if (v < ls.cont_lo || v > ls.cont_hi) {
        std::cerr << "warning: --cont " << format_number(v) << " lies outside the training range ["
                  << format_number(ls.cont_lo) << ", " << format_number(ls.cont_hi)
                  << "]; extrapolating\n";
      }
    }
  }
  const ProfileDataset ds = generate_profiles(s, req);
  const auto parent = fs::path(a.out).parent_path();
  if (!parent.empty()) make_dir(parent.string());
  write_csv(a.out, ds, true,
            {"tsgan " + std::string(kVersion) + " generated from " + a.ckpt});
  echo_beside_file(a.out, "generate", config);
  std::cout << "wrote " << ds.size() << " profiles to " << a.out << '\n';
  return kOk;
}

int cmd_label(const std::string& ckpt, const std::string& data, const std::string& out,
              const std::string& config) {
  TrainState s = load_state(ckpt);
  const ProfileDataset raw = load_csv(data);
  const ProfileDataset normalized = normalize_with(raw, s.norm);
  const auto labels = label_with_q(s.models.critic, normalized.untagged());
  const std::string dir = resolve_dir(out, "label");
  make_dir(dir);
  echo_into_dir(dir, "label", config);
  write_label_outputs(dir, labels, raw);
  return kOk;
}

int cmd_kmeans(const std::string& data, std::size_t k, std::uint64_t seed, const std::string& out,
               const std::string& config) {
  const ProfileDataset raw = load_csv(data);
  KMeansOptions opt;
  opt.k = k;
  opt.seed = seed;
  const KMeansResult r = kmeans(raw.untagged(), opt);
  const std::string dir = resolve_dir(out, "kmeans");
  make_dir(dir);
  echo_into_dir(dir, "kmeans", config);
  std::ostringstream c;
  for (const auto& cen : r.centroids) c << join(cen) << '\n';
  write_text(fs::path(dir) / "centroids.csv", c.str());
  std::cout << "inertia " << format_number(r.inertia) << " after " << r.iterations << " iterations\n";
  write_label_outputs(dir, r.labels, raw);
  return kOk;
}

ProfileDataset subset(const ProfileDataset& ds, int tag) {
  ProfileDataset out;
  out.length = ds.length;
  for (const auto& p : ds.profiles) {
    if (p.class_tag == tag) out.profiles.push_back(p);
  }
  return out;
}

void write_shape_rows(std::ostringstream& os, const std::string& source, const ProfileDataset& ds) {
  for (const auto& s : metrics::shape_report(ds)) {
    os << source << ',' << (s.class_tag < 0 ? std::string("all") : std::to_string(s.class_tag)) << ','
       << s.count << ',' << format_number(s.near_peak.mean) << ',' << format_number(s.near_peak.std)
       << ',' << format_number(s.near_base.mean) << ',' << format_number(s.near_base.std) << ','
       << format_number(s.high_load_hours.mean) << ',' << format_number(s.high_load_hours.std) << ','
       << format_number(s.rising_hours) << ',' << format_number(s.rising_frequency) << '\n';
  }
}

int cmd_evaluate(const std::string& real_path, const std::string& syn_path, const std::string& out,
                 const std::string& config) {
  const ProfileDataset real = load_csv(real_path);
  const ProfileDataset syn = load_csv(syn_path);
  const std::string dir = resolve_dir(out, "evaluate");
  make_dir(dir);
  echo_into_dir(dir, "evaluate", config);

  std::ostringstream shape;
  shape << "source,class,count,near_peak_mean,near_peak_std,near_base_mean,near_base_std,"
           "high_load_hours_mean,high_load_hours_std,rising_hours_mean,rising_frequency_mean\n";
  write_shape_rows(shape, "real", real);
  write_shape_rows(shape, "synthetic", syn);
  write_text(fs::path(dir) / "shape_report.csv", shape.str());

  // Whole sets, then per class when both sides carry the same tags.
  std::vector<std::pair<std::string, std::pair<ProfileDataset, ProfileDataset>>> groups;
  groups.push_back({"all", {real, syn}});
  if (real.labeled() && syn.labeled()) {
    std::map<int, int> seen;
    for (int t : real.tags()) seen[t] |= 1;
    for (int t : syn.tags()) seen[t] |= 2;
    for (const auto& [t, mask] : seen) {
      if (mask == 3) groups.push_back({std::to_string(t), {subset(real, t), subset(syn, t)}});
    }
  }
  std::ostringstream kl;
  kl << "class,quantity,kl_real_to_synthetic,kl_synthetic_to_real,bins,smoothing\n";
  for (const auto& [name, pair] : groups) {
    const auto mr = metrics::mean_peak_samples(pair.first);
    const auto ms = metrics::mean_peak_samples(pair.second);
    for (const auto& [qty, p, q] : {std::tuple{"mean", &mr.means, &ms.means},
                                    std::tuple{"peak", &mr.peaks, &ms.peaks}}) {
      const auto rep = metrics::kl_divergence(*p, *q);
      kl << name << ',' << qty << ',' << format_number(rep.p_to_q) << ',' << format_number(rep.q_to_p)
         << ',' << rep.p_density.size() << ',' << format_number(rep.smoothing) << '\n';
      std::ostringstream h;
      h << "bin_left,bin_right,p_density,q_density\n";
      for (std::size_t i = 0; i < rep.p_density.size(); ++i) {
        h << format_number(rep.edges[i]) << ',' << format_number(rep.edges[i + 1]) << ','
          << format_number(rep.p_density[i]) << ',' << format_number(rep.q_density[i]) << '\n';
      }
      write_text(fs::path(dir) / ("hist_" + std::string(qty) + "_" + name + ".csv"), h.str());
      std::cout << "class " << name << ' ' << qty << " KL real->syn " << format_number(rep.p_to_q)
                << " syn->real " << format_number(rep.q_to_p) << '\n';
    }
  }
  write_text(fs::path(dir) / "kl.csv", kl.str());
  return kOk;
}

int cmd_traverse(const std::string& ckpt, const std::string& grid_text, std::size_t batch,
                 std::uint64_t seed, const std::string& out, const std::string& config) {
  TrainState s = load_state(ckpt);
  const auto grid = grid_text.empty() ? metrics::default_traversal_grid() : parse_list(grid_text, "--grid");
  const auto rep = metrics::traversal_eval(traversal_sampler(s, batch, seed), grid);
  const std::string dir = resolve_dir(out, "traverse");
  make_dir(dir);
  echo_into_dir(dir, "traverse", config);
  std::ostringstream v;
  v << "code,safod,cv,rsafodm\n";
  for (const auto& r : rep.rows) {
    v << format_number(r.code) << ',' << format_number(r.safod) << ',' << format_number(r.cv) << ','
      << format_number(r.rsafodm) << '\n';
  }
  write_text(fs::path(dir) / "volatility.csv", v.str());
  std::ostringstream sp;
  sp << "index,spearman\nsafod," << format_number(rep.rho_safod) << "\ncv," << format_number(rep.rho_cv)
     << "\nrsafodm," << format_number(rep.rho_rsafodm) << '\n';
  write_text(fs::path(dir) / "spearman.csv", sp.str());
  std::cout << "spearman safod " << format_number(rep.rho_safod) << " cv " << format_number(rep.rho_cv)
            << " rsafodm " << format_number(rep.rho_rsafodm) << '\n';
  return kOk;
}

int fail(const char* kind, const std::string& msg, int code) {
  std::string line = msg;
  for (char& c : line) {
    if (c == '\n') c = ' ';
  }
  std::cerr << "error[" << kind << "]: " << line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsgan: infoGAN feature extraction and generation for daily electrical profiles"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  int workers = 1;
  app.add_option("--workers", workers, "Threads for parallel kernels and evaluation")
      ->check(CLI::Range(1, 1024));

  SurrogateArgs sur;
  auto* c_sur = app.add_subcommand("make-surrogate", "Write a labeled synthetic profile CSV");
  c_sur->add_option("--out", sur.out, "Output CSV path")->required();
  c_sur->add_option("--n-per-class", sur.n_per_class, "Profiles per class")->check(CLI::PositiveNumber);
  c_sur->add_option("--classes", sur.classes, "Preset: load | overlap | power | pv");
  c_sur->add_option("--seed", sur.seed, "Random seed");

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train a model and write checkpoints and a log");
  c_tr->add_option("--data", tr.data, "Profile CSV")->required();
  c_tr->add_option("--config", tr.config, "Config file (key = value with [sections])");
  c_tr->add_option("--mode", tr.mode, "infogan | cgan | wgan")
      ->check(CLI::IsMember({"infogan", "cgan", "wgan"}));
  c_tr->add_option("--seed", tr.seed, "Overrides train.seed");
  c_tr->add_option("--epochs", tr.epochs, "Overrides train.epochs");
  c_tr->add_option("--out-dir", tr.out_dir, "Output directory (default $TSGAN_REPORT_DIR/train)");
  c_tr->add_flag("--quiet", tr.quiet, "No per-epoch progress lines");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Sample profiles from a checkpoint");
  c_gen->add_option("--ckpt", gen.ckpt, "Checkpoint file")->required();
  c_gen->add_option("--n", gen.n, "Number of profiles")->check(CLI::PositiveNumber);
  c_gen->add_option("--cat", gen.cat, "Fixed category (sampled when omitted)");
  c_gen->add_option("--cont", gen.cont, "Comma-separated continuous code values");
  c_gen->add_option("--seed", gen.seed, "Random seed");
  c_gen->add_option("--out", gen.out, "Output CSV path")->required();
  c_gen->add_flag("--keep-normalized", gen.keep_normalized, "Write values in [0, 1] model units");

  std::string l_ckpt, l_data, l_out;
  auto* c_lab = app.add_subcommand("label", "Label profiles with the code head");
  c_lab->add_option("--ckpt", l_ckpt, "Checkpoint file")->required();
  c_lab->add_option("--data", l_data, "Profile CSV")->required();
  c_lab->add_option("--out", l_out, "Output directory (default $TSGAN_REPORT_DIR/label)");

  std::string k_data, k_out;
  std::size_t k_k = 2;
  std::uint64_t k_seed = 0;
  auto* c_km = app.add_subcommand("kmeans", "k-means baseline labeling");
  c_km->add_option("--data", k_data, "Profile CSV")->required();
  c_km->add_option("--k", k_k, "Clusters")->check(CLI::PositiveNumber);
  c_km->add_option("--seed", k_seed, "Random seed");
  c_km->add_option("--out", k_out, "Output directory (default $TSGAN_REPORT_DIR/kmeans)");

  std::string e_real, e_syn, e_out;
  auto* c_ev = app.add_subcommand("evaluate", "Shape indexes and KL divergences, real vs synthetic");
  c_ev->add_option("--real", e_real, "Real profile CSV")->required();
  c_ev->add_option("--synthetic", e_syn, "Synthetic profile CSV")->required();
  c_ev->add_option("--out", e_out, "Output directory (default $TSGAN_REPORT_DIR/evaluate)");

  std::string t_ckpt, t_grid, t_out;
  std::size_t t_batch = 320;
  std::uint64_t t_seed = 0;
  auto* c_tv = app.add_subcommand("traverse", "Volatility indexes along the continuous code");
  c_tv->add_option("--ckpt", t_ckpt, "Checkpoint file")->required();
  c_tv->add_option("--grid", t_grid, "Comma-separated code values (default: 8 points over [-2, 2])");
  c_tv->add_option("--batch", t_batch, "Profiles per grid point")->check(CLI::PositiveNumber);
  c_tv->add_option("--seed", t_seed, "Random seed");
  c_tv->add_option("--out", t_out, "Output directory (default $TSGAN_REPORT_DIR/traverse)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kUsage);
  }

  kernels::set_num_threads(workers);
  if (workers > 1) {
    std::cerr << "warning: --workers " << workers
              << " enables parallel evaluation; bitwise determinism across worker counts is not guaranteed\n";
  }

  try {
    auto* sub = app.get_subcommands().front();
    const std::string config = sub->config_to_str(true, false);
    if (sub == c_sur) return cmd_make_surrogate(sur, config);
    if (sub == c_tr) return cmd_train(tr);
    if (sub == c_gen) return cmd_generate(gen, config);
    if (sub == c_lab) return cmd_label(l_ckpt, l_data, l_out, config);
    if (sub == c_km) return cmd_kmeans(k_data, k_k, k_seed, k_out, config);
    if (sub == c_ev) return cmd_evaluate(e_real, e_syn, e_out, config);
    if (sub == c_tv) return cmd_traverse(t_ckpt, t_grid, t_batch, t_seed, t_out, config);
    return fail("usage", "unknown command", kUsage);
  } catch (const DivergenceError& e) {
    return fail(e.kind(), e.what(), kDivergence);
  } catch (const ConfigError& e) {
    return fail(e.kind(), e.what(), kConfig);
  } catch (const CapabilityError& e) {
    return fail(e.kind(), e.what(), kConfig);
  } catch (const tsgan::Error& e) {
    // data, format and shape problems all come from the inputs
    return fail(e.kind(), e.what(), kData);
  } catch (const fs::filesystem_error& e) {
    return fail("data", e.what(), kData);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}
