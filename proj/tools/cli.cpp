#include "cli.hpp"

#include "tneedlet/tneedlet.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <unistd.h>

namespace tneedlet::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::invalid_argument {
  explicit UsageError(const std::vector<std::string>& problems) : std::invalid_argument(join(problems)) {}
  static std::string join(const std::vector<std::string>& problems) {
    std::string s;
    for (const auto& p : problems) s += (s.empty() ? "" : "\n") + p;
    return s;
  }
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// "1,0,2" -> MultiIndex of dimension d
std::optional<MultiIndex> parse_multi_index(const std::string& text, int d) {
  const auto parts = split(text, ',');
  if (int(parts.size()) != d) return std::nullopt;
  Eigen::VectorXi orders(d);
  for (int i = 0; i < d; ++i) {
    int v = -1;
    const auto& p = parts[std::size_t(i)];
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (ec != std::errc() || ptr != p.data() + p.size() || v < 0) return std::nullopt;
    orders[i] = v;
  }
  return MultiIndex(orders);
}

// Files are staged in memory and committed together: every file is written
// to a sibling temporary first, then all are renamed into place.
class OutputSet {
 public:
  void add(fs::path path, std::string contents) { files_.emplace_back(std::move(path), std::move(contents)); }

  void commit() {
    std::vector<fs::path> temps;
    auto cleanup = [&] {
      std::error_code ec;
      for (const auto& t : temps) fs::remove(t, ec);
    };
    for (const auto& [path, contents] : files_) {
      if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
          cleanup();
          throw IoError("cannot create directory `" + path.parent_path().string() + "`: " + ec.message());
        }
      }
      const fs::path tmp = path.string() + ".partial." + std::to_string(::getpid());
      std::ofstream out(tmp, std::ios::binary);
      if (out) temps.push_back(tmp);
      out << contents;
      out.flush();
      if (!out) {
        cleanup();
        throw IoError("cannot write `" + path.string() + "`");
      }
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
      std::error_code ec;
      fs::rename(temps[i], files_[i].first, ec);
      if (ec) {
        cleanup();
        throw IoError("cannot move output into `" + files_[i].first.string() + "`: " + ec.message());
      }
    }
  }

  const std::vector<std::pair<fs::path, std::string>>& files() const { return files_; }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open `" + path.string() + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct LoadedSamples {
  Eigen::MatrixXd points;
  Index wrapped = 0;
};

// Header-less CSV, d angle columns per line, radians. Blank lines are skipped.
LoadedSamples load_samples(const fs::path& path, int d) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file `" + path.string() + "`");
  std::vector<double> values;
  std::vector<std::string> problems;
  Index wrapped = 0;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (int(fields.size()) != d) {
      problems.push_back("line " + std::to_string(lineno) + ": expected " + std::to_string(d) + " column(s), found " +
                         std::to_string(fields.size()));
      continue;
    }
    for (const auto& f : fields) {
      const auto v = parse_double(f);
      if (!v) {
        problems.push_back("line " + std::to_string(lineno) + ": `" + f + "` is not a finite number");
        break;
      }
      if (*v < 0.0 || *v >= two_pi<double>) ++wrapped;
      values.push_back(wrap_angle(*v));
    }
  }
  if (in.bad()) throw IoError("error reading `" + path.string() + "`");
  if (!problems.empty()) {
    constexpr std::size_t kShown = 20;
    std::vector<std::string> shown(problems.begin(), problems.begin() + std::min(problems.size(), kShown));
    if (problems.size() > kShown) shown.push_back("... and " + std::to_string(problems.size() - kShown) + " more");
    shown.insert(shown.begin(), "malformed rows in `" + path.string() + "`:");
    throw UsageError(shown);
  }
  if (values.empty()) throw UsageError({"data file `" + path.string() + "` holds no samples"});
  LoadedSamples out;
  out.points = Eigen::Map<const Eigen::MatrixXd>(values.data(), d, Index(values.size()) / d);
  out.wrapped = wrapped;
  return out;
}

// theta_1,...,theta_d,value[,truth] on the uniform grid of side G
std::string grid_csv(int d, int G, const Eigen::VectorXd& values, const Eigen::VectorXd* truth) {
  const Eigen::MatrixXd grid = uniform_grid(d, G);
  std::ostringstream out;
  for (int i = 1; i <= d; ++i) out << "theta_" << i << ',';
  out << "value" << (truth ? ",truth" : "") << '\n';
  for (Index g = 0; g < grid.cols(); ++g) {
    for (int i = 0; i < d; ++i) out << format17(grid(i, g)) << ',';
    out << format17(values[g]);
    if (truth) out << ',' << format17((*truth)[g]);
    out << '\n';
  }
  return out.str();
}

Eigen::VectorXd truth_on_grid(const TestDensity& density, const MultiIndex& m, int G) {
  const Eigen::MatrixXd grid = uniform_grid(density.dimension(), G);
  Eigen::VectorXd truth(grid.cols());
  parallel_for(0, grid.cols(), [&](Index g) { truth[g] = density.derivative(grid.col(g), m); });
  return truth;
}

std::string multi_index_text(const MultiIndex& m) {
  std::string s;
  for (Index i = 0; i < m.dimension(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
  return s;
}

// ---------------------------------------------------------------------------

struct Common {
  double B = 2;
  int d = 1;
  int threads = 0;
};

void add_frame_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--B", c.B, "scale B > 1")->capture_default_str();
  cmd->add_option("--d", c.d, "torus dimension")->capture_default_str();
}

void add_threads_flag(CLI::App* cmd, Common& c) {
  cmd->add_option("--threads", c.threads, "cap on worker threads (default: hardware concurrency)");
}

void check_common(const Common& c, std::vector<std::string>& problems) {
  if (!(c.B > 1.0) || !std::isfinite(c.B)) problems.push_back("--B must satisfy B > 1 (got " + format17(c.B) + ")");
  if (c.d < 1) problems.push_back("--d must be >= 1");
  if (c.threads < 0) problems.push_back("--threads must be >= 1");
}

void apply_threads(const Common& c) {
  if (c.threads > 0) set_thread_count(c.threads);
}

// ---------------------------------------------------------------------------

struct FrameInfoArgs {
  Common common;
  int jmax = 3;
};

int frame_info(const FrameInfoArgs& a, std::ostream& out) {
  std::vector<std::string> problems;
  check_common(a.common, problems);
  if (a.jmax < 0) problems.push_back("--jmax must be >= 0");
  if (!problems.empty()) throw UsageError(problems);
  apply_threads(a.common);

  const NeedletFrame frame(a.common.B, a.common.d, a.jmax);
  const WindowFunction& w = frame.window();
  out << "B = " << format17(frame.scale()) << ", d = " << frame.dimension() << ", jmax = " << frame.max_level()
      << '\n';
  out << "I_0 = " << format17(w.moment(0)) << "\nI_1 = " << format17(w.moment(1))
      << "\nI_2 = " << format17(w.moment(2)) << '\n';
  out << std::left << std::setw(4) << "j" << std::setw(10) << "shell" << std::setw(10) << "N" << std::setw(14)
      << "K" << std::setw(24) << "lambda" << "psi_L2\n";
  for (int j = 0; j <= frame.max_level(); ++j) {
    const LevelData& level = frame.level(j);
    // products of two level-j needlets stay below N_j per coordinate, so the
    // cubature grid itself integrates |psi|^2 exactly
    const double norm = needlet_lp_norm(frame, j, 0, MultiIndex::zero(frame.dimension()), 2.0,
                                        level.cubature.points_per_dim);
    out << std::setw(4) << j << std::setw(10) << level.shell_size() << std::setw(10) << level.cubature.points_per_dim
        << std::setw(14) << level.cubature.count << std::setw(24) << format17(level.cubature.weight)
        << format17(norm) << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  Common common;
  std::string data;
  std::string m = "0";
  std::string rule = "hard";
  std::optional<double> kappa;
  std::optional<double> kappa0;
  std::optional<double> M;
  std::optional<int> J;
  std::optional<int> grid;
  std::string density;
  std::string out;
  bool literal_kappa = false;
};

int estimate_cmd(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> problems;
  check_common(a.common, problems);
  std::optional<MultiIndex> m;
  if (a.common.d >= 1) {
    m = parse_multi_index(a.m, a.common.d);
    if (!m) problems.push_back("--m must list " + std::to_string(a.common.d) + " comma-separated nonnegative orders");
  }
  ThresholdKind kind = ThresholdKind::hard;
  if (a.rule == "hard" || a.rule == "soft")
    kind = parse_threshold_kind(a.rule);
  else
    problems.push_back("--rule must be `hard` or `soft`");
  if (a.kappa && a.kappa0) problems.push_back("give either --kappa or --kappa0, not both");
  if (!a.kappa && !a.kappa0) problems.push_back("a threshold constant is required: --kappa, or --kappa0 with --M");
  if (a.kappa && *a.kappa < 0) problems.push_back("--kappa must be >= 0");
  if (a.kappa0 && *a.kappa0 < 0) problems.push_back("--kappa0 must be >= 0");
  if (a.M && !(*a.M > 0)) problems.push_back("--M must be > 0");
  if (a.kappa && a.M) problems.push_back("--M only applies together with --kappa0");
  if (a.J && *a.J < 0) problems.push_back("--J must be >= 0");
  if (a.grid && *a.grid < 1) problems.push_back("--grid must be >= 1");
  if (a.out.empty()) problems.push_back("--out is required");
  std::optional<TestDensity> density;
  if (!a.density.empty() && a.common.d >= 1) {
    try {
      density = make_density(a.density, a.common.d);
      if (m)
        for (Index i = 0; i < m->dimension(); ++i)
          if ((*m)[i] > density->max_derivative_order())
            problems.push_back("--m exceeds the derivative orders of density `" + a.density + "`");
    } catch (const std::exception& e) {
      problems.push_back(std::string("--density: ") + e.what());
    }
  }
  if (a.kappa0 && !a.M && !density) problems.push_back("--kappa0 needs --M (or a named --density supplying M)");
  if (!problems.empty()) throw UsageError(problems);
  apply_threads(a.common);

  const LoadedSamples loaded = load_samples(a.data, a.common.d);
  if (loaded.wrapped > 0)
    err << "warning: " << loaded.wrapped << " angle(s) outside [0, 2pi) were reduced modulo 2pi\n";
  const SampleSet samples(loaded.points);
  const Index n = samples.size();
  if (n < 3) throw UsageError({"estimation needs at least 3 samples (got " + std::to_string(n) + ")"});

  const int J = a.J ? *a.J : truncation_level(n, a.common.d, m->total(), a.common.B);
  auto frame = std::make_shared<const NeedletFrame>(a.common.B, a.common.d, std::max(J, 0));

  ThresholdRule rule;
  if (a.kappa) {
    rule = ThresholdRule{kind, *a.kappa, *m, n, a.common.B, a.literal_kappa};
  } else {
    const double sup = a.M ? *a.M : density->sup_norm();
    rule = ThresholdRule::from_schedule(kind, *a.kappa0, sup, frame->window(), *m, n, a.literal_kappa);
  }
  const DerivativeEstimator est = estimate(frame, samples, *m, rule, J);

  OutputSet outputs;
  std::ostringstream coeffs;
  write_estimator_csv(coeffs, est);
  outputs.add(a.out + ".csv", coeffs.str());

  nlohmann::json meta = estimator_metadata(est);
  nlohmann::json levels = nlohmann::json::array();
  const auto counts = surviving_counts(est);
  for (std::size_t j = 0; j < counts.size(); ++j)
    levels.push_back({{"j", j},
                      {"tau", est.tau(int(j))},
                      {"surviving", counts[j].surviving},
                      {"total", counts[j].total},
                      {"fraction", counts[j].fraction}});
  meta["levels"] = levels;
  meta["wrapped_angles"] = loaded.wrapped;
  if (a.kappa0) meta["kappa0"] = *a.kappa0;
  if (!a.density.empty()) meta["density"] = a.density;
  outputs.add(a.out + ".json", meta.dump(2) + "\n");

  if (a.grid) {
    Eigen::VectorXd values = est.evaluate_uniform(*a.grid);
    // the frame carries no constant term; density estimates get the known mean back
    if (m->total() == 0) values.array() += std::pow(two_pi<double>, -a.common.d);
    std::optional<Eigen::VectorXd> truth;
    if (density) truth = truth_on_grid(*density, *m, *a.grid);
    outputs.add(a.out + "_grid.csv", grid_csv(a.common.d, *a.grid, values, truth ? &*truth : nullptr));
  }
  outputs.commit();

  out << "n = " << n << ", J = " << J << ", rule = " << to_string(kind) << ", kappa = " << format17(rule.kappa)
      << '\n';
  out << std::left << std::setw(4) << "j" << std::setw(24) << "tau" << "surviving\n";
  for (std::size_t j = 0; j < counts.size(); ++j) {
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.1f%%", 100.0 * counts[j].fraction);
    out << std::setw(4) << j << std::setw(24) << format17(est.tau(int(j))) << counts[j].surviving << "/"
        << counts[j].total << " (" << pct << ")\n";
  }
  for (const auto& [path, _] : outputs.files()) out << "wrote " << path.string() << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool literal_kappa = false;
};

int bench_cmd(const BenchArgs& a, std::ostream& out) {
  std::vector<std::string> problems;
  if (a.out.empty()) problems.push_back("--out is required");
  if (a.threads < 0) problems.push_back("--threads must be >= 1");
  if (!problems.empty()) throw UsageError(problems);

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(a.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError({"config `" + a.config + "` is not valid JSON: " + e.what()});
  }
  ExperimentConfig config = parse_config(doc);
  if (a.seed) config.seed = *a.seed;
  if (a.literal_kappa) config.literal_paper_kappa = true;
  if (a.threads > 0) set_thread_count(a.threads);

  const RiskReport report = run_experiment(config);

  OutputSet outputs;
  std::ostringstream counts, risks;
  write_counts_csv(counts, report);
  write_risks_csv(risks, report);
  const fs::path dir(a.out);
  outputs.add(dir / "report.csv", counts.str());
  outputs.add(dir / "report_risks.csv", risks.str());
  outputs.add(dir / "report.json", report_to_json(report).dump(2) + "\n");
  outputs.commit();

  // surviving-coefficient table: one row per (n, rule, level), one column per kappa0
  out << "density = " << config.density << ", m = (" << multi_index_text(config.m)
      << "), replications = " << config.replications << '\n';
  std::map<std::tuple<Index, int, int>, std::map<double, CountAggregate>> table;
  for (const auto& agg : report.count_aggregates()) table[{agg.n, int(agg.rule), agg.j}][agg.kappa0] = agg;
  out << "\nmean surviving coefficients (fraction)\n";
  out << std::left << std::setw(8) << "n" << std::setw(6) << "rule" << std::setw(4) << "j";
  for (double k0 : config.kappa0) out << std::setw(22) << ("kappa0=" + format17(k0));
  out << '\n';
  for (const auto& [key, row] : table) {
    out << std::setw(8) << std::get<0>(key) << std::setw(6) << to_string(ThresholdKind(std::get<1>(key)))
        << std::setw(4) << std::get<2>(key);
    for (double k0 : config.kappa0) {
      const auto it = row.find(k0);
      char cell[64] = "-";
      if (it != row.end())
        std::snprintf(cell, sizeof cell, "%.2f (%.1f%%)", it->second.mean_surviving,
                      100.0 * it->second.mean_fraction);
      out << std::setw(22) << cell;
    }
    out << '\n';
  }
  out << "\nmean risk (stderr)\n";
  for (const auto& agg : report.risk_aggregates()) {
    char cell[96];
    std::snprintf(cell, sizeof cell, "%.6g (%.2g)", agg.mean, agg.stderr_);
    out << "n=" << agg.n << " rule=" << to_string(agg.rule) << " kappa0=" << format17(agg.kappa0) << " p=" << agg.p
        << ": " << cell << '\n';
  }
  for (const auto& [path, _] : outputs.files()) out << "wrote " << path.string() << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct EvalGridArgs {
  Common common;
  std::string estimator;
  std::string needlet;
  std::string m = "0";
  std::string density;
  int grid = 512;
  std::string out;
};

int eval_grid_cmd(const EvalGridArgs& a, std::ostream& out) {
  std::vector<std::string> problems;
  check_common(a.common, problems);
  if (a.estimator.empty() == a.needlet.empty()) problems.push_back("give exactly one of --estimator or --needlet");
  if (a.grid < 1) problems.push_back("--grid must be >= 1");
  if (a.out.empty()) problems.push_back("--out is required");
  if (!problems.empty()) throw UsageError(problems);
  apply_threads(a.common);

  Eigen::VectorXd values;
  int d = a.common.d;
  MultiIndex m;
  if (!a.estimator.empty()) {
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(read_file(a.estimator + ".json"));
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError({"estimator metadata `" + a.estimator + ".json` is not valid JSON: " + e.what()});
    }
    std::istringstream csv(read_file(a.estimator + ".csv"));
    const DerivativeEstimator est = read_estimator(csv, meta);
    d = est.frame().dimension();
    m = est.rule().m;
    values = est.evaluate_uniform(a.grid);
    if (m.total() == 0) values.array() += std::pow(two_pi<double>, -d);
  } else {
    const auto parts = split(a.needlet, ',');
    std::optional<MultiIndex> order = parse_multi_index(a.m, d);
    int j = -1;
    long long k = -1;
    if (parts.size() == 2) {
      std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), j);
      std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), k);
    }
    if (j < 0 || k < 0) problems.push_back("--needlet must be `j,k` with j >= 0 and 0-based k >= 0");
    if (!order) problems.push_back("--m must list " + std::to_string(d) + " comma-separated nonnegative orders");
    if (!problems.empty()) throw UsageError(problems);
    const NeedletFrame frame(a.common.B, d, j);
    if (k >= frame.cubature(j).count)
      throw UsageError({"--needlet: k must be < K_j = " + std::to_string(frame.cubature(j).count)});
    m = *order;
    values = needlet_on_uniform_grid(frame, j, Index(k), m, a.grid);
  }

  std::optional<Eigen::VectorXd> truth;
  if (!a.density.empty()) {
    std::optional<TestDensity> density;
    try {
      density = make_density(a.density, d);
    } catch (const std::exception& e) {
      throw UsageError({std::string("--density: ") + e.what()});
    }
    truth = truth_on_grid(*density, m, a.grid);
  }

  OutputSet outputs;
  outputs.add(a.out, grid_csv(d, a.grid, values, truth ? &*truth : nullptr));
  outputs.commit();
  out << "wrote " << a.out << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toroidal needlet frames and thresholded density-derivative estimators", "tneedlet"};
  app.require_subcommand(1, 1);

  FrameInfoArgs fi;
  auto* fi_cmd = app.add_subcommand("frame-info", "per-level shell sizes, cubature and needlet norms");
  add_frame_flags(fi_cmd, fi.common);
  fi_cmd->add_option("--jmax", fi.jmax, "highest level")->capture_default_str();
  add_threads_flag(fi_cmd, fi.common);

  EstimateArgs es;
  auto* es_cmd = app.add_subcommand("estimate", "thresholded needlet estimate of D^m f from samples");
  add_frame_flags(es_cmd, es.common);
  es_cmd->add_option("--data", es.data, "sample CSV: no header, d angle columns in radians")->required();
  es_cmd->add_option("--m", es.m, "derivative order, comma-separated")->capture_default_str();
  es_cmd->add_option("--rule", es.rule, "hard | soft")->capture_default_str();
  es_cmd->add_option("--kappa", es.kappa, "threshold constant kappa");
  es_cmd->add_option("--kappa0", es.kappa0, "schedule constant: kappa = kappa0 * M * I_|m|");
  es_cmd->add_option("--M", es.M, "sup-norm of the density for the kappa0 schedule");
  es_cmd->add_option("--J", es.J, "truncation level (default: from n)");
  es_cmd->add_option("--grid", es.grid, "also evaluate on a uniform grid with this many points per dimension");
  es_cmd->add_option("--density", es.density, "named test density: supplies M and a truth column");
  es_cmd->add_option("--out", es.out, "output prefix: <out>.csv, <out>.json, <out>_grid.csv")->required();
  es_cmd->add_flag("--literal-paper-kappa", es.literal_kappa, "drop sqrt(ln n / n) from the threshold");
  add_threads_flag(es_cmd, es.common);

  BenchArgs be;
  auto* be_cmd = app.add_subcommand("bench", "seeded Monte Carlo risk experiment from a JSON config");
  be_cmd->add_option("--config", be.config, "experiment config JSON")->required();
  be_cmd->add_option("--out", be.out, "output directory")->required();
  be_cmd->add_option("--seed", be.seed, "override the config's master seed");
  be_cmd->add_option("--threads", be.threads, "cap on worker threads");
  be_cmd->add_flag("--literal-paper-kappa", be.literal_kappa, "drop sqrt(ln n / n) from the threshold");

  EvalGridArgs eg;
  auto* eg_cmd = app.add_subcommand("eval-grid", "evaluate a saved estimator or a single needlet on a uniform grid");
  add_frame_flags(eg_cmd, eg.common);
  eg_cmd->add_option("--estimator", eg.estimator, "prefix written by `estimate`");
  eg_cmd->add_option("--needlet", eg.needlet, "j,k of a needlet (0-based k)");
  eg_cmd->add_option("--m", eg.m, "derivative order of the needlet")->capture_default_str();
  eg_cmd->add_option("--density", eg.density, "add the true D^m f column");
  eg_cmd->add_option("--grid", eg.grid, "points per dimension")->capture_default_str();
  eg_cmd->add_option("--out", eg.out, "output CSV")->required();
  add_threads_flag(eg_cmd, eg.common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsageError;
  }

  try {
    if (*fi_cmd) return frame_info(fi, out);
    if (*es_cmd) return estimate_cmd(es, out, err);
    if (*be_cmd) return bench_cmd(be, out);
    return eval_grid_cmd(eg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace tneedlet::cli
