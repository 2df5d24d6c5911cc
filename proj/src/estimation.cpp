#include "tneedlet/estimation.hpp"

#include "tneedlet/parallel.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace tneedlet {

using cdouble = std::complex<double>;

SampleSet::SampleSet(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw std::invalid_argument("SampleSet: dimension must be >= 1");
  if (points_.cols() < 1) throw std::invalid_argument("SampleSet: empty sample set");
  if (!points_.allFinite()) throw std::invalid_argument("SampleSet: non-finite coordinate");
  points_ = points_.unaryExpr([](double a) { return wrap_angle(a); });
}

std::string to_string(ThresholdKind kind) { return kind == ThresholdKind::hard ? "hard" : "soft"; }

ThresholdKind parse_threshold_kind(const std::string& name) {
  if (name == "hard") return ThresholdKind::hard;
  if (name == "soft") return ThresholdKind::soft;
  throw std::invalid_argument("threshold rule must be `hard` or `soft`, got `" + name + "`");
}

ThresholdRule ThresholdRule::from_schedule(ThresholdKind kind, double kappa0, double sup_norm,
                                           const WindowFunction& window, const MultiIndex& m, Index n,
                                           bool omit_sample_factor) {
  ThresholdRule rule;
  rule.kind = kind;
  rule.kappa = kappa0 * sup_norm * window.moment(m.total());
  rule.m = m;
  rule.n = n;
  rule.B = window.scale();
  rule.omit_sample_factor = omit_sample_factor;
  return rule;
}

double threshold_value(const ThresholdRule& rule, int j) {
  if (j < 0) throw std::invalid_argument("threshold_value: level must be >= 0");
  const double n = double(rule.n);
  const double sample_factor = rule.omit_sample_factor ? 1.0 : std::sqrt(std::log(n) / n);
  return rule.kappa * std::pow(rule.B, j * rule.m.total()) * sample_factor;
}

double apply_threshold(ThresholdKind kind, double u, double a) {
  if (a < 0) throw std::invalid_argument("apply_threshold: threshold must be nonnegative");
  if (kind == ThresholdKind::hard) return std::abs(u) >= a ? u : 0.0;
  const double shrunk = std::max(std::abs(u) - a, 0.0);
  return u < 0 ? -shrunk : shrunk;
}

// ---------------------------------------------------------------------------
// Empirical coefficients

ShellSpectrum empirical_spectrum(const NeedletFrame& frame, const SampleSet& samples, int jmax) {
  if (jmax < -1 || jmax > frame.max_level())
    throw std::invalid_argument("empirical_coefficients: jmax = " + std::to_string(jmax) + " outside the frame (jmax " +
                                std::to_string(frame.max_level()) + ")");
  detail::require_same_dimension(samples.dimension(), frame.dimension(), "empirical_coefficients");
  const int d = frame.dimension();

  // Deduplicate frequencies shared by adjacent shells.
  std::map<std::vector<int>, Index> index_of;
  std::vector<std::vector<Index>> slots(static_cast<std::size_t>(jmax + 1));
  for (int j = 0; j <= jmax; ++j) {
    const LevelData& level = frame.level(j);
    for (Index c = 0; c < level.shell_size(); ++c) {
      std::vector<int> key(level.frequencies.col(c).data(), level.frequencies.col(c).data() + d);
      auto [it, inserted] = index_of.emplace(std::move(key), Index(index_of.size()));
      slots[std::size_t(j)].push_back(it->second);
    }
  }
  const Index q = Index(index_of.size());
  Eigen::MatrixXi freqs(d, q);
  for (const auto& [key, idx] : index_of) freqs.col(idx) = Eigen::Map<const Eigen::VectorXi>(key.data(), d);
  const int reach = q ? freqs.cwiseAbs().maxCoeff() : 0;

  // Chunk partial sums of exp(-i <l, X_i>), then a fixed pairwise tree.
  constexpr Index kChunk = 64;
  const Index n = samples.size();
  const Index chunks = (n + kChunk - 1) / kChunk;
  std::vector<Eigen::VectorXcd> partial(static_cast<std::size_t>(chunks));
  parallel_for(0, chunks, [&](Index c) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(q);
    Eigen::MatrixXcd table(2 * reach + 1, d);
    for (Index s = c * kChunk; s < std::min(n, (c + 1) * kChunk); ++s) {
      for (int dim = 0; dim < d; ++dim)
        for (int l = -reach; l <= reach; ++l) table(l + reach, dim) = std::polar(1.0, -l * samples.points()(dim, s));
      for (Index f = 0; f < q; ++f) {
        cdouble z = table(freqs(0, f) + reach, 0);
        for (int dim = 1; dim < d; ++dim) z *= table(freqs(dim, f) + reach, dim);
        acc[f] += z;
      }
    }
    partial[std::size_t(c)] = std::move(acc);
  });
  for (std::size_t width = 1; width < partial.size(); width *= 2)
    for (std::size_t i = 0; i + width < partial.size(); i += 2 * width) partial[i] += partial[i + width];

  const Eigen::VectorXcd total =
      partial.empty() ? Eigen::VectorXcd::Zero(q) : Eigen::VectorXcd(partial.front());
  const double scale = std::pow(two_pi<double>, -0.5 * d) / double(n);

  ShellSpectrum spectrum;
  for (int j = 0; j <= jmax; ++j) {
    const auto& idx = slots[std::size_t(j)];
    Eigen::VectorXcd a(Index(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) a[Index(c)] = total[idx[c]] * scale;
    spectrum.levels.push_back(std::move(a));
  }
  return spectrum;
}

CoefficientArray empirical_coefficients(const NeedletFrame& frame, const SampleSet& samples, int jmax,
                                        const MultiIndex& m, TransformPath path) {
  return coefficients_from_spectrum(frame, empirical_spectrum(frame, samples, jmax), m, Provenance::empirical, path);
}

// ---------------------------------------------------------------------------
// Tuning parameters

int truncation_level(Index n, int d, int total_order, double B) {
  if (n < 3) throw std::invalid_argument("truncation_level: need n >= 3, got " + std::to_string(n));
  if (d < 1 || total_order < 0 || !(B > 1.0)) throw std::invalid_argument("truncation_level: invalid configuration");
  const double nn = double(n);
  return static_cast<int>(std::floor(std::log(nn / std::log(nn)) / std::log(B) / (d + 2 * total_order)));
}

int diagnostic_bandwidth(double s, int total_order, int d, double B, Index n, Zone zone, double r) {
  if (!(s > 0)) throw std::invalid_argument("diagnostic_bandwidth: smoothness must be > 0");
  if (n < 3) throw std::invalid_argument("diagnostic_bandwidth: need n >= 3");
  double denominator = 2.0 * (s + total_order) + d;
  if (zone == Zone::sparse) {
    if (!(r >= 1.0)) throw std::invalid_argument("diagnostic_bandwidth: r must be >= 1");
    const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
    if (!(s > d * inv_r)) throw std::invalid_argument("diagnostic_bandwidth: sparse zone needs s > d/r");
    denominator = 2.0 * (s + total_order + d * (0.5 - inv_r));
  }
  const double nn = double(n);
  return static_cast<int>(std::floor(std::log(nn / std::log(nn)) / std::log(B) / denominator));
}

// ---------------------------------------------------------------------------
// Estimator

DerivativeEstimator::DerivativeEstimator(std::shared_ptr<const NeedletFrame> frame, CoefficientArray raw,
                                         ThresholdRule rule, int truncation)
    : frame_(std::move(frame)), rule_(std::move(rule)), truncation_(truncation), raw_(std::move(raw)) {
  if (!frame_) throw std::invalid_argument("DerivativeEstimator: null frame");
  if (truncation_ < 0 || truncation_ > raw_.level_count())
    throw std::invalid_argument("DerivativeEstimator: truncation level exceeds the available coefficients");
  raw_.check_matches(*frame_);

  std::vector<Eigen::VectorXd> kept;
  for (int j = 0; j < truncation_; ++j) {
    const double tau = threshold_value(rule_, j);
    const Eigen::VectorXd& u = raw_.level(j);
    Eigen::VectorXd out(u.size());
    std::vector<bool> mask(std::size_t(u.size()));
    for (Index k = 0; k < u.size(); ++k) {
      out[k] = apply_threshold(rule_.kind, u[k], tau);
      mask[std::size_t(k)] = std::abs(u[k]) >= tau;
    }
    taus_.push_back(tau);
    kept.push_back(std::move(out));
    selected_.push_back(std::move(mask));
  }
  std::vector<Eigen::VectorXd> raw_levels;
  for (int j = 0; j < truncation_; ++j) raw_levels.push_back(raw_.level(j));
  raw_ = CoefficientArray(raw_.order(), raw_.provenance(), std::move(raw_levels));
  thresholded_ = CoefficientArray(raw_.order(), raw_.provenance(), std::move(kept));
}

Eigen::VectorXd DerivativeEstimator::evaluate(const Eigen::Ref<const Eigen::MatrixXd>& grid) const {
  return synthesize(*frame_, thresholded_, grid);
}

Eigen::VectorXd DerivativeEstimator::evaluate_uniform(int G) const {
  return synthesize_uniform(*frame_, thresholded_, G);
}

DerivativeEstimator threshold_coefficients(std::shared_ptr<const NeedletFrame> frame, const CoefficientArray& raw,
                                           const ThresholdRule& rule, int truncation) {
  return DerivativeEstimator(std::move(frame), raw, rule, truncation);
}

DerivativeEstimator estimate(std::shared_ptr<const NeedletFrame> frame, const SampleSet& samples, const MultiIndex& m,
                             const ThresholdRule& rule, std::optional<int> truncation_override) {
  if (!frame) throw std::invalid_argument("estimate: null frame");
  const Index n = samples.size();
  if (n < 3) throw std::invalid_argument("estimate: need at least 3 samples, got " + std::to_string(n));
  const int J = truncation_override ? *truncation_override
                                    : truncation_level(n, frame->dimension(), m.total(), frame->scale());
  if (J < 0) throw std::invalid_argument("estimate: truncation level must be >= 0");
  if (J > frame->max_level())
    throw std::invalid_argument("estimate: truncation level J = " + std::to_string(J) +
                                " needs a frame built with jmax >= " + std::to_string(J) + " (frame has jmax " +
                                std::to_string(frame->max_level()) + ")");
  ThresholdRule r = rule;
  r.m = m;
  r.n = n;
  r.B = frame->scale();
  CoefficientArray raw = empirical_coefficients(*frame, samples, J - 1, m);
  return DerivativeEstimator(std::move(frame), std::move(raw), std::move(r), J);
}

std::vector<LevelCount> surviving_counts(const DerivativeEstimator& estimator) {
  std::vector<LevelCount> counts;
  for (const auto& mask : estimator.selected()) {
    LevelCount c;
    c.total = Index(mask.size());
    for (bool kept : mask) c.surviving += kept ? 1 : 0;
    c.fraction = c.total ? double(c.surviving) / double(c.total) : 0.0;
    counts.push_back(c);
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {
std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void write_estimator_csv(std::ostream& out, const DerivativeEstimator& estimator) {
  out << "j,k,raw,thresholded,tau\n";
  for (int j = 0; j < estimator.truncation(); ++j) {
    const std::string tau = format17(estimator.tau(j));
    for (Index k = 0; k < estimator.raw().level(j).size(); ++k)
      out << j << ',' << k << ',' << format17(estimator.raw().level(j)[k]) << ','
          << format17(estimator.thresholded().level(j)[k]) << ',' << tau << '\n';
  }
}

nlohmann::json estimator_metadata(const DerivativeEstimator& estimator) {
  const ThresholdRule& rule = estimator.rule();
  std::vector<int> m(rule.m.orders().data(), rule.m.orders().data() + rule.m.dimension());
  return {{"B", estimator.frame().scale()},
          {"d", estimator.frame().dimension()},
          {"m", m},
          {"n", rule.n},
          {"kappa", rule.kappa},
          {"rule", to_string(rule.kind)},
          {"J", estimator.truncation()},
          {"omit_sample_factor", rule.omit_sample_factor}};
}

DerivativeEstimator read_estimator(std::istream& csv, const nlohmann::json& metadata) {
  ThresholdRule rule;
  const auto orders = metadata.at("m").get<std::vector<int>>();
  rule.m = MultiIndex(Eigen::Map<const Eigen::VectorXi>(orders.data(), Index(orders.size())));
  rule.n = metadata.at("n").get<Index>();
  rule.kappa = metadata.at("kappa").get<double>();
  rule.kind = parse_threshold_kind(metadata.at("rule").get<std::string>());
  rule.B = metadata.at("B").get<double>();
  rule.omit_sample_factor = metadata.value("omit_sample_factor", false);
  const int d = metadata.at("d").get<int>();
  const int J = metadata.at("J").get<int>();
  if (rule.m.dimension() != d) throw std::invalid_argument("estimator metadata: m has the wrong dimension");

  std::string line;
  if (!std::getline(csv, line) || line.rfind("j,k,raw,thresholded,tau", 0) != 0)
    throw std::invalid_argument("estimator CSV: missing `j,k,raw,thresholded,tau` header");
  std::vector<std::vector<double>> levels;
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    long j = -1, k = -1;
    double raw = 0, thresholded = 0, tau = 0;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    if (!(row >> j >> c1 >> k >> c2 >> raw >> c3 >> thresholded >> c4 >> tau) || c1 != ',' || c2 != ',' ||
        c3 != ',' || c4 != ',')
      throw std::invalid_argument("estimator CSV: malformed row at line " + std::to_string(line_no));
    if (j < 0 || std::size_t(j) > levels.size()) throw std::invalid_argument("estimator CSV: level gap");
    if (std::size_t(j) == levels.size()) levels.emplace_back();
    if (std::size_t(j) + 1 != levels.size() || std::size_t(k) != levels.back().size())
      throw std::invalid_argument("estimator CSV: rows out of order at line " + std::to_string(line_no));
    levels.back().push_back(raw);
  }
  if (int(levels.size()) != J) throw std::invalid_argument("estimator CSV: level count does not match J");
  std::vector<Eigen::VectorXd> data;
  for (auto& lvl : levels) data.push_back(Eigen::Map<Eigen::VectorXd>(lvl.data(), Index(lvl.size())));
  auto frame = std::make_shared<const NeedletFrame>(rule.B, d, std::max(J, 0));
  return DerivativeEstimator(frame, CoefficientArray(rule.m, Provenance::empirical, std::move(data)), rule, J);
}

}  // namespace tneedlet
