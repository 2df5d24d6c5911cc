#include "tneedlet/needlet_frame.hpp"

#include "fft.hpp"
#include "tneedlet/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace tneedlet {

using cdouble = std::complex<double>;

namespace {

double inv_sqrt_torus_volume(int d) { return std::pow(two_pi<double>, -0.5 * d); }

Index int_pow(Index base, int exponent) {
  Index r = 1;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

// exp(i l_c theta_c) for l_c in [-reach, reach], one column per coordinate
Eigen::MatrixXcd phase_table(const Eigen::Ref<const Eigen::VectorXd>& theta, int reach) {
  Eigen::MatrixXcd table(2 * reach + 1, theta.size());
  for (Index c = 0; c < theta.size(); ++c)
    for (int l = -reach; l <= reach; ++l) table(l + reach, c) = std::polar(1.0, l * theta[c]);
  return table;
}

cdouble phase(const Eigen::MatrixXcd& table, const Eigen::Ref<const Eigen::VectorXi>& ell, int reach) {
  cdouble z = table(ell[0] + reach, 0);
  for (Index c = 1; c < ell.size(); ++c) z *= table(ell[c] + reach, c);
  return z;
}

Eigen::VectorXcd multipliers(const LevelData& level, const MultiIndex& m) {
  Eigen::VectorXcd out(level.shell_size());
  for (Index c = 0; c < level.shell_size(); ++c)
    out[c] = derivative_multiplier(FrequencyVector(Eigen::VectorXi(level.frequencies.col(c))), m);
  return out;
}

Eigen::VectorXd take_real(const Eigen::VectorXcd& values, double scale, const char* what) {
  const double residue = values.size() ? values.imag().cwiseAbs().maxCoeff() : 0.0;
  if (residue > kImaginaryResidueTolerance * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << what << ": imaginary residue " << residue << " exceeds tolerance";
    throw ImaginaryResidueError(msg.str());
  }
  return values.real();
}

// sum_l c_l exp(i <l, xi_k>) at every point of the level grid
Eigen::VectorXcd shell_to_points(const LevelData& level, const Eigen::VectorXcd& spectral, TransformPath path) {
  const CubatureLevel& cub = level.cubature;
  const int n = cub.points_per_dim;
  if (path == TransformPath::fft) {
    std::vector<cdouble> grid(std::size_t(cub.count), cdouble(0));
    for (Index c = 0; c < level.shell_size(); ++c)
      grid[std::size_t(detail::wrapped_offset(level.frequencies.col(c), n))] += spectral[c];
    detail::fft_inplace(grid, n, cub.dimension, +1);
    return Eigen::Map<Eigen::VectorXcd>(grid.data(), cub.count);
  }
  const int reach = level.max_abs_frequency();
  Eigen::VectorXcd out(cub.count);
  parallel_for(0, cub.count, [&](Index k) {
    const Eigen::MatrixXcd table = phase_table(cub.point(k), reach);
    cdouble acc = 0;
    for (Index c = 0; c < level.shell_size(); ++c) acc += spectral[c] * phase(table, level.frequencies.col(c), reach);
    out[k] = acc;
  });
  return out;
}

// sum_k v_k exp(-i <l, xi_k>) for every shell frequency l
Eigen::VectorXcd points_to_shell(const LevelData& level, const Eigen::VectorXd& values, TransformPath path) {
  const CubatureLevel& cub = level.cubature;
  const int n = cub.points_per_dim;
  Eigen::VectorXcd out(level.shell_size());
  if (path == TransformPath::fft) {
    std::vector<cdouble> grid(values.data(), values.data() + values.size());
    detail::fft_inplace(grid, n, cub.dimension, -1);
    for (Index c = 0; c < level.shell_size(); ++c)
      out[c] = grid[std::size_t(detail::wrapped_offset(level.frequencies.col(c), n))];
    return out;
  }
  const Eigen::MatrixXd pts = cub.points();
  parallel_for(0, level.shell_size(), [&](Index c) {
    cdouble acc = 0;
    for (Index k = 0; k < cub.count; ++k) {
      const double ph = pts.col(k).dot(level.frequencies.col(c).cast<double>());
      acc += values[k] * std::polar(1.0, -ph);
    }
    out[c] = acc;
  });
  return out;
}

// sum_l c_l exp(i <l, theta>) at each column of grid
Eigen::VectorXcd evaluate_spectrum(const Eigen::MatrixXi& freqs, const Eigen::VectorXcd& spectral,
                                   const Eigen::Ref<const Eigen::MatrixXd>& grid) {
  const int reach = freqs.size() ? freqs.cwiseAbs().maxCoeff() : 0;
  Eigen::VectorXcd out(grid.cols());
  parallel_for(0, grid.cols(), [&](Index g) {
    const Eigen::MatrixXcd table = phase_table(grid.col(g), reach);
    cdouble acc = 0;
    for (Index c = 0; c < freqs.cols(); ++c) acc += spectral[c] * phase(table, freqs.col(c), reach);
    out[g] = acc;
  });
  return out;
}

// Same as evaluate_spectrum on the uniform grid of side G
Eigen::VectorXcd evaluate_spectrum_uniform(const Eigen::MatrixXi& freqs, const Eigen::VectorXcd& spectral, int d,
                                           int G) {
  const int reach = freqs.size() ? freqs.cwiseAbs().maxCoeff() : 0;
  if (G <= 2 * reach) return evaluate_spectrum(freqs, spectral, uniform_grid(d, G));
  std::vector<cdouble> grid(std::size_t(int_pow(G, d)), cdouble(0));
  for (Index c = 0; c < freqs.cols(); ++c) grid[std::size_t(detail::wrapped_offset(freqs.col(c), G))] += spectral[c];
  detail::fft_inplace(grid, G, d, +1);
  return Eigen::Map<Eigen::VectorXcd>(grid.data(), Index(grid.size()));
}

void require_level(const NeedletFrame& frame, int j, const char* what) {
  if (j < 0 || j > frame.max_level())
    throw std::out_of_range(std::string(what) + ": level " + std::to_string(j) + " outside 0.." +
                            std::to_string(frame.max_level()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Frame construction

Eigen::VectorXd CubatureLevel::point(Index k) const {
  if (k < 0 || k >= count) throw std::out_of_range("cubature point index out of range");
  Eigen::VectorXd xi(dimension);
  for (int c = dimension - 1; c >= 0; --c) {
    xi[c] = two_pi<double> * double(k % points_per_dim) / points_per_dim;
    k /= points_per_dim;
  }
  return xi;
}

Eigen::MatrixXd CubatureLevel::points() const { return uniform_grid(dimension, points_per_dim); }

int LevelData::max_abs_frequency() const { return frequencies.size() ? frequencies.cwiseAbs().maxCoeff() : 0; }

int cubature_points_per_dim(double B, int j) { return 2 * static_cast<int>(std::ceil(std::pow(B, j + 1))) + 1; }

NeedletFrame::NeedletFrame(double B, int d, int jmax, const FrameOptions& options)
    : B_(B), d_(d), jmax_(jmax), window_(B) {
  if (d < 1) throw std::invalid_argument("build_frame: dimension d must be >= 1");
  if (jmax < 0) throw std::invalid_argument("build_frame: jmax must be >= 0");
  const double top = std::pow(double(cubature_points_per_dim(B, jmax)), d);
  if (top > double(options.max_points))
    throw std::invalid_argument("build_frame: K_" + std::to_string(jmax) + " = " + std::to_string(top) +
                                " exceeds the cap of " + std::to_string(options.max_points) + " points");

  levels_.reserve(std::size_t(jmax + 1));
  for (int j = 0; j <= jmax; ++j) {
    LevelData level;
    const int n = cubature_points_per_dim(B, j);
    level.cubature = CubatureLevel{j, d, n, int_pow(n, d), std::pow(two_pi<double> / n, d)};
    level.frequencies = frequency_shell_matrix(j, B, d);
    level.window.resize(level.shell_size());
    const double dilation = std::pow(B, j);
    for (Index c = 0; c < level.shell_size(); ++c) {
      const double eps = std::sqrt(double(level.frequencies.col(c).cast<long long>().squaredNorm()));
      level.window[c] = window_(eps / dilation);
    }
    levels_.push_back(std::move(level));
  }
}

const LevelData& NeedletFrame::level(int j) const {
  require_level(*this, j, "NeedletFrame::level");
  return levels_[std::size_t(j)];
}

NeedletFrame build_frame(double B, int d, int jmax, const FrameOptions& options) {
  return NeedletFrame(B, d, jmax, options);
}

// ---------------------------------------------------------------------------
// Coefficient arrays

CoefficientArray::CoefficientArray(MultiIndex order, Provenance provenance, std::vector<Eigen::VectorXd> levels)
    : order_(std::move(order)), provenance_(provenance), levels_(std::move(levels)) {
  for (const auto& lvl : levels_)
    if (!lvl.allFinite()) throw std::invalid_argument("CoefficientArray: non-finite coefficient");
}

CoefficientArray CoefficientArray::zeros(const NeedletFrame& frame, int levels, MultiIndex order,
                                         Provenance provenance) {
  if (levels > frame.max_level() + 1) throw std::invalid_argument("CoefficientArray::zeros: too many levels");
  std::vector<Eigen::VectorXd> data;
  for (int j = 0; j < levels; ++j) data.push_back(Eigen::VectorXd::Zero(frame.cubature(j).count));
  return CoefficientArray(std::move(order), provenance, std::move(data));
}

Index CoefficientArray::total_size() const {
  Index n = 0;
  for (const auto& lvl : levels_) n += lvl.size();
  return n;
}

void CoefficientArray::check_matches(const NeedletFrame& frame) const {
  if (level_count() > frame.max_level() + 1)
    throw std::invalid_argument("coefficients have " + std::to_string(level_count()) +
                                " levels but the frame stops at jmax = " + std::to_string(frame.max_level()));
  for (int j = 0; j < level_count(); ++j)
    if (level(j).size() != frame.cubature(j).count)
      throw std::invalid_argument("coefficients at level " + std::to_string(j) + " have " +
                                  std::to_string(level(j).size()) + " entries, frame expects " +
                                  std::to_string(frame.cubature(j).count));
}

// ---------------------------------------------------------------------------
// Evaluation and transforms

double needlet_eval(const NeedletFrame& frame, int j, Index k, const Eigen::Ref<const Eigen::VectorXd>& theta,
                    const MultiIndex& m) {
  const LevelData& level = frame.level(j);
  if (k < 0 || k >= level.cubature.count)
    throw std::out_of_range("needlet_eval: index k = " + std::to_string(k) + " outside 0.." +
                            std::to_string(level.cubature.count - 1));
  detail::require_same_dimension(theta.size(), frame.dimension(), "needlet_eval");
  detail::require_same_dimension(m.dimension(), frame.dimension(), "needlet_eval");

  const Eigen::VectorXd delta = theta - level.cubature.point(k);
  const int reach = level.max_abs_frequency();
  const Eigen::MatrixXcd table = phase_table(delta, reach);
  const Eigen::VectorXcd mult = multipliers(level, m);
  cdouble acc = 0;
  double scale = 0;
  for (Index c = 0; c < level.shell_size(); ++c) {
    const cdouble term = level.window[c] * mult[c] * phase(table, level.frequencies.col(c), reach);
    acc += term;
    scale += std::abs(term);
  }
  const double prefactor = std::sqrt(level.cubature.weight) * std::pow(two_pi<double>, -frame.dimension());
  if (std::abs(acc.imag()) > kImaginaryResidueTolerance * std::max(1.0, scale))
    throw ImaginaryResidueError("needlet_eval: imaginary residue exceeds tolerance");
  return prefactor * acc.real();
}

CoefficientArray coefficients_from_spectrum(const NeedletFrame& frame, const ShellSpectrum& spectrum,
                                            const MultiIndex& m, Provenance provenance, TransformPath path) {
  detail::require_same_dimension(m.dimension(), frame.dimension(), "coefficients_from_spectrum");
  const int levels = static_cast<int>(spectrum.levels.size());
  if (levels > frame.max_level() + 1) throw std::invalid_argument("coefficients_from_spectrum: too many levels");

  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(levels));
  for (int j = 0; j < levels; ++j) {
    const LevelData& level = frame.level(j);
    const Eigen::VectorXcd& a = spectrum.levels[std::size_t(j)];
    if (a.size() != level.shell_size()) throw std::invalid_argument("coefficients_from_spectrum: shell size mismatch");
    const double prefactor = std::sqrt(level.cubature.weight) * inv_sqrt_torus_volume(frame.dimension());
    const Eigen::VectorXcd spectral =
        (level.window.cast<cdouble>().array() * multipliers(level, m).array() * a.array()).matrix() * prefactor;
    out[std::size_t(j)] =
        take_real(shell_to_points(level, spectral, path), spectral.cwiseAbs().sum(), "coefficients_from_spectrum");
  }
  return CoefficientArray(m, provenance, std::move(out));
}

Eigen::MatrixXd uniform_grid(int d, int G) {
  if (d < 1 || G < 1) throw std::invalid_argument("uniform_grid: d and G must be positive");
  const Index total = int_pow(G, d);
  Eigen::MatrixXd grid(d, total);
  for (Index g = 0; g < total; ++g) {
    Index rest = g;
    for (int c = d - 1; c >= 0; --c) {
      grid(c, g) = two_pi<double> * double(rest % G) / G;
      rest /= G;
    }
  }
  return grid;
}

ShellSpectrum fourier_spectrum(const NeedletFrame& frame, const ScalarField& f, int jmax,
                               const AnalyzeOptions& options) {
  require_level(frame, jmax, "analyze");
  const int d = frame.dimension();
  const int base = cubature_points_per_dim(frame.scale(), jmax);
  const int extra = options.band_limit ? std::max(*options.band_limit, 0) : base + 32;
  const int n = base + extra;
  const Index total = int_pow(n, d);

  const Eigen::MatrixXd grid = uniform_grid(d, n);
  Eigen::VectorXd values(total);
  parallel_for(0, total, [&](Index g) { values[g] = f(grid.col(g)); });
  if (!values.allFinite()) throw std::domain_error("analyze: f produced a non-finite value on the quadrature grid");

  // a_l = (2pi)^d / n^d * sum_g f(theta_g) conj(e_l(theta_g))
  const double weight = std::pow(two_pi<double>, d) / double(total) * inv_sqrt_torus_volume(d);
  ShellSpectrum spectrum;
  std::vector<cdouble> transformed;
  if (options.path == TransformPath::fft) {
    transformed.assign(values.data(), values.data() + total);
    detail::fft_inplace(transformed, n, d, -1);
  }
  for (int j = 0; j <= jmax; ++j) {
    const LevelData& level = frame.level(j);
    Eigen::VectorXcd a(level.shell_size());
    if (options.path == TransformPath::fft) {
      for (Index c = 0; c < level.shell_size(); ++c)
        a[c] = transformed[std::size_t(detail::wrapped_offset(level.frequencies.col(c), n))];
    } else {
      parallel_for(0, level.shell_size(), [&](Index c) {
        const Eigen::VectorXd ell = level.frequencies.col(c).cast<double>();
        cdouble acc = 0;
        for (Index g = 0; g < total; ++g) acc += values[g] * std::polar(1.0, -ell.dot(grid.col(g)));
        a[c] = acc;
      });
    }
    spectrum.levels.push_back(a * weight);
  }
  return spectrum;
}

CoefficientArray analyze(const NeedletFrame& frame, const ScalarField& f, const MultiIndex& m, int jmax,
                         const AnalyzeOptions& options) {
  return coefficients_from_spectrum(frame, fourier_spectrum(frame, f, jmax, options), m,
                                    Provenance::exact_quadrature, options.path);
}

namespace {

// Spectrum of sum_k c_{j,k} psi_{j,k} over the level's shell, scaled so that
// the field is sum_l s_l exp(i <l, theta>).
Eigen::VectorXcd level_field_spectrum(const NeedletFrame& frame, int j, const Eigen::VectorXd& coeffs,
                                      TransformPath path) {
  const LevelData& level = frame.level(j);
  const double prefactor = std::sqrt(level.cubature.weight) * std::pow(two_pi<double>, -frame.dimension());
  return (level.window.cast<cdouble>().array() * points_to_shell(level, coeffs, path).array()).matrix() * prefactor;
}

// Merges per-level spectra into one frequency list.
void merged_spectrum(const NeedletFrame& frame, const CoefficientArray& coeffs, TransformPath path,
                     Eigen::MatrixXi& freqs, Eigen::VectorXcd& spectral) {
  Index total = 0;
  for (int j = 0; j < coeffs.level_count(); ++j) total += frame.level(j).shell_size();
  freqs.resize(frame.dimension(), total);
  spectral.resize(total);
  Index at = 0;
  for (int j = 0; j < coeffs.level_count(); ++j) {
    const LevelData& level = frame.level(j);
    freqs.middleCols(at, level.shell_size()) = level.frequencies;
    spectral.segment(at, level.shell_size()) = level_field_spectrum(frame, j, coeffs.level(j), path);
    at += level.shell_size();
  }
}

}  // namespace

Eigen::VectorXd synthesize(const NeedletFrame& frame, const CoefficientArray& coeffs,
                           const Eigen::Ref<const Eigen::MatrixXd>& grid, TransformPath path) {
  coeffs.check_matches(frame);
  detail::require_same_dimension(grid.rows(), frame.dimension(), "synthesize");
  Eigen::MatrixXi freqs;
  Eigen::VectorXcd spectral;
  merged_spectrum(frame, coeffs, path, freqs, spectral);
  return take_real(evaluate_spectrum(freqs, spectral, grid), spectral.cwiseAbs().sum(), "synthesize");
}

Eigen::VectorXd synthesize_uniform(const NeedletFrame& frame, const CoefficientArray& coeffs, int G) {
  coeffs.check_matches(frame);
  Eigen::MatrixXi freqs;
  Eigen::VectorXcd spectral;
  merged_spectrum(frame, coeffs, TransformPath::fft, freqs, spectral);
  return take_real(evaluate_spectrum_uniform(freqs, spectral, frame.dimension(), G), spectral.cwiseAbs().sum(),
                   "synthesize_uniform");
}

Eigen::VectorXd needlet_on_uniform_grid(const NeedletFrame& frame, int j, Index k, const MultiIndex& m, int G) {
  const LevelData& level = frame.level(j);
  const Eigen::VectorXd xi = level.cubature.point(k);
  const double prefactor = std::sqrt(level.cubature.weight) * std::pow(two_pi<double>, -frame.dimension());
  const Eigen::VectorXcd mult = multipliers(level, m);
  Eigen::VectorXcd spectral(level.shell_size());
  for (Index c = 0; c < level.shell_size(); ++c)
    spectral[c] = prefactor * level.window[c] * mult[c] *
                  std::polar(1.0, -xi.dot(level.frequencies.col(c).cast<double>()));
  return take_real(evaluate_spectrum_uniform(level.frequencies, spectral, frame.dimension(), G),
                   spectral.cwiseAbs().sum(), "needlet_on_uniform_grid");
}

double needlet_lp_norm(const NeedletFrame& frame, int j, Index k, const MultiIndex& m, double p, int G) {
  const Eigen::VectorXd values = needlet_on_uniform_grid(frame, j, k, m, G);
  if (std::isinf(p)) return values.cwiseAbs().maxCoeff();
  const double cell = std::pow(two_pi<double> / G, frame.dimension());
  return std::pow(cell * values.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Diagnostics

double besov_sequence_norm(const CoefficientArray& coeffs, double s, double r, double q, double B, int d) {
  if (!(r >= 1.0) || !(q >= 1.0)) throw std::invalid_argument("besov_sequence_norm: r and q must be >= 1");
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  double acc = 0;
  for (int j = 0; j < coeffs.level_count(); ++j) {
    const Eigen::VectorXd& beta = coeffs.level(j);
    double level_norm = 0;
    if (beta.size() > 0)
      level_norm = std::isinf(r) ? beta.cwiseAbs().maxCoeff() : std::pow(beta.cwiseAbs().array().pow(r).sum(), inv_r);
    const double term = std::pow(B, j * (s + d * (0.5 - inv_r))) * level_norm;
    acc = std::isinf(q) ? std::max(acc, term) : acc + std::pow(term, q);
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

LocalizationFit localization_profile(const NeedletFrame& frame, int j, Index k, const MultiIndex& m,
                                     double decay_exponent, int samples_per_ray) {
  const LevelData& level = frame.level(j);
  const int d = frame.dimension();
  const Eigen::VectorXd xi = level.cubature.point(k);

  std::vector<Eigen::VectorXd> directions;
  for (int c = 0; c < d; ++c)
    for (double sign : {1.0, -1.0}) directions.push_back(sign * Eigen::VectorXd::Unit(d, c));
  if (d > 1) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Eigen::VectorXd dir(d);
      for (int c = 0; c < d; ++c) dir[c] = (mask >> c) & 1 ? -1.0 : 1.0;
      directions.push_back(dir);
    }
  }

  const double Bj = std::pow(frame.scale(), j);
  const double envelope = std::pow(Bj, m.total() + 0.5 * d);
  LocalizationFit fit;
  for (const auto& dir : directions) {
    for (int s = 0; s <= samples_per_ray; ++s) {
      const Eigen::VectorXd theta = xi + dir * (std::numbers::pi * s / samples_per_ray);
      const double dist = geodesic_distance(theta, xi);
      const double value = std::abs(needlet_eval(frame, j, k, theta, m));
      fit.constant = std::max(fit.constant, value * std::pow(1.0 + Bj * dist, decay_exponent) / envelope);
      ++fit.samples;
    }
  }
  return fit;
}

// ---------------------------------------------------------------------------
// CSV

void write_coefficients_csv(std::ostream& out, const CoefficientArray& coeffs) {
  out << "j,k,value\n";
  char buf[64];
  for (int j = 0; j < coeffs.level_count(); ++j)
    for (Index k = 0; k < coeffs.level(j).size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", coeffs.level(j)[k]);
      out << j << ',' << k << ',' << buf << '\n';
    }
}

CoefficientArray read_coefficients_csv(std::istream& in, MultiIndex order, Provenance provenance) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("j,k,value", 0) != 0)
    throw std::invalid_argument("coefficient CSV: missing `j,k,value` header");
  std::vector<std::vector<double>> levels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    long j = -1, k = -1;
    double value = 0;
    char c1 = 0, c2 = 0;
    if (!(row >> j >> c1 >> k >> c2 >> value) || c1 != ',' || c2 != ',')
      throw std::invalid_argument("coefficient CSV: malformed row at line " + std::to_string(line_no));
    if (j < 0 || std::size_t(j) > levels.size() || (std::size_t(j) < levels.size() && std::size_t(j) + 1 != levels.size()))
      throw std::invalid_argument("coefficient CSV: levels out of order at line " + std::to_string(line_no));
    if (std::size_t(j) == levels.size()) levels.emplace_back();
    if (std::size_t(k) != levels.back().size())
      throw std::invalid_argument("coefficient CSV: index k out of order at line " + std::to_string(line_no));
    levels.back().push_back(value);
  }
  std::vector<Eigen::VectorXd> data;
  for (auto& lvl : levels) data.push_back(Eigen::Map<Eigen::VectorXd>(lvl.data(), Index(lvl.size())));
  return CoefficientArray(std::move(order), provenance, std::move(data));
}

}  // namespace tneedlet
