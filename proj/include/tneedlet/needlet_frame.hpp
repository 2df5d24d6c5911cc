#pragma once

#include "tneedlet/torus_harmonics.hpp"
#include "tneedlet/window.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tneedlet {

/// Raised when a quantity that must be real carries an imaginary part above
/// the residue tolerance.
class ImaginaryResidueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kImaginaryResidueTolerance = 1e-9;

/// Equal-weight tensor grid at level j: N points per dimension, K = N^d.
/// Point k is laid out row-major (last coordinate fastest), matching the
/// storage order of a d-dimensional FFT of side N.
struct CubatureLevel {
  int level = 0;
  int dimension = 1;
  int points_per_dim = 1;
  Index count = 1;
  double weight = 0;

  Eigen::VectorXd point(Index k) const;
  /// d x K matrix of all points.
  Eigen::MatrixXd points() const;
};

/// Frequencies of one shell together with the window values b(eps_l / B^j).
struct LevelData {
  CubatureLevel cubature;
  Eigen::MatrixXi frequencies;  // d x |shell|
  Eigen::VectorXd window;       // one entry per frequency column

  Index shell_size() const { return frequencies.cols(); }
  /// Largest |l_i| over the shell (0 for an empty shell).
  int max_abs_frequency() const;
};

struct FrameOptions {
  /// Resource guard on K_jmax.
  Index max_points = 100'000'000;
};

/// Toroidal needlet system for levels 0..jmax. Immutable after construction.
class NeedletFrame {
 public:
  NeedletFrame(double B, int d, int jmax, const FrameOptions& options = {});

  double scale() const { return B_; }
  int dimension() const { return d_; }
  int max_level() const { return jmax_; }
  const WindowFunction& window() const { return window_; }
  const LevelData& level(int j) const;
  const CubatureLevel& cubature(int j) const { return level(j).cubature; }

 private:
  double B_;
  int d_;
  int jmax_;
  WindowFunction window_;
  std::vector<LevelData> levels_;
};

NeedletFrame build_frame(double B, int d, int jmax, const FrameOptions& options = {});

/// Points per dimension of the level-j grid: 2 * ceil(B^{j+1}) + 1.
int cubature_points_per_dim(double B, int j);

enum class Provenance { exact_quadrature, empirical };

/// Needlet coefficients for levels 0..level_count()-1 of an owning frame.
class CoefficientArray {
 public:
  CoefficientArray() = default;
  CoefficientArray(MultiIndex order, Provenance provenance, std::vector<Eigen::VectorXd> levels);

  /// All-zero coefficients for levels 0..levels-1 of frame.
  static CoefficientArray zeros(const NeedletFrame& frame, int levels, MultiIndex order,
                                Provenance provenance = Provenance::exact_quadrature);

  const MultiIndex& order() const { return order_; }
  Provenance provenance() const { return provenance_; }
  int level_count() const { return static_cast<int>(levels_.size()); }
  const Eigen::VectorXd& level(int j) const { return levels_.at(std::size_t(j)); }
  Eigen::VectorXd& level(int j) { return levels_.at(std::size_t(j)); }
  Index total_size() const;

  /// Throws std::invalid_argument unless every level has K_j entries of frame.
  void check_matches(const NeedletFrame& frame) const;

 private:
  MultiIndex order_;
  Provenance provenance_ = Provenance::exact_quadrature;
  std::vector<Eigen::VectorXd> levels_;
};

/// Which summation backs the shell <-> grid transforms. The FFT path is an
/// optimization and agrees with the reference to rounding.
enum class TransformPath { reference, fft };

/// Fourier coefficients a_l for the frequencies of each level's shell, in the
/// column order of LevelData::frequencies.
struct ShellSpectrum {
  std::vector<Eigen::VectorXcd> levels;
};

/// psi^{(m)}_{j,k}(theta) for 0-based k.
double needlet_eval(const NeedletFrame& frame, int j, Index k, const Eigen::Ref<const Eigen::VectorXd>& theta,
                    const MultiIndex& m);

/// Coefficients beta^{(m)}_{j,k} = sqrt(lambda) sum_l b_l (il)^m a_l e_l(xi_k)
/// for levels 0..spectrum.levels.size()-1.
CoefficientArray coefficients_from_spectrum(const NeedletFrame& frame, const ShellSpectrum& spectrum,
                                            const MultiIndex& m, Provenance provenance,
                                            TransformPath path = TransformPath::reference);

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

struct AnalyzeOptions {
  /// Per-coordinate band limit of f when known; quadrature is then exact.
  std::optional<int> band_limit;
  TransformPath path = TransformPath::reference;
};

/// Fourier coefficients of f over the shells of levels 0..jmax by uniform-grid
/// quadrature.
ShellSpectrum fourier_spectrum(const NeedletFrame& frame, const ScalarField& f, int jmax,
                               const AnalyzeOptions& options = {});

/// beta^{(m)}_{j,k} = (-1)^{|m|} <f, psi^{(m)}_{j,k}> for levels 0..jmax.
CoefficientArray analyze(const NeedletFrame& frame, const ScalarField& f, const MultiIndex& m, int jmax,
                         const AnalyzeOptions& options = {});

/// sum_j sum_k c_{j,k} psi_{j,k}(theta) at every column of grid (d x G).
Eigen::VectorXd synthesize(const NeedletFrame& frame, const CoefficientArray& coeffs,
                           const Eigen::Ref<const Eigen::MatrixXd>& grid,
                           TransformPath path = TransformPath::reference);

/// Synthesis on the uniform grid 2*pi*g/G (row-major, G^d values). Uses the
/// FFT when G resolves every frequency, direct summation otherwise.
Eigen::VectorXd synthesize_uniform(const NeedletFrame& frame, const CoefficientArray& coeffs, int G);

/// Uniform grid 2*pi*g/G in T^d as a d x G^d matrix (row-major order).
Eigen::MatrixXd uniform_grid(int d, int G);

/// psi^{(m)}_{j,k} sampled on the uniform grid of side G.
Eigen::VectorXd needlet_on_uniform_grid(const NeedletFrame& frame, int j, Index k, const MultiIndex& m, int G);

/// Quadrature L^p norm (p may be infinity) of psi^{(m)}_{j,k} on the uniform
/// grid of side G.
double needlet_lp_norm(const NeedletFrame& frame, int j, Index k, const MultiIndex& m, double p, int G);

/// Besov sequence norm
///   || ( B^{j[s + d(1/2 - 1/r)]} ||beta_{j,.}||_{l^r} )_j ||_{l^q};
/// r or q equal to infinity select suprema.
double besov_sequence_norm(const CoefficientArray& coeffs, double s, double r, double q, double B, int d);

struct LocalizationFit {
  /// Smallest c with |psi^{(m)}| <= c B^{j(|m|+d/2)} / (1 + B^j dist)^M on the sample.
  double constant = 0;
  Index samples = 0;
};

/// Samples |psi^{(m)}_{j,k}| along rays leaving xi_{j,k} (coordinate axes and,
/// for d > 1, diagonals) out to distance pi per coordinate.
LocalizationFit localization_profile(const NeedletFrame& frame, int j, Index k, const MultiIndex& m,
                                     double decay_exponent, int samples_per_ray = 1024);

/// CSV with header `j,k,value`, 17 significant digits, 0-based k.
void write_coefficients_csv(std::ostream& out, const CoefficientArray& coeffs);
CoefficientArray read_coefficients_csv(std::istream& in, MultiIndex order, Provenance provenance);

}  // namespace tneedlet
