#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace tneedlet {

using Index = Eigen::Index;

template <typename Scalar>
inline constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

/// Reduces an arbitrary real angle to [0, 2*pi).
template <typename Scalar>
Scalar wrap_angle(Scalar angle) {
  Scalar r = std::fmod(angle, two_pi<Scalar>);
  if (r < Scalar(0)) r += two_pi<Scalar>;
  // fmod of a tiny negative value can round back up to exactly 2*pi
  if (r >= two_pi<Scalar>) r = Scalar(0);
  return r;
}

/// Integer frequency vector l = (l_1, ..., l_d) of the Fourier basis on T^d.
class FrequencyVector {
 public:
  FrequencyVector() = default;
  explicit FrequencyVector(Eigen::VectorXi components) : components_(std::move(components)) {
    if (components_.size() == 0) throw std::invalid_argument("FrequencyVector: dimension must be positive");
  }
  FrequencyVector(std::initializer_list<int> components)
      : FrequencyVector(Eigen::Map<const Eigen::VectorXi>(components.begin(), Index(components.size()))) {}

  Index dimension() const { return components_.size(); }
  const Eigen::VectorXi& components() const { return components_; }
  int operator[](Index i) const { return components_[i]; }

  /// Squared Laplacian eigenvalue sum_i l_i^2, exact in integers.
  long long squared_norm() const {
    long long s = 0;
    for (Index i = 0; i < components_.size(); ++i) s += static_cast<long long>(components_[i]) * components_[i];
    return s;
  }
  /// eps_l = sqrt(sum_i l_i^2).
  double eigenvalue() const { return std::sqrt(static_cast<double>(squared_norm())); }

  FrequencyVector operator-() const { return FrequencyVector(Eigen::VectorXi(-components_)); }
  bool operator==(const FrequencyVector& other) const { return components_ == other.components_; }

 private:
  Eigen::VectorXi components_;
};

/// Derivative order m = (m_1, ..., m_d); |m| is cached.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(Eigen::VectorXi orders) : orders_(std::move(orders)) {
    if (orders_.size() == 0) throw std::invalid_argument("MultiIndex: dimension must be positive");
    if ((orders_.array() < 0).any()) throw std::invalid_argument("MultiIndex: orders must be nonnegative");
    total_ = orders_.sum();
  }
  MultiIndex(std::initializer_list<int> orders)
      : MultiIndex(Eigen::Map<const Eigen::VectorXi>(orders.begin(), Index(orders.size()))) {}

  static MultiIndex zero(Index d) { return MultiIndex(Eigen::VectorXi::Zero(d)); }

  Index dimension() const { return orders_.size(); }
  const Eigen::VectorXi& orders() const { return orders_; }
  int operator[](Index i) const { return orders_[i]; }
  int total() const { return total_; }

  MultiIndex operator+(const MultiIndex& other) const {
    if (other.dimension() != dimension()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    return MultiIndex(Eigen::VectorXi(orders_ + other.orders_));
  }
  bool operator==(const MultiIndex& other) const { return orders_ == other.orders_; }

 private:
  Eigen::VectorXi orders_;
  int total_ = 0;
};

/// Point of T^d with every coordinate in [0, 2*pi).
template <typename Scalar = double>
class TorusPoint {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TorusPoint() = default;
  template <typename Derived>
  explicit TorusPoint(const Eigen::MatrixBase<Derived>& angles)
      : angles_(angles.template cast<Scalar>().unaryExpr([](Scalar a) { return wrap_angle(a); })) {
    if (angles_.size() == 0) throw std::invalid_argument("TorusPoint: dimension must be positive");
  }
  TorusPoint(std::initializer_list<Scalar> angles)
      : TorusPoint(Eigen::Map<const Vector>(angles.begin(), Index(angles.size()))) {}

  Index dimension() const { return angles_.size(); }
  const Vector& angles() const { return angles_; }
  Scalar operator[](Index i) const { return angles_[i]; }

 private:
  Vector angles_;
};

using TorusPointd = TorusPoint<double>;

namespace detail {
inline void require_same_dimension(Index a, Index b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace detail

/// e_l(theta) = (2*pi)^{-d/2} exp(i <l, theta>).
template <typename Scalar, typename Derived>
std::complex<Scalar> fourier_basis_eval(const FrequencyVector& ell, const Eigen::MatrixBase<Derived>& theta) {
  detail::require_same_dimension(ell.dimension(), theta.size(), "fourier_basis_eval");
  Scalar phase = 0;
  for (Index i = 0; i < theta.size(); ++i) phase += Scalar(ell[i]) * Scalar(theta[i]);
  const Scalar norm = std::pow(two_pi<Scalar>, -Scalar(theta.size()) / Scalar(2));
  return std::polar(norm, phase);
}

template <typename Scalar>
std::complex<Scalar> fourier_basis_eval(const FrequencyVector& ell, const TorusPoint<Scalar>& theta) {
  return fourier_basis_eval<Scalar>(ell, theta.angles());
}

/// Multiplier of D^m acting on e_l: prod_i (i l_i)^{m_i}.
///
/// Computed as i^{|m|} prod_i l_i^{m_i}, which is exact while the integer
/// product stays below 2^53.
template <typename Scalar = double>
std::complex<Scalar> derivative_multiplier(const FrequencyVector& ell, const MultiIndex& m) {
  detail::require_same_dimension(ell.dimension(), m.dimension(), "derivative_multiplier");
  Scalar magnitude = 1;
  for (Index i = 0; i < ell.dimension(); ++i)
    for (int p = 0; p < m[i]; ++p) magnitude *= Scalar(ell[i]);
  switch (m.total() % 4) {
    case 0: return {magnitude, Scalar(0)};
    case 1: return {Scalar(0), magnitude};
    case 2: return {-magnitude, Scalar(0)};
    default: return {Scalar(0), -magnitude};
  }
}

/// Per-coordinate wrapped difference min(|a-b|, 2*pi - |a-b|).
template <typename Scalar>
Scalar wrapped_difference(Scalar a, Scalar b) {
  Scalar delta = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(delta, two_pi<Scalar> - delta);
}

/// Flat-torus geodesic distance.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar geodesic_distance(const Eigen::MatrixBase<DerivedA>& theta,
                                            const Eigen::MatrixBase<DerivedB>& other) {
  using Scalar = typename DerivedA::Scalar;
  detail::require_same_dimension(theta.size(), other.size(), "geodesic_distance");
  Scalar sum = 0;
  for (Index i = 0; i < theta.size(); ++i) {
    const Scalar delta = wrapped_difference<Scalar>(theta[i], Scalar(other[i]));
    sum += delta * delta;
  }
  return std::sqrt(sum);
}

template <typename Scalar>
Scalar geodesic_distance(const TorusPoint<Scalar>& theta, const TorusPoint<Scalar>& other) {
  return geodesic_distance(theta.angles(), other.angles());
}

/// Integer vectors with B^{j-1} < eps_l < B^{j+1}, in lexicographic order.
std::vector<FrequencyVector> frequency_shell(int j, double B, int d);

/// Frequencies of a shell packed column-wise into a d x |shell| matrix.
Eigen::MatrixXi frequency_shell_matrix(int j, double B, int d);

}  // namespace tneedlet
