#pragma once

#include "tneedlet/random.hpp"
#include "tneedlet/torus_harmonics.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace tneedlet {

/// One-dimensional density on the circle; d-dimensional test densities are
/// products of these.
class CircularFactor {
 public:
  virtual ~CircularFactor() = default;
  virtual std::string name() const = 0;
  virtual double pdf(double theta) const = 0;
  /// order-th derivative of pdf; order <= max_order().
  virtual double derivative(double theta, int order) const = 0;
  virtual int max_order() const = 0;
  virtual double sup_norm() const = 0;
  virtual double sample(Rng& rng) const = 0;
};

/// Density on T^d with exact derivatives, sup-norm M and an exact sampler.
class TestDensity {
 public:
  TestDensity(std::string name, std::vector<std::shared_ptr<const CircularFactor>> factors);

  const std::string& name() const { return name_; }
  int dimension() const { return static_cast<int>(factors_.size()); }
  /// M = ||f||_inf.
  double sup_norm() const { return sup_norm_; }
  int max_derivative_order() const { return max_order_; }
  const std::vector<std::shared_ptr<const CircularFactor>>& factors() const { return factors_; }

  double pdf(const Eigen::Ref<const Eigen::VectorXd>& theta) const;
  /// D^m f(theta); rejects orders above max_derivative_order().
  double derivative(const Eigen::Ref<const Eigen::VectorXd>& theta, const MultiIndex& m) const;

  /// n independent draws as a d x n matrix with coordinates in [0, 2pi).
  Eigen::MatrixXd sample(Rng& rng, Index n) const;

 private:
  std::string name_;
  std::vector<std::shared_ptr<const CircularFactor>> factors_;
  double sup_norm_ = 1;
  int max_order_ = 0;
};

TestDensity uniform_density(int d);

enum class WrappedNormalNormalization {
  /// 1/(sigma sqrt(2 pi)): integrates to one.
  unit_mass,
  /// 1/(2 pi) prefactor as displayed for the published test density; mass
  /// sigma/sqrt(2 pi). For comparison runs only.
  literal,
};

/// Wrapped normal on the circle: sum_{k=-terms..terms} of shifted Gaussians.
TestDensity wrapped_normal(double sigma, int terms = 10,
                           WrappedNormalNormalization normalization = WrappedNormalNormalization::unit_mass);

/// Independent product of one-dimensional densities.
TestDensity product_density(const std::vector<TestDensity>& components);

/// Parses "uniform", "wrapped_normal(sigma)", "wrapped_normal(sigma,literal)"
/// and "product(a,b,...)". "uniform" takes its dimension from d; any other
/// name must have dimension d.
TestDensity make_density(const std::string& descriptor, int d);

}  // namespace tneedlet
