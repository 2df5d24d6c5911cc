#include "tneedlet/window.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace tneedlet {

namespace {

// the bump is flat at both ends, so a fixed high-order rule is accurate to
// a few ulps on [-1, u]
using BumpRule = boost::math::quadrature::gauss<double, 100>;
using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr unsigned kMaxDepth = 10;

double bump(double t) {
  if (t <= -1.0 || t >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

// int_{-1}^{u} bump for u <= 0, where the integrand is monotone
double left_bump_mass(double u) {
  if (u <= -1.0) return 0.0;
  return BumpRule::integrate(bump, -1.0, u);
}

double bump_mass() {
  static const double mass = 2.0 * left_bump_mass(0.0);
  return mass;
}

}  // namespace

double bump_integral(double u) {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  // Psi(u) = 1 - Psi(-u); integrate only from the nearer endpoint
  if (u <= 0.0) return left_bump_mass(u) / bump_mass();
  return 1.0 - left_bump_mass(-u) / bump_mass();
}

WindowFunction::WindowFunction(double B) : B_(B) {
  if (!(B > 1.0) || !std::isfinite(B))
    throw std::invalid_argument("window: scale must satisfy B > 1, got " + std::to_string(B));
  for (int q = 0; q < kCachedMoments; ++q) moments_[std::size_t(q)] = window_moment(*this, q);
}

double WindowFunction::cutoff(double t) const {
  const double inv_b = 1.0 / B_;
  if (t <= inv_b) return 1.0;
  if (t >= 1.0) return 0.0;
  return bump_integral(1.0 - 2.0 * (t - inv_b) * B_ / (B_ - 1.0));
}

double WindowFunction::squared(double t) const {
  if (t <= 1.0 / B_ || t >= B_) return 0.0;
  return std::max(cutoff(t / B_) - cutoff(t), 0.0);
}

double WindowFunction::operator()(double t) const { return std::sqrt(squared(t)); }

double WindowFunction::moment(int q) const {
  if (q >= 0 && q < kCachedMoments) return moments_[std::size_t(q)];
  return window_moment(*this, q);
}

WindowFunction build_window(double B) { return WindowFunction(B); }

double window_moment(const WindowFunction& window, int q) {
  if (q < 0) throw std::invalid_argument("window_moment: order must be >= 0");
  const double B = window.scale();
  auto integrand = [&](double u) { return std::pow(u, q) * window.squared(u); };
  // b^2 switches formula at u = 1; integrate each smooth piece separately
  const double lower = Rule::integrate(integrand, 1.0 / B, 1.0, kMaxDepth, 1e-12);
  const double upper = Rule::integrate(integrand, 1.0, B, kMaxDepth, 1e-12);
  return lower + upper;
}

}  // namespace tneedlet
