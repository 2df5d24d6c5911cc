#pragma once

#include <array>

namespace tneedlet {

/// Littlewood-Paley window b supported on [1/B, B] with sum_j b^2(c / B^j) = 1
/// for every c >= 1.
///
/// Built from the normalized integral Psi of the bump exp(-1/(1-t^2)):
/// phi is 1 on [0, 1/B], decreases smoothly to 0 on [1/B, 1], and
/// b^2(t) = phi(t/B) - phi(t), so the dyadic sum of b^2 telescopes to one.
class WindowFunction {
 public:
  explicit WindowFunction(double B);

  double scale() const { return B_; }

  /// b(t).
  double operator()(double t) const;
  /// b^2(t), evaluated without the square root.
  double squared(double t) const;
  /// Smooth cutoff phi(t): 1 on [0, 1/B], 0 on [1, inf).
  double cutoff(double t) const;

  /// I_q = int_{1/B}^{B} u^q b^2(u) du. Orders up to kCachedMoments-1 are
  /// precomputed; higher orders are integrated on demand.
  double moment(int q) const;

  static constexpr int kCachedMoments = 9;

 private:
  double B_;
  std::array<double, kCachedMoments> moments_{};
};

WindowFunction build_window(double B);
double window_moment(const WindowFunction& window, int q);

/// Normalized bump integral Psi(u), increasing from 0 at u = -1 to 1 at u = 1.
double bump_integral(double u);

}  // namespace tneedlet
