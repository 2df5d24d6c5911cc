#include "tneedlet/window.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace tneedlet;

TEST_SUITE("window") {
  TEST_CASE("support and the value at t = 1 for B = 2") {
    const WindowFunction w = build_window(2);
    CHECK(w(0.4) == 0.0);
    CHECK(w(0.5) == 0.0);
    CHECK(w(2.0) == 0.0);
    CHECK(w(7.0) == 0.0);
    CHECK(w(1.0) == 1.0);
    CHECK(w(0.75) > 0.0);
    CHECK(w(1.5) > 0.0);
  }

  TEST_CASE("partition of unity over dyadic dilates") {
    for (double B : {1.5, 2.0, 3.0}) {
      const WindowFunction w(B);
      std::mt19937_64 rng(11);
      std::uniform_real_distribution<double> c(1.0, 500.0);
      for (int i = 0; i < 200; ++i) {
        const double x = c(rng);
        double s = 0;
        for (int j = 0; j <= 60; ++j) s += w.squared(x / std::pow(B, j));
        CHECK(std::abs(s - 1.0) < 1e-10);
      }
    }
    const WindowFunction w(2);
    double s = 0;
    for (int j = 0; j <= 40; ++j) s += w.squared(3.7 / std::pow(2.0, j));
    CHECK(std::abs(s - 1.0) < 1e-10);
  }

  TEST_CASE("cutoff shape") {
    const WindowFunction w(2);
    CHECK(w.cutoff(0.0) == 1.0);
    CHECK(w.cutoff(0.5) == 1.0);
    CHECK(w.cutoff(1.0) == 0.0);
    double prev = 1.0;
    for (double t = 0.5; t <= 1.0; t += 1e-3) {
      CHECK(w.cutoff(t) <= prev + 1e-15);
      prev = w.cutoff(t);
    }
    CHECK(bump_integral(-1.0) == 0.0);
    CHECK(bump_integral(0.0) == doctest::Approx(0.5).epsilon(1e-15).scale(0));
    CHECK(bump_integral(1.0) == 1.0);
    for (double u = -0.95; u < 1.0; u += 0.1) CHECK(bump_integral(u) + bump_integral(-u) == doctest::Approx(1.0));
  }

  TEST_CASE("smoothness: finite-difference derivatives up to order 4 are bounded") {
    const WindowFunction w(2);
    // k-th central difference of b with step h
    auto diff = [&](int k, double t, double h) {
      double acc = 0, binom = 1;
      for (int i = 0; i <= k; ++i) {
        acc += (i % 2 ? -1.0 : 1.0) * binom * w(t + (0.5 * k - i) * h);
        binom = binom * (k - i) / (i + 1);
      }
      return acc / std::pow(h, k);
    };
    for (int k = 1; k <= 4; ++k) {
      double coarse = 0, fine = 0;
      for (double t = 0.5; t <= 2.0; t += 1e-4) {
        coarse = std::max(coarse, std::abs(diff(k, t, 1e-3)));
        fine = std::max(fine, std::abs(diff(k, t, 5e-4)));
      }
      CAPTURE(k);
      CHECK(std::isfinite(fine));
      // halving the step leaves the maximum essentially unchanged: no blow-up
      CHECK(fine == doctest::Approx(coarse).epsilon(0.1).scale(0));
    }
  }

  TEST_CASE("moments") {
    const WindowFunction w(2);
    CHECK(w.moment(0) > 0.0);
    for (int q = 0; q <= 10; ++q) {
      CHECK(w.moment(q) > 0.0);
      CHECK(w.moment(q) <= std::pow(2.0, q) * w.moment(0) + 1e-12);
      CHECK(w.moment(q) == doctest::Approx(window_moment(w, q)).epsilon(1e-14).scale(0));
    }
    // dense trapezoid oracle for I_1
    const int n = 1'000'000;
    const double a = 0.5, b = 2.0, h = (b - a) / n;
    double acc = 0.5 * (a * w.squared(a) + b * w.squared(b));
    for (int i = 1; i < n; ++i) {
      const double u = a + i * h;
      acc += u * w.squared(u);
    }
    CHECK(std::abs(acc * h - w.moment(1)) < 1e-8);
    CHECK_THROWS_AS(window_moment(w, -1), std::invalid_argument);
  }

  TEST_CASE("rejects B <= 1") {
    CHECK_THROWS_AS(WindowFunction(1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_window(0.3), std::invalid_argument);
  }
}
