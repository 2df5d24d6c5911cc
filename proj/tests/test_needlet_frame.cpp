#include "tneedlet/needlet_frame.hpp"
#include "tneedlet/parallel.hpp"

#include "trig_poly.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace tneedlet;
using cdouble = std::complex<double>;

namespace {

double cos_field(const Eigen::VectorXd& t) { return std::cos(t[0]); }

Eigen::VectorXd random_point(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0, two_pi<double>);
  Eigen::VectorXd p(d);
  for (int i = 0; i < d; ++i) p[i] = u(rng);
  return p;
}

}  // namespace

TEST_SUITE("needlet_frame") {
  TEST_CASE("build_frame cubature examples") {
    const NeedletFrame f1 = build_frame(2, 1, 2);
    CHECK(f1.cubature(1).points_per_dim == 9);
    CHECK(f1.cubature(1).count == 9);
    CHECK(f1.cubature(1).weight == doctest::Approx(two_pi<double> / 9));
    CHECK(f1.cubature(2).count == 17);
    const NeedletFrame f2 = build_frame(2, 2, 1);
    CHECK(f2.cubature(1).count == 81);
    CHECK(f1.max_level() == 2);
  }

  TEST_CASE("frame levels match frequency_shell and cubature invariants hold") {
    for (int d : {1, 2}) {
      const NeedletFrame frame(2, d, d == 1 ? 5 : 3);
      for (int j = 0; j <= frame.max_level(); ++j) {
        const LevelData& level = frame.level(j);
        CHECK(level.frequencies == frequency_shell_matrix(j, 2, d));
        const CubatureLevel& cub = level.cubature;
        CHECK(std::abs(cub.weight * double(cub.count) - std::pow(two_pi<double>, d)) < 1e-10);
        CHECK(cub.points().cols() == cub.count);
        // exactness on e_l conj(e_l') for l, l' in the shell
        const Eigen::MatrixXd pts = cub.points();
        const Index S = level.shell_size();
        for (Index a = 0; a < S; a += std::max<Index>(1, S / 12))
          for (Index b = 0; b < S; ++b) {
            const FrequencyVector la(Eigen::VectorXi(level.frequencies.col(a)));
            const FrequencyVector lb(Eigen::VectorXi(level.frequencies.col(b)));
            cdouble acc = 0;
            for (Index k = 0; k < cub.count; ++k)
              acc += fourier_basis_eval<double>(la, pts.col(k)) * std::conj(fourier_basis_eval<double>(lb, pts.col(k)));
            acc *= cub.weight;
            CHECK(std::abs(acc - cdouble(a == b ? 1.0 : 0.0)) < 1e-10);
          }
      }
    }
  }

  TEST_CASE("resource guard and argument validation") {
    FrameOptions tight;
    tight.max_points = 1000;
    CHECK_THROWS_AS(NeedletFrame(2, 2, 6, tight), std::invalid_argument);
    CHECK_THROWS_AS(NeedletFrame(1.0, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(NeedletFrame(2, 1, -1), std::invalid_argument);
    const NeedletFrame frame(2, 1, 2);
    CHECK_THROWS(frame.level(3));
    CHECK_THROWS(needlet_eval(frame, 1, 9, Eigen::VectorXd::Zero(1), MultiIndex{0}));
    CHECK_THROWS(needlet_eval(frame, 1, -1, Eigen::VectorXd::Zero(1), MultiIndex{0}));
  }

  TEST_CASE("needlet at its own center is positive") {
    const NeedletFrame frame(2, 2, 3);
    for (int j = 0; j <= 3; ++j)
      for (Index k : {Index(0), frame.cubature(j).count / 2, frame.cubature(j).count - 1}) {
        const double v = needlet_eval(frame, j, k, frame.cubature(j).point(k), MultiIndex{0, 0});
        const LevelData& level = frame.level(j);
        const double expected = std::sqrt(level.cubature.weight) * level.window.sum() * std::pow(two_pi<double>, -2);
        CHECK(v > 0);
        CHECK(v == doctest::Approx(expected).epsilon(1e-12).scale(0));
      }
  }

  TEST_CASE("derivative needlets match centered finite differences") {
    std::mt19937_64 rng(21);
    const NeedletFrame frame(2, 1, 4);
    std::uniform_int_distribution<int> jd(0, 4);
    const double h = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
      const int j = jd(rng);
      const Index k = std::uniform_int_distribution<Index>(0, frame.cubature(j).count - 1)(rng);
      const Eigen::VectorXd t = random_point(rng, 1);
      auto f = [&](double x) { return needlet_eval(frame, j, k, Eigen::VectorXd::Constant(1, x), MultiIndex{0}); };
      const double fd = (f(t[0] + h) - f(t[0] - h)) / (2 * h);
      const double exact = needlet_eval(frame, j, k, t, MultiIndex{1});
      const double scale = std::max(std::abs(exact), needlet_lp_norm(frame, j, k, MultiIndex{1}, INFINITY, 256));
      CHECK(std::abs(fd - exact) <= 1e-5 * scale);
    }
    // mixed partial in d = 2
    const NeedletFrame f2(2, 2, 2);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd t = random_point(rng, 2);
      auto g = [&](double a, double b) { return needlet_eval(f2, 2, 100, Eigen::Vector2d(a, b), MultiIndex{1, 0}); };
      const double fd = (g(t[0], t[1] + h) - g(t[0], t[1] - h)) / (2 * h);
      const double exact = needlet_eval(f2, 2, 100, t, MultiIndex{1, 1});
      const double scale = needlet_lp_norm(f2, 2, 100, MultiIndex{1, 1}, INFINITY, 64);
      CHECK(std::abs(fd - exact) <= 1e-5 * scale);
    }
  }

  TEST_CASE("needlets integrate to zero") {
    const NeedletFrame frame(2, 2, 3);
    for (int j = 0; j <= 3; ++j) {
      const int G = frame.cubature(j).points_per_dim;
      const Eigen::VectorXd v = needlet_on_uniform_grid(frame, j, 3, MultiIndex{0, 0}, G);
      CHECK(std::abs(v.sum() * std::pow(two_pi<double> / G, 2)) < 1e-12);
    }
  }

  TEST_CASE("derivative needlets are real: imaginary residue stays below tolerance") {
    std::mt19937_64 rng(22);
    const NeedletFrame frame(2, 2, 3);
    for (int trial = 0; trial < 200; ++trial) {
      const int j = int(rng() % 4);
      const Index k = Index(rng() % std::uint64_t(frame.cubature(j).count));
      const MultiIndex m{int(rng() % 3), int(rng() % 3)};
      CHECK_NOTHROW(needlet_eval(frame, j, k, random_point(rng, 2), m));
    }
    // a spectrum without conjugate symmetry produces complex coefficients
    ShellSpectrum bad;
    bad.levels.push_back(Eigen::VectorXcd::Zero(frame.level(0).shell_size()));
    bad.levels[0][0] = cdouble(0, 1);
    bad.levels[0][1] = cdouble(0.5, 0);
    CHECK_THROWS_AS(coefficients_from_spectrum(frame, bad, MultiIndex{0, 0}, Provenance::exact_quadrature),
                    ImaginaryResidueError);
  }

  TEST_CASE("analyze: uniform density has zero coefficients for every m") {
    const NeedletFrame frame(2, 2, 3);
    for (const MultiIndex& m : {MultiIndex{0, 0}, MultiIndex{1, 0}, MultiIndex{1, 2}}) {
      const CoefficientArray c =
          analyze(frame, [](const Eigen::VectorXd&) { return std::pow(two_pi<double>, -2); }, m, 3);
      CHECK(c.provenance() == Provenance::exact_quadrature);
      for (int j = 0; j <= 3; ++j) CHECK(c.level(j).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("analyze cos: Parseval gives pi, only level 0 is active") {
    const NeedletFrame frame(2, 1, 5);
    const CoefficientArray c = analyze(frame, cos_field, MultiIndex{0}, 5);
    double energy = 0;
    for (int j = 0; j <= 5; ++j) energy += c.level(j).squaredNorm();
    CHECK(std::abs(energy - std::numbers::pi) < 1e-8 * std::numbers::pi);
    CHECK(c.level(0).squaredNorm() == doctest::Approx(std::numbers::pi).epsilon(1e-12).scale(0));
    for (int j = 1; j <= 5; ++j) CHECK(c.level(j).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("analyze: frequencies beyond the covered shells leave coefficients zero") {
    const NeedletFrame frame(2, 1, 3);
    // cos(40 theta) lies above every shell up to jmax = 3 (|l| < 16)
    const CoefficientArray c =
        analyze(frame, [](const Eigen::VectorXd& t) { return std::cos(40 * t[0]); }, MultiIndex{0}, 3,
                {.band_limit = 40});
    for (int j = 0; j <= 3; ++j) CHECK(c.level(j).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("analyze rejects non-finite evaluations") {
    const NeedletFrame frame(2, 1, 1);
    CHECK_THROWS(analyze(frame, [](const Eigen::VectorXd&) { return NAN; }, MultiIndex{0}, 1));
  }

  TEST_CASE("tight frame and reconstruction for band-limited fields") {
    std::mt19937_64 rng(23);
    for (int d : {1, 2}) {
      const int jmax = d == 1 ? 5 : 3;
      const NeedletFrame frame(2, d, jmax);
      for (int trial = 0; trial < 3; ++trial) {
        const testing::TrigPoly p = testing::random_trig_poly(rng, d, std::pow(2.0, jmax), 8);
        const CoefficientArray c =
            analyze(frame, [&](const Eigen::VectorXd& t) { return p(t); }, MultiIndex::zero(d), jmax,
                    {.band_limit = p.band_limit()});
        double energy = 0;
        for (int j = 0; j <= jmax; ++j) energy += c.level(j).squaredNorm();
        CHECK(std::abs(energy - p.centered_l2_squared(d)) <= 1e-8 * p.centered_l2_squared(d));

        const int G = d == 1 ? 512 : 48;
        const Eigen::MatrixXd grid = uniform_grid(d, G);
        const Eigen::VectorXd rec = synthesize_uniform(frame, c, G);
        double err = 0;
        for (Index g = 0; g < grid.cols(); ++g) err = std::max(err, std::abs(rec[g] - (p(grid.col(g)) - p.mean)));
        CHECK(err < 1e-8);
      }
    }
  }

  TEST_CASE("synthesize cos reproduces cos on a 512-grid; zero coefficients give zero") {
    const NeedletFrame frame(2, 1, 4);
    const CoefficientArray c = analyze(frame, cos_field, MultiIndex{0}, 4);
    const Eigen::MatrixXd grid = uniform_grid(1, 512);
    const Eigen::VectorXd rec = synthesize(frame, c, grid);
    for (Index g = 0; g < grid.cols(); ++g) CHECK(std::abs(rec[g] - std::cos(grid(0, g))) < 1e-8);
    const Eigen::VectorXd zero = synthesize(frame, CoefficientArray::zeros(frame, 5, MultiIndex{0}), grid);
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("synthesize rejects mismatched levels") {
    const NeedletFrame frame(2, 1, 2);
    CoefficientArray c = CoefficientArray::zeros(frame, 2, MultiIndex{0});
    c.level(1).resize(3);
    CHECK_THROWS_AS(synthesize(frame, c, uniform_grid(1, 16)), std::invalid_argument);
    const CoefficientArray too_many(MultiIndex{0}, Provenance::empirical,
                                    {Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(9), Eigen::VectorXd::Zero(17),
                                     Eigen::VectorXd::Zero(33)});
    CHECK_THROWS_AS(synthesize(frame, too_many, uniform_grid(1, 16)), std::invalid_argument);
  }

  TEST_CASE("derivative coefficients: sum_k beta^(m) psi = sum_k beta psi^(m) per level") {
    std::mt19937_64 rng(24);
    const NeedletFrame frame(2, 1, 3);
    const testing::TrigPoly p = testing::random_trig_poly(rng, 1, 20.0, 10);
    auto f = [&](const Eigen::VectorXd& t) { return p(t); };
    const AnalyzeOptions opts{.band_limit = p.band_limit()};
    const CoefficientArray beta = analyze(frame, f, MultiIndex{0}, 3, opts);
    const CoefficientArray beta1 = analyze(frame, f, MultiIndex{1}, 3, opts);
    const Eigen::MatrixXd grid = uniform_grid(1, 512);
    for (int j = 0; j <= 3; ++j) {
      CoefficientArray only = CoefficientArray::zeros(frame, j + 1, MultiIndex{1});
      only.level(j) = beta1.level(j);
      const Eigen::VectorXd lhs = synthesize(frame, only, grid);
      for (Index g = 0; g < grid.cols(); g += 3) {
        double rhs = 0;
        for (Index k = 0; k < frame.cubature(j).count; ++k)
          rhs += beta.level(j)[k] * needlet_eval(frame, j, k, grid.col(g), MultiIndex{1});
        CHECK(std::abs(lhs[g] - rhs) < 1e-8);
      }
    }
  }

  TEST_CASE("derivative coefficients reconstruct the derivative") {
    std::mt19937_64 rng(25);
    const NeedletFrame frame(2, 2, 3);
    const testing::TrigPoly p = testing::random_trig_poly(rng, 2, 8.0, 6);
    const Eigen::Vector2i order(1, 1);
    const CoefficientArray c = analyze(frame, [&](const Eigen::VectorXd& t) { return p(t); }, MultiIndex{1, 1}, 3,
                                       {.band_limit = p.band_limit()});
    const Eigen::MatrixXd grid = uniform_grid(2, 32);
    const Eigen::VectorXd rec = synthesize(frame, c, grid);
    for (Index g = 0; g < grid.cols(); ++g) CHECK(std::abs(rec[g] - p.derivative(grid.col(g), order)) < 1e-8);
  }

  TEST_CASE("reference and FFT paths agree within 1e-10") {
    std::mt19937_64 rng(26);
    for (int d : {1, 2}) {
      const int jmax = d == 1 ? 5 : 3;
      const NeedletFrame frame(2, d, jmax);
      const testing::TrigPoly p = testing::random_trig_poly(rng, d, std::pow(2.0, jmax + 1), 10);
      auto f = [&](const Eigen::VectorXd& t) { return p(t); };
      const MultiIndex m = d == 1 ? MultiIndex{1} : MultiIndex{1, 0};
      const CoefficientArray ref = analyze(frame, f, m, jmax, {.band_limit = std::nullopt, .path = TransformPath::reference});
      const CoefficientArray fft = analyze(frame, f, m, jmax, {.band_limit = std::nullopt, .path = TransformPath::fft});
      for (int j = 0; j <= jmax; ++j)
        CHECK((ref.level(j) - fft.level(j)).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, ref.level(j).norm()));

      const int G = d == 1 ? 256 : 40;
      const Eigen::MatrixXd grid = uniform_grid(d, G);
      const Eigen::VectorXd s_ref = synthesize(frame, ref, grid, TransformPath::reference);
      const Eigen::VectorXd s_fft = synthesize(frame, ref, grid, TransformPath::fft);
      const Eigen::VectorXd s_uni = synthesize_uniform(frame, ref, G);
      CHECK((s_ref - s_fft).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, s_ref.cwiseAbs().maxCoeff()));
      CHECK((s_ref - s_uni).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, s_ref.cwiseAbs().maxCoeff()));
      // a grid too coarse for the FFT falls back to direct summation
      const Eigen::VectorXd coarse = synthesize_uniform(frame, ref, 7);
      CHECK((coarse - synthesize(frame, ref, uniform_grid(d, 7))).cwiseAbs().maxCoeff() < 1e-10 *
                                                                                          std::max(1.0, coarse.norm()));
    }
  }

  TEST_CASE("analysis and synthesis do not depend on the thread count") {
    const NeedletFrame frame(2, 2, 3);
    std::mt19937_64 rng(27);
    const testing::TrigPoly p = testing::random_trig_poly(rng, 2, 10.0, 6);
    auto f = [&](const Eigen::VectorXd& t) { return p(t); };
    set_thread_count(1);
    const CoefficientArray a1 = analyze(frame, f, MultiIndex{0, 1}, 3);
    const Eigen::VectorXd s1 = synthesize(frame, a1, uniform_grid(2, 20));
    set_thread_count(4);
    const CoefficientArray a4 = analyze(frame, f, MultiIndex{0, 1}, 3);
    const Eigen::VectorXd s4 = synthesize(frame, a4, uniform_grid(2, 20));
    for (int j = 0; j <= 3; ++j) CHECK(a1.level(j) == a4.level(j));
    CHECK(s1 == s4);
    set_thread_count(int(std::max(1u, std::thread::hardware_concurrency())));
  }

  TEST_CASE("Besov sequence norm") {
    const NeedletFrame frame(2, 1, 3);
    CoefficientArray c = CoefficientArray::zeros(frame, 4, MultiIndex{0});
    CHECK(besov_sequence_norm(c, 1, 2, 2, 2, 1) == 0.0);
    c.level(2)[4] = 1.0;  // beta_{2,5} with 1-based k
    CHECK(besov_sequence_norm(c, 1, 2, 2, 2, 1) == doctest::Approx(4.0));
    CHECK(besov_sequence_norm(c, 1, INFINITY, INFINITY, 2, 1) == doctest::Approx(std::pow(2.0, 2 * 1.5)));

    std::mt19937_64 rng(28);
    std::normal_distribution<double> z;
    for (int j = 0; j < 4; ++j)
      for (Index k = 0; k < c.level(j).size(); ++k) c.level(j)[k] = z(rng);
    for (double r : {1.0, 2.0, 3.0, double(INFINITY)})
      for (double q : {1.0, 2.0, double(INFINITY)}) {
        const double base = besov_sequence_norm(c, 0.7, r, q, 2, 1);
        CoefficientArray scaled = c;
        for (int j = 0; j < 4; ++j) scaled.level(j) *= -3.5;
        CHECK(besov_sequence_norm(scaled, 0.7, r, q, 2, 1) == doctest::Approx(3.5 * base).epsilon(1e-12).scale(0));
      }
  }

  TEST_CASE("localization profile") {
    const NeedletFrame frame(2, 1, 5);
    for (int j : {2, 3, 4}) {
      const double center = std::abs(needlet_eval(frame, j, 0, frame.cubature(j).point(0), MultiIndex{0}));
      const LocalizationFit fit = localization_profile(frame, j, 0, MultiIndex{0}, 3);
      CHECK(std::isfinite(fit.constant));
      CHECK(fit.constant >= center / std::pow(2.0, 0.5 * j) - 1e-15);
    }
    std::vector<double> c0, c1;
    for (int j : {2, 3, 4}) {
      c0.push_back(localization_profile(frame, j, 1, MultiIndex{0}, 3).constant);
      c1.push_back(localization_profile(frame, j, 1, MultiIndex{1}, 3).constant);
    }
    CHECK(*std::max_element(c0.begin(), c0.end()) < 2.0 * *std::min_element(c0.begin(), c0.end()));
    for (std::size_t i = 0; i < c0.size(); ++i) {
      CHECK(c1[i] / c0[i] > 0.1);
      CHECK(c1[i] / c0[i] < 10.0);
    }
  }

  TEST_CASE("norm scaling: L^p norms over B^{j(|m| + d(1/2 - 1/p))} stay within a factor 4") {
    for (int d : {1, 2}) {
      const NeedletFrame frame(2, d, 4);
      for (int mo : {0, 1}) {
        MultiIndex m = MultiIndex::zero(d);
        if (mo) m = d == 1 ? MultiIndex{1} : MultiIndex{1, 0};
        for (double p : {1.0, 2.0, 4.0}) {
          std::vector<double> ratios;
          for (int j = 1; j <= 4; ++j) {
            const int G = d == 1 ? 2048 : 4 * frame.cubature(j).points_per_dim;
            const double norm = needlet_lp_norm(frame, j, 0, m, p, G);
            ratios.push_back(norm / std::pow(2.0, j * (m.total() + d * (0.5 - 1.0 / p))));
          }
          const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
          CHECK(*hi / *lo < 4.0);
        }
      }
    }
  }

  // The L2 norm of psi^{(m)} is sqrt(lambda (2pi)^{-d} sum_l b_l^2 |l|^{2m}),
  // about sqrt(2 B^j / N_j) sqrt(I_{2|m|}) B^{j|m|} in d = 1 on the tensor
  // cubature, so the ratio tends to 1/sqrt(B) rather than 1.
  TEST_CASE("L2 norm approximation by sqrt(I_{2|m|}) B^{j|m|} (as stated)" * doctest::may_fail()) {
    const NeedletFrame frame(2, 1, 4);
    for (int j : {3, 4})
      for (int mo : {0, 1}) {
        const double norm = needlet_lp_norm(frame, j, 0, MultiIndex{mo}, 2, 1024);
        CHECK(norm / (std::sqrt(frame.window().moment(2 * mo)) * std::pow(2.0, j * mo)) ==
              doctest::Approx(1.0).epsilon(0.2).scale(0));
      }
  }

  TEST_CASE("L2 norm approximation with the cubature density factor sqrt(2 B^j / N_j)") {
    const NeedletFrame frame(2, 1, 4);
    for (int j : {3, 4})
      for (int mo : {0, 1}) {
        const double norm = needlet_lp_norm(frame, j, 0, MultiIndex{mo}, 2, 1024);
        const double density = std::sqrt(2.0 * std::pow(2.0, j) / frame.cubature(j).points_per_dim);
        CHECK(norm / (density * std::sqrt(frame.window().moment(2 * mo)) * std::pow(2.0, j * mo)) ==
              doctest::Approx(1.0).epsilon(0.2).scale(0));
      }
  }

  TEST_CASE("coefficient CSV round trip") {
    const NeedletFrame frame(2, 1, 3);
    const CoefficientArray c = analyze(frame, [](const Eigen::VectorXd& t) { return std::exp(std::sin(t[0])); },
                                       MultiIndex{1}, 3);
    std::stringstream ss;
    write_coefficients_csv(ss, c);
    const std::string text = ss.str();
    CHECK(text.rfind("j,k,value\n", 0) == 0);
    std::istringstream in(text);
    const CoefficientArray back = read_coefficients_csv(in, MultiIndex{1}, Provenance::exact_quadrature);
    REQUIRE(back.level_count() == 4);
    for (int j = 0; j < 4; ++j) CHECK(back.level(j) == c.level(j));
    CHECK_NOTHROW(back.check_matches(frame));
    std::istringstream bad("j,k,value\n0,1,2.0\n");
    CHECK_THROWS_AS(read_coefficients_csv(bad, MultiIndex{0}, Provenance::empirical), std::invalid_argument);
  }
}
