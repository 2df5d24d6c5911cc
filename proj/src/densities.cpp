#include "tneedlet/densities.hpp"

#include <boost/math/tools/minima.hpp>

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace tneedlet {

namespace {

class UniformFactor final : public CircularFactor {
 public:
  std::string name() const override { return "uniform"; }
  double pdf(double) const override { return 1.0 / two_pi<double>; }
  double derivative(double theta, int order) const override { return order == 0 ? pdf(theta) : 0.0; }
  int max_order() const override { return 16; }
  double sup_norm() const override { return 1.0 / two_pi<double>; }
  double sample(Rng& rng) const override { return two_pi<double> * uniform01(rng); }
};

class WrappedNormalFactor final : public CircularFactor {
 public:
  WrappedNormalFactor(double sigma, int terms, WrappedNormalNormalization normalization)
      : sigma_(sigma), terms_(terms), normalization_(normalization) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("wrapped_normal: sigma must be > 0, got " + std::to_string(sigma));
    if (terms < 1) throw std::invalid_argument("wrapped_normal: terms must be >= 1");
    prefactor_ = normalization == WrappedNormalNormalization::literal
                     ? 1.0 / two_pi<double>
                     : 1.0 / (sigma * std::sqrt(two_pi<double>));
    sup_ = locate_maximum();
  }

  std::string name() const override {
    std::ostringstream s;
    s << "wrapped_normal(" << sigma_;
    if (normalization_ == WrappedNormalNormalization::literal) s << ",literal";
    s << ')';
    return s.str();
  }

  double pdf(double theta) const override { return derivative(theta, 0); }

  // d^r/dx^r exp(-x^2/(2 s^2)) = (-1/s)^r He_r(x/s) exp(-x^2/(2 s^2))
  double derivative(double theta, int order) const override {
    if (order < 0 || order > max_order())
      throw std::invalid_argument("wrapped_normal: derivative order " + std::to_string(order) + " not supported");
    const double t = wrap_angle(theta);
    double acc = 0;
    for (int k = -terms_; k <= terms_; ++k) {
      const double z = (t + two_pi<double> * k) / sigma_;
      double he_prev = 1.0, he = z;
      if (order == 0) he = 1.0;
      for (int r = 1; r < order; ++r) {
        const double next = z * he - r * he_prev;
        he_prev = he;
        he = next;
      }
      acc += he * std::exp(-0.5 * z * z);
    }
    const double sign_scale = std::pow(-1.0 / sigma_, order);
    return prefactor_ * sign_scale * acc;
  }

  int max_order() const override { return 8; }
  double sup_norm() const override { return sup_; }
  double sample(Rng& rng) const override { return wrap_angle(sigma_ * standard_normal(rng)); }

 private:
  // Dense scan followed by Brent refinement around the best grid point.
  double locate_maximum() const {
    constexpr int kScan = 4096;
    int best = 0;
    double best_value = -1;
    for (int i = 0; i < kScan; ++i) {
      const double v = pdf(two_pi<double> * i / kScan);
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    const double step = two_pi<double> / kScan;
    const double centre = two_pi<double> * best / kScan;
    auto negated = [&](double x) { return -pdf(x); };
    const auto [arg, value] = boost::math::tools::brent_find_minima(negated, centre - step, centre + step, 50);
    (void)arg;
    return std::max(best_value, -value);
  }

  double sigma_;
  int terms_;
  WrappedNormalNormalization normalization_;
  double prefactor_ = 0;
  double sup_ = 0;
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Splits "a,b(c,d),e" at top-level commas.
std::vector<std::string> split_arguments(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string current;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(trim(current));
  return parts;
}

TestDensity parse_density(const std::string& raw, int d) {
  const std::string descriptor = trim(raw);
  if (descriptor == "uniform") return uniform_density(d);

  const auto open = descriptor.find('(');
  if (open == std::string::npos || descriptor.back() != ')')
    throw std::invalid_argument("unknown density `" + descriptor + "`");
  const std::string head = trim(descriptor.substr(0, open));
  const auto args = split_arguments(descriptor.substr(open + 1, descriptor.size() - open - 2));

  if (head == "wrapped_normal") {
    if (args.empty() || args.size() > 2 || (args.size() == 2 && args[1] != "literal"))
      throw std::invalid_argument("wrapped_normal expects (sigma) or (sigma,literal), got `" + descriptor + "`");
    std::size_t used = 0;
    double sigma = 0;
    try {
      sigma = std::stod(args[0], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != args[0].size()) throw std::invalid_argument("wrapped_normal: sigma `" + args[0] + "` is not a number");
    return wrapped_normal(sigma, 10,
                          args.size() == 2 ? WrappedNormalNormalization::literal
                                           : WrappedNormalNormalization::unit_mass);
  }
  if (head == "product") {
    std::vector<TestDensity> components;
    for (const auto& a : args) components.push_back(parse_density(a, 1));
    return product_density(components);
  }
  throw std::invalid_argument("unknown density `" + descriptor + "`");
}

}  // namespace

TestDensity::TestDensity(std::string name, std::vector<std::shared_ptr<const CircularFactor>> factors)
    : name_(std::move(name)), factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("TestDensity: needs at least one factor");
  max_order_ = factors_.front()->max_order();
  for (const auto& f : factors_) {
    sup_norm_ *= f->sup_norm();
    max_order_ = std::min(max_order_, f->max_order());
  }
}

double TestDensity::pdf(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  detail::require_same_dimension(theta.size(), dimension(), "TestDensity::pdf");
  double v = 1;
  for (std::size_t i = 0; i < factors_.size(); ++i) v *= factors_[i]->pdf(theta[Index(i)]);
  return v;
}

double TestDensity::derivative(const Eigen::Ref<const Eigen::VectorXd>& theta, const MultiIndex& m) const {
  detail::require_same_dimension(theta.size(), dimension(), "TestDensity::derivative");
  detail::require_same_dimension(m.dimension(), dimension(), "TestDensity::derivative");
  double v = 1;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int order = m[Index(i)];
    if (order > factors_[i]->max_order())
      throw std::invalid_argument(name_ + ": derivative order " + std::to_string(order) + " exceeds the supported " +
                                  std::to_string(factors_[i]->max_order()));
    v *= factors_[i]->derivative(theta[Index(i)], order);
  }
  return v;
}

Eigen::MatrixXd TestDensity::sample(Rng& rng, Index n) const {
  Eigen::MatrixXd out(dimension(), n);
  for (Index s = 0; s < n; ++s)
    for (int c = 0; c < dimension(); ++c) out(c, s) = factors_[std::size_t(c)]->sample(rng);
  return out;
}

TestDensity uniform_density(int d) {
  if (d < 1) throw std::invalid_argument("uniform_density: d must be >= 1");
  auto factor = std::make_shared<const UniformFactor>();
  return TestDensity("uniform", std::vector<std::shared_ptr<const CircularFactor>>(std::size_t(d), factor));
}

TestDensity wrapped_normal(double sigma, int terms, WrappedNormalNormalization normalization) {
  auto factor = std::make_shared<const WrappedNormalFactor>(sigma, terms, normalization);
  return TestDensity(factor->name(), {factor});
}

TestDensity product_density(const std::vector<TestDensity>& components) {
  if (components.empty()) throw std::invalid_argument("product_density: empty component list");
  std::vector<std::shared_ptr<const CircularFactor>> factors;
  std::string name = "product(";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].dimension() != 1)
      throw std::invalid_argument("product_density: components must be one-dimensional");
    factors.push_back(components[i].factors().front());
    name += (i ? "," : "") + components[i].name();
  }
  return TestDensity(name + ")", std::move(factors));
}

TestDensity make_density(const std::string& descriptor, int d) {
  TestDensity density = parse_density(descriptor, d);
  if (density.dimension() != d)
    throw std::invalid_argument("density `" + descriptor + "` has dimension " + std::to_string(density.dimension()) +
                                ", expected " + std::to_string(d));
  return density;
}

}  // namespace tneedlet
