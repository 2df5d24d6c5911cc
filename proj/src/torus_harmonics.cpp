#include "tneedlet/torus_harmonics.hpp"

#include <string>

namespace tneedlet {

namespace {

void validate_shell_arguments(int j, double B, int d) {
  if (d < 1) throw std::invalid_argument("frequency_shell: dimension d must be >= 1, got " + std::to_string(d));
  if (!(B > 1.0)) throw std::invalid_argument("frequency_shell: scale must satisfy B > 1, got " + std::to_string(B));
  if (j < 0) throw std::invalid_argument("frequency_shell: level must be >= 0, got " + std::to_string(j));
}

// Calls visit(ell) for every ell in the open shell, lexicographically.
template <typename Visitor>
void for_each_in_shell(int j, double B, int d, Visitor&& visit) {
  validate_shell_arguments(j, B, d);
  const double lo = std::pow(B, j - 1);
  const double hi = std::pow(B, j + 1);
  const double lo2 = lo * lo;
  const double hi2 = hi * hi;
  // |l_i| < hi for every member
  const int reach = static_cast<int>(std::ceil(hi)) - 1;

  Eigen::VectorXi ell = Eigen::VectorXi::Constant(d, -reach);
  while (true) {
    const double n2 = static_cast<double>(ell.cast<long long>().squaredNorm());
    if (n2 > lo2 && n2 < hi2) visit(ell);
    Index i = d - 1;
    while (i >= 0 && ell[i] == reach) {
      ell[i] = -reach;
      --i;
    }
    if (i < 0) break;
    ++ell[i];
  }
}

}  // namespace

std::vector<FrequencyVector> frequency_shell(int j, double B, int d) {
  std::vector<FrequencyVector> shell;
  for_each_in_shell(j, B, d, [&](const Eigen::VectorXi& ell) { shell.emplace_back(ell); });
  return shell;
}

Eigen::MatrixXi frequency_shell_matrix(int j, double B, int d) {
  std::vector<Eigen::VectorXi> columns;
  for_each_in_shell(j, B, d, [&](const Eigen::VectorXi& ell) { columns.push_back(ell); });
  Eigen::MatrixXi out(d, Index(columns.size()));
  for (Index c = 0; c < out.cols(); ++c) out.col(c) = columns[std::size_t(c)];
  return out;
}

}  // namespace tneedlet
