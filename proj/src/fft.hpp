#pragma once

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace tneedlet::detail {

/// In-place unnormalized DFT of a d-dimensional cube of side n stored
/// row-major. sign = -1 uses exp(-i ...), sign = +1 uses exp(+i ...).
void fft_inplace(std::vector<std::complex<double>>& data, int n, int d, int sign);

/// Row-major offset of the frequency l reduced modulo n.
inline Eigen::Index wrapped_offset(const Eigen::Ref<const Eigen::VectorXi>& ell, int n) {
  Eigen::Index offset = 0;
  for (Eigen::Index i = 0; i < ell.size(); ++i) offset = offset * n + ((ell[i] % n) + n) % n;
  return offset;
}

}  // namespace tneedlet::detail
