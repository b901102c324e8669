#include "spsolve/detail/banded.hpp"

#include <cmath>
#include <stdexcept>

namespace spsolve::detail {

void BandedSpd::add(std::size_t i, std::size_t j, double value) {
  if (j > i)
    std::swap(i, j);
  const std::size_t k = i - j;
  if (k > bw_ || i >= n_)
    throw std::out_of_range("BandedSpd::add: entry outside band");
  band_[k][i] += value;
}

void BandedSpd::factorize() {
  // Row-wise LDL^T restricted to the band.
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = (i >= bw_) ? i - bw_ : 0;
    for (std::size_t j = j0; j < i; ++j) {
      double s = band_[i - j][i];
      const std::size_t k0 = (j >= bw_) ? j - bw_ : 0;
      for (std::size_t k = std::max(j0, k0); k < j; ++k)
        s -= band_[i - k][i] * band_[j - k][j] * band_[0][k];
      band_[i - j][i] = s / band_[0][j];
    }
    double d = band_[0][i];
    for (std::size_t k = j0; k < i; ++k)
      d -= band_[i - k][i] * band_[i - k][i] * band_[0][k];
    if (!(d > 0.0))
      throw std::runtime_error("BandedSpd::factorize: matrix not positive definite");
    band_[0][i] = d;
  }
  factored_ = true;
}

void BandedSpd::solve(const std::vector<double>& b, std::vector<double>& x) const {
  if (!factored_)
    throw std::runtime_error("BandedSpd::solve: factorize first");
  if (b.size() != n_)
    throw std::invalid_argument("BandedSpd::solve: size mismatch");
  x = b;
  // L y = b
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = (i >= bw_) ? i - bw_ : 0;
    for (std::size_t j = j0; j < i; ++j)
      x[i] -= band_[i - j][i] * x[j];
  }
  // D z = y
  for (std::size_t i = 0; i < n_; ++i)
    x[i] /= band_[0][i];
  // L^T x = z
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t jmax = std::min(n_ - 1, i + bw_);
    for (std::size_t j = i + 1; j <= jmax; ++j)
      x[i] -= band_[j - i][j] * x[j];
  }
}

} // namespace spsolve::detail
