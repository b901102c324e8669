#pragma once

#include <cstddef>
#include <vector>

namespace spsolve::detail {

//==============================================================================
//! Symmetric positive-definite banded matrix, lower storage:
//! band[k][i] = A(i, i-k), k = 0..bw. LDL^T factorization in place, O(n bw^2).
class BandedSpd {
public:
  BandedSpd(std::size_t n, std::size_t bandwidth)
      : n_(n), bw_(bandwidth), band_(bandwidth + 1, std::vector<double>(n, 0.0)) {}

  std::size_t size() const { return n_; }

  // A(i, j) += value, |i - j| <= bandwidth, symmetric entry stored once.
  void add(std::size_t i, std::size_t j, double value);

  void factorize();
  // Solves A x = b (after factorize).
  void solve(const std::vector<double>& b, std::vector<double>& x) const;

private:
  std::size_t n_, bw_;
  std::vector<std::vector<double>> band_; // after factorize: L (unit diag) and D
  bool factored_ = false;
};

} // namespace spsolve::detail
