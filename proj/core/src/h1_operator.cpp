#include "spsolve/detail/h1_operator.hpp"

namespace spsolve::detail {

BandedSpd assemble_h1_matrix(const RadialGrid& g, double mass_scale,
                             double stiff_scale) {
  const std::size_t n = g.size();
  const auto s = stiffness_coeffs(g);
  BandedSpd M(n, 1);
  for (std::size_t i = 0; i < n; ++i)
    M.add(i, i, mass_scale * g.w[i]);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    M.add(c, c, stiff_scale * s[c]);
    M.add(c + 1, c + 1, stiff_scale * s[c]);
    M.add(c + 1, c, -stiff_scale * s[c]);
  }
  M.add(n - 1, n - 1, stiff_scale * s[n - 1]); // ghost Dirichlet cell
  M.factorize();
  return M;
}

} // namespace spsolve::detail
