#include "spsolve/params.hpp"

#include <algorithm>
#include <stdexcept>

namespace spsolve {

bool nu_admissible(int dim, double q, double nu, double kbar) {
  if (!(q > 2.0))
    return false;
  const double base = std::max(dim / 2.0, 2.0 / (q - 1.0));
  if (!(nu > base))
    return false;
  const double lo = (nu * (3.0 - q) - 2.0) / 2.0;
  const double hi = (4.0 * nu - dim - 2.0) / 2.0;
  return kbar > lo && kbar < hi;
}

double default_nu(int dim, double q, double kbar) {
  if (!(q > 2.0))
    throw std::invalid_argument("default_nu: requires q > 2");
  double nu = std::max(dim / 2.0, 2.0 / (q - 1.0)) + 0.5;
  for (int tries = 0; tries < 512; ++tries) {
    if (nu_admissible(dim, q, nu, kbar))
      return nu;
    const double lo = (nu * (3.0 - q) - 2.0) / 2.0;
    if (q < 3.0 && kbar <= lo)
      break; // lower interval ends have passed kbar: no admissible nu exists
    nu += 0.5;
  }
  throw std::invalid_argument(
      "default_nu: no admissible nu for this (dim, q, kbar) — kbar is below "
      "the (max{N/4, 1/(q-1)}(3-q) - 1)_+ threshold");
}

} // namespace spsolve
