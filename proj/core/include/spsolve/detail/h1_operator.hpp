#pragma once

#include "spsolve/detail/banded.hpp"
#include "spsolve/radial_grid.hpp"

namespace spsolve::detail {

// mass_scale * W + stiff_scale * D^T W D as a factored pentadiagonal SPD
// matrix; D is the 3-point derivative stencil of radial_derivative.
BandedSpd assemble_h1_matrix(const RadialGrid& g, double mass_scale,
                             double stiff_scale);

} // namespace spsolve::detail
