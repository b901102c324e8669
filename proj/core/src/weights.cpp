#include "spsolve/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spsolve {

double WeightModel::operator()(double r) const { return eval_weight(*this, r); }

double eval_weight(const WeightModel& model, double r) {
  if (r < 0.0)
    throw std::invalid_argument("eval_weight: r must be nonnegative");
  switch (model.kind) {
  case WeightKind::constant:
    return model.c;
  case WeightKind::homogeneous:
    return model.amplitude * std::pow(r, model.kbar);
  case WeightKind::coercive:
    return model.offset + model.amplitude * std::pow(r, model.power);
  case WeightKind::vanishing_ball: {
    const double ramp = r - model.r0;
    if (ramp <= 0.0)
      return 0.0;
    return model.rho_inf * std::min(1.0, ramp);
  }
  }
  return 0.0;
}

std::optional<double> WeightModel::homogeneity_degree() const {
  if (kind == WeightKind::constant)
    return 0.0;
  if (kind == WeightKind::homogeneous)
    return kbar;
  if (kind == WeightKind::coercive && offset == 0.0)
    return power;
  return std::nullopt;
}

WeightModel WeightModel::make_constant(double c) {
  WeightModel m;
  m.kind = WeightKind::constant;
  m.c = c;
  return m;
}

WeightModel WeightModel::make_homogeneous(double kbar, double amplitude) {
  if (!(kbar > 0.0) || !(amplitude > 0.0))
    throw std::invalid_argument("homogeneous weight needs kbar > 0, amplitude > 0");
  WeightModel m;
  m.kind = WeightKind::homogeneous;
  m.kbar = kbar;
  m.amplitude = amplitude;
  return m;
}

WeightModel WeightModel::make_coercive(double amplitude, double power,
                                       double offset) {
  if (!(amplitude > 0.0) || !(power > 0.0) || offset < 0.0)
    throw std::invalid_argument("coercive weight needs amplitude, power > 0, offset >= 0");
  WeightModel m;
  m.kind = WeightKind::coercive;
  m.amplitude = amplitude;
  m.power = power;
  m.offset = offset;
  return m;
}

WeightModel WeightModel::make_vanishing_ball(double r0, double rho_inf,
                                             std::optional<double> mbar) {
  if (!(r0 > 0.0) || !(rho_inf > 0.0))
    throw std::invalid_argument("vanishing_ball weight needs r0, rho_inf > 0");
  WeightModel m;
  m.kind = WeightKind::vanishing_ball;
  m.r0 = r0;
  m.rho_inf = rho_inf;
  m.mbar = mbar;
  return m;
}

//==============================================================================
WeightClassReport verify_weight_class(const WeightModel& model,
                                      const RadialGrid& grid) {
  const std::size_t n = grid.size();
  if (n == 0)
    throw std::invalid_argument("verify_weight_class: empty grid");

  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i)
    rho[i] = eval_weight(model, grid.r[i]);

  WeightClassReport rep;

  // (rho1): zero set with interior, and {rho <= mbar} bounded inside the grid.
  double zero_len = 0.0;
  for (std::size_t i = 0; i < n && rho[i] == 0.0; ++i)
    zero_len = grid.r[i];
  const double mbar = model.mbar.value_or(
      model.kind == WeightKind::vanishing_ball ? 0.5 * model.rho_inf : 1.0);
  bool above_mbar_tail = rho[n - 1] > mbar;
  for (std::size_t i = n - 1; i + 1 >= n / 2 && i > 0; --i)
    above_mbar_tail = above_mbar_tail && rho[i] > mbar;
  rep.satisfies_rho1 = zero_len > 0.0 && above_mbar_tail;

  // (rho2): for each tested M the sublevel set stays strictly inside r_max.
  // M values are quantiles of the sampled range, so a flat model (constant,
  // saturated vanishing ramp) is probed at a level its sublevel cannot escape.
  rep.satisfies_rho2 = true;
  std::vector<double> sorted = rho;
  std::sort(sorted.begin(), sorted.end());
  for (double quantile : {0.25, 0.5, 0.75}) {
    const double M = sorted[std::size_t(quantile * double(n - 1))];
    if (!(M > 0.0)) {
      rep.satisfies_rho2 = false;
      break;
    }
    std::size_t last_below = 0;
    bool any_below = false;
    for (std::size_t i = 0; i < n; ++i)
      if (rho[i] <= M) {
        last_below = i;
        any_below = true;
      }
    if (any_below && last_below + n / 8 >= n)
      rep.satisfies_rho2 = false; // sublevel reaches the truncation: unbounded
  }

  // Homogeneity residual over a (t, r) sample.
  const auto deg = model.homogeneity_degree();
  if (!deg) {
    rep.homogeneity_residual = std::numeric_limits<double>::infinity();
  } else {
    double worst = 0.0;
    for (double t : {0.25, 0.5, 2.0, 3.0}) {
      for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, n / 64)) {
        const double r = grid.r[i];
        if (t * r > grid.r_max)
          continue;
        const double lhs = eval_weight(model, t * r);
        const double rhs = std::pow(t, *deg) * rho[i];
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    }
    rep.homogeneity_residual = worst;
  }
  return rep;
}

} // namespace spsolve
