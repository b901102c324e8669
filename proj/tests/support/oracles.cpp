#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

double signed_pow(double u, double q) {
  if (u == 0.0)
    return 0.0;
  return std::pow(std::abs(u), q - 1.0) * u;
}

struct Trajectory {
  int zeros = 0;
  std::vector<double> r, u, du;
};

// RK4 march from a series start at r0; stops on blowup (|u| > 3 alpha).
Trajectory march(int dim, double q, double alpha, double h, double r_end) {
  Trajectory t;
  const double r0 = 1e-6;
  // u ~ alpha + (alpha - |alpha|^{q-1} alpha) r^2 / (2N) near the origin
  const double c2 = (alpha - signed_pow(alpha, q)) / (2.0 * dim);
  double r = r0, y = alpha + c2 * r0 * r0, v = 2.0 * c2 * r0;
  const double cap = 3.0 * std::abs(alpha) + 1.0;

  auto f = [&](double rr, double yy, double vv, double& dy, double& dv) {
    dy = vv;
    dv = -(dim - 1) / rr * vv + yy - signed_pow(yy, q);
  };

  t.r.push_back(r);
  t.u.push_back(y);
  t.du.push_back(v);
  double prev_sign = y > 0 ? 1.0 : -1.0;
  while (r < r_end) {
    double k1y, k1v, k2y, k2v, k3y, k3v, k4y, k4v;
    f(r, y, v, k1y, k1v);
    f(r + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v, k2y, k2v);
    f(r + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v, k3y, k3v);
    f(r + h, y + h * k3y, v + h * k3v, k4y, k4v);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    r += h;
    t.r.push_back(r);
    t.u.push_back(y);
    t.du.push_back(v);
    if (y != 0.0) {
      const double s = y > 0 ? 1.0 : -1.0;
      if (s != prev_sign)
        ++t.zeros;
      prev_sign = s;
    }
    if (std::abs(y) > cap)
      break;
  }
  return t;
}

double sphere_area(int dim) {
  switch (dim) {
  case 3: return 4.0 * M_PI;
  case 4: return 2.0 * M_PI * M_PI;
  case 5: return 8.0 * M_PI * M_PI / 3.0;
  }
  throw std::invalid_argument("oracles: dim must be 3, 4 or 5");
}

} // namespace

ShootingState shoot_state(int dim, double q, int k, double alpha_lo,
                          double alpha_hi, double step, double r_end) {
  auto count = [&](double a) { return march(dim, q, a, step, r_end).zeros; };
  int lo_count = count(alpha_lo);
  int hi_count = count(alpha_hi);
  if (!(lo_count <= k && hi_count > k))
    throw std::invalid_argument("shoot_state: bracket does not straddle the "
                                "k -> k+1 node-count transition");

  double lo = alpha_lo, hi = alpha_hi;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) <= k ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);

  Trajectory t = march(dim, q, alpha, step, r_end);
  // The amplified shooting error eventually blows the tail up; walk back from
  // the end to the onset of that growth (the |u| minimum nearest the end) and
  // truncate there. Interior zeros are untouched: they sit left of the last
  // sign change, where |u| rises again for genuine reasons.
  std::size_t cut = t.u.size() - 1;
  while (cut > 0 && std::abs(t.u[cut - 1]) < std::abs(t.u[cut]))
    --cut;
  t.r.resize(cut + 1);
  t.u.resize(cut + 1);
  t.du.resize(cut + 1);

  // I_0 = int (1/2 (u'^2 + u^2) - |u|^{q+1}/(q+1)) dV by trapezoid on the
  // fine RK4 mesh, plus A and P for the Nehari self-check.
  const double area = sphere_area(dim);
  double I = 0.0, A = 0.0, P = 0.0;
  for (std::size_t i = 0; i + 1 < t.r.size(); ++i) {
    auto dens = [&](std::size_t j, int what) {
      const double rm = std::pow(t.r[j], dim - 1);
      const double g2 = t.du[j] * t.du[j] + t.u[j] * t.u[j];
      const double pw = std::pow(std::abs(t.u[j]), q + 1.0);
      if (what == 0)
        return (0.5 * g2 - pw / (q + 1.0)) * rm;
      if (what == 1)
        return g2 * rm;
      return pw * rm;
    };
    const double h = t.r[i + 1] - t.r[i];
    I += 0.5 * h * (dens(i, 0) + dens(i + 1, 0));
    A += 0.5 * h * (dens(i, 1) + dens(i + 1, 1));
    P += 0.5 * h * (dens(i, 2) + dens(i + 1, 2));
  }
  ShootingState out;
  out.alpha = alpha;
  out.level = area * I;
  out.nehari_defect = std::abs(A - P) / std::max(1e-300, A);
  out.r = std::move(t.r);
  out.u = std::move(t.u);
  return out;
}

FiberScan fiber_scan(const double coeff[4], const double expo[4], double t_lo,
                     double t_hi, std::size_t samples) {
  auto dfdt = [&](double t) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
      acc += coeff[i] * expo[i] * std::pow(t, expo[i] - 1.0);
    return acc - coeff[3] * expo[3] * std::pow(t, expo[3] - 1.0);
  };

  FiberScan out;
  const double lr = std::log(t_lo), dr = (std::log(t_hi) - lr) / double(samples - 1);
  double prev_t = t_lo, prev = dfdt(t_lo);
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 1; i < samples; ++i) {
    const double t = std::exp(lr + dr * double(i));
    const double d = dfdt(t);
    if ((prev > 0.0) != (d > 0.0)) {
      ++out.sign_changes;
      lo = prev_t;
      hi = t;
    }
    prev = d;
    prev_t = t;
  }
  if (out.sign_changes >= 1) {
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (dfdt(mid) > 0.0 ? lo : hi) = mid;
    }
    out.argmax = 0.5 * (lo + hi);
  }
  return out;
}

} // namespace oracles
