#include "asmc/theory.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace asmc::theory {

namespace {

void check_common(double d_total, double n_particles) {
  if (!(d_total >= 0.0) || !std::isfinite(d_total)) {
    throw std::invalid_argument("theory: d_total must be finite and >= 0");
  }
  if (!(n_particles >= 1.0) || !std::isfinite(n_particles)) {
    throw std::invalid_argument("theory: n_particles must be finite and >= 1");
  }
}

}  // namespace

double log1p_rel_variance(double d_total, double r_eff, double n_particles) {
  check_common(d_total, n_particles);
  if (!(r_eff >= 1.0) || !std::isfinite(r_eff)) {
    throw std::invalid_argument("theory: r_eff must be finite and >= 1");
  }
  // r * log(1 + (exp(d/r) - 1) / n)
  return r_eff * std::log1p(std::expm1(d_total / r_eff) / n_particles);
}

double rel_variance(double d_total, double r_eff, double n_particles) {
  return std::expm1(log1p_rel_variance(d_total, r_eff, n_particles));
}

double solve_r_eff(double d_total, double n_particles, double observed_rel_var) {
  check_common(d_total, n_particles);
  if (!(observed_rel_var > 0.0) || !std::isfinite(observed_rel_var)) {
    throw std::invalid_argument("theory: observed_rel_var must be finite and > 0");
  }
  if (d_total == 0.0) {
    throw std::invalid_argument("theory: r_eff is unidentified at d_total = 0");
  }

  const double target = std::log1p(observed_rel_var);
  // log1p_rel_variance is strictly decreasing in r_eff, from (exp(D)-1)/N at
  // r = 1 down to exp(D/N) - 1 as r -> infinity.
  const double limit_inf = d_total / n_particles;  // log1p of the r -> inf limit
  const double at_one = std::log1p(std::expm1(d_total) / n_particles);
  const double slack = 1e-12 * std::max(1.0, std::abs(target));
  if (target > at_one + slack || target < limit_inf - slack) {
    throw std::domain_error("theory: observed_rel_var outside the attainable range");
  }
  if (target >= at_one) return 1.0;

  double lo = 1.0;
  double hi = 2.0;
  while (log1p_rel_variance(d_total, hi, n_particles) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e18) return hi;  // target indistinguishable from the limit
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double val = log1p_rel_variance(d_total, mid, n_particles);
    if (val > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-12 * hi) break;
  }
  const double r = 0.5 * (lo + hi);
  if (std::abs(log1p_rel_variance(d_total, r, n_particles) - target) >
      1e-9 * std::max(1.0, std::abs(target))) {
    throw std::runtime_error("theory: r_eff bisection failed to converge");
  }
  return r;
}

ParticleBounds particle_bounds(double lambda, double kappa, double r_eff, double t_steps,
                               double eps) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("theory: lambda must be finite and >= 0");
  }
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("theory: kappa must be finite and >= 1");
  }
  if (!(r_eff >= 1.0) || !(t_steps >= 1.0)) {
    throw std::invalid_argument("theory: r_eff and t_steps must be >= 1");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("theory: eps must be finite and > 0");
  }
  const double l2 = lambda * lambda;
  ParticleBounds b;
  b.n_min = (r_eff / eps) * std::expm1(l2 / (kappa * r_eff * t_steps));
  b.n_max = (r_eff / std::log1p(eps)) * std::expm1(kappa * l2 / (r_eff * t_steps));
  return b;
}

Regime classify_regime(double alpha_r, double alpha_t) {
  if (!std::isfinite(alpha_r) || !std::isfinite(alpha_t)) {
    throw std::invalid_argument("theory: regime exponents must be finite");
  }
  if (alpha_t > 2.0) return Regime::dense;
  if (alpha_r + alpha_t >= 2.0) return Regime::stable;
  return Regime::coarse;
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::coarse: return "coarse";
    case Regime::stable: return "stable";
    case Regime::dense: return "dense";
  }
  return "unknown";
}

REffBounds stabilized_r_eff_bounds(double lambda, double kappa, double t_steps, double rho) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("theory: lambda must be finite and >= 0");
  }
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("theory: kappa must be finite and >= 1");
  }
  if (!(t_steps >= 1.0) || !std::isfinite(t_steps)) {
    throw std::invalid_argument("theory: t_steps must be finite and >= 1");
  }
  if (!(rho >= 0.0) || !(rho <= 1.0)) {
    throw std::invalid_argument("theory: rho must lie in [0, 1]");
  }

  REffBounds b;
  const double l2 = lambda * lambda;
  if (rho == 0.0) {
    // Threshold -log(rho) is infinite: only the forced final update fires.
    b.lower = 1.0;
    b.upper = 1.0;
    return b;
  }
  const double x = -std::log(rho);  // x = 0 when rho = 1
  if (l2 == 0.0) {
    b.lower = 1.0;
    b.upper = x == 0.0 ? t_steps : 1.0;
    return b;
  }
  b.lower = std::max(1.0, l2 * t_steps / (kappa * kappa * l2 + kappa * x * t_steps * t_steps));
  if (x == 0.0) {
    b.upper = t_steps;
  } else {
    b.upper = std::min(t_steps, 1.0 + kappa * l2 / (x * t_steps));
  }
  return b;
}

void print_theory_table(std::ostream& out) {
  out << "relative variance of Z_hat/Z: (1 + (exp(D/R)-1)/N)^R - 1\n";
  out << std::left << std::setw(10) << "D" << std::setw(10) << "N" << std::setw(10) << "R_eff"
      << "rel_var\n";
  const double ds[] = {1.0, 4.0, 16.0};
  const double ns[] = {64.0, 1024.0};
  const double rs[] = {1.0, 4.0, 16.0};
  out << std::setprecision(6);
  for (double d : ds) {
    for (double n : ns) {
      for (double r : rs) {
        out << std::left << std::setw(10) << d << std::setw(10) << n << std::setw(10) << r
            << rel_variance(d, r, n) << "\n";
      }
    }
  }
  out << "\nscaling regimes for R ~ T^a_R, T ~ Lambda^(2/a_T):\n";
  out << std::left << std::setw(10) << "a_R" << std::setw(10) << "a_T" << "regime\n";
  const double pairs[][2] = {{0.0, 1.0}, {1.0, 1.0}, {0.5, 1.0}, {0.0, 2.0}, {1.0, 2.5}};
  for (const auto& p : pairs) {
    out << std::left << std::setw(10) << p[0] << std::setw(10) << p[1]
        << regime_name(classify_regime(p[0], p[1])) << "\n";
  }
}

}  // namespace asmc::theory
