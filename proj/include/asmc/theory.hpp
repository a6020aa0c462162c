#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

namespace asmc::theory {

// Relative variance of the normalizing-constant estimator under the
// independence model:
//   var[Z_hat / Z] = (1 + (exp(D/R) - 1) / N)^R - 1.
// Evaluated via log1p/expm1 so D up to ~700 * R stays finite.
double rel_variance(double d_total, double r_eff, double n_particles);

// log(1 + rel_variance); never overflows for d_total <= 700 * r_eff.
double log1p_rel_variance(double d_total, double r_eff, double n_particles);

// Inverts rel_variance in R for fixed (D, N). The observed value must lie
// between the R -> infinity limit exp(D/N) - 1 and the R = 1 value
// (exp(D) - 1) / N; bisection to residual <= 1e-9 in log1p domain.
double solve_r_eff(double d_total, double n_particles, double observed_rel_var);

struct ParticleBounds {
  double n_min = 0.0;
  double n_max = 0.0;
};

// Particle counts keeping the relative variance near eps at round
// (R_eff, T) for barrier Lambda and heterogeneity kappa = sup delta / inf delta:
//   n_min = (R/eps)         * (exp(Lambda^2 / (kappa R T)) - 1)
//   n_max = (R/log(1+eps))  * (exp(kappa Lambda^2 / (R T)) - 1)
ParticleBounds particle_bounds(double lambda, double kappa, double r_eff, double t_steps,
                               double eps);

enum class Regime { coarse, stable, dense };

// Scaling regime for R ~ T^{alpha_r}, T ~ (free-energy)^{alpha_t} growth:
// coarse when alpha_r + alpha_t < 2, dense when alpha_t > 2, stable between.
Regime classify_regime(double alpha_r, double alpha_t);

std::string regime_name(Regime regime);

struct REffBounds {
  double lower = 1.0;
  double upper = 1.0;
};

// Effective resampling size reachable by the stabilized trigger with
// threshold -log(rho):
//   lower = max(1, Lambda^2 T / (kappa^2 Lambda^2 + kappa (-log rho) T^2))
//   upper = min(T, 1 + kappa Lambda^2 / ((-log rho) T))
// rho = 0 collapses to (1, 1); rho = 1 gives (max(1, T / kappa^2), T).
REffBounds stabilized_r_eff_bounds(double lambda, double kappa, double t_steps, double rho);

// Table of rel_variance over a (D, N, R_eff) grid plus the regime grid.
void print_theory_table(std::ostream& out);

}  // namespace asmc::theory
