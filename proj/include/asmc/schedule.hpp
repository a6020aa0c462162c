#pragma once

#include <span>
#include <vector>

#include "asmc/engine.hpp"

namespace asmc {

// Discrepancy estimate for step t, from the weighted increment moments:
//   D_hat_t = log g2 - 2 log g1 + log g0, clamped below at 0.
// (Weighted Cauchy-Schwarz makes the raw value non-negative up to rounding.)
double discrepancy_hat(const IncrementStats& stats, int t);

// Conditional ESS for step t: N * g1^2 / (g2 * g0), in [1, N].
double cess(const IncrementStats& stats, int t, std::size_t n_particles);

// Cumulative square-root discrepancy knots Lambda_hat_t over a schedule.
struct BarrierEstimate {
  std::vector<double> lambda;  // lambda[0] = 0, nondecreasing
  std::vector<double> beta;    // matching schedule knots

  double total() const { return lambda.empty() ? 0.0 : lambda.back(); }
};

BarrierEstimate barrier_estimate(const IncrementStats& stats, const Schedule& schedule);

// Shape-preserving cubic interpolant through strictly increasing abscissae.
// Slopes follow the Fritsch-Carlson monotonicity region (weighted harmonic
// mean of adjacent secants), so monotone data yield a monotone curve.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double eval(double q) const;
  double derivative(double q) const;

 private:
  std::vector<double> x_, y_, m_;
};

// New schedule with T_new steps placing equal estimated barrier mass per
// step: beta*_t = inverse-Lambda(total * t / T_new), endpoints pinned to
// exactly 0 and 1. Duplicate-Lambda knots are merged keeping the largest
// beta; a zero total barrier yields the uniform schedule.
Schedule generate_schedule(const BarrierEstimate& estimate, int t_new);

// Local barrier lambda_hat(beta) at each knot: derivative of the fitted
// monotone cubic of Lambda_hat as a function of beta.
std::vector<double> local_barrier(const BarrierEstimate& estimate);

struct ZjaResult {
  double beta_next = 1.0;
  // Set when the one-step discrepancy was found non-monotone in beta_next;
  // the smallest bracketing root is returned in that case.
  bool warning = false;
};

// Largest beta2 in (beta, 1] whose one-step discrepancy estimate, computed
// by re-weighting the current particles (no kernel applications), stays at
// or below delta_star. Bisection to tolerance `tol`.
ZjaResult zja_next_beta(const AnnealedTarget& target, double beta,
                        std::span<const double> positions, std::size_t n_particles,
                        std::span<const double> log_weights, double delta_star,
                        double tol = 1e-10);

}  // namespace asmc
