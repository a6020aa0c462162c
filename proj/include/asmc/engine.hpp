#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asmc/kernel.hpp"
#include "asmc/rng.hpp"
#include "asmc/target.hpp"

namespace asmc {

// Annealing schedule 0 = beta_0 < beta_1 < ... < beta_T = 1.
struct Schedule {
  std::vector<double> betas;

  static Schedule uniform(int steps);
  int steps() const { return static_cast<int>(betas.size()) - 1; }
  void validate() const;
};

enum class ResamplePolicy { never, always, adaptive_ess, stabilized };

// Log-domain moments of the weighted increments, indexed 1..T (slot 0 unused):
//   g_i[t] = log sum_n w_{t-1}^n (g_t^n)^i,  i in {0, 1, 2},
// accumulated from the pre-update weights entering step t.
struct IncrementStats {
  std::vector<double> log_g0, log_g1, log_g2;

  int steps() const { return static_cast<int>(log_g0.size()) - 1; }
};

struct RunReport {
  Schedule schedule;
  std::size_t n_particles = 0;
  double log_z_hat = 0.0;
  double elbo_hat = 0.0;
  IncrementStats stats;
  std::vector<int> resample_times;      // strictly increasing, last entry = T
  std::vector<double> ess_trace;        // [0] = N, then per step; empty in streaming mode
  std::vector<double> cum_log_z;        // estimator value after step t, slot 0 = 0
  std::vector<std::uint8_t> resampled;  // ancestor selection performed at step t
  std::uint64_t kernel_applications = 0;
  double wall_seconds = 0.0;
};

struct RunOptions {
  std::size_t n_particles = 1024;
  ResamplePolicy policy = ResamplePolicy::adaptive_ess;
  double rho = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t round = 0;
  int workers = 1;

  void validate() const;
};

// Effective sample size of a log-weight vector, in [1, N].
double ess(std::span<const double> log_weights);

// Ancestor indices via the systematic rule: a single uniform offsets an
// evenly spaced grid over the cumulative normalized weights, so every
// multiplicity is within 1 of N * W^m.
std::vector<std::uint32_t> systematic_resample(std::span<const double> log_weights,
                                               rng::Stream& stream);

// Resampling trigger. `accumulated_dhat` is the discrepancy estimate summed
// since the last resampling event, inclusive of the current step.
bool decide_resample(ResamplePolicy policy, int t, int total_steps, double ess_value,
                     std::size_t n_particles, double accumulated_dhat, double rho);

// One annealed SMC run. Weights live in log-domain throughout; the
// normalizing-constant estimate accumulates logsumexp(log w) - log N at every
// resampling event, with step T always finalizing the estimator (under
// policy `never` the final event updates the estimate without selecting
// ancestors).
RunReport run_smc(const AnnealedTarget& target, const Kernel& kernel,
                  const Schedule& schedule, const RunOptions& options);

}  // namespace asmc
