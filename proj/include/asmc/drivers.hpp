#pragma once

#include <cstdint>
#include <vector>

#include "asmc/engine.hpp"
#include "asmc/logsum.hpp"
#include "asmc/schedule.hpp"

namespace asmc {

enum class DriverMode { ssmc, sais };

struct BudgetPlan {
  std::size_t n_particles = 1;
  int steps = 1;
};

// Round-to-round growth: (ceil(sqrt2 N), ceil(sqrt2 T)) while the grown
// particle storage estimate N*dim*8 bytes stays within the cap, afterwards
// (N, 2T). Streaming (sais) mode never caps N on memory grounds.
BudgetPlan budget(std::size_t n_particles, int steps, std::size_t dim,
                  std::uint64_t memory_cap_bytes, DriverMode mode);

struct DriverOptions {
  std::size_t n_particles = 1024;  // round-1 particle count
  int rounds = 1;
  ResamplePolicy policy = ResamplePolicy::adaptive_ess;
  double rho = 0.5;
  std::uint64_t seed = 0;
  int workers = 1;
  std::uint64_t memory_cap_bytes = std::uint64_t{4096} << 20;
  std::size_t chunk = 0;  // streaming chunk in particles; 0 -> workers * 8

  void validate() const;
};

struct RoundResult {
  int round = 1;
  RunReport report;
  BarrierEstimate barrier;
};

// Round loop: run, estimate the barrier, grow the budget, regenerate the
// schedule, repeat. Round 1 always uses the one-step schedule (0, 1).
// Each round's estimate is unbiased on its own (its schedule is fixed
// before the round starts); the last round's estimate is the primary one.
std::vector<RoundResult> run_ssmc(const AnnealedTarget& target, const Kernel& kernel,
                                  const DriverOptions& options);

// Same round loop with the particle-outer / step-inner interchange and
// resampling policy forced to `never`. Per round, bit-identical to
// run_smc(policy = never) at equal seed, including across worker counts.
std::vector<RoundResult> run_sais(const AnnealedTarget& target, const Kernel& kernel,
                                  const DriverOptions& options);

// Per-step moment store for the streaming pass. Sized by the step count
// alone; the particle count never enters.
struct SaisAccumulator {
  explicit SaisAccumulator(int total_steps);

  int steps() const { return static_cast<int>(g0.size()) - 1; }
  // The adaptation storage of the streaming loop: the three log-moment
  // accumulators per step, 3 * (T + 1) in total.
  std::size_t moment_accumulator_count() const { return g0.size() + g1.size() + g2.size(); }

  std::vector<LogAccumulator> g0, g1, g2;       // slot 0 unused
  std::vector<SignedLogAccumulator> elbo_num;   // reporting only, not adaptation state
};

// Auxiliary allocation sizes of run_sais_single, excluding per-chunk
// particle storage. Pure function of the run shape; the driver sizes its
// buffers through this, so tests can assert N-independence structurally.
struct SaisMemoryProfile {
  std::size_t moment_accumulators = 0;   // 3 * (T + 1)
  std::size_t signed_accumulators = 0;   // T + 1
  std::size_t wave_block_slots = 0;      // pending per-block partials
};
SaisMemoryProfile sais_memory_profile(int total_steps, int workers, std::size_t chunk);

// One streaming pass over a fixed schedule. ess_trace is left empty (a
// per-step ESS would need a fourth, non-moment accumulator); everything
// else in the report matches run_smc(policy = never) bitwise.
RunReport run_sais_single(const AnnealedTarget& target, const Kernel& kernel,
                          const Schedule& schedule, const RunOptions& options,
                          std::size_t chunk = 0);

struct ZjaOptions {
  std::size_t n_particles = 1024;
  int target_steps = 32;    // K; used to calibrate delta_star from a pilot
  double delta_star = 0.0;  // 0 -> uniform-K pilot round sets (Lambda_hat / K)^2
  std::uint64_t seed = 0;
  int workers = 1;
  int max_steps = 100000;

  void validate() const;
};

struct ZjaOutcome {
  // Pilot round first (when one ran), then the adaptive run.
  std::vector<RoundResult> rounds;
  double delta_star = 0.0;  // threshold actually used
  bool warning = false;     // non-monotone bisection fallback was taken
};

// Online schedule selection: each step picks the largest beta whose one-step
// discrepancy estimate stays at or below delta_star, then advances the
// sampler to it (no resampling). Kernel applications stay N per step; the
// root finding only re-weights current particles.
ZjaOutcome run_zja(const AnnealedTarget& target, const Kernel& kernel,
                   const ZjaOptions& options);

}  // namespace asmc
