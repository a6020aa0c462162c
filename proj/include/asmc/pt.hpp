#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "asmc/engine.hpp"
#include "asmc/kernel.hpp"
#include "asmc/rng.hpp"
#include "asmc/target.hpp"

namespace asmc {

// Non-reversible parallel tempering over the levels of a supplied schedule.
// Level n holds one chain at inverse temperature schedule.betas[n]; level 0
// is refreshed by exact reference draws every iteration.

struct PtOptions {
  int iterations = 1024;
  int burn_in = -1;  // -1 -> iterations / 10
  std::uint64_t seed = 0;
  std::uint64_t round = 1;
  void validate() const;
};

struct PtState {
  std::vector<double> chains;     // (levels + 1) x dim, row-major
  std::vector<double> potentials; // V at each level, kept in sync with chains
  Schedule schedule;
  std::uint64_t round = 1;
  std::uint64_t iteration = 0;    // completed pt_step calls; parity drives DEO
};

// Potentials recorded after exploration and before swaps, one row per
// iteration, levels + 1 entries per row.
struct PotentialTrace {
  int iterations = 0;
  int levels = 0;
  std::vector<double> values;
  double at(int iteration, int level) const {
    return values[static_cast<std::size_t>(iteration) * (levels + 1) + level];
  }
};

struct PtReport {
  Schedule schedule;
  int iterations = 0;
  int burn_in = 0;
  double log_z_hat = 0.0;
  PotentialTrace trace;
  // swap_accepted[it * (levels + 1) + n] = 1 iff the pair (n, n+1) was
  // attempted at iteration it and the swap was accepted.
  std::vector<std::uint8_t> swap_accepted;
  std::vector<std::uint64_t> swap_attempts;  // indexed by lower level of the pair
  std::vector<std::uint64_t> swap_accepts;
  std::uint64_t kernel_applications = 0;
  double wall_seconds = 0.0;
};

PtState pt_init(const AnnealedTarget& target, const Schedule& schedule,
                std::uint64_t seed, std::uint64_t round);

// One exploration sweep across all levels followed by the DEO swap phase.
// Returns per-pair acceptance flags (indexed by the lower level) for the
// swaps attempted this iteration.
std::vector<std::uint8_t> pt_step(const AnnealedTarget& target, const Kernel& kernel,
                                  PtState& state, std::uint64_t seed);

PtReport run_pt(const AnnealedTarget& target, const Kernel& kernel,
                const Schedule& schedule, const PtOptions& options);

// Stepping stone log-normalizer from lower-level potentials, discarding the
// first burn_in iterations.
double stepping_stone(const PotentialTrace& trace, const Schedule& schedule, int burn_in);

// PT local communication barrier: half the mean absolute difference of V over
// independent pairs drawn exactly from pi_beta. Requires an exact sampler.
double lambda_pt_estimate(const AnnealedTarget& target, double beta, std::size_t samples,
                          std::uint64_t seed);

// Same quantity from two independent exploration chains when no exact sampler
// exists; pairs are formed across chains after burn-in.
double lambda_pt_chain_estimate(const AnnealedTarget& target, const Kernel& kernel,
                                double beta, int iterations, int burn_in,
                                std::uint64_t seed);

}  // namespace asmc
