#pragma once

#include <span>
#include <vector>

#include "asmc/rng.hpp"
#include "asmc/target.hpp"

namespace asmc {

enum class KernelKind {
  idealized_exact,  // fresh exact draw from pi_beta (requires exact_sampler)
  rwmh_cycle,       // random-walk Metropolis cycling through step sizes
  identity,         // no move
};

// Forward kernel configuration. A cycle visits every step size once per
// sweep; `sweeps` full cycles are applied per propagation.
//
// Deterministic-flow and optimal-backward kernels are deliberately out of
// scope; adding one means adding a KernelKind plus a propagate branch, and
// an incremental-weight rule that may depend on the post-move point.
struct Kernel {
  KernelKind kind = KernelKind::idealized_exact;
  std::vector<double> step_sizes = {0.1, 1.0, 10.0};
  int sweeps = 1;
};

// Moves x in place so that pi_beta is invariant (exactly invariant for
// rwmh_cycle and identity; idealized_exact draws fresh from pi_beta).
void propagate(const AnnealedTarget& target, const Kernel& kernel, double beta,
               std::span<double> x, rng::Stream& stream);

// Incremental weight for kernels with invariant pi_beta_to:
//   log gamma_{beta_to}(x) - log gamma_{beta_from}(x), evaluated pre-move.
// Fails if gamma_{beta_from}(x) = 0.
double log_incremental_weight(const AnnealedTarget& target, double beta_from,
                              double beta_to, std::span<const double> x);

void validate_kernel(const Kernel& kernel);

}  // namespace asmc
