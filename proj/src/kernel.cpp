#include "asmc/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "asmc/errors.hpp"
#include "asmc/logsum.hpp"

namespace asmc {

void validate_kernel(const Kernel& kernel) {
  if (kernel.kind == KernelKind::rwmh_cycle) {
    if (kernel.step_sizes.empty()) {
      throw std::invalid_argument("rwmh_cycle requires at least one step size");
    }
    for (double s : kernel.step_sizes) {
      if (!(s > 0.0)) throw std::invalid_argument("rwmh step sizes must be positive");
    }
    if (kernel.sweeps < 1) throw std::invalid_argument("rwmh sweeps must be at least 1");
  }
}

namespace {

void rwmh_cycle_move(const AnnealedTarget& target, const Kernel& kernel, double beta,
                     std::span<double> x, rng::Stream& stream) {
  const std::size_t d = x.size();
  std::vector<double> proposal(d);
  double log_gamma_x = target.log_gamma(beta, x);
  for (int sweep = 0; sweep < kernel.sweeps; ++sweep) {
    for (double s : kernel.step_sizes) {
      for (std::size_t i = 0; i < d; ++i) proposal[i] = x[i] + s * stream.normal();
      const double log_gamma_p = target.log_gamma(beta, proposal);
      const double log_u = std::log(stream.uniform());
      if (log_u < log_gamma_p - log_gamma_x) {
        for (std::size_t i = 0; i < d; ++i) x[i] = proposal[i];
        log_gamma_x = log_gamma_p;
      }
    }
  }
}

}  // namespace

void propagate(const AnnealedTarget& target, const Kernel& kernel, double beta,
               std::span<double> x, rng::Stream& stream) {
  switch (kernel.kind) {
    case KernelKind::idealized_exact:
      if (!target.capabilities().exact_sampler) {
        throw capability_error("idealized_exact kernel requires an exact sampler");
      }
      target.exact_sample(beta, stream, x);
      return;
    case KernelKind::rwmh_cycle:
      validate_kernel(kernel);
      rwmh_cycle_move(target, kernel, beta, x, stream);
      return;
    case KernelKind::identity:
      return;
  }
  throw std::invalid_argument("unknown kernel kind");
}

double log_incremental_weight(const AnnealedTarget& target, double beta_from,
                              double beta_to, std::span<const double> x) {
  const double from = target.log_gamma(beta_from, x);
  if (from == kNegInf) {
    throw evaluation_error("incremental weight undefined: gamma_beta(x) = 0 at beta = " +
                           std::to_string(beta_from));
  }
  return target.log_gamma(beta_to, x) - from;
}

}  // namespace asmc
