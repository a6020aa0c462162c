#include "asmc/pt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "asmc/errors.hpp"
#include "asmc/logsum.hpp"

namespace asmc {

void PtOptions::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (burn_in >= iterations) {
    throw std::invalid_argument("burn_in must leave at least one recorded iteration");
  }
}

PtState pt_init(const AnnealedTarget& target, const Schedule& schedule,
                std::uint64_t seed, std::uint64_t round) {
  schedule.validate();
  const std::size_t d = target.dim();
  const std::size_t levels = schedule.steps();

  PtState state;
  state.schedule = schedule;
  state.round = round;
  state.chains.resize((levels + 1) * d);
  state.potentials.resize(levels + 1);
  for (std::size_t n = 0; n <= levels; ++n) {
    std::span<double> x{state.chains.data() + n * d, d};
    rng::Stream stream(rng::Key{seed, round, n, 0, rng::kSubstepInit});
    target.sample_reference(stream, x);
    state.potentials[n] = target.potential(x);
  }
  return state;
}

std::vector<std::uint8_t> pt_step(const AnnealedTarget& target, const Kernel& kernel,
                                  PtState& state, std::uint64_t seed) {
  const std::size_t d = target.dim();
  const std::size_t levels = state.schedule.steps();
  const std::uint64_t step = state.iteration + 1;
  const std::uint64_t round = state.round;

  // Exploration: level 0 gets a fresh reference draw, higher levels one
  // kernel application at their own temperature.
  {
    std::span<double> x0{state.chains.data(), d};
    rng::Stream stream(rng::Key{seed, round, 0, step, rng::kSubstepInit});
    target.sample_reference(stream, x0);
    state.potentials[0] = target.potential(x0);
  }
  for (std::size_t n = 1; n <= levels; ++n) {
    std::span<double> x{state.chains.data() + n * d, d};
    rng::Stream stream(rng::Key{seed, round, n, step, rng::kSubstepExplore});
    propagate(target, kernel, state.schedule.betas[n], x, stream);
    state.potentials[n] = target.potential(x);
  }

  // Non-reversible swap phase: even iterations attempt pairs with even lower
  // index, odd iterations the odd ones. The reference factor cancels, so the
  // acceptance ratio reduces to delta_beta * (V_lo - V_hi).
  std::vector<std::uint8_t> accepted(levels + 1, 0);
  const std::size_t first = state.iteration % 2 == 0 ? 0 : 1;
  for (std::size_t lo = first; lo + 1 <= levels; lo += 2) {
    const std::size_t hi = lo + 1;
    const double delta_beta = state.schedule.betas[hi] - state.schedule.betas[lo];
    const double log_alpha = delta_beta * (state.potentials[lo] - state.potentials[hi]);
    rng::Stream stream(rng::Key{seed, round, hi, step, rng::kSubstepSwap});
    const double u = stream.uniform();
    if (log_alpha >= 0.0 || std::log(u) < log_alpha) {
      for (std::size_t j = 0; j < d; ++j) {
        std::swap(state.chains[lo * d + j], state.chains[hi * d + j]);
      }
      std::swap(state.potentials[lo], state.potentials[hi]);
      accepted[lo] = 1;
    }
  }
  state.iteration += 1;
  return accepted;
}

PtReport run_pt(const AnnealedTarget& target, const Kernel& kernel,
                const Schedule& schedule, const PtOptions& options) {
  schedule.validate();
  options.validate();
  validate_kernel(kernel);

  const auto t_begin = std::chrono::steady_clock::now();
  const int levels = schedule.steps();
  const int total = options.iterations;
  const int burn = options.burn_in < 0 ? total / 10 : options.burn_in;

  PtState state = pt_init(target, schedule, options.seed, options.round);

  PtReport rep;
  rep.schedule = schedule;
  rep.iterations = total;
  rep.burn_in = burn;
  rep.trace.iterations = total;
  rep.trace.levels = levels;
  rep.trace.values.resize(static_cast<std::size_t>(total) * (levels + 1));
  rep.swap_accepted.assign(static_cast<std::size_t>(total) * (levels + 1), 0);
  rep.swap_attempts.assign(levels + 1, 0);
  rep.swap_accepts.assign(levels + 1, 0);

  for (int it = 0; it < total; ++it) {
    const std::size_t parity = state.iteration % 2;
    std::vector<std::uint8_t> accepted = pt_step(target, kernel, state, options.seed);
    for (int n = 0; n <= levels; ++n) {
      rep.trace.values[static_cast<std::size_t>(it) * (levels + 1) + n] =
          state.potentials[n];
    }
    for (std::size_t lo = parity; lo + 1 <= static_cast<std::size_t>(levels); lo += 2) {
      rep.swap_attempts[lo] += 1;
      if (accepted[lo]) {
        rep.swap_accepts[lo] += 1;
        rep.swap_accepted[static_cast<std::size_t>(it) * (levels + 1) + lo] = 1;
        // The trace must hold post-exploration, pre-swap potentials; an
        // accepted swap exchanged exactly this disjoint pair, so undo it.
        std::swap(rep.trace.values[static_cast<std::size_t>(it) * (levels + 1) + lo],
                  rep.trace.values[static_cast<std::size_t>(it) * (levels + 1) + lo + 1]);
      }
    }
  }

  rep.log_z_hat = stepping_stone(rep.trace, schedule, burn);
  rep.kernel_applications = static_cast<std::uint64_t>(levels) * total;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return rep;
}

double stepping_stone(const PotentialTrace& trace, const Schedule& schedule, int burn_in) {
  schedule.validate();
  const int levels = schedule.steps();
  if (trace.levels != levels) {
    throw std::invalid_argument("trace level count does not match schedule");
  }
  if (burn_in < 0 || burn_in >= trace.iterations) {
    throw std::invalid_argument("burn_in must leave at least one recorded iteration");
  }
  const int used = trace.iterations - burn_in;
  const double log_used = std::log(static_cast<double>(used));

  double log_z = 0.0;
  for (int n = 1; n <= levels; ++n) {
    const double delta_beta = schedule.betas[n] - schedule.betas[n - 1];
    LogAccumulator acc;
    for (int it = burn_in; it < trace.iterations; ++it) {
      acc.add(delta_beta * trace.at(it, n - 1));
    }
    log_z += acc.log_total() - log_used;
  }
  return log_z;
}

double lambda_pt_estimate(const AnnealedTarget& target, double beta, std::size_t samples,
                          std::uint64_t seed) {
  if (!target.capabilities().exact_sampler) {
    throw capability_error("target does not provide an exact sampler");
  }
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");

  const std::size_t d = target.dim();
  std::vector<double> a(d), b(d);
  double total = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    rng::Stream stream(rng::Key{seed, 1, i, 0, rng::kSubstepInit});
    target.exact_sample(beta, stream, a);
    target.exact_sample(beta, stream, b);
    total += std::abs(target.potential(a) - target.potential(b));
  }
  return 0.5 * total / static_cast<double>(samples);
}

double lambda_pt_chain_estimate(const AnnealedTarget& target, const Kernel& kernel,
                                double beta, int iterations, int burn_in,
                                std::uint64_t seed) {
  if (iterations < 1 || burn_in < 0 || burn_in >= iterations) {
    throw std::invalid_argument("need at least one post-burn-in iteration");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
  validate_kernel(kernel);

  const std::size_t d = target.dim();
  std::vector<double> a(d), b(d);
  {
    rng::Stream sa(rng::Key{seed, 1, 0, 0, rng::kSubstepInit});
    target.sample_reference(sa, a);
    rng::Stream sb(rng::Key{seed, 1, 1, 0, rng::kSubstepInit});
    target.sample_reference(sb, b);
  }
  double total = 0.0;
  int used = 0;
  for (int it = 1; it <= iterations; ++it) {
    rng::Stream sa(rng::Key{seed, 1, 0, static_cast<std::uint64_t>(it), rng::kSubstepExplore});
    propagate(target, kernel, beta, a, sa);
    rng::Stream sb(rng::Key{seed, 1, 1, static_cast<std::uint64_t>(it), rng::kSubstepExplore});
    propagate(target, kernel, beta, b, sb);
    if (it > burn_in) {
      total += std::abs(target.potential(a) - target.potential(b));
      ++used;
    }
  }
  return 0.5 * total / static_cast<double>(used);
}

}  // namespace asmc
