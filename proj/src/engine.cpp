#include "asmc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "asmc/errors.hpp"
#include "asmc/logsum.hpp"
#include "asmc/schedule.hpp"
#include "engine_detail.hpp"

namespace asmc {

Schedule Schedule::uniform(int steps) {
  if (steps < 1) throw std::invalid_argument("schedule needs at least one step");
  Schedule s;
  s.betas.resize(steps + 1);
  for (int t = 0; t <= steps; ++t) {
    s.betas[t] = static_cast<double>(t) / static_cast<double>(steps);
  }
  s.betas[0] = 0.0;
  s.betas[steps] = 1.0;
  return s;
}

void Schedule::validate() const {
  if (betas.size() < 2) throw std::invalid_argument("schedule needs at least one step");
  if (betas.front() != 0.0) throw std::invalid_argument("schedule must start at beta = 0");
  if (betas.back() != 1.0) throw std::invalid_argument("schedule must end at beta = 1");
  for (std::size_t t = 1; t < betas.size(); ++t) {
    if (!(betas[t] > betas[t - 1])) {
      throw std::invalid_argument("schedule must be strictly increasing at index " +
                                  std::to_string(t));
    }
  }
}

void RunOptions::validate() const {
  if (n_particles < 1) throw std::invalid_argument("n_particles must be at least 1");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
}

double ess(std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::invalid_argument("ess of empty weight vector");
  LogAccumulator l1, l2;
  for (double l : log_weights) {
    l1.add(l);
    l2.add(2.0 * l);
  }
  if (l1.log_total() == kNegInf) {
    throw degenerate_weights_error("all log-weights are -inf");
  }
  const double e = std::exp(2.0 * l1.log_total() - l2.log_total());
  const double n = static_cast<double>(log_weights.size());
  return std::min(n, std::max(1.0, e));
}

std::vector<std::uint32_t> systematic_resample(std::span<const double> log_weights,
                                               rng::Stream& stream) {
  const std::size_t n = log_weights.size();
  if (n == 0) throw std::invalid_argument("cannot resample an empty system");
  const double l1 = logsumexp(log_weights);
  if (l1 == kNegInf) throw degenerate_weights_error("all log-weights are -inf");
  const double u = stream.uniform();
  std::vector<std::uint32_t> ancestors(n);
  double cum = std::exp(log_weights[0] - l1);
  std::size_t j = 0;
  for (std::size_t m = 0; m < n; ++m) {
    const double pos = (static_cast<double>(m) + u) / static_cast<double>(n);
    while (cum < pos && j + 1 < n) {
      ++j;
      cum += std::exp(log_weights[j] - l1);
    }
    ancestors[m] = static_cast<std::uint32_t>(j);
  }
  return ancestors;
}

bool decide_resample(ResamplePolicy policy, int t, int total_steps, double ess_value,
                     std::size_t n_particles, double accumulated_dhat, double rho) {
  switch (policy) {
    case ResamplePolicy::never:
      return t == total_steps;
    case ResamplePolicy::always:
      return true;
    case ResamplePolicy::adaptive_ess:
      return ess_value < rho * static_cast<double>(n_particles);
    case ResamplePolicy::stabilized:
      return accumulated_dhat > -std::log(rho);
  }
  throw std::invalid_argument("unknown resampling policy");
}

RunReport run_smc(const AnnealedTarget& target, const Kernel& kernel,
                  const Schedule& schedule, const RunOptions& options) {
  schedule.validate();
  options.validate();
  validate_kernel(kernel);

  const auto t_begin = std::chrono::steady_clock::now();
  const std::size_t n = options.n_particles;
  const std::size_t d = target.dim();
  const int total_steps = schedule.steps();
  const double log_n = std::log(static_cast<double>(n));

  std::vector<double> xs(n * d);
  std::vector<double> log_w(n, 0.0);
  detail::init_particles(target, xs, d, n, options.seed, options.round, options.workers);

  RunReport rep;
  rep.schedule = schedule;
  rep.n_particles = n;
  rep.stats.log_g0.assign(total_steps + 1, kNegInf);
  rep.stats.log_g1.assign(total_steps + 1, kNegInf);
  rep.stats.log_g2.assign(total_steps + 1, kNegInf);
  rep.ess_trace.assign(total_steps + 1, static_cast<double>(n));
  rep.cum_log_z.assign(total_steps + 1, 0.0);
  rep.resampled.assign(total_steps + 1, 0);

  const std::size_t blocks = block_count(n);
  std::vector<detail::StepAccumulators> acc(blocks);
  std::vector<LogAccumulator> sq(blocks);
  std::vector<double> bmax1(blocks), bmax2(blocks);
  std::vector<double> x_buf;
  double log_z = 0.0;
  double elbo = 0.0;
  double acc_dhat = 0.0;
  double den_log = log_n;

  for (int t = 1; t <= total_steps; ++t) {
    const auto pass = detail::step_pass(target, kernel, schedule.betas[t - 1],
                                        schedule.betas[t], xs, log_w, d, options.seed,
                                        options.round, static_cast<std::uint64_t>(t),
                                        options.workers, acc, sq, bmax1, bmax2);
    rep.kernel_applications += n;

    rep.stats.log_g0[t] = pass.tot.g0.log_total();
    rep.stats.log_g1[t] = pass.tot.g1.log_total();
    rep.stats.log_g2[t] = pass.tot.g2.log_total();

    const double l1 = rep.stats.log_g1[t];
    if (l1 == kNegInf) {
      throw degenerate_weights_error("all log-weights are -inf at step " + std::to_string(t));
    }
    double ess_t = std::exp(2.0 * l1 - pass.sq_tot.log_total());
    ess_t = std::min(static_cast<double>(n), std::max(1.0, ess_t));
    rep.ess_trace[t] = ess_t;
    detail::check_degenerate(n, ess_t, pass.max1, pass.max2, t);

    elbo += pass.tot.elbo_num.value_scaled(den_log);
    acc_dhat += discrepancy_hat(rep.stats, t);

    const bool fire = decide_resample(options.policy, t, total_steps, ess_t, n, acc_dhat,
                                      options.rho);
    const bool select_ancestors = fire && options.policy != ResamplePolicy::never;
    if (t == total_steps || fire) {
      log_z += l1 - log_n;
      if (select_ancestors) {
        rng::Stream rs(rng::Key{options.seed, options.round, 0,
                                static_cast<std::uint64_t>(t), rng::kSubstepResample});
        const auto ancestors = systematic_resample(log_w, rs);
        x_buf.resize(n * d);
        for (std::size_t p = 0; p < n; ++p) {
          const double* src = xs.data() + static_cast<std::size_t>(ancestors[p]) * d;
          std::copy(src, src + d, x_buf.data() + p * d);
        }
        xs.swap(x_buf);
        std::fill(log_w.begin(), log_w.end(), 0.0);
        rep.resampled[t] = 1;
      }
      den_log = log_n;
      acc_dhat = 0.0;
      rep.resample_times.push_back(t);
    } else {
      den_log = l1;
    }
    rep.cum_log_z[t] = log_z;
  }

  rep.log_z_hat = log_z;
  rep.elbo_hat = elbo;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return rep;
}

}  // namespace asmc
