#include "asmc/drivers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "asmc/errors.hpp"
#include "engine_detail.hpp"

namespace asmc {

void DriverOptions::validate() const {
  if (n_particles < 1) throw std::invalid_argument("n_particles must be at least 1");
  if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
}

void ZjaOptions::validate() const {
  if (n_particles < 1) throw std::invalid_argument("n_particles must be at least 1");
  if (target_steps < 1) throw std::invalid_argument("target_steps must be at least 1");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (!(delta_star >= 0.0) || !std::isfinite(delta_star)) {
    throw std::invalid_argument("delta_star must be finite and >= 0");
  }
}

BudgetPlan budget(std::size_t n_particles, int steps, std::size_t dim,
                  std::uint64_t memory_cap_bytes, DriverMode mode) {
  if (n_particles < 1 || steps < 1) {
    throw std::invalid_argument("budget needs n_particles and steps >= 1");
  }
  const double root2 = std::sqrt(2.0);
  const auto grown_n = static_cast<std::size_t>(
      std::ceil(root2 * static_cast<double>(n_particles)));
  const int grown_t = static_cast<int>(std::ceil(root2 * static_cast<double>(steps)));
  if (mode == DriverMode::ssmc) {
    const double bytes = static_cast<double>(grown_n) * static_cast<double>(dim) * 8.0;
    if (bytes > static_cast<double>(memory_cap_bytes)) {
      return {n_particles, 2 * steps};
    }
  }
  return {grown_n, grown_t};
}

SaisAccumulator::SaisAccumulator(int total_steps) {
  if (total_steps < 1) throw std::invalid_argument("accumulator needs at least one step");
  g0.assign(total_steps + 1, {});
  g1.assign(total_steps + 1, {});
  g2.assign(total_steps + 1, {});
  elbo_num.assign(total_steps + 1, {});
}

SaisMemoryProfile sais_memory_profile(int total_steps, int workers, std::size_t chunk) {
  if (total_steps < 1) throw std::invalid_argument("profile needs at least one step");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  const std::size_t chunk_particles =
      chunk > 0 ? chunk : static_cast<std::size_t>(workers) * 8;
  const std::size_t chunk_blocks = (chunk_particles - 1) / kReductionBlock + 1;
  SaisMemoryProfile p;
  p.moment_accumulators = 3 * (static_cast<std::size_t>(total_steps) + 1);
  p.signed_accumulators = static_cast<std::size_t>(total_steps) + 1;
  p.wave_block_slots = std::max(chunk_blocks, static_cast<std::size_t>(workers));
  return p;
}

RunReport run_sais_single(const AnnealedTarget& target, const Kernel& kernel,
                          const Schedule& schedule, const RunOptions& options,
                          std::size_t chunk) {
  schedule.validate();
  options.validate();
  validate_kernel(kernel);

  const auto t_begin = std::chrono::steady_clock::now();
  const std::size_t n = options.n_particles;
  const std::size_t d = target.dim();
  const int total_steps = schedule.steps();
  const double log_n = std::log(static_cast<double>(n));

  const auto profile = sais_memory_profile(total_steps, options.workers, chunk);
  SaisAccumulator global(total_steps);
  std::vector<SaisAccumulator> wave_buf(profile.wave_block_slots,
                                        SaisAccumulator(total_steps));

  const std::size_t blocks = block_count(n);
  const std::size_t wave = profile.wave_block_slots;

  // One particle is alive at a time per worker: sample it, then run the full
  // annealing pass, accumulating into the active block's per-step slots.
  const auto process_block = [&](std::size_t slot, std::size_t b, std::vector<double>& x) {
    SaisAccumulator& ba = wave_buf[slot];
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    for (std::size_t p = lo; p < hi; ++p) {
      rng::Stream si(rng::Key{options.seed, options.round, p, 0, rng::kSubstepInit});
      target.sample_reference(si, {x.data(), d});
      double log_w = 0.0;
      for (int t = 1; t <= total_steps; ++t) {
        rng::Stream se(rng::Key{options.seed, options.round, p,
                                static_cast<std::uint64_t>(t), rng::kSubstepExplore});
        detail::weight_and_move(target, kernel, schedule.betas[t - 1], schedule.betas[t],
                                {x.data(), d}, log_w, ba.g0[t], ba.g1[t], ba.g2[t],
                                ba.elbo_num[t], se);
      }
    }
  };

  for (std::size_t w0 = 0; w0 < blocks; w0 += wave) {
    const std::size_t wend = std::min(blocks, w0 + wave);
    const std::size_t wcount = wend - w0;
    for (std::size_t s = 0; s < wcount; ++s) wave_buf[s] = SaisAccumulator(total_steps);

    if (options.workers <= 1 || wcount <= 1) {
      std::vector<double> x(d);
      for (std::size_t b = w0; b < wend; ++b) process_block(b - w0, b, x);
    } else {
      const int w = static_cast<int>(
          std::min<std::size_t>(static_cast<std::size_t>(options.workers), wcount));
      std::vector<std::thread> pool;
      pool.reserve(w);
      for (int wi = 0; wi < w; ++wi) {
        pool.emplace_back([&, wi] {
          std::vector<double> x(d);
          for (std::size_t b = w0 + wi; b < wend; b += w) process_block(b - w0, b, x);
        });
      }
      for (auto& th : pool) th.join();
    }

    // Ordered fold over block index; bit-identical to the in-memory engine's
    // per-step reduction.
    for (std::size_t b = w0; b < wend; ++b) {
      const SaisAccumulator& ba = wave_buf[b - w0];
      for (int t = 1; t <= total_steps; ++t) {
        global.g0[t].combine(ba.g0[t]);
        global.g1[t].combine(ba.g1[t]);
        global.g2[t].combine(ba.g2[t]);
        global.elbo_num[t].combine(ba.elbo_num[t]);
      }
    }
  }

  RunReport rep;
  rep.schedule = schedule;
  rep.n_particles = n;
  rep.stats.log_g0.assign(total_steps + 1, kNegInf);
  rep.stats.log_g1.assign(total_steps + 1, kNegInf);
  rep.stats.log_g2.assign(total_steps + 1, kNegInf);
  rep.cum_log_z.assign(total_steps + 1, 0.0);
  rep.resampled.assign(total_steps + 1, 0);
  for (int t = 1; t <= total_steps; ++t) {
    rep.stats.log_g0[t] = global.g0[t].log_total();
    rep.stats.log_g1[t] = global.g1[t].log_total();
    rep.stats.log_g2[t] = global.g2[t].log_total();
    if (rep.stats.log_g1[t] == kNegInf) {
      throw degenerate_weights_error("all log-weights are -inf at step " + std::to_string(t));
    }
  }

  double elbo = 0.0;
  double den_log = log_n;
  for (int t = 1; t <= total_steps; ++t) {
    elbo += global.elbo_num[t].value_scaled(den_log);
    den_log = rep.stats.log_g1[t];
  }

  double log_z = 0.0;
  log_z += rep.stats.log_g1[total_steps] - log_n;
  rep.cum_log_z[total_steps] = log_z;
  rep.resample_times.push_back(total_steps);
  rep.log_z_hat = log_z;
  rep.elbo_hat = elbo;
  rep.kernel_applications = static_cast<std::uint64_t>(n) * total_steps;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return rep;
}

namespace {

std::vector<RoundResult> round_loop(const AnnealedTarget& target, const Kernel& kernel,
                                    const DriverOptions& options, DriverMode mode) {
  options.validate();
  std::vector<RoundResult> out;
  out.reserve(options.rounds);

  Schedule schedule;
  schedule.betas = {0.0, 1.0};
  std::size_t n = options.n_particles;
  int steps = 1;

  for (int k = 1; k <= options.rounds; ++k) {
    RunOptions ro;
    ro.n_particles = n;
    ro.policy = mode == DriverMode::sais ? ResamplePolicy::never : options.policy;
    ro.rho = options.rho;
    ro.seed = options.seed;
    ro.round = static_cast<std::uint64_t>(k);
    ro.workers = options.workers;

    RunReport rep = mode == DriverMode::sais
                        ? run_sais_single(target, kernel, schedule, ro, options.chunk)
                        : run_smc(target, kernel, schedule, ro);
    BarrierEstimate barrier = barrier_estimate(rep.stats, schedule);
    out.push_back(RoundResult{k, std::move(rep), barrier});

    if (k < options.rounds) {
      const BudgetPlan plan = budget(n, steps, target.dim(), options.memory_cap_bytes, mode);
      n = plan.n_particles;
      steps = plan.steps;
      schedule = generate_schedule(barrier, steps);
    }
  }
  return out;
}

}  // namespace

std::vector<RoundResult> run_ssmc(const AnnealedTarget& target, const Kernel& kernel,
                                  const DriverOptions& options) {
  return round_loop(target, kernel, options, DriverMode::ssmc);
}

std::vector<RoundResult> run_sais(const AnnealedTarget& target, const Kernel& kernel,
                                  const DriverOptions& options) {
  return round_loop(target, kernel, options, DriverMode::sais);
}

ZjaOutcome run_zja(const AnnealedTarget& target, const Kernel& kernel,
                   const ZjaOptions& options) {
  options.validate();
  validate_kernel(kernel);

  ZjaOutcome out;
  double delta = options.delta_star;
  std::uint64_t main_round = 1;
  if (delta <= 0.0) {
    // A single coarse jump cannot resolve the barrier; the pilot uses the
    // same resolution the main round is aiming for.
    const Schedule pilot = Schedule::uniform(options.target_steps);
    RunOptions po;
    po.n_particles = options.n_particles;
    po.policy = ResamplePolicy::never;
    po.seed = options.seed;
    po.round = 1;
    po.workers = options.workers;
    RunReport prep = run_smc(target, kernel, pilot, po);
    BarrierEstimate pbar = barrier_estimate(prep.stats, pilot);
    const double lam = pbar.total();
    const double step_lam = lam / static_cast<double>(options.target_steps);
    delta = std::max(1e-12, step_lam * step_lam);
    out.rounds.push_back(RoundResult{1, std::move(prep), pbar});
    main_round = 2;
  }
  out.delta_star = delta;

  const auto t_begin = std::chrono::steady_clock::now();
  const std::size_t n = options.n_particles;
  const std::size_t d = target.dim();
  const double log_n = std::log(static_cast<double>(n));

  std::vector<double> xs(n * d);
  std::vector<double> log_w(n, 0.0);
  detail::init_particles(target, xs, d, n, options.seed, main_round, options.workers);

  RunReport rep;
  rep.n_particles = n;
  rep.schedule.betas = {0.0};
  rep.stats.log_g0 = {kNegInf};
  rep.stats.log_g1 = {kNegInf};
  rep.stats.log_g2 = {kNegInf};
  rep.ess_trace = {static_cast<double>(n)};
  rep.cum_log_z = {0.0};
  rep.resampled = {0};

  const std::size_t blocks = block_count(n);
  std::vector<detail::StepAccumulators> acc(blocks);
  std::vector<LogAccumulator> sq(blocks);
  std::vector<double> bmax1(blocks), bmax2(blocks);
  double log_z = 0.0;
  double elbo = 0.0;
  double den_log = log_n;

  int t = 0;
  while (rep.schedule.betas.back() < 1.0) {
    ++t;
    if (t > options.max_steps) {
      throw evaluation_error("online adaptation failed to reach beta = 1 within " +
                             std::to_string(options.max_steps) + " steps");
    }
    const double beta_prev = rep.schedule.betas.back();
    const ZjaResult pick = zja_next_beta(target, beta_prev, xs, n, log_w, delta);
    out.warning = out.warning || pick.warning;
    const double beta_cur = pick.beta_next;
    rep.schedule.betas.push_back(beta_cur);

    const auto pass = detail::step_pass(target, kernel, beta_prev, beta_cur, xs, log_w, d,
                                        options.seed, main_round,
                                        static_cast<std::uint64_t>(t), options.workers, acc,
                                        sq, bmax1, bmax2);
    rep.kernel_applications += n;

    rep.stats.log_g0.push_back(pass.tot.g0.log_total());
    rep.stats.log_g1.push_back(pass.tot.g1.log_total());
    rep.stats.log_g2.push_back(pass.tot.g2.log_total());
    const double l1 = rep.stats.log_g1[t];
    if (l1 == kNegInf) {
      throw degenerate_weights_error("all log-weights are -inf at step " + std::to_string(t));
    }
    double ess_t = std::exp(2.0 * l1 - pass.sq_tot.log_total());
    ess_t = std::min(static_cast<double>(n), std::max(1.0, ess_t));
    rep.ess_trace.push_back(ess_t);
    detail::check_degenerate(n, ess_t, pass.max1, pass.max2, t);

    elbo += pass.tot.elbo_num.value_scaled(den_log);
    if (beta_cur == 1.0) {
      log_z += l1 - log_n;
      den_log = log_n;
      rep.resample_times.push_back(t);
    } else {
      den_log = l1;
    }
    rep.cum_log_z.push_back(log_z);
    rep.resampled.push_back(0);
  }

  rep.log_z_hat = log_z;
  rep.elbo_hat = elbo;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();

  BarrierEstimate barrier = barrier_estimate(rep.stats, rep.schedule);
  out.rounds.push_back(
      RoundResult{static_cast<int>(main_round), std::move(rep), std::move(barrier)});
  return out;
}

}  // namespace asmc
