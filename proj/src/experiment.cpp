#include "asmc/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <thread>
#include <vector>

#include "asmc/drivers.hpp"
#include "asmc/pt.hpp"
#include "asmc/schedule.hpp"
#include "asmc/theory.hpp"

namespace asmc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& dir, const char* name,
                       const char* header) {
  std::ofstream out(dir / name, std::ios::trunc);
  if (!out) throw std::runtime_error(std::string("cannot write ") + name);
  out << header << '\n';
  return out;
}

struct SummaryRow {
  int round;
  std::size_t n;
  int steps;
  double log_z_hat;
  double elbo_hat;
  double lambda_hat;
  std::uint64_t kernel_applications;
  double wall_seconds;
};

void write_summary_row(std::ofstream& out, const SummaryRow& row, bool timing) {
  out << row.round << ',' << row.n << ',' << row.steps << ',' << fmt(row.log_z_hat) << ','
      << fmt(row.elbo_hat) << ',' << fmt(row.lambda_hat) << ',' << row.kernel_applications
      << ',' << fmt(timing ? row.wall_seconds : 0.0) << '\n';
}

void write_round_detail(std::ofstream& trace, std::ofstream& schedule_csv,
                        std::ofstream& barrier_csv, const RoundResult& rr) {
  const RunReport& rep = rr.report;
  const int total_steps = rep.schedule.steps();
  const std::vector<double> lambda_local = local_barrier(rr.barrier);

  for (int t = 0; t <= total_steps; ++t) {
    const bool have_ess = !rep.ess_trace.empty();
    trace << rr.round << ',' << t << ',' << fmt(rep.schedule.betas[t]) << ','
          << fmt(rep.stats.log_g0[t]) << ',' << fmt(rep.stats.log_g1[t]) << ','
          << fmt(rep.stats.log_g2[t]) << ',' << fmt(have_ess ? rep.ess_trace[t] : kNan)
          << ',' << static_cast<int>(rep.resampled[t]) << ',' << fmt(rep.cum_log_z[t])
          << '\n';
    schedule_csv << rr.round << ',' << t << ',' << fmt(rep.schedule.betas[t]) << '\n';
    const double dhat = t == 0 ? 0.0 : discrepancy_hat(rep.stats, t);
    barrier_csv << rr.round << ',' << t << ',' << fmt(rep.schedule.betas[t]) << ','
                << fmt(dhat) << ',' << fmt(rr.barrier.lambda[t]) << ','
                << fmt(lambda_local[t]) << '\n';
  }
}

int resolved_workers(const RunConfig& config) {
  if (config.workers > 0) return config.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void run_particle_driver(const RunConfig& config, const std::filesystem::path& dir) {
  const auto target = make_target(config);
  const Kernel kernel = make_kernel(config);
  const int workers = resolved_workers(config);

  auto summary = open_csv(dir, "summary.csv", kSummaryHeader);
  auto trace = open_csv(dir, "trace.csv", kTraceHeader);
  auto schedule_csv = open_csv(dir, "schedule.csv", kScheduleHeader);
  auto barrier_csv = open_csv(dir, "barrier.csv", kBarrierHeader);

  double final_log_z = kNan;
  double final_lambda = kNan;

  for (int rep_i = 0; rep_i < config.replicates; ++rep_i) {
    std::vector<RoundResult> rounds;
    if (config.driver == "ais_zja") {
      ZjaOptions zo;
      zo.n_particles = config.n;
      zo.target_steps = config.zja_steps;
      zo.delta_star = config.zja_delta_star;
      zo.seed = config.seed + static_cast<std::uint64_t>(rep_i);
      zo.workers = workers;
      ZjaOutcome outcome = run_zja(*target, kernel, zo);
      if (outcome.warning) {
        std::cerr << "warning: one-step discrepancy non-monotone; using smallest "
                     "bracketing root\n";
      }
      rounds = std::move(outcome.rounds);
    } else {
      DriverOptions opts;
      opts.n_particles = config.n;
      opts.rounds = config.rounds;
      opts.policy = parse_policy(config.policy);
      opts.rho = config.rho;
      opts.seed = config.seed + static_cast<std::uint64_t>(rep_i);
      opts.workers = workers;
      opts.memory_cap_bytes = config.mem_cap_mb << 20;
      opts.chunk = config.chunk;
      rounds = config.driver == "sais" ? run_sais(*target, kernel, opts)
                                       : run_ssmc(*target, kernel, opts);
    }

    for (const RoundResult& rr : rounds) {
      write_summary_row(summary,
                        SummaryRow{rr.round, rr.report.n_particles,
                                   rr.report.schedule.steps(), rr.report.log_z_hat,
                                   rr.report.elbo_hat, rr.barrier.total(),
                                   rr.report.kernel_applications, rr.report.wall_seconds},
                        config.timing);
    }
    if (rep_i == 0) {
      for (const RoundResult& rr : rounds) {
        write_round_detail(trace, schedule_csv, barrier_csv, rr);
      }
      final_log_z = rounds.back().report.log_z_hat;
      final_lambda = rounds.back().barrier.total();
    }
  }

  std::cout << "log_Z_hat=" << fmt(final_log_z) << " Lambda_hat=" << fmt(final_lambda)
            << '\n';
}

void run_pt_driver(const RunConfig& config, const std::filesystem::path& dir) {
  const auto target = make_target(config);
  const Kernel kernel = make_kernel(config);
  Schedule schedule = Schedule::uniform(config.levels);

  auto summary = open_csv(dir, "summary.csv", kSummaryHeader);
  auto trace = open_csv(dir, "trace.csv", kTraceHeader);
  auto schedule_csv = open_csv(dir, "schedule.csv", kScheduleHeader);
  auto barrier_csv = open_csv(dir, "barrier.csv", kBarrierHeader);
  auto pt_trace = open_csv(dir, "pt_trace.csv", kPtTraceHeader);

  double final_log_z = kNan;
  for (int rep_i = 0; rep_i < config.replicates; ++rep_i) {
    PtOptions opts;
    opts.iterations = config.iterations;
    opts.burn_in = config.pt_burn_in;
    opts.seed = config.seed + static_cast<std::uint64_t>(rep_i);
    PtReport rep = run_pt(*target, kernel, schedule, opts);

    write_summary_row(summary,
                      SummaryRow{1, static_cast<std::size_t>(config.levels),
                                 config.iterations, rep.log_z_hat, kNan, kNan,
                                 rep.kernel_applications, rep.wall_seconds},
                      config.timing);
    if (rep_i == 0) {
      final_log_z = rep.log_z_hat;
      for (int t = 0; t <= schedule.steps(); ++t) {
        schedule_csv << 1 << ',' << t << ',' << fmt(schedule.betas[t]) << '\n';
      }
      for (int it = 0; it < rep.iterations; ++it) {
        for (int n = 0; n <= rep.trace.levels; ++n) {
          const std::size_t idx =
              static_cast<std::size_t>(it) * (rep.trace.levels + 1) + n;
          pt_trace << it << ',' << n << ',' << fmt(schedule.betas[n]) << ','
                   << fmt(rep.trace.at(it, n)) << ','
                   << static_cast<int>(rep.swap_accepted[idx]) << '\n';
        }
      }
    }
  }

  std::cout << "log_Z_hat=" << fmt(final_log_z) << " Lambda_hat=" << fmt(kNan) << '\n';
}

}  // namespace

std::string resolve_out_dir(const RunConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("ASMC_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "out";
}

int run_experiment(const RunConfig& config) {
  config.validate();
  const std::filesystem::path dir = resolve_out_dir(config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << dir << ": " << ec.message()
              << '\n';
    return 1;
  }
  std::filesystem::remove(dir / ".failed", ec);

  try {
    if (config.driver == "theory") {
      open_csv(dir, "summary.csv", kSummaryHeader);
      open_csv(dir, "trace.csv", kTraceHeader);
      open_csv(dir, "schedule.csv", kScheduleHeader);
      open_csv(dir, "barrier.csv", kBarrierHeader);
      theory::print_theory_table(std::cout);
      return 0;
    }
    if (config.driver == "pt") {
      run_pt_driver(config, dir);
      return 0;
    }
    run_particle_driver(config, dir);
    return 0;
  } catch (const std::exception& e) {
    std::ofstream marker(dir / ".failed", std::ios::trunc);
    marker << e.what() << '\n';
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace asmc
