#pragma once

#include <string>

#include "asmc/config.hpp"

namespace asmc {

// Fixed CSV headers, shared by the writer and the `schema` subcommand.
inline constexpr const char* kSummaryHeader =
    "round,N,T,log_Z_hat,elbo_hat,Lambda_hat,kernel_applications,wall_clock_seconds";
inline constexpr const char* kTraceHeader =
    "round,t,beta,log_g0,log_g1,log_g2,ess,resampled,cum_log_Z";
inline constexpr const char* kScheduleHeader = "round,t,beta";
inline constexpr const char* kBarrierHeader = "round,t,beta,D_hat,Lambda_hat,lambda_hat";
inline constexpr const char* kPtTraceHeader = "iteration,level,beta,V,swap_accepted";

// Output directory: config value, else $ASMC_OUT_DIR, else "out".
std::string resolve_out_dir(const RunConfig& config);

// Runs the configured driver over all replicates, writes the CSV outputs
// into the output directory, and prints the headline estimates. Failures
// leave a `.failed` marker next to any partial files and return nonzero.
int run_experiment(const RunConfig& config);

}  // namespace asmc
