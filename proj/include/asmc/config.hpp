#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "asmc/engine.hpp"
#include "asmc/kernel.hpp"
#include "asmc/target.hpp"

namespace asmc {

// Flat key=value run description; every key has a default, unknown and
// duplicate keys are rejected.
struct RunConfig {
  std::string driver = "ssmc";  // ssmc | sais | ais_zja | pt | theory

  std::string target = "gaussian_shift";  // gaussian_shift | mixture
  std::size_t dim = 1;
  double gauss_mu0 = 0.0;
  double gauss_mu1 = 1.0;
  double gauss_sigma = 1.0;
  double mix_ref_sigma = 2.0;
  double mix_weight = 0.5;
  double mix_mu1 = -1.0;
  double mix_sigma1 = 0.5;
  double mix_mu2 = 1.0;
  double mix_sigma2 = 0.5;

  std::string kernel = "idealized";  // idealized | rwmh | identity
  std::vector<double> rwmh_step_sizes = {0.1, 1.0, 10.0};
  int rwmh_sweeps = 1;

  std::size_t n = 1024;
  int rounds = 1;
  int iterations = 1024; // pt sweep count
  int levels = 8;        // pt level count
  std::string policy = "adaptive_ess";
  double rho = 0.5;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 -> detected cores
  int replicates = 1;
  std::string out_dir;  // empty -> $ASMC_OUT_DIR, else "out"
  bool timing = false;  // false pins wall_clock_seconds to 0 for byte-stable output
  int pt_burn_in = -1;
  double zja_delta_star = 0.0;
  int zja_steps = 32;
  std::uint64_t mem_cap_mb = 4096;
  std::size_t chunk = 0;

  void validate() const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

std::unique_ptr<AnnealedTarget> make_target(const RunConfig& config);
Kernel make_kernel(const RunConfig& config);
ResamplePolicy parse_policy(const std::string& name);

}  // namespace asmc
