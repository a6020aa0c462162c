#include "asmc/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "asmc/errors.hpp"

namespace asmc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& what, int line, const std::string& key) {
  throw config_error("config line " + std::to_string(line) + ", key '" + key + "': " + what,
                     line, key);
}

double to_double(const std::string& v, int line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE) {
    fail("expected a number, got '" + v + "'", line, key);
  }
  return out;
}

long long to_int(const std::string& v, int line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const long long out = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE) {
    fail("expected an integer, got '" + v + "'", line, key);
  }
  return out;
}

std::uint64_t to_uint(const std::string& v, int line, const std::string& key) {
  if (!v.empty() && v[0] == '-') fail("expected a non-negative integer", line, key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long out = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE) {
    fail("expected a non-negative integer, got '" + v + "'", line, key);
  }
  return out;
}

bool to_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail("expected true/false, got '" + v + "'", line, key);
}

std::vector<double> to_double_list(const std::string& v, int line, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail("empty element in list", line, key);
    out.push_back(to_double(item, line, key));
  }
  if (out.empty()) fail("expected a comma-separated list of numbers", line, key);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  const auto bad = [](const std::string& what, const std::string& key) {
    throw config_error("key '" + key + "': " + what, 0, key);
  };
  static const std::set<std::string> drivers = {"ssmc", "sais", "ais_zja", "pt", "theory"};
  static const std::set<std::string> targets = {"gaussian_shift", "mixture"};
  static const std::set<std::string> kernels = {"idealized", "rwmh", "identity"};
  if (!drivers.count(driver)) bad("unknown driver '" + driver + "'", "driver");
  if (!targets.count(target)) bad("unknown target '" + target + "'", "target");
  if (!kernels.count(kernel)) bad("unknown kernel '" + kernel + "'", "kernel");
  parse_policy(policy);
  if (dim < 1) bad("dim must be at least 1", "dim");
  if (!(gauss_sigma > 0.0)) bad("gauss_sigma must be positive", "gauss_sigma");
  if (!(mix_ref_sigma > 0.0)) bad("mix_ref_sigma must be positive", "mix_ref_sigma");
  if (!(mix_weight > 0.0 && mix_weight < 1.0)) bad("mix_weight must lie in (0, 1)", "mix_weight");
  if (!(mix_sigma1 > 0.0)) bad("mix_sigma1 must be positive", "mix_sigma1");
  if (!(mix_sigma2 > 0.0)) bad("mix_sigma2 must be positive", "mix_sigma2");
  for (const double s : rwmh_step_sizes) {
    if (!(s > 0.0)) bad("step sizes must be positive", "rwmh_step_sizes");
  }
  if (rwmh_step_sizes.empty()) bad("at least one step size required", "rwmh_step_sizes");
  if (rwmh_sweeps < 1) bad("rwmh_sweeps must be at least 1", "rwmh_sweeps");
  if (n < 1) bad("n must be at least 1", "n");
  if (rounds < 1) bad("rounds must be at least 1", "rounds");
  if (iterations < 1) bad("iterations must be at least 1", "iterations");
  if (levels < 1) bad("levels must be at least 1", "levels");
  if (!(rho >= 0.0 && rho <= 1.0)) bad("rho must lie in [0, 1]", "rho");
  if (workers < 0) bad("workers must be non-negative", "workers");
  if (replicates < 1) bad("replicates must be at least 1", "replicates");
  if (pt_burn_in >= iterations) bad("pt_burn_in must leave recorded iterations", "pt_burn_in");
  if (pt_burn_in < -1) bad("pt_burn_in must be -1 or non-negative", "pt_burn_in");
  if (!(zja_delta_star >= 0.0)) bad("zja_delta_star must be non-negative", "zja_delta_star");
  if (zja_steps < 1) bad("zja_steps must be at least 1", "zja_steps");
  if (mem_cap_mb < 1) bad("mem_cap_mb must be at least 1", "mem_cap_mb");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail("expected key=value", line_no, line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key", line_no, key);
    if (!seen.insert(key).second) fail("duplicate key", line_no, key);

    if (key == "driver") config.driver = value;
    else if (key == "target") config.target = value;
    else if (key == "dim") config.dim = static_cast<std::size_t>(to_uint(value, line_no, key));
    else if (key == "gauss_mu0") config.gauss_mu0 = to_double(value, line_no, key);
    else if (key == "gauss_mu1") config.gauss_mu1 = to_double(value, line_no, key);
    else if (key == "gauss_sigma") config.gauss_sigma = to_double(value, line_no, key);
    else if (key == "mix_ref_sigma") config.mix_ref_sigma = to_double(value, line_no, key);
    else if (key == "mix_weight") config.mix_weight = to_double(value, line_no, key);
    else if (key == "mix_mu1") config.mix_mu1 = to_double(value, line_no, key);
    else if (key == "mix_sigma1") config.mix_sigma1 = to_double(value, line_no, key);
    else if (key == "mix_mu2") config.mix_mu2 = to_double(value, line_no, key);
    else if (key == "mix_sigma2") config.mix_sigma2 = to_double(value, line_no, key);
    else if (key == "kernel") config.kernel = value;
    else if (key == "rwmh_step_sizes") config.rwmh_step_sizes = to_double_list(value, line_no, key);
    else if (key == "rwmh_sweeps") config.rwmh_sweeps = static_cast<int>(to_int(value, line_no, key));
    else if (key == "n") {
      const long long v = to_int(value, line_no, key);
      if (v < 1) fail("n must be at least 1", line_no, key);
      config.n = static_cast<std::size_t>(v);
    }
    else if (key == "rounds") config.rounds = static_cast<int>(to_int(value, line_no, key));
    else if (key == "iterations") config.iterations = static_cast<int>(to_int(value, line_no, key));
    else if (key == "levels") config.levels = static_cast<int>(to_int(value, line_no, key));
    else if (key == "policy") config.policy = value;
    else if (key == "rho") config.rho = to_double(value, line_no, key);
    else if (key == "seed") config.seed = to_uint(value, line_no, key);
    else if (key == "workers") config.workers = static_cast<int>(to_int(value, line_no, key));
    else if (key == "replicates") config.replicates = static_cast<int>(to_int(value, line_no, key));
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "timing") config.timing = to_bool(value, line_no, key);
    else if (key == "pt_burn_in") config.pt_burn_in = static_cast<int>(to_int(value, line_no, key));
    else if (key == "zja_delta_star") config.zja_delta_star = to_double(value, line_no, key);
    else if (key == "zja_steps") config.zja_steps = static_cast<int>(to_int(value, line_no, key));
    else if (key == "mem_cap_mb") config.mem_cap_mb = to_uint(value, line_no, key);
    else if (key == "chunk") config.chunk = static_cast<std::size_t>(to_uint(value, line_no, key));
    else fail("unknown key", line_no, key);
  }
  config.validate();
  return config;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot open config file '" + path + "'", 0, "");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::unique_ptr<AnnealedTarget> make_target(const RunConfig& config) {
  if (config.target == "gaussian_shift") {
    return std::make_unique<GaussianShiftTarget>(config.gauss_mu0, config.gauss_mu1,
                                                 config.gauss_sigma, config.dim);
  }
  return std::make_unique<MixtureTarget>(config.mix_ref_sigma, config.mix_weight,
                                         config.mix_mu1, config.mix_sigma1, config.mix_mu2,
                                         config.mix_sigma2, config.dim);
}

Kernel make_kernel(const RunConfig& config) {
  Kernel kernel;
  if (config.kernel == "idealized") kernel.kind = KernelKind::idealized_exact;
  else if (config.kernel == "rwmh") kernel.kind = KernelKind::rwmh_cycle;
  else kernel.kind = KernelKind::identity;
  kernel.step_sizes = config.rwmh_step_sizes;
  kernel.sweeps = config.rwmh_sweeps;
  return kernel;
}

ResamplePolicy parse_policy(const std::string& name) {
  if (name == "never") return ResamplePolicy::never;
  if (name == "always") return ResamplePolicy::always;
  if (name == "adaptive_ess") return ResamplePolicy::adaptive_ess;
  if (name == "stabilized") return ResamplePolicy::stabilized;
  throw config_error("unknown policy '" + name + "'", 0, "policy");
}

}  // namespace asmc
