#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "asmc/drivers.hpp"
#include "asmc/engine.hpp"
#include "asmc/kernel.hpp"
#include "asmc/pt.hpp"
#include "asmc/schedule.hpp"
#include "asmc/target.hpp"
#include "asmc/theory.hpp"

namespace py = pybind11;
using namespace asmc;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Annealed SMC samplers with adaptive schedules";

  py::class_<AnnealedTarget>(m, "AnnealedTarget")
      .def("dim", &AnnealedTarget::dim)
      .def("potential",
           [](const AnnealedTarget& t, const std::vector<double>& x) {
             return t.potential(x);
           })
      .def("log_reference",
           [](const AnnealedTarget& t, const std::vector<double>& x) {
             return t.log_reference(x);
           })
      .def("log_gamma",
           [](const AnnealedTarget& t, double beta, const std::vector<double>& x) {
             return t.log_gamma(beta, x);
           })
      .def("analytic_log_z", &AnnealedTarget::analytic_log_z)
      .def("analytic_delta", &AnnealedTarget::analytic_delta)
      .def("analytic_discrepancy", &AnnealedTarget::analytic_discrepancy);

  py::class_<GaussianShiftTarget, AnnealedTarget>(m, "GaussianShiftTarget")
      .def(py::init<double, double, double, std::size_t>(), py::arg("mu0"), py::arg("mu1"),
           py::arg("sigma"), py::arg("dim") = 1)
      .def("z", &GaussianShiftTarget::z);

  py::class_<MixtureTarget, AnnealedTarget>(m, "MixtureTarget")
      .def(py::init<double, double, double, double, double, double, std::size_t>(),
           py::arg("ref_sigma"), py::arg("weight"), py::arg("mu1"), py::arg("sigma1"),
           py::arg("mu2"), py::arg("sigma2"), py::arg("dim") = 1);

  py::enum_<KernelKind>(m, "KernelKind")
      .value("idealized_exact", KernelKind::idealized_exact)
      .value("rwmh_cycle", KernelKind::rwmh_cycle)
      .value("identity", KernelKind::identity);

  py::class_<Kernel>(m, "Kernel")
      .def(py::init<>())
      .def_readwrite("kind", &Kernel::kind)
      .def_readwrite("step_sizes", &Kernel::step_sizes)
      .def_readwrite("sweeps", &Kernel::sweeps);

  py::class_<Schedule>(m, "Schedule")
      .def(py::init<>())
      .def_readwrite("betas", &Schedule::betas)
      .def_static("uniform", &Schedule::uniform, py::arg("steps"))
      .def("steps", &Schedule::steps);

  py::enum_<ResamplePolicy>(m, "ResamplePolicy")
      .value("never", ResamplePolicy::never)
      .value("always", ResamplePolicy::always)
      .value("adaptive_ess", ResamplePolicy::adaptive_ess)
      .value("stabilized", ResamplePolicy::stabilized);

  py::class_<IncrementStats>(m, "IncrementStats")
      .def_readonly("log_g0", &IncrementStats::log_g0)
      .def_readonly("log_g1", &IncrementStats::log_g1)
      .def_readonly("log_g2", &IncrementStats::log_g2)
      .def("steps", &IncrementStats::steps);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("schedule", &RunReport::schedule)
      .def_readonly("n_particles", &RunReport::n_particles)
      .def_readonly("log_z_hat", &RunReport::log_z_hat)
      .def_readonly("elbo_hat", &RunReport::elbo_hat)
      .def_readonly("stats", &RunReport::stats)
      .def_readonly("resample_times", &RunReport::resample_times)
      .def_readonly("ess_trace", &RunReport::ess_trace)
      .def_readonly("cum_log_z", &RunReport::cum_log_z)
      .def_readonly("resampled", &RunReport::resampled)
      .def_readonly("kernel_applications", &RunReport::kernel_applications)
      .def_readonly("wall_seconds", &RunReport::wall_seconds);

  py::class_<RunOptions>(m, "RunOptions")
      .def(py::init<>())
      .def_readwrite("n_particles", &RunOptions::n_particles)
      .def_readwrite("policy", &RunOptions::policy)
      .def_readwrite("rho", &RunOptions::rho)
      .def_readwrite("seed", &RunOptions::seed)
      .def_readwrite("round", &RunOptions::round)
      .def_readwrite("workers", &RunOptions::workers);

  m.def("run_smc", &run_smc, py::arg("target"), py::arg("kernel"), py::arg("schedule"),
        py::arg("options"), py::call_guard<py::gil_scoped_release>());
  m.def("ess", [](const std::vector<double>& lw) { return ess(lw); });

  py::class_<BarrierEstimate>(m, "BarrierEstimate")
      .def(py::init<>())
      .def_readwrite("lambda_knots", &BarrierEstimate::lambda)
      .def_readwrite("beta", &BarrierEstimate::beta)
      .def("total", &BarrierEstimate::total);

  m.def("discrepancy_hat", &discrepancy_hat, py::arg("stats"), py::arg("t"));
  m.def("cess", &cess, py::arg("stats"), py::arg("t"), py::arg("n_particles"));
  m.def("barrier_estimate", &barrier_estimate, py::arg("stats"), py::arg("schedule"));
  m.def("generate_schedule", &generate_schedule, py::arg("estimate"), py::arg("t_new"));
  m.def("local_barrier", &local_barrier, py::arg("estimate"));

  py::enum_<DriverMode>(m, "DriverMode")
      .value("ssmc", DriverMode::ssmc)
      .value("sais", DriverMode::sais);

  py::class_<BudgetPlan>(m, "BudgetPlan")
      .def_readonly("n_particles", &BudgetPlan::n_particles)
      .def_readonly("steps", &BudgetPlan::steps);
  m.def("budget", &budget, py::arg("n_particles"), py::arg("steps"), py::arg("dim"),
        py::arg("memory_cap_bytes"), py::arg("mode"));

  py::class_<DriverOptions>(m, "DriverOptions")
      .def(py::init<>())
      .def_readwrite("n_particles", &DriverOptions::n_particles)
      .def_readwrite("rounds", &DriverOptions::rounds)
      .def_readwrite("policy", &DriverOptions::policy)
      .def_readwrite("rho", &DriverOptions::rho)
      .def_readwrite("seed", &DriverOptions::seed)
      .def_readwrite("workers", &DriverOptions::workers)
      .def_readwrite("memory_cap_bytes", &DriverOptions::memory_cap_bytes)
      .def_readwrite("chunk", &DriverOptions::chunk);

  py::class_<RoundResult>(m, "RoundResult")
      .def_readonly("round", &RoundResult::round)
      .def_readonly("report", &RoundResult::report)
      .def_readonly("barrier", &RoundResult::barrier);

  m.def("run_ssmc", &run_ssmc, py::arg("target"), py::arg("kernel"), py::arg("options"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_sais", &run_sais, py::arg("target"), py::arg("kernel"), py::arg("options"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_sais_single", &run_sais_single, py::arg("target"), py::arg("kernel"),
        py::arg("schedule"), py::arg("options"), py::arg("chunk") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<ZjaOptions>(m, "ZjaOptions")
      .def(py::init<>())
      .def_readwrite("n_particles", &ZjaOptions::n_particles)
      .def_readwrite("target_steps", &ZjaOptions::target_steps)
      .def_readwrite("delta_star", &ZjaOptions::delta_star)
      .def_readwrite("seed", &ZjaOptions::seed)
      .def_readwrite("workers", &ZjaOptions::workers)
      .def_readwrite("max_steps", &ZjaOptions::max_steps);

  py::class_<ZjaOutcome>(m, "ZjaOutcome")
      .def_readonly("rounds", &ZjaOutcome::rounds)
      .def_readonly("delta_star", &ZjaOutcome::delta_star)
      .def_readonly("warning", &ZjaOutcome::warning);

  m.def("run_zja", &run_zja, py::arg("target"), py::arg("kernel"), py::arg("options"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<PtOptions>(m, "PtOptions")
      .def(py::init<>())
      .def_readwrite("iterations", &PtOptions::iterations)
      .def_readwrite("burn_in", &PtOptions::burn_in)
      .def_readwrite("seed", &PtOptions::seed)
      .def_readwrite("round", &PtOptions::round);

  py::class_<PotentialTrace>(m, "PotentialTrace")
      .def_readonly("iterations", &PotentialTrace::iterations)
      .def_readonly("levels", &PotentialTrace::levels)
      .def_readonly("values", &PotentialTrace::values)
      .def("at", &PotentialTrace::at, py::arg("iteration"), py::arg("level"));

  py::class_<PtReport>(m, "PtReport")
      .def_readonly("schedule", &PtReport::schedule)
      .def_readonly("iterations", &PtReport::iterations)
      .def_readonly("burn_in", &PtReport::burn_in)
      .def_readonly("log_z_hat", &PtReport::log_z_hat)
      .def_readonly("trace", &PtReport::trace)
      .def_readonly("swap_accepted", &PtReport::swap_accepted)
      .def_readonly("swap_attempts", &PtReport::swap_attempts)
      .def_readonly("swap_accepts", &PtReport::swap_accepts)
      .def_readonly("kernel_applications", &PtReport::kernel_applications)
      .def_readonly("wall_seconds", &PtReport::wall_seconds);

  m.def("run_pt", &run_pt, py::arg("target"), py::arg("kernel"), py::arg("schedule"),
        py::arg("options"), py::call_guard<py::gil_scoped_release>());
  m.def("stepping_stone", &stepping_stone, py::arg("trace"), py::arg("schedule"),
        py::arg("burn_in"));
  m.def("lambda_pt_estimate", &lambda_pt_estimate, py::arg("target"), py::arg("beta"),
        py::arg("samples"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());
  m.def("lambda_pt_chain_estimate", &lambda_pt_chain_estimate, py::arg("target"),
        py::arg("kernel"), py::arg("beta"), py::arg("iterations"), py::arg("burn_in"),
        py::arg("seed"), py::call_guard<py::gil_scoped_release>());

  auto th = m.def_submodule("theory", "Closed-form variance model");
  th.def("rel_variance", &theory::rel_variance, py::arg("d_total"), py::arg("r_eff"),
         py::arg("n_particles"));
  th.def("log1p_rel_variance", &theory::log1p_rel_variance, py::arg("d_total"),
         py::arg("r_eff"), py::arg("n_particles"));
  th.def("solve_r_eff", &theory::solve_r_eff, py::arg("d_total"), py::arg("n_particles"),
         py::arg("observed_rel_var"));

  py::class_<theory::ParticleBounds>(th, "ParticleBounds")
      .def_readonly("n_min", &theory::ParticleBounds::n_min)
      .def_readonly("n_max", &theory::ParticleBounds::n_max);
  th.def("particle_bounds", &theory::particle_bounds, py::arg("lambda_total"),
         py::arg("kappa"), py::arg("r_eff"), py::arg("t_steps"), py::arg("eps"));

  py::enum_<theory::Regime>(th, "Regime")
      .value("coarse", theory::Regime::coarse)
      .value("stable", theory::Regime::stable)
      .value("dense", theory::Regime::dense);
  th.def("classify_regime", &theory::classify_regime, py::arg("alpha_r"), py::arg("alpha_t"));
  th.def("regime_name", &theory::regime_name, py::arg("regime"));

  py::class_<theory::REffBounds>(th, "REffBounds")
      .def_readonly("lower", &theory::REffBounds::lower)
      .def_readonly("upper", &theory::REffBounds::upper);
  th.def("stabilized_r_eff_bounds", &theory::stabilized_r_eff_bounds, py::arg("lambda_total"),
         py::arg("kappa"), py::arg("t_steps"), py::arg("rho"));
}
