import math

import asmc


def test_flat_target_is_exact():
    target = asmc.GaussianShiftTarget(0.0, 0.0, 1.0, 1)
    opts = asmc.RunOptions()
    opts.n_particles = 64
    opts.policy = asmc.ResamplePolicy.never
    opts.seed = 3
    report = asmc.run_smc(target, asmc.Kernel(), asmc.Schedule.uniform(4), opts)
    assert report.log_z_hat == 0.0
    assert report.elbo_hat == 0.0
    assert report.resample_times == [4]


def test_streaming_matches_in_memory():
    target = asmc.GaussianShiftTarget(0.0, 1.0, 1.0, 1)
    schedule = asmc.Schedule.uniform(6)
    opts = asmc.RunOptions()
    opts.n_particles = 128
    opts.policy = asmc.ResamplePolicy.never
    opts.seed = 11
    a = asmc.run_smc(target, asmc.Kernel(), schedule, opts)
    b = asmc.run_sais_single(target, asmc.Kernel(), schedule, opts)
    assert a.log_z_hat == b.log_z_hat
    assert a.stats.log_g1 == b.stats.log_g1


def test_schedule_generation_round_trip():
    est = asmc.BarrierEstimate()
    est.beta = [0.0, 0.25, 0.5, 1.0]
    est.lambda_knots = [0.0, 1.0, 2.0, 3.0]
    out = asmc.generate_schedule(est, 3)
    assert max(abs(b - e) for b, e in zip(out.betas, est.beta)) < 1e-12


def test_theory_helpers():
    rv = asmc.theory.rel_variance(1.0, 1.0, 1.0)
    assert abs(rv - (math.e - 1.0)) < 1e-12
    solved = asmc.theory.solve_r_eff(4.0, 256.0, asmc.theory.rel_variance(4.0, 8.0, 256.0))
    assert abs(solved - 8.0) < 1e-5
    bounds = asmc.theory.stabilized_r_eff_bounds(2.0, 1.0, 8.0, math.exp(-1.0))
    assert abs(bounds.lower - 1.0) < 1e-12
    assert abs(bounds.upper - 1.5) < 1e-12


def test_round_driver():
    target = asmc.GaussianShiftTarget(0.0, 1.0, 1.0, 1)
    opts = asmc.DriverOptions()
    opts.n_particles = 32
    opts.rounds = 2
    opts.seed = 5
    rounds = asmc.run_ssmc(target, asmc.Kernel(), opts)
    assert [r.round for r in rounds] == [1, 2]
    assert rounds[1].report.n_particles == 46  # ceil(32 sqrt 2)
    assert rounds[1].report.schedule.steps() == 2
    assert math.isfinite(rounds[1].barrier.total())


if __name__ == "__main__":
    for _name in sorted(list(globals())):
        if _name.startswith("test_"):
            globals()[_name]()
            print(_name, "ok")
