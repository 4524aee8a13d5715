import json
import math

import numpy as np
import pytest

from wavelife import solver
from wavelife.exponents import DomainError, ProblemKind, ProblemSpec
from wavelife.hypergeometric import PhiSpec


def _linear(N, dr=0.02, t_max=10.0, **kw):
    return solver.SolverConfig(ProblemSpec(ProblemKind.SINGLE_POWER_U, N, 2.0), solver.InitialData(), 1.0, dr,
                               t_max, linear=True, **kw)


def test_dalembert_second_order():
    errs = []
    for dr in (0.02, 0.01):
        res = solver.simulate(_linear(1, dr, 4.0))
        errs.append(max(np.max(np.abs(res.u[0, j] - solver.dalembert_1d(res.config.data, 1.0, res.r, tj)))
                        for j, tj in enumerate(res.t)))
    assert errs[1] < 1e-3
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.25)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_linear_energy_and_support(N):
    res = solver.simulate(_linear(N))
    assert solver.energy_drift(res) < 1e-3
    assert np.all(solver.support_radius(res) <= 1.0 + res.t + 2 * 0.02 + 1e-12)
    assert res.report.cause == "none" and res.report.T_num is None


def test_support_nodes_stay_zero():
    res = solver.simulate(_linear(3, t_max=4.0))
    far = res.r > 1.0 + res.t[-1] + 3 * res.config.dr
    assert np.all(res.u[0, -1, far] == 0.0)


def test_ss_symmetric_when_p_equals_q():
    cfg = solver.SolverConfig(ProblemSpec(ProblemKind.SYSTEM_SS, 3, 2.0, 2.0), solver.InitialData(), 0.5, 0.02, 8.0)
    res = solver.simulate(cfg)
    assert np.array_equal(res.u[0], res.u[1])


def test_nonlinearity_table_signs():
    # the combined problem drives u by |u_t|^p + |u|^q
    spec = ProblemSpec(ProblemKind.COMBINED, 3, 2.0, 3.0)
    u = np.array([[0.5]])
    ut = np.array([[-2.0]])
    assert solver.nonlinearity(spec, u, ut)[0, 0] == pytest.approx(4.0 + 0.125)
    assert solver.nonlinearity(spec, u, ut, linear=True)[0, 0] == 0.0


@pytest.mark.parametrize("kind", [ProblemKind.SINGLE_POWER_U, ProblemKind.SINGLE_POWER_UT])
def test_uniform_data_matches_ode(kind):
    d = solver.InitialData("uniform", 1.0, 1.0, 1.0)
    cfg = solver.SolverConfig(ProblemSpec(kind, 3, 2.0), d, 0.5, 0.005, 20.0, laplacian=False)
    res = solver.simulate(cfg)
    T = solver.ode_blowup_time(2.0, 0.5, 0.5, cfg.threshold, kind)
    assert res.report.cause == "threshold"
    assert abs(res.report.T_num - T) / T < 0.01


def test_config_errors():
    spec = ProblemSpec(ProblemKind.SINGLE_POWER_U, 3, 2.0)
    d = solver.InitialData()
    with pytest.raises(solver.CFLError):
        solver.SolverConfig(spec, d, 1.0, 0.02, 5.0, cfl=1.2)
    with pytest.raises(solver.CFLError):
        solver.simulate(solver.SolverConfig(spec, d, 1.0, 0.02, 5.0, cfl=0.99))
    with pytest.raises(solver.ContainmentError):
        solver.SolverConfig(spec, d, 1.0, 0.02, 5.0, r_max=4.0)
    with pytest.raises(DomainError):
        solver.SolverConfig(spec, solver.InitialData("uniform"), 1.0, 0.02, 5.0)
    with pytest.raises(DomainError):
        solver.InitialData(amp_g=2.0)
    with pytest.raises(DomainError):
        solver.InitialData("scaled_bump", amp_g=0.0)


def test_Ig_closed_form():
    from scipy import integrate
    d = solver.InitialData()
    num = 4 * math.pi * integrate.quad(lambda r: d.g(r) * r * r, 0, 1)[0]
    assert d.Ig(3) == pytest.approx(num, rel=1e-12)
    assert solver.InitialData(power=2).Ig(1) == pytest.approx(2 * 8 / 15, rel=1e-12)


def test_simulation_deterministic_and_roundtrip(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[problem]\nkind = SinglePowerU\nN = 1\np = 3\n\n[solver]\nepsilon = 0.5\ndr = 0.02\n"
                   "t_max = 30\n")
    cfg = solver.load_config(str(ini))
    assert cfg.spec.kind is ProblemKind.SINGLE_POWER_U and cfg.spec.p == 3.0
    a, b = solver.simulate(cfg), solver.simulate(cfg)
    assert a.report.T_num == b.report.T_num and a.report.cause == "threshold"
    paths = solver.write_outputs(a, str(tmp_path / "o"), "csv")
    doc = json.loads(open(paths[0]).read())
    assert doc["report"]["T_num"] == a.report.T_num
    assert open(paths[1]).readline().strip() == "field,t,r,value,dt_value"
    with pytest.raises(FileNotFoundError):
        solver.load_config(str(tmp_path / "missing.ini"))


def test_weak_identity_small_residual():
    cfg = solver.SolverConfig(ProblemSpec(ProblemKind.COMBINED, 3, 2.0, 3.0), solver.InitialData(power=8), 0.3,
                              0.01, 6.5, save_every=2)
    res = solver.simulate(cfg)
    assert solver.weak_identity_residual(res, solver.TestFunction(6.0)) < 1e-3
    assert solver.weak_identity_residual(res, solver.TestFunction(6.0, phi=PhiSpec(2.5, 2.0, 3))) < 1e-3


def test_weak_identity_residual_scale_invariant_in_linear_regime():
    def run(amp):
        cfg = solver.SolverConfig(ProblemSpec(ProblemKind.SINGLE_POWER_UT, 3, 2.0),
                                  solver.InitialData("scaled_bump", amp_f=amp, amp_g=amp), 1.0, 0.05, 5.0,
                                  linear=True)
        return solver.weak_identity_residual(solver.simulate(cfg), solver.TestFunction(4.0))
    assert run(1e-200) == pytest.approx(run(1.0), rel=1e-9)


def test_weak_identity_errors():
    res = solver.simulate(_linear(3, t_max=3.0))
    with pytest.raises(solver.SupportError):
        solver.weak_identity_residual(res, solver.TestFunction(4.0))
    with pytest.raises(DomainError):
        solver.weak_identity_residual(res, solver.TestFunction(2.0, phi=PhiSpec(1.0, 0.5, 3)))
    with pytest.raises(DomainError):
        solver.weak_identity_residual(res, solver.TestFunction(2.0, phi=PhiSpec(1.0, 2.0, 2)))


def test_concentration_epsilon_invariant():
    R = (4.0, 8.0)
    a = solver.check_concentration(solver.simulate(_linear(3, t_max=10.0)), 3.0, R)
    cfg = solver.SolverConfig(ProblemSpec(ProblemKind.SINGLE_POWER_U, 3, 2.0), solver.InitialData(), 0.01, 0.02,
                              10.0, linear=True)
    b = solver.check_concentration(solver.simulate(cfg), 3.0, R)
    assert np.allclose(a.ratios, b.ratios, rtol=1e-10)
    assert a.inf > 0
    with pytest.raises(ValueError):
        solver.check_concentration(solver.simulate(cfg), 3.0, R, mode="v")


def test_measure_lifespan_certified():
    cfg = solver.SolverConfig(ProblemSpec(ProblemKind.SINGLE_POWER_U, 1, 3.0), solver.InitialData(), 0.1, 0.02, 300.0)
    m = solver.measure_lifespan(cfg, tol=0.05)
    assert m.converged and m.cause == "threshold"
    assert m.dr_values[:2] == [0.02, 0.01] and m.rel_change < 0.05
    assert m.to_dict()["T_num"] == m.T_num


def test_measure_lifespan_uncertified():
    cfg = solver.SolverConfig(ProblemSpec(ProblemKind.SINGLE_POWER_U, 3, 3.0), solver.InitialData(), 0.1, 0.05, 10.0)
    m = solver.measure_lifespan(cfg)
    assert m.T_num is None and not m.converged and m.cause == "none"
