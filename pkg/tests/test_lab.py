import math
from dataclasses import replace

import numpy as np
import pytest

from wavelife import lab, solver
from wavelife.exponents import DomainError, LawForm, ProblemKind, ProblemSpec, classify


def _law(kind, N, p, q=None):
    return classify(ProblemSpec(kind, N, p, q))


def test_synthetic_power_law_exact():
    eps = np.array([0.4, 0.2, 0.1, 0.05, 0.025])
    fit = lab.fit_scaling(list(zip(eps, 7.0 * eps**-2)), _law(ProblemKind.SINGLE_POWER_U, 3, 2))
    assert fit.alpha_hat == pytest.approx(-2.0, abs=1e-12)
    assert fit.stderr < 1e-10
    assert fit.verdict == "consistent" and fit.model == "log T"
    assert fit.bound_constant == pytest.approx(7.0, rel=1e-12)
    assert fit.to_dict()["schema"] == lab.FIT_SCHEMA


def test_synthetic_inconsistent():
    eps = np.array([0.4, 0.2, 0.1, 0.05])
    fit = lab.fit_scaling(list(zip(eps, eps**-1)), _law(ProblemKind.SINGLE_POWER_U, 3, 2))
    assert fit.verdict == "inconsistent" and fit.rel_error == pytest.approx(0.5)


def test_exponential_underpowered_and_consistent():
    law = _law(ProblemKind.SINGLE_POWER_UT, 3, 2)  # log T ~ eps^-1
    assert law.form is LawForm.EXPONENTIAL
    eps = np.array([1.0, 0.8, 0.6, 0.5])
    fit = lab.fit_scaling(list(zip(eps, np.exp(2.0 / eps))), law)
    assert fit.verdict == "underpowered" and fit.notes
    eps = np.array([1.0, 0.5, 0.3, 0.2])
    fit = lab.fit_scaling(list(zip(eps, np.exp(2.0 / eps))), law)
    assert fit.verdict == "consistent" and fit.alpha_hat == pytest.approx(-1.0, abs=1e-12)
    assert fit.bound_constant == pytest.approx(2.0, rel=1e-12)


def test_fit_errors():
    law = _law(ProblemKind.SINGLE_POWER_U, 3, 2)
    with pytest.raises(lab.AggregationError):
        lab.fit_scaling([(0.1, 10.0), (0.2, 5.0)], law)
    with pytest.raises(lab.DegenerateRegressionError):
        lab.fit_scaling([(0.1, 10.0)] * 4, law)
    with pytest.raises(DomainError):
        lab.fit_scaling([(0.1, 1.0)] * 4, _law(ProblemKind.SINGLE_POWER_U, 3, 3))
    with pytest.raises(DomainError):
        lab.fit_scaling([(0.1, -1.0), (0.2, 1), (0.3, 1), (0.4, 1)], law)


def test_uncertified_records_ignored():
    law = _law(ProblemKind.SINGLE_POWER_U, 3, 2)
    recs = [lab.SweepRecord(e, 3 * e**-2, True, [], [], 0.0, "threshold") for e in (0.4, 0.2, 0.1, 0.05)]
    recs.append(lab.SweepRecord(0.01, None, False, [0.02], [None], None, "none"))
    recs.append(lab.SweepRecord(0.02, 1.0, False, [0.02], [1.0], 0.5, "threshold"))
    fit = lab.fit_scaling(recs, law)
    assert fit.n_points == 4 and fit.alpha_hat == pytest.approx(-2.0, abs=1e-12)


def test_monotone_flag():
    recs = [lab.SweepRecord(e, T, True, [], [], 0.0, "threshold") for e, T in ((0.4, 10.0), (0.2, 8.0), (0.1, 50.0))]
    assert lab.check_monotone(recs) == 1
    assert recs[1].flag.startswith("non-monotone") and recs[2].flag == ""


def _template(eps=0.1):
    return solver.SolverConfig(ProblemSpec(ProblemKind.SINGLE_POWER_U, 1, 3.0), solver.InitialData(), eps, 0.02, 120.0)


def test_plan_validation():
    with pytest.raises(lab.AggregationError):
        lab.SweepPlan(_template(), ())
    with pytest.raises(DomainError):
        lab.SweepPlan(_template(), (0.1, -0.2))
    plan = lab.SweepPlan(_template(), (0.1, 0.4, 0.1, 0.2))
    assert plan.epsilons == (0.4, 0.2, 0.1)
    assert not plan.regression_ready()
    assert plan.law.form is LawForm.POWER_LAW
    assert plan.config_for(0.2).epsilon == 0.2 and plan.config_for(0.2).dr == 0.02
    assert lab.SweepPlan(_template(), (2.0, 1.0, 0.5, 0.2)).regression_ready()


def test_real_sweep_serial_equals_parallel():
    plan = lab.SweepPlan(_template(), (0.4, 0.3, 0.2, 0.15), tol=0.1)
    a = lab.run_sweep(plan, workers=1)
    b = lab.run_sweep(plan, workers=2)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]
    assert all(r.certified for r in a)
    fit = lab.fit_scaling(a, plan.law, tol_rel=0.3)
    assert fit.verdict == "consistent"
    rep = lab.sweep_report(plan, a)
    assert rep["schema"] == lab.SWEEP_SCHEMA and len(rep["records"]) == 4


def test_sweep_requires_certified_records():
    plan = lab.SweepPlan(replace(_template(), t_max=5.0), (0.1, 0.05))
    with pytest.raises(lab.AggregationError):
        lab.run_sweep(plan)
    recs = lab.run_sweep(plan, require=0)
    assert [r.certified for r in recs] == [False, False] and recs[0].cause == "none"



def test_critical_strauss_sweep_is_underpowered():
    spec = ProblemSpec(ProblemKind.SINGLE_POWER_U, 3, 1 + math.sqrt(2))
    plan = lab.SweepPlan(solver.SolverConfig(spec, solver.InitialData(), 1.0, 0.02, 60.0), (9.0, 8.0, 7.0, 6.0))
    assert plan.law.form is LawForm.EXPONENTIAL
    recs = lab.run_sweep(plan)
    fit = lab.fit_scaling(recs, plan.law)
    assert fit.model == "log log T" and fit.T_decades < 3.0
    assert fit.verdict == "underpowered"


def test_short_eps_span_is_noted():
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    fit = lab.fit_scaling(list(zip(eps, eps**-2)), _law(ProblemKind.SINGLE_POWER_U, 3, 2))
    assert fit.verdict == "consistent" and "less than one decade" in fit.notes[0]
