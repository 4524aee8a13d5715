"""Acceptance criteria, one test each.

Every test prints the individual checks and then a single
``ACCEPTANCE <n> PASS|FAIL`` line; run with ``pytest -s`` to see them.
"""
import time

import pytest

from wavelife import exponents as ex
from wavelife import suites

pytestmark = pytest.mark.acceptance


def _criterion(log, n, title, run, budget_s):
    t0 = time.perf_counter()
    checks = run()
    elapsed = time.perf_counter() - t0
    for c in checks:
        print("   ", c.line())
    failed = [c.name for c in checks if c.status == "FAIL"]
    skipped = [c.name for c in checks if c.status == "SKIP"]
    ok = not failed and not skipped and elapsed < budget_s
    line = (f"ACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {title} "
            f"({len(checks) - len(failed)}/{len(checks)} checks, {elapsed:.1f} s of {budget_s:g} s)")
    print(line)
    log.append(line)
    assert not failed, f"failed checks: {failed}"
    assert not skipped
    assert elapsed < budget_s, f"runtime {elapsed:.1f} s exceeds {budget_s} s"


def test_criterion_1_exponent_identities(acceptance_log):
    _criterion(acceptance_log, 1, "exponent identities", lambda: suites.suite_exponents(seed=0), 1.0)


def test_criterion_2_hypergeometric(acceptance_log):
    _criterion(acceptance_log, 2, "hypergeometric suite", lambda: suites.suite_hypergeometric(seed=0), 30.0)


def test_criterion_3_cutoffs(acceptance_log):
    _criterion(acceptance_log, 3, "cutoff bounds and weighted integral exponents", suites.suite_cutoffs, 120.0)


def test_criterion_4_y_functional(acceptance_log):
    _criterion(acceptance_log, 4, "Y functional", suites.suite_y, 30.0)


def test_criterion_5_ode_lemma(acceptance_log):
    _criterion(acceptance_log, 5, "ODE lemma bound and slope", suites.suite_ode, 60.0)


@pytest.mark.slow
def test_criterion_6_solver(acceptance_log):
    _criterion(acceptance_log, 6, "solver verification", suites.suite_solver, 300.0)


@pytest.mark.slow
def test_criterion_7_lifespan_scaling(acceptance_log):
    _criterion(acceptance_log, 7, "subcritical lifespan slopes", lambda: suites.suite_lifespan(workers=1), 1800.0)


def test_criterion_8_classification_table(acceptance_log):
    # the ODE-lemma half of this criterion is criterion 5
    _criterion(acceptance_log, 8, "classification golden table", suites.suite_classify, 60.0)


def test_criterion_9_concentration(acceptance_log):
    _criterion(acceptance_log, 9, "concentration ratios", suites.suite_concentration, 300.0)


def test_verify_detects_tampered_gamma_S(monkeypatch):
    honest = ex.gamma_S
    monkeypatch.setattr(ex, "gamma_S", lambda N, p: -honest(N, p))
    checks = suites.suite_exponents(seed=0, samples=50)
    assert any(c.status == "FAIL" for c in checks)


def test_verify_coarse_mode_skips_convergence_checks():
    rep = suites.verify_all(["hypergeometric"], coarse=True)
    status = {c["name"]: c["status"] for c in rep["checks"]}
    assert any(s == "SKIP" for s in status.values())
    assert rep["ok"] and rep["summary"]["failed"] == 0
