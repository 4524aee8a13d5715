"""Invariant and acceptance suites, shared by ``wavelife verify`` and the tests.

Every suite returns a list of :class:`Check` records; :func:`verify_all`
runs a selection and assembles a JSON-ready report.  ``coarse`` mode skips
the grid-convergence checks (they are reported as skipped, not failed).
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib import resources
from typing import Callable, Optional, Sequence

import numpy as np

from . import cutoffs, exponents as ex, hypergeometric as hg, ode_lemma, solver
from .exponents import ProblemKind, ProblemSpec

VERIFY_SCHEMA = "wavelife.verify/1"


@dataclass
class Check:
    name: str
    criterion: int
    value: Optional[float]
    tol: float
    op: str                  # how value is compared with tol: "<=", ">=", "in"
    passed: Optional[bool]
    skipped: bool = False
    detail: str = ""
    seconds: float = 0.0

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        v = "n/a" if self.value is None else f"{self.value:.6g}"
        return f"[{self.status}] {self.criterion}:{self.name} value={v} {self.op} {self.tol:g} {self.detail}".rstrip()

    def to_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        d["status"] = self.status
        if not timings:
            del d["seconds"]
        return d


def _le(name, crit, value, tol, detail=""):
    return Check(name, crit, float(value), tol, "<=", bool(value <= tol), detail=detail)


def _near(name, crit, value, target, tol, detail=""):
    """``|value - target| <= tol``."""
    d = f"target={target:g}" + (f" {detail}" if detail else "")
    return Check(name, crit, float(value), tol, f"|.-{target:g}|<=", bool(abs(value - target) <= tol), detail=d)


def _skip(name, crit, tol, op="<="):
    return Check(name, crit, None, tol, op, None, skipped=True, detail="coarse mode")


def _rate(errors) -> float:
    """Observed order from the finest pair of a halving sequence."""
    return float(math.log2(errors[-2] / errors[-1]))


# -- 1. exponent identities ------------------------------------------------

def suite_exponents(seed: int = 0, samples: int = 1000) -> list[Check]:
    out = []
    ps3 = 1.0 + math.sqrt(2.0)
    out.append(_le("gamma_S(3,1+sqrt2)=0", 1, abs(ex.gamma_S(3, ps3)), 1e-12))
    out.append(_le("p_S(3)=1+sqrt2", 1, abs(ex.p_S(3) - ps3), 1e-12))
    rng = np.random.default_rng(seed)
    Ns = rng.integers(1, 7, samples)
    ps = rng.uniform(1.01, 6.0, samples)
    gg = max(abs(ex.F_GG(int(N), p, p) - ex.Gamma_G(int(N), p)) for N, p in zip(Ns, ps))
    ss = max(abs(ex.F_SS(int(N), p, p) - ex.Gamma_S(int(N), p)) for N, p in zip(Ns, ps))
    # Gamma_S = gamma_S / (2p(p-1)); catches a sign or coefficient change in gamma_S
    gs = max(abs(ex.gamma_S(int(N), p) / (2 * p * (p - 1)) - ex.Gamma_S(int(N), p)) for N, p in zip(Ns, ps))
    out.append(_le("F_GG(N,p,p)=Gamma_G(N,p)", 1, gg, 1e-12, f"{samples} samples"))
    out.append(_le("F_SS(N,p,p)=Gamma_S(N,p)", 1, ss, 1e-12, f"{samples} samples"))
    out.append(_le("gamma_S/(2p(p-1))=Gamma_S", 1, gs, 1e-12, f"{samples} samples"))
    return out


# -- 8. classification golden table ---------------------------------------

def _golden_value(x):
    if x is None:
        return None
    return Fraction(x) if isinstance(x, str) else float(x)


def golden_entries() -> list[dict]:
    text = resources.files("wavelife").joinpath("data/classify_golden.json").read_text()
    return json.loads(text)["entries"]


def golden_mismatch(entry: dict) -> str:
    """Empty string when ``classify`` reproduces the entry, else a description."""
    spec = ProblemSpec(entry["kind"], entry["N"], _golden_value(entry["p"]), _golden_value(entry.get("q")))
    law = ex.classify(spec)
    if law.form.value != entry["form"]:
        return f"form {law.form.value} != {entry['form']}"
    if entry["form"] != "NoClaim":
        want = entry["exponent"]
        if abs(law.exponent - want) > 1e-9 * max(1.0, abs(want)):
            return f"exponent {law.exponent!r} != {want!r}"
    if law.log_corrected != entry.get("log_corrected", False):
        return "log_corrected flag differs"
    return ""


def suite_classify() -> list[Check]:
    entries = golden_entries()
    bad = [(e, golden_mismatch(e)) for e in entries]
    bad = [f"{e['kind']}(N={e['N']},p={e['p']},q={e.get('q')}): {m}" for e, m in bad if m]
    return [Check("classify golden table", 8, float(len(bad)), 0, "<=", not bad,
                  detail=f"{len(entries)} entries" + ("; " + "; ".join(bad) if bad else ""))]


# -- 2. hypergeometric -----------------------------------------------------

def quadratic_identity_grid(n: int = 20) -> float:
    """Largest relative gap of the quadratic transformation on an n^3 grid (z <= 0.9)."""
    worst = 0.0
    for a in np.linspace(0.1, 3.0, n):
        for c in np.linspace(0.75, 4.0, n):
            z = np.linspace(0.0, 0.9, n)
            lhs = hg.gauss_2f1(a, a + 0.5, c, z)
            sz = np.sqrt(z)
            rhs = (1.0 + sz) ** (-2.0 * a) * hg.gauss_2f1(2.0 * a, c - 0.5, 2.0 * c - 1.0, 2.0 * sz / (1.0 + sz))
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), np.abs(rhs)))))
    return worst


def phi_closed_form_gap(N: int, samples: int = 1000, seed: int = 0) -> float:
    rng = np.random.default_rng(seed + N)
    t = rng.uniform(0.5, 20.0, samples)
    r = rng.uniform(0.0, 0.97, samples) * t
    num = hg.phi(hg.PhiSpec(float(N), 0.0, N), r, t)
    ref = hg.closed_form_V(N, r, t)
    return float(np.max(np.abs(num - ref) / np.abs(ref)))


def wave_identity_rates(N: int, betas=(0.7, 1.5, 2.5), hs=(0.04, 0.02, 0.01), lam: float = 2.0,
                        seed: int = 0) -> list[float]:
    rng = np.random.default_rng(seed + 10 * N)
    rates = []
    for beta in betas:
        spec = hg.PhiSpec(beta, lam, N)
        t = rng.uniform(0.0, 5.0, 20)
        r = rng.uniform(0.2, 0.8, 20) * (t + lam)
        res = [hg.verify_wave_identity(spec, zip(r, t), h, r_step_ratio=0.5) for h in hs]
        rates.append(_rate(res))
    return rates


def suite_hypergeometric(seed: int = 0, coarse: bool = False) -> list[Check]:
    out = [_le("quadratic transformation identity", 2, quadratic_identity_grid(), 1e-10, "20x20x20 grid")]
    for N in (2, 3, 4):
        out.append(_le(f"Phi_N closed form N={N}", 2, phi_closed_form_gap(N, seed=seed), 1e-10, "1000 samples"))
    for N in (2, 3, 4):
        name = f"wave identity order N={N}"
        if coarse:
            out.append(_skip(name, 2, 0.2, "|.-2|<="))
            continue
        rates = wave_identity_rates(N, seed=seed)
        worst = max(rates, key=lambda x: abs(x - 2.0))
        out.append(_near(name, 2, worst, 2.0, 0.2, "worst of beta 0.7,1.5,2.5"))
    return out


# -- 3. cutoff bounds and int-phi scaling --------------------------------

INT_PHI_PS = (1.5, 2.0, 3.0)


def int_phi_betas(N: int, p: float) -> dict:
    boundary = (N + 1) / 2.0 - 1.0 / p
    return {"below": (N - 1) / 4.0, "boundary": boundary, "above": boundary + 1.0}


def suite_cutoffs() -> list[Check]:
    out = []
    for k in (2, 3, 4, 6, 8):
        spec = cutoffs.CutoffSpec(k, 10.0)
        t = np.linspace(0.0, 10.0, 200001)
        r1, r2 = cutoffs.psi_derivative_bounds(spec, t)
        out.append(_le(f"psi' and psi'' ratio bounds k={k}", 3, max(r1, r2), 1.0 + 1e-9, "2e5 points"))
    for N in (2, 3):
        for p in INT_PHI_PS:
            for label, beta in int_phi_betas(N, p).items():
                fit = cutoffs.int_phi_scaling(N, beta, p)
                out.append(_near(f"int-phi exponent N={N} p={p:g} {label}", 3, fit.measured, fit.predicted, 0.05,
                                 f"beta={beta:.4g} regime={fit.regime}"))
    return out


# -- 4. Y functional --------------------------------------------------------

def y_test_field(T: float = 40.0, N: int = 3) -> cutoffs.SpaceTimeField:
    """A smooth field concentrated near the light cone ``r = t``."""
    r = np.linspace(0.0, 1.0 + T, 2001)
    t = np.linspace(0.0, T, 801)
    R, TT = np.meshgrid(r, t)
    d = np.clip(R - TT, -1.0, 1.0)
    w = np.where(np.abs(R - TT) <= 1.0, (1.0 + np.cos(np.pi * d)) / (1.0 + TT), 0.0)
    return cutoffs.SpaceTimeField(r, t, w, N)


def suite_y() -> list[Check]:
    res = cutoffs.Y_functional(y_test_field(), [4.0, 8.0, 16.0, 32.0])
    gap = float(np.max((res.Y - res.upper) / res.upper))
    return [_le("Y'(R) R = int int w psi_R*", 4, res.derivative_rel_err, 1e-4, "vs central difference"),
            Check("Y(R) <= int int w psi_R", 4, gap, 0.0, "<=", bool(res.bound_ok),
                  detail="max (Y - upper)/upper")]


# -- 5. ODE lemma -----------------------------------------------------------

ODE_PAIRS = ((2.0, 2.0), (3.0, 2.0), (2.5, 2.5), (3.0, 3.5))
ODE_DELTAS = (0.2, 0.1, 0.05, 0.02)


def suite_ode() -> list[Check]:
    out = []
    for p1, p2 in ODE_PAIRS:
        rows = ode_lemma.delta_sweep(ode_lemma.OdiParams(0.2, p1, p2), ODE_DELTAS)
        viol = sum(r.margin < 0 for r in rows)
        out.append(Check(f"blow-up <= bound (p1,p2)=({p1:g},{p2:g})", 5, float(viol), 0, "<=", viol == 0,
                         detail=f"min margin {min(r.margin for r in rows):.4g}"))
        pred = -(p1 - 1.0) / (p1 - p2 + 1.0)
        slope = ode_lemma.loglog_slope(rows[-2:])
        out.append(_near(f"loglog slope (p1,p2)=({p1:g},{p2:g})", 5, slope, pred, 0.1 * abs(pred),
                         "smallest two deltas"))
    return out


# -- 6. solver verification -------------------------------------------------

def _linear_config(N: int, dr: float, t_max: float, power: int = 4, eps: float = 1.0, **kw):
    return solver.SolverConfig(ProblemSpec(ProblemKind.SINGLE_POWER_U, N, 2.0), solver.InitialData(power=power),
                               eps, dr, t_max, linear=True, **kw)


def dalembert_errors(drs=(0.02, 0.01, 0.005), t_max: float = 4.0) -> list[float]:
    errs = []
    for dr in drs:
        res = solver.simulate(_linear_config(1, dr, t_max))
        errs.append(max(float(np.max(np.abs(res.u[0, j] - solver.dalembert_1d(res.config.data, 1.0, res.r, tj))))
                        for j, tj in enumerate(res.t)))
    return errs


WEAK_CASES = (
    (ProblemKind.SINGLE_POWER_U, 2.0, None),
    (ProblemKind.SINGLE_POWER_UT, 2.0, None),
    (ProblemKind.COMBINED, 2.0, 3.0),
    (ProblemKind.SYSTEM_SS, 2.0, 3.0),
    (ProblemKind.SYSTEM_GG, 2.0, 2.0),
    (ProblemKind.SYSTEM_SG, 2.0, 2.0),
)


def weak_identity_rates(kind, p, q, N: int = 3, drs=(0.01, 0.005, 0.0025), R: float = 6.0,
                        phi: Optional[hg.PhiSpec] = None) -> tuple[float, list[float]]:
    test = solver.TestFunction(R, 4.0, phi)
    res = []
    for dr in drs:
        cfg = solver.SolverConfig(ProblemSpec(kind, N, p, q), solver.InitialData(power=8), 0.3, dr, R + 0.5,
                                  save_every=2)
        res.append(solver.weak_identity_residual(solver.simulate(cfg), test))
    return _rate(res), res


def suite_solver(coarse: bool = False) -> list[Check]:
    out = []
    if coarse:
        out.append(_skip("d'Alembert L_inf order N=1", 6, 0.2, "|.-2|<="))
    else:
        errs = dalembert_errors()
        out.append(_near("d'Alembert L_inf order N=1", 6, _rate(errs), 2.0, 0.2, f"errors {errs[-1]:.3g}"))
    for N in (1, 2, 3):
        res = solver.simulate(_linear_config(N, 0.02, 20.0))
        out.append(_le(f"linear energy drift N={N}", 6, solver.energy_drift(res), 1e-3, "dr=0.02 t=20"))
        front = float(np.max(solver.support_radius(res) - (1.0 + res.t)))
        out.append(_le(f"finite propagation N={N}", 6, front, 2 * 0.02, "max(r_supp - r0 - t)"))
    phi = hg.PhiSpec(2.5, 2.0, 3)
    for kind, p, q in WEAK_CASES:
        for label, ph in (("psi_R", None), ("Phi psi_R", phi)):
            name = f"weak identity order {kind.value} N=3 {label}"
            if coarse:
                out.append(_skip(name, 6, 0.3, "|.-2|<="))
                continue
            rate, res = weak_identity_rates(kind, p, q, phi=ph)
            out.append(_near(name, 6, rate, 2.0, 0.3, f"residual {res[-1]:.3g}"))
    return out


# -- 7. lifespan scaling ----------------------------------------------------

def lifespan_plans():
    """The two sharp subcritical sweeps (one decade of eps each) and their relative tolerances."""
    from .lab import SweepPlan
    d = solver.InitialData()
    s1 = ProblemSpec(ProblemKind.SINGLE_POWER_U, 1, 3.0)
    s3 = ProblemSpec(ProblemKind.SINGLE_POWER_UT, 3, 1.5)
    return [
        ("N=1 p=3 SinglePowerU", SweepPlan(solver.SolverConfig(s1, d, 0.1, 0.02, 400.0),
                                           (0.2, 0.1, 0.05, 0.02)), 0.2),
        ("N=3 p=1.5 SinglePowerUt", SweepPlan(solver.SolverConfig(s3, d, 0.1, 0.02, 600.0),
                                              (0.5, 0.25, 0.125, 0.05)), 0.25),
    ]


def suite_lifespan(workers: int = 1) -> list[Check]:
    from .lab import fit_scaling, run_sweep
    out = []
    for label, plan, tol in lifespan_plans():
        t0 = time.perf_counter()
        recs = run_sweep(plan, workers=workers)
        fit = fit_scaling(recs, plan.law, tol_rel=tol)
        mono = sum(bool(r.flag) for r in recs)
        out.append(_near(f"lifespan slope {label}", 7, fit.alpha_hat, fit.predicted_alpha,
                         tol * abs(fit.predicted_alpha),
                         f"T={', '.join(f'{r.T_num:.4g}' for r in recs)}"))
        out.append(Check(f"lifespan monotone {label}", 7, float(mono), 0, "<=", mono == 0,
                         seconds=time.perf_counter() - t0))
    return out


# -- 9. concentration -------------------------------------------------------

CONC_R = (4.0, 8.0, 16.0, 32.0, 64.0)


def concentration_results(N: int, p: float = 3.0, dr: float = 0.02):
    res = solver.simulate(_linear_config(N, dr, CONC_R[-1] + 2.0))
    return {m: solver.check_concentration(res, p, CONC_R, mode=m) for m in ("u", "ut")}


def suite_concentration() -> list[Check]:
    out = []
    for N in (1, 3):
        for mode, cr in concentration_results(N).items():
            out.append(Check(f"concentration ratio positive N={N} mode={mode}", 9, cr.inf, 0.0, ">",
                             bool(cr.inf > 0)))
            out.append(_le(f"concentration ratio stable N={N} mode={mode}", 9, cr.variation, 0.2,
                           "max/min - 1 over R=4..64"))
    return out


# -- runner -----------------------------------------------------------------

SUITES: dict[str, Callable[..., list[Check]]] = {
    "exponents": lambda o: suite_exponents(seed=o["seed"]),
    "hypergeometric": lambda o: suite_hypergeometric(seed=o["seed"], coarse=o["coarse"]),
    "cutoffs": lambda o: suite_cutoffs(),
    "y": lambda o: suite_y(),
    "ode": lambda o: suite_ode(),
    "solver": lambda o: suite_solver(coarse=o["coarse"]),
    "lifespan": lambda o: ([_skip("lifespan slopes", 7, 0.2, "|.-a|<=")] if o["coarse"]
                           else suite_lifespan(workers=o["workers"])),
    "classify": lambda o: suite_classify(),
    "concentration": lambda o: suite_concentration(),
}


def verify_all(suites: Optional[Sequence[str]] = None, coarse: bool = False, seed: int = 0,
               workers: int = 1, echo: Optional[Callable[[str], None]] = None, timings: bool = False) -> dict:
    """Run the selected suites (all by default) and return the report.

    Wall-clock seconds are left out unless ``timings`` is set, so that the
    report is reproducible byte for byte.
    """
    names = list(SUITES) if not suites else list(suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    opts = {"seed": seed, "coarse": coarse, "workers": workers}
    checks = []
    for n in names:
        t0 = time.perf_counter()
        got = SUITES[n](opts)
        dt = time.perf_counter() - t0
        for c in got:
            c.seconds = c.seconds or dt / len(got)
            if echo:
                echo(c.line())
        checks.extend((n, c) for c in got)
    failed = sum(c.status == "FAIL" for _, c in checks)
    return {
        "schema": VERIFY_SCHEMA,
        "coarse": coarse,
        "seed": seed,
        "suites": names,
        "checks": [dict(c.to_dict(timings), suite=n) for n, c in checks],
        "summary": {"passed": sum(c.status == "PASS" for _, c in checks), "failed": failed,
                    "skipped": sum(c.skipped for _, c in checks)},
        "ok": failed == 0,
    }
