"""Lifespan sweeps over eps and scaling-law regression.

A sweep measures ``T_num(eps)`` (with the grid certificate of
:func:`wavelife.solver.measure_lifespan`) for a list of amplitudes; the fit
compares the slope of ``log T`` (PowerLaw) or ``log log T`` (Exponential)
against ``log eps`` with the classifier's prediction.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .exponents import DomainError, LawForm, LifespanLaw, classify
from .solver import SolverConfig, measure_lifespan

SWEEP_SCHEMA = "wavelife.sweep/1"
FIT_SCHEMA = "wavelife.fit/1"
MIN_POINTS = 4


class AggregationError(RuntimeError):
    """Too few certified records for a regression."""


class DegenerateRegressionError(ValueError):
    pass


@dataclass(frozen=True)
class SweepPlan:
    """Amplitudes, a solver template and the law they are compared with.

    ``template.epsilon`` is replaced by each entry of ``epsilons``; the law
    defaults to ``classify(template.spec)``.
    """

    template: SolverConfig
    epsilons: tuple
    law: Optional[LifespanLaw] = None
    tol: float = 0.05
    max_refinements: int = 2

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps:
            raise AggregationError("no epsilon values")
        if any(not e > 0 for e in eps):
            raise DomainError("epsilons must be positive")
        object.__setattr__(self, "epsilons", tuple(sorted(set(eps), reverse=True)))
        if self.law is None:
            object.__setattr__(self, "law", classify(self.template.spec))

    @property
    def spec(self):
        return self.template.spec

    @property
    def decades(self) -> float:
        return math.log10(self.epsilons[0] / self.epsilons[-1])

    def regression_ready(self) -> bool:
        return len(self.epsilons) >= MIN_POINTS and self.decades >= 1.0 - 1e-12

    def config_for(self, eps: float) -> SolverConfig:
        return replace(self.template, epsilon=eps)


@dataclass
class SweepRecord:
    epsilon: float
    T_num: Optional[float]
    certified: bool
    dr_values: list
    T_values: list
    rel_change: Optional[float]
    cause: str
    flag: str = ""

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "T_num": self.T_num, "certified": self.certified,
                "dr_values": self.dr_values, "T_values": self.T_values,
                "rel_change": self.rel_change, "cause": self.cause, "flag": self.flag}


def _run_one(args) -> SweepRecord:
    config, tol, max_ref, backend = args
    m = measure_lifespan(config, tol=tol, max_refinements=max_ref, backend=backend)
    return SweepRecord(config.epsilon, m.T_num, m.converged, m.dr_values, m.T_values, m.rel_change, m.cause)


def check_monotone(records: Sequence[SweepRecord]) -> int:
    """Flag certified records whose T decreases as eps decreases; returns the count."""
    cert = [r for r in sorted(records, key=lambda r: -r.epsilon) if r.certified]
    bad = 0
    for prev, cur in zip(cert, cert[1:]):
        if cur.T_num < prev.T_num:
            cur.flag = "non-monotone (resolution artifact)"
            bad += 1
    return bad


def run_sweep(plan: SweepPlan, workers: int = 1, backend: Optional[str] = None,
              require: int = MIN_POINTS) -> list[SweepRecord]:
    """Measure the lifespan for every eps of the plan, largest eps first.

    Runs are independent, so up to ``workers`` of them go to a process pool;
    the records are sorted by eps afterwards, so the result does not depend
    on completion order.  Uncertified runs are kept (and ignored by the fit).
    """
    jobs = [(plan.config_for(e), plan.tol, plan.max_refinements, backend) for e in plan.epsilons]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
            records = list(ex.map(_run_one, jobs))
    else:
        records = [_run_one(j) for j in jobs]
    records.sort(key=lambda r: -r.epsilon)
    check_monotone(records)
    n_cert = sum(r.certified for r in records)
    if n_cert < require:
        raise AggregationError(f"only {n_cert} certified records, need {require}")
    return records


def sweep_report(plan: SweepPlan, records: Sequence[SweepRecord]) -> dict:
    return {"schema": SWEEP_SCHEMA, "template": plan.template.to_dict(), "law": plan.law.to_dict(),
            "records": [r.to_dict() for r in records]}


@dataclass
class FitResult:
    model: str                   # "log T" or "log log T" against log eps
    alpha_hat: float
    stderr: float
    intercept: float
    predicted_alpha: float
    tol_rel: float
    verdict: str                 # consistent | inconsistent | underpowered
    n_points: int
    T_decades: float
    bound_constant: float        # smallest C with T <= C eps^(-1/Gamma) (log T <= C eps^(-a))
    notes: list = field(default_factory=list)

    @property
    def rel_error(self) -> float:
        return abs(self.alpha_hat - self.predicted_alpha) / abs(self.predicted_alpha)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["schema"] = FIT_SCHEMA
        d["rel_error"] = self.rel_error
        return d


def _points(records) -> tuple[np.ndarray, np.ndarray]:
    eps, T = [], []
    for r in records:
        if isinstance(r, SweepRecord):
            if r.certified and r.T_num is not None:
                eps.append(r.epsilon)
                T.append(r.T_num)
        else:
            e, t = r[0], r[1]
            if t is not None:
                eps.append(e)
                T.append(t)
    return np.asarray(eps, dtype=float), np.asarray(T, dtype=float)


def fit_scaling(records, law: LifespanLaw, tol_rel: float = 0.2) -> FitResult:
    """Ordinary least squares of ``log T`` (or ``log log T``) on ``log eps``.

    ``records`` are :class:`SweepRecord` objects (only certified ones are used)
    or plain ``(eps, T)`` pairs.  Exponential fits need T to span three
    decades before a verdict other than ``underpowered`` is given; the
    unknown constant in ``exp(C eps^-a)`` sits in the intercept, so the
    slope is only asymptotically ``-a``.
    """
    if law.form not in (LawForm.POWER_LAW, LawForm.EXPONENTIAL):
        raise DomainError("the law makes no prediction to fit against")
    eps, T = _points(records)
    if eps.size < MIN_POINTS:
        raise AggregationError(f"need {MIN_POINTS} certified records, got {eps.size}")
    if np.any(T <= 0):
        raise DomainError("lifespans must be positive")
    x = np.log(eps)
    if np.ptp(x) == 0.0:
        raise DegenerateRegressionError("all eps values coincide")
    expo = law.form is LawForm.EXPONENTIAL
    if expo:
        if np.any(T <= 1.0):
            raise DomainError("log log T needs T > 1")
        y = np.log(np.log(T))
    else:
        y = np.log(T)
    fit = stats.linregress(x, y)
    pred = float(law.predicted_slope)
    decades = float(math.log10(T.max() / T.min()))
    if expo:
        C = float(np.max(np.log(T) * eps ** law.exponent))
    else:
        C = float(np.max(T * eps ** (1.0 / law.exponent)))
    notes = []
    if np.ptp(x) < math.log(10.0) - 1e-12:
        notes.append("eps spans less than one decade")
    if expo and decades < 3.0:
        verdict = "underpowered"
        notes.append(f"T spans {decades:.2f} decades (< 3)")
    elif abs(fit.slope - pred) <= tol_rel * abs(pred):
        verdict = "consistent"
    else:
        verdict = "inconsistent"
    return FitResult("log log T" if expo else "log T", float(fit.slope), float(fit.stderr),
                     float(fit.intercept), pred, tol_rel, verdict, int(eps.size), decades, C, notes)
