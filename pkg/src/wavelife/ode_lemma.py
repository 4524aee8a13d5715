"""Lifespan bound for the two-inequality ODE system and its extremal solution.

With ``phi(t0) = 0`` and, for ``t >= t0``,

    delta <= K1 t phi'(t),      phi(t)^p1 <= K2 t (log t)^(p2-1) phi'(t),

the blow-up time obeys ``T <= max(t0^4, exp(K3 delta^(-(p1-1)/(p1-p2+1))))``.
Lifespans here are astronomically large, so everything is carried in
``s = log t``; :attr:`OdeResult.T` is ``inf`` when ``exp(s)`` overflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, optimize

from .exponents import DomainError

BLOWUP_PHI = 1e12


class HypothesisError(DomainError):
    pass


class NoBlowupError(RuntimeError):
    pass


@dataclass(frozen=True)
class OdiParams:
    delta: float
    p1: float
    p2: float
    K1: float = 1.0
    K2: float = 1.0
    t0: float = 3.0

    def __post_init__(self):
        if not (self.delta > 0 and self.K1 > 0 and self.K2 > 0):
            raise DomainError("delta, K1 and K2 must be positive")
        if not (self.p1 > 1 and self.p2 > 1):
            raise DomainError("p1 and p2 must exceed 1")
        if self.p2 >= self.p1 + 1:
            raise HypothesisError("need p2 < p1 + 1")
        if not self.t0 > 2:
            raise DomainError("t0 must exceed 2")

    def with_delta(self, delta: float) -> "OdiParams":
        return replace(self, delta=delta)

    @property
    def exponent(self) -> float:
        """``(p1 - 1) / (p1 - p2 + 1)``, the power of 1/delta in log T."""
        return (self.p1 - 1.0) / (self.p1 - self.p2 + 1.0)


@dataclass(frozen=True)
class LifespanBound:
    K3: float
    log_bound: float

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound) if self.log_bound < 709.0 else math.inf


def _sigma_integral(p2: float) -> float:
    """``int_{1/2}^1 sigma^(1-p2) d sigma``."""
    if p2 == 2.0:
        return math.log(2.0)
    e = 2.0 - p2
    return -math.expm1(-e * math.log(2.0)) / e


def lifespan_bound(params: OdiParams) -> LifespanBound:
    """K3 from the proof's constants and the resulting bound (in log form)."""
    p1, p2 = params.p1, params.p2
    base = (4.0 * params.K1) ** (p1 - 1.0) * params.K2 / ((p1 - 1.0) * _sigma_integral(p2))
    K3 = base ** (1.0 / (1.0 + p1 - p2))
    log_b = max(4.0 * math.log(params.t0), K3 * params.delta ** (-params.exponent))
    return LifespanBound(K3, log_b)


@dataclass
class OdeResult:
    log_T: float
    s_switch: float          # log t where the second constraint takes over
    n_steps: int

    @property
    def T(self) -> float:
        return math.exp(self.log_T) if self.log_T < 709.0 else math.inf


def _switch_point(params: OdiParams) -> float:
    """First s where the power branch of the slope overtakes the linear one."""
    d, s0 = params.delta / params.K1, math.log(params.t0)

    def h(s):
        return (d * (s - s0)) ** params.p1 - d * params.K2 * s ** (params.p2 - 1.0)

    hi = s0 + 1.0
    while h(hi) <= 0:
        hi = s0 + 2.0 * (hi - s0)
        if hi > 1e300:
            raise NoBlowupError("linear phase never ends")
    return optimize.brentq(h, s0, hi, xtol=1e-14 * hi, rtol=1e-15)


def extremal_ode_simulate(params: OdiParams, rtol: float = 1e-10) -> OdeResult:
    """Blow-up of ``phi' = max(delta/(K1 t), phi^p1 / (K2 t (log t)^(p2-1)))``.

    In ``s = log t`` the first phase is exactly linear, ``phi = delta (s - s0)/K1``.
    From the switch point on, ``y = phi^(1-p1)`` is integrated with RK45
    (``dy/ds = (1-p1) max(delta/K1 y^(p1/(p1-1)), 1/(K2 s^(p2-1)))``), which
    turns the blow-up into the smooth crossing ``y = BLOWUP_PHI^(1-p1)``.
    """
    p1, p2 = params.p1, params.p2
    d = params.delta / params.K1
    s0 = math.log(params.t0)
    s1 = _switch_point(params)
    phi1 = d * (s1 - s0)
    y1 = phi1 ** (1.0 - p1)
    y_thr = BLOWUP_PHI ** (1.0 - p1)
    if y1 <= y_thr:
        # crossed the threshold during the linear phase
        return OdeResult(s0 + BLOWUP_PHI / d, s1, 0)
    g = p1 / (p1 - 1.0)

    def rhs(s, y):
        yy = max(y[0], 0.0)
        return [(1.0 - p1) * max(d * yy**g, 1.0 / (params.K2 * s ** (p2 - 1.0)))]

    def hit(s, y):
        return y[0] - y_thr
    hit.terminal = True
    hit.direction = -1

    bound = lifespan_bound(params).log_bound
    s_end = s1 + 10.0 * max(bound, s1)
    sol = integrate.solve_ivp(rhs, (s1, s_end), [y1], method="RK45", rtol=rtol, atol=1e-6 * y_thr,
                              events=hit, first_step=None)
    if sol.status == -1:
        raise NoBlowupError(f"integration failed: {sol.message}")
    if not sol.t_events[0].size:
        raise NoBlowupError("no blow-up within ten times the bound")
    return OdeResult(float(sol.t_events[0][0]), s1, int(sol.t.size))


def separable_oracle(params: OdiParams) -> float:
    """log T from the closed form, assuming the power branch stays active after the switch."""
    p1, p2 = params.p1, params.p2
    d = params.delta / params.K1
    s0 = math.log(params.t0)
    s1 = _switch_point(params)
    y1 = (d * (s1 - s0)) ** (1.0 - p1)
    need = params.K2 * (y1 - BLOWUP_PHI ** (1.0 - p1)) / (p1 - 1.0)
    # int_{s1}^{S} s^(1-p2) ds = need
    if p2 == 2.0:
        return s1 * math.exp(need)
    return (s1 ** (2.0 - p2) + (2.0 - p2) * need) ** (1.0 / (2.0 - p2))


@dataclass
class SweepRow:
    delta: float
    log_T: float
    log_bound: float

    @property
    def margin(self) -> float:
        """``log bound - log T``; nonnegative when the bound holds."""
        return self.log_bound - self.log_T

    def to_dict(self) -> dict:
        return {"delta": self.delta, "log_T_blow": self.log_T, "log_bound": self.log_bound,
                "margin": self.margin}


def delta_sweep(params: OdiParams, deltas, rtol: float = 1e-10) -> list[SweepRow]:
    rows = []
    for dl in deltas:
        p = params.with_delta(float(dl))
        rows.append(SweepRow(p.delta, extremal_ode_simulate(p, rtol).log_T, lifespan_bound(p).log_bound))
    return rows


def loglog_slope(rows) -> float:
    """Slope of ``log log T`` against ``log delta`` through the given rows."""
    x = np.log([r.delta for r in rows])
    y = np.log([r.log_T for r in rows])
    return float(np.polyfit(x, y, 1)[0])
