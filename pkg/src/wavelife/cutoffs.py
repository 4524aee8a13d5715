"""Time cutoffs, weighted space-time integrals and the functional Y[w].

``eta`` is 1 on [0, 1/2], 0 on [1, inf) and is joined by the C-infinity
transition ``B(1-u) / (B(u) + B(1-u))``, ``u = 2s - 1``, ``B(u) = exp(-1/u)``.
``psi_R(t) = eta(t/R)^k`` and ``psi_R*`` is the same power of the truncation
of ``eta`` to ``s >= 1/2``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, interpolate, optimize, special

from .exponents import DomainError
from .hypergeometric import PhiSpec, phi


def unit_sphere_area(N: int) -> float:
    """``|S^(N-1)|``; equals 2 for N = 1."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


# -- eta and derivatives ----------------------------------------------------

def _transition(s):
    """(eta, d eta/ds, d2 eta/ds2) on the open interval 1/2 < s < 1."""
    u = 2.0 * s - 1.0
    g = 1.0 / (1.0 - u) - 1.0 / u
    e = special.expit(-g)
    ee = e * special.expit(g)  # e (1 - e) without cancellation
    g1 = 1.0 / (1.0 - u) ** 2 + 1.0 / u**2
    g2 = 2.0 / (1.0 - u) ** 3 - 2.0 / u**3
    d1u = -ee * g1
    d2u = -(d1u * (1.0 - 2.0 * e) * g1 + ee * g2)
    return e, 2.0 * d1u, 4.0 * d2u


def _eta_all(s):
    s = np.asarray(s, dtype=np.float64)
    val = np.where(s <= 0.5, 1.0, 0.0)
    d1 = np.zeros_like(val)
    d2 = np.zeros_like(val)
    mid = (s > 0.5) & (s < 1.0)
    if np.any(mid):
        e, a, b = _transition(s[mid])
        val = val.copy()
        val[mid], d1[mid], d2[mid] = e, a, b
    return val, d1, d2


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def eta(s):
    return _out(_eta_all(s)[0])


def eta_d1(s):
    return _out(_eta_all(s)[1])


def eta_d2(s):
    return _out(_eta_all(s)[2])


def eta_star(s):
    s = np.asarray(s, dtype=np.float64)
    return _out(np.where(s < 0.5, 0.0, _eta_all(s)[0]))


@functools.lru_cache(maxsize=None)
def eta_norms() -> dict:
    """Sup norms of ``eta'``, ``eta''`` and ``eta'' eta``.

    Dense sampling locates each maximiser, then a bounded scalar search
    polishes it.
    """
    s = np.linspace(0.5, 1.0, 200001)[1:-1]
    _, d1, d2 = _eta_all(s)
    e = _eta_all(s)[0]
    out = {}
    for name, fn in (
        ("d1", lambda x: abs(eta_d1(x))),
        ("d2", lambda x: abs(eta_d2(x))),
        ("d2eta", lambda x: abs(eta_d2(x) * eta(x))),
    ):
        vals = {"d1": np.abs(d1), "d2": np.abs(d2), "d2eta": np.abs(d2 * e)}[name]
        i = int(np.argmax(vals))
        lo, hi = s[max(i - 2, 0)], s[min(i + 2, s.size - 1)]
        res = optimize.minimize_scalar(lambda x: -fn(x), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-14})
        out[name] = max(float(vals[i]), float(-res.fun))
    return out


# -- psi_R ------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffSpec:
    k: float
    R: float

    def __post_init__(self):
        if self.k < 2:
            raise DomainError("k must be at least 2")
        if not self.R > 0:
            raise DomainError("R must be positive")


def psi(spec: CutoffSpec, t):
    return _out(_eta_all(np.asarray(t, dtype=np.float64) / spec.R)[0] ** spec.k)


def psi_star(spec: CutoffSpec, t):
    return _out(np.asarray(eta_star(np.asarray(t, dtype=np.float64) / spec.R)) ** spec.k)


def dpsi(spec: CutoffSpec, t):
    e, d1, _ = _eta_all(np.asarray(t, dtype=np.float64) / spec.R)
    k = spec.k
    return _out(k * d1 * e ** (k - 1) / spec.R)


def d2psi(spec: CutoffSpec, t):
    e, d1, d2 = _eta_all(np.asarray(t, dtype=np.float64) / spec.R)
    k = spec.k
    return _out(k * ((k - 1) * d1**2 + e * d2) * e ** (k - 2) / spec.R**2)


def psi_derivative_bounds(spec: CutoffSpec, t) -> tuple[float, float]:
    """Worst ratios of ``|psi'|`` and ``|psi''|`` to their cutoff bounds.

    Ratios are defined as 0 where both sides vanish.  Each must stay at or
    below 1 (up to rounding).
    """
    t = np.asarray(t, dtype=np.float64)
    k, R = spec.k, spec.R
    nrm = eta_norms()
    # [psi*]^(1-1/k) = (eta*)^(k-1); the power form avoids spurious underflow
    es = np.asarray(eta_star(t / R))
    b1 = k * nrm["d1"] / R * es ** (k - 1.0)
    b2 = k * ((k - 1) * nrm["d1"] ** 2 + nrm["d2eta"]) / R**2 * es ** (k - 2.0)
    a1 = np.abs(np.asarray(dpsi(spec, t)))
    a2 = np.abs(np.asarray(d2psi(spec, t)))
    r1 = np.divide(a1, b1, out=np.zeros_like(a1), where=b1 > 0)
    r2 = np.divide(a2, b2, out=np.zeros_like(a2), where=b2 > 0)
    if np.any((b1 == 0) & (a1 > 0)) or np.any((b2 == 0) & (a2 > 0)):
        return math.inf, math.inf
    return float(r1.max(initial=0.0)), float(r2.max(initial=0.0))


# -- space-time fields and quadrature --------------------------------------

class GridError(DomainError):
    pass


@dataclass
class SpaceTimeField:
    """Nonnegative radial field ``w(r_i, t_j)`` stored as ``values[j, i]``."""

    r: np.ndarray
    t: np.ndarray
    values: np.ndarray
    N: int
    r0: float = 1.0

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=np.float64)
        self.t = np.asarray(self.t, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.t.size, self.r.size):
            raise GridError("values must have shape (len(t), len(r))")


def radial_integral(values, r, N: int):
    """``|S^(N-1)| int w r^(N-1) dr`` by composite Simpson along the last axis."""
    r = np.asarray(r, dtype=np.float64)
    return unit_sphere_area(N) * integrate.simpson(values * r ** (N - 1), x=r, axis=-1)


def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _time_integral(t_nodes, m, weight_fn, a: float, b: float, breaks=(), n_gl: int = 64):
    """Piecewise Gauss-Legendre of ``spline(m) * weight`` over [a, b].

    ``m`` may be a prebuilt spline, in which case ``t_nodes`` is ignored.
    """
    if b <= a:
        return 0.0
    spline = m if callable(m) else interpolate.CubicSpline(t_nodes, m)
    x, w = _gauss_legendre(n_gl)
    edges = [a] + [c for c in breaks if a < c < b] + [b]
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        tt = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        total += 0.5 * (hi - lo) * float(np.dot(w, spline(tt) * weight_fn(tt)))
    return total


_WEIGHTS = ("psi", "psi_star", "phi_psi", "phi_psi_star")


def spacetime_integral(w: SpaceTimeField, weight: str, spec: CutoffSpec,
                       phi_spec: Optional[PhiSpec] = None) -> float:
    """``int_0^T int w * weight dx dt`` for a radial field.

    The spatial integral uses composite Simpson on the field's radial nodes
    (times ``Phi_{beta,lam}`` for the ``phi_*`` weights); the time factor
    ``psi_R`` or ``psi_R*`` is integrated against a cubic spline of the
    spatial integrals, piecewise on [0, R/2] and [R/2, R], so the jump of
    ``psi_R*`` at ``R/2`` is resolved exactly.
    """
    if weight not in _WEIGHTS:
        raise ValueError(f"weight must be one of {_WEIGHTS}")
    R = spec.R
    if w.t[0] > 0 or w.t[-1] < R:
        raise GridError("time grid must cover [0, R]")
    if w.r[0] != 0 or w.r[-1] < w.r0 + R:
        raise GridError("radial grid must cover the support r <= r0 + R")
    vals = w.values
    if weight.startswith("phi"):
        if phi_spec is None:
            raise ValueError("phi weights need a PhiSpec")
        if phi_spec.N != w.N:
            raise ValueError("PhiSpec dimension differs from the field's")
        vals = vals * _phi_on_support(phi_spec, w)
    m = radial_integral(vals, w.r, w.N)
    time_w = psi_star if weight.endswith("star") else psi
    lo = R / 2.0 if weight.endswith("star") else 0.0
    return _time_integral(w.t, m, lambda tt: np.asarray(time_w(spec, tt)), lo, R, breaks=(R / 2.0,))


def _phi_on_support(phi_spec: PhiSpec, w: SpaceTimeField) -> np.ndarray:
    """Phi on the field grid; zero where the field's support excludes the node."""
    R_, T_ = np.meshgrid(w.r, w.t)
    inside = R_ <= w.r0 + T_ + 1e-12
    if np.any(R_[inside] >= (phi_spec.lam + T_[inside]) * (1.0 - 1e-12)):
        raise GridError("support reaches the light cone of Phi; increase lambda")
    out = np.zeros_like(R_)
    out[inside] = phi(phi_spec, R_[inside], T_[inside])
    return out


# -- Y functional -----------------------------------------------------------

@dataclass
class YResult:
    R: np.ndarray
    Y: np.ndarray
    dY: np.ndarray            # R^-1 int int w psi_R*
    upper: np.ndarray         # int int w psi_R
    dY_numeric: np.ndarray    # central difference of Y
    derivative_rel_err: float
    bound_ok: bool


def _J(spline, k: float, sigma, n_gl: int = 64):
    """``int m(t) psi_sigma*(t) dt`` over [sigma/2, sigma], vectorised in sigma.

    With ``t = sigma * s`` the weight ``eta(s)^k`` no longer depends on sigma.
    """
    x, w = _gauss_legendre(n_gl)
    sn = 0.75 + 0.25 * x
    wk = w * _eta_all(sn)[0] ** k
    sigma = np.atleast_1d(np.asarray(sigma, dtype=np.float64))
    vals = spline(np.outer(sigma, sn)) @ wk
    return 0.25 * sigma * vals


def _Y_single(spline, k, R, n_sigma: int, sigma_min_rel: float) -> float:
    """Y(R) with log-spaced sigma nodes; the piece below sigma_min is ~J(sigma_min)."""
    ls = np.linspace(math.log(R * sigma_min_rel), math.log(R), n_sigma)
    J = _J(spline, k, np.exp(ls))
    return float(integrate.simpson(J, x=ls)) + float(J[0])


def Y_functional(w: SpaceTimeField, R_grid: Sequence[float], k: float = 4.0, n_sigma: int = 801,
                 sigma_min_rel: float = 1e-6, rel_step: float = 1e-3) -> YResult:
    """``Y[w](R) = int_0^R (int int w psi_sigma*) sigma^-1 d sigma`` with checks.

    Returns Y, the closed-form derivative, the upper bound ``int int w psi_R``
    and a central-difference derivative of Y for comparison.
    """
    R_grid = np.asarray(R_grid, dtype=np.float64)
    if np.any(np.diff(R_grid) <= 0):
        raise GridError("R_grid must be increasing")
    if R_grid[0] <= 0 or R_grid[-1] * (1 + rel_step) > w.t[-1]:
        raise GridError("R_grid must lie inside the time window")
    if w.r[0] != 0 or w.r[-1] < w.r0 + w.t[-1]:
        raise GridError("radial grid must cover the support")
    m = interpolate.CubicSpline(w.t, radial_integral(w.values, w.r, w.N))
    Y, dY, up, dnum = [], [], [], []
    for R in R_grid:
        Y.append(_Y_single(m, k, R, n_sigma, sigma_min_rel))
        dY.append(float(_J(m, k, R)[0]) / R)
        up.append(_time_integral(w.t, m, lambda tt: np.asarray(psi(CutoffSpec(k, R), tt)), 0.0, R,
                                 breaks=(R / 2.0,)))
        h = rel_step * R
        yp = _Y_single(m, k, R + h, n_sigma, sigma_min_rel)
        ym = _Y_single(m, k, R - h, n_sigma, sigma_min_rel)
        dnum.append((yp - ym) / (2.0 * h))
    Y, dY, up, dnum = map(np.asarray, (Y, dY, up, dnum))
    scale = np.maximum(np.abs(dY), 1e-300)
    err = float(np.max(np.abs(dnum - dY) / scale)) if np.any(dY != 0) else float(np.max(np.abs(dnum)))
    bound_ok = bool(np.all(Y <= up + 1e-10 * np.maximum(1.0, np.abs(up))))
    return YResult(R_grid, Y, dY, up, dnum, err, bound_ok)


# -- integral scaling of Phi^{p'} ------------------------------------------

def _radial_profile_integral(N: int, beta: float, pp: float, rho_max: float) -> float:
    """``int_0^rho_max F(beta/2, (beta+1)/2; N/2; rho^2)^p' rho^(N-1) d rho``.

    Integrated in ``x = log(1 - rho)`` so the edge singularity is resolved;
    the Gauss function comes from ``scipy.special.hyp2f1``, which switches to
    connection formulas near ``rho = 1`` where plain summation would need
    millions of terms.
    """
    a, b, c = beta / 2.0, (beta + 1.0) / 2.0, N / 2.0

    def f(x):
        one_minus = math.exp(x)
        rho = 1.0 - one_minus
        return special.hyp2f1(a, b, c, rho * rho) ** pp * rho ** (N - 1) * one_minus

    val, _ = integrate.quad(f, math.log1p(-rho_max), 0.0, limit=500, epsabs=0.0, epsrel=1e-10)
    return val


def int_phi_integral(N: int, beta: float, p: float, lam: float, R: float, method: str = "similarity",
                     nr: int = 401, nt: int = 48, grading: float = 4.0) -> float:
    """``int_{R/2}^R int_{B(0,1+t)} Phi_{beta,lam}^{p'} dx dt``.

    ``method="similarity"`` writes the ball integral as
    ``|S^(N-1)| lam^(beta p') T^(N - beta p') int_0^{(1+t)/T} F(rho^2)^p' rho^(N-1) d rho``
    with ``T = lam + t`` and integrates the profile adaptively; it stays cheap
    for very large R.  ``method="grid"`` evaluates :func:`phi` on radial nodes
    graded toward the edge ``r = 1 + t`` and applies Simpson; it is limited by
    the series term cap to moderate R.  Time uses Gauss-Legendre in both.
    """
    if lam <= 1:
        raise DomainError("lambda must exceed 1 so the ball stays inside the cone")
    if N < 2:
        raise DomainError("N must be at least 2")
    pp = p / (p - 1.0)
    x, wts = _gauss_legendre(nt)
    ts = 0.25 * R * x + 0.75 * R
    rows = []
    if method == "similarity":
        area = unit_sphere_area(N)
        for t in ts:
            T = lam + t
            rows.append(area * lam ** (beta * pp) * T ** (N - beta * pp)
                        * _radial_profile_integral(N, beta, pp, (1.0 + t) / T))
    elif method == "grid":
        spec = PhiSpec(beta, lam, N)
        frac = 1.0 - (1.0 - np.linspace(0.0, 1.0, nr)) ** grading
        for t in ts:
            r = (1.0 + t) * frac
            vals = np.asarray(phi(spec, r, np.full_like(r, t), tol=1e-13)) ** pp
            rows.append(float(radial_integral(vals, r, N)))
    else:
        raise ValueError("method must be 'similarity' or 'grid'")
    return float(0.25 * R * np.dot(wts, rows))


def int_phi_regime(N: int, beta: float, p: float) -> str:
    crit = (N + 1) / 2.0 - 1.0 / p
    if abs(beta - crit) < 1e-12:
        return "boundary"
    return "below" if beta < crit else "above"


def int_phi_predicted_exponent(N: int, beta: float, p: float) -> float:
    pp = p / (p - 1.0)
    if int_phi_regime(N, beta, p) == "below":
        return N + 1.0 - beta * pp
    return N - (N - 1) / 2.0 * pp


@dataclass
class ScalingFit:
    N: int
    beta: float
    p: float
    regime: str
    R: np.ndarray
    integrals: np.ndarray
    predicted: float
    slope: float            # fit of log I against log R
    slope_log: float        # fit of log(I / log R) against log R
    measured: float         # slope_log at the boundary, slope otherwise

    @property
    def error(self) -> float:
        return abs(self.measured - self.predicted)

    def rows(self):
        return [{"R": float(r), "integral": float(i)} for r, i in zip(self.R, self.integrals)]


def _ols_slope(x, y) -> float:
    return float(np.polyfit(x, y, 1)[0])


# The boundary case needs a longer lever arm: its corrections decay like
# R^(-1/p') and 1/log R, so the log factor only separates cleanly at large R.
DEFAULT_R = tuple(2.0**j for j in range(4, 11))
BOUNDARY_R = tuple(2.0**j for j in range(14, 25))


def int_phi_scaling(N: int, beta: float, p: float, lam: float = 2.0,
                    R_values: Optional[Sequence[float]] = None, **kw) -> ScalingFit:
    """Fit the R-exponent of :func:`int_phi_integral` over ``R_values``.

    Both a plain power fit and a fit with one factor of ``log R`` removed are
    reported; the latter is the measurement in the boundary regime.
    """
    regime = int_phi_regime(N, beta, p)
    if R_values is None:
        R_values = BOUNDARY_R if regime == "boundary" else DEFAULT_R
    R = np.asarray(R_values, dtype=np.float64)
    I = np.array([int_phi_integral(N, beta, p, lam, r, **kw) for r in R])
    lr = np.log(R)
    slope = _ols_slope(lr, np.log(I))
    slope_log = _ols_slope(lr, np.log(I / lr))
    measured = slope_log if regime == "boundary" else slope
    return ScalingFit(N, beta, p, regime, R, I, int_phi_predicted_exponent(N, beta, p),
                      slope, slope_log, measured)
