"""Gauss 2F1 series and the self-similar solutions of the linear wave equation.

``Phi_beta(r, t) = t^-beta F(beta/2, (beta+1)/2, N/2; r^2/t^2)`` on the cone
``r < t``; the shifted family is ``Phi_{beta,lam}(r, t) = lam^beta Phi_beta(r, lam+t)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .exponents import DomainError

MAX_TERMS = 10**6
CONE_MARGIN = 1e-12
DEFAULT_TOL = 1e-15


class ConeDomainError(DomainError):
    """Evaluation point outside (or on) the light cone."""


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class HyperParams:
    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        _check_c(self.c)
        if not 0.0 <= self.z < 1.0:
            raise DomainError(f"z must lie in [0, 1), got {self.z}")


def _check_c(c: float) -> None:
    if c <= 0 and float(c).is_integer():
        raise DomainError(f"c must not be a nonpositive integer, got {c}")


def gauss_2f1(a: float, b: float, c: float, z, tol: float = DEFAULT_TOL, backend=None):
    """2F1(a, b; c; z) by direct summation of the power series, ``z in [0, 1)``.

    Terms are updated recursively and summed with compensation; summation
    stops after three consecutive terms below ``tol * (1 - z) * |sum|``.
    Accepts a scalar or an array ``z``.
    """
    _check_c(c)
    if not tol > 0:
        raise DomainError("tol must be positive")
    scalar = np.ndim(z) == 0
    zz = np.ascontiguousarray(np.atleast_1d(z), dtype=np.float64).ravel()
    if zz.size and (zz.min() < 0.0 or zz.max() >= 1.0 or not np.all(np.isfinite(zz))):
        raise DomainError("z must lie in [0, 1)")
    vals, counts = kernels.get(backend).hyp2f1_series(float(a), float(b), float(c), zz, tol, MAX_TERMS)
    if np.any(counts < 0):
        raise NonConvergenceError(f"2F1({a}, {b}; {c}; z) did not converge within {MAX_TERMS} terms")
    if scalar:
        return float(vals[0])
    return vals.reshape(np.shape(z))


def gauss_2f1_params(params: HyperParams, tol: float = DEFAULT_TOL) -> float:
    return gauss_2f1(params.a, params.b, params.c, params.z, tol)


@dataclass(frozen=True)
class PhiSpec:
    """Self-similar solution ``Phi_{beta,lam}`` in dimension N; ``lam = 0`` is unshifted."""

    beta: float
    lam: float = 0.0
    N: int = 3

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        if self.lam < 0:
            raise DomainError("lambda must be nonnegative")
        if self.N < 2:
            raise DomainError("Phi_beta is defined for N >= 2")

    def with_beta(self, beta: float) -> "PhiSpec":
        return PhiSpec(beta, self.lam, self.N)


def _cone_time(spec: PhiSpec, r, t):
    r = np.asarray(r, dtype=np.float64)
    T = np.asarray(t, dtype=np.float64) + spec.lam
    if np.any(r < 0):
        raise DomainError("r must be nonnegative")
    if np.any(T <= 0) or np.any(r >= T * (1.0 - CONE_MARGIN)):
        raise ConeDomainError("point outside the open light cone")
    return np.broadcast_arrays(r, T)


def _phi_beta(beta, N, r, T, form, tol):
    """Unshifted Phi_beta at arrays (r, T)."""
    if form == "linear":
        z = 2.0 * r / (T + r)
        F = gauss_2f1(beta, (N - 1) / 2.0, N - 1.0, z, tol)
        return (T + r) ** (-beta) * F
    if form not in ("auto", "squared"):
        raise ValueError(f"unknown form {form!r}")
    # r^2/T^2 <= 2r/(T+r) on the cone, so this form always has the smaller argument
    z = (r / T) ** 2
    F = gauss_2f1(beta / 2.0, (beta + 1.0) / 2.0, N / 2.0, z, tol)
    return T ** (-beta) * F


def phi(spec: PhiSpec, r, t, form: str = "auto", tol: float = DEFAULT_TOL):
    """``Phi_{beta,lam}(r, t)`` (``Phi_beta(r, t)`` when ``lam == 0``).

    ``form="squared"`` (the default, also ``"auto"``) sums the series in
    ``(r/T)^2``; ``form="linear"`` uses ``2r/(T+r)`` and is kept as a
    cross-check.
    """
    rr, T = _cone_time(spec, r, t)
    out = _phi_beta(spec.beta, spec.N, rr, T, form, tol)
    if spec.lam > 0:
        out = spec.lam ** spec.beta * out
    return float(out) if np.ndim(out) == 0 else out


def dphi_dt(spec: PhiSpec, r, t, tol: float = DEFAULT_TOL):
    """Time derivative ``-beta lam^beta Phi_{beta+1}(r, lam+t)``."""
    rr, T = _cone_time(spec, r, t)
    out = -spec.beta * _phi_beta(spec.beta + 1.0, spec.N, rr, T, "auto", tol)
    if spec.lam > 0:
        out = spec.lam ** spec.beta * out
    return float(out) if np.ndim(out) == 0 else out


def dphi_dr(spec: PhiSpec, r, t, tol: float = DEFAULT_TOL):
    """Radial derivative, from differentiating the series in ``z = r^2/T^2``."""
    rr, T = _cone_time(spec, r, t)
    beta, N = spec.beta, spec.N
    a, b, c = beta / 2.0, (beta + 1.0) / 2.0, N / 2.0
    z = (rr / T) ** 2
    dF = a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z, tol)
    out = T ** (-beta) * dF * 2.0 * rr / T**2
    if spec.lam > 0:
        out = spec.lam ** beta * out
    return float(out) if np.ndim(out) == 0 else out


def closed_form_V(N: int, r, t):
    """``t (t^2 - r^2)^(-(N+1)/2)``, equal to ``Phi_N``."""
    r = np.asarray(r, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    return t * (t * t - r * r) ** (-(N + 1) / 2.0)


def hypergeo_quadratic_identity(a: float, c: float, z: float, tol: float = DEFAULT_TOL) -> float:
    """Relative gap between ``F(a, a+1/2; c; z)`` and its quadratic transform."""
    lhs = gauss_2f1(a, a + 0.5, c, z, tol)
    sz = math.sqrt(z)
    rhs = (1.0 + sz) ** (-2.0 * a) * gauss_2f1(2.0 * a, c - 0.5, 2.0 * c - 1.0, 2.0 * sz / (1.0 + sz), tol)
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale > 0 else 0.0


def special_w_lambda(N: int, lam: float, r, t):
    """``w = lam^(N-1) ((lam+t)^2 - r^2)^(-(N-1)/2)`` and its time derivative."""
    r = np.asarray(r, dtype=np.float64)
    T = np.asarray(t, dtype=np.float64) + lam
    if np.any(r >= T):
        raise ConeDomainError("point outside the shifted cone")
    s = T * T - r * r
    w = lam ** (N - 1) * s ** (-(N - 1) / 2.0)
    wt = -(N - 1) * lam ** (N - 1) * T * s ** (-(N + 1) / 2.0)
    if np.ndim(w) == 0:
        return float(w), float(wt)
    return w, wt


def verify_wave_identity(spec: PhiSpec, points: Iterable, h: float, r_step_ratio: float = 1.0) -> float:
    """Max scaled residual of the radial wave operator applied to ``phi``.

    Central differences with step ``h`` in ``t`` and ``r_step_ratio * h`` in
    ``r``; each residual is multiplied by ``T^(beta+2)`` with ``T = lam + t``.

    With equal steps in N = 3 the discrete residual vanishes identically
    (``r Phi`` is a sum of travelling waves and the product rule is exact for
    central differences against ``r``), so only rounding remains.  A ratio
    other than 1 exposes the O(h^2) truncation error there.
    """
    pts = np.asarray(list(points), dtype=np.float64).reshape(-1, 2)
    r, t = pts[:, 0], pts[:, 1]
    T = t + spec.lam
    hr = r_step_ratio * h
    if not r_step_ratio > 0:
        raise DomainError("r_step_ratio must be positive")
    if np.any(r < hr) or np.any(r + hr >= (T - h) * (1.0 - CONE_MARGIN)):
        raise DomainError("stencil leaves the open cone or reaches r = 0")
    N = spec.N
    f = lambda rr, tt: phi(spec, rr, tt)
    c = f(r, t)
    dtt = (f(r, t + h) - 2.0 * c + f(r, t - h)) / h**2
    frp, frm = f(r + hr, t), f(r - hr, t)
    drr = (frp - 2.0 * c + frm) / hr**2
    dr = (frp - frm) / (2.0 * hr)
    res = np.abs(dtt - drr - (N - 1) / r * dr) * T ** (spec.beta + 2.0)
    return float(res.max())


@dataclass(frozen=True)
class BoundConstants:
    beta: float
    k_beta: float
    K_beta: float
    sample_count: int
    case: str
    margin: float


def estimate_bound_constants(spec: PhiSpec, n_samples: int = 2001, margin: float = 1e-3) -> BoundConstants:
    """Grid estimates of the two-sided bounds of ``Phi_beta``.

    For ``beta < (N-1)/2`` the normalised quantity is ``t^beta Phi_beta``;
    for ``beta > (N-1)/2`` it is additionally multiplied by
    ``(1 - r^2/t^2)^(beta - (N-1)/2)``.  By self-similarity only
    ``z = r/t in [0, 1 - margin]`` matters.  These are sampled estimates, not
    certified bounds.
    """
    if margin < 1e-3:
        raise DomainError("margin must be at least 1e-3")
    beta, N = spec.beta, spec.N
    crit = (N - 1) / 2.0
    if beta == crit:
        raise DomainError("no two-sided bound is stated for beta = (N-1)/2")
    z = np.linspace(0.0, 1.0 - margin, n_samples)
    unshifted = PhiSpec(beta, 0.0, N)
    vals = phi(unshifted, z, np.ones_like(z))
    if beta < crit:
        case = "iii"
        q = vals
    else:
        case = "iv"
        q = vals * (1.0 - z * z) ** (beta - crit)
    return BoundConstants(beta, float(q.min()), float(q.max()), n_samples, case, margin)
