"""Radial explicit finite differences for single equations and weakly coupled systems.

The Laplacian ``u_rr + (N-1)/r u_r`` is discretised in flux form on
``r_i = i dr``: each node owns the shell between ``r_{i-1/2}`` and
``r_{i+1/2}`` (a half cell at the origin), which reproduces ``N u_rr`` at
``r = 0`` and makes the linear scheme conserve a discrete energy exactly.
Time stepping is leapfrog; ``u_t`` inside the nonlinearity uses the
second-order backward difference so the update stays explicit.
"""
from __future__ import annotations

import configparser
import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import integrate, linalg, special

from . import kernels
from .cutoffs import CutoffSpec, SpaceTimeField, dpsi, psi, spacetime_integral, unit_sphere_area
from .exponents import DomainError, ProblemKind, ProblemSpec
from .hypergeometric import PhiSpec, dphi_dr, dphi_dt, phi

REPORT_SCHEMA = "wavelife.blowup/1"


class CFLError(DomainError):
    pass


class ContainmentError(DomainError):
    pass


class SupportError(DomainError):
    pass


# -- initial data -----------------------------------------------------------

@dataclass(frozen=True)
class InitialData:
    """Radial data ``(f, g)``.

    ``bump``: ``f = g = (1 - (r/r0)^2)^power`` on ``[0, r0]``;
    ``scaled_bump``: the same profile times ``amp_f`` and ``amp_g``;
    ``uniform``: constants ``amp_f``, ``amp_g`` everywhere, meant only for the
    diagnostic mode without Laplacian.

    The default power 4 makes the data C^3 at ``r0``.  The jump in the fourth
    derivative then travels with the front and adds an error of roughly
    ``dr^2.5`` to integrated quantities, so convergence-rate studies of weak
    identities use ``power = 8``.
    """

    family: str = "bump"
    r0: float = 1.0
    amp_f: float = 1.0
    amp_g: float = 1.0
    power: int = 4

    def __post_init__(self):
        if self.family not in ("bump", "scaled_bump", "uniform"):
            raise DomainError(f"unknown data family {self.family!r}")
        if not self.r0 > 0:
            raise DomainError("r0 must be positive")
        if self.family == "bump" and (self.amp_f != 1.0 or self.amp_g != 1.0):
            raise DomainError("the plain bump has unit amplitudes; use scaled_bump")
        if self.family != "uniform" and not self.amp_g > 0:
            raise DomainError("need I[g] > 0, so amp_g must be positive")
        if not (isinstance(self.power, int) and self.power >= 2):
            raise DomainError("power must be an integer >= 2")

    def profile(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        if self.family == "uniform":
            return np.ones_like(r)
        s = np.clip(1.0 - (r / self.r0) ** 2, 0.0, None)
        return s**self.power

    def f(self, r):
        return self.amp_f * self.profile(r)

    def g(self, r):
        return self.amp_g * self.profile(r)

    def Ig(self, N: int) -> float:
        """``int g dx`` over R^N (closed form through a Beta function)."""
        if self.family == "uniform":
            return math.inf
        return unit_sphere_area(N) * self.amp_g * self.r0**N * special.beta(N / 2.0, self.power + 1.0) / 2.0

    @property
    def sup_norm(self) -> float:
        return max(abs(self.amp_f), abs(self.amp_g))


# -- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    spec: ProblemSpec
    data: InitialData
    epsilon: float
    dr: float
    t_max: float
    cfl: float = 0.5
    r_max: Optional[float] = None
    threshold_factor: float = 1e6
    richardson: bool = False
    laplacian: bool = True
    data_v: Optional[InitialData] = None
    n_snapshots: int = 400
    save_every: Optional[int] = None
    linear: bool = False

    def __post_init__(self):
        self.spec.validate()
        if not (self.epsilon > 0 and self.dr > 0 and self.t_max > 0):
            raise DomainError("epsilon, dr and t_max must be positive")
        if not 0 < self.cfl < 1:
            raise CFLError("cfl must lie in (0, 1)")
        if self.data.family == "uniform" and self.laplacian:
            raise DomainError("uniform data is only allowed with the Laplacian disabled")
        if self.r_max is not None and self.laplacian and self.r_max < self.needed_r_max():
            raise ContainmentError(f"r_max must be at least r0 + t_max + 10 dr = {self.needed_r_max():g}")

    @property
    def dt(self) -> float:
        return self.cfl * self.dr

    @property
    def n_fields(self) -> int:
        return 2 if self.spec.kind.is_system else 1

    @property
    def field_data(self) -> list[InitialData]:
        if self.n_fields == 1:
            return [self.data]
        return [self.data, self.data_v or self.data]

    def needed_r_max(self) -> float:
        r0 = max(d.r0 for d in self.field_data)
        return r0 + self.t_max + 10.0 * self.dr

    @property
    def radius(self) -> float:
        if self.r_max is not None:
            return self.r_max
        return self.needed_r_max() if self.laplacian else max(d.r0 for d in self.field_data) + self.dr

    @property
    def threshold(self) -> float:
        return self.threshold_factor * self.epsilon * max(d.sup_norm for d in self.field_data)

    def with_dr(self, dr: float) -> "SolverConfig":
        r_max = None if self.r_max is None else max(self.r_max, self.needed_r_max() - 10 * self.dr + 10 * dr)
        return replace(self, dr=dr, r_max=r_max)

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k not in ("spec", "data", "data_v")}
        d["spec"] = self.spec.to_dict()
        d["data"] = asdict(self.data)
        d["data_v"] = asdict(self.data_v) if self.data_v else None
        return d


def nonlinearity_table(spec: ProblemSpec, linear: bool = False):
    """Coefficients, powers and source indices for the compiled update.

    Source index: 0 u, 1 u_t, 2 v, 3 v_t; two terms per field.  ``linear``
    zeroes every coefficient (G = 0) while keeping the field layout.
    """
    k, p, q, a, b = spec.kind, float(spec.p), float(spec.q or 0.0), float(spec.a), float(spec.b)
    if k == ProblemKind.SINGLE_POWER_U:
        rows = [[(a, p, 0), (0.0, 1.0, 0)]]
    elif k == ProblemKind.SINGLE_POWER_UT:
        rows = [[(a, p, 1), (0.0, 1.0, 0)]]
    elif k == ProblemKind.COMBINED:
        rows = [[(a, q, 0), (b, p, 1)]]
    elif k == ProblemKind.SYSTEM_SS:
        rows = [[(a, p, 2), (0.0, 1.0, 0)], [(b, q, 0), (0.0, 1.0, 0)]]
    elif k == ProblemKind.SYSTEM_GG:
        rows = [[(a, p, 3), (0.0, 1.0, 0)], [(b, q, 1), (0.0, 1.0, 0)]]
    elif k == ProblemKind.SYSTEM_SG:
        rows = [[(a, q, 2), (0.0, 1.0, 0)], [(b, p, 1), (0.0, 1.0, 0)]]
    else:  # pragma: no cover
        raise DomainError(f"unsupported kind {k}")
    coef = np.array([[c for c, _, _ in r] for r in rows], dtype=np.float64)
    pw = np.array([[w for _, w, _ in r] for r in rows], dtype=np.float64)
    src = np.array([[s for _, _, s in r] for r in rows], dtype=np.int32)
    if linear:
        coef[:] = 0.0
    return coef, pw, src


def nonlinearity(spec: ProblemSpec, u, ut, linear: bool = False):
    """``G`` for each field; ``u`` and ``ut`` have the field axis first."""
    coef, pw, src = nonlinearity_table(spec, linear)
    sources = [u[0], ut[0], u[-1], ut[-1]]
    out = np.zeros_like(u)
    for f in range(coef.shape[0]):
        for j in range(2):
            if coef[f, j] != 0.0:
                out[f] = out[f] + coef[f, j] * np.abs(sources[src[f, j]]) ** pw[f, j]
    return out


# -- spatial operator -------------------------------------------------------

def laplacian_coefficients(N: int, dr: float, M: int):
    """Flux-form weights ``cp, cm`` with ``(L u)_i = cp_i (u_{i+1}-u_i) - cm_i (u_i-u_{i-1})``."""
    i = np.arange(M + 1, dtype=np.float64)
    half_p = i + 0.5
    half_m = np.maximum(i - 0.5, 0.0)
    mass = (half_p**N - half_m**N) / N          # shell volume / (omega_N dr^N)
    cp = half_p ** (N - 1) / (mass * dr * dr)
    cm = half_m ** (N - 1) / (mass * dr * dr)
    cm[0] = 0.0
    return cp, cm, mass * dr**N


def apply_laplacian(u, cp, cm):
    lap = np.zeros_like(u)
    lap[..., 0] = cp[0] * (u[..., 1] - u[..., 0])
    lap[..., 1:-1] = cp[1:-1] * (u[..., 2:] - u[..., 1:-1]) - cm[1:-1] * (u[..., 1:-1] - u[..., :-2])
    return lap


def max_stable_cfl(N: int, dr: float, M: int) -> float:
    """Largest leapfrog ``dt/dr`` for the discrete operator (Dirichlet at ``r_M``).

    The operator is symmetric in the mass inner product, so its spectral
    radius comes from a symmetric tridiagonal eigenproblem.
    """
    cp, cm, mass = laplacian_coefficients(N, dr, M)
    diag = -(cp[:M] + cm[:M])
    off = cp[: M - 1] * np.sqrt(mass[: M - 1] / mass[1:M])
    lam = linalg.eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 0))[0]
    return 2.0 / (dr * math.sqrt(-lam))


# -- results ----------------------------------------------------------------

@dataclass
class BlowupReport:
    T_num: Optional[float]
    cause: str                          # threshold | nan | none
    threshold: float
    t_reached: float
    max_amplitude: np.ndarray = field(repr=False)
    dt: float = 0.0
    backend: str = ""
    grid_ratio: Optional[float] = None

    def to_dict(self) -> dict:
        amp = self.max_amplitude
        stride = max(1, amp.size // 500)
        return {
            "schema": REPORT_SCHEMA,
            "T_num": self.T_num,
            "cause": self.cause,
            "threshold": self.threshold,
            "t_reached": self.t_reached,
            "backend": self.backend,
            "grid_ratio": self.grid_ratio,
            "max_amplitude": {"t": (np.arange(0, amp.size, stride) * self.dt).tolist(),
                              "value": amp[::stride].tolist()},
        }


@dataclass
class SimulationResult:
    config: SolverConfig
    report: BlowupReport
    r: np.ndarray
    t: np.ndarray                # snapshot times
    u: np.ndarray                # (fields, snapshots, nodes)
    ut: np.ndarray

    def field(self, index: int = 0, derivative: bool = False) -> SpaceTimeField:
        vals = self.ut[index] if derivative else self.u[index]
        return SpaceTimeField(self.r, self.t, vals, self.config.spec.N, self.config.field_data[index].r0)


def simulate(config: SolverConfig, backend: Optional[str] = None) -> SimulationResult:
    """Integrate until ``t_max``, the amplitude threshold, or a non-finite value."""
    N = config.spec.N
    dr, dt = config.dr, config.dt
    M = int(math.ceil(config.radius / dr))
    r = dr * np.arange(M + 1)
    cp, cm, _ = laplacian_coefficients(N, dr, M)
    if config.laplacian:
        limit = max_stable_cfl(N, dr, M)
        if config.cfl >= limit:
            raise CFLError(f"cfl {config.cfl} exceeds the stability limit {limit:.4f} for N={N}")
    nf = config.n_fields
    eps = config.epsilon
    u0 = np.array([eps * d.f(r) for d in config.field_data])
    g0 = np.array([eps * d.g(r) for d in config.field_data])
    u0[:, M] = g0[:, M] = 0.0
    lap0 = apply_laplacian(u0, cp, cm) if config.laplacian else 0.0
    u1 = u0 + dt * g0 + 0.5 * dt * dt * (lap0 + nonlinearity(config.spec, u0, g0, config.linear))
    u1[:, M] = 0.0
    U = np.zeros((nf, 3, M + 1))
    U[:, 0], U[:, 1] = u0, u1
    U[:, 2] = u1 - 2.0 * dt * g0

    n_total = int(math.ceil(config.t_max / dt - 1e-9))
    save_every = config.save_every or max(1, n_total // config.n_snapshots)
    n_save = n_total // save_every + 1
    tr_u = np.zeros((nf, n_save, M + 1))
    tr_ut = np.zeros((nf, n_save, M + 1))
    tr_u[:, 0], tr_ut[:, 0] = u0, g0
    amp = np.zeros(n_total + 2)
    amp[0] = float(np.max(np.maximum(np.abs(u0), np.abs(g0))))
    amp[1] = float(np.max(np.maximum(np.abs(u1), np.abs(g0))))
    # nodes up to r0 + t + 2 dr are updated, the rest stay exactly zero
    support = int(math.ceil(max(d.r0 for d in config.field_data) / dr))
    cells = config.cfl if config.laplacian else -1.0
    coef, pw, src = nonlinearity_table(config.spec, config.linear)
    thr = config.threshold
    kern = kernels.get(backend)
    if not np.isfinite(amp[1]):
        n_reached, status = 1, 2
    elif amp[1] > thr:
        n_reached, status = 1, 1
    else:
        n_reached, status = kern.leapfrog_advance(U, cp, cm, dt, coef, pw, src, 1, n_total, support, cells, thr,
                                                  save_every, tr_u, tr_ut, amp, int(config.laplacian))
    if status == 1:
        k = n_reached
        a0, a1 = amp[k - 1], amp[k]
        T = (k - 1) * dt + dt * (thr - a0) / (a1 - a0)
        cause = "threshold"
    elif status == 2:
        T, cause = n_reached * dt, "nan"
    else:
        T, cause = None, "none"
    # snapshot j is complete once level j*save_every + 1 exists
    n_valid = min(n_save, (n_reached - 1) // save_every + 1)
    report = BlowupReport(T, cause, thr, n_reached * dt, amp[: n_reached + 1].copy(), dt,
                          backend or kernels.active_name())
    t_snap = dt * save_every * np.arange(n_valid)
    return SimulationResult(config, report, r, t_snap, tr_u[:, :n_valid], tr_ut[:, :n_valid])


# -- linear-regime diagnostics ---------------------------------------------

def dalembert_1d(data: InitialData, epsilon: float, r, t):
    """Exact N = 1 linear solution for even data (d'Alembert)."""
    r = np.asarray(r, dtype=np.float64)
    P = np.polynomial.Polynomial([1.0, 0.0, -1.0]) ** data.power
    Pint = P.integ()

    def G(x):  # antiderivative of the even profile, clamped outside the support
        s = np.clip(x / data.r0, -1.0, 1.0)
        return data.r0 * Pint(s)

    fpart = 0.5 * (data.f(np.abs(r - t)) + data.f(r + t))
    gpart = 0.5 * data.amp_g * (G(r + t) - G(r - t))
    return epsilon * (fpart + gpart)


def energy(result: SimulationResult, index: int = 0) -> np.ndarray:
    """``(1/2) int (u_t^2 + u_r^2) dx`` at each snapshot."""
    N = result.config.spec.N
    r = result.r
    ut = result.ut[index]
    ur = np.gradient(result.u[index], r, axis=1, edge_order=2)
    dens = (ut**2 + ur**2) * r ** (N - 1)
    return 0.5 * unit_sphere_area(N) * integrate.simpson(dens, x=r, axis=1)


def energy_drift(result: SimulationResult, index: int = 0) -> float:
    E = energy(result, index)
    return float(np.max(np.abs(E - E[0])) / E[0])


def support_radius(result: SimulationResult, index: int = 0, rel: float = 1e-12) -> np.ndarray:
    """Largest r with ``|u| > rel * max|u|`` at each snapshot."""
    u = np.abs(result.u[index])
    scale = u.max()
    out = np.zeros(u.shape[0])
    for j in range(u.shape[0]):
        idx = np.flatnonzero(u[j] > rel * scale)
        out[j] = result.r[idx[-1]] if idx.size else 0.0
    return out


# -- weak identity ---------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """``Psi = psi_R(t)`` or ``Phi_{beta,lam}(r, t) psi_R(t)``."""

    R: float
    k: float = 4.0
    phi: Optional[PhiSpec] = None

    def evaluate(self, r, t, r_cap):
        """Psi, Psi_t, Psi_r on the grid; zero beyond ``r_cap(t)`` (where u vanishes)."""
        cut = CutoffSpec(self.k, self.R)
        ps = np.asarray(psi(cut, t))[:, None]
        dps = np.asarray(dpsi(cut, t))[:, None]
        Rg, Tg = np.meshgrid(r, t)
        if self.phi is None:
            one = np.ones_like(Rg)
            return ps * one, dps * one, np.zeros_like(Rg)
        mask = Rg <= r_cap(Tg)
        P, Pt, Pr = (np.zeros_like(Rg) for _ in range(3))
        rr, tt = Rg[mask], Tg[mask]
        P[mask] = phi(self.phi, rr, tt)
        Pt[mask] = dphi_dt(self.phi, rr, tt)
        Pr[mask] = dphi_dr(self.phi, rr, tt)
        return P * ps, Pt * ps + P * dps, Pr * ps


def weak_identity_residual(result: SimulationResult, test: TestFunction, signed: bool = False) -> float:
    """Relative mismatch of the weak formulation (largest over fields).

    ``eps int g Psi(0) + int int G Psi`` against
    ``int int (-u_t Psi_t + u_r Psi_r)``; Simpson in r and in t.  With
    ``signed`` the sign of ``lhs - rhs`` is kept.
    """
    cfg = result.config
    N = cfg.spec.N
    t, r = result.t, result.r
    if t[-1] < test.R:
        raise SupportError("Psi must vanish before the end of the trace window")
    if test.phi is not None:
        if test.phi.N != N:
            raise DomainError("PhiSpec dimension differs from the simulation's")
        r0 = max(d.r0 for d in cfg.field_data)
        if test.phi.lam <= r0:
            raise DomainError("lambda must exceed r0 so the support stays inside the cone")
        gap = 0.5 * (test.phi.lam - r0)
        r_cap = lambda tt: r0 + tt + gap
    else:
        r_cap = None
    keep = t <= test.R + (t[1] - t[0] if t.size > 1 else 0.0)
    keep[: min(t.size, 3)] = True
    tt = t[keep]
    P, Pt, Pr = test.evaluate(r, tt, r_cap)
    area = unit_sphere_area(N)
    w = r ** (N - 1)
    G = nonlinearity(cfg.spec, result.u[:, keep], result.ut[:, keep], cfg.linear)
    worst = 0.0
    for f, d in enumerate(cfg.field_data):
        u, ut = result.u[f, keep], result.ut[f, keep]
        ur = np.gradient(u, r, axis=1, edge_order=2)

        def st(vals):
            return area * integrate.simpson(integrate.simpson(vals * w, x=r, axis=1), x=tt)

        lhs = area * cfg.epsilon * integrate.simpson(d.g(r) * P[0] * w, x=r) + st(G[f] * P)
        rhs = st(-ut * Pt + ur * Pr)
        scale = max(abs(lhs), abs(rhs))
        rel = (lhs - rhs) / scale if scale > 0 else 0.0
        if abs(rel) >= abs(worst):
            worst = rel
    return worst if signed else abs(worst)


# -- concentration ---------------------------------------------------------

@dataclass
class ConcentrationResult:
    mode: str
    p: float
    R: np.ndarray
    ratios: np.ndarray

    @property
    def inf(self) -> float:
        return float(self.ratios.min())

    @property
    def variation(self) -> float:
        """``max/min - 1`` over the R grid."""
        return float(self.ratios.max() / self.ratios.min() - 1.0)


def check_concentration(result: SimulationResult, p: float, R_grid, mode: str = "u",
                        k: Optional[float] = None, index: int = 0) -> ConcentrationResult:
    """``int int |u|^p psi_R* / ((I[g] eps)^p R^(N-(N-1)p/2))`` on ``R_grid``.

    ``mode="ut"`` uses ``|u_t|^p``.
    """
    if mode not in ("u", "ut"):
        raise ValueError("mode must be 'u' or 'ut'")
    cfg = result.config
    N = cfg.spec.N
    k = k if k is not None else max(4.0, 2.0 * p / (p - 1.0))
    fld = result.field(index, derivative=(mode == "ut"))
    w = SpaceTimeField(fld.r, fld.t, np.abs(fld.values) ** p, N, fld.r0)
    Ie = cfg.field_data[index].Ig(N) * cfg.epsilon
    R = np.asarray(R_grid, dtype=np.float64)
    vals = np.array([spacetime_integral(w, "psi_star", CutoffSpec(k, Rv)) for Rv in R])
    return ConcentrationResult(mode, p, R, vals / (Ie**p * R ** (N - (N - 1) * p / 2.0)))


# -- lifespan with grid certificate ----------------------------------------

@dataclass
class LifespanMeasurement:
    T_num: Optional[float]
    dr_values: list
    T_values: list
    rel_change: Optional[float]
    converged: bool
    cause: str

    def to_dict(self) -> dict:
        return asdict(self)


def measure_lifespan(config: SolverConfig, tol: float = 0.05, max_refinements: int = 2,
                     backend: Optional[str] = None) -> LifespanMeasurement:
    """Blow-up time at ``dr`` and ``dr/2`` (once more at ``dr/4`` if they disagree)."""
    drs, Ts = [], []
    dr = config.dr
    rel = None
    cause = "none"
    for level in range(max_refinements + 1):
        res = simulate(config.with_dr(dr), backend)
        drs.append(dr)
        Ts.append(res.report.T_num)
        cause = res.report.cause
        if res.report.T_num is None:
            return LifespanMeasurement(None, drs, Ts, None, False, cause)
        if level > 0:
            rel = abs(Ts[-2] - Ts[-1]) / Ts[-1]
            if rel < tol:
                return LifespanMeasurement(Ts[-1], drs, Ts, rel, True, cause)
        dr /= 2.0
    return LifespanMeasurement(Ts[-1], drs, Ts, rel, False, cause)


def ode_blowup_time(p: float, u0: float, v0: float, threshold: float, kind: ProblemKind,
                    a: float = 1.0) -> float:
    """Oracle for the Laplacian-free run: ``u'' = a|u|^p`` (or ``a|u'|^p``).

    Solved in the arclength-like variable ``log`` amplitude would be neater,
    but a plain stiff-safe LSODA integration with a terminal event on
    ``max(|u|, |u'|) = threshold`` is accurate enough for a 1% check.
    """
    def rhs(t, y):
        src = y[0] if kind == ProblemKind.SINGLE_POWER_U else y[1]
        return [y[1], a * abs(src) ** p]

    def hit(t, y):
        return max(abs(y[0]), abs(y[1])) - threshold
    hit.terminal = True
    sol = integrate.solve_ivp(rhs, (0.0, 1e8), [u0, v0], method="LSODA", rtol=1e-11, atol=1e-14,
                              events=hit)
    if not sol.t_events[0].size:
        raise RuntimeError("ODE oracle did not reach the threshold")
    return float(sol.t_events[0][0])


# -- configuration files and output ----------------------------------------

def load_config(path: str) -> SolverConfig:
    """Read a key/value config with sections [problem], [data], [solver] (optional [data_v])."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise FileNotFoundError(path)
    return config_from_parser(cp)


def config_from_parser(cp: configparser.ConfigParser) -> SolverConfig:
    pr = cp["problem"]
    q = pr.get("q")
    spec = ProblemSpec(ProblemKind(pr.get("kind")), pr.getint("N"), pr.getfloat("p"),
                       float(q) if q not in (None, "") else None,
                       pr.getfloat("a", 1.0), pr.getfloat("b", 1.0))

    def data(sec):
        s = cp[sec]
        return InitialData(s.get("family", "bump"), s.getfloat("r0", 1.0), s.getfloat("amp_f", 1.0),
                           s.getfloat("amp_g", 1.0), s.getint("power", 4))

    so = cp["solver"]
    r_max = so.get("r_max")
    save_every = so.get("save_every")
    return SolverConfig(
        spec=spec,
        data=data("data") if cp.has_section("data") else InitialData(),
        epsilon=so.getfloat("epsilon"),
        dr=so.getfloat("dr"),
        t_max=so.getfloat("t_max"),
        cfl=so.getfloat("cfl", 0.5),
        r_max=float(r_max) if r_max else None,
        threshold_factor=so.getfloat("threshold_factor", 1e6),
        richardson=so.getboolean("richardson", False),
        laplacian=so.getboolean("laplacian", True),
        data_v=data("data_v") if cp.has_section("data_v") else None,
        n_snapshots=so.getint("n_snapshots", 400),
        save_every=int(save_every) if save_every else None,
        linear=so.getboolean("linear", False),
    )


def write_outputs(result: SimulationResult, out_dir: str, fmt: str = "json", max_rows: int = 200,
                  max_cols: int = 200) -> list[str]:
    """Write the report (JSON) and decimated traces ('csv' long table or 'json')."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    rep = os.path.join(out_dir, "report.json")
    with open(rep, "w") as fh:
        json.dump({"config": result.config.to_dict(), "report": result.report.to_dict()}, fh, indent=2)
    paths.append(rep)
    js = max(1, result.t.size // max_rows)
    ks = max(1, result.r.size // max_cols)
    t, r = result.t[::js], result.r[::ks]
    names = ["u", "v"][: result.u.shape[0]]
    if fmt == "csv":
        path = os.path.join(out_dir, "traces.csv")
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["field", "t", "r", "value", "dt_value"])
            for f, name in enumerate(names):
                U, Ut = result.u[f, ::js, ::ks], result.ut[f, ::js, ::ks]
                for j, tj in enumerate(t):
                    for i, ri in enumerate(r):
                        wr.writerow([name, f"{tj:.10g}", f"{ri:.10g}", f"{U[j, i]:.12g}", f"{Ut[j, i]:.12g}"])
    elif fmt == "json":
        path = os.path.join(out_dir, "traces.json")
        with open(path, "w") as fh:
            json.dump({"schema": "wavelife.traces/1", "t": t.tolist(), "r": r.tolist(),
                       "fields": {n: {"value": result.u[f, ::js, ::ks].tolist(),
                                      "dt_value": result.ut[f, ::js, ::ks].tolist()}
                                  for f, n in enumerate(names)}}, fh)
    else:
        raise ValueError("format must be csv or json")
    paths.append(path)
    return paths
