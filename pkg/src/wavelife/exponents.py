"""Critical exponents and the lifespan-law classifier.

All quantities are plain rational functions of ``(N, p, q)``.  When every
input is an ``int`` or ``fractions.Fraction`` the arithmetic stays exact, so
criticality (an exponent equal to zero) is decided exactly.  Floating point
inputs are compared against zero with an absolute tolerance of ``1e-12`` and a
``near_critical`` flag is raised within ``1e-9``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Callable, Optional, Union

Number = Union[int, float, Fraction]

ZERO_TOL = 1e-12
NEAR_TOL = 1e-9
BISECT_TOL = 1e-12

_ONE = Fraction(1)


class DomainError(ValueError):
    """Raised for parameters outside the admissible range."""


class NoRootError(ValueError):
    """Raised when a critical curve does not cross the sampled range."""


class ProblemKind(str, enum.Enum):
    SINGLE_POWER_U = "SinglePowerU"
    SINGLE_POWER_UT = "SinglePowerUt"
    COMBINED = "Combined"
    SYSTEM_SS = "SystemSS"
    SYSTEM_GG = "SystemGG"
    SYSTEM_SG = "SystemSG"

    @property
    def is_system(self) -> bool:
        return self in (ProblemKind.SYSTEM_SS, ProblemKind.SYSTEM_GG, ProblemKind.SYSTEM_SG)

    @property
    def uses_q(self) -> bool:
        return self not in (ProblemKind.SINGLE_POWER_U, ProblemKind.SINGLE_POWER_UT)


class LawForm(str, enum.Enum):
    POWER_LAW = "PowerLaw"
    EXPONENTIAL = "Exponential"
    LOG_CORRECTED = "LogCorrected"
    NO_CLAIM = "NoClaim"


@dataclass(frozen=True)
class ProblemSpec:
    """Equation or system, dimension, powers and nonlinearity coefficients.

    For ``Combined`` the nonlinearity is ``a|u|^q + b|u_t|^p``; for the
    systems the orientation is

    * SS: ``a|v|^p`` drives ``u``, ``b|u|^q`` drives ``v``
    * GG: ``a|v_t|^p`` drives ``u``, ``b|u_t|^q`` drives ``v``
    * SG: ``a|v|^q`` drives ``u``, ``b|u_t|^p`` drives ``v``
    """

    kind: ProblemKind
    N: int
    p: Number
    q: Optional[Number] = None
    a: Number = 1
    b: Number = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ProblemKind(self.kind))
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.N, int) or isinstance(self.N, bool) or self.N < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.N!r}")
        if not self.p > 1:
            raise DomainError(f"p must exceed 1, got {self.p!r}")
        if self.kind.uses_q:
            if self.q is None or not self.q > 1:
                raise DomainError(f"q must exceed 1 for {self.kind.value}, got {self.q!r}")
        if not (self.a > 0 and self.b > 0):
            raise DomainError("coefficients a and b must be positive")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "N": self.N,
            "p": _jsonable(self.p),
            "q": _jsonable(self.q),
            "a": _jsonable(self.a),
            "b": _jsonable(self.b),
        }


@dataclass(frozen=True)
class LifespanLaw:
    """Predicted upper bound for the lifespan.

    ``PowerLaw`` means ``T <= C eps^(-1/exponent)``; ``Exponential`` means
    ``T <= exp(C eps^(-exponent))``.  ``log_corrected`` marks the single case
    where a sharper bound with a logarithmic correction is known; the
    exponent is not altered by it.
    """

    form: LawForm
    exponent: Optional[float]
    binding_condition: str
    matching_cases: tuple = ()
    near_critical: bool = False
    log_corrected: bool = False
    notes: tuple = ()

    @property
    def predicted_slope(self) -> Optional[float]:
        """Slope of ``log T`` (PowerLaw) or ``log log T`` (Exponential) in ``log eps``."""
        if self.form is LawForm.POWER_LAW:
            return -1.0 / float(self.exponent)
        if self.form is LawForm.EXPONENTIAL:
            return -float(self.exponent)
        return None

    def scale(self, epsilon: float) -> float:
        """The eps-dependent factor of the bound with ``C = 1``."""
        if self.form is LawForm.POWER_LAW:
            return epsilon ** (-1.0 / float(self.exponent))
        if self.form is LawForm.EXPONENTIAL:
            return math.exp(epsilon ** (-float(self.exponent)))
        return math.inf

    def to_dict(self) -> dict:
        d = asdict(self)
        d["form"] = self.form.value
        d["exponent"] = _jsonable(self.exponent)
        d["matching_cases"] = list(self.matching_cases)
        d["notes"] = list(self.notes)
        return d


def _jsonable(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return float(x) if x.denominator != 1 else int(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _is_exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in xs)


def _check_Np(N: int, p: Number) -> None:
    if not isinstance(N, int) or N < 1:
        raise DomainError(f"dimension must be a positive integer, got {N!r}")
    if not p > 1:
        raise DomainError(f"power must exceed 1, got {p!r}")


def _half(N: int) -> Fraction:
    return Fraction(N - 1, 2)


# -- single equations -------------------------------------------------------

def gamma_S(N: int, p: Number) -> Number:
    """Strauss quadratic ``2 + (N+1)p - (N-1)p^2``."""
    _check_Np(N, p)
    return 2 + (N + 1) * p - (N - 1) * p * p


def p_S(N: int) -> float:
    """Strauss exponent: positive root of ``gamma_S(N, .)``; ``inf`` for N = 1."""
    if not isinstance(N, int) or N < 1:
        raise DomainError(f"dimension must be a positive integer, got {N!r}")
    if N == 1:
        return math.inf
    return ((N + 1) + math.sqrt(N * N + 10 * N - 7)) / (2 * (N - 1))


def p_G(N: int) -> Number:
    """Glassey exponent ``(N+1)/(N-1)``; ``inf`` for N = 1."""
    if not isinstance(N, int) or N < 1:
        raise DomainError(f"dimension must be a positive integer, got {N!r}")
    if N == 1:
        return math.inf
    return Fraction(N + 1, N - 1)


def Gamma_S(N: int, p: Number) -> Number:
    _check_Np(N, p)
    return (1 + _ONE / p) / (p - 1) - _half(N)


def Gamma_G(N: int, p: Number) -> Number:
    _check_Np(N, p)
    return _ONE / (p - 1) - _half(N)


def Gamma_comb(N: int, p: Number, q: Number) -> Number:
    """Combined exponent; ``p`` is the ``|u_t|`` power and ``q`` the ``|u|`` power."""
    _check_Np(N, p)
    _check_Np(N, q)
    return (q + 1) / (p * (q - 1) * _ONE) - _half(N)


# -- systems ----------------------------------------------------------------

def F_SS(N: int, p: Number, q: Number) -> Number:
    _check_Np(N, p)
    _check_Np(N, q)
    return (p + 2 + _ONE / q) / (p * q - 1) - _half(N)


def F_GG(N: int, p: Number, q: Number) -> Number:
    _check_Np(N, p)
    _check_Np(N, q)
    return (p + 1) / (p * q - 1 * _ONE) - _half(N)


def F_SG1(N: int, p: Number, q: Number) -> Number:
    _check_Np(N, p)
    _check_Np(N, q)
    return (_ONE / p + 1 + q) / (p * q - 1) - _half(N)


def F_SG2(N: int, p: Number, q: Number) -> Number:
    _check_Np(N, p)
    _check_Np(N, q)
    return (2 + _ONE / q) / (p * q - 1) - _half(N)


def Gamma_SS(N: int, p: Number, q: Number) -> Number:
    return max(F_SS(N, p, q), F_SS(N, q, p))


def Gamma_GG(N: int, p: Number, q: Number) -> Number:
    return max(F_GG(N, p, q), F_GG(N, q, p))


def Gamma_SG(N: int, p: Number, q: Number) -> Number:
    return max(F_SG1(N, p, q), F_SG2(N, p, q))


def exponent_suite(spec: ProblemSpec) -> dict:
    """All exponents relevant to ``spec.kind``."""
    spec.validate()
    N, p, q = spec.N, spec.p, spec.q
    k = spec.kind
    out: dict = {}
    if k is ProblemKind.SINGLE_POWER_U:
        out["gamma_S"] = gamma_S(N, p)
        out["Gamma_S"] = Gamma_S(N, p)
        out["p_S"] = p_S(N)
    elif k is ProblemKind.SINGLE_POWER_UT:
        out["Gamma_G"] = Gamma_G(N, p)
        out["p_G"] = p_G(N)
    elif k is ProblemKind.COMBINED:
        out["Gamma_S(N,q)"] = Gamma_S(N, q)
        out["Gamma_G(N,p)"] = Gamma_G(N, p)
        out["Gamma_comb"] = Gamma_comb(N, p, q)
        out["p_S"] = p_S(N)
        out["p_G"] = p_G(N)
    elif k is ProblemKind.SYSTEM_SS:
        out["F_SS(p,q)"] = F_SS(N, p, q)
        out["F_SS(q,p)"] = F_SS(N, q, p)
        out["Gamma_SS"] = Gamma_SS(N, p, q)
    elif k is ProblemKind.SYSTEM_GG:
        out["F_GG(p,q)"] = F_GG(N, p, q)
        out["F_GG(q,p)"] = F_GG(N, q, p)
        out["Gamma_GG"] = Gamma_GG(N, p, q)
    elif k is ProblemKind.SYSTEM_SG:
        out["F_SG1"] = F_SG1(N, p, q)
        out["F_SG2"] = F_SG2(N, p, q)
        out["Gamma_SG"] = Gamma_SG(N, p, q)
    return out


# -- classification ---------------------------------------------------------

class _Signs:
    """Sign decisions with the exact/tolerance policy; remembers near misses."""

    def __init__(self) -> None:
        self.near = False

    def sign(self, x: Number) -> int:
        if isinstance(x, (int, Fraction)):
            return (x > 0) - (x < 0)
        if math.isinf(x):
            return 1 if x > 0 else -1
        ax = abs(x)
        if ax <= ZERO_TOL:
            return 0
        if ax <= NEAR_TOL:
            self.near = True
        return 1 if x > 0 else -1

    def cmp(self, x: Number, y: Number) -> int:
        if math.isinf(x) or math.isinf(y):
            return (x > y) - (x < y)
        return self.sign(x - y)


def _power(gamma: Number, tag: str, cases, near, **kw) -> LifespanLaw:
    return LifespanLaw(LawForm.POWER_LAW, float(gamma), tag, tuple(cases), near, **kw)


def _expo(a: Number, tag: str, cases, near, **kw) -> LifespanLaw:
    return LifespanLaw(LawForm.EXPONENTIAL, float(a), tag, tuple(cases), near, **kw)


def _no_claim(tag: str, near: bool) -> LifespanLaw:
    return LifespanLaw(LawForm.NO_CLAIM, None, tag, (), near)


def _classify_u(N, p, s: _Signs) -> LifespanLaw:
    gS = Gamma_S(N, p)
    sg = s.sign(gS)
    if N == 1:
        return _power(2 / (p - 1 * _ONE), "N=1", ["N=1"], s.near)
    if N == 2 and s.cmp(p, 2) <= 0:
        log = s.cmp(p, 2) == 0
        notes = ("sharper bound T <= C a(eps), a^2 eps^2 log(1+a) = 1",) if log else ()
        return _power((3 - p) / (p - 1 * _ONE), "N=2,p<=2", ["N=2,p<=2"], s.near,
                      log_corrected=log, notes=notes)
    if sg > 0:
        tag = "N=2,2<p<p_S" if N == 2 else "N>=3,p<p_S"
        return _power(gS, tag, [tag], s.near)
    if sg == 0:
        return _expo(p * (p - 1), "p=p_S", ["p=p_S"], s.near)
    return _no_claim("Gamma_S<0", s.near)


def _classify_ut(N, p, s: _Signs) -> LifespanLaw:
    gG = Gamma_G(N, p)
    sg = s.sign(gG)
    if sg > 0:
        return _power(gG, "p<p_G", ["p<p_G"], s.near)
    if sg == 0:
        return _expo(p - 1, "p=p_G", ["p=p_G"], s.near)
    return _no_claim("Gamma_G<0", s.near)


def _classify_comb(N, p, q, s: _Signs) -> LifespanLaw:
    gSq = Gamma_S(N, q)
    gGp = Gamma_G(N, p)
    gc = Gamma_comb(N, p, q)
    sSq, sGp, sc = s.sign(gSq), s.sign(gGp), s.sign(gc)
    if not (max(sSq, sGp) >= 0 or sc > 0):
        return _no_claim("Gamma_S(N,q)<0,Gamma_G(N,p)<0,Gamma_comb<=0", s.near)
    q_glassey = math.inf if N == 1 else 1 + Fraction(4, N - 1)
    cases = []
    # cases are tried in their listed order; the first match is binding
    if N >= 2 and sGp == 0 and s.cmp(q, q_glassey) > 0:
        cases.append(("comb-1:p=p_G,q>1+4/(N-1)", _expo(p - 1, "comb-1", [], False)))
    if sGp > 0 and s.cmp(q, 2 * p - 1) > 0:
        cases.append(("comb-2:p<p_G,q>2p-1", _power(gGp, "comb-2", [], False)))
    if s.cmp(p, q) <= 0 and s.cmp(q, 2 * p - 1) <= 0 and sc > 0:
        cases.append(("comb-3:p<=q<=2p-1,Gamma_comb>0", _power(gc, "comb-3", [], False)))
    if s.cmp(p, q) > 0 and sSq > 0:
        cases.append(("comb-4:p>q,q<p_S", _power(gSq, "comb-4", [], False)))
    if N >= 2 and s.cmp(p, q) >= 0 and sSq == 0:
        cases.append(("comb-5:p>=q=p_S", _expo(q * (q - 1), "comb-5", [], False)))
    if not cases:
        return _no_claim("no listed case", s.near)
    tag, law = cases[0]
    notes = ("exponent of case 5 read as eps^(-q(q-1))",) if tag.startswith("comb-5") else ()
    return LifespanLaw(law.form, law.exponent, tag, tuple(c for c, _ in cases), s.near,
                       notes=notes)


def _classify_pair(gamma, p, q, s: _Signs, crit_pq, crit_pp, label) -> LifespanLaw:
    sg = s.sign(gamma)
    if sg > 0:
        return _power(gamma, f"Gamma_{label}>0", [f"Gamma_{label}>0"], s.near)
    if sg == 0:
        if s.cmp(p, q) != 0:
            tag = f"Gamma_{label}=0,p!=q"
            return _expo(crit_pq, tag, [tag], s.near)
        tag = f"Gamma_{label}=0,p=q"
        return _expo(crit_pp, tag, [tag], s.near)
    return _no_claim(f"Gamma_{label}<0", s.near)


def _classify_sg(N, p, q, s: _Signs) -> LifespanLaw:
    f1, f2 = F_SG1(N, p, q), F_SG2(N, p, q)
    g = max(f1, f2)
    s1, s2, sg = s.sign(f1), s.sign(f2), s.sign(g)
    if sg > 0:
        return _power(g, "Gamma_SG>0", ["Gamma_SG>0"], s.near)
    if s1 == 0 and s2 < 0:
        return _expo(q * (p * q - 1), "F_SG1=0>F_SG2", ["F_SG1=0>F_SG2"], s.near)
    if s1 < 0 and s2 == 0:
        return _expo(p * (p * q - 1), "F_SG1<0=F_SG2", ["F_SG1<0=F_SG2"], s.near)
    if s1 == 0 and s2 == 0:
        return _expo(p * q - 1, "F_SG1=0=F_SG2", ["F_SG1=0=F_SG2"], s.near)
    return _no_claim("Gamma_SG<0", s.near)


def classify(spec: ProblemSpec, epsilon: Optional[float] = None) -> LifespanLaw:
    """Map a problem to its predicted lifespan law.

    The coefficients ``a, b`` never influence the result.  ``epsilon``, when
    given, is only checked for positivity; use :meth:`LifespanLaw.scale` to
    evaluate the bound's eps-dependence.
    """
    spec.validate()
    if epsilon is not None and not epsilon > 0:
        raise DomainError("epsilon must be positive")
    N, p, q = spec.N, spec.p, spec.q
    s = _Signs()
    k = spec.kind
    if k is ProblemKind.SINGLE_POWER_U:
        return _classify_u(N, p, s)
    if k is ProblemKind.SINGLE_POWER_UT:
        return _classify_ut(N, p, s)
    if k is ProblemKind.COMBINED:
        return _classify_comb(N, p, q, s)
    if k is ProblemKind.SYSTEM_SS:
        return _classify_pair(Gamma_SS(N, p, q), p, q, s,
                              min(p * (p * q - 1), q * (p * q - 1)), p * (p - 1), "SS")
    if k is ProblemKind.SYSTEM_GG:
        return _classify_pair(Gamma_GG(N, p, q), p, q, s, p * q - 1, p - 1, "GG")
    return _classify_sg(N, p, q, s)


def classification_report(spec: ProblemSpec) -> dict:
    """JSON-ready ``{inputs, exponents, law, matching_cases}``."""
    law = classify(spec)
    return {
        "schema": "wavelife.classify/1",
        "inputs": spec.to_dict(),
        "exponents": {k: _jsonable(float(v) if isinstance(v, Fraction) else v)
                      for k, v in exponent_suite(spec).items()},
        "law": law.to_dict(),
        "matching_cases": list(law.matching_cases),
    }


# -- critical curves --------------------------------------------------------

def _binding_function(kind: ProblemKind, N: int) -> list[tuple[str, Callable]]:
    if kind is ProblemKind.SYSTEM_SS:
        return [("Gamma_SS", lambda p, q: Gamma_SS(N, p, q))]
    if kind is ProblemKind.SYSTEM_GG:
        return [("Gamma_GG", lambda p, q: Gamma_GG(N, p, q))]
    if kind is ProblemKind.COMBINED:
        return [("Gamma_comb", lambda p, q: Gamma_comb(N, p, q))]
    if kind is ProblemKind.SYSTEM_SG:
        return [("F_SG1", lambda p, q: F_SG1(N, p, q)),
                ("F_SG2", lambda p, q: F_SG2(N, p, q))]
    raise DomainError(f"no critical curve for {kind.value}")


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    flo = f(lo)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def solve_q(F: Callable, p: float, q_max: float = 1e8) -> Optional[float]:
    """Root in ``q > 1`` of ``F(p, .)``, which is decreasing in ``q``; None if absent."""
    f = lambda q: float(F(p, q))
    lo = 1.0 + 1e-12
    if f(lo) <= 0:
        return None
    hi = 2.0
    while f(hi) > 0:
        lo = hi
        hi *= 2.0
        if hi > q_max:
            return None
    return _bisect(f, lo, hi)


@dataclass
class CriticalCurve:
    kind: ProblemKind
    N: int
    curves: dict = field(default_factory=dict)  # name -> list of (p, q)
    intersection: Optional[tuple] = None

    def rows(self):
        for name, pts in self.curves.items():
            for p, q in pts:
                yield name, p, q
        if self.intersection is not None:
            yield "intersection", self.intersection[0], self.intersection[1]


def trace_critical_curve(kind, N: int, p_range: tuple, resolution: int) -> CriticalCurve:
    """Sample the curve ``{Gamma = 0}`` (both curves for SG) over ``p_range``.

    Points where no root exists are omitted; if none remain a
    :class:`NoRootError` is raised.
    """
    kind = ProblemKind(kind)
    if resolution < 2:
        raise DomainError("resolution must be at least 2")
    lo, hi = p_range
    if not (1 < lo < hi):
        raise DomainError("p_range must satisfy 1 < p_min < p_max")
    ps = [lo + (hi - lo) * i / (resolution - 1) for i in range(resolution)]
    result = CriticalCurve(kind, N)
    for name, F in _binding_function(kind, N):
        pts = []
        for p in ps:
            q = solve_q(F, p)
            if q is not None:
                pts.append((p, q))
        result.curves[name] = pts
    if all(not pts for pts in result.curves.values()):
        raise NoRootError(f"{kind.value} critical curve does not meet p in {p_range}")
    if kind is ProblemKind.SYSTEM_SG:
        result.intersection = _sg_intersection(N, lo, hi)
    return result


def _sg_intersection(N: int, lo: float, hi: float) -> Optional[tuple]:
    F1 = lambda p, q: F_SG1(N, p, q)
    F2 = lambda p, q: F_SG2(N, p, q)

    def gap(p):
        q1, q2 = solve_q(F1, p), solve_q(F2, p)
        if q1 is None or q2 is None:
            return None
        return q1 - q2

    grid = [lo + (hi - lo) * i / 256 for i in range(257)]
    vals = [gap(p) for p in grid]
    for a, b, ga, gb in zip(grid, grid[1:], vals, vals[1:]):
        if ga is None or gb is None:
            continue
        if ga == 0.0:
            return a, solve_q(F1, a)
        if (ga > 0) != (gb > 0):
            p_star = _bisect(lambda p: gap(p), a, b)
            return p_star, solve_q(F1, p_star)
    return None
