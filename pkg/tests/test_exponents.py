import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavelife import exponents as ex
from wavelife.exponents import LawForm, ProblemKind, ProblemSpec, classify


def test_gamma_S_examples():
    assert ex.gamma_S(3, 2) == 2
    assert ex.gamma_S(1, 5) == 2 + 2 * 5
    assert abs(ex.gamma_S(3, 1 + math.sqrt(2))) < 1e-12


def test_critical_exponents():
    assert ex.p_S(3) == pytest.approx(1 + math.sqrt(2), abs=1e-15)
    assert ex.p_S(2) == pytest.approx((3 + math.sqrt(17)) / 2, abs=1e-14)
    assert ex.p_S(1) == math.inf
    assert ex.p_G(3) == 2
    assert ex.p_G(1) == math.inf


@pytest.mark.parametrize("p", [1.0, 0.5])
def test_domain_errors(p):
    with pytest.raises(ex.DomainError):
        ex.gamma_S(3, p)
    with pytest.raises(ex.DomainError):
        ProblemSpec(ProblemKind.SINGLE_POWER_U, 3, p)


def test_spec_validation():
    with pytest.raises(ex.DomainError):
        ProblemSpec(ProblemKind.SINGLE_POWER_U, 0, 2)
    with pytest.raises(ex.DomainError):
        ProblemSpec(ProblemKind.SYSTEM_SS, 3, 2)  # q missing
    with pytest.raises(ex.DomainError):
        ProblemSpec(ProblemKind.COMBINED, 3, 2, 3, a=0)


@settings(max_examples=200, deadline=None)
@given(N=st.integers(2, 8), p=st.floats(1.001, 10.0))
def test_strauss_sign_matches_threshold(N, p):
    g = ex.gamma_S(N, p)
    if abs(p - ex.p_S(N)) > 1e-9:
        assert (g > 0) == (p < ex.p_S(N))


@settings(max_examples=200, deadline=None)
@given(N=st.integers(1, 8), p=st.floats(1.001, 10.0))
def test_exponent_identities(N, p):
    assert ex.Gamma_S(N, p) == pytest.approx(ex.gamma_S(N, p) / (2 * p * (p - 1)), rel=1e-12, abs=1e-12)
    assert ex.F_GG(N, p, p) == pytest.approx(ex.Gamma_G(N, p), rel=1e-12, abs=1e-12)
    assert ex.F_SS(N, p, p) == pytest.approx(ex.Gamma_S(N, p), rel=1e-12, abs=1e-12)


def test_exact_arithmetic_for_rationals():
    assert ex.Gamma_S(3, Fraction(2)) == Fraction(1, 2)
    assert ex.F_SG1(3, 2, 2) == Fraction(1, 6)
    assert ex.F_SG2(3, 2, 2) == Fraction(-1, 6)
    assert ex.Gamma_G(3, 2) == 0


def test_exponent_suite_keys():
    s = ex.exponent_suite(ProblemSpec(ProblemKind.SYSTEM_SG, 3, 2, 2))
    assert s["F_SG1"] == Fraction(1, 6)
    assert s["Gamma_SG"] == Fraction(1, 6)
    assert "Gamma_comb" not in s


def test_classify_examples():
    law = classify(ProblemSpec(ProblemKind.SINGLE_POWER_U, 3, 2))
    assert law.form is LawForm.POWER_LAW and law.exponent == 0.5
    assert law.predicted_slope == -2.0
    law = classify(ProblemSpec(ProblemKind.SINGLE_POWER_U, 3, 1 + math.sqrt(2)))
    assert law.form is LawForm.EXPONENTIAL
    assert law.exponent == pytest.approx(2 + math.sqrt(2), rel=1e-12)
    law = classify(ProblemSpec(ProblemKind.SINGLE_POWER_UT, 3, 2))
    assert law.form is LawForm.EXPONENTIAL and law.exponent == 1.0


def test_log_corrected_only_at_N2_p2():
    assert classify(ProblemSpec(ProblemKind.SINGLE_POWER_U, 2, 2)).log_corrected
    for N, p in [(2, Fraction(3, 2)), (3, 2), (1, 2), (2, Fraction(5, 2))]:
        assert not classify(ProblemSpec(ProblemKind.SINGLE_POWER_U, N, p)).log_corrected


def test_combined_reports_all_matching_cases():
    # p = p_G(3) = 2 and q = 4 > 3 = 2p - 1 also meets no other listed case
    law = classify(ProblemSpec(ProblemKind.COMBINED, 3, 2, 4))
    assert law.binding_condition.startswith("comb-1")
    # p = 3/2, q = 3: case 2 holds; case 3 needs q <= 2p - 1 = 2, so only one case
    law = classify(ProblemSpec(ProblemKind.COMBINED, 3, Fraction(3, 2), 3))
    assert law.matching_cases == ("comb-2:p<p_G,q>2p-1",)


def test_near_critical_flag():
    p = ex.p_S(3) + 5e-10
    law = classify(ProblemSpec(ProblemKind.SINGLE_POWER_U, 3, p))
    assert law.near_critical


@settings(max_examples=100, deadline=None)
@given(kind=st.sampled_from(list(ProblemKind)), N=st.integers(1, 5), p=st.floats(1.05, 6), q=st.floats(1.05, 6),
       a=st.floats(0.01, 100), b=st.floats(0.01, 100))
def test_classify_scale_free(kind, N, p, q, a, b):
    base = classify(ProblemSpec(kind, N, p, q))
    other = classify(ProblemSpec(kind, N, p, q, a, b))
    assert (base.form, base.exponent) == (other.form, other.exponent)


def test_strauss_power_exponent_increasing_in_p():
    for N in (3, 4, 5):
        ps = np.linspace(1.01, ex.p_S(N) - 1e-3, 200)
        inv = [1.0 / ex.Gamma_S(N, p) for p in ps]
        assert np.all(np.diff(inv) > 0)


def test_law_serialises():
    d = classify(ProblemSpec(ProblemKind.SYSTEM_SG, 3, 2, Fraction(5, 2))).to_dict()
    assert d["form"] == "Exponential" and d["exponent"] == 10.0
    rep = ex.classification_report(ProblemSpec(ProblemKind.SYSTEM_SG, 3, 2, 2))
    assert rep["schema"] == "wavelife.classify/1"


def test_trace_curve_gg_point():
    curve = ex.trace_critical_curve(ProblemKind.SYSTEM_GG, 3, (1.5, 4.0), 11)
    pts = curve.curves["Gamma_GG"]
    assert any(abs(p - 2.0) < 1e-12 and abs(q - 2.0) < 1e-10 for p, q in pts)
    for p, q in pts:
        assert abs(ex.Gamma_GG(3, p, q)) < 1e-10
        # whichever order binds satisfies (N-1)/2 = (p+1)/(pq-1) with p, q in that order
        a, b = (p, q) if ex.F_GG(3, p, q) >= ex.F_GG(3, q, p) else (q, p)
        assert (3 - 1) / 2 == pytest.approx((a + 1) / (a * b - 1), abs=1e-10)


def test_trace_curve_sg_intersection():
    curve = ex.trace_critical_curve(ProblemKind.SYSTEM_SG, 3, (1.5, 4.0), 16)
    p, q = curve.intersection
    assert abs(ex.F_SG1(3, p, q)) < 1e-10 and abs(ex.F_SG2(3, p, q)) < 1e-10
    assert p == pytest.approx(1 + math.sqrt(3), abs=1e-9)


def test_trace_curve_errors():
    with pytest.raises(ex.DomainError):
        ex.trace_critical_curve(ProblemKind.SYSTEM_SS, 3, (1.5, 4.0), 1)
    with pytest.raises(ex.NoRootError):
        ex.trace_critical_curve(ProblemKind.SYSTEM_GG, 7, (5.0, 6.0), 4)
