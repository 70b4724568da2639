import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsegof.cumulants import (
    DeltaCertificate,
    bernstein_to_delta,
    cumulants_to_moments,
    moments_to_cumulants,
    statulevicius_delta,
    sum_independent_cumulants,
    tail_validity_range,
)
from sparsegof.decomposable import chi_square_cell_cumulants
from sparsegof.errors import ContractError, RangeError, ShapeError
from sparsegof.poisson_moments import central_moment, moment_coefficients


def poisson_central_moments(lam, K, exact=True):
    return [Fraction(0)] + [central_moment(k, lam, exact=exact) for k in range(2, K + 1)]


def brute_cumulants(values, probs, K):
    """Cumulants of a finite discrete law via the log-mgf Taylor series, in exact arithmetic.

    Independent of the partition formula: builds the mgf power series and
    takes its logarithm term by term.
    """
    # raw moment series m_j / j!
    m = [sum((p * Fraction(v) ** j for v, p in zip(values, probs)), Fraction(0)) for j in range(K + 1)]
    a = [m[j] / math.factorial(j) for j in range(K + 1)]
    # log(1 + u) series where u = sum_{j>=1} a_j t^j
    log_series = [Fraction(0)] * (K + 1)
    power = [Fraction(1)] + [Fraction(0)] * K  # u^0
    for r in range(1, K + 1):
        nxt = [Fraction(0)] * (K + 1)
        for i, pi in enumerate(power):
            if pi == 0:
                continue
            for j in range(1, K + 1 - i):
                nxt[i + j] += pi * a[j]
        power = nxt
        for d in range(K + 1):
            log_series[d] += Fraction((-1) ** (r + 1), r) * power[d]
    return [math.factorial(k) * log_series[k] for k in range(1, K + 1)]


def test_poisson_example():
    assert moments_to_cumulants([0, 2, 2, 14, 42]) == pytest.approx([0, 2, 2, 2, 2], abs=1e-12)


def test_gaussian_example():
    assert moments_to_cumulants([0, 1, 0, 3, 0, 15]) == pytest.approx([0, 1, 0, 0, 0, 0], abs=1e-12)


def test_fourth_order_example():
    assert moments_to_cumulants([0, 1, 1, 4])[3] == pytest.approx(1.0)


@pytest.mark.parametrize("lam", [Fraction(1, 2), 1, 3, 10])
def test_poisson_cumulants_all_equal_rate_exact(lam):
    c = moments_to_cumulants(poisson_central_moments(lam, 12), exact=True)
    assert c[0] == 0
    assert all(ck == lam for ck in c[1:])


@pytest.mark.parametrize("lam", [0.25, 1.0, 7.5])
def test_poisson_cumulants_float_mode(lam):
    # order-12 float cancellation costs about 7 digits at lam = 7.5
    c = moments_to_cumulants(poisson_central_moments(lam, 12, exact=False))
    np.testing.assert_allclose(c[1:], lam, rtol=1e-6)


def test_partition_formula_against_log_mgf_series():
    values = [0, 1, 3, 7]
    probs = [Fraction(1, 8), Fraction(3, 8), Fraction(1, 4), Fraction(1, 4)]
    raw = [sum((p * Fraction(v) ** k for v, p in zip(values, probs)), Fraction(0)) for k in range(1, 9)]
    assert moments_to_cumulants(raw, exact=True) == brute_cumulants(values, probs, 8)


@pytest.mark.parametrize("cums, moms", [
    ([0, 1, 0, 0], [0, 1, 0, 3]),
    ([0, 3, 3, 3], [0, 3, 3, 30]),
])
def test_cumulants_to_moments_examples(cums, moms):
    assert cumulants_to_moments(cums) == pytest.approx(moms)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=2, max_size=10))
def test_round_trip(c):
    m = cumulants_to_moments(c)
    back = moments_to_cumulants(m)
    scale = max(1.0, max(abs(v) for v in m))
    np.testing.assert_allclose(cumulants_to_moments(back), m, rtol=1e-8, atol=1e-9 * scale)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=20), min_size=2, max_size=12))
def test_round_trip_exact(c):
    assert moments_to_cumulants(cumulants_to_moments(c, exact=True), exact=True) == c


def test_order_caps():
    with pytest.raises(RangeError):
        moments_to_cumulants([0])
    with pytest.raises(RangeError):
        moments_to_cumulants([])
    with pytest.raises(RangeError):
        moments_to_cumulants([0.0] * 21)
    moments_to_cumulants([Fraction(0)] * 21, exact=True)


def test_sum_independent_poisson_parts():
    a = moments_to_cumulants(poisson_central_moments(1, 6), exact=True)
    b = moments_to_cumulants(poisson_central_moments(2, 6), exact=True)
    total = sum_independent_cumulants([a, b])
    assert total[1:] == [3] * 5
    assert sum_independent_cumulants([a]) == a


def test_sum_independent_shape_error():
    with pytest.raises(ShapeError):
        sum_independent_cumulants([[0, 1, 2], [0, 1]])
    with pytest.raises(ShapeError):
        sum_independent_cumulants([])


def test_additivity_against_convolution():
    # two independent discrete variables; convolution law computed directly
    x_vals, x_p = [0, 1, 4], [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)]
    y_vals, y_p = [-1, 2], [Fraction(2, 5), Fraction(3, 5)]
    conv: dict = {}
    for xv, xp in zip(x_vals, x_p):
        for yv, yp in zip(y_vals, y_p):
            conv[xv + yv] = conv.get(xv + yv, Fraction(0)) + xp * yp

    def raw(vals, ps, K=6):
        return [sum((p * Fraction(v) ** k for v, p in zip(vals, ps)), Fraction(0)) for k in range(1, K + 1)]

    cx = moments_to_cumulants(raw(x_vals, x_p), exact=True)
    cy = moments_to_cumulants(raw(y_vals, y_p), exact=True)
    cz = moments_to_cumulants(raw(list(conv), list(conv.values())), exact=True)
    assert sum_independent_cumulants([cx, cy]) == cz


def test_delta_standardized_poisson():
    cert = statulevicius_delta([0, 1, 0.5, 0.25, 0.125])
    assert cert.delta == pytest.approx(48.0)
    assert cert.K == 5 and cert.nu == 1


def test_delta_gaussian_is_infinite():
    assert math.isinf(statulevicius_delta([0, 1, 0, 0, 0]).delta)


def test_delta_third_order_candidate():
    assert statulevicius_delta([0, 1, 6]).delta == pytest.approx(6.0)


def test_delta_requires_standardized_input():
    with pytest.raises(ContractError):
        statulevicius_delta([0, 2, 1])
    with pytest.raises(ContractError):
        statulevicius_delta([0.1, 1, 1])
    with pytest.raises(RangeError):
        statulevicius_delta([0, 1])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=8))
def test_certificate_holds_for_its_input(tail):
    c = [0.0, 1.0] + tail
    cert = statulevicius_delta(c)
    assert cert.holds_for(c)
    if not math.isinf(cert.delta):
        assert not DeltaCertificate(cert.delta * 1.01, cert.nu, cert.K).holds_for(c)


@pytest.mark.parametrize("B, delta", [(0.5, 1.0), (1.0, 0.5), (2.0 ** -13, 2.0 ** 12)])
def test_bernstein_to_delta(B, delta):
    assert bernstein_to_delta(B).delta == delta


def test_bernstein_rejects_nonpositive():
    with pytest.raises(RangeError):
        bernstein_to_delta(0.0)


@pytest.mark.parametrize("delta, k, expected", [(64, 144, 1 / 3), (math.inf, 144, 1.0), (1, 3, 1 / 12)])
def test_tail_validity_range(delta, k, expected):
    assert tail_validity_range(delta, k) == pytest.approx(expected)


def test_bernstein_moment_bound_implies_cumulant_bound():
    # standardized Poisson(lam): find the smallest B with |alpha_k| <= (k!)^2 B^(k-2), k=3..12,
    # then the cumulants must obey the bound with delta = 1/(2B)
    lam = 3.0
    K = 12
    alpha = [0.0, 1.0] + [central_moment(k, lam) / lam ** (k / 2) for k in range(3, K + 1)]
    B = max((abs(alpha[k - 1]) / math.factorial(k) ** 2) ** (1 / (k - 2)) for k in range(3, K + 1))
    c = moments_to_cumulants(alpha)
    assert bernstein_to_delta(B).holds_for(c)


@pytest.mark.parametrize("lam", [Fraction(1, 2), 1, 5, 20])
def test_chi_square_cell_cumulant_bound(lam):
    c = chi_square_cell_cumulants(lam, 8)
    var = 1 / Fraction(lam) + 2
    assert c[0] == 1 and c[1] == var
    nabla = max(1, 1 / Fraction(lam))
    for k in range(3, 9):
        assert abs(c[k - 1]) <= math.factorial(k) ** 2 * (2 ** 8 * nabla) ** (k - 2) * var


def test_coefficient_recursion_termwise():
    # (v+1) c[l, v+1] = l c[l, v] + c[l-1, v-1] with c[0, .] = 0 and missing terms zero
    def c(l, v):
        if v < 2 or l < 1 or l > v // 2:
            return Fraction(0)
        return moment_coefficients(v).coefficient(l)

    for v in range(3, 30):
        for l in range(1, (v + 1) // 2 + 1):
            assert (v + 1) * c(l, v + 1) == l * c(l, v) + c(l - 1, v - 1)
