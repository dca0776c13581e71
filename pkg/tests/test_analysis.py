import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from bscoloring.analysis import (
    FixedGeometry,
    ergodic_se_exact,
    ergodic_se_lower,
    ergodic_se_ppp_lower,
    laplace_interference,
    rate_coverage_approx,
    rate_coverage_exact,
)
from bscoloring.jet import Jet
from bscoloring.special import digamma


# ---------------------------------------------------------------- jets


def test_jet_power_matches_falling_factorial():
    s0, r, K, M = 0.7, 0.3, 3, 6
    j = Jet([1 + s0 * r, r] + [0] * (M - 1)) ** (-K)
    for m in range(M + 1):
        # d^m/ds^m (1 + r s)^-K = (-K)(-K-1)...(-K-m+1) r^m (1 + r s)^(-K-m)
        ff = np.prod([-K - i for i in range(m)])
        assert j.derivative(m) == pytest.approx(ff * r**m * (1 + r * s0) ** (-K - m), rel=1e-12)


def test_jet_exp_product_reciprocal():
    x = Jet.variable(0.4, 5)
    e = (2.5 * x).exp()
    for m in range(6):
        assert e.derivative(m) == pytest.approx(2.5**m * math.exp(1.0), rel=1e-12)
    f = x * x * x
    assert f.derivatives()[:4] == pytest.approx([0.064, 3 * 0.16, 6 * 0.4, 6])
    rec = (1.0 + x).reciprocal()
    for m in range(6):
        assert rec.derivative(m) == pytest.approx((-1) ** m * math.factorial(m) / 1.4 ** (m + 1))
    assert ((1.0 + x) / (1.0 + x)).derivatives() == pytest.approx([1, 0, 0, 0, 0, 0], abs=1e-14)


def test_jet_real_power_and_errors():
    x = Jet.variable(2.0, 3)
    h = x**0.5
    assert h.derivative(1) == pytest.approx(0.5 / math.sqrt(2.0))
    assert h.derivative(2) == pytest.approx(-0.25 * 2.0**-1.5)
    assert h.derivative(3) == pytest.approx(0.375 * 2.0**-2.5)
    with pytest.raises(ValueError):
        Jet.variable(0.0, 2) + Jet.variable(0.0, 3)


# ------------------------------------------------------------- digamma


@given(st.floats(1e-3, 1e4))
def test_digamma_matches_scipy(x):
    assert digamma(x) == pytest.approx(special.digamma(x), rel=1e-13, abs=1e-13)


def test_digamma_values():
    assert digamma(1) == pytest.approx(-0.5772156649015329, rel=1e-15)
    for n in range(1, 30):
        assert digamma(n + 1) == pytest.approx(digamma(n) + 1 / n, rel=1e-14)
    with pytest.raises(ValueError):
        digamma(0.0)


# ------------------------------------------------------------ coverage


def single_interferer_coverage(M, K, w, s):
    """P[Gamma(M+1) > s w Gamma(K)] by the negative-binomial series."""
    return sum(math.comb(K + m - 1, m) * (s * w) ** m / (1 + s * w) ** (K + m) for m in range(M + 1))


def two_interferer_coverage(M, K, w1, w2, s):
    """Direct double integral over the two interferer gains."""

    def f(g2, g1):
        dens = g1 ** (K - 1) * g2 ** (K - 1) * math.exp(-g1 - g2) / math.gamma(K) ** 2
        return dens * special.gammaincc(M + 1, s * (w1 * g1 + w2 * g2))

    val, _ = integrate.dblquad(f, 0, 60, 0, 60, epsabs=1e-11)
    return val


def test_coverage_examples():
    g = FixedGeometry(1.0, [2.0])
    assert rate_coverage_exact(g, 2, 1, 4, 1) == pytest.approx(16 / 17, abs=1e-6)
    assert rate_coverage_exact(g, 3, 1, 4, 1) == pytest.approx(16 / 17 + 16 / 289, abs=1e-6)
    assert rate_coverage_exact(g, 3, 1, 4, 1) == pytest.approx(0.996540, abs=1e-6)
    assert rate_coverage_exact(g, 3, 1, 4, 0) == 1.0
    assert rate_coverage_exact(FixedGeometry(50.0, []), 4, 2, 4, 3) == 1.0


@pytest.mark.parametrize("M,K,w,s", [(0, 1, 0.3, 1.0), (3, 2, 0.05, 7.0), (8, 1, 0.8, 30.0), (0, 5, 0.01, 100.0)])
def test_coverage_single_interferer_series(M, K, w, s):
    N = M + 2 * K
    g = FixedGeometry(1.0, [w ** (-1 / 4)])
    gamma = math.log2(1 + s)
    assert rate_coverage_exact(g, N, K, 4, gamma) == pytest.approx(single_interferer_coverage(M, K, w, s), rel=1e-10)
    # the approximation is exact when there is only one interferer
    assert rate_coverage_approx(g, N, K, 4, gamma) == pytest.approx(single_interferer_coverage(M, K, w, s), rel=1e-10)


@pytest.mark.parametrize("M,K", [(1, 1), (2, 2), (0, 3)])
def test_coverage_two_interferers_integral(M, K):
    r = np.array([1.3, 2.1])
    g = FixedGeometry(10.0, r)
    w1, w2 = r ** (-4.0)
    s = 3.0
    ref = two_interferer_coverage(M, K, w1, w2, s)
    assert rate_coverage_exact(g, M + 2 * K, K, 4, math.log2(1 + s)) == pytest.approx(ref, abs=1e-8)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.floats(1.05, 8.0), min_size=0, max_size=8),
    st.integers(1, 4),
    st.integers(0, 6),
    st.floats(2.1, 6.0),
)
def test_coverage_is_decreasing_probability(ratios, K, M, beta):
    g = FixedGeometry(1.0, ratios)
    vals = [rate_coverage_exact(g, M + 2 * K, K, beta, t) for t in np.linspace(0, 10, 21)]
    assert all(0 <= v <= 1 for v in vals)
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    approx = [rate_coverage_approx(g, M + 2 * K, K, beta, t) for t in np.linspace(0, 10, 21)]
    assert all(0 <= v <= 1 for v in approx)


def test_laplace_transform():
    g = FixedGeometry(1.0, [2.0, 3.0])
    s = 2.0
    expect = (1 + s / 16) ** -2 * (1 + s / 81) ** -2
    assert laplace_interference(s, g, 2, 4) == pytest.approx(expect)
    j = laplace_interference(s, g, 2, 4, order=2)
    h = 1e-4
    fd = (laplace_interference(s + h, g, 2, 4) - laplace_interference(s - h, g, 2, 4)) / (2 * h)
    assert j.derivative(1) == pytest.approx(fd, rel=1e-6)


def test_geometry_validation():
    with pytest.raises(ValueError):
        FixedGeometry(0.0, [2.0])
    with pytest.raises(ValueError):
        FixedGeometry(1.0, [2.0, -1.0])
    with pytest.raises(ValueError):
        rate_coverage_exact(FixedGeometry(1.0, [2.0]), 3, 2, 4, 1)
    g = FixedGeometry.from_distances(100.0, [200.0, 300.0])
    assert list(g.ratios) == [2.0, 3.0]


# ------------------------------------------------------------- ergodic


def test_ergodic_noise_only_closed_form():
    # Gamma(1) desired gain, no interference: E[ln(1 + g / a)] = e^a E1(a)
    g = FixedGeometry(1.0, [])
    assert ergodic_se_exact(g, 2, 1, 4, L=1, snr=1.0) == pytest.approx(math.e * special.exp1(1.0) / math.log(2), abs=1e-9)
    assert ergodic_se_exact(g, 2, 1, 4, L=1, snr=1.0) == pytest.approx(0.8604, abs=1e-4)
    a = 0.2
    assert ergodic_se_exact(g, 4, 2, 4, L=3, snr=1 / (a / 2)) == pytest.approx(
        math.exp(a) * special.exp1(a) / math.log(2) / 3, abs=1e-9
    )


def test_ergodic_matches_direct_expectation():
    # Gamma(2) desired gain against one Gamma(1) interferer plus noise
    r, noise = 1.7, 0.05
    w = r**-4

    def integrand(g1, g0):
        return math.log2(1 + g0 / (w * g1 + noise)) * g0 * math.exp(-g0) * math.exp(-g1)

    ref, _ = integrate.dblquad(integrand, 0, 80, 0, 80, epsabs=1e-10)
    g = FixedGeometry(1.0, [r])
    assert ergodic_se_exact(g, 3, 1, 4, L=1, snr=1 / noise) == pytest.approx(ref, abs=1e-7)


def test_ergodic_interference_limited_single_interferer():
    g = FixedGeometry(1.0, [1.5])
    v = ergodic_se_exact(g, 2, 1, 4, L=2, snr=math.inf)
    a = 1.5**4
    # X, Y unit exponentials: P[X / Y > t] = 1 / (1 + t), so E ln(1 + a X / Y) = a ln(a) / (a - 1)
    assert v == pytest.approx(a * math.log(a) / (a - 1) / math.log(2) / 2, rel=1e-8)
    with pytest.raises(ValueError):
        ergodic_se_exact(FixedGeometry(1.0, []), 2, 1, 4, snr=math.inf)


def test_lower_bound_examples():
    assert ergodic_se_lower(FixedGeometry(1.0, []), 3, 1, 4, L=1, snr=1.0) == pytest.approx(1.3370, abs=1e-4)
    assert ergodic_se_lower(FixedGeometry(1.0, [1.0]), 3, 1, 4) == pytest.approx(math.log2(1 + math.exp(1 - np.euler_gamma)))
    assert ergodic_se_lower(FixedGeometry(1.0, []), 3, 1, 4) == math.inf


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(1.05, 6.0), min_size=0, max_size=6),
    st.integers(1, 3),
    st.integers(0, 5),
    st.floats(2.5, 5.0),
    st.floats(-10.0, 60.0),
    st.integers(1, 6),
)
def test_lower_bound_below_exact(ratios, K, M, beta, snr_db, L):
    g = FixedGeometry(3.0, ratios)
    N = M + 2 * K
    snr = 10 ** (snr_db / 10)
    assert ergodic_se_lower(g, N, K, beta, L, snr) <= ergodic_se_exact(g, N, K, beta, L, snr) + 1e-9


def test_ppp_bound_values():
    assert ergodic_se_ppp_lower(3, 1, 4, 4) == pytest.approx(0.4295, abs=1e-4)
    assert ergodic_se_ppp_lower(3, 1, 2, 4) == 0.0
    with pytest.raises(ValueError):
        ergodic_se_ppp_lower(3, 1, 1.9, 4)
    # more antennas per user never hurt
    assert ergodic_se_ppp_lower(6, 1, 4, 4) > ergodic_se_ppp_lower(3, 1, 4, 4)


@pytest.mark.parametrize("n", [1e-3, 1.0, 50.0, 500.0])
def test_se_exact_noise_only_closed_form(n):
    # Exp(1) desired gain, no interferers: E[ln(1 + X/n)] = e^n E1(n)
    geom = FixedGeometry(1.0, [])
    got = ergodic_se_exact(geom, 2, 1, 4.0, 1, snr=1.0 / n)
    want = math.exp(n) * special.exp1(n) / math.log(2)
    assert got == pytest.approx(want, rel=1e-7)
