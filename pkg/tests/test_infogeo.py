import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reldecode.codebook import EncodingModel, figure_model
from reldecode.errors import InvalidParameter, OutOfDomain, SupportMismatch
from reldecode.infogeo import (
    cramer_rao_bound,
    cross_entropy,
    fisher_finite_difference,
    fisher_paper,
    kld,
    kld_closed_form,
    kld_exact,
    kld_reverse,
    kld_simplified,
    one_minus_inverse_gamma,
)
from reldecode.relativity import lorentz_gamma, receiver_distribution

LAMBDA_TWO = math.sqrt(3.0) / 2.0


def mp_kld(tau, beta, lam, reverse=False):
    """Receiver-to-sender divergence at 40 digits."""
    with mp.workdps(40):
        def dist(scale):
            w = [mp.e ** (-mp.mpf(beta) * scale * mp.mpf(t)) for t in tau]
            z = mp.fsum(w)
            return [x / z for x in w]
        a, b = dist(1), dist(mp.mpf(lam))
        if reverse:
            a, b = b, a
        return float(mp.fsum(x * mp.log(x / y) for x, y in zip(b, a)))


def test_kld_examples():
    assert kld((0.3, 0.7), (0.3, 0.7)) == 0.0
    assert kld((0.5, 0.5), (0.75, 0.25)) == pytest.approx(0.14384103622589044, rel=1e-14)
    assert kld((0.88080, 0.11920), (0.73106, 0.26894)) == pytest.approx(0.06713, abs=5e-5)


def test_kld_support_rules():
    assert kld((0.0, 1.0), (0.5, 0.5)) == pytest.approx(math.log(2.0), rel=1e-15)
    with pytest.raises(SupportMismatch):
        kld((0.5, 0.5), (1.0, 0.0))
    with pytest.raises(InvalidParameter):
        kld((0.5, 0.5), (1.0,))
    with pytest.raises(InvalidParameter):
        kld((-0.1, 1.1), (0.5, 0.5))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=8).filter(lambda x: sum(x) > 0),
       st.lists(st.floats(1e-6, 1.0), min_size=8, max_size=8))
def test_gibbs_inequality(pw, qw):
    p = np.array(pw) / sum(pw)
    q = np.array(qw[:len(pw)]) / sum(qw[:len(pw)])
    assert kld(p, q) >= 0.0
    assert kld(p, p) == 0.0


def test_cross_entropy():
    p = np.array([0.2, 0.3, 0.5])
    assert cross_entropy(p, p) == pytest.approx(-np.dot(p, np.log(p)), rel=1e-15)
    assert cross_entropy((1.0, 0.0), (0.5, 0.5)) == pytest.approx(math.log(2.0), rel=1e-15)


def test_cross_entropy_decomposition(two_level):
    p_a = two_level.probabilities
    p_b = receiver_distribution(two_level.codebook, 1.0, 2.0)
    h = cross_entropy(p_a, p_b)
    assert h == pytest.approx(0.66481085378296274, rel=1e-13)
    assert h == pytest.approx(two_level.entropy + kld_reverse(two_level, LAMBDA_TWO), rel=1e-14)


def test_closed_form_examples(two_level, close_pair):
    assert kld_closed_form(two_level, 0.3, 0.3).value == 0.0
    got = kld_closed_form(two_level, LAMBDA_TWO)
    assert got.value == pytest.approx(0.067130754453132782, rel=1e-13)
    assert kld_closed_form(close_pair, 0.6).value == pytest.approx(
        kld_exact(close_pair, 0.6), rel=1e-12)
    assert kld_closed_form(close_pair, 0.6).value == pytest.approx(
        mp_kld((1.0, 1.2), 1.0, 1.25), rel=1e-13)


def test_closed_form_breakdown(two_level):
    got = kld_closed_form(two_level, LAMBDA_TWO)
    assert got.mean_tau_receiver == pytest.approx(1.1192029220221176, rel=1e-14)
    # D = beta (1 - lam) <tau>_b + ln(Z_a / Z_b)
    assert got.value == pytest.approx(-got.mean_tau_receiver + got.log_partition_ratio,
                                      abs=1e-14)


def test_closed_form_near_light_speed(close_pair):
    v = 0.9999
    assert kld_closed_form(close_pair, v).value == pytest.approx(
        mp_kld((1.0, 1.2), 1.0, lorentz_gamma(v)), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(tau=st.lists(st.floats(0.05, 10.0), min_size=2, max_size=10),
       beta=st.floats(0.1, 3.0), v=st.floats(0.0, 0.97), v0=st.floats(0.0, 0.97))
def test_closed_form_against_oracle(tau, beta, v, v0):
    m = EncodingModel(tuple(tau), beta)
    lam = lorentz_gamma(v) / lorentz_gamma(v0) if v != v0 else 1.0
    want = mp_kld(tau, beta, lam)
    assert kld_closed_form(m, v, v0).value == pytest.approx(want, rel=1e-11, abs=1e-300)


def test_reverse_direction(two_level):
    assert kld_reverse(two_level, LAMBDA_TWO) == pytest.approx(0.082607744894744783, rel=1e-13)
    assert kld_reverse(two_level, LAMBDA_TWO) != pytest.approx(kld_exact(two_level, LAMBDA_TWO))
    flat = EncodingModel((1.0, 2.0, 5.0), 0.0)
    assert kld_exact(flat, 0.9) == 0.0
    assert kld_reverse(flat, 0.9) == 0.0


def test_simplified_examples():
    assert kld_simplified(3.0, 0.0) == 0.0
    s5 = figure_model(5, 1.0).entropy
    assert kld_simplified(s5, 0.6) == pytest.approx(0.2 * s5, rel=1e-15)
    assert kld_simplified(1.0, 0.999) == pytest.approx(0.95528982218778369, rel=1e-13)
    with pytest.raises(InvalidParameter):
        kld_simplified(-1.0, 0.5)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(0.0, 0.999999), b=st.floats(0.0, 0.999999), s=st.floats(0.01, 10.0))
def test_simplified_monotone_and_bounded(a, b, s):
    lo, hi = sorted((a, b))
    assert 0.0 <= kld_simplified(s, lo) <= kld_simplified(s, hi) < s


@settings(max_examples=60, deadline=None)
@given(v=st.floats(1e-6, 0.999))
def test_one_minus_inverse_gamma(v):
    with mp.workdps(80):
        want = float(1 - mp.sqrt(1 - mp.mpf(v) ** 2))
    assert one_minus_inverse_gamma(v) == pytest.approx(want, rel=1e-14, abs=1e-300)


@pytest.mark.parametrize("v", [1e-300, 1e-100, 1e-20])
def test_one_minus_inverse_gamma_small_speed(v):
    assert one_minus_inverse_gamma(v) == pytest.approx(0.5 * v * v, rel=1e-15, abs=0.0)


def test_fisher_paper_examples():
    assert fisher_paper(1.0, 0.0) == 1.0
    assert fisher_paper(1.0, 0.6) == pytest.approx(5.2490234375, rel=1e-14)
    assert fisher_paper(2.0, 0.6) == pytest.approx(10.498046875, rel=1e-14)
    with pytest.raises(InvalidParameter):
        fisher_paper(0.0, 0.3)


@settings(max_examples=60, deadline=None)
@given(a=st.floats(0.0, 0.999), b=st.floats(0.0, 0.999))
def test_fisher_paper_monotone(a, b):
    lo, hi = sorted((a, b))
    assert 0 < fisher_paper(1.0, lo) <= fisher_paper(1.0, hi)


def test_finite_difference_examples():
    assert fisher_finite_difference(lambda v: 3.0, 0.4) == 0.0
    assert fisher_finite_difference(lambda v: v * v, 0.3) == pytest.approx(2.0, abs=1e-6)
    at_rest = fisher_finite_difference(lambda v: kld_simplified(1.0, v), 0.0, 1e-4)
    assert at_rest == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(OutOfDomain):
        fisher_finite_difference(lambda v: v, 0.99995, 1e-4)


def test_finite_difference_tracks_simplified_curvature():
    # second derivative of (1 - 1/gamma) S is S gamma^3 / c^2
    v, s = 0.5, 2.0
    fd = fisher_finite_difference(lambda u: kld_simplified(s, u), v, 1e-4)
    assert fd == pytest.approx(s * lorentz_gamma(v) ** 3, rel=1e-6)


def test_cramer_rao_bound():
    assert cramer_rao_bound(4.0) == 0.25
    assert cramer_rao_bound(1.0) == 1.0
    assert cramer_rao_bound(fisher_paper(1.0, 0.6)) == pytest.approx(0.190512, rel=1e-5)
    with pytest.raises(InvalidParameter):
        cramer_rao_bound(0.0)
