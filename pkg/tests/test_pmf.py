import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinapprox.errors import InvalidLawError
from steinapprox.pmf import (
    EPS_NORM,
    Bernoulli,
    Binomial,
    CustomPMF,
    Geometric,
    NegBinomial,
    Poisson,
    TruncatedPMF,
    TwoRunsV,
    convolve,
    convolve_n,
    materialize,
    point_mass,
    tv_distance,
    tv_shift,
    two_runs_binomial_sum,
    two_runs_recurrence,
)


def _long_division(num, den, n_terms):
    """Power-series quotient num/den by schoolbook long division."""
    out = []
    rem = list(num) + [0] * (n_terms + len(den))
    for j in range(n_terms):
        c = rem[j] / den[0]
        out.append(c)
        for k, d in enumerate(den):
            rem[j + k] -= c * d
    return out


# --- materialize -----------------------------------------------------------


def test_poisson_entries():
    pmf = materialize(Poisson(1.0), 1e-12)
    assert pmf.probs[0] == pytest.approx(math.exp(-1), abs=1e-15)
    assert pmf.probs[1] == pytest.approx(math.exp(-1), abs=1e-15)
    assert pmf.tail_bound <= 1e-12


def test_geometric_entries():
    pmf = materialize(Geometric(0.5))
    k = np.arange(len(pmf))
    np.testing.assert_allclose(pmf.probs, 0.5 ** (k + 1), rtol=0, atol=1e-16)
    assert pmf.tail_bound <= 1e-12


def test_two_runs_first_entries():
    pmf = materialize(TwoRunsV(0.5))
    np.testing.assert_allclose(pmf.probs[:3], [0.25, 0.25, 0.1875], atol=1e-15)


def test_two_runs_matches_long_division():
    p = Fraction(1, 2)
    expected = _long_division([p * p], [1, -1, p * p], 40)
    pmf = materialize(TwoRunsV(0.5))
    np.testing.assert_allclose(pmf.probs[:40], [float(x) for x in expected], atol=1e-15)
    assert two_runs_binomial_sum(p, 40) == expected


def test_two_runs_rejects_signed_coefficients():
    with pytest.raises(InvalidLawError, match="index 4"):
        materialize(TwoRunsV(0.7))


@pytest.mark.parametrize(
    "family",
    [Poisson(0.3), Poisson(25.0), Geometric(0.1), Bernoulli(0.4), Binomial(7, 0.3),
     NegBinomial(0.5, 0.4), NegBinomial(5, 0.9), TwoRunsV(0.2), TwoRunsV(0.5)],
)
@pytest.mark.parametrize("tol", [1e-6, 1e-12])
def test_normalization_and_tail(family, tol):
    pmf = materialize(family, tol)
    assert pmf.tail_bound <= tol
    assert abs(math.fsum(pmf.probs) + pmf.tail_bound - 1.0) <= EPS_NORM
    assert np.all(pmf.probs >= 0)


def test_tail_bound_is_real_tail():
    # the stored tail must dominate the mass actually missing
    for fam in (Poisson(4.0), NegBinomial(2.0, 0.6), TwoRunsV(0.4)):
        short = materialize(fam, 1e-6)
        long = materialize(fam, 1e-15)
        missing = math.fsum(long.probs[len(short):]) + long.tail_bound
        assert missing <= short.tail_bound * (1 + 1e-9) + 1e-15


def test_custom_pmf():
    pmf = materialize(CustomPMF((0.2, 0.5, 0.3)))
    np.testing.assert_array_equal(pmf.probs, [0.2, 0.5, 0.3])
    with pytest.raises(ValueError):
        CustomPMF((0.0, 1.0))
    with pytest.raises(ValueError):
        materialize(CustomPMF((0.2, 0.5)))


def test_invalid_parameters():
    for bad in (lambda: Poisson(0.0), lambda: Geometric(1.0), lambda: Binomial(0, 0.1),
                lambda: NegBinomial(-1, 0.5), lambda: TwoRunsV(0.0)):
        with pytest.raises(ValueError):
            bad()
    with pytest.raises(ValueError):
        materialize(Poisson(1.0), 0.0)


def test_pmf_is_immutable():
    pmf = materialize(Poisson(1.0))
    with pytest.raises(ValueError):
        pmf.probs[0] = 0.5


def test_truncated_pmf_validates_mass():
    with pytest.raises(ValueError):
        TruncatedPMF([0.5, 0.4])
    with pytest.raises(ValueError):
        TruncatedPMF([1.2, -0.2])


# --- convolution -------------------------------------------------------------


def test_poisson_additivity():
    a = convolve(materialize(Poisson(1.0)), materialize(Poisson(2.0)))
    b = materialize(Poisson(3.0))
    n = min(len(a), len(b))
    np.testing.assert_allclose(a.probs[:n], b.probs[:n], atol=1e-12)


def test_bernoulli_pair():
    out = convolve(materialize(Bernoulli(0.5)), materialize(Bernoulli(0.5)))
    np.testing.assert_allclose(out.probs, [0.25, 0.5, 0.25], atol=1e-16)


def test_geometric_pair_closed_form():
    out = convolve(materialize(Geometric(0.5)), materialize(Geometric(0.5)))
    j = np.arange(len(out))
    # direct summation: sum_k 0.5^(k+1) 0.5^(j-k+1) = (j+1) 0.25 0.5^j
    brute = np.array([sum(0.5 ** (k + 1) * 0.5 ** (jj - k + 1) for k in range(jj + 1)) for jj in j])
    expected = (j + 1) * 0.25 * 0.5**j
    np.testing.assert_allclose(brute, expected, atol=1e-16)
    m = 40  # away from the truncation edge
    np.testing.assert_allclose(out.probs[:m], expected[:m], atol=1e-15)
    assert out.tail_bound == pytest.approx(2 * materialize(Geometric(0.5)).tail_bound)


def test_convolve_n_cases():
    two = convolve_n([Poisson(1.0), Poisson(1.0)])
    ref = materialize(Poisson(2.0))
    n = min(len(two), len(ref))
    np.testing.assert_allclose(two.probs[:n], ref.probs[:n], atol=1e-12)

    binom = convolve_n([Bernoulli(0.1)] * 10)
    k = np.arange(11)
    expected = [math.comb(10, int(i)) * 0.1**i * 0.9 ** (10 - i) for i in k]
    np.testing.assert_allclose(binom.probs, expected, atol=1e-15)

    z = convolve_n([Poisson(1.0), Geometric(0.5)])
    brute = [sum(math.exp(-1) / math.factorial(k) * 0.5 ** (j - k + 1) for k in range(j + 1)) for j in range(20)]
    np.testing.assert_allclose(z.probs[:20], brute, atol=1e-15)

    with pytest.raises(ValueError):
        convolve_n([])


@pytest.mark.parametrize("p", [0.3, 0.5, 0.8])
@pytest.mark.parametrize("k", [2, 3, 6])
def test_geometric_sum_is_negative_binomial(p, k):
    a = convolve_n([Geometric(p)] * k)
    b = materialize(NegBinomial(k, p))
    n = min(len(a), len(b))
    np.testing.assert_allclose(a.probs[:n], b.probs[:n], atol=1e-10)


small_pmfs = st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6).map(
    lambda w: TruncatedPMF(np.asarray(w) / math.fsum(w))
)


@settings(max_examples=60, deadline=None)
@given(small_pmfs, small_pmfs, small_pmfs)
def test_convolution_commutative_associative(a, b, c):
    np.testing.assert_allclose(convolve(a, b).probs, convolve(b, a).probs, atol=1e-12)
    np.testing.assert_allclose(
        convolve(convolve(a, b), c).probs, convolve(a, convolve(b, c)).probs, atol=1e-12
    )


# --- total variation -----------------------------------------------------------


def test_tv_basic():
    a = materialize(Poisson(2.0))
    assert tv_distance(a, a).value == 0.0
    assert tv_distance(point_mass(0), point_mass(1)).value == 1.0


def test_tv_bernoulli_poisson():
    lam = 0.1
    e = math.exp(-lam)
    rest = sum(e * lam**k / math.factorial(k) for k in range(2, 40))
    oracle = 0.5 * (abs(e - 0.9) + abs(lam * e - 0.1) + rest)
    got = tv_distance(materialize(Bernoulli(0.1)), materialize(Poisson(0.1)))
    assert got.value == pytest.approx(oracle, abs=1e-12 + got.uncertainty)
    assert got.uncertainty <= 1e-12


@settings(max_examples=60, deadline=None)
@given(small_pmfs, small_pmfs, small_pmfs)
def test_tv_metric(a, b, c):
    ab, ba = tv_distance(a, b), tv_distance(b, a)
    assert ab.value == ba.value
    ac, bc = tv_distance(a, c), tv_distance(b, c)
    assert ac.value <= ab.value + bc.value + ab.uncertainty + bc.uncertainty + 1e-15


def test_tv_shift_examples():
    assert tv_shift(point_mass(0)) == 1.0
    assert tv_shift(materialize(Poisson(1.0))) == pytest.approx(math.exp(-1), abs=1e-12)
    for p in (0.2, 0.5, 0.9):
        assert tv_shift(materialize(Geometric(p))) == pytest.approx(p, abs=1e-12)


def test_tv_shift_matches_tv_distance():
    a = materialize(NegBinomial(3.0, 0.6))
    shifted = TruncatedPMF(np.concatenate(([0.0], a.probs)), a.tail_bound)
    assert tv_shift(a) == pytest.approx(tv_distance(a, shifted).value, abs=1e-15)


# --- 2-runs coefficients -----------------------------------------------------


@pytest.mark.parametrize("p", [Fraction(1, 10), Fraction(3, 10), Fraction(1, 2), Fraction(7, 10)])
def test_two_runs_recurrence_equals_binomial_sum_exactly(p):
    assert two_runs_recurrence(p, 61) == two_runs_binomial_sum(p, 61)


def test_two_runs_float_recurrence_matches_exact():
    p = 0.3
    exact = [float(x) for x in two_runs_recurrence(Fraction(3, 10), 60)]
    np.testing.assert_allclose(materialize(TwoRunsV(p)).probs[:60], exact, rtol=1e-12, atol=0)
