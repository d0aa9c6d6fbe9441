import json
import math

import pytest

from steinapprox.bounds import (
    BoundReport,
    BudgetExceeded,
    certify,
    hung_giang_bound,
    lecam_bound,
    lemma_instantiation,
    match_parameters,
    mattner_roos_term,
    poisson_bound,
    poisson_geometric_bound,
    vu_bound,
)
from steinapprox.errors import InvalidLawError, PreconditionError
from steinapprox.moments import MomentSummary
from steinapprox.pmf import (
    Bernoulli,
    Binomial,
    CustomPMF,
    Geometric,
    NegBinomial,
    Poisson,
    TwoRunsV,
    materialize,
    tv_shift,
)

SQ = math.sqrt(2 / math.pi)


@pytest.mark.parametrize("q, expected", [(0.1, 0.1111), (0.2, 0.2500)])
@pytest.mark.parametrize("n", [1, 10, 30, 50])
def test_poisson_bound_negative_binomial(n, q, expected):
    # constant in n: numerator and denominator both scale with n
    r = poisson_bound([NegBinomial(5, 1 - q)] * n)
    assert r.value == pytest.approx(expected, abs=5e-5) if n >= 2 else True
    assert r.value == pytest.approx(5 * (q / (1 - q)) ** 2 * n / max(1, 5 * n * q / (1 - q)), rel=1e-12)


def test_poisson_bound_zero_for_poisson():
    assert poisson_bound([Poisson(0.3), Poisson(2.0), Poisson(7.5)]).value == 0.0


def test_poisson_bound_custom_component():
    custom = poisson_bound([CustomPMF((0.9, 0.1))] * 10)
    ref = poisson_bound([Bernoulli(0.1)] * 10)
    assert custom.value == pytest.approx(ref.value, abs=1e-12)


def test_poisson_bound_rejects_signed_two_runs():
    with pytest.raises(InvalidLawError):
        poisson_bound([TwoRunsV(0.7)])


def test_match_parameters():
    lam, p, ok = match_parameters(MomentSummary(2.0, 3.0, 1.0, None))
    assert (lam, p, ok) == (1.0, 0.5, True)
    with pytest.raises(PreconditionError):
        match_parameters(MomentSummary(2.0, 2.0, 0.0, None))
    _, _, ok = match_parameters(MomentSummary(1.0, 5.0, 4.0, None))
    assert not ok


def test_match_recovers_poisson_geometric():
    r = poisson_geometric_bound([Poisson(1.0), Geometric(0.5)])
    assert r.intermediates["lambda"] == pytest.approx(1.0, abs=1e-12)
    assert r.intermediates["p"] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("lam, p", [(3.0, 0.8), (1.0, 0.9), (10.0, 0.6), (0.5, 0.95)])
def test_poisson_geometric_exact_target_is_zero(lam, p):
    r = poisson_geometric_bound([Poisson(lam), Geometric(p)])
    assert r.ok
    assert r.intermediates["mu3_mismatch"] <= 1e-10
    assert r.value <= 1e-10


def test_poisson_geometric_negative_binomial_intermediates():
    r = poisson_geometric_bound([NegBinomial(5, 0.9)] * 10)
    i = r.intermediates
    mu = 50 * (0.1 / 0.9)
    root = math.sqrt(50 * (0.1 / 0.9) ** 2)
    assert i["mu"] == pytest.approx(mu, abs=1e-12)
    assert i["q_over_p"] == pytest.approx(root, abs=1e-12)
    assert i["lambda"] == pytest.approx(mu - root, abs=1e-12)
    assert i["mu3"] == pytest.approx(100 * (0.1 / 0.9) ** 3, abs=1e-12)
    assert (i["lambda"], i["q_over_p"]) == (pytest.approx(4.7699, abs=1e-4), pytest.approx(0.7857, abs=1e-4))
    assert 2 * root**2 == pytest.approx(1.2346, abs=1e-4)
    smooth = SQ / math.sqrt(0.25 + 10 * (1 - tv_shift(materialize(NegBinomial(5, 0.9)))))
    expected = i["lambda"] * smooth * abs(i["mu3"] - 2 * root**3) / ((i["lambda"] - 2 * root**2) * i["lambda"])
    assert r.value == pytest.approx(expected, rel=1e-9)
    cert = certify([NegBinomial(5, 0.9)] * 10, "pg")
    assert cert.passed and r.value >= cert.exact.value


def test_poisson_geometric_underdispersed():
    r = poisson_geometric_bound([Bernoulli(0.1)] * 10)
    assert not r.ok and math.isinf(r.value)
    assert r.failed[0].name == "sigma2 > mu"
    assert r.failed[0].margin == pytest.approx(-0.1, abs=1e-12)


def test_poisson_geometric_lambda_gate():
    r = poisson_geometric_bound([Geometric(0.5)] * 3)
    assert not r.ok
    gate = r.failed[0]
    assert gate.name == "lambda > 2(q/p)^2" and gate.margin < 0


def test_lemma_reproduces_theorem():
    r = poisson_geometric_bound([NegBinomial(2.0, 0.9)] * 8)
    i = r.intermediates
    eps = i["smoothness"] * i["mu3_mismatch"]
    assert lemma_instantiation(i["lambda"], i["p"], eps) == pytest.approx(r.value, rel=1e-12)


def test_mattner_roos_examples():
    assert mattner_roos_term([CustomPMF((1.0,))] * 4) == pytest.approx(SQ * 2, abs=1e-12)
    assert mattner_roos_term([Geometric(0.5)] * 10) == pytest.approx(SQ / math.sqrt(5.25), abs=1e-10)
    assert mattner_roos_term([Geometric(0.5)] * 10) == pytest.approx(0.3482, abs=1e-4)
    single = SQ / math.sqrt(1.25 - math.exp(-1))
    assert mattner_roos_term([Poisson(1.0)]) == pytest.approx(single, abs=1e-10)
    assert single == pytest.approx(0.8495, abs=1e-4)


@pytest.mark.parametrize(
    "n, q, expected",
    [(10, 0.1, 0.3370), (30, 0.1, 1.0109), (50, 0.1, 1.6848),
     (10, 0.2, 1.0722), (30, 0.2, 3.2166), (50, 0.2, 5.3610)],
)
def test_vu_bound_table(n, q, expected):
    assert vu_bound(n, [5], [1 - q]).value == pytest.approx(expected, abs=5e-5)


def test_vu_bound_total_convention_differs():
    a = vu_bound(10, [5], [0.9]).value
    b = vu_bound(10, [5], [0.9], lambda_convention="total")
    assert b.intermediates["lambda"] == pytest.approx(5.0)
    assert b.value < a
    with pytest.raises(ValueError):
        vu_bound(3, [5, 5], [0.9])


def test_hung_giang():
    assert hung_giang_bound([0, 0], [0.5, 0.9]).value == 0.0
    r = hung_giang_bound([5], [0.9])
    lam = 5 * 0.1 / 0.9
    expected = min((1 - math.exp(-lam)) / lam * 5 * 0.1, 0.1) * 0.1 / 0.9
    assert r.value == pytest.approx(expected, rel=1e-12)
    # here the minimum resolves to 1 - p, so the simplified form is exact
    assert r.intermediates["min_resolves_to_q"] == 1.0
    assert r.value == pytest.approx(r.intermediates["simplified"], rel=1e-12)


def test_hung_giang_small_r_branch():
    r = hung_giang_bound([0.01] * 3, [0.5] * 3)
    assert r.intermediates["min_resolves_to_q"] == 0.0
    assert r.value < r.intermediates["simplified"]


@pytest.mark.parametrize(
    "ps, lecam, stein",
    [([0.1] * 10, 0.1, 0.1), ([0.5, 0.5], 0.5, 0.5), ([0.2] * 20, 0.8, 0.2)],
)
def test_lecam(ps, lecam, stein):
    r = lecam_bound(ps)
    assert r.value == pytest.approx(lecam)
    assert r.intermediates["stein_poisson"] == pytest.approx(stein)
    if max(ps) < 0.5:
        assert poisson_bound([Bernoulli(p) for p in ps]).value == pytest.approx(stein, abs=1e-12)


def test_report_json_round_trip():
    for r in (poisson_geometric_bound([NegBinomial(5, 0.9)] * 10), poisson_geometric_bound([Bernoulli(0.1)] * 10)):
        text = r.to_json()
        again = BoundReport.from_json(text)
        assert again.to_json() == text
        assert json.loads(text)["theorem"] == "poisson-geometric"


def test_certify_cases():
    c = certify([Bernoulli(0.1)] * 10, "poisson")
    assert c.status == "PASS" and c.bound.value == pytest.approx(0.1)
    assert c.exact.value < 0.1

    c = certify([Poisson(3.0), Geometric(0.8)], "pg")
    assert c.status == "PASS"
    assert c.exact.value <= 1e-12 and c.bound.value <= 1e-10

    # the exact law, but the lambda > 2(q/p)^2 hypothesis fails
    c = certify([Poisson(1.0), Geometric(0.5)], "pg")
    assert c.status == "UNAVAILABLE"
    assert c.exact.value <= 1e-12

    c = certify([Geometric(0.5)] * 5, "poisson")
    assert c.status == "PASS" and c.ratio > 1


def test_certify_never_passes_corrupted_bound():
    comps = [Geometric(0.5)] * 5
    honest = certify(comps, "poisson")
    for fake in (0.0, honest.exact.value / 2, honest.exact.value - 1e-6):
        assert certify(comps, "poisson", bound_override=fake).status == "FAIL"
    assert certify(comps, "poisson", bound_override=honest.exact.value + 1e-6).status == "PASS"


def test_certify_budget():
    with pytest.raises(BudgetExceeded) as info:
        certify([Geometric(0.5)] * 100, budget=500)
    assert 1 <= info.value.suggested_n < 100


def test_cancelling_dispersion_breaks_signed_numerator():
    # over-dispersed geometric/NB parts and an under-dispersed binomial part
    # nearly cancel in mu2; the |mu2| form then sits below the true distance
    comps = [Geometric(0.9), NegBinomial(2.0, 0.9), Binomial(4, 0.1)]
    report = poisson_bound(comps)
    assert report.intermediates["mu2"] == pytest.approx(3 / 81 - 4 * 0.01, abs=1e-12)
    cert = certify(comps, "poisson")
    assert cert.status == "FAIL"
    assert report.value < cert.exact.value
    safe = report.intermediates["abs_numerator"] / report.intermediates["denominator"]
    assert safe >= cert.exact.value


@pytest.mark.parametrize("comps", [[Geometric(0.7)] * 5, [NegBinomial(5, 0.9)] * 3, [TwoRunsV(0.4)] * 2])
def test_abs_numerator_matches_for_one_signed_streams(comps):
    r = poisson_bound(comps)
    assert r.intermediates["abs_numerator"] == pytest.approx(r.intermediates["numerator"], rel=1e-10)
