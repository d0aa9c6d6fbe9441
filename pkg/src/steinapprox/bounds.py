"""Total-variation error bounds for Poisson-type approximations of ``W_n``.

``poisson_bound`` and ``poisson_geometric_bound`` are the two Stein-method
bounds; the remaining functions evaluate the classical comparison bounds
(Vellaisamy-Upadhye, Hung-Giang, Khintchine-Le Cam) and the Mattner-Roos
smoothness estimate.  ``certify`` checks a bound against the exact distance.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .gcoeff import DEFAULT_TRUNC_LEN, check_law, g_closed_form, g_from_pmf
from .moments import MomentSummary, moments_of
from .pmf import (
    DEFAULT_TAIL_TOL,
    CustomPMF,
    Estimate,
    Geometric,
    Poisson,
    convolve,
    convolve_n,
    materialize,
    tv_distance,
    tv_shift,
)
from .stein import perturbation_bound, poisson_solution_bound

__all__ = [
    "Precondition",
    "BoundReport",
    "MatchedParameters",
    "component_streams",
    "match_parameters",
    "poisson_bound",
    "poisson_geometric_bound",
    "mattner_roos_term",
    "vu_bound",
    "hung_giang_bound",
    "lecam_bound",
    "lemma_instantiation",
    "BudgetExceeded",
    "Certificate",
    "certify",
    "approximant_pmfs",
]

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class Precondition(NamedTuple):
    name: str
    ok: bool
    margin: float


@dataclass
class BoundReport:
    value: float
    theorem: str
    preconditions: list = field(default_factory=list)
    intermediates: dict = field(default_factory=dict)
    uncertainty: float = 0.0

    @property
    def ok(self) -> bool:
        return all(pc.ok for pc in self.preconditions)

    @property
    def failed(self) -> list:
        return [pc for pc in self.preconditions if not pc.ok]

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "value": _enc(self.value),
            "uncertainty": _enc(self.uncertainty),
            "preconditions": [
                {"name": pc.name, "ok": pc.ok, "margin": _enc(pc.margin)} for pc in self.preconditions
            ],
            "intermediates": {k: _enc(v) for k, v in self.intermediates.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        return cls(
            value=_dec(d["value"]),
            theorem=d["theorem"],
            preconditions=[Precondition(pc["name"], bool(pc["ok"]), _dec(pc["margin"])) for pc in d["preconditions"]],
            intermediates={k: _dec(v) for k, v in d["intermediates"].items()},
            uncertainty=_dec(d["uncertainty"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BoundReport":
        return cls.from_dict(json.loads(text))


# JSON has no infinities; non-finite floats travel as strings
def _enc(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _dec(x):
    return float(x)


def _spread(f: Callable[..., float], center: Sequence[float], widths: Sequence[float]) -> float:
    """Largest change of ``f`` over the corners of the box ``center +/- widths``."""
    f0 = f(*center)
    if not any(widths):
        return 0.0
    worst = 0.0
    for signs in itertools.product((-1.0, 1.0), repeat=len(center)):
        try:
            v = f(*(c + s * w for c, s, w in zip(center, signs, widths)))
        except (ValueError, ZeroDivisionError):
            return math.inf
        if not math.isfinite(v):
            return math.inf
        worst = max(worst, abs(v - f0))
    return worst


def component_streams(components, tail_tol: float = DEFAULT_TAIL_TOL) -> list:
    """Quotient streams for each component; rejects non-laws and divergent streams."""
    streams = []
    for fam in components:
        check_law(fam)
        if isinstance(fam, CustomPMF):
            pmf = materialize(fam, tail_tol)
            # run the division past the support so the decay of the stream is visible
            g = g_from_pmf(pmf, max(pmf.probs.size, DEFAULT_TRUNC_LEN))
        else:
            g = g_closed_form(fam)
        if not g.converges_at_one:
            raise ConvergenceError(f"{fam} fails the convergence gate at w = 1")
        streams.append(g)
    if not streams:
        raise ValueError("need at least one component")
    return streams


# ---------------------------------------------------------------------------
# Poisson target
# ---------------------------------------------------------------------------


def _poisson_value(mu: float, mu2: float) -> float:
    return abs(mu2) / max(1.0, mu)


def _abs_weighted_mu2(streams) -> float:
    """``sum_i sum_j j |g_i[j]|`` including the envelope remainder."""
    total = []
    for g in streams:
        total.extend(np.arange(g.coeffs.size) * np.abs(g.coeffs))
        total.append(g.weighted_remainder("j"))
    return math.fsum(total)


def poisson_bound(components, tail_tol: float = DEFAULT_TAIL_TOL) -> BoundReport:
    """``|mu2| / max(1, mu)`` bound on ``d_TV(W_n, Po(mu))``.

    The intermediate ``abs_numerator`` is ``sum j |g_j|`` over all streams.
    It equals ``|mu2|`` when every stream entry past the first has one sign.
    When over- and under-dispersed components are mixed, ``mu2`` can cancel,
    and ``abs_numerator / denominator`` is then the safe value to use.
    """
    streams = component_streams(components, tail_tol)
    m = moments_of(streams)
    value = _poisson_value(m.mu, m.mu2)
    unc = _spread(_poisson_value, (m.mu, m.mu2), (m.uncertainty, m.uncertainty))
    return BoundReport(
        value=value,
        theorem="poisson",
        preconditions=[Precondition("series converge at w=1", True, 0.0)],
        intermediates={
            "mu": m.mu,
            "sigma2": m.sigma2,
            "mu2": m.mu2,
            "mu3": m.mu3,
            "numerator": abs(m.mu2),
            "abs_numerator": _abs_weighted_mu2(streams),
            "denominator": max(1.0, m.mu),
        },
        uncertainty=unc,
    )


# ---------------------------------------------------------------------------
# Poisson * geometric target
# ---------------------------------------------------------------------------


class MatchedParameters(NamedTuple):
    lam: float
    p: float
    lam_positive: bool


def match_parameters(m: MomentSummary) -> MatchedParameters:
    """Parameters of ``Po(lam) * Ge(p)`` with the mean and variance of ``m``.

    ``lam = mu - sqrt(sigma2 - mu)``, ``p = 1 / (1 + sqrt(sigma2 - mu))``.
    Raises :class:`PreconditionError` unless ``sigma2 > mu``.
    """
    excess = m.sigma2 - m.mu
    if not excess > 0:
        raise PreconditionError(
            f"under-dispersed: sigma^2 - mu = {excess:.6g} <= 0, a geometric part cannot match",
            hypothesis="sigma2 > mu",
            margin=excess,
        )
    root = math.sqrt(excess)
    lam = m.mu - root
    return MatchedParameters(lam, 1.0 / (1.0 + root), lam > 0)


def mattner_roos_term(components, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Upper bound on ``d_TV(W_n, W_n + 1)`` from per-component shift distances.

    The unseen tail of each component is added to its shift distance, which
    can only enlarge the returned value.
    """
    total = 0.25
    for fam in components:
        pmf = materialize(fam, tail_tol)
        d = min(1.0, tv_shift(pmf) + pmf.tail_bound)
        total += 1.0 - d
    return SQRT_2_OVER_PI / math.sqrt(total)


def _pg_value(mu: float, mu2: float, mu3: float, smooth: float) -> float:
    root = math.sqrt(mu2)
    lam = mu - root
    denom = (lam - 2.0 * root**2) * max(1.0, lam)
    if denom <= 0:
        return math.inf
    return lam * smooth * abs(mu3 - 2.0 * root**3) / denom


def poisson_geometric_bound(components, tail_tol: float = DEFAULT_TAIL_TOL) -> BoundReport:
    """Bound on ``d_TV(W_n, Po(lam) * Ge(p))`` with moment-matched ``lam, p``.

    Requires ``sigma2 > mu`` and ``lam > 2 (q/p)^2``.  A violated hypothesis
    yields a report with infinite value and the failing margin recorded.
    """
    components = list(components)
    m = moments_of(component_streams(components, tail_tol))
    inter = {"mu": m.mu, "sigma2": m.sigma2, "mu2": m.mu2, "mu3": m.mu3}
    disp = Precondition("sigma2 > mu", m.sigma2 - m.mu > 0, m.sigma2 - m.mu)
    try:
        lam, p, _ = match_parameters(m)
    except PreconditionError:
        return BoundReport(math.inf, "poisson-geometric", [disp], inter, math.inf)

    q_over_p = (1.0 - p) / p
    margin = lam - 2.0 * q_over_p**2
    gate = Precondition("lambda > 2(q/p)^2", margin > 0, margin)
    smooth = mattner_roos_term(components, tail_tol)
    numerator = abs(m.mu3 - 2.0 * q_over_p**3)
    inter.update(
        {
            "lambda": lam,
            "p": p,
            "q": 1.0 - p,
            "q_over_p": q_over_p,
            "geometric_mu3": 2.0 * q_over_p**3,
            "smoothness": smooth,
            "numerator": lam * smooth * numerator,
            "denominator": margin * max(1.0, lam),
            "mu3_mismatch": numerator,
        }
    )
    if not gate.ok:
        return BoundReport(math.inf, "poisson-geometric", [disp, gate], inter, math.inf)

    # sigma2 - mu is passed as mu2: same quantity, no cancellation
    center = (m.mu, m.sigma2 - m.mu, m.mu3, smooth)
    value = _pg_value(*center)
    u = m.uncertainty
    unc = _spread(_pg_value, center, (u, 2 * u, u, 1e-12))
    return BoundReport(value, "poisson-geometric", [disp, gate], inter, unc)


def lemma_instantiation(lam: float, p: float, eps: float) -> float:
    """Evaluate the perturbation lemma with the parameters that give the
    Poisson-geometric bound: ``alpha = lam``, ``w1 = 2``, ``w2 = (q/p)^2``.

    ``eps`` is the smoothness factor times ``|mu3 - 2 (q/p)^3|``.  Diagnostic
    only: the returned value equals ``poisson_geometric_bound``'s.
    """
    q_over_p = (1.0 - p) / p
    # 2 / max(1, lam) == w1 * min(1, 1/alpha) with w1 = 2, alpha = lam
    assert math.isclose(poisson_solution_bound(lam, True), 2.0 * min(1.0, 1.0 / lam))
    return perturbation_bound(lam, 2.0, q_over_p**2, eps)


# ---------------------------------------------------------------------------
# Comparison bounds
# ---------------------------------------------------------------------------


def _broadcast(n: int, xs, name: str) -> list:
    xs = [float(x) for x in xs]
    if len(xs) == 1:
        return xs * n
    if len(xs) != n:
        raise ValueError(f"{name} must have length 1 or n={n}")
    return xs


def vu_bound(n: int, alphas, ps, lambda_convention: str = "per-component") -> BoundReport:
    """Vellaisamy-Upadhye bound for a sum of negative binomials.

    ``min(1, 1/sqrt(2 lam e)) * sum alpha_i q_i^2 / p_i``.  With the default
    ``"per-component"`` convention ``lam`` is the average of ``alpha_i q_i``
    (``alpha q`` for identical components), which is the reading that
    matches the published comparison table; ``"total"`` uses the sum.
    """
    if n < 1:
        raise ValueError("n must be positive")
    alphas = _broadcast(n, alphas, "alphas")
    ps = _broadcast(n, ps, "ps")
    s = math.fsum(a * (1.0 - p) for a, p in zip(alphas, ps))
    if lambda_convention == "per-component":
        lam = s / n
    elif lambda_convention == "total":
        lam = s
    else:
        raise ValueError(f"unknown lambda_convention {lambda_convention!r}")
    factor = min(1.0, 1.0 / math.sqrt(2.0 * lam * math.e))
    total = math.fsum(a * (1.0 - p) ** 2 / p for a, p in zip(alphas, ps))
    return BoundReport(
        value=factor * total,
        theorem="vellaisamy-upadhye",
        intermediates={"lambda": lam, "factor": factor, "sum": total},
    )


def hung_giang_bound(rs, ps) -> BoundReport:
    """Hung-Giang bound for ``d_TV(W_n, Po(E W_n))`` with negative binomial parts."""
    rs = [float(r) for r in rs]
    ps = [float(p) for p in ps]
    if len(rs) != len(ps) or not rs:
        raise ValueError("rs and ps must be non-empty and of equal length")
    lam = math.fsum(r * (1.0 - p) / p for r, p in zip(rs, ps))
    factor = 1.0 if lam == 0 else -math.expm1(-lam) / lam
    terms, at_q = [], True
    for r, p in zip(rs, ps):
        q = 1.0 - p
        first = factor * r * q
        at_q &= first >= q
        terms.append(min(first, q) * q / p)
    simplified = math.fsum((1.0 - p) ** 2 / p for p in ps)
    return BoundReport(
        value=math.fsum(terms),
        theorem="hung-giang",
        intermediates={"lambda": lam, "simplified": simplified, "min_resolves_to_q": float(at_q)},
    )


def lecam_bound(ps) -> BoundReport:
    """Khintchine-Le Cam ``sum p_i^2`` beside the Stein value ``sum p_i^2 / max(1, mu)``."""
    ps = [float(p) for p in ps]
    if not ps or any(not 0 < p < 1 for p in ps):
        raise ValueError("Bernoulli probabilities must lie in (0, 1)")
    s = math.fsum(p * p for p in ps)
    mu = math.fsum(ps)
    return BoundReport(
        value=s,
        theorem="le-cam",
        intermediates={"mu": mu, "stein_poisson": s / max(1.0, mu)},
    )


# ---------------------------------------------------------------------------
# Certification against the exact distance
# ---------------------------------------------------------------------------


def approximant_pmfs(components, report: BoundReport, tail_tol: float = DEFAULT_TAIL_TOL):
    """Return ``(law of W_n, approximating law)`` for a Poisson or
    Poisson-geometric report produced from ``components``."""
    law = convolve_n(components, tail_tol)
    if report.theorem == "poisson":
        approx = materialize(Poisson(report.intermediates["mu"]), tail_tol)
    elif report.theorem == "poisson-geometric":
        lam, p = report.intermediates["lambda"], report.intermediates["p"]
        approx = convolve(materialize(Poisson(lam), tail_tol), materialize(Geometric(p), tail_tol))
    else:
        raise ValueError(f"no approximant for {report.theorem!r}")
    return law, approx


class BudgetExceeded(ValueError):
    def __init__(self, message: str, suggested_n: int):
        super().__init__(message)
        self.suggested_n = suggested_n


@dataclass
class Certificate:
    bound: BoundReport
    exact: Optional[Estimate]
    passed: Optional[bool]

    @property
    def ratio(self) -> float:
        if self.exact is None or not math.isfinite(self.bound.value):
            return math.nan
        if self.exact.value == 0:
            return math.inf if self.bound.value > 0 else math.nan
        return self.bound.value / self.exact.value

    @property
    def status(self) -> str:
        if self.passed is None:
            return "UNAVAILABLE"
        return "PASS" if self.passed else "FAIL"


def certify(
    components,
    target: str = "poisson",
    tail_tol: float = DEFAULT_TAIL_TOL,
    budget: int = 2_000_000,
    bound_override: Optional[float] = None,
) -> Certificate:
    """Compare a bound with the exact TV distance from truncated convolution.

    PASS iff the bound plus its uncertainty is not exceeded by the exact
    distance, allowing for the exact value's own tail uncertainty.
    ``budget`` caps the total stored support of the components.
    ``bound_override`` replaces the bound value (test hook).
    """
    components = list(components)
    sizes = [len(materialize(f, tail_tol)) for f in components]
    if sum(sizes) > budget:
        per = max(sizes) or 1
        raise BudgetExceeded(
            f"convolution support {sum(sizes)} exceeds budget {budget}",
            suggested_n=max(1, budget // per),
        )
    if target == "poisson":
        report = poisson_bound(components, tail_tol)
    elif target == "pg":
        report = poisson_geometric_bound(components, tail_tol)
    else:
        raise ValueError(f"unknown target {target!r}")
    if bound_override is not None:
        report.value = float(bound_override)
        report.uncertainty = 0.0
    try:
        law, approx = approximant_pmfs(components, report, tail_tol)
    except (KeyError, ValueError):
        # no matched approximant (under-dispersion or lam <= 0)
        return Certificate(report, None, None)
    exact = tv_distance(law, approx)
    if not report.ok:
        return Certificate(report, exact, None)
    passed = bool(report.value + report.uncertainty + exact.uncertainty >= exact.value)
    return Certificate(report, exact, passed)
