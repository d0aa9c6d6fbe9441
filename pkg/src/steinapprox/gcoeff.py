"""Coefficient streams of the logarithmic derivative of a component PGF.

For a component with PGF ``psi`` the stream is the power series

    psi'(w) / psi(w) = sum_j g[j] w**j,

stored 0-based (``coeffs[j]`` multiplies ``w**j``).  Every stream carries a
geometric envelope ``|coeffs[L + k]| <= tail_scale * decay_ratio**k`` for the
indices past its stored length ``L``.  That envelope bounds every weighted
remainder the moment code needs.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, InvalidLawError
from .pmf import (
    Bernoulli,
    Binomial,
    CustomPMF,
    Geometric,
    NegBinomial,
    Poisson,
    TruncatedPMF,
    TwoRunsV,
    two_runs_binomial_sum,
)

__all__ = [
    "DEFAULT_TRUNC_LEN",
    "DEFAULT_SERIES_TOL",
    "GCoefficients",
    "SumCheck",
    "g_closed_form",
    "g_from_pmf",
    "g_sum_check",
    "two_runs_roots",
    "two_runs_g_exact",
]

DEFAULT_TRUNC_LEN = 200
DEFAULT_SERIES_TOL = 1e-12
_MAX_TRUNC_LEN = 200_000


@dataclass(frozen=True, eq=False)
class GCoefficients:
    coeffs: np.ndarray
    remainder_bound: float
    converges_at_one: bool
    decay_ratio: float
    tail_scale: float

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.float64)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self) -> int:
        return self.coeffs.size

    def weighted_remainder(self, weight: str) -> float:
        """Bound on ``sum_{j >= L} w(j) |coeffs[j]|`` for ``w`` in 1, j, j+1, j(j-1)."""
        if self.tail_scale == 0.0:
            return 0.0
        if not self.converges_at_one:
            return math.inf
        r = self.decay_ratio
        big_l = self.coeffs.size
        a = self.tail_scale
        s0 = 1.0 / (1.0 - r)
        s1 = r / (1.0 - r) ** 2
        s2 = r * (1.0 + r) / (1.0 - r) ** 3
        if weight == "1":
            return a * s0
        if weight == "j":
            return a * (big_l * s0 + s1)
        if weight == "j+1":
            return a * ((big_l + 1) * s0 + s1)
        if weight == "j(j-1)":
            return a * (big_l * (big_l - 1) * s0 + (2 * big_l - 1) * s1 + s2)
        raise ValueError(f"unknown weight {weight!r}")


@dataclass(frozen=True)
class SumCheck:
    total: float
    mean: float
    error: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.error <= self.tolerance


def _make(coeffs: np.ndarray, decay_ratio: float, lead: float) -> GCoefficients:
    """Stream whose entries obey ``|coeffs[j]| <= lead * decay_ratio**j``."""
    big_l = coeffs.size
    if lead == 0.0:
        return GCoefficients(coeffs, 0.0, True, 0.0, 0.0)
    if decay_ratio >= 1.0:
        return GCoefficients(coeffs, math.inf, False, decay_ratio, math.inf)
    tail_scale = lead * decay_ratio**big_l
    return GCoefficients(coeffs, tail_scale / (1.0 - decay_ratio), True, decay_ratio, tail_scale)


def _auto_length(decay_ratio: float, lead: float, series_tol: float) -> int:
    """Smallest length >= DEFAULT_TRUNC_LEN with the j(j-1) remainder <= series_tol."""
    big_l = DEFAULT_TRUNC_LEN
    if lead == 0.0 or decay_ratio == 0.0:
        return big_l
    probe = _make(np.zeros(big_l), decay_ratio, lead)
    while probe.weighted_remainder("j(j-1)") > series_tol:
        big_l = int(big_l * 1.5)
        if big_l > _MAX_TRUNC_LEN:
            raise ConvergenceError(f"stream with ratio {decay_ratio:g} needs more than {_MAX_TRUNC_LEN} terms")
        probe = _make(np.zeros(big_l), decay_ratio, lead)
    return big_l


def two_runs_roots(p: float):
    """Reciprocal roots ``a, b`` of ``1 - t + p^2 t^2`` (``a + b = 1``, ``ab = p^2``)."""
    disc = np.sqrt(complex(1.0 - 4.0 * p * p))
    return (1.0 + disc) / 2.0, (1.0 - disc) / 2.0


def _family_envelope(family):
    """Return ``(term(j_array), decay_ratio, lead)`` for a closed-form family."""
    if isinstance(family, Poisson):
        lam = float(family.lam)
        return (lambda j: np.where(j == 0, lam, 0.0)), 0.0, 0.0
    if isinstance(family, (Geometric, NegBinomial)):
        alpha = getattr(family, "alpha", 1.0)
        q = family.q
        return (lambda j: alpha * q ** (j + 1)), q, alpha * q
    if isinstance(family, (Bernoulli, Binomial)):
        n = getattr(family, "n", 1)
        p = family.p
        if p >= 0.5:
            raise ConvergenceError(
                f"binomial stream with p={p:g} has ratio p/(1-p) >= 1 and does not converge at w=1"
            )
        r = p / (1.0 - p)
        return (lambda j: n * (-1.0) ** j * r ** (j + 1)), r, n * r
    if isinstance(family, TwoRunsV):
        a, b = two_runs_roots(family.p)
        rho = max(abs(a), abs(b))
        return (lambda j: np.real(a ** (j + 1) + b ** (j + 1))), rho, 2.0 * rho
    raise TypeError(f"no closed form for {type(family).__name__}")


@functools.lru_cache(maxsize=4096)
def _closed_cached(family, trunc_len, series_tol):
    term, ratio, lead = _family_envelope(family)
    if trunc_len is None:
        trunc_len = _auto_length(ratio, lead, series_tol)
    coeffs = np.asarray(term(np.arange(trunc_len)), dtype=np.float64)
    return _make(coeffs, ratio, lead)


def g_closed_form(family, trunc_len: int | None = None, series_tol: float = DEFAULT_SERIES_TOL) -> GCoefficients:
    """Closed-form stream for a standard family.

    With ``trunc_len=None`` the length is chosen so that even the
    ``j(j-1)``-weighted remainder is below ``series_tol``.
    """
    if isinstance(family, CustomPMF):
        raise TypeError("CustomPMF has no closed form; use g_from_pmf")
    if trunc_len is not None and trunc_len < 1:
        raise ValueError("trunc_len must be positive")
    return _closed_cached(family, trunc_len, series_tol)


def _empirical_envelope(coeffs: np.ndarray):
    """Root-test estimate of ``(decay_ratio, tail_scale)`` from the stream's tail."""
    big_l = coeffs.size
    mags = np.abs(coeffs)
    scale = float(mags.max()) if big_l else 0.0
    if big_l < 8:
        late = float(mags[-1]) if big_l else 0.0
        if late <= 1e-13 * max(scale, 1.0):
            return 0.5, late
        return 1.0, late
    quarter = big_l // 4
    late = float(mags[-quarter:].max())
    early = float(mags[-2 * quarter : -quarter].max())
    if late <= 1e-13 * max(scale, 1.0):
        # noise floor: the stream has numerically terminated
        return 0.5, late
    if early == 0.0:
        return 1.0, late
    r = (late / early) ** (1.0 / quarter)
    return min(r, 1.0), late


def g_from_pmf(pmf: TruncatedPMF, trunc_len: int | None = None) -> GCoefficients:
    """Quotient stream of ``psi'/psi`` by power-series division of the PMF.

    Uses ``g[j] = ((j+1) P[j+1] - sum_{k<j} g[k] P[j-k]) / P[0]`` with
    probabilities past the stored support taken as zero.
    """
    probs = pmf.probs
    if not probs[0] > 0:
        raise ValueError("P(0) = 0: the quotient psi'/psi is undefined at the origin")
    if trunc_len is None:
        trunc_len = probs.size
    padded = np.zeros(trunc_len + 1)
    m = min(probs.size, trunc_len + 1)
    padded[:m] = probs[:m]
    g = np.zeros(trunc_len)
    p0 = padded[0]
    for j in range(trunc_len):
        acc = (j + 1) * padded[j + 1]
        if j:
            # sum_{k=0}^{j-1} g[k] * P[j-k]
            acc -= np.dot(g[:j], padded[j:0:-1])
        g[j] = acc / p0
    r, late = _empirical_envelope(g)
    if r >= 1.0:
        return GCoefficients(g, math.inf, False, r, math.inf)
    return GCoefficients(g, late * r / (1.0 - r), True, r, late * r)


def g_sum_check(g: GCoefficients, family) -> SumCheck:
    """Compare the stream sum at ``w = 1`` with the family's analytic mean."""
    total = math.fsum(g.coeffs)
    mean = float(family.mean)
    return SumCheck(total, mean, abs(total - mean), g.remainder_bound + 1e-10)


def two_runs_g_exact(p: Fraction, n_terms: int) -> list:
    """Exact quotient stream for TwoRunsV from the binomial-sum PMF coefficients.

    ``psi'/psi = (1 - 2 p^2 t) / (1 - t + p^2 t^2)`` so that
    ``g[j] = (b[j] - 2 p^2 b[j-1]) / p^2`` where ``b`` is the PMF.
    """
    b = two_runs_binomial_sum(p, n_terms)
    p2 = p * p
    out = [b[0] / p2]
    out.extend((b[j] - 2 * p2 * b[j - 1]) / p2 for j in range(1, n_terms))
    return out


def check_law(family) -> None:
    """Raise if a closed-form family is not a probability law."""
    if isinstance(family, TwoRunsV) and family.p > 0.5:
        raise InvalidLawError(
            f"TwoRunsV(p={family.p:g}) has signed coefficients; only p <= 1/2 defines a law"
        )
