"""Probability mass functions on the non-negative integers.

A law is stored as a finite probability vector on ``{0, ..., N}`` together
with a certified bound on the mass that lies beyond ``N``.  Every operation
here is a pure function of immutable inputs.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy import stats

from .errors import InvalidLawError

__all__ = [
    "DEFAULT_TAIL_TOL",
    "EPS_NORM",
    "CLAMP_TOL",
    "Poisson",
    "Geometric",
    "Bernoulli",
    "Binomial",
    "NegBinomial",
    "TwoRunsV",
    "CustomPMF",
    "ComponentFamily",
    "TruncatedPMF",
    "Estimate",
    "materialize",
    "convolve",
    "convolve_n",
    "tv_distance",
    "tv_shift",
    "point_mass",
    "two_runs_recurrence",
    "two_runs_binomial_sum",
]

DEFAULT_TAIL_TOL = 1e-12
EPS_NORM = 1e-10
# round-off slack for the 2-runs recurrence
CLAMP_TOL = 1e-14
_MAX_SUPPORT = 1_000_000


# ---------------------------------------------------------------------------
# Component families
# ---------------------------------------------------------------------------


def _check_open_unit(name: str, p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {p!r}")


@dataclass(frozen=True)
class Poisson:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"Poisson rate must be positive, got {self.lam!r}")

    @property
    def mean(self) -> float:
        return float(self.lam)

    def spec(self) -> str:
        return f"po:{self.lam:g}"


@dataclass(frozen=True)
class Geometric:
    """Number of failures before the first success: ``P(k) = q**k * p``."""

    p: float

    def __post_init__(self):
        _check_open_unit("Geometric p", self.p)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def mean(self) -> float:
        return self.q / self.p

    def spec(self) -> str:
        return f"ge:{self.p:g}"


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        _check_open_unit("Bernoulli p", self.p)

    @property
    def mean(self) -> float:
        return float(self.p)

    def spec(self) -> str:
        return f"ber:{self.p:g}"


@dataclass(frozen=True)
class Binomial:
    n: int
    p: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"Binomial n must be a positive integer, got {self.n!r}")
        _check_open_unit("Binomial p", self.p)

    @property
    def mean(self) -> float:
        return self.n * self.p

    def spec(self) -> str:
        return f"bin:{self.n}:{self.p:g}"


@dataclass(frozen=True)
class NegBinomial:
    """Failures before the ``alpha``-th success; PGF ``(p / (1 - q t))**alpha``."""

    alpha: float
    p: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"NegBinomial alpha must be positive, got {self.alpha!r}")
        _check_open_unit("NegBinomial p", self.p)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def mean(self) -> float:
        return self.alpha * self.q / self.p

    def spec(self) -> str:
        return f"nb:{self.alpha:g}:{self.p:g}"


@dataclass(frozen=True)
class TwoRunsV:
    """Inter-arrival of 2-runs shifted to start at zero.

    The PGF is ``p**2 / (1 - t + p**2 t**2)``.  It defines a genuine law
    only for ``p <= 1/2``; for larger ``p`` the coefficients change sign and
    :func:`materialize` rejects the family.
    """

    p: float

    def __post_init__(self):
        _check_open_unit("TwoRunsV p", self.p)

    @property
    def mean(self) -> float:
        return (1.0 - 2.0 * self.p**2) / self.p**2

    def spec(self) -> str:
        return f"tr:{self.p:g}"


@dataclass(frozen=True)
class CustomPMF:
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(x) for x in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise ValueError("CustomPMF needs at least one entry")
        if any(x < 0 for x in probs):
            raise ValueError("CustomPMF entries must be non-negative")
        if not probs[0] > 0:
            raise ValueError("CustomPMF requires probs[0] > 0")
        if math.fsum(probs) > 1.0 + EPS_NORM:
            raise ValueError("CustomPMF entries sum to more than one")

    @property
    def mean(self) -> float:
        return math.fsum(k * x for k, x in enumerate(self.probs))

    def spec(self) -> str:
        return "pmf:" + ",".join(f"{x:g}" for x in self.probs)


ComponentFamily = Union[Poisson, Geometric, Bernoulli, Binomial, NegBinomial, TwoRunsV, CustomPMF]


# ---------------------------------------------------------------------------
# Truncated PMF
# ---------------------------------------------------------------------------


class Estimate(NamedTuple):
    """A computed value with a certified absolute uncertainty."""

    value: float
    uncertainty: float


@dataclass(frozen=True, eq=False)
class TruncatedPMF:
    """Probabilities on ``{0, ..., len(probs) - 1}`` plus an out-of-support bound."""

    probs: np.ndarray
    tail_bound: float = 0.0
    origin_family: Optional[ComponentFamily] = field(default=None, compare=False)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty 1-D sequence")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("probs must be finite and non-negative")
        if not self.tail_bound >= 0:
            raise ValueError("tail_bound must be non-negative")
        total = math.fsum(probs) + self.tail_bound
        if abs(total - 1.0) > EPS_NORM:
            raise ValueError(f"mass {total!r} is not normalized within {EPS_NORM}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return self.probs.size

    @property
    def support_max(self) -> int:
        return self.probs.size - 1

    def mean(self) -> float:
        return float(np.dot(np.arange(self.probs.size), self.probs))

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)


def point_mass(k: int) -> TruncatedPMF:
    probs = np.zeros(k + 1)
    probs[k] = 1.0
    return TruncatedPMF(probs)


# ---------------------------------------------------------------------------
# 2-runs coefficient sequences
# ---------------------------------------------------------------------------


def two_runs_recurrence(p, n_terms: int) -> list:
    """Return ``P(V=j)`` for ``j < n_terms`` via ``c_j = c_{j-1} - p^2 c_{j-2}``.

    Works for floats and for :class:`fractions.Fraction` (exact arithmetic).
    The values are not sign-checked.
    """
    p2 = p * p
    c = [p2 / p2, p2 / p2]  # unit of the same numeric type as p
    while len(c) < n_terms:
        c.append(c[-1] - p2 * c[-2])
    return [p2 * x for x in c[:n_terms]]


def two_runs_binomial_sum(p, n_terms: int) -> list:
    """Return ``sum_l C(j-l, l) (-1)^l p^(2(l+1))`` for ``j < n_terms``."""
    p2 = p * p
    out = []
    for j in range(n_terms):
        total = p2 - p2  # typed zero
        for ell in range(j // 2 + 1):
            term = math.comb(j - ell, ell) * p2 ** (ell + 1)
            total = total - term if ell % 2 else total + term
        out.append(total)
    return out


# ---------------------------------------------------------------------------
# Materialization
# ---------------------------------------------------------------------------


def _scipy_law(family):
    if isinstance(family, Poisson):
        return stats.poisson(family.lam)
    if isinstance(family, Geometric):
        # scipy's geom starts at 1
        return stats.nbinom(1, family.p)
    if isinstance(family, NegBinomial):
        return stats.nbinom(family.alpha, family.p)
    if isinstance(family, Bernoulli):
        return stats.binom(1, family.p)
    if isinstance(family, Binomial):
        return stats.binom(family.n, family.p)
    raise TypeError(type(family))


def _support_end(law, tail_tol: float) -> int:
    guess = law.isf(tail_tol)
    n = int(guess) if np.isfinite(guess) and guess > 0 else 0
    while law.sf(n) > tail_tol:
        n += 1
        if n > _MAX_SUPPORT:
            raise ValueError("support exceeds the materialization cap")
    return n


def _materialize_two_runs(family: TwoRunsV, tail_tol: float) -> TruncatedPMF:
    p2 = family.p**2
    c_prev, c_cur = 1.0, 1.0
    probs = [p2, p2]
    j = 1
    while True:
        # tail <= P_N * r / (1 - r) while the term ratio is non-increasing,
        # which holds for the real-root case p <= 1/2
        ratio = probs[-1] / probs[-2] if probs[-2] > 0 else 0.0
        if 0.0 <= ratio < 1.0 and j >= 2:
            tail = probs[-1] * ratio / (1.0 - ratio)
            if tail <= tail_tol:
                break
        j += 1
        if j > _MAX_SUPPORT:
            raise ValueError("support exceeds the materialization cap")
        c_prev, c_cur = c_cur, c_cur - p2 * c_prev
        value = p2 * c_cur
        if value < 0:
            if value < -CLAMP_TOL:
                raise InvalidLawError(
                    f"TwoRunsV(p={family.p:g}) gives negative mass {value:.3e} at index {j}; "
                    "the generating function is a probability law only for p <= 1/2"
                )
            value = 0.0
        probs.append(value)
    probs_arr = np.asarray(probs)
    # the ratio bound can be loose; the complement is exact up to rounding
    tail = min(tail, max(0.0, 1.0 - math.fsum(probs_arr)) + 16 * np.finfo(float).eps)
    return TruncatedPMF(probs_arr, tail, family)


@functools.lru_cache(maxsize=4096)
def _materialize_cached(family, tail_tol: float) -> TruncatedPMF:
    if isinstance(family, TwoRunsV):
        return _materialize_two_runs(family, tail_tol)
    if isinstance(family, CustomPMF):
        probs = np.asarray(family.probs)
        deficit = max(0.0, 1.0 - math.fsum(probs))
        if deficit > tail_tol:
            raise ValueError(
                f"CustomPMF is missing mass {deficit:.3e}, more than tail_tol={tail_tol:g}"
            )
        return TruncatedPMF(probs, deficit, family)
    if isinstance(family, Geometric):
        # q**k p directly; exact to rounding and not limited by scipy's sf
        n = max(0, math.ceil(math.log(tail_tol) / math.log(family.q)) - 1)
        k = np.arange(n + 1)
        return TruncatedPMF(family.p * family.q**k, family.q ** (n + 1), family)
    law = _scipy_law(family)
    n = _support_end(law, tail_tol)
    k = np.arange(n + 1)
    return TruncatedPMF(law.pmf(k), float(law.sf(n)), family)


def materialize(family: ComponentFamily, tail_tol: float = DEFAULT_TAIL_TOL) -> TruncatedPMF:
    """Tabulate ``family`` far enough out that the missing mass is ``<= tail_tol``."""
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol!r}")
    return _materialize_cached(family, float(tail_tol))


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------


def convolve(a: TruncatedPMF, b: TruncatedPMF) -> TruncatedPMF:
    """Law of the sum of independent variables with laws ``a`` and ``b``."""
    probs = np.convolve(a.probs, b.probs)
    return TruncatedPMF(probs, a.tail_bound + b.tail_bound)


def convolve_n(families, tail_tol: float = DEFAULT_TAIL_TOL) -> TruncatedPMF:
    """Law of ``W_n``, the sum of independent components drawn from ``families``."""
    families = list(families)
    if not families:
        raise ValueError("need at least one component")
    out = materialize(families[0], tail_tol)
    for fam in families[1:]:
        out = convolve(out, materialize(fam, tail_tol))
    return out


def _aligned(a: TruncatedPMF, b: TruncatedPMF):
    n = max(a.probs.size, b.probs.size)
    pa = np.zeros(n)
    pb = np.zeros(n)
    pa[: a.probs.size] = a.probs
    pb[: b.probs.size] = b.probs
    return pa, pb


def tv_distance(a: TruncatedPMF, b: TruncatedPMF) -> Estimate:
    """Total variation distance, half the l1 distance between the PMFs.

    The uncertainty accounts for the unseen tails of both laws.
    """
    pa, pb = _aligned(a, b)
    value = 0.5 * math.fsum(np.abs(pa - pb))
    return Estimate(value, 0.5 * (a.tail_bound + b.tail_bound))


def tv_shift(a: TruncatedPMF) -> float:
    """``d_TV(X, X + 1)`` for ``X`` with law ``a``."""
    padded = np.concatenate(([0.0], a.probs, [0.0]))
    return 0.5 * math.fsum(np.abs(np.diff(padded)))
