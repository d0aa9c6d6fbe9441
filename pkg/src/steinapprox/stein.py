"""Stein operators, solution bounds and the perturbation lemma.

Three operators are supported:

* ``PoissonOp(lam)``: ``lam h(j+1) - j h(j)``;
* ``ConvolutionOp(streams)``: ``sum_i sum_k g_i[k] h(j+k+1) - j h(j)`` for a
  sum of independent components with quotient streams ``g_i``;
* ``PoissonGeometricOp(lam, p)``: the operator of ``Po(lam) * Ge(p)``,
  ``lam h(j+1) - j h(j) + sum_k q^(k+1) h(j+k+1)``.

Each has expectation zero under its own law for every bounded ``h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import PreconditionError
from .gcoeff import GCoefficients
from .pmf import Estimate, TruncatedPMF

__all__ = [
    "TestFunction",
    "PoissonOp",
    "ConvolutionOp",
    "PoissonGeometricOp",
    "SteinOperatorSpec",
    "apply_operator",
    "apply_operator_delta_form",
    "operator_expectation",
    "poisson_solution_bound",
    "perturbation_bound",
    "random_test_function",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Finite table ``h(0..M)`` extended by the constant ``h(M)`` beyond ``M``."""

    __test__ = False  # not a pytest class

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a non-empty 1-D sequence")
        if v[0] != 0.0:
            raise ValueError("test functions must satisfy h(0) = 0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def last(self) -> int:
        return self.values.size - 1

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    @property
    def delta_sup_norm(self) -> float:
        if self.values.size == 1:
            return 0.0
        return float(np.abs(np.diff(self.values)).max())

    def at(self, idx):
        """Evaluate at integer index or index array."""
        idx = np.minimum(np.asarray(idx), self.last)
        return self.values[idx]


def random_test_function(rng: np.random.Generator, size: int) -> TestFunction:
    values = rng.uniform(-1.0, 1.0, size)
    values[0] = 0.0
    return TestFunction(values)


@dataclass(frozen=True)
class PoissonOp:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")


@dataclass(frozen=True, eq=False)
class ConvolutionOp:
    streams: tuple

    def __init__(self, streams: Sequence[GCoefficients]):
        object.__setattr__(self, "streams", tuple(streams))
        if not self.streams:
            raise ValueError("need at least one stream")

    @property
    def mean(self) -> float:
        return math.fsum(math.fsum(g.coeffs) for g in self.streams)

    @property
    def remainder(self) -> float:
        return sum(g.remainder_bound for g in self.streams)


@dataclass(frozen=True)
class PoissonGeometricOp:
    lam: float
    p: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")

    @property
    def q(self) -> float:
        return 1.0 - self.p


SteinOperatorSpec = Union[PoissonOp, ConvolutionOp, PoissonGeometricOp]


def _geometric_tail_sum(q: float, values: np.ndarray, h_last: float, n_explicit: int) -> float:
    """``sum_{k>=0} q^(k+1) x_k`` where ``x_k = values[k]`` for ``k < n_explicit`` else ``h_last``."""
    k = np.arange(n_explicit)
    head = float(np.dot(q ** (k + 1), values[:n_explicit])) if n_explicit else 0.0
    return head + h_last * q ** (n_explicit + 1) / (1.0 - q)


def apply_operator(op: SteinOperatorSpec, h: TestFunction, j: int) -> float:
    """``(A h)(j)`` using the operator's raw, un-telescoped form."""
    base = -j * float(h.at(j))
    if isinstance(op, PoissonOp):
        return op.lam * float(h.at(j + 1)) + base
    if isinstance(op, ConvolutionOp):
        total = base
        for g in op.streams:
            idx = j + 1 + np.arange(g.coeffs.size)
            total += float(np.dot(g.coeffs, h.at(idx)))
        return total
    if isinstance(op, PoissonGeometricOp):
        n_explicit = max(0, h.last - j)
        vals = h.at(j + 1 + np.arange(n_explicit))
        return op.lam * float(h.at(j + 1)) + base + _geometric_tail_sum(op.q, vals, float(h.values[-1]), n_explicit)
    raise TypeError(type(op).__name__)


def apply_operator_delta_form(op: SteinOperatorSpec, h: TestFunction, j: int) -> float:
    """``(A h)(j)`` in the perturbed-Poisson form.

    ``mean * h(j+1) - j h(j) + sum_k g[k] sum_{l=1..k} Delta h(j+l)``.
    Agrees with :func:`apply_operator` pointwise up to rounding.
    """
    h1 = float(h.at(j + 1))
    base = -j * float(h.at(j))
    if isinstance(op, PoissonOp):
        return op.lam * h1 + base
    if isinstance(op, ConvolutionOp):
        total = op.mean * h1 + base
        for g in op.streams:
            big_l = g.coeffs.size
            dh = np.diff(h.at(j + 1 + np.arange(big_l)))
            # partial[k] = sum_{l=1}^{k} Delta h(j + l)
            partial = np.concatenate(([0.0], np.cumsum(dh)))
            total += float(np.dot(g.coeffs, partial))
        return total
    if isinstance(op, PoissonGeometricOp):
        q, p = op.q, op.p
        n_explicit = max(0, h.last - j)
        dh = np.diff(h.at(j + 1 + np.arange(n_explicit + 1)))
        partial = np.concatenate(([0.0], np.cumsum(dh)))[: n_explicit]
        settled = float(h.values[-1]) - h1
        tail = _geometric_tail_sum(q, partial, settled, n_explicit)
        return (op.lam + q / p) * h1 + base + tail
    raise TypeError(type(op).__name__)


def _operator_mean(op: SteinOperatorSpec) -> float:
    if isinstance(op, PoissonOp):
        return op.lam
    if isinstance(op, ConvolutionOp):
        return op.mean
    return op.lam + op.q / op.p


def operator_expectation(op: SteinOperatorSpec, h: TestFunction, law: TruncatedPMF) -> Estimate:
    """``E[(A h)(X)]`` for ``X`` distributed as ``law``.

    The uncertainty collects the stream remainders, an allowance for the
    unseen tail of ``law`` and floating-point rounding.
    """
    terms = np.array([apply_operator(op, h, j) for j in range(law.probs.size)])
    value = math.fsum(terms * law.probs)
    norm = h.sup_norm
    big_n = law.probs.size
    mean_op = _operator_mean(op)
    unc = 0.0
    if isinstance(op, ConvolutionOp):
        unc += norm * op.remainder
    unc += norm * law.tail_bound * (abs(mean_op) + 2.0 * (big_n + 1))
    unc += 64.0 * _EPS * norm * (abs(mean_op) + law.mean() + 1.0) * math.sqrt(big_n)
    return Estimate(value, unc)


def poisson_solution_bound(lam: float, f_norm_form: bool = False) -> float:
    """Bound on ``sup |Delta h_f|`` for the Poisson Stein equation.

    Plain form ``1 / max(1, lam)`` for indicator test functions; with
    ``f_norm_form`` the coefficient ``2 / max(1, lam)`` that multiplies
    ``||f||``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    c = 1.0 / max(1.0, lam)
    return 2.0 * c if f_norm_form else c


def perturbation_bound(alpha, w1, w2, eps, p2_out=0.0, p3_out=0.0) -> float:
    """TV bound transferred through a perturbed Stein operator.

    Requires ``w1 * w2 < alpha``; returns
    ``alpha / (2 (alpha - w1 w2)) * (eps w1 min(1, 1/alpha) + 2 p2_out + 2 p3_out)``.
    """
    if not (alpha > 0 and w1 > 0):
        raise ValueError("alpha and w1 must be positive")
    if min(w2, eps, p2_out, p3_out) < 0:
        raise ValueError("w2, eps and outside probabilities must be non-negative")
    margin = alpha - w1 * w2
    if margin <= 0:
        raise PreconditionError(
            f"perturbation lemma needs w1*w2 < alpha (w1*w2={w1 * w2:g}, alpha={alpha:g})",
            hypothesis="w1*w2 < alpha",
            margin=margin,
        )
    return alpha / (2.0 * margin) * (eps * w1 * min(1.0, 1.0 / alpha) + 2.0 * p2_out + 2.0 * p3_out)
