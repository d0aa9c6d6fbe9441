"""Mean, variance and factorial cumulants of a sum of independent components."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import ConvergenceError
from .gcoeff import GCoefficients
from .pmf import TruncatedPMF

__all__ = ["MomentSummary", "moments_of", "moments_from_pmf"]


@dataclass(frozen=True)
class MomentSummary:
    """``mu2`` and ``mu3`` are the second and third factorial cumulants.

    ``uncertainty`` bounds the truncation error of every field; ``mu3`` may be
    ``None`` when it was not computed.
    """

    mu: float
    sigma2: float
    mu2: float
    mu3: Optional[float]
    uncertainty: float = 0.0


def moments_of(components: Iterable[GCoefficients]) -> MomentSummary:
    """Moments of ``W_n`` from the per-component quotient streams.

    Each moment is a weighted sum of the stream entries: weight 1 for the
    mean, ``j + 1`` for the variance, ``j`` for the second factorial cumulant
    and ``j (j - 1)`` for the third.
    """
    mu_terms, var_terms, mu2_terms, mu3_terms = [], [], [], []
    unc = 0.0
    for g in components:
        if not g.converges_at_one:
            raise ConvergenceError("a component stream does not converge at w = 1")
        j = np.arange(g.coeffs.size, dtype=np.float64)
        mu_terms.extend(g.coeffs)
        var_terms.extend((j + 1) * g.coeffs)
        mu2_terms.extend(j * g.coeffs)
        mu3_terms.extend(j * (j - 1) * g.coeffs)
        unc += max(
            g.weighted_remainder("1"),
            g.weighted_remainder("j+1"),
            g.weighted_remainder("j"),
            g.weighted_remainder("j(j-1)"),
        )
    if not mu_terms:
        raise ValueError("need at least one component")
    return MomentSummary(
        mu=math.fsum(mu_terms),
        sigma2=math.fsum(var_terms),
        mu2=math.fsum(mu2_terms),
        mu3=math.fsum(mu3_terms),
        uncertainty=unc,
    )


def moments_from_pmf(pmf: TruncatedPMF) -> MomentSummary:
    """Moments computed directly from a tabulated law.

    Used as an independent check on :func:`moments_of`.  The third factorial
    cumulant comes from the factorial moments
    ``k3 = m3 - 3 m2 m1 + 2 m1**3`` with ``m_r = E[X (X-1) ... (X-r+1)]``.
    The reported uncertainty is the unseen tail mass only.
    """
    p = pmf.probs
    j = np.arange(p.size, dtype=np.float64)
    m1 = math.fsum(j * p)
    m2 = math.fsum(j * (j - 1) * p)
    m3 = math.fsum(j * (j - 1) * (j - 2) * p)
    var = m2 + m1 - m1 * m1
    return MomentSummary(
        mu=m1,
        sigma2=var,
        mu2=var - m1,
        mu3=m3 - 3.0 * m2 * m1 + 2.0 * m1**3,
        uncertainty=pmf.tail_bound,
    )
