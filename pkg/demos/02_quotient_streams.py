import numpy as np

from steinapprox.gcoeff import g_closed_form, g_from_pmf
from steinapprox.moments import moments_from_pmf, moments_of
from steinapprox.pmf import Binomial, Geometric, NegBinomial, Poisson, convolve_n, materialize

# Each component contributes the power series of psi'/psi, its log-derivative PGF.
# Poisson gives a single term, a geometric law a geometric sequence.
print(g_closed_form(Poisson(2.0)).coeffs[:4])
print(g_closed_form(Geometric(0.5)).coeffs[:5])

# Binomial entries alternate in sign
print(g_closed_form(Binomial(4, 0.2)).coeffs[:5])

# The same stream comes out of long division of the tabulated PMF.
fam = NegBinomial(2.5, 0.8)
closed = g_closed_form(fam).coeffs[:30]
divided = g_from_pmf(materialize(fam, 1e-30), 30).coeffs
print("max difference:", np.abs(closed - divided).max())

# Every stream carries an envelope for what was cut off.
g = g_closed_form(fam)
print(len(g), g.decay_ratio, g.weighted_remainder("j(j-1)"))

# Weighted sums of the streams give mean, variance and factorial cumulants.
comps = [Geometric(0.8), NegBinomial(2.0, 0.9), Binomial(3, 0.1)]
m = moments_of([g_closed_form(c) for c in comps])
print(m)

# ...which can be checked against the convolved law directly
ref = moments_from_pmf(convolve_n(comps, 1e-18))
print("mean", m.mu, ref.mu)
print("variance", m.sigma2, ref.sigma2)
print("sigma2 - mu =", m.sigma2 - m.mu, " mu2 =", m.mu2)
