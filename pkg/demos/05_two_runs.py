import math
from fractions import Fraction

from steinapprox.bounds import certify, poisson_bound
from steinapprox.gcoeff import g_closed_form, two_runs_g_exact, two_runs_roots
from steinapprox.pmf import NegBinomial, TwoRunsV, materialize, tv_distance, two_runs_binomial_sum, two_runs_recurrence

# V is the number of failures before the second success in a row,
# PGF p^2 / (1 - t + p^2 t^2).
p = 0.4
print(two_runs_recurrence(p, 6))
print(two_runs_binomial_sum(p, 6))

# both agree exactly in rational arithmetic
q = Fraction(3, 10)
print(two_runs_recurrence(q, 20) == two_runs_binomial_sum(q, 20))

# The quotient stream is a^(j+1) + b^(j+1) for the reciprocal roots.
a, b = two_runs_roots(p)
print(a, b)
print(g_closed_form(TwoRunsV(p)).coeffs[:5])
print([float(x) for x in two_runs_g_exact(Fraction(2, 5), 5)])

# mean (1 - 2 p^2) / p^2
print(math.fsum(g_closed_form(TwoRunsV(p)).coeffs), (1 - 2 * p**2) / p**2)

# at p = 1/2 the law is NB(2, 1/2)
print(tv_distance(materialize(TwoRunsV(0.5)), materialize(NegBinomial(2, 0.5))).value)

# past p = 1/2 the coefficients go negative, so it is not a law any more
print(two_runs_recurrence(0.7, 6))

# Sums of n independent copies
for n in (1, 5, 20):
    c = certify([TwoRunsV(0.45)] * n)
    print(n, poisson_bound([TwoRunsV(0.45)] * n).value, c.exact.value, c.status)
