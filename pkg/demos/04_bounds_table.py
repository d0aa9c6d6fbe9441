from steinapprox.bounds import certify, hung_giang_bound, lecam_bound, poisson_bound, poisson_geometric_bound, vu_bound
from steinapprox.pmf import Bernoulli, NegBinomial, Poisson, Geometric

# n identical NB(5, 1 - q) components, compared with an older bound.
print(f"{'n':>3} {'q':>4} {'stein':>8} {'older':>8}")
for q in (0.1, 0.2):
    for n in (10, 30, 50):
        ours = poisson_bound([NegBinomial(5, 1 - q)] * n).value
        older = vu_bound(n, [5], [1 - q]).value
        print(f"{n:>3} {q:>4} {ours:>8.4f} {older:>8.4f}")

# A bound report keeps its intermediates and checked hypotheses.
r = poisson_geometric_bound([NegBinomial(5, 0.9)] * 10)
print(r.value)
for pc in r.preconditions:
    print(" ", pc)
for k, v in r.intermediates.items():
    print(f"  {k:>15}: {v:.6g}")

# under-dispersed sums cannot be matched by a Poisson-geometric law
bad = poisson_geometric_bound([Bernoulli(0.1)] * 10)
print(bad.value, bad.failed)

# Bernoulli sums: the classical bound and ours
print(lecam_bound([0.1] * 10).value, poisson_bound([Bernoulli(0.1)] * 10).value)
print(hung_giang_bound([5], [0.9]).value)

# certify compares a bound with the exact distance.
for comps, target in (([NegBinomial(5, 0.9)] * 10, "pg"), ([Poisson(3.0), Geometric(0.8)], "pg"), ([Geometric(0.5)] * 5, "poisson")):
    c = certify(comps, target)
    print(target, c.status, c.bound.value, c.exact.value, c.ratio)
