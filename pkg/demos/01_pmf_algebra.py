import numpy as np

from steinapprox.pmf import Geometric, NegBinomial, Poisson, convolve, convolve_n, materialize, tv_distance, tv_shift

# A family is a frozen parameter record; materialize() tabulates it and
# remembers how much mass was cut off.
geo = materialize(Geometric(0.5))
print(geo.probs[:6])
print("stored terms:", geo.probs.size, "tail bound:", geo.tail_bound)

# Convolution of tabulated laws adds their tail bounds.
two = convolve(geo, geo)
print(two.probs[:4])  # 0.25, 0.25, 0.1875, 0.125

# Two geometric(p) laws sum to NB(2, p)
nb = materialize(NegBinomial(2, 0.5))
print("d_TV(Ge*Ge, NB(2)):", tv_distance(two, nb))

# convolve_n works straight from families
w = convolve_n([Geometric(0.7)] * 4)
print("mean of 4 x Ge(0.7):", w.mean(), "expected", 4 * 0.3 / 0.7)

# distance to Poisson with the same mean
print("d_TV(W, Po(mu)):", tv_distance(w, materialize(Poisson(4 * 0.3 / 0.7))).value)

# tv_shift measures how far a law is from its own shift by one
for p in (0.3, 0.6, 0.9):
    print(p, round(tv_shift(materialize(Geometric(p))), 4))

# the tail bound is a real bound, not an estimate
coarse = materialize(Geometric(0.5), 1e-4)
print(coarse.probs.size, coarse.tail_bound, 1 - np.sum(coarse.probs))
