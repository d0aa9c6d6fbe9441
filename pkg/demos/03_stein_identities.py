import numpy as np

from steinapprox.gcoeff import g_closed_form
from steinapprox.pmf import Geometric, Poisson, convolve_n, materialize
from steinapprox.stein import (
    ConvolutionOp,
    PoissonGeometricOp,
    PoissonOp,
    TestFunction,
    apply_operator,
    apply_operator_delta_form,
    operator_expectation,
    perturbation_bound,
    random_test_function,
)

rng = np.random.default_rng(7)

# A test function is a table h(0..M) with h(0) = 0, held constant past M.
h = random_test_function(rng, 40)

# E[A h(X)] vanishes when X has the operator's own law.
law = materialize(Poisson(2.0))
print(operator_expectation(PoissonOp(2.0), h, law))

# ...and not otherwise
print(operator_expectation(PoissonOp(2.0), h, materialize(Poisson(2.5))))

# For a sum of independent components the operator is built from the streams.
comps = [Geometric(0.5), Geometric(0.7)]
op = ConvolutionOp([g_closed_form(c) for c in comps])
print(operator_expectation(op, h, convolve_n(comps)))

# Poisson plus an independent geometric has its own operator
pg = PoissonGeometricOp(1.0, 0.5)
print(operator_expectation(pg, h, convolve_n([Poisson(1.0), Geometric(0.5)])))

# The operator written with forward differences agrees pointwise.
for j in (0, 5, 20, 60):
    print(j, apply_operator(op, h, j), apply_operator_delta_form(op, h, j))

# identity test function at j = 0 for the Poisson-geometric operator
ident = TestFunction(np.arange(500, dtype=float))
print(apply_operator(pg, ident, 0))  # lambda + q / p**2 = 3

# perturbation: an operator close to a known one transfers the bound
print(perturbation_bound(alpha=4.0, w1=0.5, w2=2.0, eps=0.4))
