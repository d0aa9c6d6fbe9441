import numpy as np

from steinapprox.cli import figure_panel

# Exact PMF of n NB(5, 1 - q) components next to its moment-matched
# Poisson-geometric approximant.
for q in (0.1, 0.2):
    for n in (10, 30, 50):
        j, exact, approx = figure_panel(n, q)
        gap = np.abs(exact - approx).max()
        print(f"n={n:>2} q={q}  support {j.size:>3}  mass {exact.sum():.6f} {approx.sum():.6f}  sup gap {gap:.5f}")

# a few rows of one panel
j, exact, approx = figure_panel(10, 0.1)
for row in zip(j[:8], exact[:8], approx[:8]):
    print("%2d  %.6f  %.6f" % row)

# plotting is left to the reader, e.g.
# import matplotlib.pyplot as plt
# plt.plot(j, exact, "o", j, approx, "-"); plt.show()
