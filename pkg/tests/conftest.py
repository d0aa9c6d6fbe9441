import pytest

from steinapprox.pmf import Binomial, Geometric, NegBinomial, TwoRunsV

NS = (1, 2, 5, 10)

GRID_FAMILIES = (
    [Geometric(p) for p in (0.5, 0.7, 0.8, 0.85, 0.9, 0.95)]
    + [NegBinomial(a, p) for a in (0.5, 2.0, 5.0, 10.0) for p in (0.7, 0.85, 0.9, 0.95)]
    + [Binomial(m, p) for m in (1, 4, 10) for p in (0.05, 0.15, 0.25)]
    + [TwoRunsV(p) for p in (0.3, 0.4, 0.45, 0.5)]
)

MIXED = [
    [Geometric(0.9), NegBinomial(2.0, 0.9), Binomial(4, 0.1)],
    [TwoRunsV(0.45), Geometric(0.8), Geometric(0.95)],
    [NegBinomial(0.5, 0.7)] * 3 + [Binomial(10, 0.05)] * 2,
    [Geometric(0.5), TwoRunsV(0.5), NegBinomial(5.0, 0.95), Binomial(1, 0.25)],
]


def grid_instances(mixed=True):
    """Lists of ``n`` identical components, optionally followed by the mixed lists."""
    out = [[fam] * n for fam in GRID_FAMILIES for n in NS]
    if mixed:
        out.extend(MIXED)
    return out


# acceptance results, printed at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240917)
