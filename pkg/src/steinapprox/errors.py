"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """A hypothesis required by a bound or lemma does not hold.

    ``hypothesis`` names the violated condition and ``margin`` carries the
    signed slack (negative or zero when violated).
    """

    def __init__(self, message: str, hypothesis: str, margin: float = float("nan")):
        super().__init__(message)
        self.hypothesis = hypothesis
        self.margin = margin


class ConvergenceError(ValueError):
    """A coefficient stream fails the absolute-convergence gate at w = 1."""


class InvalidLawError(ValueError):
    """A family does not define a probability law (negative mass, etc)."""
