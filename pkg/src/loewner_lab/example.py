"""A 3x3 worked example of the sharp Jensen chain under a compression.

With f(t) = t^{-1/2}, Φ the compression onto the last two coordinates and

    A = [[2, 0, 1], [0, 1, 1], [1, 1, 3]]

the chain f(Φ(A)) <= Φ(f(A)^{-1})^{-1} <= Φ(f(A)) holds and is strict in the
sense "<= and !=". The first gap is positive definite; the second is the rank-one
Schur term X_21 X_11^{-1} X_12 of X = f(A), so its smallest eigenvalue is zero.
The 4-decimal values below are kept as fixtures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .checks import sharp_cdj_sides
from .functions import power
from .linalg import eigvalsh
from .maps import compression

MATRIX = np.array([[2.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 3.0]])
INDICES = (1, 2)
FUNCTION = power(-0.5)
MATCH_TOLERANCE = 5e-4
STRICT_GAP = 1e-4

NAMES = ("f(Phi(A))", "Phi(f(A)^-1)^-1", "Phi(f(A))")
FIXTURES = {
    "f(Phi(A))": np.array([[1.1945, -0.2706], [-0.2706, 0.6533]]),
    "Phi(f(A)^-1)^-1": np.array([[1.2192, -0.2933], [-0.2933, 0.6760]]),
    "Phi(f(A))": np.array([[1.2420, -0.3261], [-0.3261, 0.7234]]),
}


@dataclass(frozen=True)
class ExampleReport:
    computed: dict[str, np.ndarray]
    max_deviation: dict[str, float]
    gap_min_eigs: tuple[float, float]
    gap_norms: tuple[float, float]
    tolerance: float

    @property
    def matches(self) -> bool:
        return all(d <= self.tolerance for d in self.max_deviation.values())

    @property
    def strict(self) -> bool:
        """Each link holds (gap PSD up to rounding) and the two sides differ by more than STRICT_GAP."""
        return all(lo > -1e-12 and n > STRICT_GAP for lo, n in zip(self.gap_min_eigs, self.gap_norms))

    @property
    def gaps_positive_definite(self) -> bool:
        return min(self.gap_min_eigs) > STRICT_GAP

    @property
    def ok(self) -> bool:
        return self.matches and self.strict


def compute() -> dict[str, np.ndarray]:
    """The three matrices of the chain, in order."""
    phi = compression(3, INDICES)
    sides = sharp_cdj_sides(FUNCTION, phi, MATRIX)
    return {name: np.real_if_close(M) for name, M in zip(NAMES, sides)}


def run(tolerance: float = MATCH_TOLERANCE) -> ExampleReport:
    computed = compute()
    dev = {k: float(np.max(np.abs(computed[k] - FIXTURES[k]))) for k in NAMES}
    lhs, mid, rhs = (computed[k] for k in NAMES)
    spectra = [eigvalsh(mid - lhs), eigvalsh(rhs - mid)]
    lows = tuple(float(w[0]) for w in spectra)
    norms = tuple(float(np.max(np.abs(w))) for w in spectra)
    return ExampleReport(computed, dev, lows, norms, tolerance)
