"""Kubo-Ando operator means and the operator perspective.

All means take strictly positive Hermitian matrices of equal size and return a
symmetrized result.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DimensionError, NotPositiveError
from .functions import ScalarFunction, affine, apply_function, custom, power
from .linalg import DEFAULT_FLOOR, as_square, eigvalsh, inv, symmetrize

Mean = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _pair(A, B) -> tuple[np.ndarray, np.ndarray]:
    A, B = as_square(A, "A"), as_square(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"operands differ in shape: {A.shape} vs {B.shape}")
    return A, B


def _require_positive(M, name: str, floor: float) -> None:
    lo = eigvalsh(M)[0]
    if lo <= floor:
        raise NotPositiveError(f"{name} is not strictly positive (min eigenvalue {lo:.3e})")


def _sandwich(fn: Callable[[np.ndarray], np.ndarray], A, B, floor: float) -> np.ndarray:
    """B^{1/2} fn(B^{-1/2} A B^{-1/2}) B^{1/2}."""
    A, B = _pair(A, B)
    _require_positive(A, "A", floor)
    w, V = np.linalg.eigh(symmetrize(B))
    if w[0] <= floor:
        raise NotPositiveError(f"B is not strictly positive (min eigenvalue {w[0]:.3e})")
    root = np.sqrt(w)
    b_half = (V * root) @ V.conj().T
    b_mhalf = (V / root) @ V.conj().T
    inner = symmetrize(b_mhalf @ A @ b_mhalf)
    return symmetrize(b_half @ fn(inner) @ b_half)


def mean_arithmetic(A, B) -> np.ndarray:
    """A ∇ B = (A + B) / 2."""
    A, B = _pair(A, B)
    return symmetrize((A + B) / 2)


def mean_geometric(A, B, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """A ♯ B = B^{1/2} (B^{-1/2} A B^{-1/2})^{1/2} B^{1/2}.

    The result is the unique positive solution X of X B^{-1} X = A.
    """
    return _sandwich(lambda X: apply_function(_SQRT, X, floor=0.0), A, B, floor)


def mean_harmonic(A, B, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """A ! B = ((A^{-1} + B^{-1}) / 2)^{-1}."""
    A, B = _pair(A, B)
    return inv((inv(A, floor) + inv(B, floor)) / 2, floor=0.0)


def kubo_ando_mean(h: ScalarFunction, A, B, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """A σ_h B = B^{1/2} h(B^{-1/2} A B^{-1/2}) B^{1/2}.

    ``h`` should be operator monotone with h(1) = 1 for the result to be a
    genuine operator mean; this is not enforced.
    """
    return _sandwich(lambda X: apply_function(h, X, floor=0.0), A, B, floor)


def perspective(f: ScalarFunction, A, B, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Operator perspective g(A, B) = B^{1/2} f(B^{-1/2} A B^{-1/2}) B^{1/2}.

    Same congruence formula as :func:`kubo_ando_mean`, without any claim
    that ``f`` is operator monotone.
    """
    return _sandwich(lambda X: apply_function(f, X, floor=0.0), A, B, floor)


def scalar_perspective(f: ScalarFunction, a: float, b: float) -> float:
    """b f(a / b) for positive reals."""
    return float(b * f(np.array([a / b]))[0])


_SQRT = power(0.5)

#: Representing functions of the three named means.
GEOMETRIC_FUNCTION = _SQRT
ARITHMETIC_FUNCTION = affine(0.5, 0.5)
HARMONIC_FUNCTION = custom(lambda t: 2 * t / (1 + t), "harmonic", claims=("operator_monotone",))

NAMED_MEANS: dict[str, Mean] = {
    "nabla": mean_arithmetic,
    "sharp": mean_geometric,
    "harmonic": mean_harmonic,
}
MEAN_ALIASES = {"arith": "nabla", "arithmetic": "nabla", "geo": "sharp", "geometric": "sharp", "harm": "harmonic", "!": "harmonic"}


def get_mean(name: str) -> Mean:
    """Look up a named mean (``nabla``, ``sharp``, ``harmonic`` or an alias)."""
    key = MEAN_ALIASES.get(name, name)
    try:
        return NAMED_MEANS[key]
    except KeyError:
        raise ValueError(f"unknown mean {name!r}") from None


def mean_from_function(h: ScalarFunction) -> Mean:
    """The Kubo-Ando mean represented by ``h`` as a two-argument callable."""

    def sigma(A, B):
        return kubo_ando_mean(h, A, B)

    sigma.__name__ = f"kubo_ando[{h}]"
    return sigma
