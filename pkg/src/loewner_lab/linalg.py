"""Dense Hermitian matrix kernel and the Loewner-order comparator.

Matrices are plain 2-D numpy arrays (real or complex). Every function here is
pure: inputs are never modified and outputs are fresh arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    NotHermitianError,
    NotPositiveError,
)

#: Eigenvalue floor used by every "strictly positive" precondition.
DEFAULT_FLOOR = 1e-10
#: Relative coefficient of the default Loewner tolerance.
DEFAULT_REL_TOL = 1e-8
#: Largest relative Hermitian defect accepted on construction.
MAX_HERMITIAN_DEFECT = 1e-8

_TINY = np.finfo(float).tiny


def as_square(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a 2-D square float or complex array."""
    arr = np.asarray(M)
    if arr.dtype.kind not in "fc":
        arr = arr.astype(float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise DimensionError(f"{name} has dimension 0")
    return arr


def hermitian_defect(M) -> float:
    """max |M - M^*| relative to max |M| (0 for the zero matrix)."""
    arr = as_square(M)
    scale = float(np.max(np.abs(arr)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(arr - arr.conj().T))) / scale


def symmetrize(M) -> np.ndarray:
    """(M + M^*) / 2, dropping an all-zero imaginary part."""
    arr = as_square(M)
    out = 0.5 * (arr + arr.conj().T)
    if np.iscomplexobj(out) and not np.any(out.imag):
        out = out.real.copy()
    return out


def hermitian(M, max_defect: float = MAX_HERMITIAN_DEFECT) -> np.ndarray:
    """Validate and symmetrize a Hermitian matrix.

    Raises
    ------
    NotHermitianError
        If the relative defect ``max|M - M^*| / max|M|`` exceeds ``max_defect``.
    """
    arr = as_square(M)
    defect = hermitian_defect(arr)
    if defect > max_defect:
        raise NotHermitianError(
            f"matrix is not Hermitian: relative defect {defect:.3e} > {max_defect:.1e}"
        )
    return symmetrize(arr)


def direct_sum(*blocks) -> np.ndarray:
    """Block-diagonal matrix ``A_1 ⊕ ... ⊕ A_k``."""
    mats = [as_square(b) for b in blocks]
    if not mats:
        raise DimensionError("direct_sum needs at least one block")
    n = sum(m.shape[0] for m in mats)
    dtype = np.result_type(*mats)
    out = np.zeros((n, n), dtype=dtype)
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i:i + k, i:i + k] = m
        i += k
    return out


# ---------------------------------------------------------------------------
# Eigendecomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and unitary eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self, values: np.ndarray | None = None) -> np.ndarray:
        """V diag(values) V^*; ``values`` defaults to the eigenvalues."""
        w = self.eigenvalues if values is None else values
        V = self.eigenvectors
        return symmetrize((V * w) @ V.conj().T)


def jacobi_eigh(
    A, threshold: float = 1e-13, max_sweeps: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi eigensolver for a Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies a real Givens rotation with ``tan 2θ = 2|a_pq| / (a_qq - a_pp)``.
    Pivots are visited in row-cyclic order, so the result is deterministic.

    Parameters
    ----------
    A : array_like, shape (n, n)
        Hermitian input (not validated here).
    threshold : float
        Stop once the off-diagonal Frobenius norm is below
        ``threshold * ||A||_F``.
    max_sweeps : int, optional
        Iteration cap; defaults to ``100 * n**2`` sweeps.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Ascending.
    eigenvectors : ndarray, shape (n, n)
        Unitary, columns matching ``eigenvalues``.
    """
    a = np.array(as_square(A), dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if max_sweeps is None:
        max_sweeps = 100 * n * n
    stop = threshold * np.linalg.norm(a)

    off_mask = ~np.eye(n, dtype=bool)

    def off_norm() -> float:
        # summed directly: ||A||^2 - ||diag||^2 cancels catastrophically near convergence
        return float(np.linalg.norm(a[off_mask]))

    residual = off_norm()
    sweeps = 0
    while residual > stop:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge after {max_sweeps} sweeps "
                f"(off-diagonal norm {residual:.3e})",
                residual,
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mag = abs(b)
                if mag < _TINY:
                    # b / mag overflows for subnormal pivots
                    a[p, q] = a[q, p] = 0.0
                    continue
                ph = b / mag
                theta = 0.5 * math.atan2(2.0 * mag, (a[q, q] - a[p, p]).real)
                c, s = math.cos(theta), math.sin(theta)
                phc = ph.conjugate()
                # columns: A <- A J with J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * phc * cq
                a[:, q] = s * cp + c * phc * cq
                # rows: A <- J^* A
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * ph * rq
                a[q, :] = s * rp + c * ph * rq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * phc * vq
                v[:, q] = s * vp + c * phc * vq
        sweeps += 1
        residual = off_norm()

    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_hermitian(A, method: str = "lapack") -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    ``method="lapack"`` delegates to ``numpy.linalg.eigh``; ``method="jacobi"``
    uses :func:`jacobi_eigh`. Both are deterministic for identical input.
    """
    arr = hermitian(A)
    if method == "lapack":
        w, V = np.linalg.eigh(arr)
    elif method == "jacobi":
        w, V = jacobi_eigh(arr)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return SpectralDecomposition(np.asarray(w, dtype=float), V)


def eigvalsh(A) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (symmetrized first)."""
    return np.linalg.eigvalsh(symmetrize(A))


def min_eig(A) -> float:
    return float(eigvalsh(A)[0])


def spectral_norm(A) -> float:
    """Operator 2-norm of a Hermitian matrix (largest |eigenvalue|)."""
    w = eigvalsh(A)
    return float(max(abs(w[0]), abs(w[-1])))


# ---------------------------------------------------------------------------
# Loewner order
# ---------------------------------------------------------------------------


class Relation(str, enum.Enum):
    LESS_OR_EQUAL = "LessOrEqual"
    GREATER_OR_EQUAL = "GreaterOrEqual"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class LoewnerVerdict:
    """Outcome of comparing two Hermitian matrices L and R.

    ``min_eig_rhs_minus_lhs`` is the witness for ``L <= R``: the relation holds
    iff it is at least ``-tolerance``.
    """

    relation: Relation
    min_eig_lhs_minus_rhs: float
    min_eig_rhs_minus_lhs: float
    tolerance: float

    @property
    def holds(self) -> bool:
        """True when ``L <= R`` within tolerance (LessOrEqual or Equal)."""
        return self.relation in (Relation.LESS_OR_EQUAL, Relation.EQUAL)

    @property
    def slack(self) -> float:
        return self.min_eig_rhs_minus_lhs

    def swapped(self) -> "LoewnerVerdict":
        rel = {
            Relation.LESS_OR_EQUAL: Relation.GREATER_OR_EQUAL,
            Relation.GREATER_OR_EQUAL: Relation.LESS_OR_EQUAL,
        }.get(self.relation, self.relation)
        return LoewnerVerdict(rel, self.min_eig_rhs_minus_lhs, self.min_eig_lhs_minus_rhs, self.tolerance)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "minEigLhsMinusRhs": self.min_eig_lhs_minus_rhs,
            "minEigRhsMinusLhs": self.min_eig_rhs_minus_lhs,
            "tolerance": self.tolerance,
        }


def default_tolerance(L, R, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """``rel_tol * (1 + max(||L||_2, ||R||_2))``."""
    return rel_tol * (1.0 + max(spectral_norm(L), spectral_norm(R)))


def loewner_compare(L, R, tol: float | None = None, rel_tol: float = DEFAULT_REL_TOL) -> LoewnerVerdict:
    """Compare ``L`` and ``R`` in the Loewner order.

    ``tol`` is an absolute eigenvalue tolerance; when omitted it is
    ``rel_tol * (1 + max(||L||_2, ||R||_2))``.
    """
    L = as_square(L, "lhs")
    R = as_square(R, "rhs")
    if L.shape != R.shape:
        raise DimensionError(f"cannot compare {L.shape} with {R.shape}")
    if tol is None:
        tol = default_tolerance(L, R, rel_tol)
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    w = eigvalsh(L - R)
    lhs_minus_rhs = float(w[0])
    rhs_minus_lhs = float(-w[-1])
    le = rhs_minus_lhs >= -tol
    ge = lhs_minus_rhs >= -tol
    if le and ge:
        rel = Relation.EQUAL
    elif le:
        rel = Relation.LESS_OR_EQUAL
    elif ge:
        rel = Relation.GREATER_OR_EQUAL
    else:
        rel = Relation.INCOMPARABLE
    return LoewnerVerdict(rel, lhs_minus_rhs, rhs_minus_lhs, float(tol))


def strictly_positive(A, floor: float = DEFAULT_FLOOR) -> bool:
    """True iff the smallest eigenvalue of ``A`` exceeds ``floor``."""
    if floor < 0:
        raise ValueError("floor must be non-negative")
    return min_eig(hermitian(A)) > floor


# ---------------------------------------------------------------------------
# Spectral calculus helpers
# ---------------------------------------------------------------------------


def spectral_apply(A, fn: Callable[[np.ndarray], np.ndarray], floor: float | None = DEFAULT_FLOOR) -> np.ndarray:
    """V fn(Λ) V^* for Hermitian ``A``.

    When ``floor`` is not None, eigenvalues at or below it raise
    :class:`NotPositiveError`.
    """
    w, V = np.linalg.eigh(symmetrize(A))
    if floor is not None and w[0] <= floor:
        raise NotPositiveError(f"matrix is not strictly positive: min eigenvalue {w[0]:.3e} <= {floor:.1e}")
    return symmetrize((V * fn(w)) @ V.conj().T)


def sqrt_psd(A, tol: float | None = None) -> np.ndarray:
    """Positive square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are clipped to zero; ``tol`` defaults to
    ``1e-10 * (1 + ||A||_2)``.
    """
    w, V = np.linalg.eigh(hermitian(A))
    if tol is None:
        tol = 1e-10 * (1.0 + max(abs(w[0]), abs(w[-1])))
    if w[0] < -tol:
        raise NotPositiveError(f"negative eigenvalue {w[0]:.3e} below -{tol:.1e}")
    return symmetrize((V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T)


def inv(A, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Inverse of a strictly positive matrix."""
    return spectral_apply(hermitian(A), np.reciprocal, floor)


def inv_sqrt(A, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    return spectral_apply(hermitian(A), lambda w: 1.0 / np.sqrt(w), floor)


def congruence(C, A) -> np.ndarray:
    """C^* A C; ``C`` may be rectangular (n x m) giving an m x m result."""
    C = np.asarray(C)
    A = as_square(A)
    if C.ndim != 2 or C.shape[0] != A.shape[0]:
        raise DimensionError(f"congruence: C {C.shape} incompatible with A {A.shape}")
    return symmetrize(C.conj().T @ A @ C)
