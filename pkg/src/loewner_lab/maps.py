"""Positive linear maps, finite operator fields, and the unitary dilation of an isometry.

Every map kind has an explicit Kraus form ``Φ(A) = Σ C_i^* A C_i`` with
``C_i`` of shape ``(in_dim, out_dim)``; the kind-specific ``__call__`` is the
fast path and :meth:`PositiveLinearMap.via_kraus` the reference path.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NotIsometryError, NotPositiveError, NotUnitalError
from .io import matrix_from_json, matrix_to_json
from .linalg import DEFAULT_FLOOR, as_square, direct_sum, eigvalsh, hermitian, symmetrize

UNITAL_TOL = 1e-10
POSITIVITY_SAMPLES = 16


class PositiveLinearMap:
    """Base class; subclasses define ``in_dim``, ``out_dim``, ``__call__`` and ``kraus``."""

    kind: str = ""
    in_dim: int
    out_dim: int

    def __call__(self, A) -> np.ndarray:
        raise NotImplementedError

    def kraus(self) -> list[np.ndarray]:
        raise NotImplementedError

    def via_kraus(self, A) -> np.ndarray:
        A = self._check_input(A)
        return symmetrize(sum(C.conj().T @ A @ C for C in self.kraus()))

    def image_of_identity(self) -> np.ndarray:
        return self(np.eye(self.in_dim))

    def is_unital(self, tol: float = UNITAL_TOL) -> bool:
        return bool(np.max(np.abs(self.image_of_identity() - np.eye(self.out_dim))) <= tol)

    def _check_input(self, A) -> np.ndarray:
        A = as_square(A)
        if A.shape[0] != self.in_dim:
            raise DimensionError(f"{self.kind} map expects dimension {self.in_dim}, got {A.shape[0]}")
        return A

    def _spot_check_positive(self) -> None:
        # fixed seed: construction must stay deterministic
        rng = np.random.default_rng(0x5EED)
        for _ in range(POSITIVITY_SAMPLES):
            G = rng.standard_normal((self.in_dim, self.in_dim)) + 1j * rng.standard_normal((self.in_dim, self.in_dim))
            out = self(G @ G.conj().T)
            lo = eigvalsh(out)[0]
            if lo < -1e-10 * (1.0 + float(np.max(np.abs(out)))):
                raise NotPositiveError(f"{self.kind} map sent a PSD input to min eigenvalue {lo:.3e}")


@dataclass(frozen=True, eq=False)
class Compression(PositiveLinearMap):
    """A ↦ A[indices, indices] (0-based, strictly increasing indices)."""

    in_dim: int
    indices: tuple[int, ...]
    validate: InitVar[bool] = True
    kind = "compression"

    def __post_init__(self, validate: bool):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx:
            raise DimensionError("compression needs at least one index")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("compression indices must be strictly increasing")
        if idx[0] < 0 or idx[-1] >= self.in_dim:
            raise DimensionError(f"compression indices {idx} out of range for dimension {self.in_dim}")

    @property
    def out_dim(self) -> int:
        return len(self.indices)

    def __call__(self, A) -> np.ndarray:
        A = self._check_input(A)
        ix = np.asarray(self.indices)
        return symmetrize(A[np.ix_(ix, ix)])

    def kraus(self) -> list[np.ndarray]:
        return [np.eye(self.in_dim)[:, list(self.indices)]]


@dataclass(frozen=True, eq=False)
class Kraus(PositiveLinearMap):
    """A ↦ Σ C_i^* A C_i with every ``C_i`` of shape (in_dim, out_dim).

    With ``unital=True`` the constructor insists on Σ C_i^* C_i = I.
    """

    factors: tuple[np.ndarray, ...]
    unital: bool = True
    validate: InitVar[bool] = True
    kind = "kraus"

    def __post_init__(self, validate: bool):
        facs = tuple(np.atleast_2d(np.asarray(C)) for C in self.factors)
        if not facs:
            raise ValueError("Kraus map needs at least one factor")
        shape = facs[0].shape
        if any(C.ndim != 2 or C.shape != shape for C in facs):
            raise DimensionError("Kraus factors must share one (in_dim, out_dim) shape")
        object.__setattr__(self, "factors", facs)
        if self.unital:
            S = sum(C.conj().T @ C for C in facs)
            err = float(np.max(np.abs(S - np.eye(shape[1]))))
            if err > UNITAL_TOL:
                raise NotUnitalError(f"Σ C_i^* C_i deviates from I by {err:.3e}")

    @property
    def in_dim(self) -> int:
        return self.factors[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.factors[0].shape[1]

    def __call__(self, A) -> np.ndarray:
        return self.via_kraus(A)

    def kraus(self) -> list[np.ndarray]:
        return list(self.factors)


@dataclass(frozen=True, eq=False)
class DirectSumAverage(PositiveLinearMap):
    """A_1 ⊕ ... ⊕ A_k ↦ Σ w_i A_i.

    Off-diagonal blocks of a general input are discarded, which extends the
    map from block-diagonal matrices to the whole algebra while keeping it
    positive and unital.
    """

    block_dims: tuple[int, ...]
    weights: tuple[float, ...]
    validate: InitVar[bool] = True
    kind = "dsavg"

    def __post_init__(self, validate: bool):
        dims = tuple(int(d) for d in self.block_dims)
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "weights", w)
        if not dims or len(dims) != len(w):
            raise DimensionError("block_dims and weights must be non-empty and of equal length")
        if len(set(dims)) != 1 or dims[0] < 1:
            raise DimensionError(f"all blocks must share one positive dimension, got {dims}")
        if any(x <= 0 for x in w) or abs(sum(w) - 1.0) > UNITAL_TOL:
            raise NotUnitalError(f"weights must be positive and sum to 1, got {w}")

    @property
    def in_dim(self) -> int:
        return sum(self.block_dims)

    @property
    def out_dim(self) -> int:
        return self.block_dims[0]

    def __call__(self, A) -> np.ndarray:
        A = self._check_input(A)
        m = self.out_dim
        return symmetrize(sum(w * A[i * m:(i + 1) * m, i * m:(i + 1) * m] for i, w in enumerate(self.weights)))

    def kraus(self) -> list[np.ndarray]:
        m = self.out_dim
        eye = np.eye(self.in_dim)
        return [math.sqrt(w) * eye[:, i * m:(i + 1) * m] for i, w in enumerate(self.weights)]


@dataclass(frozen=True, eq=False)
class Pinching(PositiveLinearMap):
    """A ↦ Σ P_i A P_i for orthogonal projections resolving the identity."""

    projections: tuple[np.ndarray, ...]
    validate: InitVar[bool] = True
    kind = "pinching"

    def __post_init__(self, validate: bool):
        projs = tuple(hermitian(P) for P in self.projections)
        if not projs:
            raise ValueError("pinching needs at least one projection")
        n = projs[0].shape[0]
        if any(P.shape != (n, n) for P in projs):
            raise DimensionError("projections must share one shape")
        object.__setattr__(self, "projections", projs)
        if validate:
            for i, P in enumerate(projs):
                if np.max(np.abs(P @ P - P)) > UNITAL_TOL:
                    raise ValueError(f"projection {i} is not idempotent")
                for Q in projs[i + 1:]:
                    if np.max(np.abs(P @ Q)) > UNITAL_TOL:
                        raise ValueError("projections are not pairwise orthogonal")
            if np.max(np.abs(sum(projs) - np.eye(n))) > UNITAL_TOL:
                raise NotUnitalError("projections do not sum to the identity")

    @property
    def in_dim(self) -> int:
        return self.projections[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.in_dim

    def __call__(self, A) -> np.ndarray:
        A = self._check_input(A)
        return symmetrize(sum(P @ A @ P for P in self.projections))

    def kraus(self) -> list[np.ndarray]:
        return list(self.projections)


def _finish(m: PositiveLinearMap, validate: bool) -> PositiveLinearMap:
    if validate:
        m._spot_check_positive()
    return m


def compression(in_dim: int, indices: Iterable[int], validate: bool = True) -> Compression:
    return _finish(Compression(in_dim, tuple(indices), validate), validate)


def kraus_map(factors: Sequence, unital: bool = True, validate: bool = True) -> Kraus:
    return _finish(Kraus(tuple(factors), unital, validate), validate)


def direct_sum_average(block_dims: Sequence[int], weights: Sequence[float] | None = None, validate: bool = True) -> DirectSumAverage:
    if weights is None:
        weights = [1.0 / len(block_dims)] * len(block_dims)
    return _finish(DirectSumAverage(tuple(block_dims), tuple(weights), validate), validate)


def pinching(projections: Sequence, validate: bool = True) -> Pinching:
    return _finish(Pinching(tuple(projections), validate), validate)


def identity_map(n: int) -> Compression:
    return Compression(n, tuple(range(n)), False)


def map_from_dict(obj: dict) -> PositiveLinearMap:
    """Build a map from its JSON description (see :func:`map_to_dict`)."""
    kind = obj.get("kind")
    if kind == "compression":
        return compression(int(obj["in_dim"]), obj["indices"])
    if kind == "kraus":
        return kraus_map([matrix_from_json(C, square=False) for C in obj["factors"]], bool(obj.get("unital", True)))
    if kind == "dsavg":
        return direct_sum_average(obj["block_dims"], obj.get("weights"))
    if kind == "pinching":
        return pinching([matrix_from_json(P) for P in obj["projections"]])
    raise ValueError(f"unknown map kind {kind!r}")


def map_to_dict(m: PositiveLinearMap) -> dict:
    if isinstance(m, Compression):
        return {"kind": "compression", "in_dim": m.in_dim, "indices": list(m.indices)}
    if isinstance(m, Kraus):
        return {"kind": "kraus", "unital": m.unital, "factors": [matrix_to_json(C) for C in m.factors]}
    if isinstance(m, DirectSumAverage):
        return {"kind": "dsavg", "block_dims": list(m.block_dims), "weights": list(m.weights)}
    if isinstance(m, Pinching):
        return {"kind": "pinching", "projections": [matrix_to_json(P) for P in m.projections]}
    raise TypeError(type(m))


# ---------------------------------------------------------------------------
# Finite fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OperatorField:
    """Finite weighted family {(μ_t, A_t)}; integrals become weighted sums."""

    weights: tuple[float, ...]
    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        mats = tuple(hermitian(A) for A in self.matrices)
        if not mats:
            raise ValueError("operator field is empty")
        if len(w) != len(mats):
            raise DimensionError("weights and matrices differ in length")
        if any(not (math.isfinite(x) and x > 0) for x in w):
            raise ValueError(f"weights must be positive and finite, got {w}")
        if len({A.shape for A in mats}) != 1:
            raise DimensionError("field members must share one dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, np.ndarray]]) -> "OperatorField":
        pairs = list(pairs)
        return cls(tuple(w for w, _ in pairs), tuple(A for _, A in pairs))

    @classmethod
    def single(cls, A, weight: float = 1.0) -> "OperatorField":
        return cls((weight,), (A,))

    def __len__(self) -> int:
        return len(self.matrices)

    def __iter__(self):
        return iter(zip(self.weights, self.matrices))

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def integrate(self) -> np.ndarray:
        return integrate_field(self)

    def scaled(self, c: float) -> "OperatorField":
        """Same weights, every member multiplied by ``c``."""
        return OperatorField(self.weights, tuple(c * A for A in self.matrices))

    def map(self, fn) -> "OperatorField":
        return OperatorField(self.weights, tuple(fn(A) for A in self.matrices))

    def require_strictly_positive(self, floor: float = DEFAULT_FLOOR) -> None:
        for t, A in enumerate(self.matrices):
            lo = eigvalsh(A)[0]
            if lo <= floor:
                raise NotPositiveError(f"field member {t} is not strictly positive (min eigenvalue {lo:.3e})")


def integrate_field(F: OperatorField) -> np.ndarray:
    """Σ_t μ_t A_t."""
    return symmetrize(sum(w * A for w, A in F))


@dataclass(frozen=True, eq=False)
class MapField:
    """Finite weighted family {(μ_t, Φ_t)} with common input and output dimensions.

    ``unital=True`` asserts Σ μ_t Φ_t(I) = I.
    """

    weights: tuple[float, ...]
    maps: tuple[PositiveLinearMap, ...]
    unital: bool = True

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not self.maps or len(w) != len(self.maps):
            raise DimensionError("map field needs equally many weights and maps (at least one)")
        if any(not (math.isfinite(x) and x > 0) for x in w):
            raise ValueError(f"weights must be positive and finite, got {w}")
        if len({(m.in_dim, m.out_dim) for m in self.maps}) != 1:
            raise DimensionError("maps in a field must share input and output dimensions")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.unital:
            err = float(np.max(np.abs(self.image_of_identity() - np.eye(self.out_dim))))
            if err > UNITAL_TOL:
                raise NotUnitalError(f"Σ μ_t Φ_t(I) deviates from I by {err:.3e}")

    def __len__(self) -> int:
        return len(self.maps)

    @property
    def in_dim(self) -> int:
        return self.maps[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.maps[0].out_dim

    def image_of_identity(self) -> np.ndarray:
        return symmetrize(sum(w * m(np.eye(m.in_dim)) for w, m in zip(self.weights, self.maps)))

    def apply(self, F: OperatorField) -> np.ndarray:
        """Σ_t μ_t Φ_t(A_t) for a field of the same length."""
        if len(F) != len(self):
            raise DimensionError(f"field has {len(F)} points, map field has {len(self)}")
        return symmetrize(sum(w * m(A) for w, m, A in zip(self.weights, self.maps, F.matrices)))

    def apply_pointwise(self, F: OperatorField) -> OperatorField:
        """The field (μ_t, Φ_t(A_t)); integrating it gives :meth:`apply`."""
        return OperatorField(self.weights, tuple(m(A) for m, A in zip(self.maps, F.matrices)))


def apply_map(phi: PositiveLinearMap, A) -> np.ndarray:
    return phi(A)


# ---------------------------------------------------------------------------
# Unitary dilation of an isometry
# ---------------------------------------------------------------------------


def check_isometry(C, tol: float = UNITAL_TOL) -> np.ndarray:
    C = np.atleast_2d(np.asarray(C))
    if C.ndim != 2 or C.shape[0] < C.shape[1]:
        raise NotIsometryError(f"an isometry must be tall, got shape {C.shape}")
    err = float(np.max(np.abs(C.conj().T @ C - np.eye(C.shape[1]))))
    if err > tol:
        raise NotIsometryError(f"C^*C deviates from I by {err:.3e}")
    return C


def dilation_pair(C) -> tuple[np.ndarray, np.ndarray]:
    """Unitaries U, V on C^n ⊕ C^m built from an isometry C (n x m).

    With D = (I - C C^*)^{1/2} = I - C C^* (a projection, hence its own square root)::

        U = [[C, D], [0, -C^*]],   V = [[C, -D], [0, C^*]]

    so that for X = A ⊕ B (A n x n, B m x m) the average (U^*XU + V^*XV)/2 is
    the block-diagonal matrix diag(C^*AC, DAD + CBC^*).
    """
    C = check_isometry(C)
    n, m = C.shape
    # taking sqrt_psd here would turn O(eps) rounding into O(sqrt(eps)) errors
    D = symmetrize(np.eye(n) - C @ C.conj().T)
    Z = np.zeros((m, m), dtype=np.result_type(C, D))
    U = np.block([[C, D], [Z, -C.conj().T]])
    V = np.block([[C, -D], [Z, C.conj().T]])
    return U, V


def dilated_average(A, C, B=None) -> np.ndarray:
    """(U^*XU + V^*XV)/2 for X = A ⊕ B; ``B`` defaults to the m x m identity."""
    C = check_isometry(C)
    A = as_square(A)
    if B is None:
        B = np.eye(C.shape[1])
    X = direct_sum(A, B)
    U, V = dilation_pair(C)
    return symmetrize((U.conj().T @ X @ U + V.conj().T @ X @ V) / 2)
