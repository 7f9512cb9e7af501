"""Seeded random generators for matrices, isometries, maps and fields.

Every function takes an explicit ``numpy.random.Generator``; nothing here
touches global random state.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .linalg import inv_sqrt, symmetrize
from .maps import (
    Compression,
    DirectSumAverage,
    Kraus,
    MapField,
    OperatorField,
    Pinching,
    PositiveLinearMap,
)

MAP_KINDS = ("compression", "kraus", "dsavg", "pinching")


def complex_normal(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian entries (E|z|^2 = 1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_spd(dim: int, rng: np.random.Generator) -> np.ndarray:
    """G^*G + εI with complex Gaussian G and ε = 1e-3·dim."""
    if dim < 1:
        raise DimensionError("dim must be >= 1")
    G = complex_normal((dim, dim), rng)
    return symmetrize(G.conj().T @ G + 1e-3 * dim * np.eye(dim))


def random_psd(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """G^*G with G of shape (rank, dim); rank defaults to dim."""
    G = complex_normal((rank or dim, dim), rng)
    return symmetrize(G.conj().T @ G)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    return symmetrize(complex_normal((dim, dim), rng))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR with phase correction."""
    Q, R = np.linalg.qr(complex_normal((dim, dim), rng))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_isometry(in_dim: int, out_dim: int, rng: np.random.Generator) -> np.ndarray:
    """in_dim x out_dim matrix with orthonormal columns."""
    if out_dim > in_dim:
        raise DimensionError(f"no isometry from dimension {out_dim} into {in_dim}")
    if out_dim < 1:
        raise DimensionError("out_dim must be >= 1")
    return random_unitary(in_dim, rng)[:, :out_dim]


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    x = complex_normal(dim, rng)
    return x / np.linalg.norm(x)


def normalize_kraus(factors: list[np.ndarray], total_weight: float = 1.0) -> list[np.ndarray]:
    """Rescale factors so that Σ C_i^* C_i = total_weight · I (C_i ← C_i S^{-1/2})."""
    S = sum(C.conj().T @ C for C in factors) / total_weight
    R = inv_sqrt(S, floor=0.0)
    return [C @ R for C in factors]


def random_unital_kraus(dim: int, count: int, rng: np.random.Generator, out_dim: int | None = None) -> list[np.ndarray]:
    """``count`` factors of shape (dim, out_dim) with Σ C_i^* C_i = I."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out_dim = dim if out_dim is None else out_dim
    return normalize_kraus([complex_normal((dim, out_dim), rng) for _ in range(count)])


def random_projections(dim: int, rng: np.random.Generator, parts: int | None = None) -> list[np.ndarray]:
    """Orthogonal projections onto a random partition of a random orthonormal basis."""
    parts = parts or int(rng.integers(1, dim + 1))
    U = random_unitary(dim, rng)
    cuts = np.sort(rng.choice(np.arange(1, dim), size=parts - 1, replace=False)) if parts > 1 else []
    groups = np.split(np.arange(dim), cuts)
    return [symmetrize(U[:, g] @ U[:, g].conj().T) for g in groups]


def random_map(kind: str, rng: np.random.Generator, dim: int, out_dim: int | None = None) -> PositiveLinearMap:
    """A random unital map of the given kind producing ``dim``-sized outputs.

    Input dimensions: compression ``dim + k`` (k ∈ 0..2), kraus ``dim``
    (``out_dim`` may be smaller), dsavg ``b·dim`` for b ∈ 2..3 blocks,
    pinching ``dim``.
    """
    if kind == "compression":
        n = dim + int(rng.integers(0, 3))
        idx = np.sort(rng.choice(n, size=dim, replace=False))
        return Compression(n, tuple(idx), False)
    if kind == "kraus":
        count = int(rng.integers(1, 4))
        return Kraus(tuple(random_unital_kraus(dim, count, rng, out_dim)), True, False)
    if kind == "dsavg":
        b = int(rng.integers(2, 4))
        w = rng.uniform(0.2, 1.0, size=b)
        return DirectSumAverage((dim,) * b, tuple(w / w.sum()), False)
    if kind == "pinching":
        return Pinching(tuple(random_projections(dim, rng)), False)
    raise ValueError(f"unknown map kind {kind!r}")


def random_field(dim: int, length: int, rng: np.random.Generator, weights=None) -> OperatorField:
    """Field of ``length`` random strictly positive matrices; weights uniform in [0.2, 1] unless given."""
    if weights is None:
        weights = rng.uniform(0.2, 1.0, size=length)
    return OperatorField(tuple(weights), tuple(random_spd(dim, rng) for _ in range(length)))


def random_unital_map_field(kind: str, length: int, rng: np.random.Generator, dim: int) -> MapField:
    """Unital map field whose inputs and outputs are ``dim``-sized (kraus: jointly normalized)."""
    w = rng.uniform(0.2, 1.0, size=length)
    if kind == "kraus":
        counts = rng.integers(1, 3, size=length)
        raw = [[complex_normal((dim, dim), rng) for _ in range(c)] for c in counts]
        flat = [np.sqrt(wt) * C for wt, facs in zip(w, raw) for C in facs]
        S = sum(C.conj().T @ C for C in flat)
        R = inv_sqrt(S, floor=0.0)
        maps = tuple(Kraus(tuple(C @ R for C in facs), False, False) for facs in raw)
        return MapField(tuple(w), maps)
    w = w / w.sum()
    if kind == "compression":
        n = dim + int(rng.integers(0, 3))
        maps = tuple(Compression(n, tuple(np.sort(rng.choice(n, size=dim, replace=False))), False) for _ in range(length))
    elif kind == "dsavg":
        b = int(rng.integers(2, 4))
        maps = []
        for _ in range(length):
            v = rng.uniform(0.2, 1.0, size=b)
            maps.append(DirectSumAverage((dim,) * b, tuple(v / v.sum()), False))
        maps = tuple(maps)
    elif kind == "pinching":
        maps = tuple(Pinching(tuple(random_projections(dim, rng)), False) for _ in range(length))
    else:
        raise ValueError(f"unknown map kind {kind!r}")
    return MapField(tuple(w), maps)
