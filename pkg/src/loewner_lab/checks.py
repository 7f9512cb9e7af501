"""Single-instance encodings of the operator log-convexity inequalities.

Each function evaluates both sides on concrete matrices and returns a
:class:`LoewnerVerdict` (or a tuple of them, one per link of a chain) for
``lhs <= rhs``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionError, NotUnitalError, ProvisoError
from .functions import ScalarFunction, apply_function, power
from .linalg import (
    DEFAULT_FLOOR,
    DEFAULT_REL_TOL,
    LoewnerVerdict,
    as_square,
    congruence,
    direct_sum,
    eigvalsh,
    inv,
    loewner_compare,
    symmetrize,
)
from .maps import (
    UNITAL_TOL,
    PositiveLinearMap,
    check_isometry,
    dilated_average,
    dilation_pair,
    direct_sum_average,
)
from .means import Mean, mean_arithmetic, mean_geometric

Chain = tuple[LoewnerVerdict, ...]


def check_log_convex_def(f: ScalarFunction, A, B, rel_tol: float = DEFAULT_REL_TOL) -> LoewnerVerdict:
    """f(A∇B) <= f(A) ♯ f(B)."""
    lhs = apply_function(f, mean_arithmetic(A, B))
    return loewner_compare(lhs, mean_geometric(apply_function(f, A), apply_function(f, B)), rel_tol=rel_tol)


def check_mean_variant(f: ScalarFunction, sigma: Mean, A, B, rel_tol: float = DEFAULT_REL_TOL) -> LoewnerVerdict:
    """f(A∇B) <= f(A) σ f(B) for a mean ``sigma`` (a callable of two matrices)."""
    lhs = apply_function(f, mean_arithmetic(A, B))
    return loewner_compare(lhs, sigma(apply_function(f, A), apply_function(f, B)), rel_tol=rel_tol)


def check_operator_decreasing(f: ScalarFunction, A, B, rel_tol: float = DEFAULT_REL_TOL) -> LoewnerVerdict:
    """f(B) <= f(A), for a pair the caller built with A <= B."""
    return loewner_compare(apply_function(f, B), apply_function(f, A), rel_tol=rel_tol)


def _isometry_sides(f: ScalarFunction, A, C, floor: float):
    A = as_square(A)
    C = check_isometry(C)
    if C.shape[0] != A.shape[0]:
        raise DimensionError(f"isometry rows {C.shape[0]} != dimension of A {A.shape[0]}")
    fa = apply_function(f, A)
    middle_inv = congruence(C, inv(fa))
    lo = eigvalsh(middle_inv)[0]
    if lo <= floor:
        raise ProvisoError(f"C^* f(A)^{{-1}} C is not invertible (min eigenvalue {lo:.3e})")
    lhs = apply_function(f, congruence(C, A))
    return lhs, inv(middle_inv, floor=0.0), congruence(C, fa)


def check_isometry_jensen(f: ScalarFunction, A, C, rel_tol: float = DEFAULT_REL_TOL, floor: float = DEFAULT_FLOOR) -> LoewnerVerdict:
    """f(C^*AC) <= (C^* f(A)^{-1} C)^{-1} for an isometry C.

    Raises :class:`ProvisoError` when C^* f(A)^{-1} C is singular.
    """
    lhs, mid, _ = _isometry_sides(f, A, C, floor)
    return loewner_compare(lhs, mid, rel_tol=rel_tol)


def check_isometry_sandwich(f: ScalarFunction, A, C, rel_tol: float = DEFAULT_REL_TOL, floor: float = DEFAULT_FLOOR) -> Chain:
    """f(C^*AC) <= (C^* f(A)^{-1} C)^{-1} <= C^* f(A) C."""
    lhs, mid, rhs = _isometry_sides(f, A, C, floor)
    return loewner_compare(lhs, mid, rel_tol=rel_tol), loewner_compare(mid, rhs, rel_tol=rel_tol)


def dilation_oracle(f: ScalarFunction, A, C, B=None) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the isometry bound computed through the 2x2 unitary dilation.

    Returns the top-left blocks of f((U^*XU + V^*XV)/2) and of
    ((U^* f(X)^{-1} U + V^* f(X)^{-1} V)/2)^{-1} with X = A ⊕ B. They equal
    f(C^*AC) and (C^* f(A)^{-1} C)^{-1} respectively.
    """
    C = check_isometry(C)
    m = C.shape[1]
    if B is None:
        B = np.eye(m)
    left = apply_function(f, dilated_average(A, C, B))[:m, :m]
    U, V = dilation_pair(C)
    fx_inv = inv(apply_function(f, direct_sum(A, B)))
    avg = symmetrize((U.conj().T @ fx_inv @ U + V.conj().T @ fx_inv @ V) / 2)
    right = inv(avg)[:m, :m]
    return symmetrize(left), symmetrize(right)


def check_multi_isometry(
    f: ScalarFunction, As: Sequence, Cs: Sequence, rel_tol: float = DEFAULT_REL_TOL, floor: float = DEFAULT_FLOOR
) -> LoewnerVerdict:
    """f(Σ C_i^* A_i C_i) <= (Σ C_i^* f(A_i)^{-1} C_i)^{-1} when Σ C_i^* C_i = I."""
    if len(As) != len(Cs) or not As:
        raise DimensionError("need equally many matrices and coefficients (at least one)")
    Cs = [np.atleast_2d(np.asarray(C)) for C in Cs]
    m = Cs[0].shape[1]
    err = float(np.max(np.abs(sum(C.conj().T @ C for C in Cs) - np.eye(m))))
    if err > UNITAL_TOL:
        raise NotUnitalError(f"Σ C_i^* C_i deviates from I by {err:.3e}")
    lhs = apply_function(f, symmetrize(sum(congruence(C, A) for A, C in zip(As, Cs))))
    mid = symmetrize(sum(congruence(C, inv(apply_function(f, A))) for A, C in zip(As, Cs)))
    if eigvalsh(mid)[0] <= floor:
        raise ProvisoError("Σ C_i^* f(A_i)^{-1} C_i is not invertible")
    return loewner_compare(lhs, inv(mid, floor=0.0), rel_tol=rel_tol)


def _require_unital(phi: PositiveLinearMap) -> None:
    if not phi.is_unital():
        raise NotUnitalError(f"{phi.kind} map is not unital")


def sharp_cdj_sides(f: ScalarFunction, phi: PositiveLinearMap, A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(f(Φ(A)), Φ(f(A)^{-1})^{-1}, Φ(f(A)))."""
    _require_unital(phi)
    fa = apply_function(f, A)
    return apply_function(f, phi(A)), inv(phi(inv(fa))), phi(fa)


def check_sharp_cdj(f: ScalarFunction, phi: PositiveLinearMap, A, rel_tol: float = DEFAULT_REL_TOL) -> Chain:
    """f(Φ(A)) <= Φ(f(A)^{-1})^{-1} <= Φ(f(A)) for a unital positive map Φ."""
    lhs, mid, rhs = sharp_cdj_sides(f, phi, A)
    return loewner_compare(lhs, mid, rel_tol=rel_tol), loewner_compare(mid, rhs, rel_tol=rel_tol)


def check_power_chain(phi: PositiveLinearMap, A, alpha: float, rel_tol: float = DEFAULT_REL_TOL) -> Chain:
    """Power-function chains under a unital map.

    For 0 <= α <= 1:  Φ(A)^{-α} <= Φ(A^α)^{-1} <= Φ(A^{-α}).
    For α <= -1:      Φ(A^α)^{1/α} <= Φ(A^{-1})^{-1} <= Φ(A).
    """
    _require_unital(phi)
    if 0.0 <= alpha <= 1.0:
        lhs = apply_function(power(-alpha), phi(A))
        mid = inv(phi(apply_function(power(alpha), A)))
        rhs = phi(apply_function(power(-alpha), A))
    elif alpha <= -1.0:
        lhs = apply_function(power(1.0 / alpha), phi(apply_function(power(alpha), A)))
        mid = inv(phi(inv(A)))
        rhs = phi(A)
    else:
        raise ValueError(f"alpha must lie in [0, 1] or (-inf, -1], got {alpha}")
    return loewner_compare(lhs, mid, rel_tol=rel_tol), loewner_compare(mid, rhs, rel_tol=rel_tol)


def check_sum_of_maps(
    f: ScalarFunction, phis: Sequence[PositiveLinearMap], As: Sequence, rel_tol: float = DEFAULT_REL_TOL
) -> LoewnerVerdict:
    """f(Σ Φ_i(A_i)) <= (Σ Φ_i(f(A_i)^{-1}))^{-1} when Σ Φ_i(I) = I."""
    if len(phis) != len(As) or not phis:
        raise DimensionError("need equally many maps and matrices (at least one)")
    total = sum(p.image_of_identity() for p in phis)
    err = float(np.max(np.abs(total - np.eye(phis[0].out_dim))))
    if err > UNITAL_TOL:
        raise NotUnitalError(f"Σ Φ_i(I) deviates from I by {err:.3e}")
    lhs = apply_function(f, symmetrize(sum(p(A) for p, A in zip(phis, As))))
    rhs = inv(symmetrize(sum(p(inv(apply_function(f, A))) for p, A in zip(phis, As))))
    return loewner_compare(lhs, rhs, rel_tol=rel_tol)


def check_subadditivity(f: ScalarFunction, A, B, rel_tol: float = DEFAULT_REL_TOL) -> Chain:
    """f(A+B) <= f(2A)♯f(2B) <= f(A)♯f(B) <= f(A)∇f(B) <= f(A)+f(B)."""
    A, B = as_square(A), as_square(B)
    fa, fb = apply_function(f, A), apply_function(f, B)
    terms = [
        apply_function(f, symmetrize(A + B)),
        mean_geometric(apply_function(f, 2 * A), apply_function(f, 2 * B)),
        mean_geometric(fa, fb),
        mean_arithmetic(fa, fb),
        symmetrize(fa + fb),
    ]
    return tuple(loewner_compare(a, b, rel_tol=rel_tol) for a, b in zip(terms, terms[1:]))


def check_sharp_cdj_converse(f: ScalarFunction, A, B, rel_tol: float = DEFAULT_REL_TOL) -> LoewnerVerdict:
    """The sharp Jensen bound for Ψ(A⊕B) = (A+B)/2, i.e. f(A∇B) <= f(A) ! f(B).

    Holds for every operator log-convex f; a violation proves f is not.
    """
    psi = direct_sum_average([A.shape[0], A.shape[0]], validate=False)
    lhs, mid, _ = sharp_cdj_sides(f, psi, direct_sum(A, B))
    return loewner_compare(lhs, mid, rel_tol=rel_tol)

