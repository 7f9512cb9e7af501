"""The non-commutative f-divergence Θ over finite fields, and the inequalities it satisfies.

For fields Ã = (μ_t, A_t), B̃ = (μ_t, B_t) sharing one weight vector::

    Θ(Ã, B̃) = Σ_t μ_t · B_t^{1/2} f(B_t^{-1/2} A_t B_t^{-1/2}) B_t^{1/2}

Every ``*_check`` function returns a :class:`~loewner_lab.linalg.LoewnerVerdict`
for ``lhs <= rhs`` (never a bare boolean), except the scalar
:func:`quadratic_form_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotPositiveError, NotUnitalError
from .functions import ScalarFunction
from .linalg import DEFAULT_FLOOR, DEFAULT_REL_TOL, LoewnerVerdict, congruence, inv, loewner_compare, symmetrize
from .maps import MapField, OperatorField, integrate_field
from .means import mean_arithmetic, mean_geometric, perspective, scalar_perspective


def _match(*fields: OperatorField) -> None:
    first = fields[0]
    for F in fields[1:]:
        if len(F) != len(first):
            raise DimensionError(f"fields differ in length: {len(first)} vs {len(F)}")
        if F.dim != first.dim:
            raise DimensionError(f"fields differ in dimension: {first.dim} vs {F.dim}")
        if not np.allclose(F.weights, first.weights, rtol=1e-12, atol=0.0):
            raise DimensionError("fields in one comparison must share their weights")


def theta(f: ScalarFunction, FA: OperatorField, FB: OperatorField, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Θ(Ã, B̃) = Σ_t μ_t g(A_t, B_t) with g the perspective of ``f``."""
    _match(FA, FB)
    terms = [w * perspective(f, A, B, floor) for w, A, B in zip(FA.weights, FA.matrices, FB.matrices)]
    return symmetrize(sum(terms))


def field_nabla(F: OperatorField, G: OperatorField) -> OperatorField:
    """Pointwise midpoint (A_t + C_t)/2 with the shared weights."""
    _match(F, G)
    return OperatorField(F.weights, tuple(mean_arithmetic(A, C) for A, C in zip(F.matrices, G.matrices)))


def theta_first_arg_logconvex_gap(
    f: ScalarFunction, FA: OperatorField, FC: OperatorField, FB: OperatorField, rel_tol: float = DEFAULT_REL_TOL
) -> LoewnerVerdict:
    """Θ(Ã∇C̃, B̃) <= Θ(Ã, B̃) ♯ Θ(C̃, B̃): log-convexity of Θ in its first argument."""
    _match(FA, FC, FB)
    lhs = theta(f, field_nabla(FA, FC), FB)
    rhs = mean_geometric(theta(f, FA, FB), theta(f, FC, FB))
    return loewner_compare(lhs, rhs, rel_tol=rel_tol)


def theta_mixed_check(
    f: ScalarFunction,
    FA: OperatorField,
    FC: OperatorField,
    FB: OperatorField,
    FD: OperatorField,
    rel_tol: float = DEFAULT_REL_TOL,
) -> LoewnerVerdict:
    """Θ(Ã∇C̃, B̃∇D̃) <= (Θ(Ã,B̃) ∇ Θ(Ã,D̃)) ♯ (Θ(C̃,B̃) ∇ Θ(C̃,D̃))."""
    _match(FA, FC, FB, FD)
    lhs = theta(f, field_nabla(FA, FC), field_nabla(FB, FD))
    left = mean_arithmetic(theta(f, FA, FB), theta(f, FA, FD))
    right = mean_arithmetic(theta(f, FC, FB), theta(f, FC, FD))
    return loewner_compare(lhs, mean_geometric(left, right), rel_tol=rel_tol)


def theta_joint_convexity_check(
    f: ScalarFunction,
    FA: OperatorField,
    FB: OperatorField,
    FC: OperatorField,
    FD: OperatorField,
    rel_tol: float = DEFAULT_REL_TOL,
) -> LoewnerVerdict:
    """Θ(Ã∇C̃, B̃∇D̃) <= (Θ(Ã,B̃) + Θ(C̃,D̃)) / 2 (midpoint joint convexity, f operator convex)."""
    _match(FA, FB, FC, FD)
    lhs = theta(f, field_nabla(FA, FC), field_nabla(FB, FD))
    rhs = mean_arithmetic(theta(f, FA, FB), theta(f, FC, FD))
    return loewner_compare(lhs, rhs, rel_tol=rel_tol)


def perspective_cdj_check(
    f: ScalarFunction,
    MF: MapField,
    FA: OperatorField,
    FC: OperatorField,
    FB: OperatorField,
    rel_tol: float = DEFAULT_REL_TOL,
) -> LoewnerVerdict:
    """Jensen-type inequality for perspectives under a unital map field::

        g(Σ μ_t Φ_t(A_t∇C_t), Σ μ_t Φ_t(B_t)) <= (Σ μ_t Φ_t(g(A_t,B_t))) ♯ (Σ μ_t Φ_t(g(C_t,B_t)))
    """
    if not MF.unital:
        raise NotUnitalError("the map field must be unital")
    _match(FA, FC, FB)
    if len(FA) != len(MF):
        raise DimensionError(f"map field has {len(MF)} points, operator fields have {len(FA)}")
    if not np.allclose(MF.weights, FA.weights, rtol=1e-12, atol=0.0):
        raise DimensionError("map field and operator fields must share their weights")
    mid = field_nabla(FA, FC)
    lhs = perspective(f, MF.apply(mid), MF.apply(FB))
    gA = OperatorField(FA.weights, tuple(perspective(f, A, B) for A, B in zip(FA.matrices, FB.matrices)))
    gC = OperatorField(FA.weights, tuple(perspective(f, C, B) for C, B in zip(FC.matrices, FB.matrices)))
    rhs = mean_geometric(MF.apply(gA), MF.apply(gC))
    return loewner_compare(lhs, rhs, rel_tol=rel_tol)


def cauchy_schwarz_means_check(FA: OperatorField, FB: OperatorField, rel_tol: float = DEFAULT_REL_TOL) -> LoewnerVerdict:
    """Σ μ_t (A_t ♯ B_t) <= (Σ μ_t A_t) ♯ (Σ μ_t B_t)."""
    _match(FA, FB)
    lhs = symmetrize(sum(w * mean_geometric(A, B) for w, A, B in zip(FA.weights, FA.matrices, FB.matrices)))
    rhs = mean_geometric(integrate_field(FA), integrate_field(FB))
    return loewner_compare(lhs, rhs, rel_tol=rel_tol)


@dataclass(frozen=True)
class ScalarVerdict:
    """Outcome of a scalar inequality ``lhs <= rhs``; ``slack = rhs - lhs``."""

    holds: bool
    lhs: float
    rhs: float
    tolerance: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {"holds": self.holds, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "tolerance": self.tolerance}


def _scalar_verdict(lhs: float, rhs: float, rel_tol: float) -> ScalarVerdict:
    tol = rel_tol * (1.0 + max(abs(lhs), abs(rhs)))
    return ScalarVerdict(rhs - lhs >= -tol, lhs, rhs, tol)


def _qform(M, x) -> float:
    val = np.vdot(x, M @ x)
    return float(val.real)


def _unit(x) -> np.ndarray:
    x = np.asarray(x).reshape(-1)
    if abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError(f"x must be a unit vector (norm {np.linalg.norm(x):.15g})")
    return x


def quadratic_form_check(f: ScalarFunction, A, C, B, x, rel_tol: float = DEFAULT_REL_TOL) -> ScalarVerdict:
    """g(<(A+C)/2 x, x>, <Bx, x>) <= sqrt(<g(A,B)x, x> <g(C,B)x, x>) for a unit vector x.

    On scalars g is b·f(a/b).
    """
    x = _unit(x)
    a = _qform(mean_arithmetic(A, C), x)
    b = _qform(B, x)
    p, q = _qform(perspective(f, A, B), x), _qform(perspective(f, C, B), x)
    if min(a, b, p, q) <= 0:
        raise NotPositiveError("quadratic forms must be strictly positive")
    return _scalar_verdict(scalar_perspective(f, a, b), math.sqrt(p * q), rel_tol)


def quadratic_form_inverse_chain(A, C, B, x, rel_tol: float = DEFAULT_REL_TOL) -> tuple[ScalarVerdict, ScalarVerdict]:
    """f(t) = 1/t instance of :func:`quadratic_form_check`, extended by AM-GM::

        <Bx,x>^2 / <(A+C)/2 x,x> <= sqrt(<BA^{-1}Bx,x> <BC^{-1}Bx,x>) <= <B (A^{-1}+C^{-1})/2 B x,x>
    """
    x = _unit(x)
    b = _qform(B, x)
    lhs = b * b / _qform(mean_arithmetic(A, C), x)
    p = _qform(congruence(B, inv(A)), x)
    q = _qform(congruence(B, inv(C)), x)
    mid = math.sqrt(p * q)
    rhs = _qform(congruence(B, mean_arithmetic(inv(A), inv(C))), x)
    return _scalar_verdict(lhs, mid, rel_tol), _scalar_verdict(mid, rhs, rel_tol)


def inverse_perspective_chain(phi, A, C, B, rel_tol: float = DEFAULT_REL_TOL) -> dict[str, LoewnerVerdict]:
    """Specialisations of the perspective Jensen inequality to f(t) = 1/t.

    Keys:

    ``congruence_form``
        Φ(B)Φ(A∇C)^{-1}Φ(B) <= Φ(BA^{-1}B) ♯ Φ(BC^{-1}B)
    ``normalized``
        Φ(A∇C)^{-1} <= (Φ(B)^{-1}Φ(BA^{-1}B)Φ(B)^{-1}) ♯ (Φ(B)^{-1}Φ(BC^{-1}B)Φ(B)^{-1})
    ``sharp_vs_mean_1``, ``sharp_vs_mean_2``
        Φ(A∇C)^{-1} <= Φ(A^{-1}) ♯ Φ(C^{-1}) <= (Φ(A^{-1}) + Φ(C^{-1}))/2
    ``convexity_chain_1``, ``convexity_chain_2``
        Φ(A∇C)^{-1} <= (Φ(A)^{-1} + Φ(C)^{-1})/2 <= (Φ(A^{-1}) + Φ(C^{-1}))/2
    """
    pB = phi(B)
    pB_inv = inv(pB)
    p_mid_inv = inv(phi(mean_arithmetic(A, C)))
    pa = phi(congruence(B, inv(A)))
    pc = phi(congruence(B, inv(C)))
    pAi, pCi = phi(inv(A)), phi(inv(C))
    return {
        "congruence_form": loewner_compare(congruence(pB, p_mid_inv), mean_geometric(pa, pc), rel_tol=rel_tol),
        "normalized": loewner_compare(
            p_mid_inv, mean_geometric(congruence(pB_inv, pa), congruence(pB_inv, pc)), rel_tol=rel_tol
        ),
        "sharp_vs_mean_1": loewner_compare(p_mid_inv, mean_geometric(pAi, pCi), rel_tol=rel_tol),
        "sharp_vs_mean_2": loewner_compare(mean_geometric(pAi, pCi), mean_arithmetic(pAi, pCi), rel_tol=rel_tol),
        "convexity_chain_1": loewner_compare(p_mid_inv, mean_arithmetic(inv(phi(A)), inv(phi(C))), rel_tol=rel_tol),
        "convexity_chain_2": loewner_compare(mean_arithmetic(inv(phi(A)), inv(phi(C))), mean_arithmetic(pAi, pCi), rel_tol=rel_tol),
    }
