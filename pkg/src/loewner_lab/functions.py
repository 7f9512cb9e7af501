"""Positive scalar functions on (0, ∞) and the spectral functional calculus.

A :class:`ScalarFunction` carries *claims* about its operator-theoretic class
(operator monotone, decreasing, convex, log-convex). Claims are metadata that
the verification harness tests; nothing in the library trusts them.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NotPositiveError, ParseError
from .linalg import DEFAULT_FLOOR, spectral_apply

OPERATOR_MONOTONE = "operator_monotone"
OPERATOR_DECREASING = "operator_decreasing"
OPERATOR_CONVEX = "operator_convex"
OPERATOR_LOG_CONVEX = "operator_log_convex"
ALL_CLAIMS = frozenset({OPERATOR_MONOTONE, OPERATOR_DECREASING, OPERATOR_CONVEX, OPERATOR_LOG_CONVEX})

#: Log-spaced grid on which positivity is checked at construction.
POSITIVITY_GRID = np.logspace(-6, 6, 241)

FAMILIES = ("power", "inverse", "exp", "negexp", "logshift", "affine", "custom")


@dataclass(frozen=True)
class ScalarFunction:
    """A named positive function on (0, ∞).

    Use the factory functions (:func:`power`, :func:`inverse`, ...) rather than
    the constructor. Calling the object evaluates it elementwise on arrays.
    """

    family: str
    params: tuple[float, ...] = ()
    claims: frozenset[str] = frozenset()
    label: str | None = None
    fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False, repr=False)
    positive_on_grid: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown function family {self.family!r}")
        unknown = set(self.claims) - ALL_CLAIMS
        if unknown:
            raise ValueError(f"unknown claims {sorted(unknown)}")
        if self.family == "custom":
            if self.fn is None:
                raise ValueError("custom functions need a callable")
            with np.errstate(all="ignore"):
                vals = np.asarray(self.fn(POSITIVITY_GRID), dtype=float)
            object.__setattr__(self, "positive_on_grid", bool(np.all(np.isfinite(vals) & (vals > 0))))
        elif self.family in ("logshift", "affine"):
            # power/exp families are positive analytically and may overflow on the grid
            with np.errstate(all="ignore"):
                vals = self._named(POSITIVITY_GRID)
            if not np.all(np.isfinite(vals) & (vals > 0)):
                raise NotPositiveError(f"{self.spec} is not strictly positive on (0, ∞)")

    def _named(self, t: np.ndarray) -> np.ndarray:
        fam, p = self.family, self.params
        if fam == "power":
            return np.power(t, p[0])
        if fam == "inverse":
            return 1.0 / t
        if fam == "exp":
            return np.exp(t)
        if fam == "negexp":
            return np.exp(-t)
        if fam == "logshift":
            return np.log(t + p[0])
        if fam == "affine":
            return p[0] * t + p[1]
        raise AssertionError(fam)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "custom":
            return np.asarray(self.fn(t), dtype=float)
        return self._named(t)

    def has(self, claim: str) -> bool:
        return claim in self.claims

    @property
    def spec(self) -> str:
        """Spec string understood by :func:`parse_function` (custom: its label)."""
        if self.family in ("inverse", "exp", "negexp"):
            return self.family
        if self.family == "power":
            return f"power:{_fmt(self.params[0])}"
        if self.family == "logshift":
            return f"logshift:{_fmt(self.params[0])}"
        if self.family == "affine":
            return f"affine:{_fmt(self.params[0])},{_fmt(self.params[1])}"
        return self.label or "custom"

    def __str__(self) -> str:
        return self.spec


def _fmt(x: float) -> str:
    return repr(float(x))


def _power_claims(p: float) -> frozenset[str]:
    claims = set()
    if -1.0 <= p <= 0.0:
        claims |= {OPERATOR_DECREASING, OPERATOR_LOG_CONVEX, OPERATOR_CONVEX}
    if 0.0 <= p <= 1.0:
        claims.add(OPERATOR_MONOTONE)
    if 1.0 <= p <= 2.0:
        claims.add(OPERATOR_CONVEX)
    return frozenset(claims)


def power(p: float) -> ScalarFunction:
    """t ↦ t^p."""
    p = float(p)
    return ScalarFunction("power", (p,), _power_claims(p))


def inverse() -> ScalarFunction:
    """t ↦ 1/t."""
    return ScalarFunction("inverse", (), _power_claims(-1.0))


def exp() -> ScalarFunction:
    return ScalarFunction("exp")


def negexp() -> ScalarFunction:
    """t ↦ e^{-t}: positive and decreasing, but not operator decreasing."""
    return ScalarFunction("negexp")


def logshift(c: float) -> ScalarFunction:
    """t ↦ log(t + c); positive on (0, ∞) only for c >= 1."""
    c = float(c)
    if c <= 0:
        raise ValueError("logshift needs c > 0")
    return ScalarFunction("logshift", (c,), frozenset({OPERATOR_MONOTONE}))


def affine(a: float, b: float) -> ScalarFunction:
    """t ↦ a t + b with a, b >= 0 (not both zero)."""
    a, b = float(a), float(b)
    if a < 0 or b < 0:
        raise ValueError("affine needs a >= 0 and b >= 0")
    claims = {OPERATOR_MONOTONE, OPERATOR_CONVEX}
    if a == 0:
        claims |= {OPERATOR_DECREASING, OPERATOR_LOG_CONVEX}
    return ScalarFunction("affine", (a, b), frozenset(claims))


def custom(fn: Callable[[np.ndarray], np.ndarray], label: str = "custom", claims=()) -> ScalarFunction:
    """Wrap a vectorised callable.

    The callable must be safe to call from several threads at once. It is not
    rejected when it fails the positivity grid check, but such functions
    cannot be applied to matrices.
    """
    return ScalarFunction("custom", (), frozenset(claims), label=label, fn=fn)


def logarithmic_mean_function() -> ScalarFunction:
    """h(t) = (t - 1) / log t, the representing function of the logarithmic mean."""

    def h(t):
        t = np.asarray(t, dtype=float)
        d = t - 1.0
        near = np.abs(d) < 1e-6
        safe = np.where(near, 2.0, t)
        out = np.where(near, 1.0 + d / 2.0 - d * d / 12.0, (safe - 1.0) / np.log(safe))
        return out

    return custom(h, "logmean", claims=(OPERATOR_MONOTONE,))


def eval_function(f: ScalarFunction, t: float) -> float:
    """f(t) for a single positive argument."""
    if not t > 0:
        raise ValueError(f"argument must be positive, got {t}")
    val = float(f(np.array([t]))[0])
    if not val > 0 or not math.isfinite(val):
        raise NotPositiveError(f"{f} returned {val} at t={t}")
    return val


def apply_function(f: ScalarFunction, A, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """f(A) by the spectral calculus, for strictly positive Hermitian ``A``."""
    if f.family == "custom" and not f.positive_on_grid:
        raise NotPositiveError(f"{f} failed the positivity grid check")

    def values(w):
        out = f(w)
        if not np.all(out > 0):
            raise NotPositiveError(f"{f} is not positive on the spectrum {w}")
        return out

    return spectral_apply(A, values, floor)


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_SPEC_RE = re.compile(rf"^\s*([a-z]+)\s*(?::\s*({_NUM})\s*(?:,\s*({_NUM})\s*)?)?$")


def parse_function(spec: str) -> ScalarFunction:
    """Parse ``power:-0.5``, ``inverse``, ``exp``, ``negexp``, ``logshift:1.0``, ``affine:a,b``."""
    m = _SPEC_RE.match(spec)
    if not m:
        raise ParseError(f"malformed function spec {spec!r}", 0)
    name, a, b = m.groups()
    nargs = (a is not None) + (b is not None)
    want = {"power": 1, "inverse": 0, "exp": 0, "negexp": 0, "logshift": 1, "affine": 2}
    if name not in want:
        raise ParseError(f"unknown function {name!r}", 0)
    if nargs != want[name]:
        raise ParseError(f"{name} takes {want[name]} parameter(s), got {nargs}", len(name))
    if name == "power":
        return power(float(a))
    if name == "logshift":
        return logshift(float(a))
    if name == "affine":
        return affine(float(a), float(b))
    return {"inverse": inverse, "exp": exp, "negexp": negexp}[name]()
