"""Randomized verification and falsification sweeps.

A *trial* draws random operands from a per-trial seed, evaluates one
inequality (or chain) and reports whether ``lhs <= rhs`` held at the
configured tolerance. Trial seeds are derived from the campaign seed, the
check name, the dimension and the trial index, so any failure can be
replayed on its own with :func:`replay_trial`.
"""

from __future__ import annotations

import json
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import checks, divergence
from .errors import ParseError, ProvisoError
from .functions import ScalarFunction, logarithmic_mean_function, parse_function
from .linalg import DEFAULT_FLOOR, DEFAULT_REL_TOL, LoewnerVerdict
from .maps import Kraus, OperatorField
from .means import mean_arithmetic, mean_from_function, mean_geometric, mean_harmonic
from .sampling import (
    MAP_KINDS,
    random_isometry,
    random_map,
    random_psd,
    random_spd,
    random_unit_vector,
    random_unital_kraus,
    random_unital_map_field,
)

THREADS_ENV = "LOEWNER_LAB_THREADS"

TrialFn = Callable[[ScalarFunction, int, np.random.Generator, float], tuple[tuple, list[int]]]
TRIALS: dict[str, TrialFn] = {}


def _trial(name: str):
    def register(fn: TrialFn) -> TrialFn:
        TRIALS[name] = fn
        return fn

    return register


def _as_tuple(v) -> tuple:
    return v if isinstance(v, tuple) else (v,)


_LOGMEAN = mean_from_function(logarithmic_mean_function())
SYMMETRIC_MEANS = {"harmonic": mean_harmonic, "sharp": mean_geometric, "nabla": mean_arithmetic, "logmean": _LOGMEAN}


# --- single operators -----------------------------------------------------------


@_trial("log_convex_def")
def _t_log_convex(f, d, rng, tol):
    A, B = random_spd(d, rng), random_spd(d, rng)
    return (checks.check_log_convex_def(f, A, B, tol),), [d]


def _mean_trial(sigma):
    def run(f, d, rng, tol):
        A, B = random_spd(d, rng), random_spd(d, rng)
        return (checks.check_mean_variant(f, sigma, A, B, tol),), [d]

    return run


for _name, _sigma in SYMMETRIC_MEANS.items():
    _trial(f"mean_{_name}")(_mean_trial(_sigma))


@_trial("mean_every")
def _t_mean_every(f, d, rng, tol):
    A, B = random_spd(d, rng), random_spd(d, rng)
    return tuple(checks.check_mean_variant(f, s, A, B, tol) for s in SYMMETRIC_MEANS.values()), [d]


@_trial("operator_decreasing")
def _t_decreasing(f, d, rng, tol):
    A = random_spd(d, rng)
    rank = int(rng.integers(1, d + 1))
    B = A + float(rng.uniform(0.05, 2.0)) * random_psd(d, rng, rank)
    return (checks.check_operator_decreasing(f, A, B, tol),), [d]


def _isometry_operands(d, rng):
    m = int(rng.integers(1, d + 1))
    return random_spd(d, rng), random_isometry(d, m, rng), m


@_trial("isometry_jensen")
def _t_isometry(f, d, rng, tol):
    A, C, m = _isometry_operands(d, rng)
    return (checks.check_isometry_jensen(f, A, C, tol),), [d, m]


@_trial("isometry_sandwich")
def _t_sandwich(f, d, rng, tol):
    A, C, m = _isometry_operands(d, rng)
    return checks.check_isometry_sandwich(f, A, C, tol), [d, m]


@_trial("multi_isometry")
def _t_multi(f, d, rng, tol):
    Cs = random_unital_kraus(d, 3, rng)
    As = [random_spd(d, rng) for _ in Cs]
    return (checks.check_multi_isometry(f, As, Cs, tol),), [d, 3]


def _sharp_cdj_trial(kind):
    def run(f, d, rng, tol):
        phi = random_map(kind, rng, d)
        A = random_spd(phi.in_dim, rng)
        return checks.check_sharp_cdj(f, phi, A, tol), [phi.in_dim, phi.out_dim]

    return run


for _kind in MAP_KINDS:
    _trial(f"sharp_cdj_{_kind}")(_sharp_cdj_trial(_kind))


@_trial("sharp_cdj_converse")
def _t_converse(f, d, rng, tol):
    A, B = random_spd(d, rng), random_spd(d, rng)
    return (checks.check_sharp_cdj_converse(f, A, B, tol),), [2 * d, d]


def _power_trial(lo, hi):
    def run(f, d, rng, tol):
        kind = MAP_KINDS[int(rng.integers(len(MAP_KINDS)))]
        phi = random_map(kind, rng, d)
        alpha = float(rng.uniform(lo, hi))
        A = random_spd(phi.in_dim, rng)
        return checks.check_power_chain(phi, A, alpha, tol), [phi.in_dim, phi.out_dim]

    return run


_trial("power_chain_unit")(_power_trial(0.0, 1.0))
_trial("power_chain_negative")(_power_trial(-3.0, -1.0))


@_trial("sum_of_maps")
def _t_sum_of_maps(f, d, rng, tol):
    phis = [Kraus((C,), False, False) for C in random_unital_kraus(d, 3, rng)]
    As = [random_spd(d, rng) for _ in phis]
    return (checks.check_sum_of_maps(f, phis, As, tol),), [d, 3]


@_trial("subadditivity")
def _t_subadditivity(f, d, rng, tol):
    A, B = random_spd(d, rng), random_spd(d, rng)
    return checks.check_subadditivity(f, A, B, tol), [d]


# --- operator fields ------------------------------------------------------------


def _fields(count, d, rng):
    length = int(rng.integers(1, 5))
    w = tuple(rng.uniform(0.2, 1.0, size=length))
    return length, [OperatorField(w, tuple(random_spd(d, rng) for _ in range(length))) for _ in range(count)]


@_trial("cauchy_schwarz")
def _t_cauchy_schwarz(f, d, rng, tol):
    n, (FA, FB) = _fields(2, d, rng)
    return (divergence.cauchy_schwarz_means_check(FA, FB, tol),), [d, n]


@_trial("theta_first_arg")
def _t_theta_first(f, d, rng, tol):
    n, (FA, FC, FB) = _fields(3, d, rng)
    return (divergence.theta_first_arg_logconvex_gap(f, FA, FC, FB, tol),), [d, n]


@_trial("theta_mixed")
def _t_theta_mixed(f, d, rng, tol):
    n, (FA, FC, FB, FD) = _fields(4, d, rng)
    return (divergence.theta_mixed_check(f, FA, FC, FB, FD, tol),), [d, n]


@_trial("theta_joint_convexity")
def _t_theta_joint(f, d, rng, tol):
    n, (FA, FB, FC, FD) = _fields(4, d, rng)
    return (divergence.theta_joint_convexity_check(f, FA, FB, FC, FD, tol),), [d, n]


def _perspective_cdj_trial(kind):
    def run(f, d, rng, tol):
        length = int(rng.integers(1, 5))
        MF = random_unital_map_field(kind, length, rng, d)
        FA, FC, FB = (
            OperatorField(MF.weights, tuple(random_spd(MF.in_dim, rng) for _ in range(length))) for _ in range(3)
        )
        return (divergence.perspective_cdj_check(f, MF, FA, FC, FB, tol),), [MF.in_dim, MF.out_dim, length]

    return run


for _kind in MAP_KINDS:
    _trial(f"perspective_cdj_{_kind}")(_perspective_cdj_trial(_kind))


@_trial("quadratic_form")
def _t_quadratic(f, d, rng, tol):
    A, C, B = random_spd(d, rng), random_spd(d, rng), random_spd(d, rng)
    x = random_unit_vector(d, rng)
    return (divergence.quadratic_form_check(f, A, C, B, x, tol),), [d]


OPERATOR_CHECKS = (
    "log_convex_def",
    "mean_sharp",
    "mean_harmonic",
    "mean_nabla",
    "operator_decreasing",
    "isometry_jensen",
    "isometry_sandwich",
    "multi_isometry",
    *(f"sharp_cdj_{k}" for k in MAP_KINDS),
    "power_chain_unit",
    "power_chain_negative",
    "sum_of_maps",
    "subadditivity",
)
FIELD_CHECKS = (
    "cauchy_schwarz",
    "theta_first_arg",
    "theta_mixed",
    "theta_joint_convexity",
    *(f"perspective_cdj_{k}" for k in MAP_KINDS),
    "quadratic_form",
)
CHECK_GROUPS = {
    "operators": OPERATOR_CHECKS,
    "fields": FIELD_CHECKS,
    "all": OPERATOR_CHECKS + FIELD_CHECKS,
}


def expand_checks(names: Iterable[str]) -> tuple[str, ...]:
    out: list[str] = []
    for name in names:
        for n in CHECK_GROUPS.get(name, (name,)):
            if n not in TRIALS:
                raise ValueError(f"unknown check {n!r}")
            if n not in out:
                out.append(n)
    return tuple(out)


# --- campaign ------------------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    checks: tuple[str, ...]
    function: str = "power:-0.5"
    dims: tuple[int, ...] = (2, 3, 4, 5)
    trials: int = 200
    seed: int = 0
    tolerance: float = DEFAULT_REL_TOL
    floor: float = DEFAULT_FLOOR
    stop_at_first: bool = False

    def __post_init__(self):
        object.__setattr__(self, "checks", expand_checks(self.checks))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or min(self.dims) < 1:
            raise ValueError("dims must be positive integers")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        parse_function(self.function)

    @classmethod
    def from_dict(cls, obj: dict) -> "CampaignConfig":
        if not isinstance(obj, dict):
            raise ParseError("campaign config must be a JSON object")
        known = {"checks", "function", "dims", "trials", "seed", "tolerance", "floor", "stop_at_first"}
        extra = set(obj) - known
        if extra:
            raise ParseError(f"unknown config keys {sorted(extra)}")
        if "checks" not in obj:
            raise ParseError("config needs a 'checks' list")
        try:
            return cls(
                checks=tuple(obj["checks"]),
                function=obj.get("function", cls.function),
                dims=tuple(obj.get("dims", cls.dims)),
                trials=int(obj.get("trials", cls.trials)),
                seed=int(obj.get("seed", cls.seed)),
                tolerance=float(obj.get("tolerance", cls.tolerance)),
                floor=float(obj.get("floor", cls.floor)),
                stop_at_first=bool(obj.get("stop_at_first", False)),
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"invalid campaign config: {exc}") from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["checks"] = list(self.checks)
        d["dims"] = list(self.dims)
        return d

    def report_dict(self) -> dict:
        """The sweep parameters echoed in every result record."""
        return {
            "tolerance": self.tolerance,
            "eigenvalueFloor": self.floor,
            "dimRange": list(self.dims),
            "trialCount": self.trials,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Failure:
    """A trial whose outcome contradicted ``lhs <= rhs``; replayable from ``seed``."""

    check: str
    seed: int
    dim: int
    dims: tuple[int, ...]
    verdict: str
    min_eig: float
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "seed": self.seed,
            "dim": self.dim,
            "dims": list(self.dims),
            "verdict": self.verdict,
            "witnessMinEig": self.min_eig,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class CheckResult:
    check_name: str
    function: str
    trials: int
    failures: tuple[Failure, ...]
    worst_slack: float | None
    skipped: int
    config: dict = field(compare=False)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "checkName": self.check_name,
            "function": self.function,
            "trials": self.trials,
            "skipped": self.skipped,
            "failures": [x.to_dict() for x in self.failures],
            "worstSlack": self.worst_slack,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def trial_seed(seed: int, check: str, dim: int, index: int) -> int:
    """Deterministic 64-bit seed for one trial."""
    ss = np.random.SeedSequence([seed, zlib.crc32(check.encode()), dim, index])
    return int(ss.generate_state(1, np.uint64)[0])


def _outcome_verdict(o) -> str:
    if isinstance(o, LoewnerVerdict):
        return o.relation.value
    return "Holds" if o.holds else "Violated"


def run_trial(check: str, f: ScalarFunction, dim: int, seed: int, rel_tol: float = DEFAULT_REL_TOL):
    """Run one trial from its own seed; returns (outcomes, dims)."""
    try:
        fn = TRIALS[check]
    except KeyError:
        raise ValueError(f"unknown check {check!r}") from None
    outcomes, dims = fn(f, dim, np.random.default_rng(seed), rel_tol)
    return _as_tuple(outcomes), dims


def replay_trial(failure: Failure, f: ScalarFunction, rel_tol: float = DEFAULT_REL_TOL):
    """Re-run the trial behind a recorded failure; returns its outcomes."""
    outcomes, _ = run_trial(failure.check, f, failure.dim, failure.seed, rel_tol)
    return outcomes


def _sweep(check: str, f: ScalarFunction, dim: int, config: CampaignConfig):
    failures: list[Failure] = []
    worst = float("inf")
    skipped = 0
    ran = 0
    for i in range(config.trials):
        ran += 1
        seed = trial_seed(config.seed, check, dim, i)
        try:
            outcomes, dims = run_trial(check, f, dim, seed, config.tolerance)
        except ProvisoError:
            skipped += 1
            continue
        slack = min(o.slack for o in outcomes)
        worst = min(worst, slack)
        bad = [o for o in outcomes if not o.holds]
        if bad:
            first = bad[0]
            failures.append(
                Failure(check, seed, dim, tuple(int(x) for x in dims), _outcome_verdict(first), float(first.slack), float(first.tolerance))
            )
            if config.stop_at_first:
                break
    return failures, worst, skipped, ran


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_campaign(config: CampaignConfig, checks_: Sequence[str] | None = None) -> list[CheckResult]:
    """Run every configured check over every dimension.

    Output order follows ``config.checks``; work may be spread over
    ``$LOEWNER_LAB_THREADS`` threads without affecting the results.
    """
    names = expand_checks(checks_) if checks_ is not None else config.checks
    f = parse_function(config.function)
    tasks = [(c, d) for c in names for d in config.dims]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        swept = list(pool.map(lambda cd: _sweep(cd[0], f, cd[1], config), tasks))
    results = []
    cfg = config.report_dict()
    for c in names:
        parts = [s for (name, _), s in zip(tasks, swept) if name == c]
        failures = tuple(x for p in parts for x in p[0])
        worst = min((p[1] for p in parts), default=float("inf"))
        skipped = sum(p[2] for p in parts)
        n = sum(p[3] for p in parts)
        results.append(CheckResult(c, f.spec, n, failures, worst if worst != float("inf") else None, skipped, cfg))
    return results


def results_to_jsonl(results: Iterable[CheckResult]) -> str:
    return "".join(r.to_json() + "\n" for r in results)


def sweep_function(
    f: ScalarFunction, check: str, dims: Sequence[int], trials: int, seed: int = 0, rel_tol: float = DEFAULT_REL_TOL, stop_at_first: bool = False
) -> CheckResult:
    """Like :func:`run_campaign` for one check, accepting any ScalarFunction (including custom ones)."""
    config = CampaignConfig((check,), "inverse", tuple(dims), trials, seed, rel_tol, stop_at_first=stop_at_first)
    failures, worst, skipped, n = [], float("inf"), 0, 0
    for d in config.dims:
        fl, w, s, ran = _sweep(check, f, d, config)
        failures += fl
        worst = min(worst, w)
        skipped += s
        n += ran
        if stop_at_first and fl:
            break
    cfg = config.report_dict()
    return CheckResult(check, f.spec, n, tuple(failures), worst if worst != float("inf") else None, skipped, cfg)


# --- log-convexity classifier ---------------------------------------------------

PROBES = {
    "operator_decreasing": "operator_decreasing",
    "operator_log_convex": "log_convex_def",
    "every_symmetric_mean": "mean_every",
    "some_mean": "mean_logmean",
}
CONSISTENT = "ConsistentOverTrials"
COUNTEREXAMPLE = "CounterexampleFound"


@dataclass(frozen=True)
class ProbeVerdict:
    criterion: str
    outcome: str
    trials: int
    witness: Failure | None

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "outcome": self.outcome,
            "trials": self.trials,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


@dataclass(frozen=True)
class ClassifierVerdict:
    function: str
    verdicts: tuple[ProbeVerdict, ...]

    @property
    def consistent(self) -> bool:
        """All probes agree (all clean or all with counterexamples)."""
        return len({v.outcome for v in self.verdicts}) == 1

    @property
    def counterexample_found(self) -> bool:
        return any(v.outcome == COUNTEREXAMPLE for v in self.verdicts)

    def __getitem__(self, criterion: str) -> ProbeVerdict:
        for v in self.verdicts:
            if v.criterion == criterion:
                return v
        raise KeyError(criterion)

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "consistent": self.consistent,
            "counterexampleFound": self.counterexample_found,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


def classify(
    f: ScalarFunction,
    dims: Sequence[int] = (2, 3, 4, 5),
    trials: int = 200,
    seed: int = 0,
    rel_tol: float = DEFAULT_REL_TOL,
) -> ClassifierVerdict:
    """Probe the equivalent conditions for operator log-convexity.

    Each probe stops at its first counterexample. Agreement between probes is
    evidence of consistency, never a proof.
    """
    verdicts = []
    for criterion, check in PROBES.items():
        res = sweep_function(f, check, dims, trials, seed, rel_tol, stop_at_first=True)
        if res.failures:
            verdicts.append(ProbeVerdict(criterion, COUNTEREXAMPLE, res.trials, res.failures[0]))
        else:
            verdicts.append(ProbeVerdict(criterion, CONSISTENT, res.trials, None))
    return ClassifierVerdict(f.spec, tuple(verdicts))
