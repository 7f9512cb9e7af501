"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

The lines are collected in ``RESULTS`` and echoed in the terminal summary by
``conftest.pytest_terminal_summary`` so they show up without ``-s``.
"""

import json
import time

import numpy as np
import pytest

from loewner_lab import example
from loewner_lab.campaign import FIELD_CHECKS, OPERATOR_CHECKS, CampaignConfig, replay_trial, results_to_jsonl, run_campaign, sweep_function
from loewner_lab.checks import dilation_oracle
from loewner_lab.cli import main
from loewner_lab.divergence import theta
from loewner_lab.functions import apply_function, negexp, parse_function, power
from loewner_lab.linalg import eig_hermitian
from loewner_lab.maps import OperatorField
from loewner_lab.means import mean_geometric
from loewner_lab.sampling import random_hermitian, random_isometry, random_spd

RESULTS: list[str] = []
SWEEP_FUNCTIONS = ("inverse", "power:-0.5", "power:-0.25", "power:-0.75")


def report(criterion: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    RESULTS.append(line)
    print(line)


def _sweep(checks):
    failures, worst, trials = {}, np.inf, 0
    for spec in SWEEP_FUNCTIONS:
        cfg = CampaignConfig(checks, spec, (2, 3, 4, 5), trials=200, seed=2024, tolerance=1e-8)
        for r in run_campaign(cfg):
            trials += r.trials
            if r.failures:
                failures[(spec, r.check_name)] = len(r.failures)
            if r.worst_slack is not None:
                worst = min(worst, r.worst_slack)
    return failures, worst, trials


def test_c1_worked_example_reproduction():
    start = time.perf_counter()
    rep = example.run(5e-4)
    elapsed = time.perf_counter() - start
    ok = rep.matches and rep.strict and elapsed < 1.0
    dev = max(rep.max_deviation.values())
    report(
        "1 worked example (match <= 5e-4, chain <= and !=, < 1 s)",
        ok,
        f"max deviation {dev:.2e}, gap norms {rep.gap_norms[0]:.3e}/{rep.gap_norms[1]:.3e}, {elapsed * 1e3:.1f} ms",
    )
    assert ok


def test_c1_literal_gap_min_eigenvalues():
    # Each gap's min eigenvalue must exceed 1e-4. The upper gap
    # Φ(f(A)) - Φ(f(A)^{-1})^{-1} is the rank-one term X21 X11^{-1} X12 of X = f(A),
    # so its smallest eigenvalue is 0 in exact arithmetic.
    rep = example.run(5e-4)
    ok = rep.gaps_positive_definite
    report(
        "1 worked example (each gap min eigenvalue > 1e-4)",
        ok,
        f"gap min eigenvalues {rep.gap_min_eigs[0]:.3e} and {rep.gap_min_eigs[1]:.3e}",
    )
    assert ok


@pytest.mark.slow
def test_c2_operator_suite():
    start = time.perf_counter()
    failures, worst, trials = _sweep(OPERATOR_CHECKS)
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 120
    report(
        "2 operator suite (4 functions x 17 checks x 200 trials x dims 2-5)",
        ok,
        f"{trials} trials, {sum(failures.values())} failures, worst slack {worst:.2e}, {elapsed:.1f} s",
    )
    assert not failures, failures
    assert elapsed < 120


@pytest.mark.slow
def test_c3_field_suite():
    start = time.perf_counter()
    failures, worst, trials = _sweep(FIELD_CHECKS)
    elapsed = time.perf_counter() - start
    ok = not failures
    report(
        "3 field suite (4 functions x 8 checks x 200 trials x dims 2-5)",
        ok,
        f"{trials} trials, {sum(failures.values())} failures, worst slack {worst:.2e}, {elapsed:.1f} s",
    )
    assert ok, failures


def test_c4_falsification():
    details, ok = [], True
    for f, check in ((power(2.0), "log_convex_def"), (negexp(), "operator_decreasing")):
        res = sweep_function(f, check, [2], 1000, seed=0, stop_at_first=True)
        if not res.failures:
            ok = False
            details.append(f"{f.spec}/{check}: none in {res.trials}")
            continue
        replayed = min(v.slack for v in replay_trial(res.failures[0], f))
        ok &= replayed < -1e-6
        details.append(f"{f.spec}/{check}: trial {res.trials}, replay min eig {replayed:.3e}")
    report("4 falsification (dim 2, <= 1000 trials, replay < -1e-6)", ok, "; ".join(details))
    assert ok


def test_c5_oracle_equivalences():
    rng = np.random.default_rng(5)
    riccati = 0.0
    for i in range(500):
        n = 2 + i % 4
        A, B = random_spd(n, rng), random_spd(n, rng)
        X = mean_geometric(A, B)
        riccati = max(riccati, np.max(np.abs(X @ np.linalg.inv(B) @ X - A)) / np.max(np.abs(A)))

    theta_err = 0.0
    for i in range(100):
        n, length = 2 + i % 4, 1 + i % 4
        f = parse_function(SWEEP_FUNCTIONS[i % 4])
        w = tuple(rng.uniform(0.2, 1.0, size=length))
        a = rng.uniform(0.1, 5.0, size=(length, n))
        b = rng.uniform(0.1, 5.0, size=(length, n))
        FA = OperatorField(w, tuple(np.diag(r) for r in a))
        FB = OperatorField(w, tuple(np.diag(r) for r in b))
        scalar = np.diag([sum(wt * b[t, j] * f(a[t, j] / b[t, j]) for t, wt in enumerate(w)) for j in range(n)])
        theta_err = max(theta_err, np.max(np.abs(theta(f, FA, FB) - scalar)))

    dilation_err = 0.0
    for i in range(200):
        m = 1 + i % 4
        n = m + i % 3
        f = parse_function(SWEEP_FUNCTIONS[i % 4])
        A, C = random_spd(n, rng), random_isometry(n, m, rng)
        top, _ = dilation_oracle(f, A, C)
        direct = apply_function(f, C.conj().T @ A @ C)
        dilation_err = max(dilation_err, np.max(np.abs(top - direct)) / (1 + np.max(np.abs(direct))))

    ok = riccati <= 1e-8 and theta_err <= 1e-10 and dilation_err <= 1e-8
    report(
        "5 oracle equivalences",
        ok,
        f"Riccati rel {riccati:.2e} (<=1e-8), theta diag {theta_err:.2e} (<=1e-10), dilation {dilation_err:.2e} (<=1e-8)",
    )
    assert ok


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_c6_numerical_kernel(method):
    rng = np.random.default_rng(6)
    recon, unit = 0.0, 0.0
    for n in range(2, 9):
        for _ in range(500):
            A = random_hermitian(n, rng) * rng.uniform(0.1, 10.0)
            d = eig_hermitian(A, method)
            V = d.eigenvectors
            recon = max(recon, np.max(np.abs((V * d.eigenvalues) @ V.conj().T - A)) / (1 + np.max(np.abs(A))))
            unit = max(unit, np.max(np.abs(V.conj().T @ V - np.eye(n))))
    ok = recon <= 1e-10 and unit <= 1e-10
    report(f"6 eigendecomposition [{method}] (500 per dim 2-8)", ok, f"reconstruction {recon:.2e}, unitarity {unit:.2e}")
    assert ok


def test_c7_determinism(tmp_path, capsys):
    cfg = CampaignConfig(("log_convex_def", "sharp_cdj_pinching", "perspective_cdj_kraus", "operator_decreasing"), "power:2.0", (2, 3), 25, 77)
    lib_same = results_to_jsonl(run_campaign(cfg)) == results_to_jsonl(run_campaign(cfg))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    outs = []
    for _ in range(2):
        main(["campaign", "--config", str(path)])
        outs.append(capsys.readouterr().out)
    ok = lib_same and outs[0] == outs[1] and len(outs[0]) > 0
    report("7 determinism (identical config -> byte-identical JSON lines)", ok, f"{len(outs[0])} bytes compared")
    assert ok
