import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewner_lab.errors import NotPositiveError, ParseError
from loewner_lab.functions import (
    OPERATOR_DECREASING,
    OPERATOR_LOG_CONVEX,
    OPERATOR_MONOTONE,
    affine,
    apply_function,
    custom,
    eval_function,
    exp,
    inverse,
    logarithmic_mean_function,
    logshift,
    negexp,
    parse_function,
    power,
)
from loewner_lab.linalg import inv
from loewner_lab.sampling import random_spd, random_unitary

from conftest import assert_close

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize(
    "f, t, expected",
    [
        (power(-0.5), 4.0, 0.5),
        (power(2.0), 3.0, 9.0),
        (inverse(), 2.0, 0.5),
        (exp(), 1.0, math.e),
        (negexp(), 1.0, 1 / math.e),
        (logshift(1.0), 1.0, math.log(2.0)),
        (affine(2.0, 1.0), 3.0, 7.0),
        (logarithmic_mean_function(), math.e, math.e - 1.0),
        (logarithmic_mean_function(), 1.0, 1.0),
    ],
)
def test_scalar_values(f, t, expected):
    assert eval_function(f, t) == pytest.approx(expected, rel=1e-14)


def test_logarithmic_mean_is_smooth_near_one():
    h = logarithmic_mean_function()
    t = np.array([1 - 1e-7, 1.0, 1 + 1e-7, 1 + 2e-6])
    exact = np.array([1 - 0.5e-7, 1.0, 1 + 0.5e-7, (2e-6) / math.log1p(2e-6)])
    assert_close(h(t), exact, atol=1e-12)


def test_nonpositive_families_rejected():
    with pytest.raises(NotPositiveError):
        logshift(0.5)
    with pytest.raises(ValueError):
        affine(-1.0, 1.0)
    with pytest.raises(ValueError):
        eval_function(inverse(), 0.0)


def test_claims():
    assert power(-0.5).has(OPERATOR_DECREASING) and power(-0.5).has(OPERATOR_LOG_CONVEX)
    assert power(0.5).has(OPERATOR_MONOTONE)
    assert not power(2.0).has(OPERATOR_LOG_CONVEX)
    assert affine(0.0, 3.0).has(OPERATOR_DECREASING)


@pytest.mark.parametrize(
    "spec, canonical",
    [
        ("power:-0.5", "power:-0.5"),
        ("inverse", "inverse"),
        ("exp", "exp"),
        ("negexp", "negexp"),
        ("logshift:1.0", "logshift:1.0"),
        ("affine:0.5,2", "affine:0.5,2.0"),
        (" power : 2 ", "power:2.0"),
    ],
)
def test_parse_round_trip(spec, canonical):
    f = parse_function(spec)
    assert f.spec == canonical
    assert parse_function(f.spec) == f


@pytest.mark.parametrize("spec", ["", "power", "power:a", "inverse:1", "affine:1", "sqrt", "power:1,2"])
def test_parse_errors(spec):
    with pytest.raises(ParseError):
        parse_function(spec)


@given(seeds, st.integers(1, 5), st.floats(-2, 2), st.floats(-2, 2))
def test_power_composition(seed, n, p, q):
    A = random_spd(n, np.random.default_rng(seed))
    lhs = apply_function(power(q), apply_function(power(p), A))
    rhs = apply_function(power(p * q), A)
    scale = np.max(np.abs(rhs)) + 1
    assert_close(lhs, rhs, atol=1e-9 * scale * np.linalg.cond(A) ** (abs(p * q) + 1) / 1e3)


@given(seeds, st.integers(1, 5))
def test_inverse_matches_matrix_inverse(seed, n):
    A = random_spd(n, np.random.default_rng(seed))
    assert_close(apply_function(inverse(), A), inv(A), atol=1e-12 * np.max(np.abs(inv(A))))
    assert_close(apply_function(inverse(), A) @ A, np.eye(n), atol=1e-12 * np.linalg.cond(A))


@given(seeds, st.integers(1, 5), st.sampled_from(["power:-0.5", "negexp", "logshift:1.0", "affine:1.5,0.5"]))
def test_unitary_covariance(seed, n, spec):
    rng = np.random.default_rng(seed)
    A, U = random_spd(n, rng), random_unitary(n, rng)
    f = parse_function(spec)
    lhs = apply_function(f, U @ A @ U.conj().T)
    rhs = U @ apply_function(f, A) @ U.conj().T
    assert_close(lhs, rhs, atol=1e-10 * (1 + np.max(np.abs(rhs))) * np.linalg.cond(A))


def test_diagonal_matches_scalar():
    A = np.diag([0.5, 2.0, 3.0])
    for f in (power(-0.5), exp(), logshift(1.0)):
        assert_close(apply_function(f, A), np.diag(f(np.diag(A))), atol=1e-13)


def test_custom_functions():
    g = custom(lambda t: 1.0 / (t + 1.0), "shifted-inverse")
    assert g.positive_on_grid and g.spec == "shifted-inverse"
    assert_close(apply_function(g, np.diag([1.0, 3.0])), np.diag([0.5, 0.25]), atol=1e-15)
    bad = custom(lambda t: t - 1.0, "bad")
    assert not bad.positive_on_grid
    with pytest.raises(NotPositiveError):
        apply_function(bad, np.eye(2) * 2)


def test_matrix_argument_must_be_positive():
    with pytest.raises(NotPositiveError):
        apply_function(power(-0.5), np.diag([1.0, -1.0]))
