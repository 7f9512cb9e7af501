import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewner_lab.errors import DimensionError, NotIsometryError, NotPositiveError, NotUnitalError
from loewner_lab.linalg import direct_sum, eigvalsh, loewner_compare
from loewner_lab.maps import (
    MapField,
    OperatorField,
    compression,
    dilated_average,
    dilation_pair,
    direct_sum_average,
    identity_map,
    kraus_map,
    map_from_dict,
    map_to_dict,
    pinching,
)
from loewner_lab.sampling import (
    MAP_KINDS,
    random_isometry,
    random_map,
    random_spd,
    random_unital_kraus,
    random_unital_map_field,
)

from conftest import assert_close

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 5)
kinds = st.sampled_from(MAP_KINDS)

A3 = np.array([[2.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 3.0]])


def test_compression_example():
    phi = compression(3, (1, 2))
    assert_close(phi(A3), [[1.0, 1.0], [1.0, 3.0]], atol=0)
    assert phi.is_unital()
    assert_close(phi.via_kraus(A3), phi(A3), atol=1e-15)


def test_direct_sum_average_example():
    psi = direct_sum_average([2, 2])
    X = direct_sum(np.diag([1.0, 2.0]), np.diag([3.0, 6.0]))
    X[0, 2] = X[2, 0] = 5.0  # off-diagonal blocks are discarded
    assert_close(psi(X), np.diag([2.0, 4.0]), atol=0)
    psi = direct_sum_average([1, 1], [0.25, 0.75])
    assert_close(psi(np.diag([4.0, 8.0])), [[7.0]], atol=0)


def test_pinching_example():
    P = np.diag([1.0, 0.0, 0.0])
    phi = pinching([P, np.eye(3) - P])
    out = phi(A3)
    assert_close(out, [[2.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 3.0]], atol=0)


def test_identity_map():
    assert_close(identity_map(3)(A3), A3, atol=0)


@given(seeds, dims, kinds)
def test_fast_path_matches_kraus_form(seed, n, kind):
    rng = np.random.default_rng(seed)
    phi = random_map(kind, rng, n)
    A = random_spd(phi.in_dim, rng)
    assert_close(phi(A), phi.via_kraus(A), atol=1e-12 * np.max(np.abs(A)))


@given(seeds, dims, kinds)
def test_random_maps_unital_and_positive(seed, n, kind):
    rng = np.random.default_rng(seed)
    phi = random_map(kind, rng, n)
    assert phi.out_dim == n
    assert phi.is_unital()
    A = random_spd(phi.in_dim, rng)
    assert eigvalsh(phi(A))[0] > 0


@given(seeds, dims, kinds)
def test_maps_preserve_order(seed, n, kind):
    rng = np.random.default_rng(seed)
    phi = random_map(kind, rng, n)
    A = random_spd(phi.in_dim, rng)
    B = A + random_spd(phi.in_dim, rng)
    assert loewner_compare(phi(A), phi(B)).holds


@given(seeds, dims, st.integers(1, 4))
def test_random_unital_kraus_residual(seed, n, count):
    Cs = random_unital_kraus(n, count, np.random.default_rng(seed))
    residual = np.max(np.abs(sum(C.conj().T @ C for C in Cs) - np.eye(n)))
    assert residual < 1e-12


def test_random_generators_deterministic():
    for kind in MAP_KINDS:
        a = random_map(kind, np.random.default_rng(7), 3)
        b = random_map(kind, np.random.default_rng(7), 3)
        A = random_spd(a.in_dim, np.random.default_rng(1))
        assert np.array_equal(a(A), b(A))


def test_json_round_trip():
    rng = np.random.default_rng(5)
    for kind in MAP_KINDS:
        phi = random_map(kind, rng, 3)
        psi = map_from_dict(map_to_dict(phi))
        A = random_spd(phi.in_dim, rng)
        assert_close(psi(A), phi(A), atol=1e-12)


def test_validation_errors():
    with pytest.raises(ValueError):
        compression(3, (2, 1))
    with pytest.raises(NotUnitalError):
        kraus_map([2 * np.eye(2)])
    kraus_map([0.5 * np.eye(2)], unital=False)
    with pytest.raises(ValueError):
        direct_sum_average([2, 2], [0.5, 0.6])
    with pytest.raises(ValueError):
        pinching([np.diag([1.0, 0.0])])
    with pytest.raises(DimensionError):
        compression(3, (0, 1))(np.eye(2))
    with pytest.raises(ValueError):
        map_from_dict({"kind": "transpose"})


def test_operator_field():
    F = OperatorField.from_pairs([(0.5, np.eye(2)), (1.5, np.diag([1.0, 3.0]))])
    assert len(F) == 2 and F.dim == 2
    assert_close(F.integrate(), np.diag([2.0, 5.0]), atol=0)
    assert_close(F.scaled(2.0).integrate(), np.diag([4.0, 10.0]), atol=0)
    with pytest.raises(ValueError):
        OperatorField((0.0,), (np.eye(2),))
    with pytest.raises(DimensionError):
        OperatorField((1.0, 1.0), (np.eye(2), np.eye(3)))
    with pytest.raises(NotPositiveError):
        OperatorField.single(np.diag([1.0, 0.0])).require_strictly_positive()


@given(seeds, dims, st.integers(1, 4), kinds)
def test_random_map_fields_are_unital(seed, n, length, kind):
    MF = random_unital_map_field(kind, length, np.random.default_rng(seed), n)
    assert_close(MF.image_of_identity(), np.eye(n), atol=1e-10)


def test_map_field_rejects_non_unital():
    with pytest.raises(NotUnitalError):
        MapField((0.5, 0.7), (identity_map(2), identity_map(2)))
    MapField((0.5, 0.7), (identity_map(2), identity_map(2)), unital=False)


def test_dilation_of_basis_vector():
    C = np.array([[1.0], [0.0]])
    U, V = dilation_pair(C)
    D = U[:2, 1:]
    assert_close(D, np.diag([0.0, 1.0]), atol=1e-15)
    for W in (U, V):
        assert_close(W.conj().T @ W, np.eye(3), atol=1e-15)


@given(seeds, st.integers(1, 5), st.integers(0, 3))
def test_dilation_blocks(seed, m, extra):
    rng = np.random.default_rng(seed)
    n = m + extra
    C = random_isometry(n, m, rng)
    A, B = random_spd(n, rng), random_spd(m, rng)
    U, V = dilation_pair(C)
    for W in (U, V):
        assert_close(W.conj().T @ W, np.eye(n + m), atol=1e-12)
    avg = dilated_average(A, C, B)
    scale = np.max(np.abs(A)) + np.max(np.abs(B))
    assert_close(avg[:m, :m], C.conj().T @ A @ C, atol=1e-12 * scale)
    assert_close(avg[:m, m:], 0, atol=1e-12 * scale)


def test_isometry_validation():
    with pytest.raises(NotIsometryError):
        dilation_pair(np.ones((2, 1)))
    with pytest.raises(NotIsometryError):
        dilation_pair(np.eye(3)[:2, :])
