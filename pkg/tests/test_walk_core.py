#!/usr/bin/env python

"""Tests for the walk simulation in `dtqw_cycle_qnn.walk_core`."""

import math
import numpy
import pytest
from dtqw_cycle_qnn import walk_core
from dtqw_cycle_qnn.training import haar_state, haar_unitary
from dtqw_cycle_qnn.utils import StructuralError, ValidationError
from dtqw_cycle_qnn.walk_core import WalkSpec

SIGMA1 = numpy.array([[0, 1], [1, 0]], dtype=complex)
H = numpy.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def random_schedule(spec, T, rng):
    return numpy.array([[haar_unitary(2, rng) for x in range(spec.n)]
                        for t in range(T)]).reshape(T, spec.n, 2, 2)


def test_walk_spec():
    """Test WalkSpec validation and the universality flag"""
    with pytest.raises(ValidationError):
        WalkSpec(1)
    assert WalkSpec(2).deltas == (0, 1)
    assert WalkSpec(2, 0, 1).is_universal
    assert WalkSpec(5, 1, -1).is_universal
    assert not WalkSpec(4, 1, -1).is_universal
    assert WalkSpec(5, 2, 0).is_universal
    assert not WalkSpec(4, 0, 2).is_universal
    assert not WalkSpec(3, 1, 1).is_universal
    spec = WalkSpec(3)
    assert spec.dim == 6
    assert spec.index(1, 4) == 4
    assert spec.label(4) == (1, 1)
    assert WalkSpec(3) == WalkSpec(3, 0, 1)
    assert spec.to_dict() == {"n": 3, "delta0": 0, "delta1": 1}


def test_apply_coin_layer():
    """Test coin layers against identity, permutation and dense oracles"""
    rng = numpy.random.default_rng(1)
    spec = WalkSpec(2)
    state = haar_state(4, rng)
    identity = walk_core.identity_schedule(spec, 1)[0]
    numpy.testing.assert_allclose(
        walk_core.apply_coin_layer(state, identity, spec), state)
    layer = identity.copy()
    layer[0] = SIGMA1
    out = walk_core.apply_coin_layer(walk_core.basis_state(spec, 0, 0),
                                     layer, spec)
    numpy.testing.assert_allclose(out, walk_core.basis_state(spec, 1, 0))

    spec = WalkSpec(3)
    layer = random_schedule(spec, 1, rng)[0]
    state = haar_state(6, rng)
    out = walk_core.apply_coin_layer(state, layer, spec)
    dense = walk_core.coin_layer_matrix(layer, spec) @ state
    numpy.testing.assert_allclose(out, dense, atol=1e-12)
    assert abs(numpy.linalg.norm(out) - 1) < 1e-12

    with pytest.raises(StructuralError):
        walk_core.apply_coin_layer(state, layer[:2], spec)
    with pytest.raises(StructuralError):
        walk_core.apply_coin_layer(state[:4], layer, spec)


def test_apply_coin_layer_batch():
    """Test that a batch of columns evolves like its single states"""
    rng = numpy.random.default_rng(2)
    spec = WalkSpec(3)
    layer = random_schedule(spec, 1, rng)[0]
    batch = numpy.stack([haar_state(6, rng) for _ in range(4)], axis=1)
    out = walk_core.apply_coin_layer(batch, layer, spec)
    for m in range(4):
        numpy.testing.assert_allclose(
            out[:, m], walk_core.apply_coin_layer(batch[:, m], layer, spec))


def test_apply_shift():
    """Test the conditional shift"""
    spec = WalkSpec(2)
    out = walk_core.apply_shift(walk_core.basis_state(spec, 1, 0), spec)
    numpy.testing.assert_allclose(out, walk_core.basis_state(spec, 1, 1))
    out = walk_core.apply_shift(walk_core.basis_state(spec, 0, 1), spec)
    numpy.testing.assert_allclose(out, walk_core.basis_state(spec, 0, 1))

    spec = WalkSpec(5, 1, -1)
    rng = numpy.random.default_rng(3)
    state = haar_state(10, rng)
    out = state
    for _ in range(5):
        out = walk_core.apply_shift(out, spec)
    numpy.testing.assert_allclose(out, state)
    back = walk_core.apply_shift(walk_core.apply_shift(state, spec), spec,
                                 inverse=True)
    numpy.testing.assert_allclose(back, state)
    # |1, 0> moves to site -1 = 4
    out = walk_core.apply_shift(walk_core.basis_state(spec, 1, 0), spec)
    numpy.testing.assert_allclose(out, walk_core.basis_state(spec, 1, 4))


def test_shift_matrix():
    """Test that the shift is a permutation matrix"""
    S = walk_core.shift_matrix(WalkSpec(4, 0, 3))
    assert numpy.all(numpy.isin(S, [0, 1]))
    numpy.testing.assert_array_equal(S.sum(axis=0), numpy.ones(8))
    numpy.testing.assert_array_equal(S.sum(axis=1), numpy.ones(8))
    numpy.testing.assert_allclose(
        walk_core.shift_matrix(WalkSpec(4, 0, 3), -1), S.T)


def test_evolve():
    """Test time-ordered evolution and step ranges"""
    rng = numpy.random.default_rng(4)
    spec = WalkSpec(3)
    schedule = random_schedule(spec, 5, rng)
    state = haar_state(6, rng)
    numpy.testing.assert_allclose(
        walk_core.evolve(state, schedule, spec, 2, 2), state)
    part = walk_core.evolve(state, schedule, spec, 0, 2)
    numpy.testing.assert_allclose(
        walk_core.evolve(part, schedule, spec, 2, 5),
        walk_core.evolve(state, schedule, spec), atol=1e-12)
    numpy.testing.assert_allclose(
        walk_core.evolve_adjoint(walk_core.evolve(state, schedule, spec),
                                 schedule, spec), state, atol=1e-12)

    identity = walk_core.identity_schedule(spec, spec.n)
    numpy.testing.assert_allclose(
        walk_core.evolve(state, identity, spec),
        walk_core.apply_shift_power(state, spec, spec.n))

    with pytest.raises(StructuralError):
        walk_core.evolve(state, schedule, spec, 3, 2)
    with pytest.raises(StructuralError):
        walk_core.evolve(state, schedule, spec, 0, 6)
    with pytest.raises(StructuralError):
        walk_core.evolve(state, schedule[:, :2], spec)


def test_full_unitary():
    """Test the assembled walk unitary against the dense product"""
    rng = numpy.random.default_rng(5)
    for n, T in ((2, 1), (3, 4), (5, 10)):
        spec = WalkSpec(n)
        schedule = random_schedule(spec, T, rng)
        U = walk_core.full_unitary(schedule, spec)
        numpy.testing.assert_allclose(
            U, walk_core.dense_walk_unitary(schedule, spec), atol=1e-10)
        numpy.testing.assert_allclose(U.conj().T @ U, numpy.eye(2 * n),
                                      atol=1e-10)
        basis = walk_core.basis_state(spec, 1, 1)
        numpy.testing.assert_allclose(
            U[:, spec.index(1, 1)],
            walk_core.evolve(basis, schedule, spec), atol=1e-12)
    spec = WalkSpec(3)
    numpy.testing.assert_allclose(
        walk_core.full_unitary(walk_core.empty_schedule(spec), spec),
        numpy.eye(6))


def test_full_unitary_hadamard_walk():
    """Test one Hadamard-walk step against S (H kron I)"""
    spec = walk_core.hadamard_walk_spec(4)
    U = walk_core.full_unitary(walk_core.hadamard_schedule(spec, 1), spec)
    expected = walk_core.shift_matrix(spec) @ numpy.kron(H, numpy.eye(4))
    numpy.testing.assert_allclose(U, expected, atol=1e-12)


def test_identity_coins_are_shift_power():
    """Test that identity coins give the permutation S^T"""
    spec = WalkSpec(4, 1, 2)
    for T in (1, 3, 7):
        U = walk_core.full_unitary(walk_core.identity_schedule(spec, T), spec)
        numpy.testing.assert_allclose(U, walk_core.shift_matrix(spec, T))


def test_orbit_partition():
    """Test the split into closed subspaces"""
    assert walk_core.orbit_partition(WalkSpec(2)) == [[0, 1, 2, 3]]
    orbits = walk_core.orbit_partition(WalkSpec(4, 0, 2))
    assert orbits == [[0, 2, 4, 6], [1, 3, 5, 7]]
    assert len(walk_core.orbit_partition(WalkSpec(6, 1, 4))) == 3
    assert len(walk_core.orbit_partition(WalkSpec(5, 1, -1))) == 1
    assert len(walk_core.orbit_partition(WalkSpec(3, 2, 2))) == 3


def test_non_universal_walks_are_block_diagonal():
    """Test that walks on non-universal specs never leave an orbit"""
    rng = numpy.random.default_rng(6)
    for spec in (WalkSpec(4, 0, 2), WalkSpec(6, 0, 3)):
        partition = walk_core.orbit_partition(spec)
        U = walk_core.full_unitary(random_schedule(spec, 6, rng), spec)
        assert walk_core.is_block_diagonal(U, partition)
    # with delta0 != 0 the blocks move rigidly with coin 0
    spec = WalkSpec(6, 1, 4)
    T = 5
    U = walk_core.full_unitary(random_schedule(spec, T, rng), spec)
    comoving = walk_core.shift_matrix(WalkSpec(6, 1, 1), -T) @ U
    assert walk_core.is_block_diagonal(comoving,
                                       walk_core.orbit_partition(spec))
    spec = WalkSpec(4, 0, 2)
    U = walk_core.full_unitary(random_schedule(WalkSpec(4), 6, rng),
                               WalkSpec(4))
    assert not walk_core.is_block_diagonal(U, walk_core.orbit_partition(spec))


def test_position_distribution():
    """Test site probabilities of a Hadamard walk"""
    spec = walk_core.hadamard_walk_spec(8)
    state = walk_core.evolve(walk_core.basis_state(spec, 0, 0),
                             walk_core.hadamard_schedule(spec, 1), spec)
    p = walk_core.position_distribution(state, spec)
    expected = numpy.zeros(8)
    expected[1] = expected[7] = 0.5
    numpy.testing.assert_allclose(p, expected, atol=1e-12)
    state = walk_core.evolve(walk_core.basis_state(spec, 0, 0),
                             walk_core.hadamard_schedule(spec, 5), spec)
    assert abs(walk_core.position_distribution(state, spec).sum() - 1) < 1e-12


def test_position_distribution_batch():
    """Test that every column of a batch gets its own distribution"""
    spec = WalkSpec(3)
    batch = numpy.eye(6)[:, [0, 4]]
    p = walk_core.position_distribution(batch, spec)
    assert p.shape == (3, 2)
    numpy.testing.assert_allclose(p, [[1, 0], [0, 1], [0, 0]])


def test_check_normalized():
    """Test the normalization check"""
    spec = WalkSpec(2)
    walk_core.check_normalized(walk_core.basis_state(spec, 0, 1))
    with pytest.raises(ValidationError):
        walk_core.check_normalized(2 * walk_core.basis_state(spec, 0, 1))
