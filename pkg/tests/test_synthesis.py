#!/usr/bin/env python

"""Tests for exact compilation in `dtqw_cycle_qnn.synthesis`."""

import itertools
import numpy
import pytest
from dtqw_cycle_qnn import synthesis
from dtqw_cycle_qnn import walk_core
from dtqw_cycle_qnn.synthesis import MeetPoint, TwoLevelUnitary
from dtqw_cycle_qnn.training import distance_unitary, haar_unitary, \
    qft_target
from dtqw_cycle_qnn.utils import (StructuralError, UnsupportedSpecError,
                                  ValidationError)
from dtqw_cycle_qnn.walk_core import WalkSpec

SIGMA1 = numpy.array([[0, 1], [1, 0]], dtype=complex)


def labels(n):
    return [(c, x) for c in (0, 1) for x in range(n)]


def random_two_level(n, rng):
    pairs = list(itertools.combinations(labels(n), 2))
    pair = pairs[rng.integers(len(pairs))]
    return TwoLevelUnitary(haar_unitary(2, rng), pair)


def test_two_level_unitary():
    """Test TwoLevelUnitary validation and embedding"""
    with pytest.raises(ValidationError):
        TwoLevelUnitary(numpy.array([[1, 1], [0, 1]]), ((0, 0), (1, 0)))
    with pytest.raises(ValidationError):
        TwoLevelUnitary(numpy.eye(2), ((0, 1), (0, 1)))
    tl = TwoLevelUnitary(SIGMA1, ((0, 1), (1, 0)))
    assert tl.indices(2) == (1, 2)
    with pytest.raises(StructuralError):
        tl.indices(1)
    M = synthesis.embed_two_level(tl, 4)
    expected = numpy.eye(4)[:, [0, 2, 1, 3]]
    numpy.testing.assert_allclose(M, expected)


def test_two_level_decompose():
    """Test the two-level factorization of unitaries"""
    assert synthesis.two_level_decompose(numpy.eye(6)) == []
    rng = numpy.random.default_rng(0)
    tl = TwoLevelUnitary(haar_unitary(2, rng), ((0, 1), (1, 0)))
    factors = synthesis.two_level_decompose(synthesis.embed_two_level(tl, 4))
    assert len(factors) == 1
    assert factors[0].basis_pair == ((0, 1), (1, 0))
    numpy.testing.assert_allclose(factors[0].v, tl.v, atol=1e-12)

    V = qft_target(4)
    factors = synthesis.two_level_decompose(V)
    assert len(factors) <= 6
    numpy.testing.assert_allclose(synthesis.compose_two_level(factors, 4), V,
                                  atol=1e-9)
    for dim in (4, 6, 10):
        for _ in range(10):
            V = haar_unitary(dim, rng)
            factors = synthesis.two_level_decompose(V)
            assert len(factors) <= dim * (dim - 1) // 2
            numpy.testing.assert_allclose(
                synthesis.compose_two_level(factors, dim), V, atol=1e-9)


def test_two_level_decompose_diagonal():
    """Test diagonal and permutation targets"""
    phases = numpy.exp(1j * numpy.array([0.3, -1.2, 2.0, 0.0, 0.7, 1.1]))
    V = numpy.diag(phases)
    factors = synthesis.two_level_decompose(V)
    numpy.testing.assert_allclose(synthesis.compose_two_level(factors, 6), V,
                                  atol=1e-12)
    S = walk_core.shift_matrix(WalkSpec(3))
    factors = synthesis.two_level_decompose(S)
    numpy.testing.assert_allclose(synthesis.compose_two_level(factors, 6), S,
                                  atol=1e-12)


def test_two_level_decompose_errors():
    """Test that invalid targets are rejected"""
    with pytest.raises(ValidationError):
        synthesis.two_level_decompose(numpy.ones((4, 4)))
    with pytest.raises(StructuralError):
        synthesis.two_level_decompose(numpy.ones((4, 3)))
    with pytest.raises(StructuralError):
        synthesis.two_level_decompose(numpy.eye(3))


def test_solve_meet():
    """Test meet points for both coin cases"""
    assert synthesis.solve_meet(WalkSpec(2), ((0, 0), (1, 0))) == \
        MeetPoint(0, 0)
    assert synthesis.solve_meet(WalkSpec(3), ((0, 0), (1, 1))) == \
        MeetPoint(2, 0)
    assert synthesis.solve_meet(WalkSpec(2), ((0, 0), (0, 1))) == \
        MeetPoint(1, 0)
    with pytest.raises(UnsupportedSpecError) as e:
        synthesis.solve_meet(WalkSpec(4, 0, 2), ((0, 0), (1, 0)))
    assert len(e.value.orbits) == 2


def test_meet_is_unique():
    """Test that exactly one step solves the meeting condition"""
    for spec in (WalkSpec(2), WalkSpec(5), WalkSpec(5, 1, -1),
                 WalkSpec(4, 0, 3)):
        for (c0, x0), (c1, x1) in itertools.combinations(labels(spec.n), 2):
            c1_eff = 1 - c1 if c0 == c1 else c1
            d0, d1 = spec.deltas[c0], spec.deltas[c1_eff]
            solutions = [t for t in range(spec.n)
                         if (x0 + t * d0 - x1 - t * d1) % spec.n == 0]
            assert len(solutions) == 1
            meet = synthesis.solve_meet(spec, ((c0, x0), (c1, x1)))
            assert meet.t_meet == solutions[0]
            assert 0 <= meet.x_meet < spec.n
            if c0 == c1:
                assert 0 < meet.t_meet < spec.n


def test_realize_two_level():
    """Test that each two-level factor is realized exactly"""
    spec = WalkSpec(2)
    swap = TwoLevelUnitary(SIGMA1, ((0, 0), (1, 0)))
    schedule = synthesis.realize_two_level(swap, spec)
    U = walk_core.full_unitary(schedule, spec)
    numpy.testing.assert_allclose(U, numpy.eye(4)[:, [2, 1, 0, 3]],
                                  atol=1e-12)
    identity = TwoLevelUnitary(numpy.eye(2), ((0, 0), (1, 1)))
    U = walk_core.full_unitary(synthesis.realize_two_level(identity, spec),
                               spec)
    numpy.testing.assert_allclose(U, numpy.eye(4), atol=1e-12)

    rng = numpy.random.default_rng(1)
    for spec in (WalkSpec(2), WalkSpec(3), WalkSpec(5), WalkSpec(5, 1, -1),
                 WalkSpec(4, 0, 3)):
        for _ in range(100):
            tl = random_two_level(spec.n, rng)
            schedule = synthesis.realize_two_level(tl, spec)
            same_coin = tl.basis_pair[0][0] == tl.basis_pair[1][0]
            assert len(schedule) == (2 * spec.n if same_coin else spec.n)
            U = walk_core.full_unitary(schedule, spec)
            deviation = numpy.max(numpy.abs(
                U - synthesis.embed_two_level(tl, spec.dim)))
            assert deviation < 1e-10


def test_realize_unitary_exact():
    """Test compilation of whole unitaries"""
    spec = WalkSpec(2)
    schedule = synthesis.realize_unitary_exact(numpy.eye(4), spec)
    assert schedule.shape == (0, 2, 2, 2)
    S = walk_core.shift_matrix(spec)
    numpy.testing.assert_allclose(
        walk_core.full_unitary(synthesis.realize_unitary_exact(S, spec),
                               spec), S, atol=1e-10)
    V = qft_target(4)
    schedule = synthesis.realize_unitary_exact(V, spec)
    assert distance_unitary(walk_core.full_unitary(schedule, spec), V) < 1e-8
    assert len(schedule) <= 4 * len(synthesis.two_level_decompose(V))
    with pytest.raises(UnsupportedSpecError):
        synthesis.realize_unitary_exact(numpy.eye(8), WalkSpec(4, 0, 2))
    with pytest.raises(StructuralError):
        synthesis.realize_unitary_exact(numpy.eye(6), spec)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_exact_round_trip(n):
    """Test compilation of Haar-random unitaries"""
    rng = numpy.random.default_rng(n)
    spec = WalkSpec(n)
    for _ in range(50):
        V = haar_unitary(spec.dim, rng)
        schedule = synthesis.realize_unitary_exact(V, spec)
        assert distance_unitary(walk_core.full_unitary(schedule, spec),
                                V) < 1e-8


def test_concatenate_schedules():
    """Test that concatenated schedules run earlier schedules first"""
    rng = numpy.random.default_rng(2)
    spec = WalkSpec(3)
    first = synthesis.realize_two_level(random_two_level(3, rng), spec)
    second = synthesis.realize_two_level(random_two_level(3, rng), spec)
    joined = synthesis.concatenate_schedules([first, second], spec)
    assert synthesis.schedule_layer_count(joined) == len(first) + len(second)
    numpy.testing.assert_allclose(
        walk_core.full_unitary(joined, spec),
        walk_core.full_unitary(second, spec) @
        walk_core.full_unitary(first, spec), atol=1e-12)
    assert synthesis.concatenate_schedules([], spec).shape == (0, 3, 2, 2)


def test_total_effect_factorize():
    """Test the shift-power times two-level factor decomposition"""
    spec = WalkSpec(3)
    T, factors = synthesis.total_effect_factorize(
        walk_core.identity_schedule(spec, 4), spec)
    assert T == 4
    assert all(f.is_identity() for f in factors)
    numpy.testing.assert_allclose(
        synthesis.reconstruct_total_effect(T, factors, spec),
        walk_core.shift_matrix(spec, 4))

    schedule = walk_core.identity_schedule(spec, 4)
    schedule[2, 1] = SIGMA1
    T, factors = synthesis.total_effect_factorize(schedule, spec)
    moving = [f for f in factors if not f.is_identity()]
    assert len(moving) == 1
    # site 1 at step 2: (0, 1 - 2*0) and (1, 1 - 2*1 mod 3)
    assert moving[0].basis_pair == ((0, 1), (1, 2))


def test_total_effect_reconstruction():
    """Test S^T times the factors against the walk unitary"""
    rng = numpy.random.default_rng(3)
    for spec in (WalkSpec(3), WalkSpec(4, 1, -1)):
        for _ in range(100):
            schedule = numpy.array([haar_unitary(2, rng)
                                    for _ in range(6 * spec.n)]).reshape(
                                        6, spec.n, 2, 2)
            T, factors = synthesis.total_effect_factorize(schedule, spec)
            numpy.testing.assert_allclose(
                synthesis.reconstruct_total_effect(T, factors, spec),
                walk_core.full_unitary(schedule, spec), atol=1e-10)
            for f in factors[:3]:
                M = synthesis.embed_two_level(f, spec.dim)
                rest = [i for i in range(spec.dim)
                        if i not in f.indices(spec.n)]
                numpy.testing.assert_allclose(M[:, rest],
                                              numpy.eye(spec.dim)[:, rest])
