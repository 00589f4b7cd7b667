"""
    Exact compilation of 2n x 2n unitaries into coin schedules.

    A target V is split into two-level unitaries by column elimination, and
    each two-level factor is realized by a walk with identity coins
    everywhere except at the step and site where the trajectories of its
    two basis vectors meet.
"""
from dataclasses import dataclass
import numpy
from . import utils
from . import walk_core
from .utils import StructuralError, UnsupportedSpecError, ValidationError

ZERO_TOL = 1e-12
SUPPORT_TOL = 1e-10
SIGMA1 = numpy.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class TwoLevelUnitary:
    """ A unitary acting as ``v`` on span{|c0, x0>, |c1, x1>} and as the
        identity elsewhere. ``v[a, b]`` is <pair_a| U |pair_b>.

        :param v: 2x2 unitary block
        :param basis_pair: ((c0, x0), (c1, x1))
    """
    v: numpy.ndarray
    basis_pair: tuple

    def __post_init__(self):
        utils.require_unitary(self.v, "Two-level block")
        first, second = self.basis_pair
        if tuple(first) == tuple(second):
            raise ValidationError("Two-level unitary needs two distinct " +
                                  "basis labels, got " + str(first) + " twice")

    def indices(self, n):
        """ Coin-major basis indices of the pair on an n-site cycle """
        out = []
        for c, x in self.basis_pair:
            if c not in (0, 1) or not (0 <= x < n):
                raise StructuralError("Basis label " + str((c, x)) +
                                      " is out of range for n=" + str(n))
            out.append(c * n + x)
        return tuple(out)

    def is_identity(self, atol=ZERO_TOL):
        return bool(numpy.allclose(self.v, numpy.eye(2), rtol=0, atol=atol))


@dataclass(frozen=True)
class MeetPoint:
    """ Step and site where the mixing coin is placed """
    t_meet: int
    x_meet: int


def embed_two_level(tl, dim):
    """ Dense dim x dim matrix of a two-level unitary

        :param tl: TwoLevelUnitary
        :param dim: total dimension 2n
    """
    if dim % 2:
        raise StructuralError("Walk dimension must be even, got " + str(dim))
    matrix = numpy.eye(dim, dtype=complex)
    pair = tl.indices(dim // 2)
    matrix[numpy.ix_(pair, pair)] = tl.v
    return matrix


def compose_two_level(factors, dim):
    """ Product of two-level unitaries, factors[0] applied first """
    out = numpy.eye(dim, dtype=complex)
    for tl in factors:
        out = embed_two_level(tl, dim) @ out
    return out


def _is_two_level_on(matrix, pair):
    """ Whether ``matrix`` is the identity outside rows/cols ``pair`` """
    rest = numpy.array(matrix, copy=True)
    rest[numpy.ix_(pair, pair)] = numpy.eye(2)
    deviation = rest - numpy.eye(len(matrix))
    return bool(numpy.max(numpy.abs(deviation)) < SUPPORT_TOL)


def two_level_decompose(V):
    """ Factor a unitary into two-level unitaries.

        Rows of V^dagger are combined pairwise until it becomes the
        identity; the combining matrices G_1 .. G_K then satisfy
        V = G_K ... G_1. The returned list is in application order
        (index 0 acts on the state first) and has at most d(d-1)/2 entries
        for dimension d.

        :param V: unitary of even dimension 2n
        :returns: list of TwoLevelUnitary
    """
    V = utils.require_unitary(V, "Target")
    d = V.shape[0]
    if d % 2:
        raise StructuralError("Target dimension must be even (2n), got " +
                              str(d))
    n = d // 2
    A = V.conj().T.copy()
    factors = []

    def emit(p, q, block):
        A[[p, q], :] = block @ A[[p, q], :]
        factors.append(TwoLevelUnitary(block, (divmod(p, n), divmod(q, n))))

    for j in range(d - 1):
        rows = [i for i in range(j + 1, d) if abs(A[i, j]) >= ZERO_TOL]
        if len(rows) <= 1:
            if rows:
                partner = rows[0]
            else:
                moved = [i for i in range(j + 1, d)
                         if abs(A[i, i] - 1) >= ZERO_TOL]
                partner = moved[0] if moved else j + 1
            pair = [j, partner]
            if _is_two_level_on(A, pair):
                block = A[numpy.ix_(pair, pair)].conj().T
                if not numpy.allclose(block, numpy.eye(2), rtol=0,
                                      atol=ZERO_TOL):
                    emit(j, partner, block)
                return factors
        for i in rows:
            a, b = A[j, j], A[i, j]
            r = numpy.hypot(abs(a), abs(b))
            emit(j, i, numpy.array([[a.conjugate(), b.conjugate()],
                                    [-b, a]]) / r)
        if not rows and abs(A[j, j] - 1) >= ZERO_TOL:
            emit(j, j + 1, numpy.diag([A[j, j].conjugate(), 1]))
    if abs(A[d - 1, d - 1] - 1) >= ZERO_TOL:
        emit(d - 2, d - 1, numpy.diag([1, A[d - 1, d - 1].conjugate()]))
    return factors


def require_universal(spec):
    """ Raise UnsupportedSpecError listing the closed subspaces of ``spec``
        unless every 2n-dimensional unitary is reachable
    """
    if not spec.is_universal:
        orbits = walk_core.orbit_partition(spec)
        raise UnsupportedSpecError(
            repr(spec) + " is not universal: gcd(|delta0 - delta1|, n) must " +
            "be 1. Walks stay inside " + str(len(orbits)) +
            " closed subspaces: " + str(orbits), orbits)


def solve_meet(spec, pair):
    """ Find where the trajectories of the two basis vectors coincide.

        Different coins travel freely; for equal coins the second vector is
        flipped to the other coin first, so t = 0 is excluded.

        :param spec: universal walk spec
        :param pair: ((c0, x0), (c1, x1))
        :returns: MeetPoint
    """
    require_universal(spec)
    (c0, x0), (c1, x1) = pair
    if c0 == c1:
        c1 = 1 - c1
        steps = range(1, spec.n)
    else:
        steps = range(spec.n)
    d0, d1 = spec.deltas[c0], spec.deltas[c1]
    for t in steps:
        if (x0 + t * d0 - x1 - t * d1) % spec.n == 0:
            return MeetPoint(t, (x0 + t * d0) % spec.n)
    raise StructuralError("No meet point for pair " + str(pair) + " on " +
                          repr(spec))


def realize_two_level(tl, spec):
    """ Coin schedule whose walk unitary equals the embedding of ``tl``

        Different coins: T = n, identity coins except the block coin at the
        meet point. Equal coins: T = 2n, with sigma1 coins at site x1 on
        steps 0 and n around the block coin.

        :param tl: TwoLevelUnitary
        :param spec: universal walk spec
    """
    require_universal(spec)
    tl.indices(spec.n)
    (c0, x0), (c1, x1) = tl.basis_pair
    meet = solve_meet(spec, tl.basis_pair)
    same_coin = c0 == c1
    T = 2 * spec.n if same_coin else spec.n
    schedule = walk_core.identity_schedule(spec, T)
    coins = (c0, 1 - c1) if same_coin else (c0, c1)
    block = numpy.zeros((2, 2), dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            block[coins[a], coins[b]] = tl.v[a, b]
    schedule[meet.t_meet, meet.x_meet] = block
    if same_coin:
        schedule[0, x1] = SIGMA1
        schedule[spec.n, x1] = SIGMA1
    return schedule


def concatenate_schedules(schedules, spec):
    """ Join schedules in time order, earlier schedule first """
    parts = [walk_core.empty_schedule(spec)] + [walk_core._check_schedule(
        s, spec) for s in schedules]
    return numpy.concatenate(parts, axis=0)


def schedule_layer_count(schedule):
    return int(numpy.shape(schedule)[0])


def realize_unitary_exact(V, spec):
    """ Compile an arbitrary unitary into one coin schedule

        :param V: 2n x 2n unitary
        :param spec: universal walk spec
        :returns: coin schedule (T, n, 2, 2), T <= 2n per two-level factor
    """
    require_universal(spec)
    V = utils.require_unitary(V, "Target")
    if V.shape[0] != spec.dim:
        raise StructuralError("Target of dimension " + str(V.shape[0]) +
                              " does not match walk dimension " +
                              str(spec.dim))
    factors = two_level_decompose(V)
    return concatenate_schedules([realize_two_level(tl, spec)
                                  for tl in factors], spec)


def total_effect_factorize(schedule, spec):
    """ Write the walk unitary as S^T times time-ordered two-level factors.

        The factor of the coin at (x, t) is S^-t (c (x) |x><x| + rest) S^t; it
        acts on span{|0, x - t delta0>, |1, x - t delta1>}.

        :param schedule: coin schedule (T, n, 2, 2)
        :param spec: walk spec
        :returns: (T, factors) with factors[0] applied first
    """
    schedule = walk_core._check_schedule(schedule, spec)
    T = schedule.shape[0]
    factors = []
    for t in range(T):
        for x in range(spec.n):
            pair = ((0, (x - t * spec.delta0) % spec.n),
                    (1, (x - t * spec.delta1) % spec.n))
            factors.append(TwoLevelUnitary(schedule[t, x], pair))
    return T, factors


def reconstruct_total_effect(T, factors, spec):
    """ S^T . prod(factors) as a dense matrix """
    return walk_core.shift_matrix(spec, T) @ \
        compose_two_level(factors, spec.dim)
