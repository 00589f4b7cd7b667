"""
    Discrete-time quantum walk on an n-site cycle.

    The walker lives in coin (x) position space, dimension 2n. Basis vectors
    |c, x> are indexed coin-major: i = c * n + x. Every matrix and state in
    the package uses this ordering.

    A coin schedule is a complex array of shape (T, n, 2, 2): the coin at
    site x during step t is ``schedule[t, x]``. One step applies the coin
    layer, then the shift S|c, x> = |c, x + delta_c mod n>.

    State functions accept a single state of shape (2n,) or a batch of
    column states of shape (2n, m).
"""
import math
import numpy
from . import utils
from .utils import StructuralError, ValidationError


class WalkSpec:
    """ Cycle size and per-coin shift offsets

        :param n: number of cycle sites (>= 2)
        :param delta0: shift applied when the coin is |0>
        :param delta1: shift applied when the coin is |1>
    """
    def __init__(self, n, delta0=0, delta1=1):
        if int(n) != n or n < 2:
            raise ValidationError("Cycle size n must be an integer >= 2, " +
                                  "got " + str(n))
        self.n = int(n)
        self.delta0 = int(delta0)
        self.delta1 = int(delta1)

    @property
    def dim(self):
        return 2 * self.n

    @property
    def deltas(self):
        return (self.delta0, self.delta1)

    @property
    def is_universal(self):
        """ delta0 != delta1 and gcd(|delta0 - delta1|, n) == 1 """
        diff = abs(self.delta0 - self.delta1)
        return diff != 0 and math.gcd(diff, self.n) == 1

    def index(self, c, x):
        """ Basis index of |c, x> (x is reduced modulo n) """
        return c * self.n + (x % self.n)

    def label(self, i):
        """ (c, x) label of basis index i """
        return divmod(int(i), self.n)

    def to_dict(self):
        return {"n": self.n, "delta0": self.delta0, "delta1": self.delta1}

    def __eq__(self, other):
        return isinstance(other, WalkSpec) and \
            self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self.n, self.delta0, self.delta1))

    def __repr__(self):
        return "WalkSpec(n={}, delta0={}, delta1={})".format(
            self.n, self.delta0, self.delta1)


def hadamard_walk_spec(n):
    """ The conventional Hadamard walk moves coin c by 1 - 2c """
    return WalkSpec(n, 1, -1)


def _as_columns(state, spec):
    """ View a state (or batch of states) as an array of shape (2, n, m) """
    state = numpy.asarray(state, dtype=complex)
    if state.shape[0] != spec.dim or state.ndim not in (1, 2):
        raise StructuralError("State of shape " + str(state.shape) +
                              " does not match walk dimension " +
                              str(spec.dim))
    return state.reshape(2, spec.n, -1)


def _check_schedule(schedule, spec):
    schedule = numpy.asarray(schedule, dtype=complex)
    if schedule.ndim != 4 or schedule.shape[1:] != (spec.n, 2, 2):
        raise StructuralError("Coin schedule must have shape (T, " +
                              str(spec.n) + ", 2, 2), got " +
                              str(schedule.shape))
    return schedule


def empty_schedule(spec):
    """ A schedule with no steps """
    return numpy.zeros((0, spec.n, 2, 2), dtype=complex)


def identity_schedule(spec, T):
    """ T layers of identity coins """
    schedule = numpy.zeros((T, spec.n, 2, 2), dtype=complex)
    schedule[:, :] = numpy.eye(2)
    return schedule


def hadamard_schedule(spec, T):
    """ T layers of Hadamard coins on every site """
    schedule = numpy.zeros((T, spec.n, 2, 2), dtype=complex)
    schedule[:, :] = numpy.array([[1, 1], [1, -1]]) / math.sqrt(2)
    return schedule


def basis_state(spec, c, x):
    """ The walker state |c, x> """
    state = numpy.zeros(spec.dim, dtype=complex)
    state[spec.index(c, x)] = 1
    return state


def apply_coin_layer(state, layer, spec):
    """ Multiply the coin 2-vector at each site x by ``layer[x]``

        :param state: state (2n,) or batch (2n, m)
        :param layer: coins of shape (n, 2, 2)
        :param spec: walk spec
    """
    layer = numpy.asarray(layer, dtype=complex)
    if layer.shape != (spec.n, 2, 2):
        raise StructuralError("Coin layer must have shape (" + str(spec.n) +
                              ", 2, 2), got " + str(layer.shape))
    cols = _as_columns(state, spec)
    out = numpy.einsum('xab,bxm->axm', layer, cols)
    return out.reshape(numpy.shape(state))


def apply_shift(state, spec, inverse=False):
    """ Move the amplitude of |c, x> to |c, x + delta_c mod n>

        :param state: state (2n,) or batch (2n, m)
        :param spec: walk spec
        :param inverse: apply S^dagger instead
    """
    return apply_shift_power(state, spec, -1 if inverse else 1)


def evolve(state, schedule, spec, t0=0, t1=None):
    """ Apply S C^(t) for t = t0 .. t1-1 in time order

        :param state: state (2n,) or batch (2n, m)
        :param schedule: coin schedule (T, n, 2, 2)
        :param spec: walk spec
        :param t0: first step applied
        :param t1: one past the last step applied (defaults to T)
    """
    schedule = _check_schedule(schedule, spec)
    T = schedule.shape[0]
    if t1 is None:
        t1 = T
    if not (0 <= t0 <= t1 <= T):
        raise StructuralError("Step range [" + str(t0) + ", " + str(t1) +
                              ") is outside [0, " + str(T) + "]")
    out = numpy.array(state, dtype=complex)
    _as_columns(out, spec)
    for t in range(t0, t1):
        out = apply_shift(apply_coin_layer(out, schedule[t], spec), spec)
    return out


def evolve_adjoint(state, schedule, spec, t0=0, t1=None):
    """ Apply U_{t1,t0}^dagger, undoing evolve(state, schedule, spec, t0,
        t1)
    """
    schedule = _check_schedule(schedule, spec)
    T = schedule.shape[0]
    if t1 is None:
        t1 = T
    if not (0 <= t0 <= t1 <= T):
        raise StructuralError("Step range [" + str(t0) + ", " + str(t1) +
                              ") is outside [0, " + str(T) + "]")
    out = numpy.array(state, dtype=complex)
    for t in range(t1 - 1, t0 - 1, -1):
        out = apply_shift(out, spec, inverse=True)
        out = apply_coin_layer(out, schedule[t].conj().transpose(0, 2, 1),
                               spec)
    return out


def full_unitary(schedule, spec):
    """ The 2n x 2n walk unitary U_{T,0}; column i is the evolved basis
        state i.

        :param schedule: coin schedule (T, n, 2, 2)
        :param spec: walk spec
    """
    return evolve(numpy.eye(spec.dim, dtype=complex), schedule, spec)


def shift_matrix(spec, power=1):
    """ Dense S^power """
    return apply_shift_power(numpy.eye(spec.dim, dtype=complex), spec, power)


def apply_shift_power(state, spec, power):
    """ Apply S^power (power may be negative) by a single index roll """
    cols = _as_columns(state, spec)
    out = numpy.stack([numpy.roll(cols[c], power * spec.deltas[c], axis=0)
                       for c in (0, 1)])
    return out.reshape(numpy.shape(state))


def coin_layer_matrix(layer, spec):
    """ Dense C^(t) = sum_x c_x (x) |x><x| in coin-major order """
    layer = numpy.asarray(layer, dtype=complex)
    matrix = numpy.zeros((spec.dim, spec.dim), dtype=complex)
    for x in range(spec.n):
        for a in (0, 1):
            for b in (0, 1):
                matrix[spec.index(a, x), spec.index(b, x)] = layer[x, a, b]
    return matrix


def dense_walk_unitary(schedule, spec):
    """ Time-ordered dense product of S C^(t); reference for full_unitary """
    schedule = _check_schedule(schedule, spec)
    S = shift_matrix(spec)
    U = numpy.eye(spec.dim, dtype=complex)
    for layer in schedule:
        U = S @ coin_layer_matrix(layer, spec) @ U
    return U


def orbit_partition(spec):
    """ Split the 2n basis indices into minimal subsets closed under every
        walk, seen in the frame that moves with coin 0. Coins join |0, x>
        and |1, x>; relative to that frame coin 1 moves by delta1 - delta0.
        A T-step walk unitary maps each subset onto its image under
        S0^T (all sites moved by T delta0), so it is block-diagonal when
        delta0 = 0.

        :param spec: walk spec
        :returns: list of sorted index lists, ordered by smallest index
    """
    parent = list(range(spec.dim))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    relative = spec.delta1 - spec.delta0
    for x in range(spec.n):
        union(spec.index(0, x), spec.index(1, x))
        for c in (0, 1):
            union(spec.index(c, x), spec.index(c, x + relative))
    orbits = {}
    for i in range(spec.dim):
        orbits.setdefault(find(i), []).append(i)
    return [orbits[root] for root in sorted(orbits)]


def is_block_diagonal(matrix, partition, atol=1e-10):
    """ Check that ``matrix`` has no amplitude between different orbits """
    matrix = numpy.asarray(matrix)
    owner = numpy.empty(matrix.shape[0], dtype=int)
    for k, block in enumerate(partition):
        owner[block] = k
    mask = owner[:, None] != owner[None, :]
    return bool(numpy.all(numpy.abs(matrix[mask]) <= atol))


def position_distribution(state, spec):
    """ Site occupation probabilities sum_c |<c, x|state>|^2, shape (n,) for
        a single state and (n, m) for a batch
    """
    cols = _as_columns(state, spec)
    p = numpy.sum(numpy.abs(cols) ** 2, axis=0)
    return p[:, 0] if numpy.ndim(state) == 1 else p


def state_norm(state):
    return float(numpy.linalg.norm(state))


def check_normalized(state, atol=1e-12):
    """ Raise ValidationError unless the state has unit norm """
    if abs(state_norm(state) - 1) > atol:
        raise ValidationError("State is not normalized (norm " +
                              utils.format_float(state_norm(state)) + ")")
