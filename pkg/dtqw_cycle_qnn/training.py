"""
    Gradient-descent training of coin schedules towards target unitaries
    and two-outcome POVMs.

    Both targets share one loss form. The walk starts in Psi^(0) and should
    end in Phi^(T):
        unitary   Psi^(0) = psi,               Phi^(T) = V psi
        POVM      Psi^(0) = |0>_c (x) psi_p,
                  Phi^(T) = sum_j |j>_c (x) M_j psi_p
    and L = 1/2 |U Psi^(0) - Phi^(T)|^2. The gradient entry of the coin angle
    (t, x, j) is Im <Phi^(t)| G_j (x) |x><x| |Psi^(t)>, with Psi^(t) the state
    before coin layer t and Phi^(t) = U_{T,t}^dagger Phi^(T).
"""
from dataclasses import dataclass, field
import math
import numpy
import scipy.linalg
from . import coin_models
from . import utils
from . import walk_core
from .utils import (ConfigurationError, StructuralError,
                    TrainingDivergedError, ValidationError)

POVM_TOL = 1e-10


"""
=============================================================================
Targets
=============================================================================
"""


@dataclass(frozen=True)
class Unitary:
    """ Unitary target V on the full 2n-dimensional walker space """
    V: numpy.ndarray

    def __post_init__(self):
        object.__setattr__(self, "V", utils.require_unitary(self.V, "Target"))

    kind = "unitary"

    def check_spec(self, spec):
        if self.V.shape[0] != spec.dim:
            raise StructuralError("Target of dimension " +
                                  str(self.V.shape[0]) + " does not match " +
                                  "walk dimension " + str(spec.dim))


@dataclass(frozen=True)
class Povm2:
    """ Two-outcome measurement (M0, M1) on the n-dimensional position
        space, read out through the coin after the walk
    """
    M0: numpy.ndarray
    M1: numpy.ndarray

    kind = "povm"

    def __post_init__(self):
        M0 = numpy.asarray(self.M0, dtype=complex)
        M1 = numpy.asarray(self.M1, dtype=complex)
        if M0.ndim != 2 or M0.shape[0] != M0.shape[1] or M0.shape != M1.shape:
            raise StructuralError("POVM operators must be square and of " +
                                  "equal shape, got " + str(M0.shape) +
                                  " and " + str(M1.shape))
        completeness = M0.conj().T @ M0 + M1.conj().T @ M1
        deviation = numpy.max(numpy.abs(completeness - numpy.eye(len(M0))),
                              initial=0.0)
        if deviation > POVM_TOL:
            raise ValidationError("M0^dagger M0 + M1^dagger M1 deviates " +
                                  "from the identity by " +
                                  utils.format_float(deviation))
        object.__setattr__(self, "M0", M0)
        object.__setattr__(self, "M1", M1)

    @property
    def operators(self):
        return (self.M0, self.M1)

    def check_spec(self, spec):
        if self.M0.shape[0] != spec.n:
            raise StructuralError("POVM on dimension " +
                                  str(self.M0.shape[0]) + " does not match " +
                                  "cycle size " + str(spec.n))


"""
=============================================================================
Random sampling and standard targets
=============================================================================
"""


def _rng(rng):
    return numpy.random.default_rng() if rng is None else rng


def haar_state(dim, rng=None):
    """ Haar-random pure state: a normalized complex Gaussian vector """
    if dim < 1:
        raise StructuralError("State dimension must be >= 1")
    rng = _rng(rng)
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / numpy.linalg.norm(z)


def haar_unitary(dim, rng=None):
    """ Haar-random unitary: QR of a complex Gaussian matrix with the phases
        of R's diagonal moved into Q
    """
    if dim < 1:
        raise StructuralError("Unitary dimension must be >= 1")
    rng = _rng(rng)
    z = (rng.normal(size=(dim, dim)) +
         1j * rng.normal(size=(dim, dim))) / math.sqrt(2)
    q, r = scipy.linalg.qr(z)
    d = numpy.diag(r)
    return q * (d / numpy.abs(d))


def haar_povm(n, rng=None):
    """ M_j = <j|_c W |0>_c for a Haar-random W on the 2n-dimensional space """
    W = haar_unitary(2 * n, rng)
    return Povm2(W[:n, :n], W[n:, :n])


def qft_target(dim):
    """ F[j, k] = exp(2 pi i jk / dim) / sqrt(dim) over basis indices """
    j = numpy.arange(dim)
    return numpy.exp(2j * math.pi * numpy.outer(j, j) / dim) / math.sqrt(dim)


def position_unitary_target(W):
    """ Control a unitary W on the position space through the coin readout:
        outcome 0 carries W psi_p, outcome 1 nothing
    """
    W = utils.require_unitary(W, "Position-space target")
    return Povm2(W, numpy.zeros_like(W))


"""
=============================================================================
Loss, gradients and distances
=============================================================================
"""


def _sweep(params, spec, model, psi0, phi_T, with_grad=True):
    """ Loss 1/2 |U psi0 - phi_T|^2 and, optionally, its gradient from one
        forward and one backward sweep
    """
    schedule = coin_models.realize_schedule(model, params)
    T = schedule.shape[0]
    forward = numpy.empty((T, spec.dim), dtype=complex)
    state = numpy.asarray(psi0, dtype=complex)
    for t in range(T):
        forward[t] = state
        state = walk_core.apply_shift(
            walk_core.apply_coin_layer(state, schedule[t], spec), spec)
    diff = state - phi_T
    loss_value = 0.5 * float(numpy.vdot(diff, diff).real)
    if not with_grad:
        return loss_value, None
    gens = coin_models.generators(model, params)
    gradient = numpy.zeros(numpy.shape(params))
    phi = numpy.asarray(phi_T, dtype=complex)
    for t in range(T - 1, -1, -1):
        phi = walk_core.apply_shift(phi, spec, inverse=True)
        phi = walk_core.apply_coin_layer(
            phi, schedule[t].conj().transpose(0, 2, 1), spec)
        gradient[t] = numpy.einsum('ax,xjab,bx->xj',
                                   phi.reshape(2, spec.n).conj(), gens[t],
                                   forward[t].reshape(2, spec.n)).imag
    return loss_value, gradient


def _unitary_boundary(spec, psi, target):
    target.check_spec(spec)
    psi = numpy.asarray(psi, dtype=complex)
    if psi.shape != (spec.dim,):
        raise StructuralError("Walker state must have shape (" +
                              str(spec.dim) + ",), got " + str(psi.shape))
    walk_core.check_normalized(psi, atol=1e-10)
    return psi, target.V @ psi


def _povm_boundary(spec, psi_p, target):
    target.check_spec(spec)
    psi_p = numpy.asarray(psi_p, dtype=complex)
    if psi_p.shape != (spec.n,):
        raise StructuralError("Position state must have shape (" +
                              str(spec.n) + ",), got " + str(psi_p.shape))
    walk_core.check_normalized(psi_p, atol=1e-10)
    psi0 = numpy.concatenate([psi_p, numpy.zeros(spec.n, dtype=complex)])
    return psi0, numpy.concatenate([target.M0 @ psi_p, target.M1 @ psi_p])


def loss(params, spec, model, psi, target):
    """ 1/2 |U psi - V psi|^2, in [0, 2] """
    psi0, phi_T = _unitary_boundary(spec, psi, target)
    return _sweep(params, spec, model, psi0, phi_T, with_grad=False)[0]


def grad(params, spec, model, psi, target):
    """ Gradient of :func:`loss` with respect to the (T, n, k) parameters """
    psi0, phi_T = _unitary_boundary(spec, psi, target)
    return _sweep(params, spec, model, psi0, phi_T)[1]


def povm_loss(params, spec, model, psi_p, target):
    """ 1/2 sum_j |<j|_c U |0>_c psi_p - M_j psi_p|^2 """
    psi0, phi_T = _povm_boundary(spec, psi_p, target)
    return _sweep(params, spec, model, psi0, phi_T, with_grad=False)[0]


def povm_grad(params, spec, model, psi_p, target):
    """ Gradient of :func:`povm_loss` """
    psi0, phi_T = _povm_boundary(spec, psi_p, target)
    return _sweep(params, spec, model, psi0, phi_T)[1]


def loss_and_grad(params, spec, model, psi, target):
    """ Loss and gradient for either target kind, sharing one sweep """
    if target.kind == "povm":
        psi0, phi_T = _povm_boundary(spec, psi, target)
    else:
        psi0, phi_T = _unitary_boundary(spec, psi, target)
    return _sweep(params, spec, model, psi0, phi_T)


def sgd_step(params, grad_tensor, eta):
    """ alpha <- alpha - eta dL/dalpha """
    params = numpy.asarray(params, dtype=float)
    grad_tensor = numpy.asarray(grad_tensor, dtype=float)
    if params.shape != grad_tensor.shape:
        raise StructuralError("Gradient shape " + str(grad_tensor.shape) +
                              " does not match parameter shape " +
                              str(params.shape))
    if not eta > 0:
        raise ValidationError("Learning rate must be positive, got " +
                              str(eta))
    return params - eta * grad_tensor


def distance_unitary(U, V):
    """ sqrt(1 - |tr(U V^dagger) / dim|^2), insensitive to global phase.

        For unitaries 1 - |z| equals |U - e^{i arg z} V|_F^2 / (2 dim), so the
        radicand is evaluated as s (2 - s) from that norm.
    """
    U = numpy.asarray(U)
    V = numpy.asarray(V)
    if U.shape != V.shape or U.ndim != 2:
        raise StructuralError("Cannot compare unitaries of shape " +
                              str(U.shape) + " and " + str(V.shape))
    dim = U.shape[0]
    z = numpy.trace(U @ V.conj().T) / dim
    phase = z / abs(z) if abs(z) > 0 else 1.0
    s = numpy.linalg.norm(U - phase * V) ** 2 / (2 * dim)
    return math.sqrt(min(max(s * (2 - s), 0.0), 1.0))


def distance_povm(N0, N1, M0, M1):
    """ Per-outcome phase-insensitive distance of (N0, N1) to (M0, M1) """
    pairs = [(numpy.asarray(N, dtype=complex), numpy.asarray(M, dtype=complex))
             for N, M in ((N0, M0), (N1, M1))]
    n = pairs[0][0].shape[0]
    total = 0.0
    for N, M in pairs:
        if N.shape != M.shape or N.shape != (n, n):
            raise StructuralError("Cannot compare POVM operators of shape " +
                                  str(N.shape) + " and " + str(M.shape))
        tm = numpy.trace(M.conj().T @ M).real
        tn = numpy.trace(N.conj().T @ N).real
        cross = abs(numpy.trace(N.conj().T @ M))
        total += math.sqrt(max(tm ** 2 + tn ** 2 - 2 * cross ** 2, 0.0))
    return total / (2 * n * math.sqrt(2))


def walk_povm(params, spec, model):
    """ (N0, N1) with N_j = <j|_c U |0>_c, the walk's measurement """
    schedule = coin_models.realize_schedule(model, params)
    columns = numpy.eye(spec.dim, spec.n, dtype=complex)
    out = walk_core.evolve(columns, schedule, spec)
    return out[:spec.n], out[spec.n:]


def walk_unitary(params, spec, model):
    return walk_core.full_unitary(coin_models.realize_schedule(model, params),
                                  spec)


def target_distance(params, spec, model, target):
    """ distance_unitary or distance_povm, by target kind """
    if target.kind == "povm":
        N0, N1 = walk_povm(params, spec, model)
        return distance_povm(N0, N1, target.M0, target.M1)
    return distance_unitary(walk_unitary(params, spec, model), target.V)


def mean_loss(params, spec, model, target):
    """ Loss averaged over Haar-random input states, in closed form """
    if target.kind == "povm":
        N = walk_povm(params, spec, model)
        return 0.5 * sum(numpy.linalg.norm(Nj - Mj) ** 2 for Nj, Mj in
                         zip(N, target.operators)) / spec.n
    U = walk_unitary(params, spec, model)
    return 1 - float(numpy.trace(target.V.conj().T @ U).real) / spec.dim


def finite_difference_grad(fn, params, step=1e-6):
    """ Central differences of a scalar function of the parameter tensor """
    params = numpy.asarray(params, dtype=float)
    out = numpy.zeros(params.shape)
    for index in numpy.ndindex(*params.shape):
        shifted = params.copy()
        shifted[index] += step
        upper = fn(shifted)
        shifted[index] -= 2 * step
        out[index] = (upper - fn(shifted)) / (2 * step)
    return out


def hadamard_test_gradient(params, spec, model, Psi, target, which):
    """ Simulate reading one gradient entry off an ancilla qubit.

        The ancilla starts in (|0> + |1>)/sqrt(2). Branch 0 runs V, branch 1
        runs U_{T,t} Sigma U_{t,0}, where Sigma applies a Pauli operator at
        site x and +I or -I on every other site. After S^dagger and a
        Hadamard on the ancilla,
        <sigma3> = Im <V Psi| U_{T,t} Sigma U_{t,0} Psi>.
        The two sign choices are averaged and weighted by the Pauli
        components of the generator.

        :param which: (j, x, t) gradient index
        :returns: value equal to grad(...)[t, x, j]
    """
    j, x, t = which
    psi0, phi_T = _unitary_boundary(spec, Psi, target)
    schedule = coin_models.realize_schedule(model, params)
    T = schedule.shape[0]
    if not (0 <= t < T and 0 <= x < spec.n and 0 <= j < model.k):
        raise StructuralError("Gradient index " + str(which) +
                              " is out of range")
    weights = coin_models.generator_vectors(model, params)[t, x, j]
    before = walk_core.evolve(psi0, schedule, spec, 0, t)
    readout = 0.0
    for k in range(4):
        if weights[k] == 0:
            continue
        for sign in (1, -1):
            layer = numpy.broadcast_to(sign * utils.SIGMA[0],
                                       (spec.n, 2, 2)).copy()
            layer[x] = utils.SIGMA[k]
            branch = walk_core.apply_coin_layer(before, layer, spec)
            branch = walk_core.evolve(branch, schedule, spec, t, T)
            readout += 0.5 * weights[k] * _ancilla_readout(phi_T, branch)
    return readout


def _ancilla_readout(branch0, branch1):
    """ <sigma3> of the ancilla after S^dagger and H on
        (|0> branch0 + |1> branch1) / sqrt(2)
    """
    r0 = branch0 / math.sqrt(2)
    r1 = -1j * branch1 / math.sqrt(2)
    up = (r0 + r1) / math.sqrt(2)
    down = (r0 - r1) / math.sqrt(2)
    return float(numpy.vdot(up, up).real - numpy.vdot(down, down).real)


"""
=============================================================================
Training loop
=============================================================================
"""


@dataclass
class TrainConfig:
    """ Hyperparameters of one training run

        :param T: layer count
        :param eta: learning rate
        :param max_updates: update budget
        :param eval_every: updates between distance evaluations
        :param seed: master seed of the run
        :param variant: CoinModel
        :param stop_distance: stop once the distance falls below this
    """
    T: int
    eta: float = 0.05
    max_updates: int = 100000
    eval_every: int = 100
    seed: int = 0
    variant: coin_models.CoinModel = field(
        default_factory=coin_models.CoinModel)
    stop_distance: float = 0.0

    def __post_init__(self):
        if self.T < 0:
            raise ConfigurationError("T must be >= 0, got " + str(self.T))
        if not self.eta > 0:
            raise ConfigurationError("eta must be positive, got " +
                                     str(self.eta))
        if self.max_updates < 0:
            raise ConfigurationError("max_updates must be >= 0, got " +
                                     str(self.max_updates))
        if self.eval_every < 1:
            raise ConfigurationError("eval_every must be positive, got " +
                                     str(self.eval_every))
        if self.stop_distance < 0:
            raise ConfigurationError("stop_distance must be >= 0, got " +
                                     str(self.stop_distance))


@dataclass(frozen=True)
class EvalRecord:
    update: int
    loss: float
    distance: float


@dataclass
class TrainTrace:
    """ Evaluation records of one run and its final parameters """
    records: list
    params: numpy.ndarray
    updates_run: int = 0
    stopped_early: bool = False

    @property
    def final_distance(self):
        return self.records[-1].distance

    @property
    def distances(self):
        return [r.distance for r in self.records]


def seed_streams(seed, count=3):
    """ Independent generators for initialization, input states and noise
        tables, derived from one seed (an int or a SeedSequence)
    """
    if not isinstance(seed, numpy.random.SeedSequence):
        seed = numpy.random.SeedSequence(seed)
    return [numpy.random.default_rng(s) for s in seed.spawn(count)]


def train(config, spec, target, init=None, progress=False):
    """ Stochastic gradient descent on single Haar-random input states.

        :param config: TrainConfig
        :param spec: walk spec
        :param target: Unitary or Povm2
        :param init: initial (T, n, k) parameters, random when None
        :param progress: report each evaluation on the console
        :returns: TrainTrace
    """
    model = config.variant
    target.check_spec(spec)
    init_rng, state_rng = seed_streams(config.seed, 2)
    if init is None:
        params = coin_models.initial_parameters(model, config.T, spec.n,
                                                init_rng)
    else:
        params = numpy.array(init, dtype=float)
    params = model.check_shape(params)
    if params.shape[:2] != (config.T, spec.n):
        raise StructuralError("Initial parameters of shape " +
                              str(params.shape) + " do not match T=" +
                              str(config.T) + ", n=" + str(spec.n))
    state_dim = spec.n if target.kind == "povm" else spec.dim
    records = []

    def evaluate(update):
        record = EvalRecord(update, mean_loss(params, spec, model, target),
                            target_distance(params, spec, model, target))
        records.append(record)
        if progress:
            utils.printi(2, "update " + str(update) + ": distance " +
                         utils.format_float(record.distance))
        return record.distance < config.stop_distance

    if evaluate(0):
        return TrainTrace(records, params, 0, True)
    for update in range(1, config.max_updates + 1):
        psi = haar_state(state_dim, state_rng)
        value, gradient = loss_and_grad(params, spec, model, psi, target)
        if not (math.isfinite(value) and numpy.all(numpy.isfinite(gradient))):
            raise TrainingDivergedError("Non-finite loss or gradient at " +
                                        "update " + str(update) + " (loss " +
                                        str(value) + ")")
        params = sgd_step(params, gradient, config.eta)
        if update % config.eval_every == 0 and evaluate(update):
            return TrainTrace(records, params, update, True)
    return TrainTrace(records, params, config.max_updates, False)
