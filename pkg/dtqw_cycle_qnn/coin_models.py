"""
    Single-site coin operators realized from real parameters.

    Full model (four angles per coin):
        c = exp(i a3 s3) exp(i a2 s2) exp(i a1 s1) exp(i a0)
    Constrained models share a fixed random phase a(x) per site:
        fixed_phase  c = exp(i a(x)) exp(i a3 s3) exp(i a2 s2) exp(i a1 s1)
        x_rotation   c = exp(i a(x)) exp(i a s1)
        noisy_axis   c = exp(i a(x)) exp(i a (n(x,t) . s))
        correlated   c = exp(i (a(x) + a)) exp(i a s1)

    Parameter tensors have shape (T, n, k) with k the per-site count of the
    model. Generators are right-placed: d c / d alpha_k = c . (i G_k).
"""
from dataclasses import dataclass
import math
import numpy
from . import utils
from .utils import ConfigurationError, StructuralError

FULL = "full"
FIXED_PHASE = "fixed_phase"
X_ROTATION = "x_rotation"
NOISY_AXIS = "noisy_axis"
CORRELATED = "correlated"
per_site_parameters = {FULL: 4, FIXED_PHASE: 3, X_ROTATION: 1,
                       NOISY_AXIS: 1, CORRELATED: 1}
_axes = numpy.eye(3)


@dataclass(frozen=True)
class SitePhaseTable:
    """ One fixed phase a(x) per site, radians """
    a: numpy.ndarray

    @property
    def n(self):
        return len(self.a)


@dataclass(frozen=True)
class AxisNoiseTable:
    """ Per-layer, per-site perturbation of the x rotation axis """
    theta: numpy.ndarray
    phi: numpy.ndarray

    @property
    def shape(self):
        return numpy.shape(self.theta)

    def axes(self):
        """ Unit rotation axes (cos th, sin th cos ph, sin th sin ph),
            shape (T, n, 3)
        """
        theta = numpy.asarray(self.theta, dtype=float)
        phi = numpy.asarray(self.phi, dtype=float)
        return numpy.stack([numpy.cos(theta),
                            numpy.sin(theta) * numpy.cos(phi),
                            numpy.sin(theta) * numpy.sin(phi)], axis=-1)


class CoinModel:
    """ A coin parameterization together with the fixed tables it needs

        :param tag: one of full, fixed_phase, x_rotation, noisy_axis,
                    correlated
        :param phases: SitePhaseTable (all tags except full)
        :param noise: AxisNoiseTable (noisy_axis only)
    """
    def __init__(self, tag=FULL, phases=None, noise=None):
        if tag not in per_site_parameters:
            raise ConfigurationError("Unknown coin model '" + str(tag) +
                                     "', expected one of " +
                                     str(sorted(per_site_parameters)))
        if tag != FULL and phases is None:
            raise ConfigurationError("Coin model " + tag +
                                     " requires a site phase table")
        if tag == NOISY_AXIS and noise is None:
            raise ConfigurationError("Coin model " + tag +
                                     " requires an axis noise table")
        if noise is not None and \
                numpy.shape(noise.theta) != numpy.shape(noise.phi):
            raise StructuralError("Axis noise tables theta and phi differ " +
                                  "in shape")
        self.tag = tag
        self.phases = phases
        self.noise = noise

    @property
    def k(self):
        """ Trainable reals per coin """
        return per_site_parameters[self.tag]

    def check_shape(self, params):
        """ Raise StructuralError if params do not fit this model's tables

            :param params: parameter tensor (T, n, k)
        """
        params = numpy.asarray(params, dtype=float)
        if params.ndim != 3 or params.shape[2] != self.k:
            raise StructuralError("Parameters for coin model " + self.tag +
                                  " must have shape (T, n, " + str(self.k) +
                                  "), got " + str(params.shape))
        T, n = params.shape[:2]
        if self.phases is not None and self.phases.n != n:
            raise StructuralError("Site phase table covers " +
                                  str(self.phases.n) + " sites, parameters " +
                                  "cover " + str(n))
        if self.tag == NOISY_AXIS and self.noise.shape != (T, n):
            raise StructuralError("Axis noise table has shape " +
                                  str(self.noise.shape) + ", expected " +
                                  str((T, n)))
        return params

    def to_dict(self):
        out = {"variant": self.tag}
        if self.phases is not None:
            out["phases"] = [float(a) for a in self.phases.a]
        return out

    def __repr__(self):
        return "CoinModel(" + self.tag + ")"


def realize_full(angles):
    """ exp(i a3 s3) exp(i a2 s2) exp(i a1 s1) exp(i a0 s0)

        :param angles: (a0, a1, a2, a3) radians
    """
    a0, a1, a2, a3 = (float(a) for a in angles)
    return (utils.pauli_rotation(a3, _axes[2]) @
            utils.pauli_rotation(a2, _axes[1]) @
            utils.pauli_rotation(a1, _axes[0]) * numpy.exp(1j * a0))


def realize_variant(model, x, t, free_params):
    """ Realize the coin of ``model`` at site x during step t

        :param model: CoinModel
        :param x: site index
        :param t: step index (selects the axis noise entry)
        :param free_params: the k trainable reals of this coin
    """
    free_params = numpy.asarray(free_params, dtype=float).ravel()
    if len(free_params) != model.k:
        raise StructuralError("Coin model " + model.tag + " takes " +
                              str(model.k) + " parameters, got " +
                              str(len(free_params)))
    if model.tag == FULL:
        return realize_full(free_params)
    phase = numpy.exp(1j * model.phases.a[x])
    if model.tag == FIXED_PHASE:
        return phase * realize_full([0.0] + list(free_params))
    alpha = free_params[0]
    if model.tag == X_ROTATION:
        return phase * utils.pauli_rotation(alpha, _axes[0])
    if model.tag == NOISY_AXIS:
        axis = model.noise.axes()[t, x]
        return phase * utils.pauli_rotation(alpha, axis)
    return phase * numpy.exp(1j * alpha) * \
        utils.pauli_rotation(alpha, _axes[0])


def realize_schedule(model, params):
    """ Realize every coin of a parameter tensor at once

        :param model: CoinModel
        :param params: parameter tensor (T, n, k)
        :returns: coin schedule (T, n, 2, 2)
    """
    params = model.check_shape(params)
    if model.tag in (FULL, FIXED_PHASE):
        offset = 1 if model.tag == FULL else 0
        coins = (utils.pauli_rotation(params[..., offset + 2], _axes[2]) @
                 utils.pauli_rotation(params[..., offset + 1], _axes[1]) @
                 utils.pauli_rotation(params[..., offset], _axes[0]))
        if model.tag == FULL:
            phase = numpy.exp(1j * params[..., 0])
        else:
            phase = numpy.exp(1j * model.phases.a)[None, :]
        return coins * phase[..., None, None]
    alpha = params[..., 0]
    phase = numpy.exp(1j * numpy.asarray(model.phases.a))[None, :]
    if model.tag == NOISY_AXIS:
        coins = utils.pauli_rotation(alpha, model.noise.axes())
    else:
        coins = utils.pauli_rotation(alpha, _axes[0])
    if model.tag == CORRELATED:
        phase = phase * numpy.exp(1j * alpha)
    return coins * phase[..., None, None]


def generator_vectors(model, params):
    """ Real 4-vectors g with G = g . (s0, s1, s2, s3), shape (T, n, k, 4) """
    params = model.check_shape(params)
    T, n = params.shape[:2]
    if model.tag in (FULL, FIXED_PHASE):
        offset = 1 if model.tag == FULL else 0
        a1 = 2 * params[..., offset]
        a2 = 2 * params[..., offset + 1]
        zeros = numpy.zeros((T, n))
        ones = numpy.ones((T, n))
        n1 = numpy.stack([zeros, ones, zeros, zeros], axis=-1)
        n2 = numpy.stack([zeros, zeros, numpy.cos(a1), numpy.sin(a1)],
                         axis=-1)
        n3 = numpy.stack([zeros, numpy.sin(a2),
                          -numpy.cos(a2) * numpy.sin(a1),
                          numpy.cos(a2) * numpy.cos(a1)], axis=-1)
        vectors = [n1, n2, n3]
        if model.tag == FULL:
            vectors.insert(0, numpy.stack([ones, zeros, zeros, zeros],
                                          axis=-1))
        return numpy.stack(vectors, axis=2)
    if model.tag == NOISY_AXIS:
        axes = model.noise.axes()
        vector = numpy.concatenate([numpy.zeros((T, n, 1)), axes], axis=-1)
    elif model.tag == CORRELATED:
        vector = numpy.broadcast_to([1.0, 1.0, 0.0, 0.0], (T, n, 4))
    else:
        vector = numpy.broadcast_to([0.0, 1.0, 0.0, 0.0], (T, n, 4))
    return numpy.array(vector)[:, :, None, :]


def generators(model, params):
    """ Hermitian generators G_k of every coin, shape (T, n, k, 2, 2) """
    return utils.pauli_combination(generator_vectors(model, params))


def parameter_count(model, T, n):
    """ Number of trainable reals of a T-layer walk on n sites

        :param model: CoinModel or tag string
    """
    tag = model.tag if isinstance(model, CoinModel) else model
    if tag not in per_site_parameters:
        raise ConfigurationError("Unknown coin model '" + str(tag) + "'")
    return per_site_parameters[tag] * T * n


def random_phase_table(n, rng):
    """ a(x) uniform on [0, 2 pi] """
    return SitePhaseTable(rng.uniform(0, 2 * math.pi, size=n))


def random_axis_noise(T, n, rng, std=0.01):
    """ theta ~ normal(0, std), phi ~ uniform [0, 2 pi] """
    return AxisNoiseTable(theta=rng.normal(0, std, size=(T, n)),
                          phi=rng.uniform(0, 2 * math.pi, size=(T, n)))


def build_model(tag, T, n, rng, noise_std=0.01, phases=None):
    """ Create a CoinModel, sampling whichever tables the tag needs

        :param tag: coin model tag
        :param T: layer count (for the axis noise table)
        :param n: site count
        :param rng: numpy Generator for the tables
        :param noise_std: standard deviation of the axis tilt theta
        :param phases: shared SitePhaseTable to reuse instead of sampling
    """
    if tag not in per_site_parameters:
        raise ConfigurationError("Unknown coin model '" + str(tag) + "'")
    if tag == FULL:
        return CoinModel(FULL)
    if phases is None:
        phases = random_phase_table(n, rng)
    noise = None
    if tag == NOISY_AXIS:
        noise = random_axis_noise(T, n, rng, noise_std)
    return CoinModel(tag, phases, noise)


def initial_parameters(model, T, n, rng):
    """ Angles uniform on [-2 pi, 2 pi], independently """
    return rng.uniform(-2 * math.pi, 2 * math.pi, size=(T, n, model.k))


def phase_difference(phases):
    """ a(0) - a(1) mapped to (-pi, pi] """
    return utils.wrap_angle(phases.a[0] - phases.a[1])
