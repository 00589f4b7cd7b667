"""Utility functions"""
import math
import click
import numpy

"""
=============================================================================
Error classes shared by all modules
=============================================================================
"""


class WalkError(Exception):
    """ Base class of all errors raised by this package """


class StructuralError(WalkError, ValueError):
    """ Dimension, shape or index mismatch between inputs """


class ValidationError(WalkError, ValueError):
    """ Input is mathematically invalid (eg. not unitary) """


class ConfigurationError(WalkError):
    """ Preset, config file or coin model is incomplete or inconsistent """


class UnsupportedSpecError(WalkError):
    """ The walk spec does not satisfy the universality condition.

        :param message: explanation
        :param orbits: closed subspaces of the walk (list of index lists)
    """
    def __init__(self, message, orbits=None):
        super().__init__(message)
        self.orbits = orbits or []


class TrainingDivergedError(WalkError):
    """ A loss or gradient became non-finite during training """


class ResourceError(WalkError):
    """ Output could not be written, or another resource is unavailable """


"""
=============================================================================
Utility functions for printing warnings, info messages etc.
=============================================================================
"""
verbose = True


def set_verbosity(enabled):
    """ Turn info output on or off. Warnings are always printed.

        :param enabled: whether printi and print_heading produce output
    """
    global verbose
    verbose = bool(enabled)


def print_warning(indent, string):
    """ Print a warning in orange

        :param indent: level of indentation to print at
        :param string: string to print
    """
    printi(indent, "WARNING: " + string, "ORANGE", force=True)


def print_heading(string, step=-1):
    """ Print something out on the terminal in blue with underlines

        :param string: heading to be printed
        :param step: step number
    """
    to_print = '\n===> '
    if (step > -1):
        to_print += "Step " + str(step) + ": "
    to_print += string + "\n"
    to_print += ("=" * len(to_print))
    printi(1, to_print, "BLUE")


def printi(level, string, colour="None", force=False):
    """ Print something out with indents

        :param level: intentation level to print at
        :param string: string to be printed
        :param colour: colour to print with
        :param force: print even when info output is switched off
    """
    if not (verbose or force):
        return
    fg = {"ORANGE": "yellow", "GREEN": "green", "BLUE": "blue",
          "RED": "red"}.get(colour)
    click.echo(('\t' * level) + click.style(str(string), fg=fg))


def print_table(title, table, indent=0, col_width=0):
    """ Format a table of rows (lists of printable items) for the
        command line.

        :param title: table name
        :param table: table to be printed, first row is the header
        :param indent: level of indentation
        :param col_width: Fixed column width, optional
    """
    ncols = max(len(row) for row in table)
    widths = [col_width] * ncols
    if (col_width == 0):
        for row in table:
            for i, item in enumerate(row):
                widths[i] = max(widths[i], len(str(item)) + 4)
    rule = "\t" * indent + '-' * sum(widths)
    lines = ["", rule, "\t" * indent + title, rule]
    for row in table:
        line = "".join(('{:<' + str(widths[i]) + 's}').format(str(item))
                       for i, item in enumerate(row))
        lines.append("\t" * indent + line)
    return "\n".join(lines)


def format_float(value):
    """ Short scientific rendering used in tables and progress lines """
    return "{:.3e}".format(value)


"""
=============================================================================
Utility functions for small matrix checks
=============================================================================
"""
SIGMA = numpy.array([[[1, 0], [0, 1]],
                     [[0, 1], [1, 0]],
                     [[0, -1j], [1j, 0]],
                     [[1, 0], [0, -1]]], dtype=complex)


def is_unitary(matrix, atol=1e-10):
    """ Check U^dagger U = I within atol (max-abs entry deviation)

        :param matrix: square matrix
        :param atol: tolerance
    """
    matrix = numpy.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    deviation = matrix.conj().T @ matrix - numpy.eye(matrix.shape[0])
    return bool(numpy.max(numpy.abs(deviation), initial=0.0) <= atol)


def require_unitary(matrix, what="matrix", atol=1e-10):
    """ Raise ValidationError unless ``matrix`` is unitary

        :param matrix: square matrix
        :param what: name used in the error message
        :param atol: tolerance
    """
    matrix = numpy.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StructuralError(what + " must be square, got shape " +
                              str(matrix.shape))
    if not is_unitary(matrix, atol):
        raise ValidationError(what + " is not unitary within " + str(atol))
    return matrix


def pauli_combination(vectors):
    """ Contract real 4-vectors with (sigma0, sigma1, sigma2, sigma3)

        :param vectors: array of shape (..., 4)
        :returns: array of shape (..., 2, 2)
    """
    return numpy.tensordot(numpy.asarray(vectors, dtype=float), SIGMA,
                           axes=([-1], [0]))


def pauli_rotation(beta, axis):
    """ Closed form exp(i beta (u . sigma))
        = cos(beta) I + i sin(beta) (u . sigma)
        for real unit vectors u over (sigma1, sigma2, sigma3).

        :param beta: angle(s), broadcastable array
        :param axis: unit vector(s) of shape (..., 3)
        :returns: array of shape broadcast(beta, axis[..., 0]) + (2, 2)
    """
    beta = numpy.asarray(beta, dtype=float)
    axis = numpy.asarray(axis, dtype=float)
    generator = numpy.tensordot(axis, SIGMA[1:], axes=([-1], [0]))
    return (numpy.cos(beta)[..., None, None] * SIGMA[0] +
            1j * numpy.sin(beta)[..., None, None] * generator)


def wrap_angle(angle):
    """ Map an angle to (-pi, pi] """
    wrapped = math.remainder(float(angle), 2 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2 * math.pi
    return wrapped
