"""Console script for dtqw_cycle_qnn."""
import functools
import os
import sys
import click
from . import coin_models
from . import experiments
from . import utils
from . import walk_core
from .utils import ResourceError, WalkError


@click.group()
def cli():  # pragma: no cover
    pass


def reports_errors(command):
    """ Print package errors as warnings and exit with 1 (invalid input) or
        2 (resource problems)
    """
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ResourceError as e:
            utils.print_warning(0, str(e))
            sys.exit(2)
        except WalkError as e:
            utils.print_warning(0, str(e))
            sys.exit(1)
    return wrapper


def run_options(command):
    """ Options shared by train and sweep """
    options = [
        click.option('--config', required=False, default=None,
                     help='JSON or YAML file overriding preset fields',
                     type=click.File('rb')),
        click.option('--seed', type=int, default=None,
                     help='Master seed'),
        click.option('--max-updates', type=int, default=None,
                     help='Update budget per sample'),
        click.option('--stop-distance', type=float, default=None,
                     help='Stop a sample once its distance falls below'),
        click.option('--samples', type=int, default=None,
                     help='Number of samples to train'),
        click.option('--threads', type=int, default=1,
                     help='Number of worker processes'),
        click.option('--quiet', is_flag=True, default=False,
                     help='Only print warnings'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _overrides(seed, max_updates, stop_distance, samples):
    return {"seed": seed, "max_updates": max_updates,
            "stop_distance": stop_distance, "sample_count": samples}


def _print_report(report):
    rows = [["update", "average", "worst"]]
    last = len(report.updates) - 1
    step = max(1, len(report.updates) // 10)
    for i in sorted(set(range(0, last, step)) | {last}):
        rows.append([report.updates[i], utils.format_float(report.average[i]),
                     utils.format_float(report.worst[i])])
    utils.printi(0, utils.print_table("Distance", rows, 1))
    rows = [["threshold", "fraction above"]]
    for x in experiments.exceedance_thresholds:
        rows.append(["{:.0e}".format(x), "{:.3f}".format(
            experiments.exceedance_at(report.final_distances, x))])
    utils.printi(0, utils.print_table("Final distances", rows, 1))


@click.command()
@click.option('--preset', required=False, default=None,
              help='Name of the experiment preset')
@run_options
@click.option('--out', required=False, default=None,
              help='Output directory (default runs/<preset name>)')
@reports_errors
def train(preset, config, seed, max_updates, stop_distance, samples, threads,
          quiet, out):
    """Train the samples of one preset and write their results"""
    utils.set_verbosity(not quiet)
    document = experiments.load_config(config) if config else None
    resolved = experiments.resolve_preset(
        preset, document, _overrides(seed, max_updates, stop_distance,
                                     samples))
    out = out or os.path.join("runs", resolved["name"])
    report = experiments.run_preset(resolved, out, threads)
    _print_report(report)
    utils.printi(1, "Results written to " + out, "GREEN")
    return 0


@click.command()
@click.option('--preset', required=True, multiple=True,
              help='Preset to run, may be repeated')
@run_options
@click.option('--out', required=False, default="runs",
              help='Directory receiving one subdirectory per preset')
@reports_errors
def sweep(preset, config, seed, max_updates, stop_distance, samples, threads,
          quiet, out):
    """Run several presets one after the other"""
    utils.set_verbosity(not quiet)
    document = experiments.load_config(config) if config else None
    # preset names pick the output subdirectories
    resolved = [dict(experiments.resolve_preset(
        name, document, _overrides(seed, max_updates, stop_distance,
                                   samples)), name=name)
        for name in preset]
    for step, p in enumerate(resolved):
        utils.print_heading(p["name"], step)
        experiments.run_preset(p, os.path.join(out, p["name"]), threads)
    return 0


@click.command()
@click.option('--n', 'n', default=2, help='Number of cycle sites')
@click.option('--delta0', default=0, help='Shift of coin state 0')
@click.option('--delta1', default=1, help='Shift of coin state 1')
@click.option('--trials', default=50, help='Number of random targets')
@click.option('--seed', default=0, help='Seed of the random targets')
@click.option('--identity', is_flag=True, default=False,
              help='Compile the identity instead of Haar-random targets')
@reports_errors
def synth(n, delta0, delta1, trials, seed, identity):
    """Compile random unitaries exactly and report the error"""
    spec = walk_core.WalkSpec(n, delta0, delta1)
    result = experiments.run_synthesis_check(
        spec, trials, seed, "identity" if identity else "haar_unitary")
    rows = [["quantity", "value"],
            ["trials", result["trials"]],
            ["max distance", utils.format_float(result["max_distance"])],
            ["max layers", result["max_layers"]],
            ["mean layers", "{:.1f}".format(result["mean_layers"])],
            ["max two-level factors", result["max_factors"]]]
    utils.printi(0, utils.print_table("Exact synthesis on " + repr(spec),
                                      rows, 1))
    return 0


@click.command()
@click.argument('run_dirs', nargs=-1, required=True)
@click.option('--out', required=False, default=None,
              help='Directory receiving the merged files')
@reports_errors
def summarize(run_dirs, out):
    """Merge runs that share an evaluation grid"""
    merged = experiments.summarize(run_dirs, out)
    rows = [["threshold", "fraction above"]] + \
        [[k, "{:.3f}".format(v)] for k, v in merged["exceedance"].items()]
    utils.printi(0, utils.print_table(
        merged["preset"] + " (" + str(len(merged["samples"])) + " samples)",
        rows, 1))
    return 0


@click.command()
def presets():
    """List the built-in presets"""
    rows = [["name", "n", "T", "eta", "target", "variant", "samples",
             "updates"]]
    for name in sorted(experiments.presets):
        p = experiments.presets[name]
        rows.append([name, p["n"], p["T"], p["eta"], p["target"],
                     p["variant"], p["sample_count"], p["max_updates"]])
    utils.printi(0, utils.print_table("Presets", rows))
    return 0


@click.command()
@click.option('--n', 'n', default=8, help='Number of cycle sites')
@click.option('--steps', default=4, help='Number of walk steps')
@click.option('--coin', default='hadamard',
              help='Homogeneous coin: hadamard or identity')
@click.option('--delta0', default=1, help='Shift of coin state 0')
@click.option('--delta1', default=-1, help='Shift of coin state 1')
@click.option('--c', 'c', default=0, help='Initial coin state')
@click.option('--x', 'x', default=0, help='Initial site')
@reports_errors
def walk(n, steps, coin, delta0, delta1, c, x):
    """Print the position distribution of a homogeneous walk"""
    spec = walk_core.WalkSpec(n, delta0, delta1)
    distribution = experiments.simulate_walk(spec, steps, coin, c, x)
    rows = [["site", "probability"]] + \
        [[site, "{:.6f}".format(p)] for site, p in enumerate(distribution)]
    utils.printi(0, utils.print_table(coin + " walk after " + str(steps) +
                                      " steps", rows, 1))
    return 0


@click.command()
@click.option('--n', 'n', default=2, help='Number of cycle sites')
@click.option('--layers', 'T', default=3, help='Number of layers')
@click.option('--variant', default='full',
              type=click.Choice(sorted(coin_models.per_site_parameters)))
@click.option('--target', default='haar_unitary',
              type=click.Choice(experiments.target_kinds))
@click.option('--seed', default=0, help='Seed of the random instance')
@reports_errors
def gradcheck(n, T, variant, target, seed):
    """Compare analytic, finite-difference and readout-circuit gradients"""
    spec = walk_core.WalkSpec(n)
    result = experiments.gradient_check(spec, T, variant, seed, target)
    rows = [["comparison", "max deviation"]] + \
        [[k, utils.format_float(v)] for k, v in result.items()
         if k != "parameters"]
    utils.printi(0, utils.print_table(
        "Gradient check (" + str(result["parameters"]) + " parameters)",
        rows, 1))
    return 0


cli.add_command(train)
cli.add_command(sweep)
cli.add_command(synth)
cli.add_command(summarize)
cli.add_command(presets)
cli.add_command(walk)
cli.add_command(gradcheck)

if __name__ == "__main__":
    cli()  # pragma: no cover
