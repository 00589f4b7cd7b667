"""
    This file contains the user-facing functions that perform main tasks...
       - Validate and resolve experiment presets and config files
       - Train many independent walks in parallel and aggregate them
       - Write trace, histogram, exceedance and summary files
       - Check exact synthesis on random targets
"""
import csv
import json
import multiprocessing
import os
import time
from dataclasses import dataclass
import numpy
import yaml
from jsonschema import validate
from jsonschema import ValidationError as SchemaError
from . import coin_models
from . import synthesis
from . import training
from . import utils
from . import walk_core
from .utils import ConfigurationError, ResourceError, StructuralError

target_kinds = ["qft", "haar_unitary", "haar_povm", "position_unitary",
                "identity", "hadamard_walk"]
table_policies = ["shared", "independent"]
exceedance_thresholds = [1e-2, 1e-4, 1e-7]

# Schema to validate presets and config files
preset_schema = {
    "type": "object",
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "n": {"type": "integer", "minimum": 2},
        "delta0": {"type": "integer"},
        "delta1": {"type": "integer"},
        "target": {"type": "string", "enum": target_kinds},
        "T": {"type": "integer", "minimum": 0},
        "eta": {"type": "number", "exclusiveMinimum": 0},
        "sample_count": {"type": "integer", "minimum": 1},
        "variant": {"type": "string",
                    "enum": sorted(coin_models.per_site_parameters)},
        "table_policy": {"type": "string", "enum": table_policies},
        "noise_std": {"type": "number", "minimum": 0},
        "max_updates": {"type": "integer", "minimum": 0},
        "eval_every": {"type": "integer", "minimum": 1},
        "stop_distance": {"type": "number", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "hist_bins": {"type": "integer", "minimum": 1},
        "record_phase_difference": {"type": "boolean"}},
    "required": ["name", "n", "delta0", "delta1", "target", "T", "eta",
                 "sample_count", "variant", "table_policy", "noise_std",
                 "max_updates", "eval_every", "stop_distance", "seed",
                 "hist_bins", "record_phase_difference"],
    "additionalProperties": False
}

default_preset = {
    "name": "custom", "n": 2, "delta0": 0, "delta1": 1, "target": "qft",
    "T": 8, "eta": 0.05, "sample_count": 1, "variant": "full",
    "table_policy": "shared", "noise_std": 0.01, "max_updates": 50000,
    "eval_every": 100, "stop_distance": 0.0, "seed": 0, "hist_bins": 20,
    "record_phase_difference": False
}


def _preset(name, **fields):
    return dict(default_preset, name=name, **fields)


def _qft_preset(n, samples):
    return _preset("qft-n" + str(n), n=n, T=2 * n * n, sample_count=samples,
                   max_updates=50000 if n <= 3 else 200000)


presets = {p["name"]: p for p in [
    _qft_preset(2, 200), _qft_preset(3, 200),
    _qft_preset(4, 50), _qft_preset(5, 50),
    _preset("haar-u4-T4", target="haar_unitary", T=4, sample_count=200),
    _preset("haar-u4-T10", target="haar_unitary", T=10, sample_count=200),
    _preset("overpara-T4", T=4, eta=0.01, sample_count=200),
    _preset("overpara-T10", T=10, eta=0.01, sample_count=200),
    _preset("large-sys", n=20, T=500, sample_count=10, max_updates=200000,
            eval_every=1000),
    _preset("fixed-phase", target="haar_unitary", T=20,
            variant="fixed_phase", sample_count=200),
    _preset("x-rotation", target="haar_unitary", T=20, variant="x_rotation",
            sample_count=200),
    _preset("phase-fail", target="haar_unitary", T=20, variant="x_rotation",
            table_policy="independent", sample_count=200,
            record_phase_difference=True),
    _preset("noisy-axis", T=20, eta=0.1, variant="noisy_axis",
            sample_count=100),
    _preset("correlated", target="haar_unitary", T=20, variant="correlated",
            sample_count=200),
    _preset("indirect-unitary", n=4, target="position_unitary", T=20,
            eta=0.01, sample_count=150, max_updates=200000),
    _preset("indirect-povm", n=4, target="haar_povm", T=20, eta=0.01,
            sample_count=150, max_updates=200000),
]}


def validate_preset(preset):
    """ Validate a preset dictionary, converting schema errors

    :param preset: preset or merged config dictionary
    """
    try:
        validate(instance=preset, schema=preset_schema)
    except SchemaError as e:
        raise ConfigurationError("Invalid experiment configuration: " +
                                 e.message)
    return preset


def resolve_preset(name=None, config=None, overrides=None):
    """ Merge a named preset (or the default), a config document and
        command line overrides, then validate the result.

    :param name: preset name, optional
    :param config: dictionary read from a config file, optional
    :param overrides: dictionary of values that take precedence, optional
    """
    if name is not None and name not in presets:
        raise ConfigurationError("Unknown preset '" + name + "'. Available: " +
                                 ", ".join(sorted(presets)))
    if config is not None and not isinstance(config, dict):
        raise ConfigurationError("Config file must contain a mapping")
    base = presets[name] if name is not None else default_preset
    merged = dict(base)
    merged.update(config or {})
    merged.update({k: v for k, v in (overrides or {}).items()
                   if v is not None})
    return validate_preset(merged)


def load_config(stream):
    """ Read a JSON or YAML config document """
    try:
        return yaml.safe_load(stream)
    except yaml.YAMLError as e:
        raise ConfigurationError("Config file could not be parsed: " + str(e))


@dataclass(frozen=True)
class ExperimentPreset:
    """ Typed view of a validated preset dictionary """
    fields: dict

    @classmethod
    def from_dict(cls, preset):
        return cls(dict(validate_preset(dict(preset))))

    def __getattr__(self, key):
        try:
            return self.__dict__["fields"][key]
        except KeyError:
            raise AttributeError(key)

    @property
    def spec(self):
        return walk_core.WalkSpec(self.n, self.delta0, self.delta1)

    @property
    def grid(self):
        return list(range(0, self.max_updates + 1, self.eval_every))


"""
=============================================================================
Running one sample
=============================================================================
"""


def build_target(kind, spec, rng, T=0):
    """ Create a training target of the given kind

    :param kind: one of target_kinds
    :param spec: walk spec
    :param rng: generator for random targets
    :param T: layer count, used by hadamard_walk
    """
    if kind == "qft":
        return training.Unitary(training.qft_target(spec.dim))
    if kind == "haar_unitary":
        return training.Unitary(training.haar_unitary(spec.dim, rng))
    if kind == "haar_povm":
        return training.haar_povm(spec.n, rng)
    if kind == "position_unitary":
        return training.position_unitary_target(
            training.haar_unitary(spec.n, rng))
    if kind == "identity":
        return training.Unitary(numpy.eye(spec.dim))
    if kind == "hadamard_walk":
        return training.Unitary(walk_core.full_unitary(
            walk_core.hadamard_schedule(spec, T), spec))
    raise ConfigurationError("Unknown target kind '" + str(kind) + "'")


def shared_seed(seed):
    return numpy.random.SeedSequence(seed, spawn_key=(0,))


def sample_seed(seed, sample_id):
    return numpy.random.SeedSequence(seed, spawn_key=(1, sample_id))


def shared_phases(preset):
    """ The phase table used by every sample under the shared policy """
    if preset["variant"] == coin_models.FULL or \
            preset["table_policy"] != "shared":
        return None
    rng = numpy.random.default_rng(shared_seed(preset["seed"]))
    return coin_models.random_phase_table(preset["n"], rng)


def run_sample(job):
    """ Train one sample. Runs in worker processes, so it takes a single
        picklable argument.

    :param job: (preset dictionary, sample id, shared phase table or None)
    :returns: dictionary with the sample's records and final state
    """
    preset, sample_id, phases = job
    spec = walk_core.WalkSpec(preset["n"], preset["delta0"], preset["delta1"])
    train_seed, target_seed, table_seed = \
        sample_seed(preset["seed"], sample_id).spawn(3)
    target = build_target(preset["target"], spec,
                          numpy.random.default_rng(target_seed), preset["T"])
    model = coin_models.build_model(preset["variant"], preset["T"], spec.n,
                                    numpy.random.default_rng(table_seed),
                                    preset["noise_std"], phases)
    config = training.TrainConfig(
        T=preset["T"], eta=preset["eta"], max_updates=preset["max_updates"],
        eval_every=preset["eval_every"], seed=train_seed, variant=model,
        stop_distance=preset["stop_distance"])
    trace = training.train(config, spec, target)
    result = {"id": sample_id,
              "final_distance": trace.final_distance,
              "updates_run": trace.updates_run,
              "records": [(r.update, r.loss, r.distance)
                          for r in trace.records]}
    if preset["record_phase_difference"]:
        if model.phases is None:
            raise ConfigurationError("Phase differences need a coin model " +
                                     "with site phases")
        result["phase_difference"] = \
            coin_models.phase_difference(model.phases)
    return result


"""
=============================================================================
Aggregation
=============================================================================
"""


@dataclass
class RunReport:
    """ Per-sample results of a run and the statistics derived from them """
    preset: dict
    samples: list
    updates: list
    average: list
    worst: list
    edges: list
    counts: list
    exceedance: list

    @property
    def final_distances(self):
        return [s["final_distance"] for s in self.samples]

    def to_dict(self):
        p = self.preset
        return {
            "preset": p["name"], "seed": p["seed"],
            "spec": {"n": p["n"], "delta0": p["delta0"],
                     "delta1": p["delta1"]},
            "T": p["T"], "eta": p["eta"], "variant": p["variant"],
            "target": p["target"], "config": p,
            "samples": [{k: v for k, v in s.items() if k != "records"}
                        for s in self.samples],
            "aggregate": {"updates": self.updates, "avg": self.average,
                          "worst": self.worst},
            "histogram": {"edges": self.edges, "counts": self.counts},
            "exceedance": {"{:.0e}".format(x):
                           exceedance_at(self.final_distances, x)
                           for x in exceedance_thresholds}}


def series_on_grid(records, grid):
    """ Distances of one sample at every grid point. An early-stopped sample
        keeps its last distance for the remaining points.
    """
    by_update = {update: distance for update, _, distance in records}
    out = []
    last = records[0][2]
    for update in grid:
        last = by_update.get(update, last)
        out.append(last)
    return out


def final_distance_histogram(distances, bins=20, low=1e-16, high=1.0):
    """ Counts over log10-spaced bins; values below ``low`` land in the
        first bin and values above ``high`` in the last
    """
    edges = numpy.logspace(numpy.log10(low), numpy.log10(high), bins + 1)
    clipped = numpy.clip(numpy.asarray(distances, dtype=float), edges[0],
                         edges[-1])
    counts, _ = numpy.histogram(clipped, bins=edges)
    return [float(e) for e in edges], [int(c) for c in counts]


def exceedance_curve(counts):
    """ Fraction of samples at or above each bin edge, from the counts """
    total = sum(counts)
    below = numpy.concatenate([[0], numpy.cumsum(counts)])
    return [float(1 - b / total) for b in below]


def exceedance_at(distances, threshold):
    """ Fraction of samples whose distance exceeds ``threshold`` """
    return float(numpy.mean(numpy.asarray(distances) > threshold))


def aggregate(preset, samples):
    """ Build a RunReport from sample results ordered by sample id """
    grid = ExperimentPreset(preset).grid
    series = numpy.array([series_on_grid(s["records"], grid)
                          for s in samples])
    edges, counts = final_distance_histogram(
        [s["final_distance"] for s in samples], preset["hist_bins"])
    return RunReport(preset, samples, grid,
                     [float(v) for v in series.mean(axis=0)],
                     [float(v) for v in series.max(axis=0)],
                     edges, counts, exceedance_curve(counts))


"""
=============================================================================
Output files
=============================================================================
"""


def _open_output(out_dir, filename):
    try:
        os.makedirs(out_dir, exist_ok=True)
        return open(os.path.join(out_dir, filename), "w", newline="")
    except OSError as e:
        raise ResourceError("Cannot write " + filename + " to " +
                            str(out_dir) + ": " + str(e))


def write_csv(out_dir, filename, header, rows):
    with _open_output(out_dir, filename) as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_report(report, out_dir, include_trace=True):
    """ Write trace.csv, aggregate.csv, histogram.csv, exceedance.csv and
        summary.json for a report
    """
    if include_trace:
        write_csv(out_dir, "trace.csv", ["update", "loss", "distance",
                                         "sample"],
                  [(u, loss, d, s["id"]) for s in report.samples
                   for u, loss, d in s["records"]])
    write_csv(out_dir, "aggregate.csv", ["update", "average", "worst"],
              zip(report.updates, report.average, report.worst))
    write_csv(out_dir, "histogram.csv", ["lower", "upper", "count"],
              zip(report.edges[:-1], report.edges[1:], report.counts))
    write_csv(out_dir, "exceedance.csv", ["threshold", "fraction"],
              zip(report.edges, report.exceedance))
    with _open_output(out_dir, "summary.json") as file:
        json.dump(report.to_dict(), file, indent=2, sort_keys=True)
        file.write("\n")


"""
=============================================================================
Tasks
=============================================================================
"""


def run_preset(preset, out_dir=None, threads=1):
    """ Train every sample of a preset and write the run's files.

    :param preset: validated preset dictionary
    :param out_dir: output directory, nothing is written when None
    :param threads: number of worker processes
    :returns: RunReport
    """
    preset = validate_preset(dict(preset))
    if threads < 1:
        raise ConfigurationError("threads must be positive")
    utils.print_heading("Running " + preset["name"] + " (" +
                        str(preset["sample_count"]) + " samples, T=" +
                        str(preset["T"]) + ", n=" + str(preset["n"]) + ")")
    start = time.time()
    phases = shared_phases(preset)
    jobs = [(preset, i, phases) for i in range(preset["sample_count"])]
    if threads == 1:
        samples = _collect(map(run_sample, jobs))
    else:
        with multiprocessing.Pool(threads, initializer=utils.set_verbosity,
                                  initargs=(False,)) as pool:
            samples = _collect(pool.imap(run_sample, jobs, chunksize=1))
    samples.sort(key=lambda s: s["id"])
    report = aggregate(preset, samples)
    if out_dir is not None:
        write_report(report, out_dir)
    utils.printi(1, "Finished in " + "{:.1f}".format(time.time() - start) +
                 " s", "GREEN")
    return report


def _collect(results):
    """ Drain results in the given order, reporting each one """
    samples = []
    for result in results:
        samples.append(result)
        utils.printi(2, "sample " + str(result["id"]) + ": final distance " +
                     utils.format_float(result["final_distance"]))
    return samples


def summarize(run_dirs, out_dir=None):
    """ Merge the summaries of several runs that share an evaluation grid.

    :param run_dirs: directories holding summary.json files
    :param out_dir: where to write merged files, optional
    :returns: merged summary dictionary
    """
    summaries = []
    for run_dir in run_dirs:
        path = os.path.join(run_dir, "summary.json")
        try:
            with open(path) as file:
                summaries.append(json.load(file))
        except OSError as e:
            raise ResourceError("Cannot read " + path + ": " + str(e))
    if not summaries:
        raise StructuralError("Nothing to summarize")
    grid = summaries[0]["aggregate"]["updates"]
    for s in summaries[1:]:
        if s["aggregate"]["updates"] != grid:
            raise StructuralError("Runs " + summaries[0]["preset"] + " and " +
                                  s["preset"] + " use different " +
                                  "evaluation grids")
    sizes = [len(s["samples"]) for s in summaries]
    averages = numpy.array([s["aggregate"]["avg"] for s in summaries])
    if len(set(sizes)) == 1:
        average = averages.mean(axis=0)
    else:
        average = numpy.average(averages, axis=0, weights=sizes)
    worst = numpy.array([s["aggregate"]["worst"] for s in summaries]).max(
        axis=0)
    samples = [sample for s in summaries for sample in s["samples"]]
    distances = [sample["final_distance"] for sample in samples]
    bins = len(summaries[0]["histogram"]["counts"])
    edges, counts = final_distance_histogram(distances, bins)
    run_fields = ("preset", "seed", "spec", "T", "eta", "variant", "target",
                  "config")
    merged = {
        "preset": "+".join(s["preset"] for s in summaries),
        "runs": [{k: s[k] for k in run_fields if k in s} for s in summaries],
        "samples": samples,
        "aggregate": {"updates": grid, "avg": [float(v) for v in average],
                      "worst": [float(v) for v in worst]},
        "histogram": {"edges": edges, "counts": counts},
        "exceedance": {"{:.0e}".format(x): exceedance_at(distances, x)
                       for x in exceedance_thresholds}}
    if out_dir is not None:
        write_csv(out_dir, "aggregate.csv", ["update", "average", "worst"],
                  zip(grid, merged["aggregate"]["avg"],
                      merged["aggregate"]["worst"]))
        write_csv(out_dir, "histogram.csv", ["lower", "upper", "count"],
                  zip(edges[:-1], edges[1:], counts))
        write_csv(out_dir, "exceedance.csv", ["threshold", "fraction"],
                  zip(edges, exceedance_curve(counts)))
        with _open_output(out_dir, "summary.json") as file:
            json.dump(merged, file, indent=2, sort_keys=True)
            file.write("\n")
    return merged


def run_synthesis_check(spec, trials, seed=0, target="haar_unitary"):
    """ Compile random (or identity) targets exactly and measure the
        reconstruction error.

    :param spec: walk spec, must be universal
    :param trials: number of targets
    :param seed: seed for the Haar targets
    :param target: haar_unitary or identity
    :returns: dictionary with max distance and schedule statistics
    """
    synthesis.require_universal(spec)
    rng = numpy.random.default_rng(seed)
    distances, layers, factors = [], [], []
    for _ in range(trials):
        if target == "identity":
            V = numpy.eye(spec.dim, dtype=complex)
        else:
            V = training.haar_unitary(spec.dim, rng)
        schedule = synthesis.realize_unitary_exact(V, spec)
        U = walk_core.full_unitary(schedule, spec)
        distances.append(training.distance_unitary(U, V))
        layers.append(synthesis.schedule_layer_count(schedule))
        factors.append(len(synthesis.two_level_decompose(V)))
    return {"spec": spec.to_dict(), "trials": trials,
            "max_distance": max(distances, default=0.0),
            "max_layers": max(layers, default=0),
            "mean_layers": float(numpy.mean(layers)) if layers else 0.0,
            "max_factors": max(factors, default=0)}


def simulate_walk(spec, T, coin="hadamard", c=0, x=0):
    """ Position distribution after T steps of a homogeneous walk

    :param spec: walk spec
    :param T: number of steps
    :param coin: hadamard or identity
    :param c: initial coin state
    :param x: initial site
    """
    if coin == "hadamard":
        schedule = walk_core.hadamard_schedule(spec, T)
    elif coin == "identity":
        schedule = walk_core.identity_schedule(spec, T)
    else:
        raise ConfigurationError("Unknown coin '" + str(coin) + "'")
    state = walk_core.evolve(walk_core.basis_state(spec, c, x), schedule,
                             spec)
    return walk_core.position_distribution(state, spec)


def gradient_check(spec, T, variant="full", seed=0, target="haar_unitary",
                   step=1e-6):
    """ Compare the analytic gradient with central differences and, for
        unitary targets, with the simulated ancilla readout.

    :returns: dictionary of maximum absolute deviations
    """
    init_rng, state_rng, table_rng = training.seed_streams(seed, 3)
    model = coin_models.build_model(variant, T, spec.n, table_rng)
    params = coin_models.initial_parameters(model, T, spec.n, init_rng)
    goal = build_target(target, spec, state_rng, T)
    state_dim = spec.n if goal.kind == "povm" else spec.dim
    psi = training.haar_state(state_dim, state_rng)
    if goal.kind == "povm":
        analytic = training.povm_grad(params, spec, model, psi, goal)
        numeric = training.finite_difference_grad(
            lambda p: training.povm_loss(p, spec, model, psi, goal),
            params, step)
    else:
        analytic = training.grad(params, spec, model, psi, goal)
        numeric = training.finite_difference_grad(
            lambda p: training.loss(p, spec, model, psi, goal), params, step)
    out = {"parameters": int(params.size),
           "finite_difference": float(numpy.max(
               numpy.abs(analytic - numeric), initial=0.0))}
    if goal.kind != "povm":
        readout = numpy.zeros(params.shape)
        for t, x, j in numpy.ndindex(*params.shape):
            readout[t, x, j] = training.hadamard_test_gradient(
                params, spec, model, psi, goal, (j, x, t))
        out["readout_circuit"] = float(numpy.max(
            numpy.abs(analytic - readout), initial=0.0))
    return out
