"""Command-line front end.

Every subcommand reads its inputs, writes CSV/JSON artifacts into the output
directory and records a run manifest next to them.  Stochastic commands
either take --seed or generate one and record it, so identical invocations
reproduce identical outputs byte for byte.

Exit codes: 0 success (including non-convergence, which the manifest
records), 1 input or schema problems, 2 numerical failures.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
import tempfile
from dataclasses import asdict, dataclass, field

from . import __version__
from .errors import FcmError, SchemaError, ZeroAreaError
from .fuzzy import (
    AGGREGATION_METHODS,
    DEFUZZ_METHODS,
    IMPLICATION_METHODS,
    LinguisticTermSet,
    Universe,
    build_weight_matrix,
)
from .genetic import RcgaLearner, load_state_series, validate_ise, validate_ose
from .hebbian import AhlLearner, NhlLearner, _learning_message
from .intervention import InterventionAnalysis, InterventionSpec
from .matrix import WeightMatrix
from .simulation import (
    INFERENCE_METHODS,
    TRANSFER_METHODS,
    SimulationConfig,
    simulate,
)
from .survey import check_consistency, edge_entropy, read_survey


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: list[str]
    outputs: list[str] = field(default_factory=list)
    seed: int | None = None
    version: str = __version__

    def write(self, out_dir) -> str:
        path = os.path.join(out_dir, "manifest.json")
        # write-then-rename keeps the manifest atomic next to its outputs
        fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".manifest")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(asdict(self), fh, indent=2, default=str)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_terms_config(path):
    if path is None:
        return Universe(), LinguisticTermSet.default()
    payload = _load_json(path)
    uni = payload.get("universe", {})
    universe = Universe(uni.get("lo", -1.0), uni.get("hi", 1.0), uni.get("step", 0.001))
    terms = payload.get("terms")
    term_set = LinguisticTermSet.from_json_dict(terms) if terms else LinguisticTermSet.default()
    return universe, term_set


def _out(args, name) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _finish(args, manifest: RunManifest) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    manifest.write(args.out_dir)
    return 0


def _add_common(parser):
    parser.add_argument("--out-dir", default=".", help="directory for output files")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="preferred tabular output format")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--verbose", action="store_true")


def _write_matrix(matrix: WeightMatrix, args, stem: str) -> list[str]:
    paths = [_out(args, f"{stem}.csv"), _out(args, f"{stem}.json")]
    matrix.to_csv(paths[0])
    matrix.to_json(paths[1])
    return paths


# --- subcommands -----------------------------------------------------------

def cmd_build(args) -> int:
    survey = read_survey(args.survey, concept_separator=args.concept_separator,
                         csv_separator=args.csv_separator)
    universe, terms = _load_terms_config(args.terms_config)
    matrix = build_weight_matrix(
        survey, universe=universe, terms=terms,
        implication_method=args.implication,
        aggregation_method=args.aggregation,
        defuzz_method=args.defuzz)
    outputs = _write_matrix(matrix, args, "weight_matrix")
    manifest = RunManifest(
        command="build",
        config={"implication": args.implication, "aggregation": args.aggregation,
                "defuzz": args.defuzz, "terms_config": args.terms_config},
        inputs=[args.survey], outputs=outputs)
    return _finish(args, manifest)


def cmd_entropy(args) -> int:
    survey = read_survey(args.survey, concept_separator=args.concept_separator,
                         csv_separator=args.csv_separator)
    entropy = edge_entropy(survey)
    if args.format == "json":
        path = _out(args, "entropy.json")
        with open(path, "w") as fh:
            json.dump([{"source": s, "target": t, "entropy": e}
                       for (s, t), e in entropy.items()], fh, indent=2)
    else:
        path = _out(args, "entropy.csv")
        with open(path, "w") as fh:
            fh.write("source,target,entropy\n")
            for (s, t), e in entropy.items():
                fh.write(f"{s},{t},{e:.6f}\n")
    if args.verbose:
        for (s, t), e in entropy.items():
            print(f"{s} -> {t}: {e:.6f}")
    return _finish(args, RunManifest("entropy", {}, [args.survey], [path]))


def cmd_consistency(args) -> int:
    survey = read_survey(args.survey, concept_separator=args.concept_separator,
                         csv_separator=args.csv_separator)
    report = check_consistency(survey)
    path = _out(args, "inconsistencies.csv")
    report.to_csv(path)
    if args.verbose:
        print(f"{len(report.entries)} inconsistent edge(s)")
    return _finish(args, RunManifest("consistency", {}, [args.survey], [path]))


def _sim_config(args) -> SimulationConfig:
    return SimulationConfig(
        inference=args.inference, transfer=args.transfer, lam=args.lam,
        thresh=args.thresh, max_iterations=args.iterations)


def cmd_simulate(args) -> int:
    matrix = WeightMatrix.from_csv(args.matrix) if args.matrix.endswith(".csv") \
        else WeightMatrix.from_json(args.matrix)
    state = _load_json(args.initial_state)
    trace = simulate(state, matrix, _sim_config(args))
    print(trace.message())
    if args.format == "json":
        path = _out(args, "trace.json")
        trace.to_json(path)
    else:
        path = _out(args, "trace.csv")
        trace.to_csv(path)
    manifest = RunManifest(
        "simulate",
        {"inference": args.inference, "transfer": args.transfer,
         "lam": args.lam, "thresh": args.thresh, "iterations": args.iterations,
         "converged_at": trace.converged_at},
        [args.matrix, args.initial_state], [path])
    return _finish(args, manifest)


def _load_matrix(path) -> WeightMatrix:
    return WeightMatrix.from_csv(path) if str(path).endswith(".csv") \
        else WeightMatrix.from_json(path)


def cmd_hebbian(args, kind: str) -> int:
    matrix = _load_matrix(args.matrix)
    state = _load_json(args.initial_state)
    docs = {k: tuple(v) for k, v in _load_json(args.docs).items()}
    if kind == "nhl":
        learner = NhlLearner(
            doc_ranges=docs, learning_rate=args.eta, decay=args.gamma,
            lam=args.lam, thresh=args.thresh, max_iterations=args.iterations)
        learner.fit(matrix, state)
    else:
        pattern = _load_json(args.activation_pattern)
        learner = AhlLearner(
            doc_ranges=docs, activation_pattern=pattern,
            learning_rate=args.eta, decay=args.gamma, lam=args.lam,
            thresh=args.thresh, max_iterations=args.iterations,
            auto_learn=args.auto_learn, b1=args.b1, lbd1=args.lbd1,
            b2=args.b2, lbd2=args.lbd2)
        learner.fit(matrix, state)
    print(_learning_message(kind.upper(), learner.outcome_, args.eta, args.gamma))
    outputs = _write_matrix(learner.weights_, args, "learned_weights")
    outcome_path = _out(args, "outcome.json")
    learner.outcome_.to_json(outcome_path)
    outputs.append(outcome_path)
    manifest = RunManifest(
        kind,
        {"eta": args.eta, "gamma": args.gamma, "lam": args.lam,
         "thresh": args.thresh, "iterations": args.iterations,
         "converged_at": learner.converged_at_,
         "termination": learner.termination_},
        [args.matrix, args.initial_state, args.docs], outputs)
    return _finish(args, manifest)


def cmd_rcga(args) -> int:
    concepts, data = load_state_series(args.data)
    seed = args.seed if args.seed is not None else secrets.randbits(32)
    learner = RcgaLearner(
        population_size=args.population, ga_type=args.ga_type,
        n_iterations=args.iterations, threshold=args.threshold,
        p_recombination=args.p_recombination, p_mutation=args.p_mutation,
        inference=args.inference, transfer=args.transfer, lam=args.lam,
        seed=seed)
    learner.fit(data, concepts=concepts or None)
    outputs = _write_matrix(learner.solution_, args, "solution")
    report_path = _out(args, "report.json")
    with open(report_path, "w") as fh:
        json.dump({
            "fitness": learner.fitness_,
            "generations": learner.n_generations_,
            "seed": seed,
            "config": {k: v for k, v in learner.get_params().items() if k != "seed"},
        }, fh, indent=2)
    outputs.append(report_path)
    if args.verbose:
        print(f"best fitness {learner.fitness_:.6f} "
              f"after {learner.n_generations_} generations")
    manifest = RunManifest("rcga", {"threshold": args.threshold,
                                    "population": args.population,
                                    "ga_type": args.ga_type},
                           [args.data], outputs, seed=seed)
    return _finish(args, manifest)


def cmd_validate(args) -> int:
    matrix = _load_matrix(args.matrix)
    concepts, data = load_state_series(args.data)
    initial = _load_json(args.initial_state) if args.initial_state else data[0]
    ise = validate_ise(initial, matrix, data, inference=args.inference,
                       transfer=args.transfer, lam=args.lam)
    payload = {"in_sample_error": ise}
    seed = args.seed
    if args.generator:
        generator = _load_matrix(args.generator)
        if seed is None:
            seed = secrets.randbits(32)
        mean, std = validate_ose(
            matrix, generator, k=args.k, low=args.low, high=args.high,
            inference=args.inference, transfer=args.transfer, lam=args.lam,
            seed=seed)
        payload.update({"out_sample_error": mean, "out_sample_std": std,
                        "k_validation": args.k})
    path = _out(args, "validation.json")
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    if args.verbose:
        print(json.dumps(payload, indent=2))
    manifest = RunManifest("validate", {"k": args.k}, [args.matrix, args.data],
                           [path], seed=seed)
    return _finish(args, manifest)


def cmd_intervene(args) -> int:
    matrix = _load_matrix(args.matrix)
    state = _load_json(args.initial_state)
    scenarios = _load_json(args.scenarios)
    analysis = InterventionAnalysis()
    analysis.initialize(state, matrix, _sim_config(args), verbose=args.verbose)
    for raw in scenarios:
        analysis.add_intervention(InterventionSpec(
            name=raw["name"], kind=raw["kind"],
            state_overrides=raw.get("state_overrides", {}),
            weights=raw.get("weights", {}),
            effectiveness=raw.get("effectiveness", 1.0)))
    analysis.test_all()
    results = analysis.results()
    outputs = []
    for name, trace in results.traces.items():
        path = _out(args, f"trace_{name}.csv")
        trace.to_csv(path)
        outputs.append(path)
    eq_path = _out(args, f"equilibriums.{args.format}")
    comp_path = _out(args, f"comparison.{args.format}")
    if args.format == "json":
        with open(eq_path, "w") as fh:
            json.dump(results.equilibriums, fh, indent=2)
        with open(comp_path, "w") as fh:
            json.dump(results.comparison, fh, indent=2)
    else:
        _write_scenario_table(eq_path, results.equilibriums, analysis.concepts)
        _write_scenario_table(comp_path, results.comparison, analysis.concepts)
    outputs += [eq_path, comp_path]
    manifest = RunManifest(
        "intervene",
        {"inference": args.inference, "transfer": args.transfer,
         "lam": args.lam, "thresh": args.thresh,
         "scenarios": [raw["name"] for raw in scenarios]},
        [args.matrix, args.initial_state, args.scenarios], outputs)
    return _finish(args, manifest)


def _write_scenario_table(path, table: dict, concepts: list[str]) -> None:
    names = list(table)
    with open(path, "w") as fh:
        fh.write("concept," + ",".join(names) + "\n")
        for c in concepts:
            fh.write(c + "," + ",".join(repr(float(table[n][c])) for n in names) + "\n")


# --- parser ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcmkit",
        description="Fuzzy Cognitive Map toolkit: build, simulate, learn, intervene")
    sub = parser.add_subparsers(dest="command", required=True)

    def survey_args(p):
        p.add_argument("--survey", required=True)
        p.add_argument("--concept-separator", default="->")
        p.add_argument("--csv-separator", default=";")

    def sim_args(p):
        p.add_argument("--inference", choices=INFERENCE_METHODS, default="mkosko")
        p.add_argument("--transfer", choices=TRANSFER_METHODS, default="sigmoid")
        p.add_argument("--lam", type=float, default=1.0,
                       help="sigmoid steepness")
        p.add_argument("--thresh", type=float, default=0.001)
        p.add_argument("--iterations", type=int, default=50)

    p = sub.add_parser("build", help="derive a weight matrix from a survey")
    survey_args(p)
    p.add_argument("--terms-config", default=None,
                   help="JSON with universe bounds and term shapes")
    p.add_argument("--implication", choices=IMPLICATION_METHODS, default="mamdani")
    p.add_argument("--aggregation", choices=AGGREGATION_METHODS, default="fmax")
    p.add_argument("--defuzz", choices=DEFUZZ_METHODS, default="centroid")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("entropy", help="per-edge answer entropy")
    survey_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("consistency", help="report sign conflicts between experts")
    survey_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("simulate", help="iterate the map to equilibrium")
    p.add_argument("--matrix", required=True)
    p.add_argument("--initial-state", required=True, help="JSON concept -> value")
    sim_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    for kind, title in (("nhl", "synchronous Hebbian optimization"),
                        ("ahl", "asynchronous Hebbian optimization")):
        p = sub.add_parser(kind, help=title)
        p.add_argument("--matrix", required=True)
        p.add_argument("--initial-state", required=True)
        p.add_argument("--docs", required=True,
                       help="JSON concept -> [min, max] target ranges")
        p.add_argument("--eta", type=float, default=0.01, help="learning rate")
        p.add_argument("--gamma", type=float,
                       default=1.0 if kind == "nhl" else 0.03, help="decay")
        p.add_argument("--lam", type=float, default=1.0)
        p.add_argument("--thresh", type=float, default=0.002)
        p.add_argument("--iterations", type=int, default=100)
        if kind == "ahl":
            p.add_argument("--activation-pattern", required=True,
                           help="JSON group index -> list of concepts")
            p.add_argument("--auto-learn", action="store_true")
            p.add_argument("--b1", type=float, default=0.003)
            p.add_argument("--lbd1", type=float, default=0.1)
            p.add_argument("--b2", type=float, default=0.005)
            p.add_argument("--lbd2", type=float, default=1.0)
        _add_common(p)
        p.set_defaults(func=lambda a, k=kind: cmd_hebbian(a, k))

    p = sub.add_parser("rcga", help="evolve a matrix from longitudinal data")
    p.add_argument("--data", required=True, help="CSV of state rows")
    p.add_argument("--population", type=int, default=100)
    p.add_argument("--ga-type", choices=("generational", "ssga"),
                   default="generational")
    p.add_argument("--iterations", type=int, default=30000)
    p.add_argument("--threshold", type=float, default=0.99)
    p.add_argument("--p-recombination", type=float, default=0.9)
    p.add_argument("--p-mutation", type=float, default=None)
    p.add_argument("--inference", choices=INFERENCE_METHODS, default="mkosko")
    p.add_argument("--transfer", choices=TRANSFER_METHODS, default="sigmoid")
    p.add_argument("--lam", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_rcga)

    p = sub.add_parser("validate", help="in-sample / out-of-sample errors")
    p.add_argument("--matrix", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--initial-state", default=None)
    p.add_argument("--generator", default=None,
                   help="generating matrix for out-of-sample checks")
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--low", type=float, default=0.0)
    p.add_argument("--high", type=float, default=1.0)
    p.add_argument("--inference", choices=INFERENCE_METHODS, default="mkosko")
    p.add_argument("--transfer", choices=TRANSFER_METHODS, default="sigmoid")
    p.add_argument("--lam", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("intervene", help="what-if scenario analysis")
    p.add_argument("--matrix", required=True)
    p.add_argument("--initial-state", required=True)
    p.add_argument("--scenarios", required=True,
                   help="JSON array of intervention specs")
    sim_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_intervene)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ZeroAreaError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, FcmError, FileNotFoundError, json.JSONDecodeError,
            ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
