"""Command-line front end: ``solve``, ``stats`` and ``experiment``.

Exit codes: 0 when the stop criterion was met, 1 on bad input, 2 when the
graph was exhausted before the stop criterion fired.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import stats
from .families import FamilySpec, parse_family
from .graph import (
    SolutionCountExceeded,
    StopCriterion,
    Strategy,
    dynamic_monodromy_solve,
    make_complete_graph,
    make_flower,
    monodromy_solve,
)
from .polysys import ParametricSystem, SeedingError, create_seed_pair, square_system
from .seeding import rng_stream
from .tracker import TrackOptions

SCHEMA_VERSION = 1
EXPERIMENT_COLUMNS = ("trial", "seed", "completed", "solutions", "paths_succeeded",
                      "paths_attempted", "paths_failed", "seconds")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str | None = None
    system: str | None = None
    graph: str = "flower:3,2"
    strategy: str = "random"
    stop: str | None = None
    dynamic: bool = False
    augment_budget: int | None = None
    max_fruitless: int = 3
    tracker: dict = field(default_factory=dict)
    dedup_tol: float = 1e-6
    seed: int = 0
    out: str | None = None

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, data: dict | str) -> RunConfig:
        if isinstance(data, str):
            data = json.loads(data)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if (self.family is None) == (self.system is None):
            raise InputError("give exactly one of family or system")
        try:
            Strategy.parse(self.strategy)
        except ValueError:
            raise InputError(f"unknown strategy {self.strategy!r}") from None
        parse_graph(self.graph)
        if Strategy.parse(self.strategy) is Strategy.POTENTIAL_E and self.stop is not None \
                and not self.stop.startswith("count:"):
            raise InputError("potential-e needs a count stop criterion")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")


@dataclass
class RunReport:
    solutions: list
    parameters: list
    vertex: int
    counts: dict
    edges: list
    betti_number: int
    stop_reason: str
    satisfied: bool
    wall_time: float
    config: dict
    history: list
    failures: list
    family: dict
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    def solution_array(self) -> np.ndarray:
        return np.array([[complex(re, im) for re, im in x] for x in self.solutions])


def parse_graph(text: str) -> tuple[str, int, int]:
    kind, _, rest = text.partition(":")
    try:
        s, t = (int(v) for v in rest.split(","))
    except ValueError:
        raise InputError(f"bad graph {text!r}; expected flower:s,t or complete:s,t") from None
    if kind not in ("flower", "complete"):
        raise InputError(f"unknown graph layout {kind!r}")
    return kind, s, t


def parse_stop(text: str | None, family: FamilySpec) -> StopCriterion:
    if text is None:
        text = "count:auto" if family.count else "stabilization:10"
    kind, _, arg = text.partition(":")
    try:
        if kind == "count":
            if arg == "auto":
                if family.count is None:
                    raise InputError(f"no known solution count for {family.label}")
                return StopCriterion.known_count(family.count)
            return StopCriterion.known_count(int(arg))
        if kind == "saturation" and not arg:
            return StopCriterion.saturation()
        if kind == "stabilization":
            return StopCriterion.stabilization(int(arg) if arg else 10)
    except ValueError as exc:
        raise InputError(f"bad stop criterion {text!r}: {exc}") from None
    raise InputError(f"unknown stop criterion {text!r}")


def load_family(config: RunConfig) -> FamilySpec:
    rng = rng_stream(config.seed, "family")
    if config.family is not None:
        try:
            return parse_family(config.family, rng)
        except (ValueError, OSError) as exc:
            raise InputError(str(exc)) from None
    try:
        data = json.loads(Path(config.system).read_text())
        system = ParametricSystem.from_json(data)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read system {config.system}: {exc}") from None
    if system.num_equations < system.num_vars:
        raise InputError("system has fewer equations than unknowns")
    system = square_system(system, rng)
    count = data.get("count") if isinstance(data, dict) else None
    return FamilySpec("system", (config.system,), system, count=count,
                      count_source="supplied by input file" if count else None)


def _pairs(x) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(x, dtype=complex)]


def run_solve(config: RunConfig) -> RunReport:
    """Execute one configured solve; deterministic for a fixed seed."""
    config.validate()
    family = load_family(config)
    stop = parse_stop(config.stop, family)
    strategy = Strategy.parse(config.strategy)
    if strategy is Strategy.POTENTIAL_E and stop.count is None:
        raise InputError("potential-e needs a count stop criterion")
    try:
        opts = TrackOptions(**config.tracker)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad tracker options: {exc}") from None
    kind, s, t = parse_graph(config.graph)
    try:
        seed = create_seed_pair(family.system, rng_stream(config.seed, "seeding"))
    except SeedingError as exc:
        raise InputError(str(exc)) from None
    make = make_flower if kind == "flower" else make_complete_graph
    G = make(s, t, family.system, rng_stream(config.seed, "graph"), seed=seed,
             track_options=opts, dedup_tol=config.dedup_tol)
    start = time.perf_counter()
    # A stabilization stop needs iterations to count; a static graph that
    # saturates first is augmented instead of giving up.
    if config.dynamic or stop.kind == "stabilization":
        result = dynamic_monodromy_solve(G, stop, strategy, max_fruitless=config.max_fruitless,
                                         max_augmentations=config.augment_budget)
    else:
        result = monodromy_solve(G, stop, strategy)
    elapsed = time.perf_counter() - start
    snap = G.snapshot()
    return RunReport(
        solutions=[_pairs(x) for x in result.points],
        parameters=_pairs(G.vertices[result.vertex].p),
        vertex=result.vertex,
        counts=snap["paths"],
        edges=snap["edges"],
        betti_number=snap["betti_number"],
        stop_reason=result.reason,
        satisfied=result.satisfied,
        wall_time=elapsed,
        config=config.to_json(),
        history=snap["history"],
        failures=snap["failures"],
        family={"label": family.label, "count": family.count,
                "count_source": family.count_source,
                "squaring_matrix": (None if family.system.squaring_matrix is None else
                                    [_pairs(row) for row in family.system.squaring_matrix])},
    )


def cmd_solve(config: RunConfig) -> tuple[RunReport, int]:
    report = run_solve(config)
    if config.out:
        Path(config.out).write_text(json.dumps(report.to_json(), indent=1))
    return report, 0 if report.satisfied else 2


def cmd_stats(d_max, j_list=(2, 3, 4), trials: int | None = None, seed: int = 0) -> str:
    """Table of exact transitivity probabilities as CSV text.

    ``d_max`` is either the largest ``d`` (rows ``1..d_max``) or an explicit
    list of ``d`` values.
    """
    if isinstance(d_max, int):
        if d_max < 1:
            raise InputError("d_max must be at least 1")
        d_values = range(1, d_max + 1)
    else:
        d_values = list(d_max)
    header = ["d"] + [f"t_d(j={j})" for j in j_list] + ["E[X_d]"]
    if trials:
        header += [f"mc_t_d(j={j})" for j in j_list]
    rng = rng_stream(seed, "simulation")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for d in d_values:
        row = [d] + [f"{float(stats.transitivity_probability(d, j)):.8f}" for j in j_list]
        row.append(f"{stats.expected_betti(d).value:.8f}")
        if trials:
            row += [f"{stats.simulate_transitivity(d, j, trials, rng):.8f}" for j in j_list]
        w.writerow(row)
    return buf.getvalue()


def cmd_experiment(config: RunConfig, repeats: int) -> list[dict]:
    """Run ``repeats`` solves with seeds ``seed, seed + 1, ...``; per-trial
    errors become failed rows.  The last row summarizes the batch."""
    if repeats < 1:
        raise InputError("repeats must be at least 1")
    config.validate()
    rows = []
    for k in range(repeats):
        cfg = dataclasses.replace(config, seed=config.seed + k, out=None)
        start = time.perf_counter()
        try:
            rep = run_solve(cfg)
            rows.append({
                "trial": k, "seed": cfg.seed, "completed": int(rep.satisfied),
                "solutions": len(rep.solutions),
                "paths_succeeded": rep.counts["succeeded"],
                "paths_attempted": rep.counts["attempted"],
                "paths_failed": rep.counts["failed"],
                "seconds": round(time.perf_counter() - start, 4),
            })
        except InputError:
            raise
        except Exception as exc:  # keep the batch going
            rows.append({"trial": k, "seed": cfg.seed, "completed": 0, "solutions": 0,
                         "paths_succeeded": 0, "paths_attempted": 0, "paths_failed": 0,
                         "seconds": round(time.perf_counter() - start, 4),
                         "error": f"{type(exc).__name__}: {exc}"})
    done = [r for r in rows if r["completed"]]
    rows.append({
        "trial": "summary", "seed": config.seed,
        "completed": round(len(done) / repeats, 4),
        "solutions": round(float(np.mean([r["solutions"] for r in rows])), 2),
        "paths_succeeded": round(float(np.mean([r["paths_succeeded"] for r in rows])), 2),
        "paths_attempted": round(float(np.mean([r["paths_attempted"] for r in rows])), 2),
        "paths_failed": round(float(np.mean([r["paths_failed"] for r in rows])), 2),
        "seconds": round(sum(r["seconds"] for r in rows), 4),
    })
    return rows


def experiment_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(EXPERIMENT_COLUMNS), extrasaction="ignore",
                       lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _default_seed() -> int:
    return int(os.environ.get("MONODROMY_SEED", "0"))


def _add_run_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="RunConfig JSON file or a run report; flags override its values")
    p.add_argument("--family", help="cyclic:N, katsura:N, nash:NxM, crn-small, dense:d1,d2,..., "
                                    "sparse:@file.json")
    p.add_argument("--system", help="system JSON file")
    p.add_argument("--graph", help="flower:s,t or complete:s,t (default flower:3,2)")
    p.add_argument("--strategy", choices=["random", "lower-bound", "potential-e"])
    p.add_argument("--stop", help="count:d, count:auto, saturation or stabilization:w")
    p.add_argument("--dynamic", action="store_true", default=None,
                   help="augment the graph until the stop criterion holds")
    p.add_argument("--augment-budget", type=int, help="maximum number of augmentations")
    p.add_argument("--max-fruitless", type=int,
                   help="augmentations without progress before giving up (default 3)")
    p.add_argument("--tracker.tol", dest="tracker_tol", type=float)
    p.add_argument("--tracker.max-steps", dest="tracker_max_steps", type=int)
    p.add_argument("--tracker.max-newton", dest="tracker_max_newton", type=int)
    p.add_argument("--tracker.predictor", dest="tracker_predictor", choices=["euler", "rk4"])
    p.add_argument("--dedup-tol", type=float)
    p.add_argument("--seed", type=int, help="64-bit seed (default $MONODROMY_SEED or 0)")


def _config_from_args(args) -> RunConfig:
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if isinstance(base, dict) and "schema_version" in base and "config" in base:
            # A run report: replay the config it embeds.
            base = base["config"]
    data = RunConfig(seed=_default_seed()).to_json()
    data.update(base)
    for key in ("family", "system", "graph", "strategy", "stop", "dynamic",
                "augment_budget", "max_fruitless", "dedup_tol", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    tracker = dict(data.get("tracker") or {})
    for flag, key in (("tracker_tol", "tol"), ("tracker_max_steps", "max_steps"),
                      ("tracker_max_newton", "max_newton"), ("tracker_predictor", "predictor")):
        value = getattr(args, flag, None)
        if value is not None:
            tracker[key] = value
    data["tracker"] = tracker
    if getattr(args, "out", None):
        data["out"] = args.out
    return RunConfig.from_json(data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monodromy",
                                     description="Monodromy solver for parametric polynomial systems")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve one generic member of a family")
    _add_run_arguments(ps)
    ps.add_argument("--out", help="write the JSON report here")

    pt = sub.add_parser("stats", help="transitivity probabilities and expected Betti numbers")
    pt.add_argument("--d-max", type=int, default=30)
    pt.add_argument("--d", type=lambda s: [int(v) for v in s.split(",")],
                    help="explicit comma-separated list of d values")
    pt.add_argument("--j", type=lambda s: [int(v) for v in s.split(",")], default=[2, 3, 4])
    pt.add_argument("--trials", type=int, help="add Monte Carlo columns with this many trials")
    pt.add_argument("--seed", type=int)
    pt.add_argument("--csv", help="write the table here instead of stdout")

    pe = sub.add_parser("experiment", help="repeat a solve over consecutive seeds")
    _add_run_arguments(pe)
    pe.add_argument("--repeats", type=int, default=20)
    pe.add_argument("--csv", help="write the table here instead of stdout")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "stats":
            d_values = args.d or args.d_max
            seed = args.seed if args.seed is not None else _default_seed()
            _emit(cmd_stats(d_values, args.j, args.trials, seed), args.csv)
            return 0
        config = _config_from_args(args)
        if args.command == "solve":
            report, code = cmd_solve(config)
            if not config.out:
                json.dump(report.to_json(), sys.stdout, indent=1)
                sys.stdout.write("\n")
            else:
                print(f"{len(report.solutions)} solutions, {report.counts['succeeded']} "
                      f"successful paths, stop: {report.stop_reason}", file=sys.stderr)
            return code
        rows = cmd_experiment(config, args.repeats)
        _emit(experiment_csv(rows), args.csv)
        return 0
    except (InputError, SolutionCountExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
