"""Command-line front end: parse configs, dispatch experiments, persist
results and emit plot-ready CSV series.

Exit codes: 0 success; 1 usage or configuration error; 2 numerical failure
(iteration caps, degenerate inputs); 3 threshold violation under --check.
"""

from __future__ import annotations

import argparse
import hashlib
import importlib.resources
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import nets
from .ensembles import sample_entries, sample_matrix, concentration_fn
from .errors import DomainError, NumericalError, SizeError
from .experiments import (RUNNERS, ExperimentConfig, TrialReport, aggregate,
                          threshold_entry)
from .linalg import save_matrix_bin, save_matrix_csv

VERBS = ("gen", "sval", "inclusion", "quotient", "volume", "meanwidth",
         "opnorm", "lemmas", "net", "conc", "report")

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_NUMERICAL = 2
_EXIT_CHECK = 3


@dataclass
class Command:
    verb: str
    config: ExperimentConfig
    out: str
    dump: bool
    check: bool
    extra: dict


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(_EXIT_USAGE)


def _build_parser() -> _Parser:
    p = _Parser(prog="polylab", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="verb")
    for verb in VERBS:
        sp = sub.add_parser(verb, parents=[], add_help=True)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON config file; flags override its values")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--N", dest="N_rows", type=int, default=None)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--dist", type=str, default=None,
                        help="ensemble kind (rademacher|gaussian|uniform|"
                             "sym_pareto|sym_two_point)")
        sp.add_argument("--alpha", type=float, default=None,
                        help="tail index for sym_pareto")
        sp.add_argument("--p", type=float, default=None,
                        help="atom mass for sym_two_point")
        sp.add_argument("--beta", type=float, default=None)
        sp.add_argument("--c", type=float, default=None)
        sp.add_argument("--lam", type=float, default=None)
        sp.add_argument("--mu", type=float, default=None)
        sp.add_argument("--samples", type=int, default=None)
        sp.add_argument("--out", type=str, default=".")
        sp.add_argument("--dump", action="store_true")
        sp.add_argument("--check", action="store_true")
        sp.add_argument("--workers", type=int, default=None)
        if verb == "net":
            sp.add_argument("--eps", type=float, default=0.35)
            sp.add_argument("--delta", type=float, default=0.1)
            sp.add_argument("--k", type=int, default=None)
            sp.add_argument("--c0", type=float, default=2.0)
            sp.add_argument("--radius-C", dest="radius_c", type=float, default=10.0)
            sp.add_argument("--save-bundle", dest="save_bundle", action="store_true")
        if verb == "conc":
            sp.add_argument("--t-grid", dest="t_grid", type=str,
                            default="0.1,0.25,0.5,0.75,1.0")
        if verb == "report":
            sp.add_argument("--input", type=str, required=True)
            sp.add_argument("--series", type=str, default=None)
            sp.add_argument("--plot-out", dest="plot_out", type=str, default=None)
    return p


def parse_args(argv) -> Command:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.verb is None:
        parser.error("a verb is required (one of: %s)" % ", ".join(VERBS))
    raw = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(_EXIT_USAGE) from exc
    if ns.dist is not None:
        spec = {"kind": ns.dist}
        if ns.alpha is not None:
            spec["alpha"] = ns.alpha
        if ns.p is not None:
            spec["p"] = ns.p
        raw["ensemble"] = spec
    for flag, key in (("seed", "seed"), ("n", "n"), ("N_rows", "N"),
                      ("trials", "trials"), ("beta", "beta"), ("c", "c"),
                      ("lam", "lam"), ("mu", "mu"),
                      ("samples", "samples_per_trial"), ("workers", "workers")):
        val = getattr(ns, flag, None)
        if val is not None:
            raw[key] = val
    if "workers" not in raw:
        env = os.environ.get("POLYLAB_WORKERS")
        if env:
            raw["workers"] = int(env)
    try:
        cfg = ExperimentConfig.from_dict(raw)
    except (DomainError, TypeError) as exc:
        sys.stderr.write(f"error: invalid config: {exc}\n")
        raise SystemExit(_EXIT_USAGE) from exc
    extra = {}
    for name in ("eps", "delta", "k", "c0", "radius_c", "save_bundle",
                 "t_grid", "input", "series", "plot_out"):
        if hasattr(ns, name):
            extra[name] = getattr(ns, name)
    return Command(ns.verb, cfg, ns.out, ns.dump, ns.check, extra)


def load_report_schema() -> dict:
    ref = importlib.resources.files("polylab").joinpath("schemas/report.schema.json")
    return json.loads(ref.read_text())


def validate_report(report: dict) -> None:
    import jsonschema

    jsonschema.validate(report, load_report_schema())


def emit_plotdata(report: dict, path: str, series: str | None = None) -> None:
    """Two-column CSV (trial index, value) for one per-trial series."""
    per_trial = report.get("per_trial", {})
    names = sorted(per_trial)
    if series is None:
        series = names[0] if names else None
    if series is not None and series not in per_trial:
        raise DomainError(f"series {series!r} not in report")
    with open(path, "w") as fh:
        fh.write(f"# polylab plot data: experiment={report['experiment']}"
                 f" seed={report.get('seed')} series={series}\n")
        fh.write("# columns: trial_index,value\n")
        if series is not None:
            for i, val in enumerate(per_trial[series]):
                fh.write(f"{i},{val!r}\n")


def _envelope(verb: str, cfg: ExperimentConfig, per_trial: dict,
              thresholds: dict, notes: dict, wall: float) -> TrialReport:
    return TrialReport(
        experiment=verb,
        config=asdict(cfg),
        thresholds=thresholds,
        per_trial=per_trial,
        aggregates={k: aggregate(v) for k, v in per_trial.items() if v},
        pass_frequency=1.0,
        notes=notes,
        wall_time_s=wall,
    )


def _run_gen(cfg: ExperimentConfig, out: str) -> TrialReport:
    start = time.perf_counter()
    ens = cfg.make_ensemble()
    g = sample_matrix(ens, cfg.N, cfg.n, cfg.seed)
    csv_path = os.path.join(out, f"gen-{cfg.seed}.csv")
    bin_path = os.path.join(out, f"gen-{cfg.seed}.plab")
    save_matrix_csv(g, csv_path)
    save_matrix_bin(g, bin_path)
    digest = hashlib.sha256(g.tobytes()).hexdigest()
    notes = {"ensemble": ens.spec(), "u": ens.u, "v": ens.v,
             "sha256": digest, "csv": os.path.basename(csv_path),
             "bin": os.path.basename(bin_path)}
    return _envelope("gen", cfg, {}, {}, notes, time.perf_counter() - start)


def _run_net(cfg: ExperimentConfig, out: str, extra: dict) -> TrialReport:
    start = time.perf_counter()
    ens = cfg.make_ensemble()
    g = sample_matrix(ens, cfg.N, cfg.n, cfg.seed)
    eps = extra["eps"]
    delta = extra["delta"]
    k = extra["k"] or cfg.N
    tspec = nets.TSpec("sphere", cfg.n)
    bundle = nets.build_net(tspec, eps, delta, k, cfg.n, cfg.N,
                            "realized", matrix=g, c0=extra["c0"])
    radius = extra["radius_c"] * eps * math.sqrt(
        (k * cfg.n / delta) * math.log(math.e * cfg.N / k))
    rep = nets.validate_net(g, bundle, k, radius, cfg.trials, cfg.seed)
    if extra.get("save_bundle"):
        bundle.save(os.path.join(out, f"net-bundle-{cfg.seed}"))
    thresholds = {"net_radius": threshold_entry(
        "net_radius", "C*eps*sqrt((k*n/delta)*log(e*N/k))",
        {"C": extra["radius_c"], "eps": eps, "k": k, "n": cfg.n,
         "delta": delta, "N": cfg.N}, radius)}
    notes = {"net_points": int(bundle.points.shape[0]),
             "log_cardinality_bound": bundle.log_cardinality_bound,
             "validation": rep}
    return _envelope("net", cfg, {}, thresholds, notes,
                     time.perf_counter() - start)


def _run_conc(cfg: ExperimentConfig, extra: dict) -> TrialReport:
    start = time.perf_counter()
    ens = cfg.make_ensemble()
    draws = sample_entries(ens, max(cfg.samples_per_trial, 2), cfg.seed)
    grid = [float(t) for t in extra["t_grid"].split(",")]
    qs = [concentration_fn(draws, t) for t in grid]
    per_trial = {"t": grid, "q_hat": qs}
    thresholds = {"declared_v": threshold_entry(
        "declared_v", "v + 0.02", {"v": ens.v}, ens.v + 0.02)}
    q_at_u = concentration_fn(draws, ens.u)
    notes = {"ensemble": ens.spec(), "u": ens.u, "v": ens.v,
             "q_hat_at_u": q_at_u}
    return _envelope("conc", cfg, per_trial, thresholds, notes,
                     time.perf_counter() - start)


def dispatch(cmd: Command) -> int:
    """Run the mapped experiment, write its report, apply --check."""
    out = cmd.out
    if cmd.verb != "report":
        try:
            os.makedirs(out, exist_ok=True)
            probe = os.path.join(out, ".polylab-write-probe")
            with open(probe, "w") as fh:
                fh.write("")
            os.remove(probe)
        except OSError:
            sys.stderr.write(f"error: output directory {out!r} not writable\n")
            return _EXIT_USAGE

    try:
        if cmd.verb == "report":
            with open(cmd.extra["input"]) as fh:
                report = json.load(fh)
            validate_report(report)
            plot = cmd.extra.get("plot_out") or (cmd.extra["input"] + ".plot.csv")
            emit_plotdata(report, plot, cmd.extra.get("series"))
            return _EXIT_OK
        if cmd.verb == "gen":
            rep = _run_gen(cmd.config, out)
        elif cmd.verb == "net":
            rep = _run_net(cmd.config, out, cmd.extra)
        elif cmd.verb == "conc":
            rep = _run_conc(cmd.config, cmd.extra)
        else:
            rep = RUNNERS[cmd.verb](cmd.config)
    except (NumericalError, SizeError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"error: numerical failure: {exc}\n")
        return _EXIT_NUMERICAL
    except DomainError as exc:
        sys.stderr.write(f"error: invalid input: {exc}\n")
        return _EXIT_USAGE

    report = rep.to_dict()
    validate_report(report)
    path = os.path.join(out, f"{cmd.verb}-{cmd.config.seed}.json")
    rep.save_json(path)
    if cmd.dump and rep.per_trial:
        rep.dump_csv(os.path.join(out, f"{cmd.verb}-{cmd.config.seed}-trials.csv"))
    if cmd.check:
        required = cmd.config.thresholds.get("min_pass_frequency")
        if required is not None and rep.pass_frequency < float(required):
            sys.stderr.write(
                f"check failed: pass frequency {rep.pass_frequency} < {required}\n")
            return _EXIT_CHECK
    return _EXIT_OK


def main(argv=None) -> int:
    try:
        cmd = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return dispatch(cmd)


if __name__ == "__main__":
    sys.exit(main())
