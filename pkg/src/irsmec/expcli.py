"""Experiment harness: sweeps, CSV emission, and the command line.

Experiments are described by an ExperimentSpec (base system configuration,
sweep variable and grid, seeds, scheme labels) that can be loaded from a
JSON document mirroring the dataclass field names. One run regenerates
channels per seed, applies the sweep mutation, executes every requested
scheme, and appends one ResultRow per (scheme, sweep value, seed). Rows are
sorted and formatted deterministically, so identical specs byte-reproduce
their CSV files regardless of worker scheduling.

Exit codes: 0 on success, 2 on validation errors, 3 when the fraction of
runs that never reached a rate-feasible allocation exceeds the threshold.
"""

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import SCHEME_RUNNERS
from .channel import SystemConfig, displace_ues, generate_channels
from .errors import ConfigError
from .numerics import SeedStreams

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "convergence_trace",
    "load_spec",
    "main",
    "run_experiment",
    "summarize",
    "write_csv",
]

CSV_HEADER = ("scheme,sweep_var,sweep_value,seed,ee_bits_per_joule,"
              "rate_bits_per_s,power_w,iterations,converged")
TRACE_HEADER = ("scheme,sweep_var,sweep_value,seed,iteration,"
                "ee_bits_per_joule,converged")
OUT_ENV_VAR = "IRSMEC_OUT"

DEFAULT_RTH_GRID = (0.5e6, 1.0e6, 1.5e6, 2.0e6)
DEFAULT_OFFSET_GRID = (0.0, 1.0, 2.0, 3.0)

SWEEP_VARS = ("none", "rth", "irs_distance")


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a config, a sweep, a seed list, and scheme labels."""

    config: SystemConfig = field(default_factory=SystemConfig)
    sweep_var: str = "none"
    sweep_grid: tuple = (0.0,)
    seeds: tuple = tuple(range(20))
    schemes: tuple = tuple(SCHEME_RUNNERS)
    out_dir: str = None

    def validate(self):
        """Raise ConfigError listing every invalid field."""
        problems = []
        if self.sweep_var not in SWEEP_VARS:
            problems.append(f"sweep_var: must be one of {SWEEP_VARS}, "
                            f"got {self.sweep_var!r}")
        if len(self.sweep_grid) == 0:
            problems.append("sweep_grid: must be non-empty")
        elif list(self.sweep_grid) != sorted(self.sweep_grid):
            problems.append("sweep_grid: must be sorted ascending")
        if self.sweep_var == "irs_distance" and any(v < 0 for v in self.sweep_grid):
            problems.append("sweep_grid: offsets must be nonnegative")
        if self.sweep_var == "rth" and any(v < 0 for v in self.sweep_grid):
            problems.append("sweep_grid: rate targets must be nonnegative")
        if len(self.seeds) == 0:
            problems.append("seeds: must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            problems.append("seeds: must be distinct")
        if len(self.schemes) == 0:
            problems.append("schemes: must be non-empty")
        unknown = [s for s in self.schemes if s not in SCHEME_RUNNERS]
        if unknown:
            problems.append(f"schemes: unknown labels {unknown}; "
                            f"valid: {list(SCHEME_RUNNERS)}")
        try:
            self.config.validate()
        except ConfigError as exc:
            problems.append(f"config: {exc}")
        if problems:
            raise ConfigError("; ".join(problems))
        return self


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    sweep_var: str
    sweep_value: float
    seed: int
    ee_bits_per_joule: float
    rate_bits_per_s: float
    power_w: float
    iterations: int
    converged: bool


def _mutated_config(cfg, sweep_var, value):
    if sweep_var == "rth":
        return replace(cfg, rate_min_bps=float(value))
    if sweep_var == "irs_distance":
        return displace_ues(cfg, float(value))
    return cfg


def _run_cell(payload):
    """Worker unit: one (sweep value, seed) cell across all schemes.

    Returns (rows, feasible flags, traces keyed like rows)."""
    cfg, sweep_var, value, seed, schemes, want_traces = payload
    cell_cfg = _mutated_config(cfg, sweep_var, value)
    real = generate_channels(cell_cfg, SeedStreams(seed))
    rows, feasible, traces = [], [], []
    for scheme in schemes:
        result = SCHEME_RUNNERS[scheme](real, cell_cfg, streams=SeedStreams(seed))
        rows.append(ResultRow(
            scheme=scheme,
            sweep_var=sweep_var,
            sweep_value=float(value),
            seed=int(seed),
            ee_bits_per_joule=result.ee_bits_per_joule,
            rate_bits_per_s=result.rate_bits_per_s,
            power_w=result.power_w,
            iterations=result.iterations,
            converged=result.converged,
        ))
        feasible.append(result.feasible)
        traces.append([r.ee for r in result.trace.records] if want_traces else None)
    return rows, feasible, traces


def _row_key(row):
    return (row.scheme, row.sweep_value, row.seed)


def run_experiment(spec, threads=1, want_traces=False):
    """Execute every (sweep value, seed, scheme) cell of a validated spec.

    Returns (rows, feasible, traces): rows sorted by (scheme, sweep value,
    seed), feasible and traces aligned with rows. traces holds per-iteration
    EE lists when want_traces is true, else None entries.
    """
    spec.validate()
    payloads = [(spec.config, spec.sweep_var, value, seed, spec.schemes,
                 want_traces)
                for value in spec.sweep_grid for seed in spec.seeds]
    outputs = []
    if threads > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(_run_cell, payloads))
    else:
        outputs = [_run_cell(p) for p in payloads]

    triples = []
    for rows, feas, traces in outputs:
        triples.extend(zip(rows, feas, traces))
    triples.sort(key=lambda t: _row_key(t[0]))
    rows = [t[0] for t in triples]
    feasible = [t[1] for t in triples]
    traces = [t[2] for t in triples]
    return rows, feasible, traces


def summarize(rows):
    """Per-(scheme, sweep value) mean and sample standard deviation of EE.

    Returns {(scheme, sweep_value): (mean, std, count)} with std = 0 for
    singleton cells.
    """
    cells = {}
    for row in rows:
        cells.setdefault((row.scheme, row.sweep_value), []).append(
            row.ee_bits_per_joule)
    out = {}
    for key in sorted(cells):
        vals = np.asarray(cells[key])
        std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        out[key] = (float(vals.mean()), std, len(vals))
    return out


def _fmt(x):
    return "%.12g" % x


def _csv_lines(rows):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.scheme, r.sweep_var, _fmt(r.sweep_value), str(r.seed),
            _fmt(r.ee_bits_per_joule), _fmt(r.rate_bits_per_s),
            _fmt(r.power_w), str(r.iterations),
            "true" if r.converged else "false",
        ]))
    return "\n".join(lines) + "\n"


def write_csv(rows, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(_csv_lines(rows))


def _trace_csv_lines(rows, traces):
    lines = [TRACE_HEADER]
    for row, ee_seq in zip(rows, traces):
        for it, ee in enumerate(ee_seq):
            lines.append(",".join([
                row.scheme, row.sweep_var, _fmt(row.sweep_value),
                str(row.seed), str(it), _fmt(ee),
                "true" if row.converged else "false",
            ]))
    return "\n".join(lines) + "\n"


def convergence_trace(spec, threads=1):
    """Run the spec keeping per-iteration EE sequences for every run.

    Returns (rows, feasible, traces) like run_experiment with traces filled.
    """
    return run_experiment(spec, threads=threads, want_traces=True)


# ---------------------------------------------------------------------------
# JSON configuration
# ---------------------------------------------------------------------------

_SPEC_KEYS = {"config", "sweep_var", "sweep_grid", "seeds", "schemes",
              "out_dir"}
_CFG_FIELDS = {f.name for f in dataclasses.fields(SystemConfig)}


def _config_from_dict(doc):
    unknown = set(doc) - _CFG_FIELDS
    if unknown:
        raise ConfigError(f"config: unknown fields {sorted(unknown)}")
    kwargs = dict(doc)
    for key in ("ap_pos", "irs_pos"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    if "ue_pos" in kwargs:
        kwargs["ue_pos"] = tuple(tuple(p) for p in kwargs["ue_pos"])
    return SystemConfig(**kwargs)


def spec_from_dict(doc):
    """Build an ExperimentSpec from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("spec: top level must be a JSON object")
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise ConfigError(f"spec: unknown fields {sorted(unknown)}")
    kwargs = {}
    if "config" in doc:
        kwargs["config"] = _config_from_dict(doc["config"])
    if "sweep_var" in doc:
        kwargs["sweep_var"] = doc["sweep_var"]
    if "sweep_grid" in doc:
        kwargs["sweep_grid"] = tuple(float(v) for v in doc["sweep_grid"])
    if "seeds" in doc:
        kwargs["seeds"] = tuple(int(s) for s in doc["seeds"])
    if "schemes" in doc:
        kwargs["schemes"] = tuple(doc["schemes"])
    if "out_dir" in doc:
        kwargs["out_dir"] = doc["out_dir"]
    return ExperimentSpec(**kwargs)


def load_spec(path):
    """Load and validate an ExperimentSpec from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"spec: invalid JSON in {path}: {exc}") from None
    spec = spec_from_dict(doc)
    spec.validate()
    return spec


def spec_to_dict(spec):
    """Inverse of spec_from_dict, for round-tripping specs to JSON."""
    return {
        "config": dataclasses.asdict(spec.config),
        "sweep_var": spec.sweep_var,
        "sweep_grid": list(spec.sweep_grid),
        "seeds": list(spec.seeds),
        "schemes": list(spec.schemes),
        "out_dir": spec.out_dir,
    }


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

_COMMAND_DEFAULTS = {
    # command: (sweep_var, default grid, default schemes, output file)
    "run": ("none", (0.0,), tuple(SCHEME_RUNNERS), "results.csv"),
    "sweep-rth": ("rth", DEFAULT_RTH_GRID, tuple(SCHEME_RUNNERS),
                  "sweep_rth.csv"),
    "sweep-irs-distance": ("irs_distance", DEFAULT_OFFSET_GRID,
                           tuple(SCHEME_RUNNERS), "sweep_irs_distance.csv"),
    "trace-convergence": ("rth", DEFAULT_RTH_GRID, ("Efficiency-IRS",),
                          "trace_convergence.csv"),
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="irsmec",
        description="Energy-efficiency experiments for an IRS-assisted "
                    "NOMA edge-computing uplink.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", metavar="FILE",
                       help="JSON experiment spec; defaults apply otherwise")
        p.add_argument("--out", metavar="DIR",
                       help=f"output directory (default: ${OUT_ENV_VAR} or .)")
        p.add_argument("--seeds", type=int, metavar="N",
                       help="use seeds 0..N-1, overriding the spec")
        p.add_argument("--threads", type=int, default=1, metavar="N",
                       help="worker processes (default 1)")
        p.add_argument("--max-infeasible-frac", type=float, default=0.10,
                       metavar="F",
                       help="exit 3 when more than this fraction of runs "
                            "never met the rate target (default 0.10)")

    for name, (_, _, _, outfile) in _COMMAND_DEFAULTS.items():
        p = sub.add_parser(name, help=f"write {outfile}")
        add_common(p)
    p = sub.add_parser("validate-config", help="check a spec file and exit")
    p.add_argument("--config", metavar="FILE", required=True)
    return parser


def _spec_for(args):
    command = args.command
    sweep_var, grid, schemes, _ = _COMMAND_DEFAULTS[command]
    if args.config:
        spec = load_spec(args.config)
        if spec.sweep_var == "none" and sweep_var != "none":
            spec = replace(spec, sweep_var=sweep_var, sweep_grid=grid)
    else:
        spec = ExperimentSpec(sweep_var=sweep_var, sweep_grid=grid,
                              schemes=schemes)
    if command != "run" and spec.sweep_var != sweep_var:
        raise ConfigError(f"spec: sweep_var {spec.sweep_var!r} conflicts "
                          f"with the {command} command ({sweep_var!r})")
    if args.seeds is not None:
        if args.seeds <= 0:
            raise ConfigError("seeds: count must be positive")
        spec = replace(spec, seeds=tuple(range(args.seeds)))
    return spec.validate()


def _out_path(args, spec, filename):
    out_dir = args.out or spec.out_dir or os.environ.get(OUT_ENV_VAR) or "."
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, filename)


def _print_summary(rows, feasible):
    summary = summarize(rows)
    print("scheme, sweep_value: mean EE (bits/J), std, n")
    for (scheme, value), (mean, std, n) in summary.items():
        print(f"  {scheme}, {_fmt(value)}: {mean:.6g}, {std:.6g}, {n}")
    bad = len(feasible) - sum(feasible)
    print(f"runs: {len(feasible)}, infeasible: {bad}")
    return bad / max(len(feasible), 1)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate-config":
            spec = load_spec(args.config)
            print(f"ok: {len(spec.schemes)} schemes, "
                  f"{len(spec.sweep_grid)} sweep points, "
                  f"{len(spec.seeds)} seeds")
            return 0
        spec = _spec_for(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    filename = _COMMAND_DEFAULTS[args.command][3]
    want_traces = args.command == "trace-convergence"
    rows, feasible, traces = run_experiment(spec, threads=args.threads,
                                            want_traces=want_traces)
    try:
        path = _out_path(args, spec, filename)
        if want_traces:
            with open(path, "w", encoding="ascii", newline="\n") as fh:
                fh.write(_trace_csv_lines(rows, traces))
        else:
            write_csv(rows, path)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path} ({len(rows)} rows)")
    frac = _print_summary(rows, feasible)
    if frac > args.max_infeasible_frac:
        print(f"error: infeasible-run fraction {frac:.3g} exceeds "
              f"{args.max_infeasible_frac:.3g}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
