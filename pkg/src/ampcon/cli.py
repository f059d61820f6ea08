"""Command-line front end: ``ampcon``.

Each command takes an optional JSON config, applies flag overrides on
top (flags win), validates the result and writes its outputs plus a
``manifest.json`` into ``--out``.  ``ampcon replay manifest.json`` re-runs
a command from its manifest and checks the CSV/JSON/TXT bytes.

Exit codes: 0 ok, 1 replay mismatch, 2 usage or config error,
3 infeasible design, 4 I/O error.
"""
from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
import tempfile
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .arraymodel import (AngularRange, ArrayGeometry, axis_steering, pattern_amplitude,
                         pattern_metrics)
from .beamforming import CmpimConfig, normalized_ls_baseline, solve_p5_separable
from .constellation import InfeasibleCombination, brute_force_dmin, design_constellation
from .runio import RunManifest, RunRecorder, compare_outputs
from .simulate import (CSV_HEADER, AwgnConfig, ChannelConfig, amplitude_db, awgn_ber,
                       directional_ber, ebn0_at_ber, empirical_cdf, sample_beam_amplitude)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


# ---------------------------------------------------------------------------
# config defaults and schemas

_RANGE = {"x": [-0.5, 0.5], "y": [-0.25, 0.25]}
_CMPIM = {"alpha": 4.0, "step": None, "tol": None, "max_iters": 10_000, "restarts": 64,
          "grid_oversample": 4, "patience": 50}

DEFAULTS = {
    "design-constellation": {"kind": "apsk", "M": 16, "amplitude_bound": 1.0, "max_rings": 6},
    "design-pattern": {"n_x": 16, "n_y": 16, "range": _RANGE, "method": "cmpim",
                       "cmpim": _CMPIM, "ls_oversample": 4},
    "ber": {"mode": "awgn", "ebn0_db": [float(x) for x in range(0, 21, 2)],
            "min_errors": 200, "max_symbols": 1_000_000, "batch_size": 50_000,
            "energy": "peak",
            "curves": [{"kind": "apsk", "M": 16}, {"kind": "qam", "M": 16}],
            "n_x": 16, "n_y": 16, "range": _RANGE, "cmpim": _CMPIM, "ls_oversample": 4,
            "channel": {"pathloss_db": 20.0, "nlos_gap_db": 10.0, "realizations": 1000},
            "target_ber": [1e-3, 1e-4]},
    "cdf": {"n_x": 16, "n_y": 16, "range": _RANGE, "samples": 100_000,
            "beams": ["cmpim", "ls"], "cmpim": _CMPIM, "ls_oversample": 4,
            "threshold_db": 10.0},
    "table1": {"M_list": [8, 16, 32, 64], "amplitude_bound": 1.0, "max_rings": 6},
    "table2": {"M_list": [8, 16, 32, 64], "amplitude_bound": 1.0, "max_rings": 6},
    "table3": {"n_x": 16, "n_y": 16, "range": _RANGE, "cmpim": _CMPIM, "ls_oversample": 4,
               "samples": 100_000, "threshold_db": 10.0, "include_literature": True},
}

_num = {"type": "number"}
_int = {"type": "integer"}
_pos_int = {"type": "integer", "minimum": 1}
_interval = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_range_schema = {"type": "object", "required": ["x", "y"], "additionalProperties": False,
                 "properties": {"x": _interval, "y": _interval}}
_cmpim_schema = {
    "type": "object", "additionalProperties": False,
    "properties": {
        "alpha": {"type": "number", "minimum": 0},
        "step": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "tol": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "max_iters": _pos_int, "restarts": _pos_int, "grid_oversample": _pos_int,
        "patience": _pos_int,
    },
}
_common = {"seed": {"type": "integer", "minimum": 0}, "threads": _pos_int}
_array_props = {"n_x": _pos_int, "n_y": _pos_int, "range": _range_schema,
                "cmpim": _cmpim_schema, "ls_oversample": {"type": "integer", "minimum": 2}}
_table12 = {"type": "object", "additionalProperties": False,
            "properties": {**_common, "M_list": {"type": "array", "items": _pos_int},
                           "amplitude_bound": {"type": "number", "exclusiveMinimum": 0},
                           "max_rings": _pos_int}}

SCHEMAS = {
    "design-constellation": {
        "type": "object", "additionalProperties": False,
        "properties": {**_common, "kind": {"enum": ["apsk", "psk", "qam"]}, "M": _int,
                       "amplitude_bound": {"type": "number", "exclusiveMinimum": 0},
                       "max_rings": _pos_int},
    },
    "design-pattern": {
        "type": "object", "additionalProperties": False,
        "properties": {**_common, **_array_props, "method": {"enum": ["cmpim", "ls"]}},
    },
    "ber": {
        "type": "object", "additionalProperties": False,
        "properties": {
            **_common, **_array_props,
            "mode": {"enum": ["awgn", "directional"]},
            "ebn0_db": {"type": "array", "items": _num},
            "min_errors": {"type": "integer", "minimum": 100},
            "max_symbols": {"type": "integer", "minimum": 0},
            "batch_size": _pos_int,
            "energy": {"enum": ["peak", "mean"]},
            "curves": {"type": "array", "items": {
                "type": "object", "required": ["kind", "M"], "additionalProperties": False,
                "properties": {"kind": {"enum": ["apsk", "psk", "qam"]}, "M": _int,
                               "beam": {"enum": ["cmpim", "ls"]}}}},
            "channel": {"type": "object", "additionalProperties": False, "properties": {
                "pathloss_db": _num, "nlos_gap_db": _num, "realizations": _pos_int}},
            "target_ber": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        },
    },
    "cdf": {
        "type": "object", "additionalProperties": False,
        "properties": {**_common, **_array_props,
                       "samples": {"type": "integer", "minimum": 10_000},
                       "beams": {"type": "array", "items": {"enum": ["cmpim", "ls"]}},
                       "threshold_db": _num},
    },
    "table1": _table12,
    "table2": _table12,
    "table3": {
        "type": "object", "additionalProperties": False,
        "properties": {**_common, **_array_props,
                       "samples": {"type": "integer", "minimum": 10_000},
                       "threshold_db": _num, "include_literature": {"type": "boolean"}},
    },
}


def deep_merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _set_dotted(cfg: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    d = cfg
    for k in keys[:-1]:
        d = d.setdefault(k, {})
    d[keys[-1]] = value


def parse_set(items) -> dict:
    """``key.sub=value`` pairs; values are parsed as JSON, falling back to strings."""
    out: dict = {}
    for item in items or []:
        if "=" not in item:
            raise CliError(EXIT_USAGE, f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        _set_dotted(out, key, value)
    return out


def load_config_file(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise CliError(EXIT_USAGE, f"config {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise CliError(EXIT_USAGE, f"config {path} must hold a JSON object")
    return data


def validate(name: str, cfg: dict) -> None:
    v = jsonschema.Draft202012Validator(SCHEMAS[name])
    errors = sorted(v.iter_errors(cfg), key=lambda e: list(e.path))
    if errors:
        lines = [f"  {'/'.join(map(str, e.path)) or '<root>'}: {e.message}" for e in errors]
        raise CliError(EXIT_USAGE, f"invalid {name} config:\n" + "\n".join(lines))


def resolve_config(name: str, file_cfg: dict, overrides: dict, seed_flag, threads) -> dict:
    cfg = deep_merge(DEFAULTS[name], file_cfg)
    cfg = deep_merge(cfg, overrides)
    if seed_flag is not None:
        cfg["seed"] = seed_flag
    elif "seed" not in cfg:
        env = os.environ.get("AMPCON_SEED")
        try:
            cfg["seed"] = int(env) if env else 0
        except ValueError as e:
            raise CliError(EXIT_USAGE, f"AMPCON_SEED must be an integer, got {env!r}") from e
    if threads is not None:
        cfg["threads"] = threads
    cfg.setdefault("threads", 1)
    validate(name, cfg)
    return cfg


# ---------------------------------------------------------------------------
# shared helpers

def _range(cfg) -> AngularRange:
    try:
        return AngularRange.from_json_dict(cfg["range"])
    except ValueError as e:
        raise CliError(EXIT_USAGE, str(e)) from e


def _cmpim_cfg(cfg) -> CmpimConfig:
    return CmpimConfig(**cfg["cmpim"], seed=cfg["seed"], workers=cfg["threads"])


def build_beam(method: str, cfg: dict):
    geom = ArrayGeometry(cfg["n_x"], cfg["n_y"])
    rng = _range(cfg)
    if method == "ls":
        return normalized_ls_baseline(geom, rng, cfg["ls_oversample"]), None
    beam, diags = solve_p5_separable(geom, rng, _cmpim_cfg(cfg))
    return beam, diags


def _check_order(kind: str, M: int) -> None:
    if M < 4 or M > 1024 or M & (M - 1):
        raise CliError(EXIT_USAGE, f"M must be a power of two in [4, 1024], got {M}")
    if kind == "qam" and M < 8 and M != 4:
        raise CliError(EXIT_USAGE, f"unsupported QAM order {M}")


def _constellation(kind: str, M: int, A: float = 1.0, max_rings: int = 6):
    _check_order(kind, M)
    return design_constellation(kind, M, A, max_rings)


def _label(kind: str, M: int, beam=None) -> str:
    base = f"{kind.upper()}-{M}"
    return f"{beam.upper()}+{base}" if beam else base


# ---------------------------------------------------------------------------
# commands

def cmd_design_constellation(cfg: dict, rec: RunRecorder, plot: bool) -> None:
    kind, M = cfg["kind"], cfg["M"]
    c = _constellation(kind, M, cfg["amplitude_bound"], cfg["max_rings"])
    rep = brute_force_dmin(c)
    rec.json("constellation.json", c.to_json_dict())
    lines = [f"{kind.upper()} M={M} amplitude_bound={cfg['amplitude_bound']!r}",
             f"d_min = {rep.d_min:.4f}"]
    if c.params is not None:
        p = c.params
        lines.append(f"rings = {list(p.rings.points_per_ring)}")
        lines.append("radii = [" + ", ".join(f"{r:.4f}" for r in p.radii) + "]")
        lines.append("phases = [" + ", ".join(f"{w:.4f}" for w in p.phases) + "]")
    text = "\n".join(lines) + "\n"
    rec.text("summary.txt", text)
    sys.stdout.write(text)
    if plot:
        from .plotting import plot_constellation
        plot_constellation(c, rec.path("constellation.png"))


def _axis_cut(f, n, lo=-1.0, hi=1.0, points=801):
    psi = np.linspace(lo, hi, points)
    return psi, np.abs(axis_steering(n, psi).conj() @ f)


def cmd_design_pattern(cfg: dict, rec: RunRecorder, plot: bool) -> None:
    geom = ArrayGeometry(cfg["n_x"], cfg["n_y"])
    rng = _range(cfg)
    beam, diags = build_beam(cfg["method"], cfg)
    metrics = pattern_metrics(beam.values, geom, rng)
    if diags is not None:
        metrics.converged = bool(diags[0].converged and diags[1].converged)
        for axis, d in zip("xy", diags):
            rec.csv(f"diagnostics_{axis}.csv", ("iter", "min_objective", "argmin_psi"), d.rows())
    rec.json("beam.json", beam.to_json_dict())
    out = metrics.to_json_dict()
    out["method"] = cfg["method"]
    rec.json("metrics.json", out)
    sys.stdout.write(f"{cfg['method']}: ripple_factor={metrics.ripple_factor:.4f} "
                     f"power_ratio={metrics.power_ratio:.4f}\n")
    if plot:
        from .plotting import plot_axis_patterns, plot_pattern_2d
        if beam.fx is not None:
            plot_axis_patterns({"f_x": _axis_cut(beam.fx, geom.n_x),
                                "f_y": _axis_cut(beam.fy, geom.n_y)},
                               rec.path("pattern_axes.png"), band=rng.x)
        xs = np.linspace(-1, 1, 161)
        plot_pattern_2d(xs, xs, pattern_amplitude(beam.values, geom, xs, xs),
                        rec.path("pattern_2d.png"), title=cfg["method"])


def cmd_ber(cfg: dict, rec: RunRecorder, plot: bool) -> None:
    awgn = AwgnConfig(cfg["ebn0_db"], cfg["min_errors"], cfg["max_symbols"], cfg["seed"],
                      cfg["batch_size"], cfg["energy"], cfg["threads"])
    curves = []
    beams: dict = {}
    for spec in cfg["curves"]:
        c = _constellation(spec["kind"], spec["M"])
        if cfg["mode"] == "awgn":
            cur = awgn_ber(c, awgn)
            cur.label = _label(spec["kind"], spec["M"])
        else:
            method = spec.get("beam")
            if method is None:
                raise CliError(EXIT_USAGE, "directional curves need a 'beam' entry")
            if method not in beams:
                beams[method] = build_beam(method, cfg)[0]
            ch = ChannelConfig(cfg["channel"]["pathloss_db"], cfg["channel"]["nlos_gap_db"],
                               _range(cfg), cfg["channel"]["realizations"], cfg["seed"])
            cur = directional_ber(c, beams[method], ch, awgn)
            cur.label = _label(spec["kind"], spec["M"], method)
        rec.csv(f"ber_{cur.label}.csv", CSV_HEADER, cur.csv_rows())
        curves.append(cur)
    rows = []
    for cur in curves:
        for t in cfg["target_ber"]:
            x = ebn0_at_ber(cur, t)
            rows.append((cur.label, float(t), "" if x is None else float(x)))
    rec.csv("ber_crossings.csv", ("label", "target_ber", "ebn0_db"), rows)
    for label, t, x in rows:
        where = "not reached" if x == "" else f"{x:.2f} dB"
        sys.stdout.write(f"{label}: BER {t:g} at {where}\n")
    if plot and any(cur.points for cur in curves):
        from .plotting import plot_ber
        plot_ber(curves, rec.path("ber.png"), title=cfg["mode"])


def cmd_cdf(cfg: dict, rec: RunRecorder, plot: bool) -> None:
    rng = _range(cfg)
    cdfs = {}
    summary = []
    for method in cfg["beams"]:
        beam, _ = build_beam(method, cfg)
        db = amplitude_db(sample_beam_amplitude(beam, rng, cfg["samples"], cfg["seed"]))
        rows = empirical_cdf(db)
        rec.csv(f"cdf_{method}.csv", ("amp_db", "cdf"), rows)
        cdfs[method] = rows
        frac = float(np.mean(db > cfg["threshold_db"]))
        summary.append((method, frac, float(np.percentile(db, 5)), float(np.percentile(db, 95))))
    rec.csv("cdf_summary.csv", ("beam", "fraction_above_threshold", "p05_db", "p95_db"), summary)
    for m, frac, lo, hi in summary:
        sys.stdout.write(f"{m}: {100 * frac:.1f}% above {cfg['threshold_db']:g} dB, "
                         f"5-95% span [{lo:.1f}, {hi:.1f}] dB\n")
    if plot:
        from .plotting import plot_cdfs
        plot_cdfs(cdfs, rec.path("cdf.png"))


def _dmin_table(cfg: dict, constraint: str):
    rows = []
    for M in cfg["M_list"]:
        _check_order("apsk", M)
        vals = []
        for kind in ("psk", "qam", "apsk"):
            c = _constellation(kind, M, cfg["amplitude_bound"], cfg["max_rings"])
            if constraint == "power":
                c = c.rescaled_mean_power(cfg["amplitude_bound"] ** 2)
            vals.append(brute_force_dmin(c).d_min)
        rows.append((M, *vals))
    return rows


def cmd_table(cfg: dict, rec: RunRecorder, plot: bool, name: str) -> None:
    constraint = "amplitude" if name == "table1" else "power"
    header = ("M", "psk", "qam", "apsk")
    rows = _dmin_table(cfg, constraint)
    rec.csv(f"{name}.csv", header, rows)
    sys.stdout.write(f"d_min under the {constraint} constraint\n")
    for r in rows:
        sys.stdout.write(f"  M={r[0]:<5d}" + "".join(f"{v:10.4f}" for v in r[1:]) + "\n")
    if plot:
        from .plotting import plot_table
        plot_table(header, rows, rec.path(f"{name}.png"), title=f"d_min ({constraint})")


def load_literature_rows() -> dict:
    text = resources.files("ampcon").joinpath("data/literature_table3.json").read_text("utf-8")
    return json.loads(text)


def cmd_table3(cfg: dict, rec: RunRecorder, plot: bool) -> None:
    geom = ArrayGeometry(cfg["n_x"], cfg["n_y"])
    rng = _range(cfg)
    rows = []
    for method in ("cmpim", "ls"):
        beam, _ = build_beam(method, cfg)
        m = pattern_metrics(beam.values, geom, rng)
        db = amplitude_db(sample_beam_amplitude(beam, rng, cfg["samples"], cfg["seed"]))
        frac = float(np.mean(db > cfg["threshold_db"]))
        rows.append((method, m.ripple_factor, m.power_ratio, frac, "computed"))
    if cfg["include_literature"]:
        for r in load_literature_rows()["rows"]:
            rows.append((r["method"], float(r["ripple_factor"]), float(r["power_ratio"]), "",
                         "literature (not computed)"))
    header = ("method", "ripple_factor", "power_ratio", "fraction_above_threshold", "source")
    rec.csv("table3.csv", header, rows)
    for r in rows:
        sys.stdout.write(f"  {r[0]:<9s} ripple={r[1]:.4f} power_ratio={r[2]:.4f}  [{r[4]}]\n")
    if plot:
        from .plotting import plot_table
        plot_table(header[:3] + header[4:], [r[:3] + r[4:] for r in rows],
                   rec.path("table3.png"), title="pattern quality")


RUNNERS = {
    "design-constellation": cmd_design_constellation,
    "design-pattern": cmd_design_pattern,
    "ber": cmd_ber,
    "cdf": cmd_cdf,
    "table1": lambda cfg, rec, plot: cmd_table(cfg, rec, plot, "table1"),
    "table2": lambda cfg, rec, plot: cmd_table(cfg, rec, plot, "table2"),
    "table3": cmd_table3,
}


def execute(name: str, cfg: dict, out_dir: Path, argv: list, plot: bool = True) -> Path:
    """Run command ``name`` with a resolved config; returns the manifest path."""
    rec = RunRecorder(out_dir, name, argv, cfg, cfg["seed"])
    RUNNERS[name](cfg, rec, plot)
    return rec.finish()


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(p: argparse.ArgumentParser, out_default: str) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config entry (dotted keys, JSON values); repeatable")
    p.add_argument("--seed", type=int, help="random seed (default: config, then $AMPCON_SEED, then 0)")
    p.add_argument("--out", default=out_default, help="output directory")
    p.add_argument("--no-plot", action="store_true", help="skip PNG figures")


def _add_array_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nx", type=int, dest="n_x")
    p.add_argument("--ny", type=int, dest="n_y")
    p.add_argument("--x-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--y-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iters", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ampcon", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--threads", type=int, help="cap on worker threads")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-constellation", help="design an amplitude-constrained constellation")
    _add_common(p, "out/constellation")
    p.add_argument("--M", type=int, dest="M")
    p.add_argument("--A", type=float, dest="amplitude_bound")
    p.add_argument("--max-rings", type=int)
    p.add_argument("--kind", choices=["apsk", "psk", "qam"])

    p = sub.add_parser("design-pattern", help="design a reflection pattern")
    _add_common(p, "out/pattern")
    _add_array_flags(p)
    p.add_argument("--method", choices=["cmpim", "ls"])
    p.add_argument("--baseline", choices=["ls"], help="shorthand for --method ls")

    p = sub.add_parser("evaluate", help="reproduce a table or figure")
    p.add_argument("what", choices=["ber", "cdf", "table1", "table2", "table3"])
    _add_common(p, "out/evaluate")
    _add_array_flags(p)
    p.add_argument("--mode", choices=["awgn", "directional"])
    p.add_argument("--max-symbols", type=int)
    p.add_argument("--min-errors", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("replay", help="re-run a manifest and compare outputs")
    p.add_argument("manifest")
    p.add_argument("--out", help="directory for the re-run (default: a temporary directory)")
    p.add_argument("--no-plot", action="store_true")
    return ap


_FLAG_KEYS = ("M", "amplitude_bound", "max_rings", "kind", "n_x", "n_y", "method", "mode",
              "max_symbols", "min_errors", "samples")


def _flag_overrides(args) -> dict:
    over = parse_set(getattr(args, "set", None))
    for key in _FLAG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            over[key] = v
    if getattr(args, "baseline", None):
        over["method"] = args.baseline
    rng = {}
    if getattr(args, "x_range", None):
        rng["x"] = list(args.x_range)
    if getattr(args, "y_range", None):
        rng["y"] = list(args.y_range)
    if rng:
        over["range"] = rng
    cm = {k: getattr(args, k) for k in ("alpha", "restarts", "max_iters")
          if getattr(args, k, None) is not None}
    if cm:
        over["cmpim"] = cm
    return over


def _run(args, argv) -> int:
    if args.command == "replay":
        try:
            manifest = RunManifest.load(args.manifest)
        except (OSError, json.JSONDecodeError, KeyError) as e:
            raise CliError(EXIT_IO, f"cannot read manifest {args.manifest}: {e}") from e
        if manifest.command not in SCHEMAS:
            raise CliError(EXIT_USAGE, f"unknown command {manifest.command!r} in manifest")
        validate(manifest.command, manifest.config)
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(args.out) if args.out else Path(tmp)
            execute(manifest.command, manifest.config, out, manifest.argv, not args.no_plot)
            bad = compare_outputs(manifest, out)
        if bad:
            sys.stderr.write("replay mismatch: " + ", ".join(bad) + "\n")
            return EXIT_MISMATCH
        sys.stdout.write(f"replay ok: {len(manifest.outputs)} outputs checked\n")
        return EXIT_OK

    name = args.what if args.command == "evaluate" else args.command
    cfg = resolve_config(name, load_config_file(args.config), _flag_overrides(args),
                         args.seed, args.threads)
    path = execute(name, cfg, Path(args.out), argv, not args.no_plot)
    sys.stdout.write(f"wrote {path}\n")
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is not None and args.threads < 1:
        sys.stderr.write("ampcon: --threads must be >= 1\n")
        return EXIT_USAGE
    try:
        return _run(args, argv)
    except CliError as e:
        sys.stderr.write(f"ampcon: {e}\n")
        return e.code
    except InfeasibleCombination as e:
        sys.stderr.write(f"ampcon: infeasible design: {e}\n")
        return EXIT_INFEASIBLE
    except ValueError as e:
        sys.stderr.write(f"ampcon: {e}\n")
        return EXIT_USAGE
    except OSError as e:
        sys.stderr.write(f"ampcon: I/O error: {e}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
