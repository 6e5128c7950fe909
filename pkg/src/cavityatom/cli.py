"""Command-line front end: spectra, sweeps, figure presets, degeneracy search and verification."""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import presets as presets_mod
from .datasets import Row, rows_from_spectrum, run_panel, to_json, write_csv
from .eigensolve import SolverError, find_level, locate_degeneracy, scan_levels, sweep
from .oracle import IntegratorConfig
from .radial import BoundaryCondition, CavityProblem, Channel, DomainError, Model, UnitSystem
from .symmetry import DegeneracyPrediction, ImpossibleDegeneracy, predict_degeneracy_pauli, \
    predict_degeneracy_schrodinger

__all__ = ["main", "parse_number", "parse_bc", "build_parser", "BCSpec"]


class UsageError(ValueError):
    """Bad or inconsistent command-line/config input."""


# ---------------------------------------------------------------- numbers

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "inf": math.inf, "e": math.e}
_FUNCS = {"sqrt": math.sqrt, "atan": math.atan, "tan": math.tan}


def parse_number(text) -> float:
    """Evaluate a small arithmetic expression: ``0.5``, ``-1/12``, ``sqrt(15/16)``, ``inf``, ``pi/2``."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse number {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise UsageError(f"unsupported expression {text!r}")

    try:
        return float(ev(tree))
    except (ArithmeticError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"cannot evaluate {text!r}: {exc}") from exc


def parse_range(text) -> Tuple[float, float]:
    parts = str(text).split(":")
    if len(parts) != 2:
        raise UsageError(f"expected lo:hi, got {text!r}")
    lo, hi = (parse_number(p) for p in parts)
    if not lo < hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def parse_grid(text) -> Tuple[float, ...]:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"expected start:stop:steps, got {text!r}")
    start, stop = parse_number(parts[0]), parse_number(parts[1])
    try:
        steps = int(parts[2])
    except ValueError as exc:
        raise UsageError(f"step count must be an integer in {text!r}") from exc
    if steps < 2:
        raise UsageError("a sweep needs at least 2 steps")
    if not start < stop:
        raise UsageError(f"sweep start must be below stop in {text!r}")
    return tuple(float(x) for x in np.linspace(start, stop, steps))


def _is_grid(text) -> bool:
    return isinstance(text, str) and text.count(":") == 2


def _list(text) -> List[str]:
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        return [str(t) for t in text]
    return [t for t in str(text).split(",") if t.strip()]


def _int(text, name) -> int:
    try:
        v = parse_number(text)
    except UsageError:
        raise UsageError(f"--{name} expects an integer, got {text!r}")
    if v != int(v):
        raise UsageError(f"--{name} expects an integer, got {text!r}")
    return int(v)


# ------------------------------------------------------------ boundaries

@dataclass(frozen=True)
class BCSpec:
    """Parsed ``--bc``: either a fixed condition or an angle grid to sweep."""
    kind: str                              # dirichlet | neumann | gamma | nu | angle
    value: Optional[float] = None
    grid: Optional[Tuple[float, ...]] = None

    def resolve(self, model: Model, R: float) -> BoundaryCondition:
        if self.grid is not None:
            raise UsageError("an angle grid is a sweep, not a single condition")
        if self.kind == "dirichlet":
            return BoundaryCondition.dirichlet()
        if self.kind == "neumann":
            return BoundaryCondition.neumann()
        if self.kind in ("gamma", "nu"):
            return BoundaryCondition.robin(self.value)
        return BoundaryCondition.from_angle(self.value, 1.0 if model is Model.DIRAC else R)


def parse_bc(text, model: Optional[Model] = None) -> BCSpec:
    """``dirichlet``, ``neumann``, ``gamma=X``, ``nu=X``, ``angle=THETA`` or ``angle=start:stop:steps``."""
    s = str(text).strip().lower()
    if s in ("dirichlet", "neumann"):
        return BCSpec(s)
    key, sep, val = s.partition("=")
    if not sep or key not in ("gamma", "nu", "angle"):
        raise UsageError(f"unknown boundary condition {text!r}")
    if model is not None:
        if key == "nu" and model is not Model.DIRAC:
            raise UsageError("nu= is the Dirac wall parameter; use gamma= for this model")
        if key == "gamma" and model is Model.DIRAC:
            raise UsageError("the Dirac wall parameter is nu=")
    if key == "angle":
        if _is_grid(val):
            grid = parse_grid(val)
            if grid[0] <= -math.pi / 2 or grid[-1] > math.pi / 2 + 1e-12:
                raise UsageError("angles must lie in (-pi/2, pi/2]")
            return BCSpec("angle", grid=grid)
        theta = parse_number(val)
        if not -math.pi / 2 < theta <= math.pi / 2 + 1e-12:
            raise UsageError("angle must lie in (-pi/2, pi/2]")
        return BCSpec("angle", theta)
    v = parse_number(val)
    if math.isnan(v):
        raise UsageError("boundary parameter is NaN")
    return BCSpec(key, v)


# ------------------------------------------------------------- settings

_OPTIONS = ("model", "alpha", "l", "j", "k", "R", "aR", "bc", "window", "levels", "out", "format", "preset",
            "threads", "steps", "l2", "j2", "k2", "node", "node2", "vary", "bracket", "suite")


def _merge(args: argparse.Namespace) -> dict:
    """Config file values, overridden by any flag given on the command line."""
    merged = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = sorted(set(data) - set(_OPTIONS))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(data)
    for name in _OPTIONS:
        v = getattr(args, name, None)
        if v is not None:
            merged[name] = v
    return merged


def _model(opts) -> Model:
    try:
        return Model(str(opts.get("model", "schrodinger")).lower())
    except ValueError:
        raise UsageError(f"unknown model {opts.get('model')!r}")


def _units(model: Model, opts) -> UnitSystem:
    alpha = opts.get("alpha")
    if model is Model.DIRAC:
        if alpha is None:
            alpha = presets_mod.DEFAULT_DIRAC_ALPHA
        try:
            return UnitSystem(model, parse_number(alpha))
        except ValueError as exc:
            raise UsageError(f"--alpha: {exc}")
    if alpha is not None:
        raise UsageError("--alpha only applies to the Dirac model")
    return UnitSystem(model)


def _channels(model: Model, ls, js, ks) -> List[Channel]:
    try:
        return _build_channels(model, ls, js, ks)
    except (ValueError, DomainError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"invalid channel: {exc}")


def _build_channels(model: Model, ls, js, ks) -> List[Channel]:
    if model is Model.DIRAC:
        if ls or js:
            raise UsageError("Dirac channels are chosen with --k")
        if not ks:
            raise UsageError("give at least one --k")
        return [Channel.dirac(_int(k, "k")) for k in ks]
    if ks:
        raise UsageError("--k only applies to the Dirac model")
    if not ls:
        raise UsageError("give at least one --l")
    ints = [_int(l, "l") for l in ls]
    if model is Model.SCHRODINGER:
        if js:
            raise UsageError("--j only applies to the Pauli model")
        return [Channel.schrodinger(l) for l in ints]
    if len(js) != len(ints):
        raise UsageError("the Pauli model needs one --j per --l")
    return [Channel.pauli_from_j(l, parse_number(j)) for l, j in zip(ints, js)]


def _cfg(opts) -> IntegratorConfig:
    steps = opts.get("steps")
    return IntegratorConfig() if steps is None else IntegratorConfig(step_count=_int(steps, "steps"))


def _window(opts):
    w = opts.get("window")
    return None if w is None else parse_range(w)


def _levels(opts, default=None):
    v = opts.get("levels")
    if v is None:
        return default
    n = _int(v, "levels")
    if n < 1:
        raise UsageError("--levels must be >= 1")
    return n


def _threads(opts) -> int:
    n = _int(opts.get("threads", 1), "threads")
    if n < 1:
        raise UsageError("--threads must be >= 1")
    return n


def _radius(text) -> float:
    R = parse_number(text)
    if not (R > 0 and math.isfinite(R)):
        raise UsageError("--R must be positive and finite")
    return R


# --------------------------------------------------------------- output

def _fmt(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return "" if x is None else str(x)


def _emit(opts, csv_text: str, json_text: str) -> None:
    fmt = str(opts.get("format", "csv")).lower()
    if fmt not in ("csv", "json"):
        raise UsageError(f"unknown format {fmt!r}")
    text = csv_text if fmt == "csv" else json_text + "\n"
    out = opts.get("out")
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_rows(opts, rows: Sequence[Row], meta: dict) -> None:
    buf = io.StringIO()
    write_csv(rows, buf)
    _emit(opts, buf.getvalue(), to_json(rows, meta))


def _meta(command, model, units, bc_text, extra=None) -> dict:
    meta = {"command": command, "model": model.value, "energy_unit": units.energy_unit,
            "length_unit": "bohr_radius"}
    if model is Model.DIRAC:
        meta["alpha"] = units.alpha
    if bc_text is not None:
        meta["bc"] = bc_text
    meta.update(extra or {})
    return meta


# ------------------------------------------------------------- commands

def cmd_spectrum(opts) -> int:
    model = _model(opts)
    units = _units(model, opts)
    chans = _channels(model, _list(opts.get("l")), _list(opts.get("j")), _list(opts.get("k")))
    if opts.get("R") is None:
        raise UsageError("spectrum needs --R")
    R = _radius(opts["R"])
    bc = parse_bc(opts.get("bc", "dirichlet"), model).resolve(model, R)
    window, levels, cfg = _window(opts), _levels(opts, 3), _cfg(opts)
    rows = []
    for ch in chans:
        spec = scan_levels(CavityProblem(units, ch, bc, R), window, levels, cfg=cfg, grid_points=400,
                           auto_extend=window is None)
        rows.extend(rows_from_spectrum("spectrum", R, spec, ch.key))
    meta = _meta("spectrum", model, units, bc.describe(),
                 {"radius": R, "channels": [c.key for c in chans], "levels": levels,
                  "steps": cfg.step_count})
    _emit_rows(opts, rows, meta)
    return 0


def cmd_sweep(opts) -> int:
    threads, cfg = _threads(opts), _cfg(opts)
    if opts.get("preset") is not None:
        return _sweep_preset(opts, threads, cfg)
    model = _model(opts)
    units = _units(model, opts)
    chans = _channels(model, _list(opts.get("l")), _list(opts.get("j")), _list(opts.get("k")))
    bcspec = parse_bc(opts.get("bc", "dirichlet"), model)
    R_text, aR_text = opts.get("R"), opts.get("aR")
    sweeps = [bcspec.grid is not None, _is_grid(R_text), aR_text is not None]
    if sum(sweeps) != 1:
        raise UsageError("choose exactly one sweep axis: --R start:stop:steps, --aR start:stop:steps "
                         "or --bc angle=start:stop:steps")
    if bcspec.grid is not None:
        parameter, grid = "gamma_angle", bcspec.grid
        R = _radius(R_text if R_text is not None else 1.0)
        bc = BoundaryCondition.dirichlet()
    else:
        if _is_grid(R_text):
            parameter, grid = "radius", parse_grid(R_text)
        else:
            if R_text is not None:
                raise UsageError("--R and --aR both set")
            parameter, grid = "inverse_radius", parse_grid(aR_text)
        if grid[0] <= 0:
            raise UsageError("radius sweeps need positive values")
        R = 1.0
        bc = bcspec.resolve(model, R)
        if bcspec.kind == "angle":
            raise UsageError("a fixed angle depends on R; use gamma= or nu= for radius sweeps")
    window, levels = _window(opts), _levels(opts, 3)
    rows_per = []
    for ch in chans:
        pts = sweep(CavityProblem(units, ch, bc, R), parameter, grid, window=window, max_levels=levels,
                    cfg=cfg, grid_points=presets_mod.PRESET_GRID_POINTS, auto_extend=window is None,
                    threads=threads)
        rows_per.append((ch.key, pts))
    rows = []
    for i in range(len(grid)):
        for key, pts in rows_per:
            p = pts[i]
            rows.extend(rows_from_spectrum("sweep", p.value, p.spectrum, key, p.error))
    meta = _meta("sweep", model, units, None if bcspec.grid is not None else bc.describe(),
                 {"parameter": parameter, "radius": R if parameter == "gamma_angle" else None,
                  "channels": [c.key for c in chans], "levels": levels, "steps": cfg.step_count})
    _emit_rows(opts, rows, meta)
    return 0


def _sweep_preset(opts, threads, cfg) -> int:
    for name in ("l", "j", "k", "R", "aR", "bc", "levels"):
        if opts.get(name) is not None:
            raise UsageError(f"--{name} cannot be combined with --preset")
    name = str(opts["preset"])
    alpha = opts.get("alpha")
    if alpha is not None and not name.startswith(("fig4", "fig5")):
        raise UsageError("--alpha only applies to the Dirac presets fig4 and fig5")
    try:
        panels = presets_mod.preset_panels(name, None if alpha is None else parse_number(alpha))
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    window = _window(opts)
    rows, meta_panels = [], []
    for p in panels:
        if window is not None:
            p = presets_mod.Panel(p.name, p.model, p.bc, p.parameter, p.grid, p.channels, p.radius, p.alpha, window)
        rows.extend(run_panel(p, cfg, threads))
        meta_panels.append({"panel": p.name, "model": p.model.value, "bc": p.bc.describe(),
                            "parameter": p.parameter, "radius": p.radius if p.parameter == "gamma_angle" else None,
                            "alpha": p.alpha if p.model is Model.DIRAC else None,
                            "channels": [{"channel": c.channel.key, "levels": c.levels} for c in p.channels]})
    _emit_rows(opts, rows, {"command": "sweep", "preset": name, "panels": meta_panels,
                            "steps": cfg.step_count})
    return 0


_DEG_FIELDS = ("parameter", "value", "energy", "splitting", "channel_a", "node_a", "label_a", "energy_a",
               "channel_b", "node_b", "label_b", "energy_b", "predicted")


def _prediction(model, ch_a: Channel, ch_b: Channel) -> Optional[DegeneracyPrediction]:
    if model is Model.DIRAC or ch_b.l != ch_a.l + 2:
        return None
    if model is Model.SCHRODINGER:
        return predict_degeneracy_schrodinger(ch_a.l)
    pred = predict_degeneracy_pauli(ch_a.l, ch_a.j_sign, ch_b.j_sign)
    if isinstance(pred, ImpossibleDegeneracy):
        raise UsageError(f"no degeneracy exists for {ch_a.spectroscopic()} -> {ch_b.spectroscopic()}: "
                         f"{pred.reason}")
    return pred


def _nearest_node(prob_a, prob_b, node_b, cfg) -> int:
    target = find_level(prob_b, node_b, cfg=cfg).energy
    best, best_gap = 0, math.inf
    for node in range(node_b + 5):
        try:
            e = find_level(prob_a, node, cfg=cfg).energy
        except (SolverError, ValueError):
            break
        if abs(e - target) < best_gap:
            best, best_gap = node, abs(e - target)
        if e > target:
            break
    return best


def cmd_find_degeneracy(opts) -> int:
    model = _model(opts)
    units = _units(model, opts)
    ch_a, = _channels(model, _list(opts.get("l"))[:1], _list(opts.get("j"))[:1], _list(opts.get("k"))[:1])
    if model is Model.DIRAC:
        if opts.get("k2") is None:
            raise UsageError("give --k2 for the second Dirac channel")
        ch_b = Channel.dirac(_int(opts["k2"], "k2"))
    else:
        l2 = _int(opts["l2"], "l2") if opts.get("l2") is not None else ch_a.l + 2
        js = [opts["j2"]] if opts.get("j2") is not None else []
        if model is Model.PAULI and not js:
            raise UsageError("give --j2 for the second Pauli channel")
        ch_b, = _channels(model, [str(l2)], js, [])
    vary = str(opts.get("vary", "radius"))
    if vary not in ("radius", "gamma"):
        raise UsageError("--vary must be radius or gamma")
    if vary == "gamma" and model is Model.DIRAC:
        raise UsageError("--vary gamma applies to the Schrodinger and Pauli models")
    pred = _prediction(model, ch_a, ch_b)
    cfg = _cfg(opts)
    node_b = _int(opts.get("node2", 0), "node2")

    if vary == "radius":
        if opts.get("bc") is not None:
            bc = parse_bc(opts["bc"], model)
            if bc.kind == "angle":
                raise UsageError("a fixed angle depends on R; use gamma= or nu= when varying R")
            bc = bc.resolve(model, 1.0)
        elif pred is not None:
            bc = BoundaryCondition.robin(float(pred.gamma_options[0]))
        else:
            bc = BoundaryCondition.dirichlet()
        centre = float(pred.radius) if pred is not None else None
        fixed = 1.0
    else:
        if opts.get("bc") is not None:
            raise UsageError("--bc is the varied quantity with --vary gamma")
        if opts.get("R") is not None:
            fixed = _radius(opts["R"])
        elif pred is not None:
            fixed = float(pred.radius)
        else:
            raise UsageError("give --R")
        bc = BoundaryCondition.dirichlet()
        finite = [float(g) for g in (pred.gamma_options if pred else ()) if math.isfinite(g)]
        centre = finite[-1] if finite else None
    if opts.get("bracket") is not None:
        bracket = parse_range(opts["bracket"])
    elif centre is not None:
        bracket = tuple(sorted((0.8 * centre, 1.2 * centre)))
    else:
        raise UsageError("no prediction for this channel pair; give --bracket")
    if vary == "radius" and bracket[0] <= 0:
        raise UsageError("radius bracket must be positive")

    template = CavityProblem(units, ch_a, bc, fixed)
    mid = 0.5 * (bracket[0] + bracket[1])
    at_mid = template.with_radius(mid) if vary == "radius" else template.with_bc(BoundaryCondition.robin(mid))
    if opts.get("node") is not None:
        node_a = _int(opts["node"], "node")
    else:
        node_a = _nearest_node(at_mid, at_mid.with_channel(ch_b), node_b, cfg)

    deg = locate_degeneracy(template, ch_a, node_a, ch_b, node_b, vary, bracket, cfg=cfg)
    predicted = None
    if pred is not None:
        predicted = float(pred.radius) if vary == "radius" else centre
    found = [(vary, deg.value, deg.energy, deg.splitting, deg.level_a, deg.level_b, predicted)]
    if vary == "gamma":
        la = find_level(template, node_a, cfg=cfg)
        lb = find_level(template.with_channel(ch_b), node_b, cfg=cfg)
        found.append(("gamma", math.inf, 0.5 * (la.energy + lb.energy), la.energy - lb.energy, la, lb,
                      math.inf if pred is not None else None))

    rows = []
    for par, val, e, split, la, lb, p in found:
        rows.append({"parameter": par, "value": val, "energy": e, "splitting": split,
                     "channel_a": la.channel.key, "node_a": la.node_count, "label_a": la.label,
                     "energy_a": la.energy, "channel_b": lb.channel.key, "node_b": lb.node_count,
                     "label_b": lb.label, "energy_b": lb.energy, "predicted": p})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(_DEG_FIELDS)
    for r in rows:
        w.writerow([_fmt(r[f]) for f in _DEG_FIELDS])
    safe = [{k: (str(v) if isinstance(v, float) and not math.isfinite(v) else v) for k, v in r.items()}
            for r in rows]
    meta = _meta("find-degeneracy", model, units, bc.describe() if vary == "radius" else None,
                 {"vary": vary, "bracket": list(bracket),
                  "radius": fixed if vary == "gamma" else None, "steps": cfg.step_count})
    _emit(opts, buf.getvalue(), json.dumps({"meta": meta, "degeneracies": safe}, indent=2))
    return 0


def cmd_verify(opts) -> int:
    from .verification import SUITES, run_suite

    suite = str(opts.get("suite", "all"))
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    checks = run_suite(suite)
    for c in checks:
        print(c.line(), file=sys.stderr)
    ok = all(c.passed for c in checks)
    report = {"suite": suite, "passed": ok, "checks": [c.as_dict() for c in checks]}
    text = json.dumps(report, indent=2, default=str)
    out = opts.get("out")
    if out in (None, "-"):
        print(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0 if ok else 1


# --------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("problem")
    g.add_argument("--config", help="JSON file of option values; flags override it")
    g.add_argument("--model", help="schrodinger | dirac | pauli (default schrodinger)")
    g.add_argument("--alpha", help="fine-structure constant for Dirac, e.g. sqrt(15/16)")
    g.add_argument("--l", help="orbital quantum number(s), comma separated")
    g.add_argument("--j", help="total angular momentum per --l (Pauli), e.g. 0.5,3.5")
    g.add_argument("--k", help="Dirac quantum number(s), comma separated")
    g.add_argument("--R", help="cavity radius in Bohr radii, or start:stop:steps to sweep")
    g.add_argument("--aR", help="sweep a/R as start:stop:steps")
    g.add_argument("--bc", help="dirichlet | neumann | gamma=X | nu=X | angle=THETA[:stop:steps]")
    g.add_argument("--window", help="energy window lo:hi")
    g.add_argument("--levels", help="levels per channel")
    g.add_argument("--steps", help="integrator step count (even, >= 1000)")
    g.add_argument("--threads", help="worker threads for sweeps")
    o = p.add_argument_group("output")
    o.add_argument("--out", help="output path (default stdout)")
    o.add_argument("--format", help="csv | json (default csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavityatom",
                                     description="Hydrogen atom in a spherical cavity: spectra and datasets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="levels at one radius and boundary condition")
    _common(p)

    p = sub.add_parser("sweep", help="levels along a radius, a/R or angle grid, or a figure preset")
    _common(p)
    p.add_argument("--preset", help=f"one of {', '.join(presets_mod.PRESETS)}")

    p = sub.add_parser("find-degeneracy", help="parameter where two levels cross")
    _common(p)
    p.add_argument("--l2", help="orbital number of the second channel (default l+2)")
    p.add_argument("--j2", help="j of the second channel (Pauli)")
    p.add_argument("--k2", help="k of the second channel (Dirac)")
    p.add_argument("--node", help="node count in the first channel (default: nearest in energy)")
    p.add_argument("--node2", help="node count in the second channel (default 0)")
    p.add_argument("--vary", help="radius | gamma (default radius)")
    p.add_argument("--bracket", help="search interval lo:hi (default predicted value +-20%%)")

    p = sub.add_parser("verify", help="run acceptance checks and write a JSON report")
    p.add_argument("--config")
    p.add_argument("--suite", help="all | schrodinger | dirac | pauli | symmetry | figures")
    p.add_argument("--out", help="report path (default stdout)")
    return parser


_COMMANDS = {"spectrum": cmd_spectrum, "sweep": cmd_sweep, "find-degeneracy": cmd_find_degeneracy,
             "verify": cmd_verify}


def _glue_negative_values(argv: Sequence[str]) -> List[str]:
    # argparse reads "--k -1,1" as two flags; rewrite to "--k=-1,1"
    out: List[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and len(tok) > 1 \
                and tok[0] == "-" and (tok[1].isdigit() or tok[1] == "."):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        return _COMMANDS[args.command](_merge(args))
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, ValueError, ArithmeticError) as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
