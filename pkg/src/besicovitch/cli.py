"""Command-line front end: ``besicovitch {seminorm,classify,condition,operator,gallery}``.

Jobs are described by a JSON config (see :class:`JobConfig`).  Reports are
written as sorted-key JSON to stdout and, with ``--out DIR``, to
``DIR/report.json`` together with a sweep CSV ``DIR/sweep.csv`` whose
columns are ``t`` (or ``k``, ``l``), ``value_re``, ``value_im`` and
``window_measure``.

Exit codes: 0 on success, 2 when the verdict is inconclusive, 1 on error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path
from typing import Optional

import numpy as np

from .classify import classify_besicovitch
from .core import Domain, make_window_sweep
from .dosscond import L_SCHEDULE, K_SCHEDULE, condition_A_residual, condition_B_functional
from .expr import ExpressionError, expression_field, parse_expression
from .gallery import GALLERY_IDS, PRESETS, gallery_get, gallery_manifest, gallery_verify
from .luxemburg import VariableExponent
from .operators import (KernelSpec, convolve_on_grid, gaussian_semigroup, infinite_convolution,
                        semilinear_fixed_point)
from .seminorm import Gauge, WeightProfile, WindowWeight, besicovitch_bounded, m_p_seminorm, weighted_residual
from .trigpoly import TrigPolynomial

COMMANDS = ("seminorm", "classify", "condition", "operator", "gallery")

_TOP_KEYS = {"command", "field", "profile", "windows", "window_shape", "ks", "ls", "taus",
             "options", "outputs", "seed"}
_FIELD_KEYS = {"gallery", "params", "expr", "dim", "domain", "resolution", "order"}
_PROFILE_KEYS = {"phi", "weight", "p"}
_OUTPUT_KEYS = {"report", "csv"}
_OPTION_KEYS = {
    "seminorm": {"mode", "candidate", "p", "normalization"},
    "classify": {"budget", "frequencies", "lattice", "coef_rule", "eps_class"},
    "condition": {"which", "a", "mode", "lam", "candidate"},
    "operator": {"kind", "kernel", "points", "t0", "grid", "G", "lipschitz", "growth"},
    "gallery": {"id", "verify"},
}


class ConfigError(ValueError):
    pass


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


@dataclass
class JobConfig:
    """A single CLI job.

    ``field`` is ``{"gallery": id, "params": {...}}`` or
    ``{"expr": str, "dim": n, "domain": {...}, "resolution": h, "order": m}``.
    ``profile`` holds ``phi`` (``{"kind": "identity"}`` or
    ``{"kind": "power", "alpha": a}``), ``weight`` (``{"kind": "power",
    "beta": b}`` or ``{"kind": "root", "n": n, "p": p}``) and ``p`` (number,
    ``"inf"`` or ``{"expr": str}``).  ``windows`` is a list of sizes or
    ``{"t0", "ratio", "count"}``.
    """

    command: str
    field: Optional[dict] = None
    profile: dict = dc_field(default_factory=dict)
    windows: Optional[object] = None
    window_shape: str = "cube"
    ks: Optional[list] = None
    ls: Optional[list] = None
    taus: Optional[list] = None
    options: dict = dc_field(default_factory=dict)
    outputs: dict = dc_field(default_factory=lambda: {"report": "report.json", "csv": "sweep.csv"})
    seed: int = 0

    @classmethod
    def from_dict(cls, d):
        _check_keys(d, _TOP_KEYS, "config")
        if d.get("command") not in COMMANDS:
            raise ConfigError(f"command must be one of {', '.join(COMMANDS)}")
        cmd = d["command"]
        if d.get("field") is not None:
            _check_keys(d["field"], _FIELD_KEYS, "field")
            if ("gallery" in d["field"]) == ("expr" in d["field"]):
                raise ConfigError("field needs exactly one of 'gallery' or 'expr'")
        _check_keys(d.get("profile", {}), _PROFILE_KEYS, "profile")
        _check_keys(d.get("options", {}), _OPTION_KEYS[cmd], "options")
        _check_keys(d.get("outputs", {}), _OUTPUT_KEYS, "outputs")
        if d.get("window_shape", "cube") not in ("cube", "ball"):
            raise ConfigError("window_shape must be 'cube' or 'ball'")
        base = cls(cmd)
        kw = {k: d[k] for k in d if k != "command"}
        if "outputs" in kw:
            kw["outputs"] = {**base.outputs, **kw["outputs"]}
        return cls(command=cmd, **kw)

    @classmethod
    def from_json(cls, s):
        try:
            d = json.loads(s)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_dict(d)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_field(spec):
    if spec is None:
        raise ConfigError("this command needs a field")
    if "gallery" in spec:
        return gallery_get(spec["gallery"], spec.get("params")).field
    n = int(spec.get("dim", 1))
    dom = Domain.from_dict({"n": n, **spec["domain"]}) if "domain" in spec else Domain.full(n)
    return expression_field(spec["expr"], n, dom, float(spec.get("resolution", 0.5)),
                            int(spec.get("order", 8)))


def build_profile(spec, n=1):
    phi = spec.get("phi", {"kind": "identity"})
    if phi.get("kind", "identity") == "identity":
        g = Gauge.identity()
    elif phi["kind"] == "power":
        g = Gauge.power(float(phi["alpha"]))
    else:
        raise ConfigError(f"unknown gauge kind {phi['kind']!r}")
    w = spec.get("weight", {"kind": "power", "beta": n})
    if w.get("kind", "power") == "power":
        wt = WindowWeight.power(float(w.get("beta", n)))
    elif w["kind"] == "root":
        wt = WindowWeight.root(float(w.get("n", n)), float(w["p"]))
    else:
        raise ConfigError(f"unknown weight kind {w['kind']!r}")
    p = spec.get("p", 1.0)
    if isinstance(p, dict):
        f = parse_expression(p["expr"], n)
        pe = VariableExponent.function(f, name=p["expr"])
    elif p in ("inf", "infinity"):
        pe = VariableExponent.constant(math.inf)
    else:
        pe = VariableExponent.constant(float(p))
    return WeightProfile(g, wt, pe)


def build_windows(cfg, domain, preset):
    shape = cfg.window_shape
    if cfg.windows is None:
        P = PRESETS[preset]
        sched = ({"t0": P["t0"], "ratio": 2.0, "count": P["count"]} if domain.n == 1 else
                 {"t0": P["t0_2d"], "ratio": 2.0, "count": P["count_2d"]})
    else:
        sched = cfg.windows
    return make_window_sweep(domain, shape, sched)


def _poly(spec, n):
    if spec is None or spec == "zero":
        return None
    return TrigPolynomial.from_list(spec, n=n)


def _kernel(spec):
    kind = spec.get("form", "exponential")
    if kind == "exponential":
        return KernelSpec.exponential(float(spec.get("M", 1.0)), float(spec.get("c", 1.0)),
                                      float(spec.get("beta", 1.0)))
    if kind == "algebraic":
        return KernelSpec.algebraic(float(spec.get("M", 1.0)), float(spec["beta"]), float(spec["gamma"]))
    raise ConfigError(f"unknown kernel form {kind!r}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _measure_rows(windows, values, label="t"):
    return [(t, float(v), 0.0, w.measure) for t, v, w in zip(windows.ts, values, windows)]


def cmd_seminorm(cfg, preset):
    F = build_field(cfg.field)
    W = build_windows(cfg, F.domain, preset)
    opt = cfg.options
    mode = opt.get("mode", "residual")
    if mode == "mp":
        rep = m_p_seminorm(F, float(opt.get("p", 1.0)), W, opt.get("normalization", "measure"))
        out = rep.to_dict()
    elif mode == "bounded":
        prof = build_profile(cfg.profile, F.n)
        v = besicovitch_bounded(F, prof, W)
        rep, out = v.report, v.to_dict()
    elif mode == "residual":
        prof = build_profile(cfg.profile, F.n)
        rep = weighted_residual(F, _poly(opt.get("candidate"), F.n), prof, W)
        out = rep.to_dict()
    else:
        raise ConfigError(f"unknown seminorm mode {mode!r}")
    rows = _measure_rows(W, rep.values)
    code = 2 if rep.estimate.trend == "inconclusive" else 0
    return out, ("t", rows), code


def cmd_classify(cfg, preset):
    F = build_field(cfg.field)
    W = build_windows(cfg, F.domain, preset)
    prof = build_profile(cfg.profile, F.n)
    o = cfg.options
    rep = classify_besicovitch(F, prof, W, budget=o.get("budget"), frequencies=o.get("frequencies"),
                               lattice=o.get("lattice"), coef_rule=o.get("coef_rule", "projection"),
                               eps_class=float(o.get("eps_class", 1e-2)))
    mlast = W.windows[-1].measure
    rows = [(k, float(c.estimate), 0.0, mlast) for k, c in enumerate(rep.curve)]
    return rep.to_dict(), ("k", rows), 2 if rep.verdict == "inconclusive" else 0


def cmd_condition(cfg, preset):
    F = build_field(cfg.field)
    W = build_windows(cfg, F.domain, preset)
    prof = build_profile(cfg.profile, F.n)
    o = cfg.options
    mlast = W.windows[-1].measure
    which = o.get("which", "A")
    if which == "A":
        a = o.get("a")
        if a is None:
            raise ConfigError("condition A needs options.a")
        cand = o.get("candidate")
        cand = None if cand is None else (
            TrigPolynomial.zero(F.n, F.dim) if cand == "zero" else _poly(cand, F.n))
        rep = condition_A_residual(F, a, prof, W, ks=cfg.ks or K_SCHEDULE, candidate=cand,
                                   mode=o.get("mode", "A"), seed=cfg.seed)
        rows = [(k, float(e), 0.0, mlast) for k, e in zip(rep.ks, rep.estimates)]
        code = 2 if not np.isfinite(rep.k_slope) and rep.estimates.max() > 0 else 0
        return rep.to_dict(), ("k", rows), code
    if which == "B":
        lam = o.get("lam")
        if lam is None:
            raise ConfigError("condition B needs options.lam")
        rep = condition_B_functional(F, lam, prof, W, ls=cfg.ls or L_SCHEDULE)
        rows = [(l, float(e), 0.0, mlast) for l, e in zip(rep.ls, rep.estimates)]
        return rep.to_dict(), ("l", rows), 2 if rep.outer.trend == "inconclusive" else 0
    raise ConfigError("options.which must be 'A' or 'B'")


def cmd_operator(cfg, preset):
    o = cfg.options
    kind = o.get("kind", "convolution")
    growth = tuple(o.get("growth", (1.0, 0.0)))
    if kind == "fixed-point":
        spec = _kernel(o.get("kernel", {}))
        g = parse_expression(o["G"], 2)
        G = lambda s, u: g(np.stack([np.real(s), np.real(u)], axis=1))  # noqa: E731
        grid = o.get("grid", {"lo": -10.0, "hi": 10.0, "h": 0.02})
        res = semilinear_fixed_point(spec, G, float(o["lipschitz"]), float(grid["lo"]), float(grid["hi"]),
                                     h=float(grid.get("h", 0.02)), growth=growth)
        g_ = res.field.meta["grid"]
        v = res.field.meta["values"][:, 0]
        rows = [(float(t), float(z.real), float(z.imag), "") for t, z in zip(g_, v)]
        return res.to_dict(), ("t", rows), 0
    F = build_field(cfg.field)
    if kind == "convolution":
        spec = _kernel(o.get("kernel", {}))
        if "grid" in o:
            gr = o["grid"]
            out = convolve_on_grid(spec, F, float(gr["lo"]), float(gr["hi"]), float(gr.get("h", 0.02)), growth)
            ts, vals = out.meta["grid"], out.meta["values"][:, 0]
        else:
            ts = np.asarray(o.get("points", [0.0]), dtype=float)
            vals = np.atleast_1d(infinite_convolution(spec, F, ts, growth))
            if vals.ndim > 1:
                vals = vals[:, 0]
    elif kind == "gaussian":
        ts = np.asarray(o.get("points", [0.0]), dtype=float)
        vals = gaussian_semigroup(F, float(o.get("t0", 1.0)), ts.reshape(-1, F.n), growth)[:, 0]
        ts = ts.reshape(-1, F.n)[:, 0]
    else:
        raise ConfigError(f"unknown operator kind {kind!r}")
    rows = [(float(t), float(z.real), float(z.imag), "") for t, z in zip(ts, vals)]
    rep = {"kind": kind, "points": [r[0] for r in rows], "values_re": [r[1] for r in rows],
           "values_im": [r[2] for r in rows]}
    return rep, ("t", rows), 0


def cmd_gallery(gid=None, verify=False, preset="standard"):
    if gid is None:
        return {"ids": list(GALLERY_IDS), "manifest": gallery_manifest()}, None, 0
    if gid not in GALLERY_IDS:
        raise ConfigError(f"unknown gallery id {gid!r}")
    if not verify:
        return gallery_get(gid).to_dict(), None, 0
    rep = gallery_verify(gid, preset)
    d = rep.to_dict()
    d.pop("seconds")  # keep reports byte-identical across runs
    d["ok"] = rep.ok
    return d, None, 2 if "inconclusive" in rep.statuses else 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


def write_csv(path, label, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([label, "value_re", "value_im", "window_measure"])
        for r in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in r])


def make_parser():
    ap = argparse.ArgumentParser(prog="besicovitch", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("id", nargs="?", help="gallery id (gallery command only)")
    ap.add_argument("--config", type=Path, help="JSON job config")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--preset", choices=tuple(PRESETS), default="standard")
    ap.add_argument("--window-shape", choices=("cube", "ball"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--verify", action="store_true", help="run gallery verification recipes")
    return ap


def run(argv=None):
    """Run the CLI and return ``(exit code, report dict or None)``."""
    args = make_parser().parse_args(argv)
    try:
        if args.command == "gallery" and args.config is None:
            report, table, code = cmd_gallery(args.id, args.verify, args.preset)
            cfg = JobConfig("gallery")
        else:
            if args.config is None:
                raise ConfigError(f"{args.command} needs --config")
            cfg = JobConfig.from_json(args.config.read_text())
            if cfg.command != args.command:
                raise ConfigError(f"config command {cfg.command!r} does not match {args.command!r}")
            if args.window_shape:
                cfg.window_shape = args.window_shape
            if args.seed is not None:
                cfg.seed = args.seed
            np.random.seed(cfg.seed)
            fn = {"seminorm": cmd_seminorm, "classify": cmd_classify, "condition": cmd_condition,
                  "operator": cmd_operator}.get(cfg.command)
            if fn is None:
                o = cfg.options
                report, table, code = cmd_gallery(o.get("id"), bool(o.get("verify")), args.preset)
            else:
                report, table, code = fn(cfg, args.preset)
        text = json.dumps(_clean(report), sort_keys=True, indent=2)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / cfg.outputs["report"]).write_text(text + "\n")
            if table is not None:
                write_csv(args.out / cfg.outputs["csv"], *table)
        sys.stdout.write(text + "\n")
        return code, report
    except (ConfigError, ExpressionError, KeyError, ValueError, TypeError, NotImplementedError,
            FloatingPointError, RuntimeError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1, None


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
