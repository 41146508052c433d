"""Command line front end: ``bslab {words,orbit,verify,scan,plot}``.

Exit codes: 0 success, 1 a verification failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import group
from .actions import (
    BsAction,
    action_from_json,
    conjugated_strange_rotation_action,
    fast_power,
    make_affine_product,
    make_product_action,
    make_strange_rotation_action,
)
from .line import FlowSpec, make_affine_line_action, make_flow_line_action, make_trivial_line_action
from .scan import ScanConfig, scan_grid
from .verify import (
    CLOSED_FORM_TOL,
    FLOW_TOL,
    displacement_sup,
    foliation_invariance,
    measure_decay_bound,
    measure_scaling_check,
    recurrence_norm,
    relation_residual,
    standard_samples,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_CHECKS = ("relation", "displacement", "scaling", "recurrence")
ALL_CHECKS = DEFAULT_CHECKS + (
    "foliation_vertical",
    "foliation_horizontal",
    "decay_dx",
    "decay_dy",
)


class UsageError(Exception):
    pass


# configuration


def load_config(args) -> dict:
    """Defaults, overridden by the ``--config`` JSON file, overridden by flags."""
    cfg = {"seed": 0, "tol": None, "jobs": 1, "shells": None}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key in ("seed", "tol", "jobs"):
        value = getattr(args, key)
        if value is not None:
            cfg[key] = value
    return cfg


def _tol(cfg, action: BsAction) -> float:
    if cfg["tol"] is not None:
        return float(cfg["tol"])
    return FLOW_TOL if action.flow_based else CLOSED_FORM_TOL


# action specs


def _line_for(n: int, v: float):
    if 1 < v <= n:
        return make_affine_line_action(n) if v == n else make_flow_line_action(FlowSpec(v), n)
    return make_trivial_line_action(n, v)


def build_action(args) -> BsAction:
    try:
        if args.action:
            return action_from_json(json.loads(Path(args.action).read_text()))
        if args.strange:
            n, lam = int(args.strange[0]), float(args.strange[1])
            mu = float(args.strange[2]) if len(args.strange) > 2 else lam
            if not (1 < lam <= n and 1 < mu <= n):
                raise UsageError(f"strange rotation needs 1 < lam, mu <= n (got {lam}, {mu}, n={n})")
            if lam == mu:
                return make_strange_rotation_action(n, lam)
            return conjugated_strange_rotation_action(n, lam, mu)
        if args.product:
            n, lam, mu = int(args.product[0]), float(args.product[1]), float(args.product[2])
            if not (1 < lam <= n or 1 < mu <= n):
                raise UsageError("product action needs an eigenvalue in (1, n]")
            return make_product_action(_line_for(n, lam), _line_for(n, mu))
        if args.affine:
            n = int(args.affine[0])
            mu = float(args.affine[1]) if len(args.affine) > 1 else 1.0
            return make_affine_product(n, mu)
    except UsageError:
        raise
    except (OSError, ValueError, KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"bad action spec: {exc}") from exc
    raise UsageError("no action given: use --action FILE, --strange, --product or --affine")


def _add_action_flags(p):
    g = p.add_argument_group("action")
    g.add_argument("--action", metavar="FILE", help="action JSON description")
    g.add_argument("--strange", nargs="+", metavar="V", help="strange rotation: N LAM [MU]")
    g.add_argument("--product", nargs=3, metavar=("N", "LAM", "MU"), help="product action for h = diag(LAM, MU)")
    g.add_argument("--affine", nargs="+", metavar="V", help="f(x,y) = (x, y+1), h = (MU x, N y): N [MU]")


def _check_action(action: BsAction, cfg) -> None:
    report = relation_residual(action, standard_samples(cfg["seed"]), _tol(cfg, action))
    if not report.passed:
        raise _VerificationFailed(report.line())


class _VerificationFailed(Exception):
    pass


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _fmt(v: float) -> str:
    return repr(float(v))


# subcommands


def cmd_words(args, cfg) -> int:
    try:
        word = group.parse_word(args.expr)
        nf = group.normalize(word, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(nf)
    if nf.is_b_power and nf.q:
        print(f"distortion length: {group.distortion_length(nf.q, args.n)}")
    return EXIT_OK


def cmd_orbit(args, cfg) -> int:
    action = build_action(args)
    _check_action(action, cfg)
    p = np.array(args.point, dtype=float)
    rows = []
    if args.tower is not None:
        if not 0 <= args.tower <= 60:
            raise UsageError("--tower must lie in [0, 60]")
        for k in range(args.tower + 1):
            rows.append((k, fast_power(action, k, p)))
    else:
        steps = 10 if args.steps is None else args.steps
        if not 0 <= steps <= 10**6:
            raise UsageError("--steps must lie in [0, 10^6]")
        q = p.copy()
        rows.append((0, q))
        for k in range(1, steps + 1):
            q = action.f.evaluate(q)
            rows.append((k, q))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "x", "y"])
    for k, q in rows:
        w.writerow([k, _fmt(q[0]), _fmt(q[1])])
    _write(args.out, buf.getvalue())
    return EXIT_OK


def run_checks(action: BsAction, names, cfg) -> list:
    samples = standard_samples(cfg["seed"])
    tol = _tol(cfg, action)
    rng = np.random.default_rng([cfg["seed"], 7])
    pts = rng.uniform(-10.0, 10.0, (8, 2))
    m = int(math.floor(math.log(4096) / math.log(action.n) + 1e-12))
    shells = cfg["shells"] or None
    out = []
    for name in names:
        if name == "relation":
            out.append(relation_residual(action, samples, tol))
        elif name == "displacement":
            kw = {"shells": shells} if shells else {}
            out.append(displacement_sup(action.f, seed=cfg["seed"], **kw))
        elif name == "scaling":
            for kind in ("dx", "dy"):
                out.append(measure_scaling_check(action, kind, m, pts, CLOSED_FORM_TOL))
        elif name == "recurrence":
            out.append(recurrence_norm(action, 6, samples, tol))
        elif name.startswith("foliation_"):
            out.append(foliation_invariance(action.f, name.split("_", 1)[1], samples))
        elif name.startswith("decay_"):
            out.append(measure_decay_bound(action, name.split("_", 1)[1], 12, samples))
    return out


def cmd_verify(args, cfg) -> int:
    action = build_action(args)
    if args.checks is None:
        names = list(DEFAULT_CHECKS)
    else:
        names = [c.strip() for c in args.checks.split(",") if c.strip()]
        if names == ["all"]:
            names = list(DEFAULT_CHECKS)
        if not names:
            raise UsageError("empty check list")
        unknown = [c for c in names if c not in ALL_CHECKS]
        if unknown:
            raise UsageError(f"unknown checks {unknown}; available: {', '.join(ALL_CHECKS)}")
    reports = run_checks(action, names, cfg)
    passed = all(r.passed for r in reports)
    doc = {"action": action.to_json(), "pass": passed, "checks": [r.to_json() for r in reports]}
    _write(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    for r in reports:
        print(r.line(), file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def _float_list(text: str) -> list:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"malformed grid {text!r}") from exc
    if not values or not all(math.isfinite(v) and v > 0 for v in values):
        raise UsageError(f"grid values must be positive and finite: {text!r}")
    return values


def cmd_scan(args, cfg) -> int:
    lams, mus = _float_list(args.lams), _float_list(args.mus)
    if args.n < 2:
        raise UsageError("n must be >= 2")
    config = ScanConfig(seed=cfg["seed"], jobs=cfg["jobs"])
    if cfg["tol"] is not None:
        config = replace(config, closed_tol=float(cfg["tol"]))
    if cfg["shells"]:
        config = replace(config, shells=tuple(float(r) for r in cfg["shells"]))
    table = scan_grid(lams, mus, args.n, config)
    text = table.render_text()
    sys.stdout.write(text)
    if args.out_text:
        Path(args.out_text).write_text(text)
    if args.out_json:
        Path(args.out_json).write_text(table.dumps())
    return EXIT_OK if table.passed else EXIT_FAIL


def _read_orbit_csv(path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        pts = np.array([[float(r["x"]), float(r["y"])] for r in rows], dtype=float)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read orbit {path}: {exc}") from exc
    if pts.size == 0:
        raise UsageError(f"orbit file {path} has no points")
    return pts.reshape(-1, 2)


def render_svg(pts: np.ndarray, domain_base: float | None = None, size: int = 600) -> str:
    """Orbit as an SVG 1.1 document: points, connecting segments, origin marker."""
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    lo = np.minimum(lo, 0.0)
    hi = np.maximum(hi, 0.0)
    span = np.maximum(hi - lo, 1e-12)
    lo = lo - 0.05 * span
    hi = hi + 0.05 * span
    span = hi - lo
    def g(v):
        return f"{v + 0.0:.6g}"  # + 0.0 folds -0.0 into 0.0

    w = span.max() / 200
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="{g(lo[0])} {g(-hi[1])} {g(span[0])} {g(span[1])}">',
        f'<g fill="none" stroke-width="{g(w / 2)}">',
    ]
    if domain_base is not None and domain_base > 1:
        reach = float(np.max(np.abs(np.concatenate([lo, hi]))))
        k = 0
        while domain_base**k <= reach:
            out.append(f'<circle class="domain" cx="0" cy="0" r="{g(domain_base**k)}" stroke="#bbbbbb"/>')
            k += 1
    for a, b in zip(pts[:-1], pts[1:]):
        out.append(f'<line class="segment" x1="{g(a[0])}" y1="{g(-a[1])}" x2="{g(b[0])}" '
                   f'y2="{g(-b[1])}" stroke="#4477aa"/>')
    out.append("</g>")
    out.append(f'<path class="origin" d="M {g(-2 * w)} 0 H {g(2 * w)} M 0 {g(-2 * w)} V {g(2 * w)}" '
               f'stroke="#000000" stroke-width="{g(w / 2)}"/>')
    for p in pts:
        out.append(f'<circle class="point" cx="{g(p[0])}" cy="{g(-p[1])}" r="{g(w)}" fill="#cc3311"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_plot(args, cfg) -> int:
    if args.orbit:
        pts = _read_orbit_csv(args.orbit)
    else:
        action = build_action(args)
        if args.point is None:
            raise UsageError("--point is required when plotting from an action")
        q = np.array(args.point, dtype=float)
        pts = [q]
        for _ in range(args.steps):
            q = action.f.evaluate(q)
            pts.append(q)
        pts = np.array(pts)
    _write(args.out, render_svg(pts, args.domains))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bslab", description=__doc__.splitlines()[0])
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="sample-set seed")
    parser.add_argument("--tol", type=float, default=None, help="override the relation tolerance")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes for scan")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("words", help="normal form of a word in a, A, b, B")
    p.add_argument("expr")
    p.add_argument("--n", type=int, default=2)
    p.set_defaults(func=cmd_words)

    p = sub.add_parser("orbit", help="write an orbit as CSV")
    _add_action_flags(p)
    p.add_argument("--point", nargs=2, type=float, required=True, metavar=("X", "Y"))
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--steps", type=int, help="iterate f this many times")
    mode.add_argument("--tower", type=int, metavar="M", help="emit f^(n^k)(p) for k = 0..M")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("verify", help="run numerical checks on an action")
    _add_action_flags(p)
    p.add_argument("--checks", help=f"comma separated subset of: {', '.join(ALL_CHECKS)}")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="classify and check a (lam, mu) grid")
    p.add_argument("--lams", default="0.5,1.5,3")
    p.add_argument("--mus", default="0.5,1.5,3")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--out-json")
    p.add_argument("--out-text")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("plot", help="render an orbit as SVG")
    p.add_argument("--orbit", metavar="CSV")
    _add_action_flags(p)
    p.add_argument("--point", nargs=2, type=float, metavar=("X", "Y"))
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--domains", type=float, metavar="LAM", help="draw circles of radius LAM^k")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"bslab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _VerificationFailed as exc:
        print(f"bslab: relation check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
