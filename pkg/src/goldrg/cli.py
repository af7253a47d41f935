"""Command-line front end: `goldrg <command> ...`.

Exit status 0 on success, 1 when a computation fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import DEFAULT_DEGREE, DEFAULT_RADII, TaylorSeries, check_radii, ts_affine_compose, ts_norm

KNOWN_KEYS = {"radii", "truncation_degree", "output_format", "threads"}


class UsageError(Exception):
    pass


@dataclass
class Config:
    radii: tuple = DEFAULT_RADII
    truncation_degree: int = DEFAULT_DEGREE
    tolerances: dict = field(default_factory=dict)
    output_format: str = "json"
    threads: int = 1

    def __post_init__(self):
        check_radii(*self.radii)
        if self.output_format not in ("json", "csv"):
            raise UsageError(f"unknown output format {self.output_format!r}")
        if self.threads < 1:
            raise UsageError("threads must be positive")

    @classmethod
    def load(cls, path: str) -> "Config":
        """key=value lines; '#' starts a comment; tol.<name>=<float> sets tolerances."""
        kw: dict = {"tolerances": {}}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, value = (s.strip() for s in line.split("=", 1))
                if key.startswith("tol."):
                    kw["tolerances"][key[4:]] = float(value)
                elif key == "radii":
                    kw["radii"] = tuple(float(v) for v in value.split(","))
                elif key == "truncation_degree":
                    kw["truncation_degree"] = int(value)
                elif key == "threads":
                    kw["threads"] = int(value)
                elif key == "output_format":
                    kw["output_format"] = value
                else:
                    raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        return cls(**kw)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _golden(text: str):
    from .golden import parse_golden

    try:
        return parse_golden(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _grid(text: str) -> list[float]:
    """a:b:step (inclusive) or a comma list."""
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError("grid must be start:stop:step with step > 0")
        a, b, s = parts
        count = int(math.floor((b - a) / s + 1e-9)) + 1
        return [round(a + i * s, 12) for i in range(count)]
    return [float(p) for p in text.split(",")]


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="goldrg", description="Golden-mean renormalization of quasiperiodic cocycles.")
    p.add_argument("--config", help="key=value configuration file")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cocycle_args(q):
        q.add_argument("--lambda", dest="lam", type=float, required=True)
        q.add_argument("--energy", type=float, default=0.0)
        q.add_argument("--iters", type=int, default=46368)
        q.add_argument("--out")

    q = sub.add_parser("lyapunov", help="Lyapunov exponent of the almost Mathieu cocycle")
    cocycle_args(q)
    q.add_argument("--x0", type=float, default=0.0)

    q = sub.add_parser("rotation", help="rotation number by sign counting and angle lift")
    cocycle_args(q)

    q = sub.add_parser("rg", help="renormalization iteration")
    rg_sub = q.add_subparsers(dest="action", required=True, parser_class=_Parser)
    r = rg_sub.add_parser("iterate")
    r.add_argument("--delta", type=float, required=True)
    r.add_argument("--epsilon", type=float, default=0.0)
    r.add_argument("--n", type=int, default=1)
    r.add_argument("--steps", type=int, default=4)
    r.add_argument("--L", dest="L_choice", choices=["id", "S", "S-sigma"], default="S")
    r.add_argument("--norm", choices=["none", "norm", "trace"], default="norm")
    r.add_argument("--target-b0", type=float)
    r.add_argument("--out")

    q = sub.add_parser("zeros", help="exact zero-set dynamics")
    z_sub = q.add_subparsers(dest="action", required=True, parser_class=_Parser)
    z = z_sub.add_parser("run")
    z.add_argument("--rho", type=_golden, required=True)
    z.add_argument("--steps", type=int, default=12)
    z.add_argument("--window", type=_golden, default=None)
    z.add_argument("--out")

    q = sub.add_parser("limitfn", help="universal limit functions")
    l_sub = q.add_subparsers(dest="action", required=True, parser_class=_Parser)
    b = l_sub.add_parser("build")
    b.add_argument("--rho", type=_golden, required=True)
    b.add_argument("--cutoff", type=float, default=2000.0)
    b.add_argument("--out")
    v = l_sub.add_parser("verify")
    v.add_argument("--rho", type=_golden, default=None)
    v.add_argument("--delta", type=float, required=True)
    v.add_argument("--kmax", type=int, default=4)
    v.add_argument("--window", type=float, default=0.5)
    v.add_argument("--cutoff", type=float, default=2000.0)
    v.add_argument("--out")

    q = sub.add_parser("curve", help="critical curve eps(delta)")
    c_sub = q.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = c_sub.add_parser("find")
    c.add_argument("--rho", type=_golden, required=True)
    c.add_argument("--delta-grid", type=_grid, required=True)
    c.add_argument("--tol", type=float, default=1e-6)
    c.add_argument("--out")

    q = sub.add_parser("verify", help="run acceptance checks")
    q.add_argument("--suite", default="fast")

    q = sub.add_parser("analytic", help="Taylor-series utilities")
    a_sub = q.add_subparsers(dest="action", required=True, parser_class=_Parser)
    a = a_sub.add_parser("norm")
    a.add_argument("--coeffs", type=_floats, required=True)
    a.add_argument("--radius", type=float, required=True)
    a = a_sub.add_parser("compose")
    a.add_argument("--coeffs", type=_floats, required=True)
    a.add_argument("--radius", type=float, required=True)
    a.add_argument("--scale", type=float, required=True)
    a.add_argument("--shift", type=float, required=True)
    a.add_argument("--out-radius", type=float, required=True)
    return p


# ---------------------------------------------------------------- output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def emit(payload, out: str | None, fmt: str = "json"):
    if fmt == "csv" and isinstance(payload, list):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(payload[0].keys()) if payload else [])
        writer.writeheader()
        writer.writerows(_jsonable(payload))
        text = buf.getvalue()
    else:
        text = json.dumps(_jsonable(payload), indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_lyapunov(args, cfg):
    from .cocycle import Schrodinger, golden_skew, lyapunov

    G = golden_skew(Schrodinger(args.lam, args.energy))
    value = lyapunov(G, args.iters, args.x0)
    emit({"lambda": args.lam, "energy": args.energy, "iters": args.iters, "value": value}, args.out)


def cmd_rotation(args, cfg):
    from .cocycle import Schrodinger, golden_skew, rotation_lift, rotation_sign_count

    G = golden_skew(Schrodinger(args.lam, args.energy))
    frac = rotation_sign_count(G, args.iters)
    emit({
        "lambda": args.lam,
        "energy": args.energy,
        "iters": args.iters,
        "value": float(frac),
        "sign_count": f"{frac.numerator}/{frac.denominator}",
        "lift": rotation_lift(G, args.iters),
    }, args.out)


def cmd_rg(args, cfg):
    from .rg import RgOptions, iterate, scaled_am_pair

    opts = RgOptions(
        n=args.n,
        L_choice={"id": "identity"}.get(args.L_choice, args.L_choice),
        normalization=args.norm,
        target_b0=args.target_b0,
    )
    P0 = scaled_am_pair(args.delta, args.epsilon, cfg.radii, cfg.truncation_degree)
    traj = iterate(P0, args.steps, opts, cfg.tolerances.get("converge", 1e-10))
    emit(traj.records, args.out, cfg.output_format)


def cmd_zeros(args, cfg):
    from .golden import HALF
    from .zeros import ZeroPair, ZeroSet, EMPTY, gap_multiset, window, zero_step, _require_periodic

    _require_periodic(args.rho)
    W = args.window if args.window is not None else HALF
    P = ZeroPair(EMPTY, ZeroSet.from_points([args.rho]))
    records = []
    for k in range(args.steps + 1):
        wa, wb = window(P.A, W), window(P.B, W)
        rec = {"step": k, "A": wa.to_json(), "B": wb.to_json()}
        for name, Z in (("A", wa), ("B", wb)):
            if len(Z) >= 2:
                rec[f"gaps_{name}"] = {str(g): c for g, c in sorted(gap_multiset(Z).items(), key=lambda t: float(t[0]))}
        records.append(rec)
        P = zero_step(P, prune=W)
    emit(records, args.out)


def cmd_limitfn(args, cfg):
    from .golden import parse_golden
    from .limits import fixed_point, verify_scaling_limit
    from .zeros import run_until_periodic

    rho = args.rho if args.rho is not None else parse_golden("1/4")
    n = run_until_periodic(rho).n
    fp = fixed_point(rho, n, args.cutoff)
    if args.action == "build":
        out = fp.to_json()
        out["rho"] = str(rho)
        out["smallest_zero_b"] = float(fp.b.smallest_zero()) if fp.b.zeros else None
        emit(out, args.out)
        return
    from .cocycle import Schrodinger, golden_skew
    from .curves import critical_curve

    point = critical_curve(rho, args.delta, cfg.tolerances.get("curve", 1e-6))
    lam = 1.0 / args.delta
    G = golden_skew(Schrodinger(lam, lam * point.epsilon))
    rep = verify_scaling_limit(G, n, args.kmax, args.window, fp)
    out = rep.to_json()
    out.update({"delta": args.delta, "epsilon": point.epsilon, "n": n, "slope_M": rep.slope("M"), "slope_W": rep.slope("W")} if len(rep.ks) > 1 else {"delta": args.delta, "epsilon": point.epsilon, "n": n})
    emit(out, args.out)


def _curve_point(job):
    from .curves import critical_curve

    rho, delta, tol = job
    return critical_curve(rho, delta, tol).to_row()


def cmd_curve(args, cfg):
    jobs = [(args.rho, d, args.tol) for d in args.delta_grid]
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.threads) as pool:
            rows = list(pool.map(_curve_point, jobs))
    else:
        rows = [_curve_point(j) for j in jobs]
    emit(rows, args.out, "csv")


def cmd_verify(args, cfg):
    from .acceptance import run_suite

    try:
        results = run_suite(args.suite)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))
    for res in results:
        print(res.line(), flush=True)
    if not all(r.passed for r in results):
        return 1
    return 0


def cmd_analytic(args, cfg):
    f = TaylorSeries(np.array(args.coeffs), args.radius)
    if args.action == "norm":
        emit({"norm": ts_norm(f)}, None)
    else:
        g = ts_affine_compose(f, args.scale, args.shift, args.out_radius)
        emit(g.to_json(), None)


COMMANDS = {
    "lyapunov": cmd_lyapunov,
    "rotation": cmd_rotation,
    "rg": cmd_rg,
    "zeros": cmd_zeros,
    "limitfn": cmd_limitfn,
    "curve": cmd_curve,
    "verify": cmd_verify,
    "analytic": cmd_analytic,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = Config.load(args.config) if args.config else Config()
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        parser.print_usage(sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"goldrg: {exc}\n")
        return 2
    try:
        code = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        sys.stderr.write(f"goldrg: {type(exc).__name__}: {exc}\n")
        return 1
    return int(code or 0)


def main() -> None:
    sys.exit(run())
