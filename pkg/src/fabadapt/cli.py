"""Command line interface: ``fabadapt gen|solve|zad|bandgap``.

All files are JSON (instances, families, reports, traces) or CSV (curves).
Output is a pure function of the flags and ``--seed``.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bandgap as bg
from . import fa_core as fc
from .bandgap.family import default_band
from .fa_core.adversarial import write_curves_csv
from .lp import LpError

log = logging.getLogger("fabadapt")

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class CliError(Exception):
    """Reported on stderr with exit status 1 (2 for unreadable inputs)."""

    def __init__(self, message, status=1):
        super().__init__(message)
        self.status = status


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _nonneg(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be a nonnegative number")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def parse_grid(spec, delta):
    """``None`` gives 11 points on [0, delta]; ``"a:b:n"`` is ``linspace(a, b, n)``;
    otherwise a comma-separated ascending list."""
    if spec is None:
        if delta is None:
            raise CliError("need --delta or --sigma-grid")
        return fc.default_grid(delta)
    try:
        if ":" in spec:
            a, b, n = spec.split(":")
            grid = np.linspace(float(a), float(b), int(n))
        else:
            grid = np.array([float(s) for s in spec.split(",")])
    except ValueError as exc:
        raise CliError(f"bad --sigma-grid {spec!r}: {exc}") from None
    if grid.size == 0 or np.any(grid < 0) or np.any(np.diff(grid) < 0):
        raise CliError("--sigma-grid must be ascending and nonnegative")
    return grid


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", 2) from None
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", 2) from None


def _write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def _load_problem(path):
    """An instance JSON, or a family JSON (recognized by its ``A0`` key)."""
    d = _read_json(path)
    if "A0" in d:
        return bg.EigenFamily.from_json(d)
    if "pieces_num" in d:
        return fc.SpecialPLFInstance.from_json(d)
    return fc.PLFInstance.from_json(d)


def _solution_x(path):
    """The design stored in a solve report or a bandgap trace."""
    d = _read_json(path)
    if "x" in d:
        return np.array(d["x"], dtype=float)
    if "iterates" in d and d["iterates"] and isinstance(d["iterates"][-1], list):
        return np.array(d["iterates"][-1], dtype=float)
    raise CliError(f"{path} holds no solution vector")


# -- commands ---------------------------------------------------------------

def cmd_gen(args):
    if args.kind == "plf":
        inst = fc.random_instance(args.seed, args.n, args.ni, args.nj)
        fc.save_instance(inst, args.out)
    else:
        fam = bg.random_toy_family(args.seed, n_k=args.n_k, n_x=args.n, dim=args.dim)
        bg.save_family(fam, args.out)
    log.info("wrote %s", args.out)


def cmd_solve(args):
    inst = _load_problem(args.instance)
    if isinstance(inst, bg.EigenFamily):
        raise CliError("solve expects a PLF instance; use the bandgap command for families")
    plf = fc.as_plf(inst)
    if args.mode == "original":
        if not isinstance(inst, fc.SpecialPLFInstance):
            raise CliError("mode original needs a two-family (special) instance")
        x = fc.solve_original(inst)
        out = {"mode": "original", "x": x.tolist(), "objective": fc.eval_f(plf, x, check=False)}
    else:
        if args.delta is None:
            raise CliError("mode fa needs --delta")
        x0 = plf.feasible.center()
        rep = fc.algorithm_fa(plf, x0, fc.FaParams(args.delta, max_iter=args.max_iter))
        out = {"mode": "fa", "delta": args.delta, "x": rep.x_best.tolist(),
               "objective": fc.eval_f(plf, rep.x_best, check=False),
               "fa_value": rep.value_best, "report": rep.to_json()}
    _write_json(args.out, out)
    log.info("wrote %s (objective %.10g)", args.out, out["objective"])


def cmd_zad(args):
    prob = _load_problem(args.instance)
    x_o = _solution_x(args.original)
    x_fa = _solution_x(args.fa)
    delta = args.delta
    if delta is None and args.sigma_grid is None:
        delta = _read_json(args.fa).get("delta")
    grid = parse_grid(args.sigma_grid, delta)
    if isinstance(prob, bg.EigenFamily):
        window = bg.BandWindow.default(prob)
        z_o = bg.bandgap_zad_sweep(prob, x_o, grid, window, args.K)
        z_fa = bg.bandgap_zad_sweep(prob, x_fa, grid, window, args.K)
    else:
        plf = fc.as_plf(prob)
        z_o = fc.zad_sweep(plf, x_o, grid, jobs=args.jobs).values
        z_fa = fc.zad_sweep(plf, x_fa, grid, jobs=args.jobs).values
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_curves_csv(args.out, grid, {"zad_original": z_o, "zad_fa": z_fa})
    log.info("wrote %s", args.out)


def cmd_bandgap(args):
    if args.family is not None:
        fam = _load_problem(args.family)
        if not isinstance(fam, bg.EigenFamily):
            raise CliError(f"{args.family} is not an eigenproblem family")
        fam.validate()
    else:
        fam = bg.random_toy_family(args.seed)
    window = bg.BandWindow(default_band(fam) if args.band is None else args.band)
    params = bg.BandgapParams(max_iter=args.max_iter,
                              step_bound=None if args.step_bound <= 0 else args.step_bound)
    x0 = fam.box.center()
    if args.fa:
        if args.delta is None:
            raise CliError("--fa needs --delta")
        tr = bg.fa_bandgap_optimize(fam, x0, window, args.K, args.delta, params)
    else:
        tr = bg.bandgap_optimize(fam, x0, window, args.K, args.dcg, params)
    d = tr.to_json()
    d.update({"algorithm": "fa" if args.fa else "lfp", "K": args.K, "dcg": bool(args.dcg),
              "delta": args.delta, "band": window.m, "x": tr.x_final.tolist()})
    _write_json(args.out, d)
    csv_path = Path(args.out).with_suffix(".csv")
    tr.write_csv(csv_path)
    log.info("wrote %s and %s: gap %.5f -> %.5f, max violation %.2e, repaired %d",
             args.out, csv_path, tr.gaps[0], tr.gaps[-1], tr.max_violation, sum(tr.repaired))
    if args.dcg and not args.fa and tr.max_violation > params.dcg_tol:
        raise CliError(f"final eigen-violation {tr.max_violation:.3g} exceeds {params.dcg_tol}")


# -- parser -----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="fabadapt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded instance or toy family")
    g.add_argument("kind", choices=["plf", "toy"])
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--n", type=_positive_int, default=None,
                   help="design dimension (plf: 50, toy: 8)")
    g.add_argument("--ni", type=_positive_int, default=20, help="numerator pieces (plf)")
    g.add_argument("--nj", type=_positive_int, default=30, help="denominator pieces (plf)")
    g.add_argument("--n-k", type=_positive_int, default=4, help="index points (toy)")
    g.add_argument("--dim", type=_positive_int, default=12, help="matrix size (toy)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve the original or the FA problem")
    s.add_argument("instance")
    s.add_argument("--mode", choices=["original", "fa"], default="original")
    s.add_argument("--delta", type=_nonneg)
    s.add_argument("--max-iter", type=_positive_int, default=100)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    z = sub.add_parser("zad", help="ZAD curves of two solutions")
    z.add_argument("instance", help="instance or family JSON")
    z.add_argument("original", help="report/trace of the original-problem solution")
    z.add_argument("fa", help="report/trace of the FA solution")
    z.add_argument("--delta", type=_nonneg)
    z.add_argument("--sigma-grid", help="a:b:n or comma list (default 11 points on [0, delta])")
    z.add_argument("--K", type=_positive_int, default=3, help="cross-polytope level (families)")
    z.add_argument("--jobs", type=_positive_int, default=1)
    z.add_argument("--out", required=True)
    z.set_defaults(func=cmd_zad)

    b = sub.add_parser("bandgap", help="toy bandgap optimization (LFP or FA-B)")
    b.add_argument("family", nargs="?", help="family JSON (default: toy family from --seed)")
    b.add_argument("--seed", type=_seed, default=0)
    b.add_argument("--K", type=_positive_int, default=3)
    b.add_argument("--dcg", action=argparse.BooleanOptionalAction, default=True)
    b.add_argument("--fa", action="store_true", help="run FA-B instead of the LFP algorithm")
    b.add_argument("--delta", type=_nonneg)
    b.add_argument("--band", type=_positive_int, help="1-based band index (default dim // 2)")
    b.add_argument("--max-iter", type=_positive_int, default=20)
    b.add_argument("--step-bound", type=float, default=0.1,
                   help="infinity-norm step per iteration; <= 0 disables")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bandgap)
    return p


def configure_logging():
    level = os.environ.get("FABADAPT_LOG", "quiet").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    configure_logging()
    args = build_parser().parse_args(argv)
    if args.command == "gen" and args.n is None:
        args.n = 50 if args.kind == "plf" else 8
    try:
        args.func(args)
    except CliError as exc:
        print(f"fabadapt: error: {exc}", file=sys.stderr)
        return exc.status
    except (LpError, ValueError, ArithmeticError) as exc:
        print(f"fabadapt: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
