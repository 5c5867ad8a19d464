"""Command-line front end.

Exit codes: 0 on success (or certificate pass), 2 on certificate failure,
1 on usage and validation errors. The tolerance profile defaults to
``$PICKCERT_TOLERANCE_PROFILE`` (``default``, ``strict`` or ``loose``).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import io as J
from . import rif as R
from .errors import PickCertError
from .geometry import AnalyticDisc, MobiusMap, NodeConfig, generate_nodes
from .pick import build_pick_matrix, classify, reconstruct_unique, value_disc
from .verify import (
    TOLERANCE_PROFILES,
    ChainInterpolant,
    certify_uniqueness,
    equality_sweep,
    refined_certify,
    sharpness_demo,
)

PROFILE_ENV = "PICKCERT_TOLERANCE_PROFILE"
EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    out: Path | None = None
    N: int | None = None
    n: int | None = None
    profile: str = "default"
    seed: int = 0

    def __post_init__(self):
        for name in ("N", "n"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"--{name} must be positive")
        if self.profile not in TOLERANCE_PROFILES:
            raise UsageError(f"unknown tolerance profile {self.profile!r}")

    @property
    def tolerances(self):
        return replace(TOLERANCE_PROFILES[self.profile], seed=self.seed)


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_point(text: str) -> tuple:
    return tuple(parse_complex(x) for x in text.split(","))


def _emit(obj, out):
    text = J.dumps(obj)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pickcert", description="Uniqueness certificates for Pick interpolation of rational inner functions on the polydisc.")
    ap.add_argument("--profile", default=os.environ.get(PROFILE_ENV, "default"), help="tolerance profile")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-nodes", help="write the node lattice for N and n")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=["default", "random"], default="default")
    p.add_argument("--out")

    p = sub.add_parser("make-rif", help="validate and write a rational inner function")
    p.add_argument("--tau", default="1")
    p.add_argument("--d", help="comma separated multidegree")
    p.add_argument("--q", help="polynomial JSON file for the denominator")
    p.add_argument("--random", action="store_true", help="draw a random function instead")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("eval", help="evaluate a function at points")
    p.add_argument("--rif", required=True)
    p.add_argument("--point", action="append", required=True, help="comma separated coordinates, e.g. 0.5,0.2+0.1j")

    p = sub.add_parser("restrict", help="restrict a function to an analytic disc")
    p.add_argument("--rif", required=True)
    p.add_argument("--grid")
    p.add_argument("--disc-index", type=int)
    p.add_argument("--multipliers", help="comma separated flat-disc multipliers c_2..c_n")
    p.add_argument("--mobius-t")
    p.add_argument("--mobius-a")
    p.add_argument("--out")

    p = sub.add_parser("pick", help="classify a one-variable Pick problem")
    p.add_argument("--problem", required=True)
    p.add_argument("--z-star", help="also report the value disc at this point")
    p.add_argument("--out")

    for name, helptext in (("certify", "run the uniqueness certificate"), ("refine", "certificate with refined node counts")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--rif", required=True)
        p.add_argument("--grid", required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--csv")

    p = sub.add_parser("sharpness", help="drop a node and exhibit two interpolants")
    p.add_argument("--rif", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--disc-index", type=int, default=0)
    p.add_argument("--z-star", default="-0.5")
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="compare f with the reconstruction chain on Moebius graphs")
    p.add_argument("--rif", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=1e-7)
    p.add_argument("--out")
    return ap


def _load_rif(path):
    return J.rif_from_json(J.read_json(path))


def _load_grid(path):
    return J.grid_from_json(J.read_json(path))


def _cmd_gen_nodes(args, cfg):
    grid = generate_nodes(args.N, args.n, NodeConfig(policy=args.policy, seed=args.seed))
    _emit(J.grid_to_json(grid), args.out)
    return EXIT_OK


def _cmd_make_rif(args, cfg):
    if args.random:
        f = R.random_rif(np.random.default_rng(args.seed), args.n, args.degree)
    else:
        if args.d is None or args.q is None:
            raise UsageError("make-rif needs --d and --q (or --random)")
        q = J.poly_from_json(J.read_json(args.q))
        f = R.make_rif(parse_complex(args.tau), [int(x) for x in args.d.split(",")], q)
    _emit(J.rif_to_json(f), args.out)
    return EXIT_OK


def _cmd_eval(args, cfg):
    f = _load_rif(args.rif)
    values = [R.eval_rif(f, parse_point(pt)) for pt in args.point]
    _emit({"values": [J.c2j(v) for v in values]}, None)
    return EXIT_OK


def _cmd_restrict(args, cfg):
    f = _load_rif(args.rif)
    if args.grid is not None:
        if args.disc_index is None:
            raise UsageError("--grid requires --disc-index")
        disc = _load_grid(args.grid).discs[args.disc_index]
    elif args.multipliers is not None:
        disc = AnalyticDisc.flat([parse_complex(c) for c in args.multipliers.split(",")])
    elif args.mobius_t is not None and args.mobius_a is not None:
        disc = AnalyticDisc.mobius_graph(MobiusMap(parse_complex(args.mobius_t), parse_complex(args.mobius_a)))
    else:
        raise UsageError("restrict needs --grid/--disc-index, --multipliers or --mobius-t/--mobius-a")
    g = R.restrict(f, disc)
    out = J.onevar_to_json(g)
    out["disc_degree"] = R.disc_degree(f, disc)
    _emit(out, args.out)
    return EXIT_OK


def _cmd_pick(args, cfg):
    prob = J.pick_problem_from_json(J.read_json(args.problem))
    tol = cfg.tolerances.pick
    pm = build_pick_matrix(prob, tol)
    verdict = classify(pm, tol)
    out = J.verdict_to_json(pm, verdict)
    if verdict.unique:
        out["interpolant"] = J.onevar_to_json(reconstruct_unique(prob, pm, tol))
    if args.z_star is not None and verdict.solvable:
        vd = value_disc(prob, parse_complex(args.z_star), tol)
        out["value_disc"] = {"center": J.c2j(vd.center), "radius": vd.radius}
    _emit(out, args.out)
    return EXIT_OK


def _cmd_certify(args, cfg, refined=False):
    f, grid = _load_rif(args.rif), _load_grid(args.grid)
    run = refined_certify if refined else certify_uniqueness
    cert = run(f, grid, cfg.tolerances)
    _emit(J.certificate_to_json(cert, f, grid), args.out)
    csv_path = args.csv or (str(Path(args.out).with_suffix(".csv")) if args.out else None)
    if csv_path:
        Path(csv_path).write_text(J.certificate_csv(cert), encoding="utf-8")
    return EXIT_OK if cert.overall else EXIT_FAIL


def _cmd_sharpness(args, cfg):
    f, grid = _load_rif(args.rif), _load_grid(args.grid)
    report = sharpness_demo(f, grid, args.disc_index, parse_complex(args.z_star), tol=cfg.tolerances)
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def _cmd_sweep(args, cfg):
    f, grid = _load_rif(args.rif), _load_grid(args.grid)
    if grid.n != 2:
        raise UsageError("sweep is defined on the bidisc (n = 2)")
    cert = certify_uniqueness(f, grid, cfg.tolerances)
    if not cert.overall:
        _emit({"certificate_failed": cert.failing_stage}, args.out)
        return EXIT_FAIL
    chain = ChainInterpolant(cert, grid.tau_table[0])
    report = equality_sweep(lambda x, y: R.eval_rif(f, (x, y)), chain, grid.tau_table[0], seed=args.seed)
    out = report.to_dict()
    out["threshold"] = args.threshold
    out["passed"] = report.max_deviation <= args.threshold
    _emit(out, args.out)
    return EXIT_OK if out["passed"] else EXIT_FAIL


COMMANDS = {
    "gen-nodes": _cmd_gen_nodes,
    "make-rif": _cmd_make_rif,
    "eval": _cmd_eval,
    "restrict": _cmd_restrict,
    "pick": _cmd_pick,
    "certify": _cmd_certify,
    "refine": lambda a, c: _cmd_certify(a, c, refined=True),
    "sharpness": _cmd_sharpness,
    "sweep": _cmd_sweep,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(
            args.cmd,
            out=Path(args.out) if getattr(args, "out", None) else None,
            N=getattr(args, "N", None),
            n=getattr(args, "n", None),
            profile=args.profile,
            seed=getattr(args, "seed", 0),
        )
        return COMMANDS[args.cmd](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (PickCertError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
