"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .angles import (
    load_default_angles,
    optimize_tree_angles,
    read_angle_file,
    write_angle_file,
)
from .bench import load_plan, run_plan
from .cones import enumerate_cones
from .errors import QGreedyError
from .graph import generate_regular, read_edge_list, write_edge_list
from .noise import NoiseParams, fit_noise, required_shots
from .solver import (
    SolverConfig,
    format_trace,
    solve_classical_greedy,
    solve_exact,
    solve_quantum_greedy,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def build_parser() -> _Parser:
    ap = _Parser(prog="qgreedy", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--depth", type=int, default=1)
    ap.add_argument("--out", default=None)

    # the same flags are valid after the subcommand; SUPPRESS keeps the
    # subparser from clobbering a value given before it
    shared = _Parser(add_help=False)
    shared.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--lambda", dest="lam", type=float, default=argparse.SUPPRESS)
    shared.add_argument("--depth", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--out", default=argparse.SUPPRESS)

    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, **kw):
        return sub.add_parser(name, parents=[shared], **kw)

    gen = add("generate", help="emit a random regular graph edge list")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--degree", type=int, default=3)

    ang = add("angles", help="optimize tree angles, write an angle file")
    ang.add_argument("--degree", type=int, default=3)
    ang.add_argument("--restarts", type=int, default=6)

    sol = add("solve", help="run one solver on one instance, print the trace")
    sol.add_argument("--in", dest="infile", default=None,
                     help="edge list file (default: generate from --n/--seed)")
    sol.add_argument("--n", type=int, default=None)
    sol.add_argument("--degree", type=int, default=3)
    sol.add_argument("--solver", choices=("qgreedy", "greedy", "exact"),
                     default="qgreedy")
    sol.add_argument("--angles", default=None, help="angle file (default: shipped)")
    sol.add_argument("--advice", choices=("ideal", "shots", "noise"), default="ideal")
    sol.add_argument("--shots", type=int, default=0)
    sol.add_argument("--delta", default=None,
                     help='cutoff; a number, or "auto" (default: auto for '
                          "shot/noise advice, 0 for ideal)")
    sol.add_argument("--eta", type=float, default=0.0)
    sol.add_argument("--alpha", type=float, default=0.0)
    sol.add_argument("--sigma", type=float, default=0.0)
    sol.add_argument("--noise-seed", type=int, default=0)
    sol.add_argument("--node-limit", type=int, default=40)

    cen = add("census", help="enumerate depth-p cones of max degree d")
    cen.add_argument("--degree", type=int, default=3)

    ben = add("bench", help="run an experiment plan")
    ben.add_argument("--plan", required=True)

    fit = add("fit-noise", help="fit the noise model to (ideal, noisy, size) triples")
    fit.add_argument("--pairs", required=True,
                     help="file of 'ideal noisy cone_size' lines")

    sho = add("shots", help="Hoeffding shot budget")
    sho.add_argument("--n", type=int, required=True)
    sho.add_argument("--eps", type=float, required=True)
    sho.add_argument("--gap", type=float, required=True)
    return ap


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_generate(args) -> int:
    g = generate_regular(args.n, args.degree, args.seed)
    _emit(write_edge_list(g), args.out)
    return 0


def _cmd_angles(args) -> int:
    opt = optimize_tree_angles(
        args.depth, args.degree, args.lam, seed=args.seed, restarts=args.restarts
    )
    out = args.out or f"p{args.depth}_d{args.degree}_lam{args.lam:g}.txt"
    write_angle_file(out, opt)
    print(f"wrote {out} energy {opt.energy:.17g}")
    return 0


def _cmd_solve(args) -> int:
    if args.infile:
        with open(args.infile) as fh:
            g = read_edge_list(fh.read())
    elif args.n is not None:
        g = generate_regular(args.n, args.degree, args.seed)
    else:
        raise QGreedyError("solve needs --in or --n")
    if args.solver == "exact":
        nodes = solve_exact(g, node_limit=args.node_limit)
        ratio = len(nodes) / g.alive_count
        _emit(
            "nodes " + " ".join(str(v) for v in sorted(nodes))
            + f"\nset_size {len(nodes)} ratio {ratio:.17g}\n",
            args.out,
        )
        return 0
    if args.solver == "greedy":
        trace = solve_classical_greedy(g, seed=args.seed)
        _emit(format_trace(trace), args.out)
        return 0
    if args.angles:
        schedule = read_angle_file(args.angles).schedule
    else:
        schedule = load_default_angles(args.depth, args.degree, args.lam).schedule
    noise = None
    if args.advice == "noise":
        noise = NoiseParams(args.eta, args.alpha, args.sigma, args.noise_seed)
    if args.delta is None:
        delta = 0.0 if args.advice == "ideal" else None
    elif args.delta == "auto":
        delta = None
    else:
        delta = float(args.delta)
    cfg = SolverConfig(
        schedule=schedule, delta=delta, advice=args.advice,
        shots=args.shots, noise=noise, seed=args.seed,
    )
    trace = solve_quantum_greedy(g, cfg)
    _emit(format_trace(trace), args.out)
    return 0


def _cmd_census(args) -> int:
    report, _cones = enumerate_cones(args.depth, args.degree)
    print(f"total {report.total} trees {report.trees} nontrees {report.nontrees}")
    return 0


def _cmd_bench(args) -> int:
    plan = load_plan(args.plan)
    report = run_plan(plan)
    for r in report.rows:
        print(
            f"size {r.size} solver {r.solver} depth {r.depth} "
            f"instances {r.instances} mean_r {r.mean_r:.6f} 3sem {r.sem3:.6f}"
        )
    print(f"wrote {plan.out}")
    return 0


def _cmd_fit_noise(args) -> int:
    triples = []
    with open(args.pairs) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            x, y, s = line.split()
            triples.append((float(x), float(y), int(s)))
    params = fit_noise(triples)
    print(f"eta {params.eta:.17g} alpha {params.alpha:.17g} sigma {params.sigma:.17g}")
    return 0


def _cmd_shots(args) -> int:
    print(required_shots(args.n, args.eps, args.gap))
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "angles": _cmd_angles,
    "solve": _cmd_solve,
    "census": _cmd_census,
    "bench": _cmd_bench,
    "fit-noise": _cmd_fit_noise,
    "shots": _cmd_shots,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (QGreedyError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
