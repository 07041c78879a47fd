"""Command-line runner: ``ancillatherm <command> [flags]``.

``--iterations`` always counts total applications ``T`` of the unit.
Exit codes: 0 success, 2 validation error, 3 live-register capacity exceeded.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import os
import sys
from pathlib import Path

from . import analysis, experiments
from .hamiltonians import builtin, load_hamiltonian
from .noise import PROFILES, builtin_profile, load_profile
from .qstate import CapacityError

OUT_ENV = "ANCILLATHERM_OUT"
EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY = 0, 2, 3

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_number(text: str) -> float:
    """Arithmetic on numbers and ``pi`` only, e.g. ``3*pi/8``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"cannot parse number {text!r}")

    try:
        return ev(ast.parse(text.strip().replace("π", "pi"), mode="eval"))
    except (SyntaxError, ZeroDivisionError):
        raise ValueError(f"cannot parse number {text!r}") from None


def parse_list(text: str) -> list[float]:
    vals = [parse_number(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise ValueError("empty list")
    return vals


def parse_iterations(text: str) -> list[int]:
    """``5`` -> 1..5, ``2..4`` -> 2,3,4, ``1,3,5`` as given."""
    text = text.strip()
    if ".." in text:
        a, b = text.split("..")
        out = list(range(int(a), int(b) + 1))
    elif "," in text:
        out = [int(t) for t in text.split(",")]
    else:
        out = list(range(1, int(text) + 1))
    if not out or min(out) < 1:
        raise ValueError("iterations must be >= 1")
    return sorted(set(out))


def resolve_noise(spec: str | None, seed: int):
    if spec is None or spec == "none":
        return None
    if spec in PROFILES:
        return builtin_profile(spec, seed)
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"noise must be none, {', '.join(PROFILES)} or a profile file")
    return load_profile(path)


def resolve_hamiltonian(spec: str):
    if spec.lower() in ("h1", "h2"):
        return builtin(spec)
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"hamiltonian must be h1, h2 or a JSON file; got {spec!r}")
    return load_hamiltonian(path)


def out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or "results")


def _emit(obj: dict, args, stem: str) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    d = out_dir(args)
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{stem}.json").write_text(text)
    print(text, end="")


def _print_series(res) -> None:
    print("theta\tT\tfidelity_sim\tfidelity_pred\tq_estimate")
    for p in res.series:
        cells = [p.theta, p.T, p.fidelity_sim, p.fidelity_pred, p.q_estimate]
        print("\t".join("" if c is None else (f"{c:.10g}" if isinstance(c, float) else str(c))
                        for c in cells))


# ---------------------------------------------------------------- commands

def cmd_perceptron(args) -> int:
    thetas = parse_list(args.theta_grid)
    iters = parse_iterations(args.iterations)
    noise = resolve_noise(args.noise, args.seed)
    res = experiments.perceptron_sweep(
        thetas, iters, mode=args.mode, shots=args.shots, noise=noise, seed=args.seed,
        trailing_reset=not args.no_trailing_reset, workers=args.workers,
    )
    jp, cp = res.write(out_dir(args), args.stem or "perceptron")
    _print_series(res)
    print(f"wrote {jp} and {cp}", file=sys.stderr)
    return EXIT_OK


def cmd_groundstate(args) -> int:
    h = resolve_hamiltonian(args.hamiltonian)
    noise = resolve_noise(args.noise, args.seed)
    res = experiments.groundstate_run(
        h, parse_iterations(args.iterations), m=args.precision, scramble=args.scramble,
        noise=noise, seed=args.seed, workers=args.workers,
    )
    jp, cp = res.write(out_dir(args), args.stem or "groundstate")
    _print_series(res)
    print(f"wrote {jp} and {cp}", file=sys.stderr)
    return EXIT_OK


def cmd_oaa(args) -> int:
    deltas = parse_list(args.delta) if args.delta else [0.0, 0.01, 0.05, 0.1]
    _emit(experiments.oaa_report(args.p0, args.k, deltas), args, args.stem or "oaa")
    return EXIT_OK


def cmd_scramble(args) -> int:
    if not 1 <= args.qubits <= 8:
        raise ValueError("--qubits must lie in 1..8")
    if args.trials < 2:
        raise ValueError("--trials must be >= 2")
    _emit(experiments.scramble_study(args.qubits, args.trials, args.seed), args, args.stem or "scramble")
    return EXIT_OK


def cmd_resources(args) -> int:
    q = analysis.ResourceQuery(
        n=args.n, m=args.m, epsilon=args.epsilon, p0=args.p0, delta_gap=args.delta_gap,
        sparsity=args.sparsity, q_u=args.q_u, q_w=args.q_w, q_s=args.q_s, q_cu=args.q_cu,
    )
    methods = analysis.METHODS if args.method == "all" else [args.method]
    rows = [analysis.resource_rows(q, m).as_dict() for m in methods]
    print(json.dumps(rows, indent=2))
    return EXIT_OK


def cmd_preactivation(args) -> int:
    x, w = parse_list(args.inputs), parse_list(args.weights)
    print(repr(analysis.preactivation(x, w, parse_number(args.bias))))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ancillatherm", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
        sp.add_argument("--stem", help="output file name stem")

    sp = sub.add_parser("perceptron", help="perceptron thermalisation sweep over theta and T")
    sp.add_argument("--theta-grid", required=True, help="comma list, e.g. 'pi/8,pi/4,3*pi/8'")
    sp.add_argument("--iterations", default="5", help="total applications T: '5', '2..4' or '1,3'")
    sp.add_argument("--mode", choices=("exact", "shots"), default="exact")
    sp.add_argument("--shots", type=int, default=experiments.DEFAULT_SHOTS)
    sp.add_argument("--noise", default="none", help="none|low|medium|high|<profile.json>")
    sp.add_argument("--no-trailing-reset", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_perceptron)

    sp = sub.add_parser("groundstate", help="groundstate thermalisation run")
    sp.add_argument("--hamiltonian", default="h1", help="h1|h2|<matrix.json>")
    sp.add_argument("--precision", type=int, default=None, help="m (default: smallest exact m)")
    sp.add_argument("--iterations", default="5")
    sp.add_argument("--scramble", choices=("exact", "hadamard"), default="exact")
    sp.add_argument("--noise", default="none")
    sp.add_argument("--workers", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_groundstate)

    sp = sub.add_parser("oaa", help="fixed-point amplitude amplification report")
    sp.add_argument("--p0", type=float, required=True)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--delta", help="comma list of reflection-angle errors")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_oaa)

    sp = sub.add_parser("scramble", help="Monte Carlo of local scrambling overlaps")
    sp.add_argument("--qubits", type=int, default=2)
    sp.add_argument("--trials", type=int, default=1000)
    common(sp)
    sp.set_defaults(func=cmd_scramble)

    sp = sub.add_parser("resources", help="resource table rows")
    sp.add_argument("--method", choices=analysis.METHODS + ("all",), default="all")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--epsilon", type=float, default=1e-3)
    sp.add_argument("--p0", type=float, default=0.5)
    sp.add_argument("--delta-gap", type=float, default=0.1)
    sp.add_argument("--sparsity", type=int, default=1)
    for name in ("q-u", "q-w", "q-s", "q-cu"):
        sp.add_argument(f"--{name}", type=int, default=None)
    sp.set_defaults(func=cmd_resources)

    sp = sub.add_parser("preactivation", help="theta = sum x_i w_i + b")
    sp.add_argument("--inputs", required=True)
    sp.add_argument("--weights", required=True)
    sp.add_argument("--bias", default="0")
    sp.set_defaults(func=cmd_preactivation)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
