"""Command-line interface: ``hgnoise <subcommand> ...``.

Exit codes: 0 success, 1 validation or runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .config import RunConfig
from .decoder import NEGATIVE_MODES, decode_series, series_coefficients, solve_exact
from .distribution import Distribution
from .experiments import random_near_identity, run
from .hypergraph import Hypergraph, build_k4, build_union_jack
from .noise import DEFAULT_CUTOFF, PRESET_KINDS, PauliChannel, preset_local
from .pec import overhead, pec_approx, pec_exact
from .sampler import THREADS_ENV, SampleBatch, sample_powers
from .tailoring import METHODS, tailored_distribution
from .verifier import random_kraus, verify_twirl, verify_two_copy

TRUNCATION_TOL = 1e-3


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph")
    g.add_argument("--graph", help="hypergraph JSON file")
    g.add_argument("--preset", choices=["k4", "union-jack"], help="built-in hypergraph")
    g.add_argument("--rows", type=int, default=2, help="Union Jack rows (default 2)")
    g.add_argument("--cols", type=int, default=3, help="Union Jack columns (default 3)")


def _graph_from(args) -> Hypergraph:
    if args.graph:
        return Hypergraph.from_json(_read_json(args.graph))
    if args.preset == "k4":
        return build_k4()
    if args.preset == "union-jack":
        return build_union_jack(args.rows, args.cols)
    raise ValueError("give --graph FILE or --preset")


def cmd_build_state(args) -> int:
    if args.edges is not None:
        if args.n is None:
            raise ValueError("--edges needs --n")
        edges = [[int(v) - 1 for v in e.split(",")] for e in args.edges.split(";") if e.strip()]
        g = Hypergraph.from_edges(args.n, edges)
    else:
        g = _graph_from(args)
    _emit(_dump(g.to_json()), args.out)
    return 0


def cmd_tailor(args) -> int:
    g = _graph_from(args)
    if args.channel:
        ch = PauliChannel.from_json(_read_json(args.channel))
    else:
        ch = preset_local(g.n, g, args.noise, args.tau, args.cutoff)
    p = tailored_distribution(g, ch, args.method)
    out = p.to_json()
    out["deficit"] = ch.deficit
    _emit(_dump(out), args.out)
    print(f"delta={p.infidelity():.6g} support={len(p)} deficit={ch.deficit:.3g}", file=sys.stderr)
    return 0


def cmd_sample(args) -> int:
    p = Distribution.from_json(_read_json(args.dist))
    batch = sample_powers(
        p, args.shots, args.max_power, args.seed,
        source=args.source, threads=args.threads, estimator=args.estimator,
    )
    _emit(batch.to_csv() if args.format == "csv" else _dump(batch.to_json()), args.out)
    return 0


def cmd_decode(args) -> int:
    batch = SampleBatch.from_json(_read_json(args.batch))
    if args.method == "exact":
        est, info = solve_exact(batch.empirical(0), k=args.k, negatives=args.negatives, return_info=True)
        if info["clamped"]:
            print(f"clamped {info['clamped']} negative spectral entries", file=sys.stderr)
    else:
        est = decode_series(batch, series_coefficients(args.w, args.s))
    _emit(_dump(est.to_json()), args.out)
    return 0


def cmd_coeffs(args) -> int:
    table = series_coefficients(args.w, args.s)
    if args.format == "csv":
        lines = ["j,numerator,denominator,float"]
        lines += [f"{j},{num},{den},{val!r}" for j, num, den, val in table.rows()]
        text = "\n".join(lines) + "\n"
    else:
        text = table.text() + "\n"
    _emit(text, args.out)
    return 0


def cmd_pec(args) -> int:
    p = Distribution.from_json(_read_json(args.dist)).validate(tol=TRUNCATION_TOL)
    total = p.total()
    if total != 1.0:
        # truncated tailoring output: spread the small deficit proportionally
        print(f"renormalizing p (sum was {total:.12g})", file=sys.stderr)
        p = Distribution(p.n, {m: v / total for m, v in p.entries.items()}, p.kind)
    plan = pec_approx(p) if args.approx else pec_exact(p)
    out = plan.to_json()
    out["overhead"] = overhead(plan, args.epsilon, args.delta_f)
    _emit(_dump(out), args.out)
    return 0


def cmd_verify(args) -> int:
    g = _graph_from(args)
    rng = np.random.default_rng(args.seed)
    p = Distribution.from_dense(random_near_identity(g.n, args.delta, rng))
    pauli = PauliChannel.from_rates(g.n, {(0, 0): 1 - args.delta, (1, 0): args.delta})
    twirl_pauli = verify_twirl(g, pauli)
    twirl_generic = verify_twirl(g, random_kraus(g.n, 3, rng))
    two_copy = verify_two_copy(g, p, apply_correction=not args.no_correction)
    report = {
        "n": g.n,
        "seed": args.seed,
        "twirl_pauli": twirl_pauli.to_json(),
        "twirl_generic": twirl_generic.to_json(),
        "two_copy": two_copy.to_json(),
        "passed": twirl_pauli.passed and twirl_generic.passed and two_copy.passed,
    }
    _emit(_dump(report), args.out)
    return 0 if report["passed"] else 1


def cmd_experiment(args) -> int:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = yaml.safe_load(fh) or {}
        if data.get("experiment", args.name) != args.name:
            raise ValueError(f"config is for {data['experiment']!r}, not {args.name!r}")
    data.update({"experiment": args.name, "seed": args.seed})
    if args.out:
        data["out"] = args.out
    cfg = RunConfig.from_dict(data)
    result = run(cfg)
    for path in result.write(cfg.out):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hgnoise", description="Noise detection toolkit for hypergraph states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or CPU count)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("build-state", help="write a hypergraph as JSON")
    _add_graph_args(p)
    p.add_argument("--n", type=int, help="vertex count for --edges")
    p.add_argument("--edges", help='1-based edges, e.g. "1,2,3;2,3,4"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_state)

    p = sub.add_parser("tailor", help="tailored distribution p of a noisy hypergraph state")
    _add_graph_args(p)
    p.add_argument("--channel", help="Pauli channel JSON (overrides --noise)")
    p.add_argument("--noise", choices=PRESET_KINDS, default="depolarizing")
    p.add_argument("--tau", type=float, default=0.005)
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tailor)

    p = sub.add_parser("sample", help="sample convolution powers of mu = p * p")
    p.add_argument("--dist", required=True, help="distribution JSON")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--max-power", type=int, default=0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--source", choices=["p", "mu"], default="p")
    p.add_argument("--estimator", choices=["prefix", "subsets"], default="prefix")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("decode", help="recover p from a sample batch")
    p.add_argument("--batch", required=True, help="sample batch JSON")
    p.add_argument("--method", choices=["exact", "series"], default="exact")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--negatives", choices=NEGATIVE_MODES, default="clamp")
    p.add_argument("--w", type=int, default=2)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("coeffs", help="print series decoder coefficients")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("pec", help="quasi-probability inverse of a dephasing distribution")
    p.add_argument("--dist", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact inverse (default)")
    mode.add_argument("--approx", action="store_true", help="first-order inverse")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--delta-f", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pec)

    p = sub.add_parser("verify-protocol", help="dense check of twirl and two-copy circuit (n <= 4)")
    _add_graph_args(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--no-correction", action="store_true", help="skip the phase layer (negative control)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run a desk-scale experiment recipe")
    p.add_argument("name", choices=["fig3", "fig4", "fig5"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--config", help="YAML run config")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be >= 1")
        os.environ[THREADS_ENV] = str(args.threads)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"hgnoise: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
