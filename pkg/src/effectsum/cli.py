"""Command-line front end.

Subcommands:

* ``run``       - replay an operation script against an engine
* ``selfcheck`` - randomized differential test of an engine vs the oracle
* ``bench``     - operation-count scaling table (CSV), optionally with a
                  rendered figure

Exit status: 0 success, 1 input error, 2 selfcheck divergence.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import List, Optional, Tuple

from .core import GraphError, load_graph
from .decomp import load_decomposition
from .graphindex import GraphIndex, STRATEGIES
from .oracle import NaiveIndex
from .treeindex import TreeIndex
from . import bench as benchmod


def _format_sum(value) -> str:
    return "EMPTY" if value is None else str(value)


def _format_top(items) -> str:
    if not items:
        return "EMPTY"
    return ",".join(f"{fid}:{w}" for fid, w in items)


def parse_script(text: str, source: str = "<script>") -> List[Tuple]:
    """Commands: ``add v f w d``, ``remove v f``, ``sum v [d]``, ``top v k [d]``."""
    ops: List[Tuple] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "add" and len(parts) == 5:
                ops.append(("add", parts[1], parts[2], int(parts[3]), int(parts[4]), lineno))
            elif kind == "remove" and len(parts) == 3:
                ops.append(("remove", parts[1], parts[2], lineno))
            elif kind == "sum" and len(parts) in (2, 3):
                ops.append(("sum", parts[1], int(parts[2]) if len(parts) == 3 else 0, lineno))
            elif kind == "top" and len(parts) in (3, 4):
                ops.append(("top", parts[1], int(parts[2]),
                            int(parts[3]) if len(parts) == 4 else 0, lineno))
            else:
                raise GraphError(f"{source}:{lineno}: bad command {line!r}")
        except ValueError:
            raise GraphError(f"{source}:{lineno}: bad integer in {line!r}") from None
    return ops


def replay(index, ops, out) -> None:
    for op in ops:
        lineno = op[-1]
        try:
            if op[0] == "add":
                index.add(op[1], op[2], op[3], op[4])
            elif op[0] == "remove":
                index.remove(op[1], op[2])
            elif op[0] == "sum":
                out.write(f"sum {op[1]} = {_format_sum(index.sum(op[1], op[2]))}\n")
            else:
                out.write(f"top {op[1]} = {_format_top(index.top(op[1], op[2], op[3]))}\n")
        except ValueError as exc:
            raise GraphError(f"line {lineno}: {exc}") from None


def differential_check(index, reference, ops) -> Tuple[bool, List[str]]:
    """Apply the same op stream to both indexes; stop at the first divergence.

    Returns (ok, transcript); the transcript ends with the divergence detail
    when ok is False.
    """
    transcript: List[str] = []
    for op in ops:
        if op[0] == "add":
            _, v, fid, w, d = op
            transcript.append(f"add {v} {fid} {w} {d}")
            index.add(v, fid, w, d)
            reference.add(v, fid, w, d)
        elif op[0] == "remove":
            _, v, fid = op
            transcript.append(f"remove {v} {fid}")
            index.remove(v, fid)
            reference.remove(v, fid)
        elif op[0] == "sum":
            _, v, d = op
            got = index.sum(v, d)
            want = reference.sum(v, d)
            transcript.append(f"sum {v} {d}")
            if got != want:
                transcript.append(
                    f"DIVERGENCE at sum {v} {d}: engine={_format_sum(got)} "
                    f"oracle={_format_sum(want)}")
                return False, transcript
        else:
            _, v, k, d = op
            got = index.top(v, k, d)
            want = reference.top(v, k, d)
            transcript.append(f"top {v} {k} {d}")
            if got != want:
                transcript.append(
                    f"DIVERGENCE at top {v} {k} {d}: engine={_format_top(got)} "
                    f"oracle={_format_top(want)}")
                return False, transcript
    return True, transcript


def _build_engine(args) -> object:
    g = load_graph(args.graph)
    if args.engine == "oracle":
        return NaiveIndex(g)
    if args.engine == "tree":
        if not g.is_tree():
            raise GraphError("engine 'tree' requires the graph to be a tree")
        return TreeIndex(g)
    if args.decomp is None:
        raise GraphError("engine 'graph' requires --decomp")
    dec = load_decomposition(args.decomp)
    return GraphIndex(g, dec, strategy=args.strategy)


def _cmd_run(args) -> int:
    index = _build_engine(args)
    with open(args.script, "r", encoding="utf-8") as fh:
        ops = parse_script(fh.read(), source=args.script)
    replay(index, ops, sys.stdout)
    return 0


def _cmd_selfcheck(args) -> int:
    index = _build_engine(args)
    g = index.graph
    reference = NaiveIndex(g)
    rng = random.Random(args.seed)
    updates = args.ops * 2 // 3
    ops = benchmod.random_ops(rng, g.vertices, updates, args.ops - updates)
    ok, transcript = differential_check(index, reference, ops)
    if ok:
        print(f"selfcheck: PASS ({len(ops)} ops, seed {args.seed})")
        return 0
    print(f"selfcheck: FAIL after {len(transcript) - 1} ops (seed {args.seed})",
          file=sys.stderr)
    for line in transcript:
        print(line, file=sys.stderr)
    return 2


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = benchmod.run_bench(args.engine, sizes, args.seed,
                              queries=args.queries, strategy=args.strategy)
    if args.out == "-":
        benchmod.write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            benchmod.write_csv(rows, fh)
    if args.plot:
        benchmod.render_plot(rows, args.plot, args.engine)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effectsum",
        description="Dynamic facility-effect queries over edge-weighted graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay an operation script")
    run.add_argument("--engine", choices=("tree", "graph", "oracle"), required=True)
    run.add_argument("--graph", required=True, help="graph file (v/e lines)")
    run.add_argument("--decomp", help="separator decomposition file (graph engine)")
    run.add_argument("--script", required=True, help="operation script file")
    run.add_argument("--strategy", choices=STRATEGIES, default="direct")
    run.set_defaults(func=_cmd_run)

    check = sub.add_parser("selfcheck", help="randomized engine-vs-oracle test")
    check.add_argument("--engine", choices=("tree", "graph"), required=True)
    check.add_argument("--graph", required=True)
    check.add_argument("--decomp")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--ops", type=int, default=1000)
    check.add_argument("--strategy", choices=STRATEGIES, default="direct")
    check.set_defaults(func=_cmd_selfcheck)

    bench = sub.add_parser("bench", help="operation-count scaling report")
    bench.add_argument("--engine", choices=("tree", "graph"), required=True)
    bench.add_argument("--sizes", default="64,128,256,512,1024",
                       help="comma-separated instance sizes")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--queries", type=int, default=64)
    bench.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    bench.add_argument("--plot", help="render the scaling figure to this file")
    bench.add_argument("--strategy", choices=STRATEGIES, default="direct")
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
