"""Command-line front end.

Exit status is 0 on success, 1 on any error and 2 when the computed tree
contains an M-node, so scripts can spot ill-posed instances without
parsing the output.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import io as sio
from . import pqtree
from .errors import SeriationError
from .graph import DataMatrix, apply_perm, apply_perm_rows, bandwidth, similarity
from .seriation import SeriationResult, parallel_spectral_sort, sample_mnode_perms, spectral_sort
from .spectral import SerOptions

EXIT_OK, EXIT_ERROR, EXIT_MNODE = 0, 1, 2

_DEFAULTS = SerOptions()


def _options(args) -> SerOptions:
    return SerOptions(
        tau=args.tau,
        translate=not args.no_translate,
        nlarge=args.nlarge,
        neig=args.neig,
        force_large=args.force_large,
        perm_cap=args.perm_cap,
        seed=args.seed,
    )


def _is_tree_input(args) -> bool:
    return getattr(args, "tree", False) or str(args.input).lower().endswith(".json")


def _load(args) -> DataMatrix:
    kind = "similarity" if args.similarity else "data"
    return sio.read_matrix(args.input, kind=kind)


def _similarity_of(args, M: DataMatrix):
    return M.entries if args.similarity else similarity(M)


def _sort(args, M: DataMatrix) -> SeriationResult:
    F = _similarity_of(args, M)
    if args.abs:
        F = abs(F)
    opts = _options(args)
    if args.workers > 1:
        return parallel_spectral_sort(F, opts, workers=args.workers)
    return spectral_sort(F, opts)


def format_count(count: int) -> str:
    """Decimal count, or "overflow" with its order of magnitude when Python
    refuses to print an integer that long."""
    try:
        return str(count)
    except ValueError:
        return f"overflow(~1e{int(count.bit_length() * math.log10(2))})"


def _summary(result: SeriationResult) -> str:
    count = format_count(pqtree.nperm(result.tree))
    yes = {True: "yes", False: "no"}
    return (
        f"nperm={count} has_mnode={yes[result.has_mnode]} "
        f"pre_R={yes[result.is_pre_r_certified]}"
    )


def _tree_and_status(args):
    """Tree from a JSON file or from sorting a matrix; also labels and exit status."""
    if _is_tree_input(args):
        tree = sio.read_tree(args.input)
        return tree, None, EXIT_MNODE if tree.has_mnode() else EXIT_OK
    M = _load(args)
    result = _sort(args, M)
    return result.tree, M.label_map(), EXIT_MNODE if result.has_mnode else EXIT_OK


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_sort(args) -> int:
    M = _load(args)
    result = _sort(args, M)
    labels = M.label_map() if args.labels else None
    _emit(sio.write_tree(result.tree, args.format, labels), args.output)
    print(_summary(result), file=sys.stderr)
    return EXIT_MNODE if result.has_mnode else EXIT_OK


def cmd_perms(args) -> int:
    tree, _, status = _tree_and_status(args)
    rows = pqtree.all_perms(tree, cap=args.perm_cap)
    _emit("".join(" ".join(map(str, row)) + "\n" for row in rows), args.output)
    return status


def cmd_count(args) -> int:
    tree, _, status = _tree_and_status(args)
    print(format_count(pqtree.nperm(tree)))
    if tree.has_mnode():
        print("warning: tree has an M-node; the count is an upper bound", file=sys.stderr)
    return status


def cmd_subtree(args) -> int:
    tree, labels, _ = _tree_and_status(args)
    path = [int(p) for p in args.path.split(",") if p.strip()] if args.path else []
    node = pqtree.subtree(tree, path)
    _emit(sio.write_tree(node, args.format, labels if args.labels else None), args.output)
    return EXIT_MNODE if node.has_mnode() else EXIT_OK


def _pick_perm(tree: pqtree.PQTree, which: str, cap: int) -> tuple[int, ...]:
    if which == "first":
        return pqtree.one_perm(tree)
    k = int(which)
    count = pqtree.nperm(tree)
    if not 1 <= k <= count:
        raise SeriationError(f"permutation index {k} outside 1..{count}")
    if count > cap:
        raise SeriationError(f"tree has {count} permutations, above --perm-cap {cap}")
    for i, perm in enumerate(pqtree.iter_perms(tree), start=1):
        if i == k:
            return perm
    raise AssertionError("unreachable")


def cmd_apply(args) -> int:
    M = _load(args)
    result = _sort(args, M)
    perm = _pick_perm(result.tree, args.which, args.perm_cap)
    if args.similarity:
        out = apply_perm(M, perm)
    else:
        out = apply_perm_rows(M, perm)
    fmt = "csv" if args.output and str(args.output).endswith(".csv") else "matrix-market"
    if args.output in (None, "-"):
        sio.write_matrix(out, sys.stdout, fmt)
    else:
        sio.write_matrix(out, args.output, fmt)
    print(_summary(result), file=sys.stderr)
    return EXIT_MNODE if result.has_mnode else EXIT_OK


def cmd_bandwidth(args) -> int:
    M = _load(args)
    F = _similarity_of(args, M)
    if args.abs:
        F = abs(F)
    result = _sort(args, M)
    after = bandwidth(apply_perm(F, pqtree.one_perm(result.tree)))
    print(f"before={bandwidth(F)} after={after}")
    return EXIT_MNODE if result.has_mnode else EXIT_OK


def cmd_sample(args) -> int:
    M = _load(args)
    F = _similarity_of(args, M)
    perms = sample_mnode_perms(F, args.samples, seed=args.seed, opts=_options(args))
    _emit("".join(" ".join(map(str, p)) + "\n" for p in sorted(perms)), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.density is not None:
        S = sio.random_sparse_symmetric(args.n, args.density, seed=args.seed or 0)
        if not args.signed:
            S = abs(S)
    else:
        spec = sio.TestMatrixSpec(
            n=args.n, block_size=args.block_size, bw=args.bw, sparse=not args.dense, seed=args.seed or 0
        )
        S, _, _ = sio.test_matrix(spec)
    fmt = "csv" if args.output and str(args.output).endswith(".csv") else "matrix-market"
    sio.write_matrix(S, sys.stdout if args.output in (None, "-") else args.output, fmt)
    return EXIT_OK


def _add_tuning(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("tuning")
    g.add_argument("--tau", type=float, default=_DEFAULTS.tau, help="equality tolerance (default %(default)g)")
    g.add_argument("--no-translate", action="store_true", help="do not shift entries so the minimum is zero")
    g.add_argument("--neig", type=int, default=_DEFAULTS.neig, help="eigenpairs for the iterative solver")
    g.add_argument("--nlarge", type=int, default=_DEFAULTS.nlarge,
                   help="order from which sparse input uses the iterative solver")
    size = g.add_mutually_exclusive_group()
    size.add_argument("--force-large", dest="force_large", action="store_const", const=True, default=None,
                      help="always use the iterative eigensolver")
    size.add_argument("--force-small", dest="force_large", action="store_const", const=False,
                      help="always use the dense eigensolver")
    g.add_argument("--perm-cap", type=int, default=_DEFAULTS.perm_cap, help="enumeration limit")
    g.add_argument("--seed", type=int, default=None, help="seed for randomized steps")
    g.add_argument("--workers", type=int, default=1, help="worker threads for the component loop")


def _add_input(p: argparse.ArgumentParser, tree_ok: bool = False) -> None:
    p.add_argument("input", help="matrix file (.mtx or .csv), '-' for stdin"
                   + (", or a tree .json" if tree_ok else ""))
    p.add_argument("--similarity", action="store_true",
                   help="input is already a similarity matrix (skip A A^T)")
    p.add_argument("--abs", action="store_true", help="use absolute values of the similarity")
    if tree_ok:
        p.add_argument("--tree", action="store_true", help="input is a tree in JSON")
    p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    _add_tuning(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specser", description="Spectral seriation with PQ-trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sort", help="compute the PQ-tree of a matrix")
    _add_input(p)
    p.add_argument("--format", choices=["json", "dot", "text"], default="json")
    p.add_argument("--labels", action="store_true", help="caption leaves with row labels")
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("perms", help="list all admissible permutations")
    _add_input(p, tree_ok=True)
    p.set_defaults(func=cmd_perms)

    p = sub.add_parser("count", help="number of admissible permutations")
    _add_input(p, tree_ok=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("subtree", help="extract the subtree at a node path")
    _add_input(p, tree_ok=True)
    p.add_argument("--path", default="", help="comma-separated 0-based child positions")
    p.add_argument("--format", choices=["json", "dot", "text"], default="json")
    p.add_argument("--labels", action="store_true")
    p.set_defaults(func=cmd_subtree)

    p = sub.add_parser("apply", help="reorder the input by an admissible permutation")
    _add_input(p)
    p.add_argument("--which", default="first", help="'first' or a 1-based index into the enumeration")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("bandwidth", help="half-bandwidth before and after reordering")
    _add_input(p)
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("sample", help="orderings from random vectors of a multiple Fiedler eigenspace")
    _add_input(p)
    p.add_argument("--samples", type=int, default=10000)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("gen", help="write a test matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--block-size", type=int, default=None)
    p.add_argument("--bw", type=int, default=2, help="half bandwidth of each block")
    p.add_argument("--dense", action="store_true", help="array instead of coordinate storage")
    p.add_argument("--density", type=float, default=None,
                   help="random sparse symmetric matrix with this fill instead of blocks")
    p.add_argument("--signed", action="store_true", help="keep signs of the random matrix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.density is None and args.block_size is None:
        parser.error("gen needs --block-size or --density")
    try:
        return args.func(args)
    except (SeriationError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
