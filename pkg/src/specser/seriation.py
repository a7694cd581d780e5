"""Recursive spectral sort producing a PQ-tree of admissible orderings."""

from __future__ import annotations

import concurrent.futures as cf
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, ReducibilityError, SeriationError, SortError
from .graph import (
    Matrix,
    apply_perm,
    check_symmetric,
    component_indices,
    entries_of,
    is_r_matrix,
    laplacian,
    similarity,
)
from .pqtree import PQTree, lnode, mnode, one_perm, pnode, qnode
from .spectral import SerOptions, distinct, fiedler


@dataclass(frozen=True)
class SeriationResult:
    """Outcome of a spectral sort.

    ``is_pre_r_certified`` holds when every Fiedler value met during the
    recursion was simple and no branch had to fall back to an M-node.  For
    a pre-R input every permutation of ``tree`` then yields Robinson form.
    Simple Fiedler values alone do not prove an arbitrary input is pre-R
    (the Bornholm similarity is a counterexample); use
    :func:`reaches_robinson` for a direct check.
    """

    tree: PQTree
    has_mnode: bool
    is_pre_r_certified: bool


def translate(F) -> Matrix:
    """Shift all entries so the smallest becomes zero.

    Sparse input stays sparse when its minimum is already zero; a nonzero
    shift of a sparse matrix fills it in and returns a dense array.
    """
    F = entries_of(F)
    if sp.issparse(F):
        n_entries = F.shape[0] * F.shape[1]
        alpha = F.data.min() if F.nnz else 0.0
        if F.nnz < n_entries:
            alpha = min(alpha, 0.0)
        if alpha == 0:
            return F
        return F.toarray() - alpha
    alpha = F.min()
    if alpha == 0:
        return F
    return F - alpha


def _submatrix(F: Matrix, idx: np.ndarray) -> Matrix:
    if sp.issparse(F):
        return F[idx][:, idx].tocsr()
    return F[np.ix_(idx, idx)]


class _Sorter:
    def __init__(self, opts: SerOptions, max_depth: int):
        self.opts = opts
        self.max_depth = max_depth

    def run(self, F: Matrix, units: np.ndarray, depth: int = 0) -> tuple[PQTree, bool]:
        """Return the subtree for ``units`` and whether it is certified."""
        if depth > self.max_depth:
            raise SeriationError(f"recursion deeper than {self.max_depth}: index sets stopped shrinking")
        if self.opts.translate:
            F = translate(F)
        comps = component_indices(F)
        if len(comps) > 1:
            results = [self.run(_submatrix(F, c), units[c], depth + 1) for c in comps]
            return _join_components(results)
        return self.irreducible(F, units, depth)

    def irreducible(self, F: Matrix, units: np.ndarray, depth: int) -> tuple[PQTree, bool]:
        n = units.size
        if n == 1:
            return lnode(int(units[0])), True
        if n == 2:
            return pnode(int(u) for u in units), True
        try:
            result = fiedler(laplacian(F), self.opts)
        except (ReducibilityError, ConvergenceError) as err:
            raise SortError(units, err) from err
        if result.multiplicity > 1:
            return mnode(int(u) for u in units), False
        groups, _ = distinct(result.vector, self.opts.tau)
        if len(groups) == 1:
            # all entries tie: no ordering information at all
            return mnode(int(u) for u in units), False
        children = []
        certified = True
        for g in groups:
            if g.size == 1:
                children.append(lnode(int(units[g[0]])))
            else:
                child, ok = self.run(_submatrix(F, g), units[g], depth + 1)
                children.append(child)
                certified &= ok
        if len(children) == 2:
            return pnode(children), certified
        return qnode(children), certified


def _join_components(results: list[tuple[PQTree, bool]]) -> tuple[PQTree, bool]:
    return pnode(t for t, _ in results), all(ok for _, ok in results)


def _finish(tree: PQTree, certified: bool) -> SeriationResult:
    has_m = tree.has_mnode()
    return SeriationResult(tree, has_m, certified and not has_m)


def _prepare(F, opts: SerOptions | None) -> tuple[Matrix, SerOptions]:
    F = entries_of(F)
    check_symmetric(F)
    return F, opts or SerOptions()


def spectral_sort(F, opts: SerOptions | None = None) -> SeriationResult:
    """Build the PQ-tree of orderings that bring ``F`` to Robinson form.

    Leaves are labelled with 1-based row indices of ``F``.
    """
    F, opts = _prepare(F, opts)
    n = F.shape[0]
    tree, ok = _Sorter(opts, max_depth=n).run(F, np.arange(1, n + 1))
    return _finish(tree, ok)


def _sort_batch(batch, opts: SerOptions, max_depth: int):
    sorter = _Sorter(opts, max_depth)
    return [sorter.run(F, units, 1) for F, units in batch]


def _balanced_batches(sizes: list[int], nbatches: int) -> list[list[int]]:
    """Assign item positions to batches, largest first onto the lightest batch."""
    loads = [0] * nbatches
    batches: list[list[int]] = [[] for _ in range(nbatches)]
    for pos in sorted(range(len(sizes)), key=lambda i: (-sizes[i], i)):
        b = loads.index(min(loads))
        batches[b].append(pos)
        loads[b] += sizes[pos]
    return [b for b in batches if b]


def parallel_spectral_sort(
    F,
    opts: SerOptions | None = None,
    workers: int = 2,
    executor: Literal["thread", "process"] = "thread",
) -> SeriationResult:
    """Spectral sort with the connected components handled by a worker pool.

    The tree is identical to :func:`spectral_sort`: components keep their
    position regardless of completion order.  On the first failure the
    pending work is cancelled and the error re-raised.
    """
    F, opts = _prepare(F, opts)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    n = F.shape[0]
    sorter = _Sorter(opts, max_depth=n)
    units = np.arange(1, n + 1)
    if opts.translate:
        F = translate(F)
    comps = component_indices(F)
    if workers == 1 or len(comps) == 1:
        if len(comps) == 1:
            tree, ok = sorter.irreducible(F, units, 0)
        else:
            tree, ok = _join_components([sorter.run(_submatrix(F, c), units[c], 1) for c in comps])
        return _finish(tree, ok)

    items = [(_submatrix(F, c), units[c]) for c in comps]
    batches = _balanced_batches([c.size for c in comps], workers * 4)
    pool_cls = cf.ThreadPoolExecutor if executor == "thread" else cf.ProcessPoolExecutor
    results: list = [None] * len(items)
    with pool_cls(max_workers=workers) as pool:
        futures = {
            pool.submit(_sort_batch, [items[i] for i in batch], opts, n): batch
            for batch in batches
        }
        try:
            for fut in cf.as_completed(futures):
                for pos, res in zip(futures[fut], fut.result()):
                    results[pos] = res
        except BaseException:
            for fut in futures:
                fut.cancel()
            raise
    tree, ok = _join_components(results)
    return _finish(tree, ok)


def reaches_robinson(F, tree: PQTree, tau: float = 0.0) -> bool:
    """True if reordering ``F`` by the frontier of ``tree`` gives an R-matrix."""
    return is_r_matrix(apply_perm(F, one_perm(tree)), tau)


def seriate(A, opts: SerOptions | None = None) -> SeriationResult:
    """Spectral sort of the similarity ``A A^T`` of a units-by-types matrix."""
    return spectral_sort(similarity(A), opts)


def sample_mnode_perms(
    F, n_samples: int = 10000, seed: int | None = None, opts: SerOptions | None = None
) -> set[tuple[int, ...]]:
    """Orderings obtained by sorting random vectors of a multiple Fiedler eigenspace.

    Each sample draws standard normal coefficients over an orthonormal
    basis of the eigenspace and records the ascending argsort (1-based).
    """
    F, opts = _prepare(F, opts)
    if opts.translate:
        F = translate(F)
    result = fiedler(laplacian(F), opts)
    if result.multiplicity < 2:
        raise ValueError("Fiedler value is simple; there is no eigenspace to sample")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((n_samples, result.multiplicity))
    X = coeffs @ result.vectors.T
    perms = np.argsort(X, axis=1, kind="stable") + 1
    return {tuple(int(v) for v in row) for row in perms}


__all__ = [
    "SeriationResult",
    "translate",
    "spectral_sort",
    "parallel_spectral_sort",
    "seriate",
    "reaches_robinson",
    "sample_mnode_perms",
]
