"""Matrix-level graph machinery.

Unit indices exposed by this module are 1-based, matching permutation
vectors as they are usually printed; arrays are indexed 0-based
internally.  Matrices may be dense ``numpy`` arrays or ``scipy.sparse``
matrices, and results keep the storage type of their input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, PathError, SymmetryError

Matrix = Union[np.ndarray, sp.spmatrix, sp.sparray]


@dataclass
class DataMatrix:
    """A matrix with optional row and column labels.

    Used both for units-by-types data and for labelled similarity
    matrices read from disk.
    """

    entries: Matrix
    row_labels: list[str] | None = None
    col_labels: list[str] | None = None

    def __post_init__(self):
        if not sp.issparse(self.entries):
            self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.ndim != 2 or min(self.entries.shape) < 1:
            raise DimensionError(f"matrix must be 2-D and nonempty, got shape {self.entries.shape}")
        n, m = self.entries.shape
        if self.row_labels is not None and len(self.row_labels) != n:
            raise DimensionError(f"{len(self.row_labels)} row labels for {n} rows")
        if self.col_labels is not None and len(self.col_labels) != m:
            raise DimensionError(f"{len(self.col_labels)} column labels for {m} columns")

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def label_map(self) -> dict[int, str] | None:
        """Row labels keyed by 1-based unit index."""
        if self.row_labels is None:
            return None
        return {i + 1: name for i, name in enumerate(self.row_labels)}


def entries_of(M) -> Matrix:
    """Unwrap a DataMatrix and normalize storage (float ndarray or CSR)."""
    if isinstance(M, DataMatrix):
        M = M.entries
    if sp.issparse(M):
        return sp.csr_matrix(M, dtype=float)
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got {M.ndim}-D")
    return M


def _require_square(F: Matrix) -> int:
    n, m = F.shape
    if n != m:
        raise DimensionError(f"matrix must be square, got {n}x{m}")
    if n < 1:
        raise DimensionError("matrix is empty")
    return n


def max_abs(F: Matrix) -> float:
    if sp.issparse(F):
        return float(abs(F).max()) if F.nnz else 0.0
    return float(np.abs(F).max()) if F.size else 0.0


def check_symmetric(F: Matrix, rtol: float | None = None) -> None:
    """Raise SymmetryError if ``F`` is not symmetric within 10 eps max|F|."""
    _require_square(F)
    if rtol is None:
        rtol = 10 * np.finfo(float).eps
    tol = rtol * max_abs(F)
    diff = F - F.T
    gap = max_abs(diff)
    if gap > tol:
        raise SymmetryError(f"matrix is not symmetric: max |F - F^T| = {gap:.3g} > {tol:.3g}")


def similarity(A) -> Matrix:
    """Similarity ``A A^T`` of a units-by-types matrix.

    For 0/1 data entry (i, j) counts the types shared by units i and j.
    """
    A = entries_of(A)
    if min(A.shape) < 1:
        raise DimensionError(f"data matrix is empty, shape {A.shape}")
    lowest = A.min() if not sp.issparse(A) else min(A.min(), 0.0)
    if lowest < 0:
        raise ValueError("data matrix has negative entries")
    S = A @ A.T
    if sp.issparse(S):
        return sp.csr_matrix(S)
    return S


def degrees(F: Matrix) -> np.ndarray:
    return np.asarray(F.sum(axis=1), dtype=float).ravel()


def laplacian(F) -> Matrix:
    """Graph Laplacian ``D - F`` with ``d_i = sum_j f_ij``.

    The diagonal of ``F`` is kept as given, so it cancels out of ``L``:
    ``l_ii = sum_{j != i} f_ij``.
    """
    F = entries_of(F)
    check_symmetric(F)
    d = degrees(F)
    if sp.issparse(F):
        return (sp.diags(d, format="csr") - F).tocsr()
    return np.diag(d) - F


def _adjacency(F: Matrix) -> tuple[np.ndarray, np.ndarray]:
    """CSR structure (indptr, indices) of the nonzero off-diagonal pattern."""
    n = F.shape[0]
    if sp.issparse(F):
        C = F.tocoo()
        rows, cols, vals = C.row, C.col, C.data
        keep = (rows != cols) & (vals != 0)
        rows, cols = rows[keep], cols[keep]
    else:
        rows, cols = np.nonzero(F)
        keep = rows != cols
        rows, cols = rows[keep], cols[keep]
    A = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    return A.indptr, A.indices


def component_labels(F: Matrix) -> tuple[int, np.ndarray]:
    """Label every vertex with its component number.

    Components are numbered in order of their smallest vertex.  The
    traversal uses an explicit stack, so deep graphs cannot exhaust the
    interpreter's recursion limit.
    """
    n = _require_square(F)
    indptr, indices = _adjacency(F)
    labels = np.full(n, -1, dtype=np.int64)
    count = 0
    for root in range(n):
        if labels[root] >= 0:
            continue
        labels[root] = count
        stack = [root]
        while stack:
            i = stack.pop()
            for j in indices[indptr[i]:indptr[i + 1]]:
                if labels[j] < 0:
                    labels[j] = count
                    stack.append(j)
        count += 1
    return count, labels


def component_indices(F: Matrix) -> list[np.ndarray]:
    """Connected components as sorted 0-based index arrays."""
    count, labels = component_labels(F)
    if count == 1:
        return [np.arange(labels.size)]
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(1, count))
    return np.split(order, bounds)


def components(F) -> list[list[int]]:
    """Connected components of the graph of nonzero off-diagonal entries.

    Each component is a sorted list of 1-based unit indices; components
    are ordered by their smallest member.
    """
    F = entries_of(F)
    return [[int(i) + 1 for i in comp] for comp in component_indices(F)]


def visit(F, root: int) -> list[int]:
    """Units reachable from ``root`` (1-based), sorted."""
    F = entries_of(F)
    n = _require_square(F)
    if isinstance(root, bool) or not isinstance(root, (int, np.integer)) or not 1 <= root <= n:
        raise PathError(f"root {root!r} is outside 1..{n}")
    indptr, indices = _adjacency(F)
    seen = np.zeros(n, dtype=bool)
    start = int(root) - 1
    seen[start] = True
    stack = [start]
    while stack:
        i = stack.pop()
        for j in indices[indptr[i]:indptr[i + 1]]:
            if not seen[j]:
                seen[j] = True
                stack.append(j)
    return [int(i) + 1 for i in np.flatnonzero(seen)]


def is_r_matrix(S, tau: float = 0.0) -> bool:
    """True if ``S`` is in Robinson form.

    Along every row, entries must not decrease while approaching the
    diagonal from the left and must not increase while moving away from
    it to the right.  A pair violates the form only if it is out of order
    by more than ``tau``.
    """
    S = entries_of(S)
    n = _require_square(S)
    if sp.issparse(S):
        S = S.toarray()
    for i in range(n):
        left = S[i, : i + 1]
        # s_ij <= s_ik for j <= k <= i
        if np.any(np.maximum.accumulate(left) > left + tau):
            return False
        right = S[i, i:]
        # s_ij >= s_ik for i <= j <= k
        if np.any(np.minimum.accumulate(right) < right - tau):
            return False
    return True


def bandwidth(F) -> int:
    """Half-bandwidth: the largest ``|i - j|`` over nonzero entries."""
    F = entries_of(F)
    _require_square(F)
    if sp.issparse(F):
        C = F.tocoo()
        mask = C.data != 0
        rows, cols = C.row[mask], C.col[mask]
    else:
        rows, cols = np.nonzero(F)
    if rows.size == 0:
        return 0
    return int(np.abs(rows.astype(np.int64) - cols).max())


def as_perm(p: Sequence[int], n: int) -> np.ndarray:
    """Validate a 1-based permutation of length ``n``; return it 0-based."""
    arr = np.asarray(p)
    if arr.ndim != 1 or arr.size != n:
        raise DimensionError(f"permutation of length {arr.size} for a matrix of order {n}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.round(arr)):
            raise ValueError("permutation entries must be integers")
        arr = arr.astype(np.int64)
    idx = arr.astype(np.int64) - 1
    if not np.array_equal(np.sort(idx), np.arange(n)):
        raise ValueError(f"not a permutation of 1..{n}")
    return idx


def inverse_perm(p: Sequence[int]) -> tuple[int, ...]:
    idx = as_perm(p, len(p))
    inv = np.empty_like(idx)
    inv[idx] = np.arange(idx.size)
    return tuple(int(i) + 1 for i in inv)


def apply_perm(F, p: Sequence[int]):
    """Simultaneously permute rows and columns: result[i, j] = F[p_i, p_j].

    A DataMatrix keeps its row labels aligned with the rows.
    """
    labelled = F if isinstance(F, DataMatrix) else None
    E = entries_of(F)
    n = _require_square(E)
    idx = as_perm(p, n)
    if sp.issparse(E):
        out = E[idx][:, idx].tocsr()
    else:
        out = E[np.ix_(idx, idx)]
    if labelled is None:
        return out
    rows = [labelled.row_labels[i] for i in idx] if labelled.row_labels else None
    cols = [labelled.col_labels[i] for i in idx] if labelled.col_labels else None
    return DataMatrix(out, rows, cols)


def apply_perm_rows(A, p: Sequence[int]):
    """Permute the rows of a data matrix (labels follow)."""
    labelled = A if isinstance(A, DataMatrix) else None
    E = entries_of(A)
    idx = as_perm(p, E.shape[0])
    out = E[idx].tocsr() if sp.issparse(E) else E[idx]
    if labelled is None:
        return out
    rows = [labelled.row_labels[i] for i in idx] if labelled.row_labels else None
    return DataMatrix(out, rows, labelled.col_labels)
