"""Matrix files, the Bornholm data set and synthetic test matrices.

Matrix Market (``.mtx``) is the interchange format; small hand-made
inputs can be CSV.  Unit indices in files are 1-based like everywhere
else in the package.
"""

from __future__ import annotations

import csv
import io as _io
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Mapping, TextIO

import numpy as np
import scipy.io
import scipy.sparse as sp

from . import pqtree
from .errors import MatrixFormatError, SymmetryError
from .graph import DataMatrix, check_symmetric, entries_of

Format = Literal["matrix-market", "csv"]
Kind = Literal["data", "similarity"]


@dataclass(frozen=True)
class MatrixFile:
    path: str
    format: Format | None = None
    kind: Kind = "data"

    def resolved_format(self, text: str | None = None) -> Format:
        """Explicit format, else the extension, else a sniff of ``text``."""
        if self.format is not None:
            return self.format
        suffix = Path(self.path).suffix.lower()
        if suffix == ".mtx":
            return "matrix-market"
        if suffix == ".csv":
            return "csv"
        if text is not None and text.lstrip().startswith("%%MatrixMarket"):
            return "matrix-market"
        if text is not None:
            return "csv"
        raise MatrixFormatError(f"cannot infer format from extension {suffix!r}", path=self.path)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as err:
        raise MatrixFormatError(err.strerror or str(err), path=path) from err


_LINE_RE = re.compile(r"[Ll]ine (\d+)")


def _parse_mm(text: str, path: str) -> sp.csr_matrix | np.ndarray:
    try:
        M = scipy.io.mmread(_io.BytesIO(text.encode()))
    except Exception as err:  # scipy raises ValueError and friends with loose messages
        msg = str(err)
        found = _LINE_RE.search(msg)
        if found:
            line = int(found.group(1))
        elif "runcated" in msg or "xpected" in msg:
            line = text.count("\n") + (0 if text.endswith("\n") else 1) + 1
            msg = f"unexpected end of file: {msg}"
        else:
            line = None
        raise MatrixFormatError(msg, line=line, path=path) from None
    if sp.issparse(M):
        return sp.csr_matrix(M, dtype=float)
    return np.asarray(M, dtype=float)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _parse_csv(text: str, path: str) -> DataMatrix:
    rows = [(lineno, row) for lineno, row in enumerate(csv.reader(_io.StringIO(text)), start=1)]
    rows = [(lineno, [c.strip() for c in row]) for lineno, row in rows if any(c.strip() for c in row)]
    if not rows:
        raise MatrixFormatError("file holds no data", line=1, path=path)
    col_labels = None
    first_line, first = rows[0]
    if any(not _is_number(c) for c in first[1:]) or (len(first) == 1 and not _is_number(first[0])):
        col_labels = first
        rows = rows[1:]
    if not rows:
        raise MatrixFormatError("header without data rows", line=first_line, path=path)
    row_labels = None
    if not _is_number(rows[0][1][0]):
        row_labels = [row[0] for _, row in rows]
        rows = [(lineno, row[1:]) for lineno, row in rows]
        if col_labels is not None and len(col_labels) == len(rows[0][1]) + 1:
            col_labels = col_labels[1:]
    width = len(rows[0][1])
    values = []
    for lineno, row in rows:
        if len(row) != width:
            raise MatrixFormatError(f"expected {width} values, found {len(row)}", line=lineno, path=path)
        try:
            values.append([float(c) for c in row])
        except ValueError:
            bad = next(c for c in row if not _is_number(c))
            raise MatrixFormatError(f"not a number: {bad!r}", line=lineno, path=path) from None
    if col_labels is not None and len(col_labels) != width:
        raise MatrixFormatError(
            f"{len(col_labels)} header labels for {width} columns", line=first_line, path=path
        )
    return DataMatrix(np.array(values, dtype=float), row_labels, col_labels)


def read_matrix(
    source: MatrixFile | str, format: Format | None = None, kind: Kind | None = None
) -> DataMatrix:
    """Load a matrix file; ``"-"`` reads standard input.

    Matrix Market ``coordinate`` files give sparse (CSR) entries, ``array``
    files dense ones.  With ``kind="similarity"`` the matrix must be square
    and symmetric.
    """
    if isinstance(source, MatrixFile):
        spec = MatrixFile(source.path, format or source.format, kind or source.kind)
    else:
        spec = MatrixFile(str(source), format, kind or "data")
    text = _read_text(spec.path)
    fmt = spec.resolved_format(text)
    if fmt == "matrix-market":
        M = DataMatrix(_parse_mm(text, spec.path))
    else:
        M = _parse_csv(text, spec.path)
    if spec.kind == "similarity":
        try:
            check_symmetric(M.entries)
        except SymmetryError as err:
            raise SymmetryError(f"{spec.path}: {err}") from None
    return M


def _fmt(value: float) -> str:
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def write_matrix(M, target: str | Path | TextIO, format: Format = "matrix-market") -> None:
    """Write a matrix so that :func:`read_matrix` restores it bit for bit.

    Sparse entries go out as Matrix Market ``coordinate``, dense ones as
    ``array``.  CSV output carries the labels of a DataMatrix.
    """
    labelled = M if isinstance(M, DataMatrix) else None
    E = entries_of(M)
    if format == "matrix-market":
        buf = _io.BytesIO()
        scipy.io.mmwrite(buf, E, precision=17)
        text = buf.getvalue().decode()
    elif format == "csv":
        dense = E.toarray() if sp.issparse(E) else E
        out = _io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        rows_l = labelled.row_labels if labelled else None
        cols_l = labelled.col_labels if labelled else None
        if cols_l is not None:
            writer.writerow(([""] if rows_l is not None else []) + list(cols_l))
        for i, row in enumerate(dense):
            cells = [_fmt(v) for v in row]
            writer.writerow(([rows_l[i]] if rows_l is not None else []) + cells)
        text = out.getvalue()
    else:
        raise ValueError(f"unknown matrix format {format!r}")
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text)


def write_tree(
    tree: pqtree.PQTree, format: str = "json", labels: Mapping[int, str] | None = None
) -> str:
    """Serialize a tree as ``json``, ``dot`` or ``text``."""
    if format == "json":
        return pqtree.to_json(tree) + "\n"
    if format == "dot":
        return pqtree.to_dot(tree, labels)
    if format == "text":
        return pqtree.to_text(tree, labels)
    raise ValueError(f"unknown tree format {format!r}; use json, dot or text")


def read_tree(path: str) -> pqtree.PQTree:
    return pqtree.from_json(_read_text(path))


# -- data sets ---------------------------------------------------------------

_BORNHOLM_TYPES = ["G3", "F27", "S1", "F26", "N2", "F24", "P6", "F25", "P5", "P4", "N1", "F23"]
_BORNHOLM_ROWS = [
    ("Mollebakken 2", "111100000000"),
    ("Kobbea 11", "011011000000"),
    ("Mollebakken 1", "110110110000"),
    ("Levka 2", "011010011000"),
    ("Grodbygard 324", "000011000100"),
    ("Melsted 8", "001100110100"),
    ("Bokul 7", "000000110010"),
    ("Heslergaard 11", "000000010100"),
    ("Bokul 12", "000000011001"),
    ("Slamrebjerg 142", "000000000101"),
    ("Nexo 6", "000000000111"),
]


def bornholm() -> DataMatrix:
    """Presence/absence of 12 fibula types in 11 female burials on Bornholm."""
    entries = np.array([[float(c) for c in bits] for _, bits in _BORNHOLM_ROWS])
    return DataMatrix(entries, [name for name, _ in _BORNHOLM_ROWS], list(_BORNHOLM_TYPES))


@dataclass(frozen=True)
class TestMatrixSpec:
    """Block-diagonal banded test problem, hidden by a random permutation."""

    __test__ = False  # not a pytest class

    n: int
    block_size: int
    bw: int = 2
    sparse: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.block_size < 1:
            raise ValueError("n and block_size must be positive")
        if self.n % self.block_size:
            raise ValueError(f"block_size {self.block_size} does not divide n={self.n}")
        if not 0 <= self.bw < self.block_size:
            raise ValueError(f"need 0 <= bw < block_size, got bw={self.bw}")


def banded_block(size: int, bw: int) -> sp.csr_matrix:
    """R-matrix with entries ``bw + 1 - |i - j|`` inside the band."""
    offsets = range(-bw, bw + 1)
    diags = [np.full(size - abs(k), float(bw + 1 - abs(k))) for k in offsets]
    return sp.diags(diags, list(offsets), shape=(size, size), format="csr")


def test_matrix(spec: TestMatrixSpec) -> tuple[sp.csr_matrix | np.ndarray, list[list[int]], tuple[int, ...]]:
    """Generate a permuted block-diagonal test matrix.

    Returns ``(S, blocks, perm)`` where ``S[i, j] = B[perm_i, perm_j]`` for
    the unpermuted block-diagonal ``B`` (1-based ``perm``), and ``blocks``
    lists the units of ``S`` belonging to each planted block, sorted and
    ordered by smallest member.  Randomness comes from numpy's PCG64
    generator seeded with ``spec.seed``.
    """
    nblocks = spec.n // spec.block_size
    B = sp.block_diag([banded_block(spec.block_size, spec.bw)] * nblocks, format="csr")
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(spec.n)
    S = B[perm][:, perm].tocsr()
    # unit i of S is row perm[i] of B, which lies in block perm[i] // block_size
    owner = perm // spec.block_size
    blocks = [sorted(int(i) + 1 for i in np.flatnonzero(owner == b)) for b in range(nblocks)]
    blocks.sort(key=lambda b: b[0])
    if not spec.sparse:
        S = S.toarray()
    return S, blocks, tuple(int(p) + 1 for p in perm)


test_matrix.__test__ = False


def random_sparse_symmetric(n: int, density: float, seed: int = 0) -> sp.csr_matrix:
    """Symmetric matrix with normally distributed entries at random positions.

    Roughly ``density * n * n`` entries are nonzero; the diagonal is left
    empty.
    """
    rng = np.random.default_rng(seed)
    pairs = max(1, int(math.ceil(density * n * n / 2)))
    rows = rng.integers(0, n, size=pairs)
    cols = rng.integers(0, n, size=pairs)
    keep = rows != cols
    rows, cols = rows[keep], cols[keep]
    vals = rng.standard_normal(rows.size)
    U = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    U.sum_duplicates()
    return (U + U.T).tocsr()
