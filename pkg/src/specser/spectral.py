"""Fiedler value and vector computation.

Small problems use a full dense eigendecomposition.  Large sparse
problems use an iterative solver that works on the orthogonal complement
of the constant vector: LOBPCG with the constant vector as a hard
constraint and an algebraic-multigrid preconditioner, falling back to
implicitly restarted Lanczos (ARPACK) on the Laplacian with the constant
vector shifted to the top of the spectrum.  Neither route factorizes the
singular Laplacian.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceError, ReducibilityError
from .graph import Matrix

RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class SerOptions:
    """Tuning parameters for the spectral sort.

    tau
        Absolute tolerance separating "equal" from "different" numbers,
        used both for eigenvalue multiplicity and for Fiedler vector ties.
        It is not scale invariant: normalize very large similarity
        matrices first.
    translate
        Subtract the smallest entry from the similarity matrix at every
        recursion level.
    nlarge
        Sparse matrices of at least this order use the iterative solver.
    neig
        Eigenpairs (including the null pair) requested from the iterative
        solver.  The window is doubled when it cannot certify the
        multiplicity of the Fiedler value.
    force_large
        ``True`` forces the iterative solver, ``False`` the dense one,
        ``None`` decides from storage and size.
    perm_cap
        Refuse to enumerate trees with more permutations than this.
    seed
        Seed for the iterative solver's starting block.
    """

    tau: float = 1e-8
    translate: bool = True
    nlarge: int = 1000
    neig: int = 3
    force_large: bool | None = None
    perm_cap: int = 10**6
    seed: int | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.neig < 2:
            raise ValueError(f"neig must be at least 2, got {self.neig}")
        if self.nlarge < 3:
            raise ValueError(f"nlarge must be at least 3, got {self.nlarge}")
        if self.perm_cap < 1:
            raise ValueError(f"perm_cap must be positive, got {self.perm_cap}")


@dataclass
class FiedlerResult:
    """Fiedler value, its multiplicity and an orthonormal eigenspace basis.

    ``vectors`` has one column per unit of multiplicity, each orthogonal to
    the constant vector.  With a simple Fiedler value the single column is
    sign-normalized (see :func:`canonical_sign`).
    """

    value: float
    multiplicity: int
    vectors: np.ndarray
    zero_multiplicity: int
    method: str

    @property
    def vector(self) -> np.ndarray:
        return self.vectors[:, 0]


def norm_estimate(L: Matrix) -> float:
    """Max absolute row sum, an upper bound on the 2-norm of symmetric L."""
    if sp.issparse(L):
        return float(np.asarray(abs(L).sum(axis=1)).max())
    return float(np.abs(L).sum(axis=1).max())


def canonical_sign(x: np.ndarray, tau: float) -> np.ndarray:
    """Flip ``x`` so its first entry with magnitude above ``tau`` is negative.

    Sorting ascending then starts from the end of the ordering where the
    lowest-numbered unit sits.
    """
    big = np.flatnonzero(np.abs(x) > tau)
    if big.size and x[big[0]] > 0:
        return -x
    return x


def _orthonormal_complement_basis(V: np.ndarray) -> np.ndarray:
    n = V.shape[0]
    V = V - V.mean(axis=0, keepdims=True)
    Q, _ = np.linalg.qr(V)
    return Q[:, : V.shape[1]] if n >= V.shape[1] else Q


def _finish(w: np.ndarray, V: np.ndarray, zeros: int, tau: float, method: str) -> FiedlerResult:
    """Group the eigenvalues after the null block and build the result."""
    lam = w[zeros]
    mult = int(np.count_nonzero(np.abs(w[zeros:] - lam) < tau))
    vecs = V[:, zeros : zeros + mult]
    if mult == 1:
        x = vecs[:, 0] - vecs[:, 0].mean()
        x = x / np.linalg.norm(x)
        vecs = canonical_sign(x, tau)[:, None]
    else:
        vecs = _orthonormal_complement_basis(vecs)
    return FiedlerResult(float(lam), mult, vecs, zeros, method)


def _dense(L: Matrix, tau: float) -> FiedlerResult:
    Ld = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=float)
    w, V = sla.eigh(Ld)
    zeros = int(np.count_nonzero(w <= tau))
    if zeros > 1:
        raise ReducibilityError(zeros)
    if zeros == 0:
        raise ValueError(f"matrix is not a Laplacian: smallest eigenvalue {w[0]:.3g} exceeds tau")
    return _finish(w, V, zeros, tau, "dense")


def _residuals(L: Matrix, w: np.ndarray, V: np.ndarray) -> np.ndarray:
    return np.linalg.norm(L @ V - V * w, axis=0)


def _lobpcg(L: sp.csr_matrix, k: int, rng: np.random.Generator, tol: float, maxiter: int):
    import pyamg

    n = L.shape[0]
    e = np.full((n, 1), 1 / np.sqrt(n))
    shift = 1e-8 * norm_estimate(L)
    ml = pyamg.smoothed_aggregation_solver(
        (L + shift * sp.identity(n, format="csr")).tocsr(), max_coarse=10
    )
    X = rng.standard_normal((n, k))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w, V = spla.lobpcg(
            L, X, M=ml.aspreconditioner(), Y=e, tol=tol, maxiter=maxiter, largest=False
        )
    order = np.argsort(w)
    return w[order], V[:, order]


def _lanczos(L: Matrix, k: int, rng: np.random.Generator, tol: float, maxiter: int):
    n = L.shape[0]
    e = np.full(n, 1 / np.sqrt(n))
    top = 2 * norm_estimate(L)

    def matvec(x):
        x = np.asarray(x).ravel()
        return L @ x + top * e * (e @ x)

    op = spla.LinearOperator((n, n), matvec=matvec, dtype=float)
    v0 = rng.standard_normal(n)
    ncv = min(n, max(2 * k + 1, 40))
    try:
        w, V = spla.eigsh(op, k=k, which="SA", v0=v0, tol=tol, maxiter=maxiter, ncv=ncv)
    except spla.ArpackNoConvergence:
        raise ConvergenceError("Lanczos solver did not converge", maxiter) from None
    order = np.argsort(w)
    return w[order], V[:, order]


def _iterative(L: Matrix, opts: SerOptions) -> FiedlerResult:
    n = L.shape[0]
    Ls = sp.csr_matrix(L, dtype=float)
    scale = max(norm_estimate(Ls), np.finfo(float).tiny)
    target = RESIDUAL_RTOL * scale
    neig = opts.neig
    while True:
        k = neig - 1
        # LOBPCG wants the block to be a small fraction of n; ARPACK needs k < n - 1.
        if 5 * k >= n or k >= n - 2:
            return _dense(Ls, opts.tau)
        rng = np.random.default_rng(0 if opts.seed is None else opts.seed)
        w, V = _lobpcg(Ls, k, rng, tol=target, maxiter=min(10 * n, 500))
        method = "lobpcg"
        if not np.all(np.isfinite(w)) or _residuals(Ls, w, V).max() > target:
            w, V = _lanczos(Ls, k, rng, tol=RESIDUAL_RTOL, maxiter=10 * n)
            method = "lanczos"
            res = _residuals(Ls, w, V).max()
            if res > 100 * target:
                raise ConvergenceError(
                    f"residual {res:.3g} above {target:.3g}", 10 * n
                )
        small = int(np.count_nonzero(w <= opts.tau))
        if small:
            raise ReducibilityError(1 + small)
        if np.all(np.abs(w - w[0]) < opts.tau):
            # every computed value ties with the Fiedler value: widen the window
            neig *= 2
            continue
        e = np.full((n, 1), 1 / np.sqrt(n))
        return _finish(np.concatenate([[0.0], w]), np.hstack([e, V]), 1, opts.tau, method)


def use_iterative(L: Matrix, opts: SerOptions) -> bool:
    if opts.force_large is not None:
        return bool(opts.force_large)
    return sp.issparse(L) and L.shape[0] >= opts.nlarge


def fiedler(L: Matrix, opts: SerOptions | None = None) -> FiedlerResult:
    """Fiedler value, multiplicity and eigenvector(s) of a connected graph's Laplacian.

    Raises ReducibilityError when more than one eigenvalue is at most
    ``opts.tau``.  The multiplicity counts eigenvalues within ``tau`` of
    the Fiedler value.
    """
    opts = opts or SerOptions()
    n = L.shape[0]
    if n < 2:
        raise ValueError("a Fiedler value needs at least two vertices")
    if use_iterative(L, opts):
        return _iterative(L, opts)
    return _dense(L, opts.tau)


def zero_multiplicity(L: Matrix, tau: float = 1e-8) -> int:
    """Number of eigenvalues of ``L`` that are at most ``tau`` (dense solve)."""
    Ld = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=float)
    return int(np.count_nonzero(sla.eigvalsh(Ld) <= tau))


def distinct(x, tau: float = 1e-8) -> tuple[list[np.ndarray], np.ndarray]:
    """Sort ``x`` and merge runs of values closer than ``tau``.

    Returns the groups as arrays of 0-based positions into ``x`` (in
    ascending value order, positions ascending within a group) and the
    mean value of each group.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        return [], np.empty(0)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    breaks = np.flatnonzero(np.diff(xs) >= tau) + 1
    groups = [np.sort(g) for g in np.split(order, breaks)]
    levels = np.array([x[g].mean() for g in groups])
    return groups, levels
