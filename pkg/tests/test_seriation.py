import numpy as np
import pytest
import scipy.sparse as sp

import specser.seriation as seriation_mod
from reference import (
    CYCLE_F,
    CYCLE_F_REORDERED,
    CYCLE_SAMPLED_PERMS,
    F10,
    F10_PERMS,
    R10,
    random_pre_r,
    robinson_orderings,
)
from specser import io as sio
from specser.errors import ConvergenceError, SeriationError, SortError, SymmetryError
from specser.graph import apply_perm, apply_perm_rows, bandwidth, inverse_perm, is_r_matrix, similarity
from specser.pqtree import Kind, all_perms, check_proper, equivalent, lnode, mnode, nperm, one_perm, pnode, relabel
from specser.seriation import (
    parallel_spectral_sort,
    reaches_robinson,
    sample_mnode_perms,
    seriate,
    spectral_sort,
    translate,
)
from specser.spectral import SerOptions


def test_translate():
    F = np.array([[3.0, 1.0], [1.0, 3.0]])
    np.testing.assert_array_equal(translate(F), [[2.0, 0.0], [0.0, 2.0]])
    Z = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert translate(Z) is Z
    S = sp.csr_matrix(Z)
    out = translate(S)
    assert sp.issparse(out) and (out != S).nnz == 0
    neg = sp.csr_matrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    np.testing.assert_array_equal(translate(neg), [[1.0, 0.0], [0.0, 1.0]])


def test_trivial_sizes():
    assert spectral_sort(np.array([[5.0]])).tree == lnode(1)
    res = spectral_sort(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert res.tree == pnode([1, 2]) and res.is_pre_r_certified


def test_ten_by_ten_example():
    res = spectral_sort(F10)
    assert res.tree.kind is Kind.Q and all(c.is_leaf for c in res.tree.children)
    assert set(all_perms(res.tree)) == F10_PERMS
    assert one_perm(res.tree) == (4, 1, 7, 5, 10, 8, 6, 9, 2, 3)
    assert res.is_pre_r_certified and not res.has_mnode
    for p in F10_PERMS:
        np.testing.assert_array_equal(apply_perm(F10, p), R10)


def test_cycle_gives_mnode():
    res = spectral_sort(CYCLE_F)
    assert res.tree == mnode([1, 2, 3, 4, 5])
    assert res.has_mnode and not res.is_pre_r_certified


def test_block_diagonal_gives_pnode_root():
    S, blocks, _ = sio.test_matrix(sio.TestMatrixSpec(n=24, block_size=6, bw=2, seed=1))
    res = spectral_sort(S)
    assert res.tree.kind is Kind.P
    assert [sorted(c.frontier()) for c in res.tree.children] == blocks
    assert res.is_pre_r_certified
    assert reaches_robinson(S, res.tree)


def test_sparse_and_dense_agree():
    S, _, _ = sio.test_matrix(sio.TestMatrixSpec(n=60, block_size=20, bw=3, seed=2))
    assert spectral_sort(S).tree == spectral_sort(S.toarray()).tree


def test_asymmetric_input_rejected():
    with pytest.raises(SymmetryError):
        spectral_sort(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize("seed", range(300))
def test_matches_exhaustive_search(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 9))
    F, _ = random_pre_r(n, rng)
    res = spectral_sort(F)
    check_proper(res.tree, units=range(1, n + 1))
    assert res.is_pre_r_certified
    assert set(all_perms(res.tree)) == robinson_orderings(F)
    assert is_r_matrix(apply_perm(F, one_perm(res.tree)))


@pytest.mark.parametrize("seed", range(50))
def test_translation_invariance(seed):
    rng = np.random.default_rng(1000 + seed)
    F, _ = random_pre_r(int(rng.integers(4, 12)), rng)
    F = F + 1.0  # irreducible
    c = float(rng.uniform(0, 100))
    assert spectral_sort(F).tree == spectral_sort(F + c).tree


@pytest.mark.parametrize("seed", range(50))
def test_relabel_equivariance(seed):
    rng = np.random.default_rng(2000 + seed)
    n = int(rng.integers(3, 12))
    F, _ = random_pre_r(n, rng)
    q = tuple(int(v) + 1 for v in rng.permutation(n))
    tree_q = spectral_sort(apply_perm(F, q)).tree
    # unit i of the permuted matrix is unit q_i of F
    mapped = relabel(tree_q, {i + 1: q[i] for i in range(n)})
    assert equivalent(mapped, spectral_sort(F).tree)


@pytest.mark.parametrize("seed", range(100))
def test_certified_implies_robinson_on_pre_r_input(seed):
    rng = np.random.default_rng(3000 + seed)
    F, _ = random_pre_r(int(rng.integers(3, 30)), rng)
    res = spectral_sort(F)
    if res.is_pre_r_certified:
        assert is_r_matrix(apply_perm(F, one_perm(res.tree)))
        assert reaches_robinson(F, res.tree)


def test_certification_is_not_a_proof_for_arbitrary_input():
    # Bornholm: every Fiedler value is simple, yet the similarity is not pre-R.
    S = similarity(sio.bornholm())
    res = spectral_sort(S)
    assert res.is_pre_r_certified
    assert not reaches_robinson(S, res.tree)
    # neither ordering in the tree works
    assert not any(is_r_matrix(apply_perm(S, p)) for p in all_perms(res.tree))


def test_seriate_bornholm():
    res = seriate(sio.bornholm())
    assert res.tree.kind is Kind.Q and nperm(res.tree) == 2
    S = similarity(sio.bornholm())
    assert bandwidth(apply_perm(S, one_perm(res.tree))) <= bandwidth(S)


def test_seriate_row_permuted_bornholm_is_equivariant():
    data = sio.bornholm()
    base = seriate(data).tree
    rng = np.random.default_rng(11)
    q = tuple(int(v) + 1 for v in rng.permutation(11))
    res = seriate(apply_perm_rows(data, q))
    assert equivalent(relabel(res.tree, {i + 1: q[i] for i in range(11)}), base)


def test_no_translate_option():
    F = F10 + 5.0
    assert spectral_sort(F, SerOptions(translate=False)).is_pre_r_certified
    assert spectral_sort(F, SerOptions(translate=False)).tree == spectral_sort(F).tree


def test_sample_mnode_perms_on_cycle():
    perms = sample_mnode_perms(CYCLE_F, 10000, seed=0)
    assert perms == CYCLE_SAMPLED_PERMS
    for p in perms:
        np.testing.assert_array_equal(apply_perm(CYCLE_F, p), CYCLE_F_REORDERED)


def test_sample_mnode_perms_is_seed_deterministic():
    assert sample_mnode_perms(CYCLE_F, 50, seed=5) == sample_mnode_perms(CYCLE_F, 50, seed=5)


def test_sample_mnode_perms_needs_multiple_value():
    with pytest.raises(ValueError):
        sample_mnode_perms(F10)


def test_sort_error_names_the_units(monkeypatch):
    def failing(L, opts=None):
        raise ConvergenceError("stalled", 17)

    monkeypatch.setattr(seriation_mod, "fiedler", failing)
    F = sp.block_diag([R10, R10]).toarray()
    with pytest.raises(SortError) as info:
        spectral_sort(F)
    assert list(info.value.units) == list(range(1, 11))
    assert isinstance(info.value.cause, ConvergenceError)
    assert info.value.cause.iterations == 17
    assert isinstance(info.value, SeriationError)


# -- parallel -----------------------------------------------------------------


@pytest.mark.parametrize("block_size", [1, 2, 4, 16, 64, 256])
@pytest.mark.parametrize("workers", [1, 2, 4])
def test_parallel_matches_sequential(block_size, workers):
    spec = sio.TestMatrixSpec(n=256, block_size=block_size, bw=min(2, block_size - 1), seed=block_size)
    S, _, _ = sio.test_matrix(spec)
    seq = spectral_sort(S)
    par = parallel_spectral_sort(S, workers=workers)
    assert par == seq


def test_parallel_with_processes():
    S, _, _ = sio.test_matrix(sio.TestMatrixSpec(n=120, block_size=10, bw=2, seed=3))
    assert parallel_spectral_sort(S, workers=2, executor="process") == spectral_sort(S)


def test_parallel_on_mixed_inputs():
    F = np.zeros((15, 15))
    F[:10, :10] = F10
    F[10:, 10:] = CYCLE_F
    seq = spectral_sort(F)
    assert seq.has_mnode
    assert parallel_spectral_sort(F, workers=3) == seq


def test_parallel_propagates_errors(monkeypatch):
    def failing(L, opts=None):
        raise ConvergenceError("stalled", 3)

    monkeypatch.setattr(seriation_mod, "fiedler", failing)
    S, _, _ = sio.test_matrix(sio.TestMatrixSpec(n=40, block_size=4, bw=2, seed=0))
    with pytest.raises(SortError):
        parallel_spectral_sort(S, workers=4)


def test_parallel_rejects_bad_worker_count():
    with pytest.raises(ValueError):
        parallel_spectral_sort(F10, workers=0)


def test_test_matrix_inverse_perm_restores_blocks():
    spec = sio.TestMatrixSpec(n=40, block_size=8, bw=3, seed=9)
    S, _, perm = sio.test_matrix(spec)
    B = apply_perm(S, inverse_perm(perm))
    for b in range(5):
        block = B[b * 8 : (b + 1) * 8, b * 8 : (b + 1) * 8]
        assert is_r_matrix(block)
    assert bandwidth(B) == 3
