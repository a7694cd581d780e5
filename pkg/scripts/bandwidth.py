"""Bandwidth of a random sparse symmetric matrix before and after spectral reordering."""

import argparse

from specser import io as sio
from specser.graph import apply_perm, bandwidth
from specser.pqtree import one_perm
from specser.seriation import spectral_sort


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--density", type=float, default=0.002)
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args()

    S = abs(sio.random_sparse_symmetric(args.n, args.density, seed=args.seed))
    res = spectral_sort(S)
    after = bandwidth(apply_perm(S, one_perm(res.tree)))
    print(f"n={args.n} nnz={S.nnz} random={bandwidth(S)} spectral={after}")


if __name__ == "__main__":
    main()
