"""Time sequential and parallel sorts of permuted block-diagonal matrices."""

import argparse
import time

from specser import io as sio
from specser.seriation import parallel_spectral_sort, spectral_sort


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--workers", type=int, nargs="+", default=[2, 4, 8])
    ap.add_argument("--executor", choices=["thread", "process"], default="thread")
    args = ap.parse_args()

    print("block  seq[s]  " + "  ".join(f"w={w}[s]" for w in args.workers))
    block = 1
    while block <= args.n:
        spec = sio.TestMatrixSpec(n=args.n, block_size=block, bw=min(2, block - 1), seed=block)
        S, _, _ = sio.test_matrix(spec)
        seq, t_seq = timed(spectral_sort, S)
        cells = []
        for w in args.workers:
            par, t = timed(parallel_spectral_sort, S, workers=w, executor=args.executor)
            cells.append(f"{t:7.3f}" + ("" if par == seq else "!"))
        print(f"{block:5d} {t_seq:7.3f}  " + "  ".join(cells))
        block *= 2


if __name__ == "__main__":
    main()
