"""Seriate the Bornholm burial data and print the chronology with labels."""

from specser import io as sio
from specser.graph import apply_perm, bandwidth, similarity
from specser.pqtree import one_perm, to_text
from specser.seriation import reaches_robinson, seriate


def main():
    data = sio.bornholm()
    res = seriate(data)
    S = similarity(data)
    print(to_text(res.tree, data.label_map()), end="")
    order = one_perm(res.tree)
    print("order:", ", ".join(data.row_labels[i - 1] for i in order))
    print(f"bandwidth {bandwidth(S)} -> {bandwidth(apply_perm(S, order))}")
    print(f"certified={res.is_pre_r_certified} reaches_robinson={reaches_robinson(S, res.tree)}")


if __name__ == "__main__":
    main()
