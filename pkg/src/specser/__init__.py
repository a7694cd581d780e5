"""Spectral seriation: PQ-trees of orderings that bring a similarity matrix to Robinson form."""

from .errors import SeriationError
from .graph import (
    DataMatrix,
    apply_perm,
    apply_perm_rows,
    bandwidth,
    components,
    is_r_matrix,
    laplacian,
    similarity,
    visit,
)
from .pqtree import (
    Kind,
    PQTree,
    all_perms,
    from_json,
    lnode,
    mnode,
    nperm,
    one_perm,
    pnode,
    qnode,
    subtree,
    to_dot,
    to_json,
)
from .seriation import (
    SeriationResult,
    parallel_spectral_sort,
    reaches_robinson,
    sample_mnode_perms,
    seriate,
    spectral_sort,
    translate,
)
from .spectral import FiedlerResult, SerOptions, distinct, fiedler

__version__ = "0.1.0"

__all__ = [
    "all_perms",
    "apply_perm",
    "apply_perm_rows",
    "bandwidth",
    "components",
    "DataMatrix",
    "distinct",
    "fiedler",
    "FiedlerResult",
    "from_json",
    "is_r_matrix",
    "Kind",
    "laplacian",
    "lnode",
    "mnode",
    "nperm",
    "one_perm",
    "parallel_spectral_sort",
    "pnode",
    "PQTree",
    "qnode",
    "reaches_robinson",
    "sample_mnode_perms",
    "seriate",
    "SeriationError",
    "SeriationResult",
    "SerOptions",
    "similarity",
    "spectral_sort",
    "subtree",
    "to_dot",
    "to_json",
    "translate",
    "visit",
]
