"""Counting graph homomorphisms modulo a prime.

Exact and modular hom counting, p-automorphism reduction, Möbius
inversion over partition lattices, graph products with skeleton
factorization, the tractability classifier and the reduction from
weighted bipartite independent sets.
"""

from .dichotomy import (
    ClassifierVerdict,
    ZDecomposition,
    build_bis_reduction,
    classify,
    count_tractable,
    find_gadgets,
    find_thick_z,
    is_thick_z,
    make_decomposition,
    verify_reduction,
    zbis_value,
)
from .exceptions import SearchExhausted, SortError, VerificationFailed
from .graph import (
    Graph,
    Partition,
    PinnedGraph,
    bipartition,
    connected_components,
    graph_from_json,
    graph_to_json,
    induced_subgraph,
    quotient,
    r_classes,
    structural_class,
)
from .hom import (
    TableCSP,
    count_csp,
    count_hom,
    count_hom_mod,
    count_hom_pinned,
    count_hom_pinned_set,
    count_inj,
    glue_odot,
    product_pinned,
)
from .mobius import aut_order, enumerate_partitions, indistinguishable, inj_via_inversion, mobius_weight
from .products import (
    boolean_square,
    cartesian_prime_factorization,
    cartesian_product,
    cartesian_skeleton,
    check_splitting,
    diamond_prime_factorization,
    diamond_product,
    direct_product,
)
from .reduction import (
    constants_reduce,
    find_p_automorphism,
    mpp_eval,
    normalize_pp_gadget,
    p_reduce,
    strictify,
    subalgebra_neighborhood,
)

__version__ = "0.1.0"
