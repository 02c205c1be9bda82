"""Generator systems for finite projective linear groups built from a
cyclic division algebra over a rational function field, plus exact
Cayley-graph and spectral-comparison tooling."""

from cayplex.cayley import (
    CayleyGraph,
    CliqueBudgetError,
    VertexLimitError,
    bfs_build,
    clique_cells,
    closure_from_matrices,
    colored_subgraph,
    export_graph,
    import_graph,
)
from cayplex.cyclic import CycAlg, CycElem, GlobalMat, gamma_from_alpha
from cayplex.ffield import (
    ExtField,
    ExtFieldElem,
    Field,
    FieldElem,
    default_extension_modulus,
    frobenius_matrix,
    gaussian_binomial,
    get_ext_field,
    get_field,
    mult_generator,
    parse_field_descriptor,
    regular_rep,
)
from cayplex.genforge import (
    GenSet,
    Generator,
    MemoryBudgetError,
    attach_subspace,
    build_omega,
    build_omega_hat,
    default_mem_budget,
    expected_index,
    family,
    family_order_m,
    group_order_pgl,
    group_order_psl,
    hat_class_sizes,
    make_params,
    predicted_group_order,
    psl_check,
    symmetrize,
)
from cayplex.projmat import MatSpace, ProjMat, canon_rows, mat_inv, mat_mul, mat_rref
from cayplex.ratfunc import Poly, RatFunc
from cayplex.spectra import (
    ComparisonReport,
    MomentSeq,
    SpectrumReport,
    WLCertificate,
    compare,
    dense_spectrum,
    isomorphism_search,
    walk_moments,
    walk_pattern_count,
    wl_certificate,
)

__version__ = "0.1.0"
