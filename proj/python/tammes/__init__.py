"""Python bindings for the tammes C++ library."""

from ._tammes import (
    BadHeader,
    ConfigError,
    Configuration,
    DomainError,
    InvalidEmbedding,
    NoClosure,
    PlanarGraph,
    RootNotBracketed,
    alpha,
    canonical_form,
    contact_edges,
    embed_graph,
    fejes_toth_bound,
    gamma2_curve,
    gamma2_f13_derivative,
    gamma2_theta,
    gamma14_graph,
    gamma14_variants,
    is_irreducible,
    lambda_max_min,
    planar_contact_graph,
    polygon_embed,
    polyhedron,
    prop31_filter,
    prune_graph,
    read_planar_code_file,
    rho,
    rhombus_pair_sum_bounds,
    square_angle,
    stress_feasible,
    tammes_optimize,
    verify_maximal,
    write_planar_code_file,
)

__version__ = "0.1.0"
