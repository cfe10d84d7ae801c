"""Deformation of polyhedral chains into skeleta of uniform complexes."""

from .chains import (
    Piece,
    PolyChain,
    boundary_keys,
    chain_from_json,
    chain_from_json_dict,
    chain_to_json_dict,
    is_closed,
    normalize_chain,
    validate_chain,
    volume,
)
from .complexes import Chart, GeoComplex, UniformityReport, check_uniform
from .deform import (
    CenterSelectionError,
    FFResult,
    ff_deform,
    ff_step,
    radial_project,
    remainder_decomposition,
    select_center,
    vanishing_threshold,
)
from .suite import run_deformation_suite
from .torus import (
    crossing_parities,
    flat_torus_complex,
    random_loop_chain,
    representative_edge_cycle,
    whole_edges_of,
)

__all__ = [
    "Chart",
    "CenterSelectionError",
    "FFResult",
    "GeoComplex",
    "Piece",
    "PolyChain",
    "UniformityReport",
    "boundary_keys",
    "chain_from_json",
    "chain_from_json_dict",
    "chain_to_json_dict",
    "check_uniform",
    "crossing_parities",
    "ff_deform",
    "ff_step",
    "flat_torus_complex",
    "is_closed",
    "normalize_chain",
    "radial_project",
    "random_loop_chain",
    "remainder_decomposition",
    "run_deformation_suite",
    "representative_edge_cycle",
    "select_center",
    "validate_chain",
    "vanishing_threshold",
    "volume",
    "whole_edges_of",
]
