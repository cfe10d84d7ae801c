"""Randomized end-to-end exercise of the deformation engine on a torus.

Drives seeded random loops through the full collapse and accumulates the
four certificates: skeleton containment, cycle preservation, homology-class
preservation against the GF(2) oracle, and the empirical volume/track
constant.
"""

from __future__ import annotations

import numpy as np

from . import homology
from .chains import PolyChain, piece_volume, validate_chain
from .deform import FFResult, ff_deform, remainder_decomposition, vanishing_threshold
from .complexes import Cell, GeoComplex
from .torus import (
    crossing_parities,
    random_loop_chain,
    representative_edge_cycle,
    whole_edges_of,
)


def star_mass(cx: GeoComplex, chain: PolyChain, cell: Cell) -> float:
    """Chain volume carried by the top cells around a cell."""
    tops = set(cx.top_cofaces(cell))
    total = 0.0
    for piece in chain.pieces:
        if tops & set(cx.top_cofaces(piece.host)):
            total += piece_volume(piece)
    return total


def vanishing_check(cx: GeoComplex, chain: PolyChain, result: FFResult) -> float:
    """A-posteriori form of the local-mass threshold on a finished run.

    A k-cell can survive the collapse only where the input chain carried at
    least eta local mass, with eta computed from the run's own per-cell
    volume constant.  Returns the worst slack (negative = violation).
    """
    eta = vanishing_threshold(cx, result.final.k, max(result.max_cell_ratio, 1.0))
    worst = float("inf")
    for cell in result.whole_cells:
        worst = min(worst, star_mass(cx, chain, cell) - eta)
    return worst


def run_deformation_suite(cx: GeoComplex, n_chains: int = 100, seed: int = 0,
                          c_target: float | None = None) -> dict:
    """Deform seeded random loops and certify the engine's contracts."""
    image = homology.BoundaryImage(cx, 2)
    seeds = np.random.SeedSequence(seed).generate_state(n_chains)
    ratios = []
    failures = []
    max_local_mass_violation = 0.0
    for chain_seed in map(int, seeds):
        chain, winding = random_loop_chain(cx, seed=chain_seed)
        vol_in = chain.volume()
        result = ff_deform(cx, chain, seed=chain_seed, c_target=c_target)
        try:
            validate_chain(cx, result.final)
        except ValueError as exc:
            failures.append({"seed": chain_seed, "error": f"containment: {exc}"})
            continue
        if result.final.max_host_dim() > chain.k:
            failures.append({"seed": chain_seed, "error": "outside k-skeleton"})
            continue
        try:
            edges = whole_edges_of(cx, result.final)
        except ValueError as exc:
            failures.append({"seed": chain_seed, "error": f"partial edge: {exc}"})
            continue
        vec = homology.cell_vector(cx, 1, edges)
        if not homology.is_cycle(cx, 1, vec):
            failures.append({"seed": chain_seed, "error": "final chain not closed"})
            continue
        rep = homology.cell_vector(cx, 1, representative_edge_cycle(cx, winding))
        if crossing_parities(cx, result.final) != winding or not image.bounds(vec ^ rep):
            failures.append({"seed": chain_seed, "error": "homology class changed"})
            continue
        n_pieces, q_pieces = remainder_decomposition(cx, result)
        if len(n_pieces) + len(q_pieces) != len(result.final.pieces):
            failures.append({"seed": chain_seed, "error": "remainder not exhaustive"})
            continue
        slack = vanishing_check(cx, chain, result)
        if slack < 0:
            failures.append(
                {"seed": chain_seed,
                 "error": f"kept cell below local-mass threshold by {-slack:.3e}"}
            )
            continue
        max_local_mass_violation = max(max_local_mass_violation, -min(slack, 0.0))
        ratios.append(max(result.final.volume(), result.total_track) / vol_in)
    c_empirical = float(max(ratios)) if ratios else 0.0
    return {
        "check": "deformation_suite",
        "params": {"n_chains": n_chains, "seed": seed},
        "pass": not failures,
        "max_abs_err": 0.0 if not failures else float(len(failures)),
        "detail": {
            "c_empirical": c_empirical,
            "mean_ratio": float(np.mean(ratios)) if ratios else 0.0,
            "eta_at_c": vanishing_threshold(cx, 1, max(c_empirical, 1.0)),
            "failures": failures[:5],
        },
    }
