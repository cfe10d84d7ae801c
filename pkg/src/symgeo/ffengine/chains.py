"""Polyhedral chains with mod-2 coefficients inside a geometric complex.

A chain of dimension k is a list of pieces; each piece is an affine
k-simplex given by k+1 points in the chart of its host cell.  Identical
pieces cancel in pairs (Z/2 coefficients) and pieces below the degeneracy
threshold are pruned at construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .complexes import Cell, GeoComplex

#: pieces with squared-volume Gram determinant below this are dropped
DEGENERATE_GRAM = 1e-18

#: decimals used when hashing piece coordinates for Z/2 cancellation
_KEY_DECIMALS = 9


@dataclass(frozen=True)
class Piece:
    host: Cell
    points: np.ndarray  # (k+1, dim host) chart coordinates

    def key(self):
        rounded = np.round(self.points, _KEY_DECIMALS) + 0.0
        rows = sorted(tuple(row) for row in rounded)
        return (self.host, tuple(rows))


def piece_volume(piece: Piece) -> float:
    k = piece.points.shape[0] - 1
    if k == 0:
        return 1.0
    edges = piece.points[1:] - piece.points[0]
    gram = edges @ edges.T
    det = float(np.linalg.det(gram))
    return math.sqrt(max(det, 0.0)) / math.factorial(k)


def _gram_det(piece: Piece) -> float:
    k = piece.points.shape[0] - 1
    if k == 0:
        return 1.0
    edges = piece.points[1:] - piece.points[0]
    return float(np.linalg.det(edges @ edges.T))


class PolyChain:
    """Mod-2 polyhedral k-chain; construction prunes and cancels pieces."""

    def __init__(self, k: int, pieces: Iterable[Piece], reduce: bool = True):
        self.k = int(k)
        kept: dict = {}
        for piece in pieces:
            pts = np.asarray(piece.points, dtype=float)
            if pts.shape[0] != self.k + 1:
                raise ValueError(
                    f"piece has {pts.shape[0]} points, expected {self.k + 1}"
                )
            piece = Piece(piece.host, pts)
            if _gram_det(piece) < DEGENERATE_GRAM:
                continue
            if reduce:
                key = piece.key()
                if key in kept:
                    del kept[key]  # Z/2: second copy cancels the first
                else:
                    kept[key] = piece
            else:
                kept[id(piece)] = piece
        self.pieces: tuple[Piece, ...] = tuple(kept.values())

    def __len__(self):
        return len(self.pieces)

    def volume(self) -> float:
        return float(sum(piece_volume(p) for p in self.pieces))

    def hosts(self) -> set[Cell]:
        return {p.host for p in self.pieces}

    def max_host_dim(self) -> int:
        return max((len(p.host) - 1 for p in self.pieces), default=-1)


def volume(chain: PolyChain) -> float:
    return chain.volume()


# ---------------------------------------------------------------------------
# host normalization and validation
# ---------------------------------------------------------------------------

_CONTAIN_TOL = 1e-9


def normalize_host(cx: GeoComplex, piece: Piece) -> Piece:
    """Re-host a piece to the lowest face containing it."""
    while True:
        d = len(piece.host) - 1
        if d == 0:
            return piece
        bary = cx.barycentric(piece.host, piece.points)
        dead = [j for j in range(d + 1) if np.abs(bary[:, j]).max() <= _CONTAIN_TOL]
        if not dead:
            return piece
        keep = [j for j in range(d + 1) if j not in dead]
        face = tuple(piece.host[j] for j in keep)
        coords = cx.convert_coords(piece.host, face, piece.points)
        piece = Piece(face, coords)


def normalize_chain(cx: GeoComplex, chain: PolyChain) -> PolyChain:
    return PolyChain(chain.k, (normalize_host(cx, p) for p in chain.pieces))


def validate_chain(cx: GeoComplex, chain: PolyChain, tol: float = _CONTAIN_TOL):
    """Every piece must sit inside its host cell (barycentric check)."""
    for piece in chain.pieces:
        if not cx.has_cell(piece.host):
            raise ValueError(f"host {piece.host} is not a cell of the complex")
        bary = cx.barycentric(piece.host, piece.points)
        if bary.min() < -tol or bary.max() > 1.0 + tol:
            raise ValueError(
                f"piece escapes host {piece.host}: barycentric range "
                f"[{bary.min():.3e}, {bary.max():.3e}]"
            )


def skeleton_dim(chain: PolyChain) -> int:
    return chain.max_host_dim()


# ---------------------------------------------------------------------------
# boundary parity (mod 2)
# ---------------------------------------------------------------------------


def boundary_keys(cx: GeoComplex, chain: PolyChain, decimals: int = 7) -> set:
    """Ambient-coordinate keys of the mod-2 boundary; empty iff closed."""
    parity: dict = {}
    for piece in chain.pieces:
        ambient = cx.to_ambient(piece.host, piece.points)
        for drop in range(piece.points.shape[0]):
            facet = np.delete(ambient, drop, axis=0)
            key = tuple(sorted(tuple(np.round(row, decimals) + 0.0) for row in facet))
            parity[key] = parity.get(key, 0) ^ 1
    return {key for key, p in parity.items() if p}


def is_closed(cx: GeoComplex, chain: PolyChain) -> bool:
    return not boundary_keys(cx, chain)


# ---------------------------------------------------------------------------
# serialization: pieces as ambient point lists plus host vertex tuples
# ---------------------------------------------------------------------------


def chain_to_json_dict(cx: GeoComplex, chain: PolyChain) -> dict:
    return {
        "k": chain.k,
        "pieces": [
            {
                "host": list(p.host),
                "points": cx.to_ambient(p.host, p.points).tolist(),
            }
            for p in chain.pieces
        ],
    }


def chain_from_json_dict(cx: GeoComplex, doc: dict) -> PolyChain:
    k = int(doc["k"])
    pieces = []
    for item in doc["pieces"]:
        host = tuple(sorted(int(v) for v in item["host"]))
        if not cx.has_cell(host):
            raise ValueError(f"host {host} is not a cell of the complex")
        pts = cx.to_chart(host, np.array(item["points"], dtype=float))
        pieces.append(Piece(host, pts))
    chain = PolyChain(k, pieces)
    validate_chain(cx, chain, tol=1e-6)
    return normalize_chain(cx, chain)


def chain_from_json(cx: GeoComplex, text: str) -> PolyChain:
    return chain_from_json_dict(cx, json.loads(text))
