"""Flat torus test complexes and seeded random loop chains.

The n x n grid torus is realized on the Clifford torus in R^4, where every
triangle is flat, so all charts are exact isometries.  Each 2-cell remembers
an unwrapped parameter triangle in the [0, n)^2 picture; loops are generated
there, split along the triangulation lines, and their mod-2 intersection
parities with two fixed transversal circle families classify homology.
"""

from __future__ import annotations

import math

import numpy as np

from .chains import Piece, PolyChain, normalize_chain
from .complexes import GeoComplex

#: offsets of the two transversal test-circle families, chosen to miss all
#: vertices and edges of the grid
_TEST_X = 0.493716
_TEST_Y = 0.517635


def flat_torus_complex(n: int = 8, radius: float = 1.0) -> GeoComplex:
    """Triangulated n x n grid torus on the Clifford torus in R^4."""
    if n < 3:
        raise ValueError("need n >= 3 for a simplicial grid torus")

    def vid(i, j):
        return (i % n) * n + (j % n)

    def embed(i, j):
        a, b = 2 * math.pi * i / n, 2 * math.pi * j / n
        return [radius * math.cos(a), radius * math.sin(a),
                radius * math.cos(b), radius * math.sin(b)]

    vertices = np.array([embed(i, j) for i in range(n) for j in range(n)])
    tris = []
    param = {}
    for i in range(n):
        for j in range(n):
            for corners in (
                [(i, j), (i + 1, j), (i + 1, j + 1)],   # lower: v <= u
                [(i, j), (i, j + 1), (i + 1, j + 1)],   # upper: v >= u
            ):
                ids = [vid(a, b) for a, b in corners]
                order = np.argsort(ids)
                cell = tuple(int(ids[o]) for o in order)
                tris.append(cell)
                param[cell] = np.array([corners[o] for o in order], dtype=float)
    return GeoComplex(vertices, tris, metadata={"torus_n": n, "param": param})


def _param_triangle(cx: GeoComplex, cell) -> np.ndarray:
    return cx.metadata["param"][cell]


def _locate_triangle(cx: GeoComplex, x: float, y: float):
    n = cx.metadata["torus_n"]
    i, j = math.floor(x), math.floor(y)
    u, v = x - i, y - j
    if v <= u:
        corners = [(i, j), (i + 1, j), (i + 1, j + 1)]
    else:
        corners = [(i, j), (i, j + 1), (i + 1, j + 1)]
    ids = [((a % n) * n + (b % n)) for a, b in corners]
    order = np.argsort(ids)
    cell = tuple(int(ids[o]) for o in order)
    corner_arr = np.array([corners[o] for o in order], dtype=float)
    return cell, corner_arr


def _param_barycentric(tri: np.ndarray, pts: np.ndarray) -> np.ndarray:
    stacked = np.hstack([np.ones((3, 1)), tri])
    solver = np.linalg.inv(stacked)
    lifted = np.hstack([np.ones((pts.shape[0], 1)), pts])
    return lifted @ solver


def _split_segment(a: np.ndarray, b: np.ndarray):
    """Split [a, b] at crossings of the grid lines x, y, y - x in Z."""
    cuts = {0.0, 1.0}
    d = b - a
    for coord, delta in ((a[0], d[0]), (a[1], d[1]), (a[1] - a[0], d[1] - d[0])):
        if abs(delta) < 1e-12:
            continue
        lo, hi = sorted((coord, coord + delta))
        m = math.floor(lo) + 1
        while m < hi:
            cuts.add((m - coord) / delta)
            m += 1
    ts = sorted(t for t in cuts if -1e-12 <= t <= 1 + 1e-12)
    for t0, t1 in zip(ts, ts[1:]):
        if t1 - t0 > 1e-10:
            yield a + t0 * d, a + t1 * d


def random_loop_chain(cx: GeoComplex, seed: int, n_waypoints: int = 6,
                      winding: tuple[int, int] | None = None):
    """Closed random polygonal loop with a prescribed winding class.

    Returns (chain, winding).  The loop is drawn in the unwrapped parameter
    plane, so it is closed on the torus by construction; segments are split
    along the triangulation before charting.
    """
    n = cx.metadata["torus_n"]
    rng = np.random.default_rng(seed)
    if winding is None:
        winding = (int(rng.integers(0, 2)), int(rng.integers(0, 2)))
    start = rng.uniform(0.1, n - 0.1, size=2)
    waypoints = [start]
    for _ in range(n_waypoints - 1):
        waypoints.append(waypoints[-1] + rng.uniform(-2.0, 2.0, size=2))
    waypoints.append(start + np.array([n * winding[0], n * winding[1]], dtype=float))

    pieces = []
    for a, b in zip(waypoints, waypoints[1:]):
        for p, q in _split_segment(a, b):
            mid = (p + q) / 2.0
            cell, tri = _locate_triangle(cx, mid[0], mid[1])
            bary = _param_barycentric(tri, np.vstack([p, q]))
            coords = bary @ cx.chart(cell).model
            pieces.append(Piece(cell, coords))
    chain = normalize_chain(cx, PolyChain(1, pieces))
    return chain, winding


def _crossing_parity(lo: float, hi: float, offset: float, period: int) -> int:
    first = math.ceil((lo - offset) / period)
    last = math.floor((hi - offset) / period)
    if offset + first * period == lo or offset + last * period == hi:
        raise ValueError("segment endpoint lies on a test circle")
    return max(0, last - first + 1) % 2


def crossing_parities(cx: GeoComplex, chain: PolyChain) -> tuple[int, int]:
    """Mod-2 intersection numbers with the two transversal circle families.

    The first parity counts crossings with the vertical circles x = x0 + nZ
    (the winding in the x-direction), the second with the horizontal ones.
    """
    n = cx.metadata["torus_n"]
    a = b = 0
    for piece in chain.pieces:
        host = piece.host
        if len(host) - 1 < 2:
            host = cx.top_cofaces(host)[0]
        tri_param = _param_triangle(cx, host)
        coords = cx.convert_coords(piece.host, host, piece.points)
        bary = cx.barycentric(host, coords)
        pts = bary @ tri_param
        x_lo, x_hi = sorted((pts[0, 0], pts[1, 0]))
        y_lo, y_hi = sorted((pts[0, 1], pts[1, 1]))
        if x_hi - x_lo > 1e-12:
            a ^= _crossing_parity(x_lo, x_hi, _TEST_X, n)
        if y_hi - y_lo > 1e-12:
            b ^= _crossing_parity(y_lo, y_hi, _TEST_Y, n)
    return a, b


def representative_edge_cycle(cx: GeoComplex, winding: tuple[int, int]) -> list:
    """Edge cells of a reference cycle in the class with the given winding."""
    n = cx.metadata["torus_n"]

    def vid(i, j):
        return (i % n) * n + (j % n)

    edges = []
    if winding[0]:
        edges.extend(tuple(sorted((vid(i, 0), vid(i + 1, 0)))) for i in range(n))
    if winding[1]:
        edges.extend(tuple(sorted((vid(0, j), vid(0, j + 1)))) for j in range(n))
    # overlapping edges would cancel mod 2, but the two loops share no edge
    return edges


def whole_edges_of(cx: GeoComplex, chain: PolyChain) -> list:
    """Edge cells fully covered by the chain's pieces; raises on partial pieces."""
    edges = []
    for piece in chain.pieces:
        if len(piece.host) - 1 != 1:
            raise ValueError(f"piece hosted on {piece.host} is not an edge")
        length = float(cx.chart(piece.host).model[1, 0])
        lo, hi = sorted((piece.points[0, 0], piece.points[1, 0]))
        if abs(lo) > 1e-6 or abs(hi - length) > 1e-6:
            raise ValueError(f"piece on {piece.host} does not cover the edge")
        edges.append(piece.host)
    return edges
