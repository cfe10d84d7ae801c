"""Brute-force mod-2 simplicial homology, used as the oracle for deformation
tests: boundary matrices over GF(2), cycle tests, and homologous-chain tests
by solving linear systems."""

from __future__ import annotations

import numpy as np

from .complexes import GeoComplex


def boundary_matrix(cx: GeoComplex, d: int) -> np.ndarray:
    """GF(2) matrix of the boundary map C_d -> C_{d-1}."""
    rows = cx.cells_of_dim(d - 1)
    cols = cx.cells_of_dim(d)
    row_index = {c: i for i, c in enumerate(rows)}
    mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    for j, cell in enumerate(cols):
        for i in range(len(cell)):
            facet = cell[:i] + cell[i + 1:]
            mat[row_index[facet], j] ^= 1
    return mat


def gf2_rank(mat: np.ndarray) -> int:
    return len(_rref(mat.copy())[1])


def _rref(mat: np.ndarray):
    mat = mat % 2
    pivots = []
    row = 0
    for col in range(mat.shape[1]):
        pivot = None
        for r in range(row, mat.shape[0]):
            if mat[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        mat[[row, pivot]] = mat[[pivot, row]]
        for r in range(mat.shape[0]):
            if r != row and mat[r, col]:
                mat[r] ^= mat[row]
        pivots.append(col)
        row += 1
        if row == mat.shape[0]:
            break
    return mat, pivots


def gf2_solve(mat: np.ndarray, target: np.ndarray) -> bool:
    """Is the target vector in the GF(2) column space of the matrix?"""
    augmented = np.hstack([mat % 2, (target % 2)[:, None]]).astype(np.uint8)
    return gf2_rank(augmented) == gf2_rank(mat)


def betti(cx: GeoComplex, d: int) -> int:
    n_d = len(cx.cells_of_dim(d))
    rank_d = gf2_rank(boundary_matrix(cx, d)) if d >= 1 else 0
    rank_up = (
        gf2_rank(boundary_matrix(cx, d + 1)) if cx.cells_of_dim(d + 1) else 0
    )
    return (n_d - rank_d) - rank_up


def is_cycle(cx: GeoComplex, d: int, vec: np.ndarray) -> bool:
    if d == 0:
        return True
    return not np.any(boundary_matrix(cx, d) @ (vec % 2) % 2)


def homologous(cx: GeoComplex, d: int, vec1: np.ndarray, vec2: np.ndarray) -> bool:
    """Two d-cycles are homologous iff their sum bounds."""
    diff = (vec1 ^ vec2).astype(np.uint8)
    if not diff.any():
        return True
    return gf2_solve(boundary_matrix(cx, d + 1), diff)


def cell_vector(cx: GeoComplex, d: int, cells) -> np.ndarray:
    index = {c: i for i, c in enumerate(cx.cells_of_dim(d))}
    vec = np.zeros(len(index), dtype=np.uint8)
    for cell in cells:
        vec[index[tuple(sorted(cell))]] ^= 1
    return vec


class Gf2RowSpace:
    """Incremental GF(2) row basis with fast membership tests."""

    def __init__(self, rows: np.ndarray):
        self._basis: dict[int, np.ndarray] = {}
        for row in np.asarray(rows, dtype=np.uint8) % 2:
            self._insert(row.copy())

    def _reduce(self, v: np.ndarray) -> np.ndarray:
        for pivot, row in self._basis.items():
            if v[pivot]:
                v ^= row
        return v

    def _insert(self, row: np.ndarray):
        row = self._reduce(row)
        nz = np.flatnonzero(row)
        if nz.size:
            self._basis[int(nz[0])] = row

    @property
    def rank(self) -> int:
        return len(self._basis)

    def contains(self, v: np.ndarray) -> bool:
        return not self._reduce(np.array(v, dtype=np.uint8) % 2).any()


class BoundaryImage:
    """Cached membership test for the image of the boundary C_d -> C_{d-1}."""

    def __init__(self, cx: GeoComplex, d: int):
        self.space = Gf2RowSpace(boundary_matrix(cx, d).T)

    def bounds(self, vec: np.ndarray) -> bool:
        return self.space.contains(vec)
