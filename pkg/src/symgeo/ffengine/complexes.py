"""Geometrically realized simplicial complexes with per-cell isometric charts.

Cells are sorted vertex tuples, face-closed from the top cells.  Every cell
carries an affine chart into R^dim built from an orthonormal basis of its
affine hull, so for complexes whose simplices are flat in the ambient space
the charts are exact isometries and chart distortion is measurable via
singular values.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Cell = tuple[int, ...]


@dataclass(frozen=True)
class Chart:
    origin: np.ndarray          # (N,)
    basis: np.ndarray           # (N, d), orthonormal columns
    model: np.ndarray           # (d+1, d) chart coordinates of the cell vertices
    bary_solver: np.ndarray     # (d+1, d+1) inverse of [[1,...],[model^T]]

    def to_chart(self, pts: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(pts) - self.origin) @ self.basis

    def to_ambient(self, coords: np.ndarray) -> np.ndarray:
        return self.origin + np.atleast_2d(coords) @ self.basis.T

    def barycentric(self, coords: np.ndarray) -> np.ndarray:
        coords = np.atleast_2d(coords)
        stacked = np.hstack([np.ones((coords.shape[0], 1)), coords])
        # b solves b @ [[1, model_i]] = [1, x]
        return stacked @ self.bary_solver


class GeoComplex:
    """Face-closed simplicial complex realized by points in R^N."""

    def __init__(self, vertices: np.ndarray, top_cells: Iterable[Sequence[int]],
                 metadata: dict | None = None):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2:
            raise ValueError("vertices must be a (V, N) array")
        cells: dict[int, set[Cell]] = {}
        for cell in top_cells:
            cell = tuple(sorted(int(v) for v in cell))
            if len(set(cell)) != len(cell):
                raise ValueError(f"cell {cell} repeats a vertex")
            for size in range(1, len(cell) + 1):
                cells.setdefault(size - 1, set()).update(
                    itertools.combinations(cell, size)
                )
        self.cells: dict[int, list[Cell]] = {
            d: sorted(cs) for d, cs in sorted(cells.items())
        }
        self.dim = max(self.cells) if self.cells else -1
        self._cell_index = {
            d: {c: i for i, c in enumerate(cs)} for d, cs in self.cells.items()
        }
        self._charts: dict[Cell, Chart] = {}
        self._cofacets: dict[Cell, list[Cell]] = {}
        for d in range(self.dim, 0, -1):
            for cell in self.cells[d]:
                for facet in itertools.combinations(cell, d):
                    self._cofacets.setdefault(facet, []).append(cell)
        self.metadata = metadata or {}

    # -- structure ---------------------------------------------------------

    def cells_of_dim(self, d: int) -> list[Cell]:
        return self.cells.get(d, [])

    def cell_dim(self, cell: Cell) -> int:
        return len(cell) - 1

    def has_cell(self, cell: Cell) -> bool:
        return cell in self._cell_index.get(len(cell) - 1, {})

    def cell_id(self, cell: Cell) -> int:
        return self._cell_index[len(cell) - 1][cell]

    def facets(self, cell: Cell) -> list[Cell]:
        return [cell[:i] + cell[i + 1:] for i in range(len(cell))]

    def cofacets(self, cell: Cell) -> list[Cell]:
        return self._cofacets.get(cell, [])

    def top_cofaces(self, cell: Cell) -> list[Cell]:
        out = [cell] if self.cell_dim(cell) == self.dim else []
        frontier = [cell]
        seen = set()
        while frontier:
            cur = frontier.pop()
            for cof in self.cofacets(cur):
                if cof in seen:
                    continue
                seen.add(cof)
                if self.cell_dim(cof) == self.dim:
                    out.append(cof)
                else:
                    frontier.append(cof)
        return sorted(set(out))

    # -- geometry ----------------------------------------------------------

    def chart(self, cell: Cell) -> Chart:
        cached = self._charts.get(cell)
        if cached is not None:
            return cached
        pts = self.vertices[list(cell)]
        origin = pts[0]
        d = len(cell) - 1
        if d == 0:
            basis = np.zeros((self.vertices.shape[1], 0))
            model = np.zeros((1, 0))
            solver = np.ones((1, 1))
        else:
            edges = (pts[1:] - origin).T
            q, r = np.linalg.qr(edges)
            if np.abs(np.diag(r)).min() < 1e-12:
                raise ValueError(f"degenerate cell {cell}")
            sign = np.sign(np.diag(r))
            basis = q * sign
            model = np.vstack([np.zeros(d), (r.T * sign)])
            stacked = np.hstack([np.ones((d + 1, 1)), model])
            solver = np.linalg.inv(stacked)
        chart = Chart(origin, basis, model, solver)
        self._charts[cell] = chart
        return chart

    def to_chart(self, cell: Cell, pts: np.ndarray) -> np.ndarray:
        return self.chart(cell).to_chart(pts)

    def to_ambient(self, cell: Cell, coords: np.ndarray) -> np.ndarray:
        return self.chart(cell).to_ambient(coords)

    def barycentric(self, cell: Cell, coords: np.ndarray) -> np.ndarray:
        return self.chart(cell).barycentric(coords)

    def convert_coords(self, src: Cell, dst: Cell, coords: np.ndarray) -> np.ndarray:
        return self.to_chart(dst, self.to_ambient(src, coords))

    def cell_diameter(self, cell: Cell) -> float:
        pts = self.vertices[list(cell)]
        if len(cell) == 1:
            return 0.0
        diffs = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diffs ** 2).sum(-1)).max())

    def cell_volume(self, cell: Cell) -> float:
        d = len(cell) - 1
        if d == 0:
            return 1.0
        model = self.chart(cell).model
        edges = model[1:] - model[0]
        gram = edges @ edges.T
        det = float(np.linalg.det(gram))
        return math.sqrt(max(det, 0.0)) / math.factorial(d)

    def chart_distortion(self, cell: Cell) -> float:
        """max(s_max, 1/s_min) of the ambient-to-chart map on the cell's hull."""
        if len(cell) == 1:
            return 1.0
        pts = self.vertices[list(cell)]
        edges = (pts[1:] - pts[0]).T
        _, r = np.linalg.qr(edges)  # hull coordinates of the ambient edges
        model = self.chart(cell).model
        chart_edges = (model[1:] - model[0]).T
        restricted = chart_edges @ np.linalg.inv(r)
        sv = np.linalg.svd(restricted, compute_uv=False)
        return float(max(sv.max(), 1.0 / sv.min()))

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "simplices": [list(c) for c in self.cells_of_dim(self.dim)],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "GeoComplex":
        return cls(np.array(doc["vertices"], dtype=float), doc["simplices"])

    @classmethod
    def from_json(cls, text: str) -> "GeoComplex":
        return cls.from_json_dict(json.loads(text))

    @classmethod
    def from_off(cls, text: str) -> "GeoComplex":
        tokens: list[str] = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
        if not tokens or tokens[0].upper() != "OFF":
            raise ValueError("not an OFF document")
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4
        coords = []
        # vertex lines are triples in standard OFF
        for _ in range(nv):
            coords.append([float(tokens[pos + i]) for i in range(3)])
            pos += 3
        faces = []
        for _ in range(nf):
            cnt = int(tokens[pos])
            face = [int(tokens[pos + 1 + i]) for i in range(cnt)]
            pos += cnt + 1
            if len(set(face)) != cnt:
                raise ValueError(f"OFF face {face} repeats a vertex")
            faces.append(face)
        return cls(np.array(coords), faces)


# ---------------------------------------------------------------------------
# uniformity report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformityReport:
    r: float
    delta: float
    passed: bool
    worst: dict
    diameters: dict = field(repr=False)
    distortions: dict = field(repr=False)
    volumes: dict = field(repr=False)

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "delta": self.delta,
            "pass": self.passed,
            "worst": {
                name: {**info, "cell": list(info["cell"])}
                for name, info in self.worst.items()
            },
        }


def check_uniform(cx: GeoComplex, r: float, delta: float) -> UniformityReport:
    """Checks the three uniformity conditions cell by cell.

    Diameter at most r, chart distortion at most 1 + delta, and cell volume
    at least delta * r^dim; the report carries the worst offender of each.
    """
    diameters, distortions, volumes = {}, {}, {}
    worst = {
        "diameter": {"cell": (), "value": -math.inf, "bound": r, "ok": True},
        "distortion": {"cell": (), "value": -math.inf, "bound": 1.0 + delta, "ok": True},
        "volume": {"cell": (), "margin": math.inf, "ok": True},
    }
    for d, cells in cx.cells.items():
        for cell in cells:
            diam = cx.cell_diameter(cell)
            dist = cx.chart_distortion(cell)
            vol = cx.cell_volume(cell)
            diameters[cell] = diam
            distortions[cell] = dist
            volumes[cell] = vol
            if diam > worst["diameter"]["value"]:
                worst["diameter"].update(cell=cell, value=diam, ok=diam <= r)
            if dist > worst["distortion"]["value"]:
                worst["distortion"].update(cell=cell, value=dist, ok=dist <= 1.0 + delta)
            margin = vol - delta * r ** d
            if margin < worst["volume"]["margin"]:
                worst["volume"].update(
                    cell=cell, margin=margin, value=vol, bound=delta * r ** d,
                    ok=margin >= 0,
                )
    passed = all(info["ok"] for info in worst.values())
    return UniformityReport(r, delta, passed, worst, diameters, distortions, volumes)
