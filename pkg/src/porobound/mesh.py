"""Structured conforming triangulations of axis-aligned rectangles.

Cells are positively oriented vertex triples; facets are all edges, with
boundary facets carrying one tag per field (pressure and displacement).
A mesh is immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DIRICHLET = "Dirichlet"
NEUMANN = "Neumann"
FIELDS = ("p", "u")


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray          # (n_v, 2)
    cells: np.ndarray             # (n_c, 3), positive orientation
    edges: np.ndarray             # (n_e, 2), each sorted (lo, hi)
    cell_edges: np.ndarray        # (n_c, 3), edge k opposite local vertex k
    boundary_edges: np.ndarray    # indices into edges
    # per-field tag of each boundary edge: {"p": {edge: kind}, "u": {...}}
    boundary_tags: dict = field(default_factory=dict)
    h: float = 0.0

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def cell_areas(self) -> np.ndarray:
        p = self.vertices[self.cells]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def retag(self, edge_indices, fields, kind) -> "Mesh":
        """Return a copy with the given boundary edges retagged for fields."""
        if isinstance(fields, str):
            fields = (fields,)
        tags = {f: dict(self.boundary_tags[f]) for f in FIELDS}
        bset = set(int(e) for e in self.boundary_edges)
        for e in edge_indices:
            e = int(e)
            if e not in bset:
                raise MeshError(f"edge {e} is not a boundary edge")
            for f in fields:
                tags[f][e] = kind
        return Mesh(self.vertices, self.cells, self.edges, self.cell_edges,
                    self.boundary_edges, tags, self.h)


def _finish(vertices, cells, tag_all_dirichlet=True, inherited_tags=None):
    """Build edge connectivity, orientation checks, and tags."""
    vertices = np.ascontiguousarray(vertices, dtype=float)
    cells = np.ascontiguousarray(cells, dtype=np.int64)

    p = vertices[cells]
    area2 = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
             - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    if np.any(area2 <= 0.0):
        raise MeshError("cells must be positively oriented with positive area")

    # edge k is opposite local vertex k
    raw = np.concatenate([cells[:, [1, 2]], cells[:, [2, 0]], cells[:, [0, 1]]])
    raw_sorted = np.sort(raw, axis=1)
    edges, inverse, counts = np.unique(raw_sorted, axis=0,
                                       return_inverse=True,
                                       return_counts=True)
    n_c = cells.shape[0]
    cell_edges = inverse.reshape(3, n_c).T.copy()
    boundary_edges = np.flatnonzero(counts == 1)
    if np.any(counts > 2):
        raise MeshError("non-manifold edge detected")

    seg = vertices[edges[:, 1]] - vertices[edges[:, 0]]
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    h = float(lengths[np.concatenate([cell_edges.ravel()])].max())

    tags = {f: {} for f in FIELDS}
    if inherited_tags is not None:
        for f in FIELDS:
            tags[f].update(inherited_tags[f])
    elif tag_all_dirichlet:
        for e in boundary_edges:
            for f in FIELDS:
                tags[f][int(e)] = DIRICHLET

    return Mesh(vertices, cells, edges, cell_edges, boundary_edges, tags, h)


def build_uniform_mesh(corner_min, corner_max, nx: int, ny: int,
                       pattern: str = "diagonal") -> Mesh:
    """Triangulate [corner_min, corner_max] with an nx-by-ny grid of quads."""
    corner_min = np.asarray(corner_min, dtype=float)
    corner_max = np.asarray(corner_max, dtype=float)
    if nx < 1 or ny < 1:
        raise MeshError("nx and ny must be at least 1")
    if not np.all(corner_max > corner_min):
        raise MeshError("corner_max must exceed corner_min componentwise")
    if pattern not in ("diagonal", "crisscross"):
        raise MeshError(f"unknown mesh pattern {pattern!r}")

    xs = np.linspace(corner_min[0], corner_max[0], nx + 1)
    ys = np.linspace(corner_min[1], corner_max[1], ny + 1)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(i, j):
        return i * (ny + 1) + j

    cells = []
    if pattern == "diagonal":
        for i in range(nx):
            for j in range(ny):
                v00, v10 = vid(i, j), vid(i + 1, j)
                v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
                cells.append((v00, v10, v11))
                cells.append((v00, v11, v01))
    else:
        centers = []
        for i in range(nx):
            for j in range(ny):
                centers.append([0.5 * (xs[i] + xs[i + 1]),
                                0.5 * (ys[j] + ys[j + 1])])
        base = vertices.shape[0]
        vertices = np.vstack([vertices, np.asarray(centers)])
        for i in range(nx):
            for j in range(ny):
                c = base + i * ny + j
                v00, v10 = vid(i, j), vid(i + 1, j)
                v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
                cells.append((v00, v10, c))
                cells.append((v10, v11, c))
                cells.append((v11, v01, c))
                cells.append((v01, v00, c))

    return _finish(vertices, np.asarray(cells))


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split every triangle into 4 congruent children via edge midpoints."""
    n_v = mesh.n_vertices
    midpoints = 0.5 * (mesh.vertices[mesh.edges[:, 0]]
                       + mesh.vertices[mesh.edges[:, 1]])
    vertices = np.vstack([mesh.vertices, midpoints])

    c = mesh.cells
    m = n_v + mesh.cell_edges  # midpoint vertex id of edge opposite local k
    children = np.concatenate([
        np.column_stack([c[:, 0], m[:, 2], m[:, 1]]),
        np.column_stack([c[:, 1], m[:, 0], m[:, 2]]),
        np.column_stack([c[:, 2], m[:, 1], m[:, 0]]),
        np.column_stack([m[:, 0], m[:, 1], m[:, 2]]),
    ])

    interim = _finish(vertices, children, tag_all_dirichlet=False)

    # children of a tagged parent edge keep the parent's tags
    parent_of = {}
    for e in mesh.boundary_edges:
        a, b = mesh.edges[e]
        mid = n_v + e
        for half in ((min(a, mid), max(a, mid)), (min(b, mid), max(b, mid))):
            parent_of[half] = int(e)
    tags = {f: {} for f in FIELDS}
    for e in interim.boundary_edges:
        key = tuple(interim.edges[e])
        parent = parent_of.get(key)
        if parent is None:
            raise MeshError("refined boundary edge has no tagged parent")
        for f in FIELDS:
            tags[f][int(e)] = mesh.boundary_tags[f][parent]
    return Mesh(interim.vertices, interim.cells, interim.edges,
                interim.cell_edges, interim.boundary_edges, tags, interim.h)


def boundary_facets(mesh: Mesh, field: str, kind: str) -> np.ndarray:
    """Edge indices carrying (field, kind); Dirichlet sets must be nonempty."""
    if field not in FIELDS:
        raise MeshError(f"unknown field {field!r}")
    if kind not in (DIRICHLET, NEUMANN):
        raise MeshError(f"unknown boundary kind {kind!r}")
    tags = mesh.boundary_tags[field]
    out = np.asarray(sorted(e for e, k in tags.items() if k == kind),
                     dtype=np.int64)
    if kind == DIRICHLET and out.size == 0:
        raise MeshError(
            f"Dirichlet boundary for field {field!r} is empty; "
            "a positive-measure Dirichlet surface is required")
    return out


def save_mesh_txt(mesh: Mesh, path) -> None:
    """Plain-text dump: one vertex (x y) per line, then one cell (i j k)."""
    with open(path, "w") as fh:
        fh.write(f"vertices {mesh.n_vertices}\n")
        for x, y in mesh.vertices:
            fh.write(f"{x!r} {y!r}\n")
        fh.write(f"cells {mesh.n_cells}\n")
        for i, j, k in mesh.cells:
            fh.write(f"{i} {j} {k}\n")
