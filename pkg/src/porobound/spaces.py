"""Discrete function spaces on triangle meshes.

Supported families: Lagrange P1/P2 (scalar, vector, or 3-component symmetric
tensor storage) and Raviart-Thomas RT0/RT1.  Lagrange dofs are numbered
vertices first, then edges; vector/tensor components are blocked
(global dof = component * n_scalar + scalar dof).  RT dofs use globally
oriented edge functionals (canonical normal of the sorted edge), which makes
the spaces H(div)-conforming without per-cell sign bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Mesh
from .quadrature import QuadratureRule, edge_rule, triangle_rule

LAGRANGE_FAMILIES = ("P1", "P2")
RT_FAMILIES = ("RT0", "RT1")


class SpaceError(ValueError):
    pass


class CellGeometry:
    """Per-cell affine data: areas, barycentric gradients, quad points."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.coords = mesh.vertices[mesh.cells]            # (n_c, 3, 2)
        self.areas = mesh.cell_areas()                     # (n_c,)
        e0 = self.coords[:, 2] - self.coords[:, 1]
        e1 = self.coords[:, 0] - self.coords[:, 2]
        e2 = self.coords[:, 1] - self.coords[:, 0]
        rot = lambda v: np.stack([-v[:, 1], v[:, 0]], axis=1)
        inv2a = 1.0 / (2.0 * self.areas)[:, None]
        # grad of barycentric coordinate k (opposite edge rotated inward)
        self.grad_lambda = np.stack(
            [rot(e0) * inv2a, rot(e1) * inv2a, rot(e2) * inv2a], axis=1)
        self.centroids = self.coords.mean(axis=1)
        self._points = {}

    def quad_points(self, rule: QuadratureRule) -> np.ndarray:
        pts = self._points.get(rule.degree)
        if pts is None:
            pts = np.einsum("qk,ckx->cqx", rule.points, self.coords)
            self._points[rule.degree] = pts
        return pts


def _p1_ref(rule):
    return rule.points.copy()                              # (n_q, 3)


def _p2_ref(rule):
    lam = rule.points
    n_q = lam.shape[0]
    vals = np.empty((n_q, 6))
    vals[:, :3] = lam * (2.0 * lam - 1.0)
    # edge dof k sits on the edge opposite local vertex k
    others = [(1, 2), (2, 0), (0, 1)]
    for k, (a, b) in enumerate(others):
        vals[:, 3 + k] = 4.0 * lam[:, a] * lam[:, b]
    return vals


def _p2_bary_derivs(rule):
    lam = rule.points
    n_q = lam.shape[0]
    d = np.zeros((n_q, 6, 3))
    for k in range(3):
        d[:, k, k] = 4.0 * lam[:, k] - 1.0
    others = [(1, 2), (2, 0), (0, 1)]
    for k, (a, b) in enumerate(others):
        d[:, 3 + k, a] = 4.0 * lam[:, b]
        d[:, 3 + k, b] = 4.0 * lam[:, a]
    return d


@dataclass
class Space:
    mesh: Mesh
    family: str
    components: int
    dof_map: np.ndarray            # (n_c, nloc) scalar/RT dof ids
    n_scalar: int                  # scalar dofs for Lagrange, total for RT
    geometry: CellGeometry
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_dofs(self) -> int:
        if self.family in RT_FAMILIES:
            return self.n_scalar
        return self.components * self.n_scalar

    @property
    def n_local(self) -> int:
        return self.dof_map.shape[1]

    def component_dofs(self, comp: int) -> np.ndarray:
        return comp * self.n_scalar + self.dof_map

    # ---- basis tables -------------------------------------------------
    def lagrange_tables(self, rule: QuadratureRule):
        """(N, grads): reference values (n_q, nloc), physical gradients
        (n_c, n_q, nloc, 2)."""
        key = ("lag", rule.degree)
        if key in self._cache:
            return self._cache[key]
        geo = self.geometry
        if self.family == "P1":
            N = _p1_ref(rule)
            grads = np.broadcast_to(
                geo.grad_lambda[:, None, :, :],
                (self.mesh.n_cells, rule.n_points, 3, 2))
        elif self.family == "P2":
            N = _p2_ref(rule)
            dbar = _p2_bary_derivs(rule)   # (n_q, 6, 3)
            grads = np.einsum("qlk,ckx->cqlx", dbar, geo.grad_lambda)
        else:
            raise SpaceError("lagrange_tables on a non-Lagrange space")
        self._cache[key] = (N, grads)
        return N, grads

    def rt_tables(self, rule: QuadratureRule):
        """(vals, divs): (n_c, n_q, nloc, 2) and (n_c, n_q, nloc)."""
        key = ("rt", rule.degree)
        if key in self._cache:
            return self._cache[key]
        coeff = self._rt_coefficients()            # (n_c, n_mono, nloc)
        pts = self.geometry.quad_points(rule)
        mono_v, mono_d = _rt_monomials(self, pts)  # (n_c,n_q,n_mono,2), (...)
        vals = np.einsum("cqmx,cmj->cqjx", mono_v, coeff)
        divs = np.einsum("cqm,cmj->cqj", mono_d, coeff)
        self._cache[key] = (vals, divs)
        return vals, divs

    def _rt_coefficients(self):
        key = "rt_coeff"
        if key not in self._cache:
            self._cache[key] = _rt_build_coefficients(self)
        return self._cache[key]


def build_space(mesh: Mesh, family: str, components: int = 1) -> Space:
    geo = CellGeometry(mesh)
    if family == "P1":
        if components not in (1, 2, 3):
            raise SpaceError("P1 supports 1, 2 or 3 components")
        dof_map = mesh.cells.copy()
        return Space(mesh, family, components, dof_map, mesh.n_vertices, geo)
    if family == "P2":
        if components not in (1, 2, 3):
            raise SpaceError("P2 supports 1, 2 or 3 components")
        dof_map = np.hstack([mesh.cells, mesh.n_vertices + mesh.cell_edges])
        return Space(mesh, family, components, dof_map,
                     mesh.n_vertices + mesh.n_edges, geo)
    if family == "RT0":
        dof_map = mesh.cell_edges.copy()
        return Space(mesh, family, 2, dof_map, mesh.n_edges, geo)
    if family == "RT1":
        e = mesh.cell_edges
        dof_map = np.column_stack([
            2 * e[:, 0], 2 * e[:, 0] + 1,
            2 * e[:, 1], 2 * e[:, 1] + 1,
            2 * e[:, 2], 2 * e[:, 2] + 1,
            2 * mesh.n_edges + 2 * np.arange(mesh.n_cells),
            2 * mesh.n_edges + 2 * np.arange(mesh.n_cells) + 1,
        ])
        return Space(mesh, family, 2, dof_map,
                     2 * mesh.n_edges + 2 * mesh.n_cells, geo)
    raise SpaceError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# Raviart-Thomas construction via per-cell moment matrices
# ---------------------------------------------------------------------------

def _edge_frames(mesh: Mesh):
    """Canonical tangent/normal/length of every (sorted) edge."""
    a = mesh.vertices[mesh.edges[:, 0]]
    b = mesh.vertices[mesh.edges[:, 1]]
    seg = b - a
    length = np.hypot(seg[:, 0], seg[:, 1])
    t = seg / length[:, None]
    n = np.stack([t[:, 1], -t[:, 0]], axis=1)
    return a, t, n, length


def _rt_monomial_count(space):
    return 3 if space.family == "RT0" else 8


def _rt_mono_eval(xh, yh, scale, family):
    """Values (..., n_mono, 2) and divergences (..., n_mono) of the local
    monomial basis at scaled coordinates (xh, yh); scale is the per-cell
    length used in x_hat = (x - x_c)/scale."""
    shape = xh.shape
    one = np.ones(shape)
    zero = np.zeros(shape)
    if family == "RT0":
        comps = [(one, zero), (zero, one), (xh, yh)]
        divs = [zero, zero, 2.0 / scale * one]
    else:
        comps = [(one, zero), (zero, one),
                 (xh, zero), (zero, xh),
                 (yh, zero), (zero, yh),
                 (xh * xh, xh * yh), (xh * yh, yh * yh)]
        divs = [zero, zero, 1.0 / scale * one, zero, zero, 1.0 / scale * one,
                3.0 * xh / scale, 3.0 * yh / scale]
    vals = np.stack([np.stack(c, axis=-1) for c in comps], axis=-2)
    dv = np.stack(divs, axis=-1)
    return vals, dv


def _rt_monomials(space: Space, pts: np.ndarray):
    geo = space.geometry
    scale = np.sqrt(2.0 * geo.areas)
    xc = geo.centroids
    xh = (pts[..., 0] - xc[:, None, 0]) / scale[:, None]
    yh = (pts[..., 1] - xc[:, None, 1]) / scale[:, None]
    return _rt_mono_eval(xh, yh, scale[:, None, None], space.family)


def _rt_build_coefficients(space: Space) -> np.ndarray:
    """Per-cell matrix C with basis_j = sum_k C[k, j] * monomial_k, the basis
    being dual to the globally oriented edge (and interior) functionals."""
    mesh = space.mesh
    geo = space.geometry
    n_c = mesh.n_cells
    n_mono = _rt_monomial_count(space)
    rt1 = space.family == "RT1"

    ea, et, en, elen = _edge_frames(mesh)
    s_q, s_w = edge_rule(3)

    scale = np.sqrt(2.0 * geo.areas)
    D = np.zeros((n_c, n_mono, n_mono))

    for loc in range(3):
        eid = mesh.cell_edges[:, loc]
        # physical quadrature points on the edge, canonical parameterization
        pts = (ea[eid][:, None, :]
               + s_q[None, :, None] * (et[eid] * elen[eid][:, None])[:, None, :])
        xh = (pts[..., 0] - geo.centroids[:, None, 0]) / scale[:, None]
        yh = (pts[..., 1] - geo.centroids[:, None, 1]) / scale[:, None]
        vals, _ = _rt_mono_eval(xh, yh, scale[:, None, None], space.family)
        vn = np.einsum("cqmx,cx->cqm", vals, en[eid])      # v . n on edge
        m0 = elen[eid][:, None] * np.einsum("q,cqm->cm", s_w, vn)
        if not rt1:
            D[:, loc, :] = m0
        else:
            q1 = 2.0 * s_q - 1.0
            m1 = elen[eid][:, None] * np.einsum("q,cqm->cm", s_w * q1, vn)
            D[:, 2 * loc, :] = m0
            D[:, 2 * loc + 1, :] = m1

    if rt1:
        rule = triangle_rule(4)
        pts = geo.quad_points(rule)
        vals, _ = _rt_monomials(space, pts)
        wa = rule.weights[None, :, None] * geo.areas[:, None, None]
        D[:, 6, :] = np.sum(wa * vals[..., 0], axis=1)
        D[:, 7, :] = np.sum(wa * vals[..., 1], axis=1)

    return np.linalg.inv(D)


# ---------------------------------------------------------------------------
# Interpolation
# ---------------------------------------------------------------------------

def interpolate(space: Space, fn, t: float = 0.0):
    """Nodal/moment interpolant of an analytic function fn(x, y, t).

    fn returns shape (...,) for scalar spaces, (..., 2) for vector spaces and
    (..., 3) for 3-component tensor storage.
    """
    from .assembly import Field  # local import to avoid a cycle

    mesh = space.mesh
    if space.family in LAGRANGE_FAMILIES:
        if space.family == "P1":
            pts = mesh.vertices
        else:
            mids = 0.5 * (mesh.vertices[mesh.edges[:, 0]]
                          + mesh.vertices[mesh.edges[:, 1]])
            pts = np.vstack([mesh.vertices, mids])
        vals = np.asarray(fn(pts[:, 0], pts[:, 1], t), dtype=float)
        if space.components == 1:
            coeffs = vals.reshape(-1)
        else:
            coeffs = np.concatenate([vals[..., c] for c in range(space.components)])
        return Field(space, coeffs)

    # RT moments with the same functionals used to build the basis
    ea, et, en, elen = _edge_frames(mesh)
    s_q, s_w = edge_rule(3)
    pts = ea[:, None, :] + s_q[None, :, None] * (et * elen[:, None])[:, None, :]
    v = np.asarray(fn(pts[..., 0], pts[..., 1], t), dtype=float)
    vn = np.einsum("eqx,ex->eq", v, en)
    m0 = elen * np.einsum("q,eq->e", s_w, vn)
    if space.family == "RT0":
        return Field(space, m0)
    q1 = 2.0 * s_q - 1.0
    m1 = elen * np.einsum("q,eq->e", s_w * q1, vn)
    coeffs = np.zeros(space.n_dofs)
    coeffs[0:2 * mesh.n_edges:2] = m0
    coeffs[1:2 * mesh.n_edges:2] = m1
    rule = triangle_rule(4)
    geo = space.geometry
    xq = geo.quad_points(rule)
    vq = np.asarray(fn(xq[..., 0], xq[..., 1], t), dtype=float)
    wa = rule.weights[None, :] * geo.areas[:, None]
    base = 2 * mesh.n_edges
    coeffs[base + 0::2] = np.sum(wa * vq[..., 0], axis=1)
    coeffs[base + 1::2] = np.sum(wa * vq[..., 1], axis=1)
    return Field(space, coeffs)


def rt_interpolate_cellwise_constant(space: Space, cell_vals: np.ndarray):
    """RT interpolant of a cellwise-constant vector field (facet-mean flux).

    Normal moments take the mean of the two adjacent cell traces; interior
    RT1 moments integrate the cell value exactly.
    """
    from .assembly import Field

    mesh = space.mesh
    _, _, en, elen = _edge_frames(mesh)
    num = np.zeros(mesh.n_edges)
    cnt = np.zeros(mesh.n_edges)
    for loc in range(3):
        eid = mesh.cell_edges[:, loc]
        flux = np.einsum("cx,cx->c", cell_vals, en[eid])
        np.add.at(num, eid, flux)
        np.add.at(cnt, eid, 1.0)
    mean_flux = num / cnt
    m0 = elen * mean_flux
    if space.family == "RT0":
        return Field(space, m0)
    coeffs = np.zeros(space.n_dofs)
    coeffs[0:2 * mesh.n_edges:2] = m0
    base = 2 * mesh.n_edges
    coeffs[base + 0::2] = space.geometry.areas * cell_vals[:, 0]
    coeffs[base + 1::2] = space.geometry.areas * cell_vals[:, 1]
    return Field(space, coeffs)


def lagrange_average_cellwise(space: Space, cell_vals: np.ndarray):
    """Scalar Lagrange field with dof values averaged over incident cells.

    cell_vals has shape (n_cells,) (a cellwise-constant function).
    """
    from .assembly import Field

    if space.family not in LAGRANGE_FAMILIES or space.components != 1:
        raise SpaceError("lagrange_average_cellwise needs a scalar Lagrange space")
    num = np.zeros(space.n_scalar)
    cnt = np.zeros(space.n_scalar)
    dm = space.dof_map
    for loc in range(dm.shape[1]):
        np.add.at(num, dm[:, loc], cell_vals)
        np.add.at(cnt, dm[:, loc], 1.0)
    return Field(space, num / np.maximum(cnt, 1.0))
