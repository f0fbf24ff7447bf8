"""Discrete fields (coefficient vectors over a Space) and point evaluation.

Evaluation returns arrays shaped (n_cells, n_q[, ...]) on a triangle
quadrature rule; these arrays are the common currency of assembly, norm
evaluation, and the majorant residuals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureRule
from .spaces import LAGRANGE_FAMILIES, RT_FAMILIES, Space, SpaceError


@dataclass
class Field:
    space: Space
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (self.space.n_dofs,):
            raise SpaceError(
                f"coefficient vector has length {self.coefficients.shape}, "
                f"space has {self.space.n_dofs} dofs")
        if not np.all(np.isfinite(self.coefficients)):
            raise SpaceError("non-finite coefficient")

    def copy(self) -> "Field":
        return Field(self.space, self.coefficients.copy())


def _gather(field: Field, comp: int) -> np.ndarray:
    space = field.space
    return field.coefficients[space.component_dofs(comp)]


def eval_scalar(field: Field, rule: QuadratureRule) -> np.ndarray:
    N, _ = field.space.lagrange_tables(rule)
    return np.einsum("cl,ql->cq", _gather(field, 0), N)


def eval_scalar_grad(field: Field, rule: QuadratureRule) -> np.ndarray:
    _, grads = field.space.lagrange_tables(rule)
    return np.einsum("cl,cqlx->cqx", _gather(field, 0), grads)


def eval_vector(field: Field, rule: QuadratureRule) -> np.ndarray:
    N, _ = field.space.lagrange_tables(rule)
    comps = [np.einsum("cl,ql->cq", _gather(field, c), N) for c in (0, 1)]
    return np.stack(comps, axis=-1)


def eval_vector_grad(field: Field, rule: QuadratureRule) -> np.ndarray:
    """grad[..., i, j] = d u_i / d x_j."""
    _, grads = field.space.lagrange_tables(rule)
    rows = [np.einsum("cl,cqlx->cqx", _gather(field, c), grads) for c in (0, 1)]
    return np.stack(rows, axis=-2)


def eval_vector_div(field: Field, rule: QuadratureRule) -> np.ndarray:
    g = eval_vector_grad(field, rule)
    return g[..., 0, 0] + g[..., 1, 1]


def eval_vector_strain(field: Field, rule: QuadratureRule) -> np.ndarray:
    g = eval_vector_grad(field, rule)
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def eval_rt(field: Field, rule: QuadratureRule) -> np.ndarray:
    vals, _ = field.space.rt_tables(rule)
    return np.einsum("cl,cqlx->cqx", field.coefficients[field.space.dof_map], vals)


def eval_rt_div(field: Field, rule: QuadratureRule) -> np.ndarray:
    _, divs = field.space.rt_tables(rule)
    return np.einsum("cl,cql->cq", field.coefficients[field.space.dof_map], divs)


def eval_tensor3(field: Field, rule: QuadratureRule) -> np.ndarray:
    """Symmetric tensor components (s11, s12, s22) at points: (n_c, n_q, 3)."""
    N, _ = field.space.lagrange_tables(rule)
    comps = [np.einsum("cl,ql->cq", _gather(field, c), N) for c in (0, 1, 2)]
    return np.stack(comps, axis=-1)


def eval_tensor3_div(field: Field, rule: QuadratureRule) -> np.ndarray:
    """Row-wise divergence of the symmetric tensor: (n_c, n_q, 2)."""
    _, grads = field.space.lagrange_tables(rule)
    g = [np.einsum("cl,cqlx->cqx", _gather(field, c), grads) for c in (0, 1, 2)]
    div_x = g[0][..., 0] + g[1][..., 1]
    div_y = g[1][..., 0] + g[2][..., 1]
    return np.stack([div_x, div_y], axis=-1)


def eval_field(field: Field, rule: QuadratureRule):
    """Value array with the natural shape for the field's space."""
    space = field.space
    if space.family in RT_FAMILIES:
        return eval_rt(field, rule)
    if space.components == 1:
        return eval_scalar(field, rule)
    if space.components == 2:
        return eval_vector(field, rule)
    return eval_tensor3(field, rule)


def zero_field(space: Space) -> Field:
    return Field(space, np.zeros(space.n_dofs))
