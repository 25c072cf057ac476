"""Order-condition verification for both method families.

Every condition is a rooted-tree contraction: a product of coupling factors
``alpha_{pq}``, ``beta_{pq}`` or ``w_{pq}`` summed against the solution
weights over all stage indices, which must equal a rational number.  The
evaluator walks each tree bottom-up, so a condition with thirteen bound
indices costs a handful of matrix-vector products instead of an
s**13 summation.

Residual tables come back wrapped in :class:`ConditionReport`, which knows
the order label of every condition and derives the attained order at a
given tolerance.  The report can also restrict itself to the conditions
free of ``w`` factors: those are exactly the classical Runge-Kutta
conditions that govern the order on pure ODEs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._conditions_data import (
    HALF_EXPLICIT_CONDITIONS,
    HALF_EXPLICIT_ORDER_STARTS,
    ROW_CONDITIONS,
    ROW_ORDER_STARTS,
)
from .errors import InvariantError
from .tableau import RowTableau

__all__ = [
    "Condition",
    "ConditionReport",
    "row_condition_residuals",
    "half_explicit_condition_residuals",
    "simplifying_residuals",
    "stability_function",
    "r_infinity",
]

_MATRIX_NAMES = {"a": "alpha", "b": "beta", "w": "w"}


def _parse_tree(factors: str):
    """Token string -> tuple of (matrix letter, parent node id).

    Node 0 is the root (bound to letter ``i``); each factor appends one
    node.  A factor's parent letter refers to the most recently created
    node bound to that letter, so repeated child letters denote fresh,
    independent branches.
    """
    nodes = []
    bound = {"i": 0}
    for tok in factors.split():
        if len(tok) != 3 or tok[0] not in _MATRIX_NAMES:
            raise ValueError(f"malformed factor {tok!r} in {factors!r}")
        mat, p, q = tok
        if p not in bound:
            raise ValueError(f"unbound parent letter {p!r} in {factors!r}")
        nodes.append((mat, bound[p]))
        bound[q] = len(nodes)  # node ids are offset by 1 (root is 0)
    return tuple(nodes)


@dataclass(frozen=True)
class Condition:
    """One order condition: weighted tree contraction equals ``rhs``."""

    index: int
    order: int
    factors: str
    rhs: Fraction
    tree: tuple

    def display(self) -> str:
        if not self.factors:
            body = ""
        else:
            body = " " + " ".join(
                f"{_MATRIX_NAMES[t[0]]}_{t[1]}{t[2]}" for t in self.factors.split()
            )
        return f"sum b_i{body} = {self.rhs}"

    @property
    def uses_w(self) -> bool:
        return any(t[0] == "w" for t in self.factors.split())


def _build(table, starts):
    out = []
    order = 0
    for idx, (factors, num, den) in enumerate(table, start=1):
        while order < len(starts) - 1 and idx >= starts[order]:
            order += 1
        out.append(
            Condition(
                index=idx,
                order=order,
                factors=factors,
                rhs=Fraction(num, den),
                tree=_parse_tree(factors),
            )
        )
    return tuple(out)


ROW_TABLE = _build(ROW_CONDITIONS, ROW_ORDER_STARTS)
HALF_EXPLICIT_TABLE = _build(HALF_EXPLICIT_CONDITIONS, HALF_EXPLICIT_ORDER_STARTS)


def _evaluate(cond: Condition, weights, matrices) -> float:
    """Left-hand side of one condition via bottom-up contraction."""
    nnodes = len(cond.tree) + 1
    children = [[] for _ in range(nnodes)]
    for nid, (mat, parent) in enumerate(cond.tree, start=1):
        children[parent].append((mat, nid))
    s = len(weights)
    phi = [None] * nnodes
    for nid in range(nnodes - 1, -1, -1):
        acc = np.ones(s)
        for mat, child in children[nid]:
            acc = acc * (matrices[mat] @ phi[child])
        phi[nid] = acc
    return float(weights @ phi[0])


def _matrices(t: RowTableau):
    return {"a": t.alpha, "b": t.beta, "w": t.w}


def _residuals(table, t, weights):
    weights = t.b if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != (t.s,):
        raise InvariantError(f"weights must have shape ({t.s},), got {weights.shape}")
    mats = _matrices(t)
    vals = np.array([_evaluate(c, weights, mats) for c in table])
    rhs = np.array([float(c.rhs) for c in table])
    return vals - rhs


@dataclass(frozen=True)
class ConditionReport:
    """Signed defects of all conditions of one family for one weight set."""

    family: str
    conditions: tuple
    defects: np.ndarray
    weights_label: str = "b"

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(self.defects)

    def attained_order(self, tol: float = 1e-9, ode_only: bool = False) -> int:
        """Largest p such that every condition of order <= p has residual
        <= tol; ``ode_only`` restricts to the w-free (classical) subset."""
        res = self.residuals
        attained = 0
        max_order = self.conditions[-1].order
        for p in range(1, max_order + 1):
            sel = [
                r
                for c, r in zip(self.conditions, res)
                if c.order == p and not (ode_only and c.uses_w)
            ]
            if all(r <= tol for r in sel):
                attained = p
            else:
                break
        return attained

    def max_by_order(self, ode_only: bool = False) -> dict:
        out: dict = {}
        for c, r in zip(self.conditions, self.residuals):
            if ode_only and c.uses_w:
                continue
            out[c.order] = max(out.get(c.order, 0.0), r)
        return out

    def worst(self, order: int | None = None):
        """(condition, residual) with the largest residual, optionally
        within one order block."""
        best = None
        for c, r in zip(self.conditions, self.residuals):
            if order is not None and c.order != order:
                continue
            if best is None or r > best[1]:
                best = (c, r)
        return best


def row_condition_residuals(t: RowTableau, weights=None) -> ConditionReport:
    """Evaluate all 130 mass-matrix-family conditions (orders 1-6).

    ``weights`` defaults to ``t.b``; pass ``t.bhat`` to check the embedded
    scheme.  Works for any tableau whose ``beta`` matrix is invertible.
    """
    label = "b" if weights is None else "custom"
    return ConditionReport(
        family="row",
        conditions=ROW_TABLE,
        defects=_residuals(ROW_TABLE, t, weights),
        weights_label=label,
    )


def half_explicit_condition_residuals(t: RowTableau, weights=None) -> ConditionReport:
    """Evaluate all 63 half-explicit-family conditions (orders 1-5)."""
    label = "b" if weights is None else "custom"
    return ConditionReport(
        family="half_explicit",
        conditions=HALF_EXPLICIT_TABLE,
        defects=_residuals(HALF_EXPLICIT_TABLE, t, weights),
        weights_label=label,
    )


def simplifying_residuals(t: RowTableau) -> np.ndarray:
    """Defects ``|sum_j w_ij alpha_j**2 - 2 alpha_i|`` for stages i >= 2.

    These measure the simplifying assumption that collapses many
    higher-order conditions; the first stage is excluded because its
    abscissa is zero.
    """
    c = t.alpha_sums
    return np.abs(t.w @ c**2 - 2.0 * c)[1:]


def stability_function(t: RowTableau, z):
    """Linear-stability function R(z) = 1 + z b^T (I - z beta)^{-1} 1.

    Accepts scalar or array ``z``, real or complex.  Raises
    :class:`~rowdae.errors.SingularMatrix` at the poles.
    """
    from .errors import SingularMatrix

    B = t.beta
    eye = np.eye(t.s)
    one = np.ones(t.s)

    def _scalar(zz):
        try:
            x = np.linalg.solve(eye - zz * B, one)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix(f"I - z*beta singular at z = {zz}") from exc
        return 1.0 + zz * (t.b @ x)

    z = np.asarray(z)
    if z.ndim == 0:
        return _scalar(complex(z) if np.iscomplexobj(z) else float(z))
    return np.array([_scalar(zz) for zz in z.ravel()]).reshape(z.shape)


def r_infinity(t: RowTableau) -> float:
    """|R(infinity)| = |1 - b^T beta^{-1} 1|; zero for stiffly accurate
    tableaus."""
    return float(abs(1.0 - t.b @ (t.w @ np.ones(t.s))))
