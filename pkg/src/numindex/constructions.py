"""Builders for the structured spaces and operators used across the suite.

These are the concrete witnesses that drive the index estimates: coordinate
shifts on a two-dimensional absolute norm, block lifts of operators into
sums, the rank-two coupling operators that push the second index of a
Euclidean-plus-anything sum below one, and the finite model of vector-valued
continuous functions as a sup-type sum of Euclidean planes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spaces import (
    AbsoluteSum,
    ESum,
    Gauge2d,
    Lp,
    Space,
    SpaceValidationError,
    _norming_unit,
    _sum_parts,
    check_absolute,
    dual_norm,
    norm,
    space_dim,
)
from .operators import Operator, numerical_radius


def absolute_sum(left: Space, right: Space, outer: Space) -> AbsoluteSum:
    """``left + right`` normed by a 2-D absolute outer norm (validated)."""
    if space_dim(outer) != 2:
        raise SpaceValidationError("absolute_sum: outer norm must be 2-dimensional")
    check_absolute(outer)
    return AbsoluteSum(outer, left, right)


def esum(E: Space, summands) -> ESum:
    """Blockwise sum normed by an absolute norm on the block norms."""
    check_absolute(E)
    return ESum(E, tuple(summands))


def _outer_is_euclidean(outer: Space) -> bool:
    return isinstance(outer, Lp) and outer.p == 2.0


def lift_operator(T: Operator, sum_space: Space, block: int = 0) -> Operator:
    """Embed ``T`` as a diagonal block acting on one summand of a sum.

    Requires a non-Euclidean outer norm: only then is every skew-hermitian
    operator on the sum diagonal, which is what makes the lift preserve the
    distance to the skew-hermitian space.
    """
    parts = _sum_parts(sum_space)
    if parts is None:
        raise SpaceValidationError("lift_operator: target space is not a sum")
    outer, blocks = parts
    if _outer_is_euclidean(outer):
        raise SpaceValidationError(
            "lift_operator: refusing a Euclidean outer norm (skew-hermitian "
            "operators on such sums need not be diagonal)"
        )
    if not (0 <= block < len(blocks)):
        raise SpaceValidationError(f"lift_operator: no block {block}")
    if blocks[block] != T.space:
        raise SpaceValidationError(
            "lift_operator: operator space does not match the target block"
        )
    d = space_dim(sum_space)
    off = sum(space_dim(b) for b in blocks[:block])
    k = space_dim(blocks[block])
    M = np.zeros((d, d))
    M[off : off + k, off : off + k] = T.matrix
    return Operator(M, sum_space)


def _unit_and_functional(space: Space):
    """A convenient unit vector of ``space`` with its norming functional."""
    d = space_dim(space)
    u = np.zeros(d)
    u[0] = 1.0
    G, ok = _norming_unit(space, u[None, :], lenient=True)
    if not ok[0]:  # pragma: no cover - lenient mode always resolves
        raise SpaceValidationError("could not produce a norming functional")
    return u, G[0]


def sup_sum_witness(sum_space: AbsoluteSum) -> Operator:
    """Rank-two coupling operator on ``H (+)_inf W`` with Euclidean ``H``.

    Maps ``(y, w)`` to ``((y_1|y) y_1 + sqrt(2) w_1^*(w) y_2, 0)``; its
    numerical radius stays <= 3/2 while its distance to the skew-hermitian
    space is >= sqrt(3), which caps the second index at sqrt(3)/2.
    """
    if not isinstance(sum_space, AbsoluteSum):
        raise SpaceValidationError("sup_sum_witness: expected a two-block sum")
    outer, H, W = sum_space.outer, sum_space.left, sum_space.right
    if not (isinstance(outer, Lp) and math.isinf(outer.p)):
        raise SpaceValidationError("sup_sum_witness: outer norm must be the max norm")
    if not (isinstance(H, Lp) and H.p == 2.0 and H.dim >= 2):
        raise SpaceValidationError(
            "sup_sum_witness: left summand must be Euclidean of dimension >= 2"
        )
    hd, wd = H.dim, space_dim(W)
    _, wstar = _unit_and_functional(W)
    M = np.zeros((hd + wd, hd + wd))
    M[0, 0] = 1.0
    M[1, hd : hd + wd] = math.sqrt(2.0) * wstar
    return Operator(M, sum_space)


def l1_sum_witness(sum_space: AbsoluteSum) -> Operator:
    """Companion of :func:`sup_sum_witness` for the ``(+)_1`` sum.

    Maps ``(y, w)`` to ``((y_1|y) y_1, sqrt(2) (y_2|y) w_1)``.
    """
    if not isinstance(sum_space, AbsoluteSum):
        raise SpaceValidationError("l1_sum_witness: expected a two-block sum")
    outer, H, W = sum_space.outer, sum_space.left, sum_space.right
    if not (isinstance(outer, Lp) and outer.p == 1.0):
        raise SpaceValidationError("l1_sum_witness: outer norm must be the sum norm")
    if not (isinstance(H, Lp) and H.p == 2.0 and H.dim >= 2):
        raise SpaceValidationError(
            "l1_sum_witness: left summand must be Euclidean of dimension >= 2"
        )
    hd, wd = H.dim, space_dim(W)
    w1, _ = _unit_and_functional(W)
    M = np.zeros((hd + wd, hd + wd))
    M[0, 0] = 1.0
    M[hd : hd + wd, 1] = math.sqrt(2.0) * w1
    return Operator(M, sum_space)


@dataclass
class ShiftOperator:
    """Rank-one coordinate transfer ``e_source^* (x) e_target`` on a 2-D norm."""

    E: Space
    source: int
    target: int
    matrix: np.ndarray

    def as_operator(self) -> Operator:
        return Operator(self.matrix, self.E)


def shift_operator(E: Space, direction: str) -> ShiftOperator:
    """The coordinate shift on a 2-D absolute norm; always has norm one.

    ``direction`` is "12" (reads coordinate 1, writes coordinate 2) or "21".
    """
    if space_dim(E) != 2:
        raise SpaceValidationError("shift_operator: E must be 2-dimensional")
    check_absolute(E)
    if direction not in ("12", "21"):
        raise SpaceValidationError("shift_operator: direction must be '12' or '21'")
    source, target = (1, 2) if direction == "12" else (2, 1)
    M = np.zeros((2, 2))
    M[target - 1, source - 1] = 1.0
    return ShiftOperator(E=E, source=source, target=target, matrix=M)


def shift_bound_check(E: Space, budget: int = 20_000, seed: int = 0) -> dict:
    """Radius-vs-geometry consistency checks for the two shifts on ``E``.

    With ``k = min(v(U_12), v(U_21))`` the norm must satisfy
    ``max(|e_1+e_2|, |e_1^*+e_2^*|) >= 1 - sqrt(1-k^2) + k``; and with
    ``xi = |e_1+e_2|`` the one-norm is dominated by ``(3 - xi)`` times the
    norm.  Both are reported with their margins.
    """
    u12 = shift_operator(E, "12").as_operator()
    u21 = shift_operator(E, "21").as_operator()
    v12 = numerical_radius(u12, budget=budget, seed=seed).value
    v21 = numerical_radius(u21, budget=budget, seed=seed + 1).value
    k = min(v12, v21)
    ones = np.ones(2)
    xi = norm(E, ones)
    xi_dual = dual_norm(E, ones, budget=budget, seed=seed + 2)
    lhs = max(xi, xi_dual)
    rhs = 1.0 - math.sqrt(max(1.0 - k * k, 0.0)) + k
    rng = np.random.default_rng(seed + 3)
    pts = rng.standard_normal((256, 2))
    ratio = np.sum(np.abs(pts), axis=1) / np.asarray(
        [norm(E, p) for p in pts]
    )
    dom_margin = float((3.0 - xi) - np.max(ratio))
    return {
        "v12": v12,
        "v21": v21,
        "k": k,
        "unit_sum": xi,
        "dual_unit_sum": xi_dual,
        "lhs": lhs,
        "rhs": rhs,
        "margin": lhs - rhs,
        "one_norm_factor": 3.0 - xi,
        "one_norm_margin": dom_margin,
        "budget": budget,
        "seed": seed,
    }


def ck_model(m: int) -> ESum:
    """Continuous functions on ``m`` points with Euclidean-plane values."""
    if m < 2:
        raise SpaceValidationError("ck_model: need at least two points")
    return ESum(Lp(math.inf, m), tuple(Lp(2.0, 2) for _ in range(m)))


def ck_model_operator(m: int) -> Operator:
    """``(f, g) -> (f, sqrt(2) f(t_2))`` on the ``m``-point model.

    Coordinates are blocked per point as ``(f(t_i), g(t_i))``; the second
    output component is the constant function ``sqrt(2) f(t_2)``.
    """
    space = ck_model(m)
    M = np.zeros((2 * m, 2 * m))
    for i in range(m):
        M[2 * i, 2 * i] = 1.0
        M[2 * i + 1, 2] = math.sqrt(2.0)
    return Operator(M, space)


def seed_candidates(space: Space) -> list[np.ndarray]:
    """Structured matrices worth trying as index-search starting points."""
    d = space_dim(space)
    out = []
    if d >= 2:
        J = np.zeros((d, d))
        J[0, 1], J[1, 0] = 1.0, -1.0
        out.append(J)
        R = np.zeros((d, d))
        R[0, 1] = 1.0
        out.append(R)
    parts = _sum_parts(space)
    if parts is not None:
        outer, blocks = parts
        offs = np.cumsum([0] + [space_dim(b) for b in blocks])
        units = [_unit_and_functional(b) for b in blocks]
        for i in range(len(blocks)):
            for j in range(len(blocks)):
                if i == j:
                    continue
                # block-lifted coordinate shift: reads block j, writes block i
                M = np.zeros((d, d))
                yi, _ = units[i]
                _, gj = units[j]
                M[offs[i] : offs[i + 1], offs[j] : offs[j + 1]] = np.outer(yi, gj)
                out.append(M)
        if isinstance(outer, Lp) and isinstance(blocks[0], Lp) and blocks[0].p == 2.0:
            if blocks[0].dim >= 2 and len(blocks) == 2 and isinstance(space, AbsoluteSum):
                try:
                    if math.isinf(outer.p):
                        out.append(sup_sum_witness(space).matrix)
                    elif outer.p == 1.0:
                        out.append(l1_sum_witness(space).matrix)
                except SpaceValidationError:
                    pass
        if (
            isinstance(outer, Lp)
            and math.isinf(outer.p)
            and all(isinstance(b, Lp) and b.p == 2.0 and b.dim == 2 for b in blocks)
        ):
            out.append(ck_model_operator(len(blocks)).matrix)
    return out
