"""Operator norm and numerical radius estimation.

Estimates are honest about direction: sampled suprema are lower estimates,
refined by derivative-free ascent over the unit sphere; exact closed forms
(p in {1, 2, inf}) are flagged two-sided.  The numerical radius of ``T`` is
the supremum of ``|<x*, Tx>|`` over duality pairs ``(x, x*)`` with
``<x*, x> = 1``; sampling restricts to smooth points, whose norming
functionals the spaces module produces in closed form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .spaces import (
    DEAD_BLOCK,
    Lp,
    NumericalDiagnostic,
    Space,
    SpaceValidationError,
    _block_slices,
    _sum_parts,
    ascend_sphere,
    build_dual,
    duality_pairs,
    extreme_points,
    has_gauge,
    norm_many,
    sample_sphere,
    space_dim,
    space_from_json,
    space_to_json,
    structured_sphere_points,
)

DELTA_SMOOTH = 1e-6
DELTA_GAUGE = 1e-3


@dataclass
class Operator:
    matrix: np.ndarray
    space: Space

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        d = space_dim(self.space)
        if M.shape != (d, d):
            raise SpaceValidationError(
                f"operator matrix has shape {M.shape}, space has dimension {d}"
            )
        self.matrix = M


@dataclass
class Estimate:
    value: float
    direction: str  # "lower" | "upper" | "two_sided"
    witness: object = None
    budget: int = 0
    seed: int = 0
    details: dict = field(default_factory=dict)


def default_delta(space: Space) -> float:
    return DELTA_GAUGE if has_gauge(space) else DELTA_SMOOTH


def _is_hilbert(space: Space) -> bool:
    return isinstance(space, Lp) and space.p == 2.0


def _pure_lp(space: Space):
    return space.p if isinstance(space, Lp) else None


# ---------------------------------------------------------------------------
# Operator norm


def _op_norm_closed(T: Operator):
    p = _pure_lp(T.space)
    M = T.matrix
    if p == 2.0:
        u, s, vt = np.linalg.svd(M)
        return float(s[0]), vt[0]
    if p == 1.0:
        j = int(np.argmax(np.sum(np.abs(M), axis=0)))
        return float(np.sum(np.abs(M[:, j]))), np.eye(M.shape[0])[j]
    if p is not None and math.isinf(p):
        i = int(np.argmax(np.sum(np.abs(M), axis=1)))
        x = np.sign(M[i])
        x[x == 0] = 1.0
        return float(np.sum(np.abs(M[i]))), x
    return None


def _power_polish(T: Operator, X0: np.ndarray, iters: int = 30):
    """Alternating maximisation of ``||Tx||`` from the starts ``X0``.

    Alternates between the norming functional of the image and the extreme
    point attaining the pulled-back functional; each step is monotone, and
    on smooth norms this is the classical power method.
    """
    from .spaces import _norming_unit

    space = T.space
    dual = build_dual(space)
    M = T.matrix
    X = X0 / norm_many(space, X0)[:, None]
    best_val = norm_many(space, X @ M.T)
    best_X = X.copy()
    for _ in range(iters):
        TX = X @ M.T
        n_img = norm_many(space, TX)
        live = n_img > 1e-15
        if not live.any():
            break
        Y, _ = _norming_unit(space, TX[live] / n_img[live][:, None], True)
        F = Y @ M
        nf = norm_many(dual, F)
        ok = nf > 1e-15
        if not ok.any():
            break
        Xn, _ = _norming_unit(dual, F[ok] / nf[ok][:, None], True)
        Xn = Xn / norm_many(space, Xn)[:, None]
        rows = np.flatnonzero(live)[ok]
        X[rows] = Xn
        vals = norm_many(space, X @ M.T)
        better = vals > best_val
        best_val[better] = vals[better]
        best_X[better] = X[better]
        if not better.any():
            break
    return best_X, best_val


def op_norm(T: Operator, budget: int = 20_000, seed: int = 0) -> Estimate:
    """sup of ``||Tx||`` over the unit sphere.

    Exact for the three classical p-norms; otherwise sampled, polished by
    monotone alternating maximisation and refined by multi-start projected
    ascent (a lower estimate).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    closed = _op_norm_closed(T)
    if closed is not None:
        value, x = closed
        return Estimate(value, "two_sided", witness=x, budget=budget, seed=seed)
    space = T.space
    M = T.matrix

    def value_fn(X):
        Xn = X / norm_many(space, X)[:, None]
        return norm_many(space, Xn @ M.T)

    X = np.concatenate(
        [
            sample_sphere(space, budget, seed),
            structured_sphere_points(space, max(32, budget // 4), seed + 1),
            extreme_points(space, max(32, budget // 4), seed + 2),
        ]
    )
    vals = value_fn(X)
    n_starts = 16 if space_dim(space) < 4 else 24
    top = np.argsort(vals)[-n_starts:]
    Xp, fp = _power_polish(T, X[top])
    Xb, fb = ascend_sphere(value_fn, Xp, steps=200)
    k = int(np.argmax(fb))
    if fp[int(np.argmax(fp))] > fb[k]:
        k = int(np.argmax(fp))
        Xb, fb = Xp, fp
    w = Xb[k] / norm_many(space, Xb[k][None])[0]
    return Estimate(float(fb[k]), "lower", witness=w, budget=budget, seed=seed)


# ---------------------------------------------------------------------------
# Numerical radius


def _corner_boost(space: Space, U, G, TX):
    """Extra radius mass available at non-smooth sample points of a sum.

    Two sources, both of which keep ``(x, x*)`` a valid duality pair so the
    boosted value stays a certified lower bound: at a vanishing block the
    functional is free there up to the outer norm's one-sided derivative and
    can align with the operator image; at a block of norm one the functional
    concentrated on that block alone is also norming, so every such vertex of
    the subdifferential gets enumerated.
    """
    from .spaces import _norming_unit

    if isinstance(space, Lp) and space.dim > 1:
        if space.p == 1.0:
            # signs of the functional are free on zero coordinates
            dead = np.abs(U) <= DEAD_BLOCK
            signed = np.einsum("ij,ij->i", G, TX)
            core = signed - np.sum(np.where(dead, G * TX, 0.0), axis=1)
            return np.abs(core) + np.sum(np.where(dead, np.abs(TX), 0.0), axis=1)
        if math.isinf(space.p):
            # every coordinate at height one carries a norming functional
            ties = np.abs(U) >= 1.0 - 1e-12
            vertex = np.max(np.where(ties, np.abs(TX), -np.inf), axis=1)
            return np.maximum(np.abs(np.einsum("ij,ij->i", G, TX)), vertex)
        return None
    parts = _sum_parts(space)
    if parts is None:
        return None
    outer, _ = parts
    slices = _block_slices(space)
    A = np.column_stack([norm_many(blk, U[:, lo:hi]) for lo, hi, blk in slices])
    dead = A <= DEAD_BLOCK
    signed = np.einsum("ij,ij->i", G, TX)
    boost = np.abs(signed)
    step = 1e-7
    for j, (lo, hi, blk) in enumerate(slices):
        rj = dead[:, j]
        if rj.any():
            Aj = A[rj].copy()
            Aj[:, j] += step
            h = (norm_many(outer, Aj) - 1.0) / step
            img = norm_many(blk, TX[rj, lo:hi])
            boost[rj] += np.maximum(h, 0.0) * img
        full = A[:, j] >= 1.0 - 1e-12
        if full.any():
            Gb, okb = _norming_unit(blk, U[full, lo:hi] / A[full, j][:, None], True)
            if has_gauge(blk):
                dn = norm_many(build_dual(blk), Gb)
                dn[dn <= 0] = 1.0
                Gb = Gb / dn[:, None]
                okb &= np.einsum("ij,ij->i", Gb, U[full, lo:hi]) >= 1.0 - 1e-3
            vertex = np.abs(np.einsum("ij,ij->i", Gb, TX[full, lo:hi]))
            vertex[~okb] = -np.inf
            boost[full] = np.maximum(boost[full], vertex)
    return boost


def _aligned_block_points(T: Operator, count: int, seed: int):
    """Sum-sphere points tuned to the operator's cross-block action.

    For blocks i != j, pairs a block-i sphere sample ``y`` with the block-j
    vector best aligned with ``T``'s (i,j) cross term against the norming
    functional of ``y``; at max-type outer norms these are exactly the
    corners where the radius supremum lives.
    """
    from .spaces import _norming_unit

    space = T.space
    slices = _block_slices(space)
    if slices is None or len(slices) < 2:
        return None
    d = space_dim(space)
    k = len(slices)
    n = max(8, count // (k * (k - 1)))
    out = []
    for i, (lo_i, hi_i, blk_i) in enumerate(slices):
        Y = sample_sphere(blk_i, n, seed + 31 * i)
        Gi, oki = _norming_unit(blk_i, Y, True)
        for j, (lo_j, hi_j, blk_j) in enumerate(slices):
            if i == j:
                continue
            F = Gi @ T.matrix[lo_i:hi_i, lo_j:hi_j]
            dual_j = build_dual(blk_j)
            nf = norm_many(dual_j, F)
            ok = oki & (nf > 1e-12)
            if not ok.any():
                continue
            W, okw = _norming_unit(dual_j, F[ok] / nf[ok][:, None], True)
            X = np.zeros((int(ok.sum()), d))
            X[:, lo_i:hi_i] = Y[ok]
            # both signs: the cross term must be free to reinforce or oppose
            # the diagonal term
            X[:, lo_j:hi_j] = W
            out.append(X[okw].copy())
            X[:, lo_j:hi_j] = -W
            out.append(X[okw])
    if not out:
        return None
    X = np.concatenate(out)
    return X / norm_many(space, X)[:, None]


def _block_corner_ascent(T: Operator, count: int, seed: int):
    """Optimised single-block corner points for the radius of a sum.

    Restricted to an embedded block sphere the (boosted) pair value is
    ``|<y°, T_ii y>| + sum_j h_ij ||T_ji y||_j`` with constant one-sided
    outer derivatives ``h_ij``, so it can be ascended directly inside the
    block; the resulting corners feed the main estimator.
    """
    from .spaces import _norming_unit

    space = T.space
    slices = _block_slices(space)
    if slices is None:
        return None
    outer, _ = parts = _sum_parts(space)
    k = len(slices)
    d = space_dim(space)
    out = []
    for i, (lo_i, hi_i, blk_i) in enumerate(slices):
        h = np.zeros(k)
        for j in range(k):
            if j == i:
                continue
            a = np.zeros(k)
            a[i] = 1.0
            a[j] = 1e-7
            h[j] = max((float(norm_many(outer, a[None])[0]) - 1.0) / 1e-7, 0.0)
        Tii = T.matrix[lo_i:hi_i, lo_i:hi_i]

        def value_fn(Y, i=i, h=h, Tii=Tii, blk_i=blk_i):
            Yn = Y / norm_many(blk_i, Y)[:, None]
            G, _ = _norming_unit(blk_i, Yn, True)
            vals = np.abs(np.einsum("ij,ij->i", G, Yn @ Tii.T))
            for j, (lo_j, hi_j, blk_j) in enumerate(slices):
                if j == i or h[j] == 0.0:
                    continue
                Tji = T.matrix[lo_j:hi_j, slices[i][0] : slices[i][1]]
                vals = vals + h[j] * norm_many(blk_j, Yn @ Tji.T)
            return vals

        Y = sample_sphere(blk_i, max(32, count // k), seed + 7 * i)
        vals = value_fn(Y)
        top = Y[np.argsort(vals)[-6:]]
        Yb, _ = ascend_sphere(value_fn, top, steps=80)
        emb = np.zeros((Yb.shape[0] + top.shape[0], d))
        emb[: Yb.shape[0], lo_i:hi_i] = Yb / norm_many(blk_i, Yb)[:, None]
        emb[Yb.shape[0] :, lo_i:hi_i] = top
        out.append(emb)
    return np.concatenate(out)


def _lp_sign_candidates(T: Operator):
    """Operator-aligned sup-norm sphere points realising the row sums."""
    space = T.space
    if not (isinstance(space, Lp) and math.isinf(space.p) and space.dim > 1):
        return None
    M = T.matrix
    out = []
    for j in range(space.dim):
        x = np.sign(M[j])
        x[x == 0] = 1.0
        x[j] = np.sign(M[j, j]) or 1.0
        out.append(x)
    return np.asarray(out)


def _radius_values(T: Operator, X, delta, rng, collect=False):
    U, G, gap, ok = duality_pairs(T.space, X, delta, rng)
    TX = U @ T.matrix.T
    vals = np.abs(np.einsum("ij,ij->i", G, TX))
    boosted = _corner_boost(T.space, U, G, TX)
    if boosted is not None:
        vals = np.maximum(vals, boosted)
    vals[~ok] = -np.inf
    if collect:
        return vals, U, G, ok
    return vals, ok


def _witness_pair(T: Operator, x, delta, rng):
    """The duality pair achieving the (possibly corner-boosted) value at x."""
    from .spaces import _norming_unit

    space = T.space
    U, G, gap, ok = duality_pairs(space, np.atleast_2d(x), delta, rng)
    if not ok[0]:
        return None
    u, g = U[0], G[0].copy()
    tx = T.matrix @ u
    signed = float(g @ tx)
    value = abs(signed)
    if isinstance(space, Lp) and space.dim > 1:
        if space.p == 1.0:
            dead = np.abs(u) <= DEAD_BLOCK
            core = signed - float(np.sum(g[dead] * tx[dead]))
            s = 1.0 if core >= 0 else -1.0
            g[dead] = s * np.sign(tx[dead])
            g[dead & (tx == 0)] = s
            value = abs(core) + float(np.sum(np.abs(tx[dead])))
        elif math.isinf(space.p):
            ties = np.where(np.abs(u) >= 1.0 - 1e-12)[0]
            j = ties[np.argmax(np.abs(tx[ties]))]
            if abs(tx[j]) > value:
                value = abs(float(tx[j]))
                g = np.zeros_like(u)
                g[j] = 1.0 if u[j] >= 0 else -1.0
        return u, g, value
    slices = _block_slices(space)
    parts = _sum_parts(space)
    if parts is not None:
        outer, _ = parts
        A = np.array([norm_many(blk, u[None, lo:hi])[0] for lo, hi, blk in slices])
        sign = 1.0 if signed >= 0 else -1.0
        step = 1e-7
        for j, (lo, hi, blk) in enumerate(slices):
            if A[j] > DEAD_BLOCK:
                continue
            img = float(norm_many(blk, tx[None, lo:hi])[0])
            if img < 1e-15:
                continue
            Aj = A.copy()
            Aj[j] += step
            h = (float(norm_many(outer, Aj[None])[0]) - 1.0) / step
            if h <= 0:
                continue
            wstar, wok = _norming_unit(blk, (tx[lo:hi] / img)[None], lenient=True)
            if not wok[0]:
                continue
            g[lo:hi] = sign * h * wstar[0]
            value += h * img
        # functionals concentrated on a block of norm one are norming too
        for j, (lo, hi, blk) in enumerate(slices):
            if A[j] < 1.0 - 1e-12:
                continue
            Gb, okb = _norming_unit(blk, (u[lo:hi] / A[j])[None], lenient=True)
            if not okb[0]:
                continue
            vertex = abs(float(Gb[0] @ tx[lo:hi]))
            if vertex > value:
                value = vertex
                g = np.zeros_like(u)
                g[lo:hi] = Gb[0]
    if has_gauge(space):
        dn = float(norm_many(build_dual(space), g[None])[0])
        if dn > 0:
            g = g / dn
            value = abs(float(g @ tx))
    return u, g, value


def numerical_radius(
    T: Operator,
    budget: int = 20_000,
    seed: int = 0,
    delta: float | None = None,
    refine: bool = True,
) -> Estimate:
    """Lower estimate of the numerical radius by sampling duality pairs.

    Vectors whose norming functional cannot be resolved are perturbed and
    retried; if most of the sample stays unresolved the norm is too
    degenerate to certify and a :class:`NumericalDiagnostic` is raised.
    """
    if delta is None:
        delta = default_delta(T.space)
    if not (0.0 <= delta <= 0.1):
        raise ValueError("delta must lie in [0, 0.1]")
    delta = max(delta, 1e-12)
    space = T.space
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
    parts = [
        sample_sphere(space, budget, seed),
        structured_sphere_points(space, max(32, budget // 8), seed + 1),
    ]
    aligned = _aligned_block_points(T, max(64, budget // 8), seed + 2)
    if aligned is not None:
        parts.append(aligned)
    corners = _block_corner_ascent(T, max(64, budget // 16), seed + 3)
    if corners is not None:
        parts.append(corners)
    signs = _lp_sign_candidates(T)
    if signs is not None:
        parts.append(signs)
    X = np.concatenate(parts)
    vals, U, G, ok = _radius_values(T, X, delta, rng, collect=True)
    if np.mean(ok) < 0.5:
        raise NumericalDiagnostic(
            "numerical_radius: norming functionals unresolved on more than "
            "half of the sample; the norm looks degenerate at this budget"
        )
    order = np.argsort(vals)
    best = order[-1]
    value = float(vals[best])
    pair = _witness_pair(T, U[best], delta, rng)
    witness = (pair[0], pair[1]) if pair is not None else None
    if refine:

        def value_fn(Y):
            v, _ = _radius_values(T, Y, delta, rng)
            return v

        n_starts = 12 if space_dim(space) < 4 else 24
        starts = X[order[-n_starts:]]
        Xb, fb = ascend_sphere(value_fn, starts, steps=160)
        k = int(np.argmax(fb))
        if fb[k] > value:
            pair = _witness_pair(T, Xb[k], delta, rng)
            if pair is not None and pair[2] > value:
                value = float(pair[2])
                witness = (pair[0], pair[1])
    return Estimate(
        value,
        "lower",
        witness=witness,
        budget=budget,
        seed=seed,
        details={"delta": delta},
    )


def numerical_radius_closed(T: Operator):
    """Exact numerical radius for the three classical p-norms, else None.

    p=2: largest absolute eigenvalue of the symmetric part; p=inf / p=1:
    the largest absolute-diagonal-plus-off-row (resp. off-column) sum, the
    value the coordinate/sign norming functionals produce at smooth points.
    """
    p = _pure_lp(T.space)
    M = T.matrix
    if p == 2.0:
        ev = np.linalg.eigvalsh((M + M.T) / 2.0)
        return float(np.max(np.abs(ev)))
    if p is not None and math.isinf(p):
        off = np.sum(np.abs(M), axis=1) - np.abs(np.diag(M))
        return float(np.max(np.abs(np.diag(M)) + off))
    if p == 1.0:
        off = np.sum(np.abs(M), axis=0) - np.abs(np.diag(M))
        return float(np.max(np.abs(np.diag(M)) + off))
    return None


def adjoint(T: Operator) -> Operator:
    """The transpose matrix acting on the structural dual space."""
    return Operator(T.matrix.T.copy(), build_dual(T.space))


# ---------------------------------------------------------------------------
# JSON / CSV I/O


def operator_to_json(T: Operator) -> dict:
    return {"matrix": T.matrix.tolist(), "space": space_to_json(T.space)}


def operator_from_json(obj) -> Operator:
    if not isinstance(obj, dict) or "matrix" not in obj or "space" not in obj:
        raise SpaceValidationError("operator JSON needs 'matrix' and 'space' fields")
    space = space_from_json(obj["space"], "$.space")
    try:
        M = np.asarray(obj["matrix"], dtype=float)
    except (TypeError, ValueError):
        raise SpaceValidationError("$.matrix: expected a rectangular numeric array") from None
    if M.ndim != 2:
        raise SpaceValidationError("$.matrix: expected a 2-D array")
    return Operator(M, space)


def load_operator(text: str, space: Space | None = None) -> Operator:
    """Operator from JSON text, or from CSV rows when ``space`` is supplied."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpaceValidationError(f"invalid JSON on line {e.lineno}: {e.msg}") from None
        return operator_from_json(obj)
    if space is None:
        raise SpaceValidationError("CSV matrices need a sidecar space file")
    rows = [r for r in stripped.splitlines() if r.strip()]
    try:
        M = np.asarray([[float(v) for v in r.split(",")] for r in rows])
    except ValueError:
        raise SpaceValidationError("CSV matrix contains a non-numeric entry") from None
    return Operator(M, space)
