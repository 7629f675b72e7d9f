"""Finite-dimensional real normed spaces and their duality machinery.

A space is described by a small immutable tree:

* ``Lp(p, dim)`` -- the classical p-norms, ``1 <= p <= inf``;
* ``Gauge2d(radii)`` -- a two-dimensional absolute norm given by the boundary
  radius of its unit ball at 512 uniform angles in ``[0, pi/2]``, extended to
  the plane by sign symmetry and evaluated through a cubic-spline interpolant;
* ``AbsoluteSum(outer, left, right)`` -- ``norm(y, w) = outer(norm(y), norm(w))``
  for a two-dimensional absolute outer norm;
* ``ESum(E, summands)`` -- the same composition rule over any number of blocks.

On top of the norms the module provides unit-sphere sampling, norming
functionals (gradients of the norm at smooth points), dual norms and
structural duals, all fully vectorised over batches of vectors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import ConvexHull

GAUGE_ANGLES = 512
_THETA = np.linspace(0.0, math.pi / 2, GAUGE_ANGLES)

# Tolerances for validating user-supplied gauge tables.
_GAUGE_ENDPOINT_TOL = 1e-9
_GAUGE_MONOTONE_TOL = 1e-9
_GAUGE_CONVEXITY_DEFECT = 5e-3

# A sum block below this norm is treated as identically zero everywhere
# (norming functionals and corner handling must agree on this).
DEAD_BLOCK = 1e-13


class SpaceValidationError(ValueError):
    """A space description violates its structural invariants."""


class NonSmoothPoint(RuntimeError):
    """The norm is not differentiable at the requested point.

    Callers are expected to perturb the point slightly and retry; smooth
    points are dense on the unit sphere of every norm considered here.
    """


class NumericalDiagnostic(RuntimeError):
    """A computation could not be resolved at the requested budget."""


# ---------------------------------------------------------------------------
# Space descriptions


@dataclass(frozen=True)
class Lp:
    p: float
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise SpaceValidationError(f"lp: dim must be >= 1, got {self.dim}")
        if not (1.0 <= self.p or math.isinf(self.p)):
            raise SpaceValidationError(f"lp: p must lie in [1, inf], got {self.p}")


@dataclass(eq=False)
class Gauge2d:
    """2-D absolute norm from a positive-quadrant boundary-radius table."""

    radii: np.ndarray
    # Derived tables produced by build_dual may carry spline-level convexity
    # wiggle near corners of the true dual ball; they skip the strict check.
    trusted: bool = False
    _spline: CubicSpline = field(init=False, repr=False)
    _dspline: CubicSpline = field(init=False, repr=False)
    _dual: "Gauge2d | None" = field(default=None, init=False, repr=False)

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.shape != (GAUGE_ANGLES,):
            raise SpaceValidationError(
                f"gauge2d: expected {GAUGE_ANGLES} radius samples, got shape {r.shape}"
            )
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise SpaceValidationError("gauge2d: radii must be finite and positive")
        if abs(r[0] - 1.0) > _GAUGE_ENDPOINT_TOL or abs(r[-1] - 1.0) > _GAUGE_ENDPOINT_TOL:
            raise SpaceValidationError(
                "gauge2d: table is not normalized (unit vectors must have norm 1)"
            )
        self.radii = r
        self.radii.flags.writeable = False
        self._spline = CubicSpline(_THETA, r, bc_type="not-a-knot")
        self._dspline = self._spline.derivative()
        self._validate_boundary()

    @property
    def dim(self) -> int:
        return 2

    def _boundary_points(self, n: int = 4 * GAUGE_ANGLES) -> np.ndarray:
        th = np.linspace(0.0, math.pi / 2, n)
        r = self._spline(th)
        return np.column_stack([r * np.cos(th), r * np.sin(th)])

    def _validate_boundary(self):
        pts = self._boundary_points()
        # Derived tables (support functions of kinked balls) carry spline
        # wiggle of order 1e-3 near corners; loosen their tolerances.
        slack = 5e-3 if self.trusted else 1e-6
        mono = 1e-3 if self.trusted else _GAUGE_MONOTONE_TOL
        # The l1 <= . <= linf sandwich pins the radius between the two balls.
        th = np.linspace(0.0, math.pi / 2, pts.shape[0])
        r = np.hypot(pts[:, 0], pts[:, 1])
        r_l1 = 1.0 / (np.cos(th) + np.sin(th))
        r_linf = 1.0 / np.maximum(np.cos(th), np.sin(th))
        if np.any(r < r_l1 - slack) or np.any(r > r_linf + slack):
            raise SpaceValidationError(
                "gauge2d: radii leave the l1/linf sandwich; the table is not "
                "the boundary of a normalized absolute norm"
            )
        # Absoluteness forces the positive-quadrant boundary to be monotone:
        # x decreasing and y increasing with the angle.
        if np.any(np.diff(pts[:, 0]) > mono) or np.any(np.diff(pts[:, 1]) < -mono):
            raise SpaceValidationError("gauge2d: boundary table is not monotone")
        if not self.trusted:
            # Approximate convexity: radial defect against the convex hull.
            full = np.concatenate(
                [pts, pts[::-1] * [-1, 1], pts * [-1, -1], pts[::-1] * [1, -1]]
            )
            hull = ConvexHull(full)
            eq = hull.equations  # rows (a, b, c): a x + b y + c <= 0 inside
            dist = full @ eq[:, :2].T + eq[:, 2]
            # distance of each sample to the hull boundary; convex tables sit on it
            defect = float(-np.min(np.max(dist, axis=1)))
            if defect > _GAUGE_CONVEXITY_DEFECT:
                raise SpaceValidationError(
                    f"gauge2d: boundary is not convex (defect {defect:.2e}); "
                    "the table does not define a norm"
                )

    def boundary_radius(self, theta):
        return self._spline(theta)

    def __eq__(self, other):
        return isinstance(other, Gauge2d) and np.array_equal(self.radii, other.radii)


@dataclass(frozen=True)
class AbsoluteSum:
    outer: "Space"
    left: "Space"
    right: "Space"

    def __post_init__(self):
        if space_dim(self.outer) != 2:
            raise SpaceValidationError("absolute_sum: outer norm must be 2-dimensional")
        check_absolute(self.outer)
        object.__setattr__(self, "_dual", None)

    @property
    def dim(self) -> int:
        return space_dim(self.left) + space_dim(self.right)


@dataclass(frozen=True)
class ESum:
    E: "Space"
    summands: tuple

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        if len(self.summands) != space_dim(self.E):
            raise SpaceValidationError(
                f"esum: {len(self.summands)} summands but outer norm has "
                f"dimension {space_dim(self.E)}"
            )
        check_absolute(self.E)
        object.__setattr__(self, "_dual", None)

    @property
    def dim(self) -> int:
        return sum(space_dim(s) for s in self.summands)


Space = Lp | Gauge2d | AbsoluteSum | ESum


def real_line() -> Lp:
    """The one-dimensional space (all p-norms coincide)."""
    return Lp(2.0, 1)


def space_dim(space: Space) -> int:
    return space.dim


def _sum_parts(space):
    """(outer, [blocks]) for the two composite kinds, else None."""
    if isinstance(space, AbsoluteSum):
        return space.outer, [space.left, space.right]
    if isinstance(space, ESum):
        return space.E, list(space.summands)
    return None


def has_gauge(space: Space) -> bool:
    if isinstance(space, Gauge2d):
        return True
    parts = _sum_parts(space)
    if parts is None:
        return False
    outer, blocks = parts
    return has_gauge(outer) or any(has_gauge(b) for b in blocks)


def check_absolute(space: Space, seed: int = 0, tol: float = 1e-9):
    """Verify by evaluation that a space carries a normalized absolute norm."""
    d = space_dim(space)
    eye = np.eye(d)
    en = norm_many(space, eye)
    if np.any(np.abs(en - 1.0) > tol):
        raise SpaceValidationError(
            f"norm is not normalized on unit vectors (got {en})"
        )
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((32, d))
    base = norm_many(space, x)
    flipped = norm_many(space, np.abs(x))
    if np.any(np.abs(base - flipped) > tol * np.maximum(base, 1.0)):
        raise SpaceValidationError("norm is not absolute (sign flips change it)")


# ---------------------------------------------------------------------------
# Norm evaluation


def norm_many(space: Space, X: np.ndarray) -> np.ndarray:
    """Norms of the rows of ``X``; the workhorse behind everything else."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != space_dim(space):
        raise SpaceValidationError(
            f"dimension mismatch: vectors have {X.shape[1]} coordinates, "
            f"space has dimension {space_dim(space)}"
        )
    if isinstance(space, Lp):
        if math.isinf(space.p):
            return np.max(np.abs(X), axis=1)
        if space.p == 1.0:
            return np.sum(np.abs(X), axis=1)
        if space.p == 2.0:
            return np.sqrt(np.einsum("ij,ij->i", X, X))
        return np.sum(np.abs(X) ** space.p, axis=1) ** (1.0 / space.p)
    if isinstance(space, Gauge2d):
        a = np.abs(X)
        rho = np.hypot(a[:, 0], a[:, 1])
        theta = np.arctan2(a[:, 1], a[:, 0])
        r = space.boundary_radius(theta)
        out = np.zeros_like(rho)
        nz = rho > 0
        out[nz] = rho[nz] / r[nz]
        return out
    outer, blocks = _sum_parts(space)
    cols = []
    off = 0
    for b in blocks:
        d = space_dim(b)
        cols.append(norm_many(b, X[:, off : off + d]))
        off += d
    return norm_many(outer, np.column_stack(cols))


def norm(space: Space, x) -> float:
    return float(norm_many(space, np.asarray(x, dtype=float)[None, :])[0])


# ---------------------------------------------------------------------------
# Sphere sampling


def sample_sphere(space: Space, count: int, seed: int) -> np.ndarray:
    """Deterministic unit-sphere sample: Gaussian directions, radial rescale."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    d = space_dim(space)
    X = rng.standard_normal((count, d))
    n = norm_many(space, X)
    while np.any(n == 0):  # pragma: no cover - probability zero
        bad = n == 0
        X[bad] = rng.standard_normal((int(bad.sum()), d))
        n = norm_many(space, X)
    return X / n[:, None]


def _block_slices(space):
    parts = _sum_parts(space)
    if parts is None:
        return None
    _, blocks = parts
    out = []
    off = 0
    for b in blocks:
        d = space_dim(b)
        out.append((off, off + d, b))
        off += d
    return out


def extreme_points(space: Space, count: int, seed: int) -> np.ndarray:
    """Random draws from the extreme points of the unit ball (where known).

    One-norm factors contribute signed basis vectors, sup-norm factors sign
    patterns, sums draw blockwise; smooth factors fall back to sphere
    samples.  Suprema of convex functions live here, so norm estimators seed
    from these.
    """
    rng = np.random.default_rng(seed)
    d = space_dim(space)
    if isinstance(space, Lp) and d > 1:
        if space.p == 1.0:
            X = np.zeros((count, d))
            j = rng.integers(0, d, size=count)
            X[np.arange(count), j] = rng.choice([-1.0, 1.0], size=count)
            return X
        if math.isinf(space.p):
            return rng.choice([-1.0, 1.0], size=(count, d))
    slices = _block_slices(space)
    if slices is not None:
        X = np.column_stack(
            [extreme_points(blk, count, seed + 13 * lo + 1) for lo, hi, blk in slices]
        )
        return X / norm_many(space, X)[:, None]
    return sample_sphere(space, count, seed)


def structured_sphere_points(space: Space, count: int, seed: int) -> np.ndarray:
    """Extreme-ish unit vectors: sign patterns over coordinates and blocks.

    Absolute norms attain suprema at such combinatorial points far more often
    than at Gaussian directions, so estimators mix these into their sample
    sets.  For sums this includes densely embedded single-block spheres,
    which carry the extreme points of one-type outer norms.
    """
    rng = np.random.default_rng(seed)
    d = space_dim(space)
    pts = [np.eye(d), -np.eye(d)]
    slices = _block_slices(space)
    if slices is not None:
        k = len(slices)
        inner = []
        for lo, hi, blk in slices:
            m = max(16, count // (3 * k))
            u = np.concatenate(
                [
                    sample_sphere(blk, m, seed + lo + 1),
                    structured_sphere_points(blk, m, seed + lo + 2),
                ]
            )
            inner.append((lo, hi, u))
            emb = np.zeros((u.shape[0], d))
            emb[:, lo:hi] = u
            pts.append(emb)
        m = max(8, count // 3)
        for i in range(m):
            signs = rng.choice([-1.0, 1.0], size=k)
            scale = rng.choice([0.0, 1.0], size=k)
            if not scale.any():
                scale[:] = 1.0
            v = np.zeros(d)
            for j, (lo, hi, u) in enumerate(inner):
                v[lo:hi] = signs[j] * scale[j] * u[rng.integers(len(u))]
            pts.append(v[None, :])
    sign_vectors = rng.choice([-1.0, 1.0], size=(max(8, count // 4), d))
    pts.append(sign_vectors)
    X = np.concatenate(pts, axis=0)[:count]
    return X / norm_many(space, X)[:, None]


# ---------------------------------------------------------------------------
# Norming functionals


@dataclass
class DualityPair:
    """A unit vector with a norming (or almost-norming) functional."""

    x: np.ndarray
    xstar: np.ndarray
    gap: float


def _norming_unit(space: Space, U: np.ndarray, lenient: bool):
    """Norming functionals for unit rows ``U``.

    Returns ``(G, ok)``.  In lenient mode combinatorial families return a
    valid subgradient even at non-smooth points (any member of the
    subdifferential is a norming functional), which is what the sampling
    estimators want.  In strict mode such points are flagged instead.
    """
    m, d = U.shape
    ok = np.ones(m, dtype=bool)
    if isinstance(space, Lp):
        p = space.p
        if d == 1:
            return np.sign(U) + (U == 0), ok
        if p == 2.0:
            return U.copy(), ok
        if math.isinf(p):
            a = np.abs(U)
            j = np.argmax(a, axis=1)
            G = np.zeros_like(U)
            rows = np.arange(m)
            G[rows, j] = np.sign(U[rows, j])
            if not lenient:
                part = np.partition(a, d - 2, axis=1)
                ok = (part[:, -1] - part[:, -2]) > 1e-9
            return G, ok
        if p == 1.0:
            s = np.sign(U)
            s[s == 0] = 1.0
            if not lenient:
                ok = np.min(np.abs(U), axis=1) > 1e-9
            return s, ok
        return np.sign(U) * np.abs(U) ** (p - 1.0), ok
    if isinstance(space, Gauge2d):
        a = np.abs(U)
        rho = np.hypot(a[:, 0], a[:, 1])
        theta = np.arctan2(a[:, 1], a[:, 0])
        r = space.boundary_radius(theta)
        rp = space._dspline(theta)
        # gradient of rho/r(theta) in the positive quadrant, then unfold signs
        g0 = a[:, 0] / (rho * r) + rp * (a[:, 1] / rho) / r**2
        g1 = a[:, 1] / (rho * r) - rp * (a[:, 0] / rho) / r**2
        s = np.sign(U)
        s[s == 0] = 1.0
        G = np.column_stack([g0, g1]) * s
        if not lenient:
            on_axis = np.min(a, axis=1) < 1e-9 * rho
            kinked = np.abs(rp) > 1e-7
            ok = ~(on_axis & kinked)
        return G, ok
    outer, _ = _sum_parts(space)
    slices = _block_slices(space)
    A = np.column_stack([norm_many(blk, U[:, lo:hi]) for lo, hi, blk in slices])
    Gout, ok = _norming_unit(outer, A, lenient)
    G = np.zeros_like(U)
    for j, (lo, hi, blk) in enumerate(slices):
        nz = A[:, j] > DEAD_BLOCK
        if not nz.any():
            continue
        Ub = U[nz, lo:hi] / A[nz, j][:, None]
        Gb, okb = _norming_unit(blk, Ub, lenient)
        G[nz, lo:hi] = Gout[nz, j][:, None] * Gb
        if not lenient:
            # inner non-smoothness only matters where the block carries weight
            relevant = np.abs(Gout[nz, j]) > 1e-12
            sub = ok[nz]
            sub &= okb | ~relevant
            ok[nz] = sub
    return G, ok


def duality_pairs(
    space: Space,
    X: np.ndarray,
    delta: float,
    rng: np.random.Generator,
    retries: int = 8,
    lenient: bool = True,
):
    """Unit vectors with norming functionals, perturb-and-retry on failures.

    Returns ``(U, G, gap, ok)`` where pairs with ``ok`` satisfy
    ``<G_i, U_i> >= 1 - delta``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    rescale = has_gauge(space)

    def resolve(Y):
        Un = Y / norm_many(space, Y)[:, None]
        Gn, okn = _norming_unit(space, Un, lenient)
        if rescale:
            # spline-backed gradients can drift off the dual sphere near
            # interpolated corners; rescaling keeps the pair certified and
            # surfaces the loss as an honest gap
            dn = norm_many(build_dual(space), Gn)
            dn[dn <= 0] = 1.0
            Gn = Gn / dn[:, None]
        gapn = 1.0 - np.einsum("ij,ij->i", Gn, Un)
        okn &= (gapn <= delta) & (gapn >= -1e-6)
        return Un, Gn, gapn, okn

    U, G, gap, ok = resolve(X)
    for _ in range(retries):
        bad = ~ok
        if not bad.any():
            break
        Xb = U[bad] + 1e-7 * rng.standard_normal((int(bad.sum()), U.shape[1]))
        Ub, Gb, gapb, okb = resolve(Xb)
        U[bad], G[bad], gap[bad] = Ub, Gb, gapb
        ok[bad] = okb
    return U, G, gap, ok


def norming_functional(space: Space, x, delta: float = 1e-6) -> DualityPair:
    """The norming functional at a unit vector ``x``.

    Raises :class:`NonSmoothPoint` when the norm is not differentiable at
    ``x``; the caller should perturb ``x`` slightly and retry.
    """
    x = np.asarray(x, dtype=float)
    n = norm(space, x)
    if abs(n - 1.0) > 1e-6:
        raise SpaceValidationError(f"norming_functional: ||x|| = {n}, expected 1")
    U = (x / n)[None, :]
    G, ok = _norming_unit(space, U, lenient=False)
    if not ok[0]:
        raise NonSmoothPoint(
            "norm is not differentiable at this point; perturb and retry"
        )
    gap = 1.0 - float(G[0] @ U[0])
    if gap > delta:
        raise NonSmoothPoint(
            f"norming functional has gap {gap:.2e} > delta {delta:.2e}"
        )
    return DualityPair(x=U[0], xstar=G[0], gap=max(gap, 0.0))


# ---------------------------------------------------------------------------
# Local ascent over the sphere (shared by the estimators)


def ascend_sphere(
    value_fn,
    X0: np.ndarray,
    steps: int = 200,
    fd_step: float = 1e-5,
    step0: float = 0.1,
):
    """Derivative-free ascent of ``value_fn`` over unit vectors.

    ``value_fn`` maps a batch of vectors to values and must itself be
    insensitive to positive rescaling (callers evaluate on rays).  All starts
    are advanced together; a per-start step size grows on success and shrinks
    on failure.
    """
    X = np.array(X0, dtype=float)
    B, d = X.shape
    f = value_fn(X)
    alpha = np.full(B, step0)
    for _ in range(steps):
        if np.all(alpha < 1e-10):
            break
        cloud = np.repeat(X[:, None, :], 2 * d, axis=1)
        idx = np.arange(d)
        cloud[:, 2 * idx, idx] += fd_step
        cloud[:, 2 * idx + 1, idx] -= fd_step
        vals = value_fn(cloud.reshape(-1, d)).reshape(B, 2 * d)
        # unresolved cloud points surface as non-finite values; freeze those
        with np.errstate(invalid="ignore"):
            grad = (vals[:, 0::2] - vals[:, 1::2]) / (2 * fd_step)
        grad[~np.isfinite(grad)] = 0.0
        gn = np.linalg.norm(grad, axis=1)
        gn[gn == 0] = 1.0
        trial = X + alpha[:, None] * grad / gn[:, None]
        ft = value_fn(trial)
        better = ft > f
        X[better] = trial[better]
        f[better] = ft[better]
        alpha[better] *= 1.4
        alpha[~better] *= 0.5
    return X, f


# ---------------------------------------------------------------------------
# Dual norms and structural duals


def _conjugate(p: float) -> float:
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def dual_norm(space: Space, f, budget: int = 10_000, seed: int = 0) -> float:
    """sup of ``|<f, x>|`` over the unit sphere.

    Exact (conjugate exponent) for p-norms; otherwise a sampled lower
    estimate refined by local ascent at the stated budget.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (space_dim(space),):
        raise SpaceValidationError(
            f"dimension mismatch: functional has {f.shape} coordinates, "
            f"space has dimension {space_dim(space)}"
        )
    if isinstance(space, Lp):
        return norm(Lp(_conjugate(space.p), space.dim), f)
    if not f.any():
        return 0.0

    def value(X):
        Xn = norm_many(space, X)
        return np.abs(X @ f) / Xn

    X = np.concatenate(
        [
            sample_sphere(space, budget, seed),
            structured_sphere_points(space, max(16, budget // 8), seed + 1),
        ]
    )
    vals = value(X)
    top = np.argsort(vals)[-8:]
    _, best = ascend_sphere(value, X[top], steps=120)
    return float(np.max(best))


def build_dual(space: Space) -> Space:
    """The dual space, built structurally (exact in finite dimension).

    p-norms dualise by conjugate exponent, composite sums dualise blockwise
    over the dual outer norm, and gauge tables get a cached support-function
    table on the same angular grid.
    """
    if isinstance(space, Lp):
        return Lp(_conjugate(space.p), space.dim)
    if isinstance(space, Gauge2d):
        if space._dual is None:
            pts = space._boundary_points(16 * GAUGE_ANGLES)
            dirs = np.column_stack([np.cos(_THETA), np.sin(_THETA)])
            support = np.max(dirs @ pts.T, axis=1)
            # the axis supports equal the unit-vector norms, exactly one
            support[0] = support[-1] = 1.0
            space._dual = Gauge2d(1.0 / support, trusted=True)
        return space._dual
    if space._dual is None:
        if isinstance(space, AbsoluteSum):
            dual = AbsoluteSum(
                build_dual(space.outer), build_dual(space.left), build_dual(space.right)
            )
        else:
            dual = ESum(build_dual(space.E), tuple(build_dual(s) for s in space.summands))
        object.__setattr__(space, "_dual", dual)
    return space._dual


def gauge_distance(a: Space, b: Space, grid: int = 1024) -> float:
    """sup over angles of the boundary-radius difference of two 2-D norms."""
    if space_dim(a) != 2 or space_dim(b) != 2:
        raise SpaceValidationError("gauge_distance needs two 2-dimensional spaces")
    th = np.linspace(0.0, math.pi / 2, grid)
    D = np.column_stack([np.cos(th), np.sin(th)])
    return float(np.max(np.abs(1.0 / norm_many(a, D) - 1.0 / norm_many(b, D))))


# ---------------------------------------------------------------------------
# Ready-made gauge tables


def lp_gauge_table(p: float) -> Gauge2d:
    """The p-norm unit ball sampled into a gauge table (mostly for tests)."""
    D = np.column_stack([np.cos(_THETA), np.sin(_THETA)])
    return Gauge2d(1.0 / norm_many(Lp(p, 2), D))


def mixture_gauge(ps, weights) -> Gauge2d:
    """Gauge table of ``sum_k w_k ||.||_{p_k}`` (convex combination of p-norms)."""
    ps = list(ps)
    w = np.asarray(weights, dtype=float)
    if len(ps) != len(w) or abs(w.sum() - 1.0) > 1e-12 or np.any(w < 0):
        raise SpaceValidationError("mixture_gauge: weights must be a convex combination")
    D = np.column_stack([np.cos(_THETA), np.sin(_THETA)])
    vals = sum(wk * norm_many(Lp(pk, 2), D) for pk, wk in zip(ps, w))
    return Gauge2d(1.0 / vals)


def random_gauge2d(seed: int, avoid=(), margin: float = 0.0) -> Gauge2d:
    """A random smooth 2-D absolute norm (mixture of p-norms).

    ``avoid`` lists 2-D spaces the result must stay ``margin``-far from in the
    boundary-radius sup distance.
    """
    rng = np.random.default_rng(seed)
    for _ in range(256):
        k = int(rng.integers(2, 5))
        ps = np.concatenate([[1.0], np.exp(rng.uniform(np.log(1.2), np.log(9.0), k - 1))])
        w = rng.dirichlet(np.ones(k))
        # keep enough strictly-convex mass that the dual table stays smooth
        if w[1:].sum() < 0.25:
            continue
        g = mixture_gauge(ps, w)
        if all(gauge_distance(g, s) >= margin for s in avoid):
            return g
    raise NumericalDiagnostic("random_gauge2d: could not satisfy the margin constraints")


# ---------------------------------------------------------------------------
# JSON schema


def space_to_json(space: Space) -> dict:
    if isinstance(space, Lp):
        return {"kind": "lp", "p": "inf" if math.isinf(space.p) else space.p, "dim": space.dim}
    if isinstance(space, Gauge2d):
        return {"kind": "gauge2d", "samples": [float(r) for r in space.radii]}
    if isinstance(space, AbsoluteSum):
        return {
            "kind": "absolute_sum",
            "outer": space_to_json(space.outer),
            "left": space_to_json(space.left),
            "right": space_to_json(space.right),
        }
    return {
        "kind": "esum",
        "E": space_to_json(space.E),
        "summands": [space_to_json(s) for s in space.summands],
    }


def space_from_json(obj, path: str = "$") -> Space:
    if not isinstance(obj, dict):
        raise SpaceValidationError(f"{path}: expected an object, got {type(obj).__name__}")
    kind = obj.get("kind")
    try:
        if kind == "lp":
            p = obj.get("p")
            if p in ("inf", "Infinity"):
                p = math.inf
            if not isinstance(p, (int, float)):
                raise SpaceValidationError(f"{path}.p: expected a number or 'inf'")
            dim = obj.get("dim")
            if not isinstance(dim, int):
                raise SpaceValidationError(f"{path}.dim: expected an integer")
            return Lp(float(p), dim)
        if kind == "gauge2d":
            samples = obj.get("samples")
            if not isinstance(samples, list):
                raise SpaceValidationError(f"{path}.samples: expected a list of radii")
            return Gauge2d(np.asarray(samples, dtype=float))
        if kind == "absolute_sum":
            return AbsoluteSum(
                space_from_json(obj.get("outer"), path + ".outer"),
                space_from_json(obj.get("left"), path + ".left"),
                space_from_json(obj.get("right"), path + ".right"),
            )
        if kind == "esum":
            summands = obj.get("summands")
            if not isinstance(summands, list):
                raise SpaceValidationError(f"{path}.summands: expected a list")
            return ESum(
                space_from_json(obj.get("E"), path + ".E"),
                tuple(
                    space_from_json(s, f"{path}.summands[{i}]")
                    for i, s in enumerate(summands)
                ),
            )
        if kind == "dual":
            return build_dual(space_from_json(obj.get("of"), path + ".of"))
    except SpaceValidationError as e:
        if str(e).startswith("$"):
            raise
        raise SpaceValidationError(f"{path}: {e}") from None
    raise SpaceValidationError(f"{path}.kind: unknown space kind {kind!r}")


def load_space(text: str) -> Space:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpaceValidationError(f"invalid JSON on line {e.lineno}: {e.msg}") from None
    return space_from_json(obj)
