"""Skew-hermitian operators: basis extraction and structure detection.

An operator ``S`` is skew-hermitian when its numerical radius vanishes; the
set of these is a linear space.  Every sampled duality pair ``(x, x*)``
imposes one homogeneous constraint ``<x*, S x> = 0`` on the entries of ``S``,
so a heavily overdetermined linear system pins the space down as the
numerical null space of the constraint matrix.  Candidates are then verified
by direct radius sampling before being trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .spaces import (
    NumericalDiagnostic,
    Space,
    duality_pairs,
    sample_sphere,
    space_dim,
    structured_sphere_points,
)
from .operators import Estimate, Operator, default_delta, numerical_radius

SVD_KEEP_THRESHOLD = 1e-8
VERIFY_TOL = 1e-4
MIN_SVD_GAP = 10.0


@dataclass
class LieBasis:
    """Verified, Frobenius-orthonormal basis of the skew-hermitian space."""

    elements: list
    residuals: np.ndarray
    constraint_count: int
    svd_gap: float
    space: Space

    def __len__(self):
        return len(self.elements)

    def projector_complement(self, M: np.ndarray) -> np.ndarray:
        """Frobenius-orthogonal projection of ``M`` off the basis span."""
        out = np.asarray(M, dtype=float).copy()
        for S in self.elements:
            out -= np.sum(out * S) * S
        return out

    def coefficients(self, M: np.ndarray) -> np.ndarray:
        """Coefficients of the Frobenius projection of ``M`` onto the span.

        On Euclidean spaces this is already the minimiser of the distance
        from ``M`` to the span; elsewhere it is a strong warm start.
        """
        return np.asarray([float(np.sum(M * S)) for S in self.elements])

    def combine(self, coeffs) -> np.ndarray:
        d = space_dim(self.space)
        out = np.zeros((d, d))
        for c, S in zip(coeffs, self.elements):
            out += c * S
        return out


def verify_skew(S: Operator, budget: int = 4000, seed: int = 0) -> float:
    """Sampled numerical radius of ``S``; ~0 certifies skew-hermitian."""
    return numerical_radius(S, budget=budget, seed=seed).value


def _fix_sign(M: np.ndarray) -> np.ndarray:
    flat = M.ravel()
    k = int(np.argmax(np.abs(flat)))
    return -M if flat[k] < 0 else M


def lie_basis(
    space: Space,
    budget: int = 4000,
    seed: int = 0,
    constraint_count: int | None = None,
    keep_threshold: float = SVD_KEEP_THRESHOLD,
    verify_tol: float = VERIFY_TOL,
) -> LieBasis:
    """Basis of the skew-hermitian operators on ``space``.

    ``budget`` is the per-candidate verification sample count and must cover
    at least ``10 * dim**2`` samples; the constraint system itself defaults to
    ``40 * dim**2`` sampled duality pairs.
    """
    d = space_dim(space)
    if budget < 10 * d * d:
        raise ValueError(f"budget must be >= 10*dim^2 = {10 * d * d}")
    if constraint_count is None:
        constraint_count = 40 * d * d
    delta = default_delta(space)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x11E]))
    X = np.concatenate(
        [
            sample_sphere(space, constraint_count, seed),
            structured_sphere_points(space, max(16, constraint_count // 8), seed + 1),
        ]
    )
    U, G, _, ok = duality_pairs(space, X, delta, rng)
    U, G = U[ok], G[ok]
    if U.shape[0] < max(d * d + 1, constraint_count // 2):
        raise NumericalDiagnostic(
            "lie_basis: too few resolved duality pairs to assemble constraints"
        )
    rows = np.einsum("bi,bj->bij", G, U).reshape(U.shape[0], d * d)
    _, s, Vt = np.linalg.svd(rows, full_matrices=True)
    cut = keep_threshold * s[0]
    # rows may be fewer than d*d in pathological cases; missing singular
    # values are exact zeros
    s_full = np.concatenate([s, np.zeros(d * d - len(s))])
    null_mask = s_full < cut
    r = int(np.argmax(null_mask)) if null_mask.any() else d * d
    if null_mask.any():
        svd_gap = float(s_full[r - 1] / max(s_full[r], 1e-300))
    else:
        svd_gap = float(s_full[-1] / cut)
    if svd_gap < MIN_SVD_GAP:
        raise NumericalDiagnostic(
            f"lie_basis: ambiguous null space (svd gap {svd_gap:.2f} < "
            f"{MIN_SVD_GAP}); rerun with a larger budget/constraint count"
        )
    kept, residuals = [], []
    for row in Vt[r:]:
        S = row.reshape(d, d)
        res = verify_skew(Operator(S, space), budget=budget, seed=seed + 7)
        if res <= verify_tol:
            kept.append(_fix_sign(S))
            residuals.append(res)
    return LieBasis(
        elements=kept,
        residuals=np.asarray(residuals),
        constraint_count=int(U.shape[0]),
        svd_gap=svd_gap,
        space=space,
    )


def detect_components(space: Space, basis: LieBasis, tol: float = 1e-6):
    """Partition of the coordinates by skew-hermitian coupling.

    Coordinates joined by a large off-diagonal entry of any basis element end
    up in one block; blocks of size >= 2 are candidate Euclidean components,
    singletons belong to the orthogonal part.
    """
    d = space_dim(space)
    adj = np.zeros((d, d), dtype=bool)
    for S in basis.elements:
        adj |= np.abs(S) > tol
    adj |= adj.T
    n_comp, labels = connected_components(csr_matrix(adj), directed=False)
    groups = [[] for _ in range(n_comp)]
    for i, lab in enumerate(labels):
        groups[lab].append(i)
    return sorted(groups)


def radius_modulo(
    T: Operator, basis: LieBasis, budget: int = 4000, seed: int = 0
) -> Estimate:
    """Radius of ``T`` shifted by a basis element (shifts must not change it)."""
    return numerical_radius(T, budget=budget, seed=seed)
