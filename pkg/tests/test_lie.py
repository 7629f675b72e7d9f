import math

import numpy as np
import pytest

from numindex import (
    AbsoluteSum,
    ESum,
    Lp,
    Operator,
    detect_components,
    lie_basis,
    numerical_radius,
    op_norm,
    random_gauge2d,
    real_line,
    verify_skew,
)

ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]]) / math.sqrt(2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_hilbert_basis_dimension_and_skewness(n):
    b = lie_basis(Lp(2, n), budget=max(4000, 10 * n * n), seed=0)
    assert len(b) == n * (n - 1) // 2
    for S in b.elements:
        assert np.max(np.abs(S + S.T)) < 1e-8
    assert np.max(b.residuals) < 1e-8
    # Frobenius-orthonormal
    G = np.array([[np.sum(a * c) for c in b.elements] for a in b.elements])
    assert np.allclose(G, np.eye(len(b)), atol=1e-10)


@pytest.mark.parametrize("p", [1.0, 3.0, math.inf])
@pytest.mark.parametrize("n", [2, 3])
def test_trivial_bases(p, n):
    b = lie_basis(Lp(p, n), budget=max(4000, 10 * n * n), seed=1)
    assert len(b) == 0
    assert b.svd_gap > 10


@pytest.mark.parametrize(
    "outer",
    [Lp(1, 2), Lp(math.inf, 2), random_gauge2d(21, avoid=[Lp(2, 2)], margin=0.05)],
)
def test_rotation_block_on_plane_plus_line(outer):
    space = AbsoluteSum(outer, Lp(2, 2), real_line())
    b = lie_basis(space, budget=4000, seed=0)
    assert len(b) == 1
    S = b.elements[0]
    dev = min(np.max(np.abs(S[:2, :2] - ROTATION)), np.max(np.abs(S[:2, :2] + ROTATION)))
    assert dev < 1e-6
    assert np.max(np.abs(S[2:, :])) < 1e-6
    assert np.max(np.abs(S[:, 2:])) < 1e-6


def test_diagonality_on_non_euclidean_sums():
    space = AbsoluteSum(Lp(1, 2), Lp(2, 2), Lp(2, 2))
    b = lie_basis(space, budget=4000, seed=3)
    assert len(b) == 2
    for S in b.elements:
        assert np.max(np.abs(S[2:, :2])) < 1e-6
        assert np.max(np.abs(S[:2, 2:])) < 1e-6


def test_components_partition():
    space = AbsoluteSum(Lp(math.inf, 2), Lp(2, 2), real_line())
    b = lie_basis(space, budget=4000, seed=0)
    assert detect_components(space, b) == [[0, 1], [2]]
    b4 = lie_basis(Lp(2, 4), budget=4000, seed=0)
    assert detect_components(Lp(2, 4), b4) == [[0, 1, 2, 3]]
    b1 = lie_basis(Lp(1, 3), budget=4000, seed=0)
    assert detect_components(Lp(1, 3), b1) == [[0], [1], [2]]


def test_esum_per_point_rotations():
    space = ESum(Lp(math.inf, 3), (Lp(2, 2), Lp(2, 2), Lp(2, 2)))
    b = lie_basis(space, budget=4000, seed=0)
    assert len(b) == 3
    assert detect_components(space, b) == [[0, 1], [2, 3], [4, 5]]


def test_verify_skew_values():
    assert verify_skew(Operator([[0, 1], [-1, 0]], Lp(2, 2)), budget=2000) < 1e-8
    for space in (Lp(2, 3), Lp(1, 2), Lp(math.inf, 2)):
        d = space.dim
        assert verify_skew(Operator(np.eye(d), space), budget=2000) >= 1 - 2e-2
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 3))
    S = (A + A.T) / 2
    est = verify_skew(Operator(S, Lp(2, 3)), budget=4000)
    assert est >= 0.9 * np.linalg.norm(S, 2) - 2e-2


def test_radius_unchanged_by_skew_shift():
    rng = np.random.default_rng(7)
    space = AbsoluteSum(Lp(math.inf, 2), Lp(2, 2), real_line())
    b = lie_basis(space, budget=4000, seed=0)
    T = rng.standard_normal((3, 3))
    v0 = numerical_radius(Operator(T, space), budget=8000, seed=1).value
    v1 = numerical_radius(Operator(T + 2 * b.elements[0], space), budget=8000, seed=1).value
    assert abs(v0 - v1) <= 3e-2


def test_reproducible_given_seed():
    space = AbsoluteSum(Lp(1, 2), Lp(2, 2), real_line())
    b1 = lie_basis(space, budget=4000, seed=5)
    b2 = lie_basis(space, budget=4000, seed=5)
    assert len(b1) == len(b2)
    for S1, S2 in zip(b1.elements, b2.elements):
        assert np.array_equal(S1, S2)


def test_budget_precondition():
    with pytest.raises(ValueError):
        lie_basis(Lp(2, 3), budget=10)
