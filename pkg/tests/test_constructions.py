import math

import numpy as np
import pytest

from numindex import (
    AbsoluteSum,
    ESum,
    Lp,
    Operator,
    SpaceValidationError,
    absolute_sum,
    ck_model,
    ck_model_operator,
    esum,
    l1_sum_witness,
    lie_basis,
    lift_operator,
    norm,
    norm_many,
    numerical_radius,
    numerical_radius_closed,
    op_norm,
    quotient_norm,
    random_gauge2d,
    real_line,
    shift_bound_check,
    shift_operator,
    sup_sum_witness,
)

SQRT3 = math.sqrt(3)


def test_absolute_sum_builders():
    s = absolute_sum(Lp(2, 2), real_line(), Lp(math.inf, 2))
    assert s.dim == 3
    # (R, R) over the one-norm is just the one-norm plane
    flat = absolute_sum(real_line(), real_line(), Lp(1, 2))
    rng = np.random.default_rng(0)
    X = rng.standard_normal((100, 2))
    assert np.allclose(norm_many(flat, X), norm_many(Lp(1, 2), X), atol=1e-9)
    # nested Euclidean sums collapse to the Euclidean space
    nested = absolute_sum(Lp(2, 2), Lp(2, 2), Lp(2, 2))
    Y = rng.standard_normal((100, 4))
    assert np.allclose(norm_many(nested, Y), norm_many(Lp(2, 4), Y), atol=1e-12)


def test_absolute_sum_rejects_bad_outer():
    with pytest.raises(SpaceValidationError):
        absolute_sum(Lp(2, 2), real_line(), Lp(2, 3))


def test_esum_builders():
    s = esum(Lp(math.inf, 3), [Lp(2, 2)] * 3)
    assert s.dim == 6
    collapsed = esum(Lp(2, 2), [real_line(), real_line()])
    rng = np.random.default_rng(1)
    X = rng.standard_normal((50, 2))
    assert np.allclose(norm_many(collapsed, X), norm_many(Lp(2, 2), X), atol=1e-12)


def test_esum_one_norm_outer_is_diagonal():
    s = esum(Lp(1, 2), [Lp(math.inf, 2), Lp(math.inf, 2)])
    b = lie_basis(s, budget=4000, seed=0)
    assert len(b) == 0  # both blocks have trivial skew part


# -- lifts ---------------------------------------------------------------------


def test_lift_preserves_norm_radius_quotient():
    Y = Lp(2, 2)
    total = absolute_sum(Y, real_line(), Lp(math.inf, 2))
    T = Operator([[0, 1], [0, 0]], Y)
    Tl = lift_operator(T, total)
    assert Tl.matrix.shape == (3, 3)
    assert np.allclose(Tl.matrix[:2, :2], T.matrix)
    v = numerical_radius(Tl, budget=20_000, seed=0).value
    assert v == pytest.approx(0.5, abs=2e-2)
    bX = lie_basis(total, budget=4000, seed=0)
    q = quotient_norm(Tl, bX, budget=20_000, seed=0).value
    assert q == pytest.approx(0.5, abs=2e-2)


def test_lift_identity_on_line():
    total = absolute_sum(real_line(), real_line(), Lp(1, 2))
    T = Operator([[1.0]], real_line())
    Tl = lift_operator(T, total)
    assert op_norm(Tl, budget=4000).value == pytest.approx(1.0, abs=1e-2)
    assert numerical_radius(Tl, budget=4000).value == pytest.approx(1.0, abs=1e-2)


def test_lift_of_skew_stays_skew():
    Y = Lp(2, 2)
    total = absolute_sum(Y, Lp(2, 2), Lp(math.inf, 2))
    Tl = lift_operator(Operator([[0, 1], [-1, 0]], Y), total)
    assert numerical_radius(Tl, budget=8000).value <= 1e-6


def test_lift_refuses_euclidean_outer():
    total = AbsoluteSum(Lp(2, 2), Lp(2, 2), real_line())
    with pytest.raises(SpaceValidationError):
        lift_operator(Operator(np.eye(2), Lp(2, 2)), total)


# -- coupling witnesses --------------------------------------------------------


def test_sup_sum_witness_matrix_and_bounds():
    space = absolute_sum(Lp(2, 2), real_line(), Lp(math.inf, 2))
    T = sup_sum_witness(space)
    expected = np.array([[1, 0, 0], [0, 0, math.sqrt(2)], [0, 0, 0]])
    assert np.allclose(T.matrix, expected)
    v = numerical_radius(T, budget=40_000, seed=1).value
    assert 1.0 <= v <= 1.5 + 3e-2


def test_l1_sum_witness_matrix_and_bounds():
    space = absolute_sum(Lp(2, 2), real_line(), Lp(1, 2))
    T = l1_sum_witness(space)
    expected = np.array([[1, 0, 0], [0, 0, 0], [0, math.sqrt(2), 0]])
    assert np.allclose(T.matrix, expected)
    v = numerical_radius(T, budget=40_000, seed=1).value
    assert 1.0 - 2e-2 <= v <= 1.5 + 3e-2
    b = lie_basis(space, budget=4000, seed=0)
    q = quotient_norm(T, b, budget=40_000, seed=1).value
    assert q >= SQRT3 - 3e-2


def test_witness_builders_validate_shape():
    with pytest.raises(SpaceValidationError):
        sup_sum_witness(absolute_sum(Lp(1, 2), real_line(), Lp(math.inf, 2)))
    with pytest.raises(SpaceValidationError):
        l1_sum_witness(absolute_sum(Lp(2, 2), real_line(), Lp(math.inf, 2)))


# -- shifts --------------------------------------------------------------------


def test_shift_matrix_layout():
    s12 = shift_operator(Lp(1, 2), "12")
    assert s12.matrix[1, 0] == 1.0 and np.sum(np.abs(s12.matrix)) == 1.0
    s21 = shift_operator(Lp(1, 2), "21")
    assert s21.matrix[0, 1] == 1.0


@pytest.mark.parametrize(
    "E, expected",
    [(Lp(1, 2), 1.0), (Lp(2, 2), 0.5), (Lp(math.inf, 2), 1.0)],
)
def test_shift_radius_values(E, expected):
    U = shift_operator(E, "21").as_operator()
    closed = numerical_radius_closed(U)
    assert closed == pytest.approx(expected)
    sampled = numerical_radius(U, budget=8000, seed=0).value
    assert sampled == pytest.approx(expected, abs=1e-2)
    assert op_norm(U, budget=4000).value == pytest.approx(1.0, abs=1e-9)


def test_shift_bound_check_families():
    r1 = shift_bound_check(Lp(1, 2), budget=8000, seed=0)
    assert r1["k"] == pytest.approx(1.0, abs=2e-2)
    assert r1["lhs"] == pytest.approx(2.0, abs=1e-6)
    assert r1["margin"] >= -2e-2
    r2 = shift_bound_check(Lp(2, 2), budget=8000, seed=0)
    assert r2["k"] == pytest.approx(0.5, abs=2e-2)
    assert r2["rhs"] == pytest.approx(1.5 - math.sqrt(0.75), abs=3e-2)
    assert r2["lhs"] == pytest.approx(math.sqrt(2), abs=1e-6)
    assert r2["margin"] >= -2e-2
    for seed in range(3):
        rg = shift_bound_check(random_gauge2d(seed), budget=8000, seed=seed)
        assert rg["margin"] >= -2e-2
        assert rg["one_norm_margin"] >= -2e-2


# -- the finite continuous-function model ---------------------------------------


def test_ck_model_shape():
    s = ck_model(3)
    assert s.dim == 6
    x = np.array([3, 4, 0, 1, 0, 2.0])
    assert norm(s, x) == pytest.approx(5.0)
    with pytest.raises(SpaceValidationError):
        ck_model(1)


def test_ck_operator_bounds():
    T = ck_model_operator(2)
    assert T.matrix.shape == (4, 4)
    v = numerical_radius(T, budget=40_000, seed=2).value
    assert v <= 1.53
    b = lie_basis(T.space, budget=4000, seed=0)
    assert len(b) == 2
    q = quotient_norm(T, b, budget=40_000, seed=2).value
    assert q >= 1.70
