import math

import numpy as np
import pytest

from numindex import (
    AbsoluteSum,
    Lp,
    Operator,
    SpaceValidationError,
    adjoint,
    load_operator,
    numerical_radius,
    numerical_radius_closed,
    op_norm,
    operator_from_json,
    operator_to_json,
    real_line,
)

L2_2 = Lp(2, 2)


def test_operator_shape_checked():
    with pytest.raises(SpaceValidationError):
        Operator(np.zeros((2, 3)), L2_2)
    with pytest.raises(SpaceValidationError):
        Operator(np.zeros((3, 3)), L2_2)


# -- operator norm ------------------------------------------------------------


def test_op_norm_rotation_is_isometry():
    est = op_norm(Operator([[0, 1], [-1, 0]], L2_2))
    assert est.value == pytest.approx(1.0)
    assert est.direction == "two_sided"


def test_op_norm_sup_norm_row_sums():
    est = op_norm(Operator([[1, 1], [0, 0]], Lp(math.inf, 2)))
    assert est.value == pytest.approx(2.0)


def test_op_norm_one_norm_column_sums():
    est = op_norm(Operator([[1, 0], [1, 0]], Lp(1, 2)))
    assert est.value == pytest.approx(2.0)


def test_op_norm_coupling_operator_sampled():
    # sup over max(||y||_2, |w|) <= 1 of sqrt(y_1^2 + 2 w^2) = sqrt(3)
    space = AbsoluteSum(Lp(math.inf, 2), L2_2, real_line())
    M = [[1, 0, 0], [0, 0, math.sqrt(2)], [0, 0, 0]]
    est = op_norm(Operator(M, space), budget=100_000, seed=1)
    assert est.direction == "lower"
    assert est.value == pytest.approx(math.sqrt(3), abs=2e-2)
    assert est.value <= math.sqrt(3) + 1e-9


def test_op_norm_witness_reevaluates():
    space = Lp(3, 3)
    rng = np.random.default_rng(4)
    T = Operator(rng.standard_normal((3, 3)), space)
    est = op_norm(T, budget=4000, seed=2)
    from numindex import norm

    assert norm(space, T.matrix @ est.witness) == pytest.approx(est.value, abs=1e-9)


# -- numerical radius ---------------------------------------------------------


def test_radius_rotation_vanishes():
    est = numerical_radius(Operator([[0, 1], [-1, 0]], L2_2), budget=4000)
    assert est.value <= 1e-8


def test_radius_nilpotent_half():
    # oracle: largest |eigenvalue| of the symmetric part [[0,.5],[.5,0]]
    est = numerical_radius(Operator([[0, 1], [0, 0]], L2_2), budget=10_000)
    assert est.value == pytest.approx(0.5, abs=1e-2)


def test_radius_sup_norm_swap():
    est = numerical_radius(Operator([[0, 1], [1, 0]], Lp(math.inf, 2)), budget=10_000)
    assert est.value == pytest.approx(1.0, abs=1e-2)
    assert numerical_radius_closed(Operator([[0, 1], [1, 0]], Lp(math.inf, 2))) == 1.0


def test_radius_witness_is_a_duality_pair():
    T = Operator([[0.3, 1.2], [-0.4, 0.8]], Lp(4, 2))
    est = numerical_radius(T, budget=4000, seed=3)
    x, xstar = est.witness
    assert float(xstar @ x) == pytest.approx(1.0, abs=1e-6)
    assert abs(xstar @ (T.matrix @ x)) == pytest.approx(est.value, abs=1e-9)


# -- closed forms -------------------------------------------------------------


def test_closed_form_hilbert_skew_and_selfadjoint():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 3))
    skew = Operator(A - A.T, Lp(2, 3))
    assert numerical_radius_closed(skew) == pytest.approx(0.0, abs=1e-12)
    diag = Operator(np.diag([2.0, -1.0]), L2_2)
    assert numerical_radius_closed(diag) == pytest.approx(2.0)


def test_closed_form_one_norm_shift():
    U1 = Operator([[0, 1], [0, 0]], Lp(1, 2))
    assert numerical_radius_closed(U1) == pytest.approx(1.0)


def test_closed_form_unavailable_off_family():
    assert numerical_radius_closed(Operator(np.eye(2), Lp(3, 2))) is None


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_closed_forms_validated_by_sampling(p):
    # the derived formulas are only trusted because sampling reproduces them
    rng = np.random.default_rng(17)
    worst = 0.0
    for i in range(6):
        n = int(rng.integers(2, 5))
        T = Operator(rng.standard_normal((n, n)), Lp(p, n))
        sampled = numerical_radius(T, budget=20_000, seed=i).value
        worst = max(worst, abs(sampled - numerical_radius_closed(T)))
    assert worst <= 2e-2


def test_radius_below_op_norm():
    rng = np.random.default_rng(5)
    for i, space in enumerate([Lp(1.5, 3), Lp(math.inf, 3), AbsoluteSum(Lp(1, 2), L2_2, real_line())]):
        T = Operator(rng.standard_normal((3, 3)), space)
        v = numerical_radius(T, budget=6000, seed=i).value
        n = op_norm(T, budget=6000, seed=i).value
        assert v <= n + 2e-2


def test_radius_scaling():
    T = Operator([[0.2, 1.0], [0.1, -0.4]], Lp(2.5, 2))
    v1 = numerical_radius(T, budget=6000, seed=1).value
    v3 = numerical_radius(Operator(3.0 * T.matrix, T.space), budget=6000, seed=1).value
    assert v3 == pytest.approx(3 * v1, abs=2e-2)


# -- adjoints -----------------------------------------------------------------


def test_adjoint_involution_and_self_duality():
    T = Operator([[1.0, 2.0], [3.0, 4.0]], L2_2)
    A = adjoint(T)
    assert A.space == L2_2
    assert np.array_equal(adjoint(A).matrix, T.matrix)


def test_adjoint_radius_agreement_one_vs_sup():
    T = Operator([[0.5, 1.0], [-0.2, 0.1]], Lp(1, 2))
    A = adjoint(T)
    assert isinstance(A.space, Lp) and math.isinf(A.space.p)
    v = numerical_radius(T, budget=20_000, seed=2).value
    vs = numerical_radius(A, budget=20_000, seed=2).value
    assert v == pytest.approx(vs, abs=2e-2)
    # exact check through the closed forms
    assert numerical_radius_closed(T) == pytest.approx(numerical_radius_closed(A))


# -- I/O ----------------------------------------------------------------------


def test_operator_json_roundtrip():
    T = Operator([[1.0, 2.0], [3.0, 4.0]], Lp(1.5, 2))
    again = operator_from_json(operator_to_json(T))
    assert np.array_equal(again.matrix, T.matrix)
    assert again.space == T.space


def test_operator_csv_with_sidecar_space():
    T = load_operator("1.0,2.0\n3.0,4.0\n", space=L2_2)
    assert np.array_equal(T.matrix, [[1, 2], [3, 4]])
    with pytest.raises(SpaceValidationError):
        load_operator("1.0,2.0\n3.0,4.0\n")
    with pytest.raises(SpaceValidationError):
        load_operator("1.0,x\n3.0,4.0\n", space=L2_2)
