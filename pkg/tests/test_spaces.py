import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from numindex import (
    AbsoluteSum,
    ESum,
    Gauge2d,
    Lp,
    NonSmoothPoint,
    SpaceValidationError,
    build_dual,
    dual_norm,
    gauge_distance,
    load_space,
    lp_gauge_table,
    mixture_gauge,
    norm,
    norm_many,
    norming_functional,
    random_gauge2d,
    real_line,
    sample_sphere,
    space_from_json,
    space_to_json,
)
from numindex.spaces import GAUGE_ANGLES, _THETA


def test_lp_norms_basic():
    assert norm(Lp(2, 2), [3, 4]) == pytest.approx(5.0)
    assert norm(Lp(1, 3), [1, -2, 3]) == pytest.approx(6.0)
    assert norm(Lp(math.inf, 3), [1, -2, 0.5]) == pytest.approx(2.0)
    assert norm(Lp(3, 2), [1, 1]) == pytest.approx(2 ** (1 / 3))


def test_sup_sum_composition():
    space = AbsoluteSum(Lp(math.inf, 2), Lp(2, 2), Lp(1, 1))
    assert norm(space, [3, 4, 2]) == pytest.approx(5.0)
    assert norm(space, [0.3, 0.4, 2]) == pytest.approx(2.0)


def test_gauge_table_l1_identity():
    g = lp_gauge_table(1.0)
    assert norm(g, [1, 1]) == pytest.approx(2.0, abs=1e-6)
    assert norm(g, [1, 0]) == pytest.approx(1.0, abs=1e-12)
    assert norm(g, [-0.25, 0.5]) == pytest.approx(0.75, abs=1e-6)


def test_gauge_table_requires_valid_boundary():
    with pytest.raises(SpaceValidationError):
        Gauge2d(np.ones(GAUGE_ANGLES) * 1.2)  # outside the sandwich
    dented = 1.0 / (np.cos(_THETA) + np.sin(_THETA))
    dented[200:230] *= 0.96
    with pytest.raises(SpaceValidationError):
        Gauge2d(dented)


def test_dimension_mismatch_rejected():
    with pytest.raises(SpaceValidationError):
        norm(Lp(2, 2), [1, 2, 3])


# -- dual norms -------------------------------------------------------------


def test_dual_norm_lp_closed_forms():
    assert dual_norm(Lp(1, 2), [1, 1]) == pytest.approx(1.0)
    assert dual_norm(Lp(2, 3), [1, 2, 2]) == pytest.approx(3.0)
    assert dual_norm(Lp(math.inf, 2), [1, -1]) == pytest.approx(2.0)


def test_dual_norm_gauge_table_by_sampling():
    g = lp_gauge_table(1.0)
    est = dual_norm(g, [1, 1], budget=10_000, seed=0)
    assert est == pytest.approx(1.0, abs=1e-3)


def test_build_dual_lp():
    d = build_dual(Lp(1, 3))
    rng = np.random.default_rng(0)
    X = rng.standard_normal((100, 3))
    assert np.allclose(norm_many(d, X), norm_many(Lp(math.inf, 3), X), atol=1e-9)
    # finite-dimensional reflexivity
    dd = build_dual(build_dual(Lp(1.7, 2)))
    Y = rng.standard_normal((50, 2))
    assert np.allclose(norm_many(dd, Y), norm_many(Lp(1.7, 2), Y), atol=1e-6)


def test_build_dual_of_sum_against_maximization():
    space = AbsoluteSum(Lp(math.inf, 2), Lp(2, 2), real_line())
    d = build_dual(space)
    ref = AbsoluteSum(Lp(1, 2), Lp(2, 2), real_line())
    rng = np.random.default_rng(1)
    X = rng.standard_normal((100, 3))
    assert np.allclose(norm_many(d, X), norm_many(ref, X), atol=1e-9)
    for f in rng.standard_normal((3, 3)):
        assert norm(d, f) == pytest.approx(
            dual_norm(space, f, budget=20_000, seed=3), abs=2e-3
        )


def test_gauge_dual_is_support_function():
    g = random_gauge2d(3)
    d = build_dual(g)
    rng = np.random.default_rng(2)
    for f in rng.standard_normal((5, 2)):
        assert norm(d, f) == pytest.approx(dual_norm(g, f, budget=20_000, seed=1), abs=2e-3)


# -- norming functionals ----------------------------------------------------


def test_norming_functional_hilbert():
    pair = norming_functional(Lp(2, 2), [1, 0])
    assert np.allclose(pair.xstar, [1, 0])
    assert pair.gap == pytest.approx(0.0, abs=1e-12)


def test_norming_functional_sup_norm_coordinate():
    pair = norming_functional(Lp(math.inf, 2), [1, 0.3])
    assert np.allclose(pair.xstar, [1, 0])
    assert pair.gap == pytest.approx(0.0, abs=1e-12)
    assert dual_norm(Lp(math.inf, 2), pair.xstar) == pytest.approx(1.0)


def test_norming_functional_one_norm_signs():
    x = np.array([0.5, 0.5])
    pair = norming_functional(Lp(1, 2), x)
    assert np.allclose(pair.xstar, [1, 1])
    assert float(pair.xstar @ pair.x) == pytest.approx(1.0)


def test_norming_functional_flags_nonsmooth_points():
    with pytest.raises(NonSmoothPoint):
        norming_functional(Lp(math.inf, 2), [1, 1])
    with pytest.raises(NonSmoothPoint):
        norming_functional(Lp(1, 2), [1, 0])


def test_norming_functional_gauge_matches_finite_differences():
    g = random_gauge2d(11)
    x = sample_sphere(g, 1, seed=5)[0]
    pair = norming_functional(g, x, delta=1e-3)
    h = 1e-6
    fd = np.array(
        [
            (norm(g, x + h * e) - norm(g, x - h * e)) / (2 * h)
            for e in np.eye(2)
        ]
    )
    assert np.allclose(pair.xstar, fd, atol=1e-5)


# -- sphere sampling --------------------------------------------------------


@pytest.mark.parametrize(
    "space",
    [
        Lp(2, 3),
        Lp(1, 4),
        Lp(math.inf, 2),
        Lp(2.5, 3),
        AbsoluteSum(Lp(math.inf, 2), Lp(2, 2), real_line()),
        ESum(Lp(math.inf, 3), (Lp(2, 2), Lp(2, 2), Lp(2, 2))),
    ],
)
def test_sample_sphere_unit_norms(space):
    X = sample_sphere(space, 500, seed=7)
    assert np.max(np.abs(norm_many(space, X) - 1.0)) < 1e-12


def test_sample_sphere_deterministic():
    a = sample_sphere(Lp(2, 3), 100, seed=1)
    b = sample_sphere(Lp(2, 3), 100, seed=1)
    assert np.array_equal(a, b)
    c = sample_sphere(Lp(2, 3), 100, seed=2)
    assert not np.array_equal(a, c)


def test_sample_sphere_covers_orthants():
    X = sample_sphere(Lp(math.inf, 2), 10_000, seed=1)
    signs = set(map(tuple, np.sign(X).astype(int)))
    assert {(1, 1), (1, -1), (-1, 1), (-1, -1)} <= signs
    # the max coordinate lands on both axes
    argmaxes = set(np.argmax(np.abs(X), axis=1).tolist())
    assert argmaxes == {0, 1}


# -- property tests ----------------------------------------------------------

_SPACES = [
    Lp(1, 3),
    Lp(2, 4),
    Lp(math.inf, 3),
    Lp(1.4, 2),
    mixture_gauge([1.0, 3.0], [0.5, 0.5]),
    AbsoluteSum(Lp(1, 2), Lp(2, 2), Lp(math.inf, 2)),
    AbsoluteSum(random_gauge2d(5), Lp(2, 2), real_line()),
    ESum(Lp(math.inf, 3), (Lp(2, 2), Lp(1, 2), real_line())),
]


@settings(max_examples=25, deadline=None)
@given(
    idx=st.integers(0, len(_SPACES) - 1),
    seed=st.integers(0, 2**31 - 1),
    alpha=st.floats(-4, 4, allow_nan=False),
)
def test_norm_axioms(idx, seed, alpha):
    space = _SPACES[idx]
    d = space.dim
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(d), rng.standard_normal(d)
    nx, ny = norm(space, x), norm(space, y)
    assert norm(space, x + y) <= nx + ny + 1e-9
    assert norm(space, alpha * x) == pytest.approx(abs(alpha) * nx, abs=1e-12, rel=1e-12)
    signs = rng.choice([-1.0, 1.0], size=d)
    assert norm(space, signs * x) == pytest.approx(nx, abs=1e-12, rel=1e-12)
    # absolute norms sit between the extreme lattice norms
    assert np.max(np.abs(x)) - 1e-9 <= nx <= np.sum(np.abs(x)) + 1e-9


@settings(max_examples=20, deadline=None)
@given(idx=st.integers(0, len(_SPACES) - 1), seed=st.integers(0, 2**31 - 1))
def test_duality_pair_contract(idx, seed):
    from numindex.spaces import duality_pairs

    space = _SPACES[idx]
    rng = np.random.default_rng(seed)
    X = sample_sphere(space, 8, seed=seed % 1000)
    U, G, gap, ok = duality_pairs(space, X, 1e-3, rng)
    assert ok.any()
    pair = np.einsum("ij,ij->i", G[ok], U[ok])
    assert np.all(pair >= 1 - 1e-3)
    y = rng.standard_normal(space.dim)
    ny = norm(space, y)
    # functionals never beat their dual norm on a test vector
    assert np.all(np.abs(G[ok] @ y) <= 1.0 * ny + 1e-6)


# -- JSON schema -------------------------------------------------------------


def test_space_json_roundtrip():
    spaces = [
        Lp(1.5, 3),
        Lp(math.inf, 2),
        lp_gauge_table(3.0),
        AbsoluteSum(Lp(math.inf, 2), Lp(2, 2), real_line()),
        ESum(Lp(1, 2), (Lp(math.inf, 2), Lp(math.inf, 2))),
    ]
    rng = np.random.default_rng(3)
    for space in spaces:
        again = space_from_json(json.loads(json.dumps(space_to_json(space))))
        X = rng.standard_normal((20, space.dim))
        assert np.allclose(norm_many(space, X), norm_many(again, X), atol=1e-12)


def test_space_json_dual_kind():
    obj = {"kind": "dual", "of": {"kind": "lp", "p": 1, "dim": 3}}
    d = space_from_json(obj)
    assert isinstance(d, Lp) and math.isinf(d.p)


def test_space_json_diagnostics():
    with pytest.raises(SpaceValidationError, match=r"\$\.p"):
        space_from_json({"kind": "lp", "p": "wat", "dim": 2})
    with pytest.raises(SpaceValidationError, match="kind"):
        space_from_json({"kind": "banana"})
    with pytest.raises(SpaceValidationError, match="invalid JSON"):
        load_space("{not json")
    with pytest.raises(SpaceValidationError):
        load_space(json.dumps({"kind": "gauge2d", "samples": [1.0] * 10}))


def test_esum_summand_count_must_match():
    with pytest.raises(SpaceValidationError):
        ESum(Lp(math.inf, 3), (Lp(2, 2), Lp(2, 2)))


def test_gauge_distance():
    assert gauge_distance(Lp(1, 2), lp_gauge_table(1.0)) < 1e-7
    assert gauge_distance(Lp(1, 2), Lp(math.inf, 2)) > 0.29
