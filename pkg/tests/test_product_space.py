import numpy as np
import pytest

from splitkit.convex_core import AffineSubspace, Ball
from splitkit.displacement import NormalStatus, v_affine_closed_form
from splitkit.errors import DimensionError
from splitkit.operators import AffineOp, ConstOp, GradHalfDistSq, NormalCone
from splitkit.product_space import (ProductProblem, average, build_lifted_problem, lift,
                                    parallel_fb_solve, project_diagonal)
from splitkit.scenarios import oracle_product_normal_set, project_onto_affine
from splitkit.splitting import FB, affine_form


def test_lift_and_average():
    np.testing.assert_array_equal(lift([1.0, 2.0], 2), [1.0, 2.0, 1.0, 2.0])
    np.testing.assert_array_equal(lift(np.zeros(3), 4), np.zeros(12))
    np.testing.assert_array_equal(average([1.0, 2.0, 3.0, 4.0], 2), [2.0, 3.0])
    x = np.array([0.3, -1.0, 2.0])
    np.testing.assert_array_equal(average(lift(x, 3), 3), x)
    u = np.array([1.0, -2.0])
    np.testing.assert_array_equal(average(np.concatenate([u, -u]), 2), [0.0, 0.0])
    with pytest.raises(DimensionError):
        average([1.0, 2.0, 3.0], 2)


def test_project_diagonal():
    xx = lift([1.0, 5.0], 3)
    np.testing.assert_array_equal(project_diagonal(xx, 3), xx)
    np.testing.assert_array_equal(project_diagonal([0.0, 2.0], 2), [1.0, 1.0])
    rng = np.random.default_rng(0)
    xx = rng.standard_normal(6)
    r = (xx - project_diagonal(xx, 3)).reshape(3, 2)
    np.testing.assert_allclose(r.sum(axis=0), 0.0, atol=1e-14)


def test_lifted_map_examples():
    zero = ProductProblem((ConstOp([0.0, 0.0]), ConstOp([0.0, 0.0])), (1.0, 1.0))
    T = FB(build_lifted_problem(zero))
    xx = np.array([1.0, 2.0, 3.0, -4.0])
    np.testing.assert_array_equal(T(xx), project_diagonal(xx, 2))
    # affine operators with a common zero z*: lift(z*) is fixed
    z = np.array([1.0, -1.0])
    ops = (AffineOp.from_matrix(np.diag([0.5, 1.0]), -np.diag([0.5, 1.0]) @ z),
           AffineOp.from_matrix([[0.5, 0.2], [-0.2, 0.5]], -np.array([[0.5, 0.2], [-0.2, 0.5]]) @ z))
    T = FB(build_lifted_problem(ProductProblem(ops, (1.0, 1.0))))
    np.testing.assert_allclose(T(lift(z, 2)), lift(z, 2), atol=1e-15)
    c = np.array([0.3, -0.7])
    opp = ProductProblem((ConstOp(c), ConstOp(-c)), (1.0, 1.0))
    res = parallel_fb_solve(opp, [2.0, 2.0])
    assert np.linalg.norm(res.v) <= 1e-12
    np.testing.assert_array_equal(res.z, [2.0, 2.0])


def test_product_problem_validation():
    with pytest.raises(ValueError):
        ProductProblem((ConstOp([0.0]),), (1.0,))
    with pytest.raises(ValueError):
        ProductProblem((ConstOp([0.0]), ConstOp([1.0])), (1.0,))
    with pytest.raises(TypeError):
        ProductProblem((ConstOp([0.0]), NormalCone(Ball([0.0], 1.0))), (1.0, 1.0))
    with pytest.raises(DimensionError):
        ProductProblem((ConstOp([0.0]), ConstOp([0.0, 1.0])), (1.0, 1.0))
    with pytest.raises(ValueError):
        ProductProblem((AffineOp.from_matrix([[4.0]]), ConstOp([0.0])), (1.0, 1.0))


def test_parallel_intersecting_balls():
    C1, C2 = Ball([0.0, 0.0], 1.0), Ball([1.5, 0.0], 1.0)
    res = parallel_fb_solve(ProductProblem((GradHalfDistSq(C1), GradHalfDistSq(C2)), (1.0, 1.0)),
                            [0.7, 3.0], tol=1e-10)
    assert res.status is NormalStatus.FOUND
    assert np.linalg.norm(res.v) <= 1e-6 and res.sum_residual <= 1e-6
    assert C1.project(res.z) == pytest.approx(res.z, abs=1e-6)


def test_parallel_constants_match_lifted_closed_form():
    pp = ProductProblem((ConstOp([1.0, 0.0]), ConstOp([0.0, 1.0]), ConstOp([0.5, 0.5])),
                        (1.0, 1.0, 1.0))
    res = parallel_fb_solve(pp, [0.0, 0.0])
    oracle = v_affine_closed_form(affine_form(FB(build_lifted_problem(pp))))
    np.testing.assert_allclose(res.v, oracle, atol=1e-6)
    assert np.linalg.norm(res.v) > 0.1


def test_parallel_affine_limit_matches_least_squares_set():
    line = AffineSubspace([0.0, 1.0], [[1.0], [0.0]])
    pp = ProductProblem((GradHalfDistSq(line), ConstOp([1.0, 1.0])), (1.0, 1.0))
    lifted = build_lifted_problem(pp)
    T = FB(lifted)
    v = v_affine_closed_form(affine_form(T))
    point, dirs = oracle_product_normal_set([np.diag([0.0, 1.0]), np.zeros((2, 2))],
                                            [np.array([0.0, -1.0]), np.array([1.0, 1.0])], 1.0, v)
    xx = lift([2.0, -3.0], 2)
    y = xx.copy()
    for _ in range(2000):
        y = v + T(y)
    np.testing.assert_allclose(y, project_onto_affine(point, dirs, xx), atol=1e-8)
