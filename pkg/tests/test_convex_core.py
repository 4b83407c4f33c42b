import math

import numpy as np
import pytest

from splitkit.convex_core import (AffineMap, AffineSubspace, Ball, Box, Diagonal, Halfspace,
                                  HyperbolaEpigraph, LinearMap, Orthant, Product, Ray, Translate,
                                  contains, distance, grad_half_dist_sq, hyperbola_boundary_parameter,
                                  orthonormal_basis, polar_recession_cone, project)
from splitkit.errors import DimensionError, UnsupportedSetError
from splitkit.scenarios import oracle_hyperbola_projection


def test_orthant_clamp():
    assert np.array_equal(project(Orthant.positive(2), [-1.0, 2.0]), [0.0, 2.0])
    assert np.array_equal(project(Orthant(("+", "-")), [-1.0, 2.0]), [0.0, 0.0])


def test_translate_formula():
    S = Ball([0.0, 0.0], 1.0)
    a = np.array([3.0, -1.0])
    x = np.array([0.5, 4.0])
    np.testing.assert_allclose(project(Translate(S, a), x), a + project(S, x - a), atol=1e-15)


def test_hyperbola_projection_of_origin():
    p = project(HyperbolaEpigraph(), [0.0, 0.0])
    np.testing.assert_allclose(p, oracle_hyperbola_projection(0.0, 0.0), atol=1e-10)
    np.testing.assert_allclose(p, [1.0, 1.0], atol=1e-12)
    assert distance(HyperbolaEpigraph(), [0.0, 0.0]) == pytest.approx(math.sqrt(2), abs=1e-12)
    np.testing.assert_allclose(grad_half_dist_sq(HyperbolaEpigraph(), [0.0, 0.0]), [-1.0, -1.0],
                               atol=1e-12)


@pytest.mark.parametrize("x", [(-3.0, 0.5), (0.2, -4.0), (5.0, 0.0), (0.01, 0.01), (-1.0, 7.0),
                               (40.0, -2.0), (2.0, 0.4)])
def test_hyperbola_projection_matches_grid_oracle(x):
    p = project(HyperbolaEpigraph(), x)
    np.testing.assert_allclose(p, oracle_hyperbola_projection(*x), atol=1e-7)


def test_hyperbola_inside_is_fixed():
    x = np.array([2.0, 3.0])
    assert np.array_equal(project(HyperbolaEpigraph(), x), x)
    assert x in HyperbolaEpigraph()


def test_hyperbola_boundary_parameter_root():
    t = hyperbola_boundary_parameter(-2.0, 1.5)
    # optimality: (t - a) t^2 = (1/t - b)
    assert (t + 2.0) * t ** 2 == pytest.approx(1 / t - 1.5, abs=1e-10)


def test_distance_examples():
    assert distance(Ball([0.0, 0.0], 1.0), [2.0, 0.0]) == 1.0
    assert distance(Box([0, 0], [1, 1]), [0.5, 0.5]) == 0.0
    np.testing.assert_array_equal(grad_half_dist_sq(Orthant.positive(2), [-1.0, 2.0]), [-1.0, 0.0])
    assert np.array_equal(grad_half_dist_sq(Ball([0, 0], 2.0), [1.0, 1.0]), [0.0, 0.0])


def test_affine_subspace_projection_and_complement():
    V = AffineSubspace([0.0, 1.0, 0.0], [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(project(V, [3.0, 5.0, -2.0]), [3.0, 1.0, -2.0], atol=1e-15)
    W = V.orthogonal_complement()
    assert W.rank == 1
    np.testing.assert_allclose(project(W, [3.0, 5.0, -2.0]), [0.0, 5.0, 0.0], atol=1e-15)


def test_affine_subspace_basis_is_orthonormalized():
    V = AffineSubspace([0.0, 0.0, 0.0], [[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(V.basis.T @ V.basis, np.eye(2), atol=1e-14)
    assert orthonormal_basis(np.array([[1.0, 2.0], [2.0, 4.0]])).shape[1] == 1


def test_halfspace_ball_box_ray_diagonal():
    H = Halfspace([1.0, 1.0], 1.0)
    np.testing.assert_allclose(project(H, [2.0, 2.0]), [0.5, 0.5])
    np.testing.assert_allclose(project(Ball([1.0, 0.0], 2.0), [5.0, 0.0]), [3.0, 0.0])
    np.testing.assert_allclose(project(Box([0, 0], [1, 2]), [3.0, -1.0]), [1.0, 0.0])
    np.testing.assert_allclose(project(Ray([1.0, 0.0]), [-2.0, 3.0]), [0.0, 0.0])
    np.testing.assert_allclose(project(Ray([1.0, 0.0]), [2.0, 3.0]), [2.0, 0.0])
    np.testing.assert_allclose(project(Diagonal(2, 1), [0.0, 2.0]), [1.0, 1.0])


def test_product_projects_blockwise():
    P = Product((Orthant.positive(1), Ball([0.0, 0.0], 1.0)))
    np.testing.assert_allclose(project(P, [-1.0, 3.0, 4.0]), [0.0, 0.6, 0.8])


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        project(Ball([0.0, 0.0], 1.0), [1.0, 2.0, 3.0])


def test_invalid_sets():
    with pytest.raises(ValueError):
        Ball([0.0], -1.0)
    with pytest.raises(ValueError):
        Box([1.0], [0.0])
    with pytest.raises(ValueError):
        Halfspace([0.0, 0.0], 1.0)


def test_contains():
    assert contains(Orthant.positive(2), [0.0, 1.0])
    assert not contains(Orthant.positive(2), [-1e-6, 1.0])


def test_polar_recession_cones():
    V = AffineSubspace([0.0, 0.0], [[1.0], [0.0]])
    W = polar_recession_cone(V)
    np.testing.assert_allclose(project(W, [3.0, 4.0]), [0.0, 4.0], atol=1e-15)
    N = polar_recession_cone(HyperbolaEpigraph())
    np.testing.assert_array_equal(project(N, [1.0, -2.0]), [0.0, -2.0])
    full = polar_recession_cone(Ball([1.0, 1.0], 2.0))
    np.testing.assert_array_equal(project(full, [7.0, -3.0]), [7.0, -3.0])
    np.testing.assert_array_equal(project(polar_recession_cone(Orthant.positive(2)), [1.0, -1.0]),
                                  [0.0, -1.0])
    with pytest.raises(UnsupportedSetError):
        polar_recession_cone(Box([0.0], [1.0]))


def test_linear_and_affine_maps():
    L = LinearMap(np.diag([0.5, 1.0]), nonexpansive=True)
    T = AffineMap(L, [1.0, 0.0])
    np.testing.assert_allclose(T.power_apply(np.zeros(2), 2), [1.5, 0.0])
    with pytest.raises(ValueError):
        LinearMap(2 * np.eye(2), nonexpansive=True)
    with pytest.raises(DimensionError):
        LinearMap(np.ones((2, 3)))
