import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from splitkit.convex_core import (AffineSubspace, Ball, Box, Halfspace, HyperbolaEpigraph, Orthant,
                                  Ray, Translate, distance, grad_half_dist_sq, project)
from splitkit.operators import GradHalfDistSq, NormalCone, Scaled, resolvent
from splitkit.splitting import SplitProblem, t_dr, t_fb

coord = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
vec2 = arrays(np.float64, 2, elements=coord)

SETS = [Orthant(("+", "-")), Box([-1.0, 0.0], [1.0, 2.0]), AffineSubspace([1.0, 0.0], [[1.0], [3.0]]),
        Halfspace([1.0, -2.0], 0.5), Ball([1.0, 1.0], 2.0), HyperbolaEpigraph(), Ray([-1.0, 2.0]),
        Translate(HyperbolaEpigraph(), [-1.0, 3.0])]
set_strategy = st.sampled_from(SETS)


@settings(max_examples=200, deadline=None)
@given(set_strategy, vec2)
def test_projection_is_idempotent(S, x):
    p = project(S, x)
    np.testing.assert_allclose(project(S, p), p, atol=1e-9 * (1 + np.abs(p).max()))


@settings(max_examples=200, deadline=None)
@given(set_strategy, vec2, vec2)
def test_projection_is_firmly_nonexpansive(S, x, y):
    d = project(S, x) - project(S, y)
    assert d @ d <= (x - y) @ d + 1e-9 * (1 + (x - y) @ (x - y))


@settings(max_examples=200, deadline=None)
@given(set_strategy, vec2, vec2)
def test_translation_formula(S, a, x):
    np.testing.assert_allclose(project(Translate(S, a), x), a + project(S, x - a),
                               atol=1e-12 * (1 + np.abs(x).max() + np.abs(a).max()))


@settings(max_examples=200, deadline=None)
@given(set_strategy, vec2)
def test_projection_variational_inequality(S, x):
    # <x - P x, c - P x> <= 0 for points c of the set
    p = project(S, x)
    rng = np.random.default_rng(0)
    for c in (project(S, z) for z in 10 * rng.standard_normal((5, 2))):
        assert (x - p) @ (c - p) <= 1e-8 * (1 + np.abs(x).max()) ** 2


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([Ball([0.0, 0.0], 1.0), HyperbolaEpigraph(), Halfspace([1.0, 2.0], 0.0)]),
       arrays(np.float64, 2, elements=st.floats(-10, 10)))
def test_gradient_matches_finite_differences(S, x):
    g = grad_half_dist_sq(S, x)
    if np.linalg.norm(g) < 1e-2:
        return
    h = 1e-6
    f = lambda z: 0.5 * distance(S, z) ** 2
    fd = np.array([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(2)])
    assert np.linalg.norm(fd - g) <= 1e-4 * np.linalg.norm(g)


@settings(max_examples=100, deadline=None)
@given(set_strategy, st.floats(0.1, 10), vec2, vec2)
def test_scaled_gradient_resolvent_is_firmly_nonexpansive(S, s, x, y):
    J = lambda z: resolvent(Scaled(s, GradHalfDistSq(S)), z)
    d = J(x) - J(y)
    assert d @ d <= (x - y) @ d + 1e-9 * (1 + (x - y) @ (x - y))


@settings(max_examples=100, deadline=None)
@given(set_strategy, set_strategy, vec2, vec2)
def test_fb_and_dr_maps_are_averaged(U, V, x, y):
    p = SplitProblem(GradHalfDistSq(U), NormalCone(V), validate=False)
    for T, k in ((lambda z: t_fb(p, z), 0.5), (lambda z: t_dr(p, z), 1.0)):
        a = T(x) - T(y)
        c = (x - T(x)) - (y - T(y))
        assert a @ a + k * (c @ c) <= (x - y) @ (x - y) + 1e-8 * (1 + (x - y) @ (x - y))
