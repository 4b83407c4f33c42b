import json

import numpy as np
import pytest

from splitkit.config import (load_config, op_from_dict, op_to_dict, parse_config, set_from_dict,
                             set_to_dict)
from splitkit.convex_core import (AffineSubspace, Ball, Box, Diagonal, Halfspace, HyperbolaEpigraph,
                                  Orthant, Product, Ray, Translate, project)
from splitkit.errors import ConfigError
from splitkit.operators import (AffineOp, Blockwise, ConstOp, DualInverse, GradHalfDistSq,
                                InnerShift, NormalCone, OuterShift, Scaled, resolvent)

SETS = [
    Orthant(("+", "-")),
    Box([0.0, -1.0], [1.0, 2.0]),
    AffineSubspace([1.0, 0.0], [[1.0], [1.0]]),
    AffineSubspace([1.0, 2.0], np.zeros((2, 0))),
    Halfspace([1.0, 2.0], 0.5),
    Ball([0.5, 0.5], 2.0),
    HyperbolaEpigraph(),
    Translate(Ball([0.0, 0.0], 1.0), [3.0, 0.0]),
    Product((Orthant.positive(1), Ball([0.0], 1.0))),
    Ray([1.0, 1.0]),
    Diagonal(2, 1),
]


@pytest.mark.parametrize("s", SETS, ids=lambda s: type(s).__name__)
def test_set_roundtrip(s):
    obj = json.loads(json.dumps(set_to_dict(s)))
    t = set_from_dict(obj)
    rng = np.random.default_rng(1)
    for x in 3 * rng.standard_normal((10, s.dim)):
        np.testing.assert_allclose(project(t, x), project(s, x), atol=1e-14)


OPS = [
    AffineOp.from_matrix([[1.0, 0.5], [-0.5, 1.0]], [1.0, 0.0]),
    ConstOp([1.0, 2.0]),
    NormalCone(Ball([0.0, 0.0], 1.0)),
    GradHalfDistSq(HyperbolaEpigraph()),
    Scaled(0.5, ConstOp([1.0, 1.0])),
    InnerShift([1.0, 0.0], NormalCone(Orthant.positive(2))),
    OuterShift([1.0, 0.0], NormalCone(Orthant.positive(2))),
    Blockwise((ConstOp([1.0]), NormalCone(Orthant.positive(1)))),
    DualInverse(NormalCone(AffineSubspace([0.0, 0.0], [[1.0], [0.0]]))),
]


@pytest.mark.parametrize("op", OPS, ids=lambda o: type(o).__name__)
def test_op_roundtrip(op):
    q = op_from_dict(json.loads(json.dumps(op_to_dict(op))))
    rng = np.random.default_rng(2)
    for x in 3 * rng.standard_normal((10, op.dim)):
        np.testing.assert_allclose(resolvent(q, x), resolvent(op, x), atol=1e-14)


def test_defaults():
    cfg = parse_config({"dim": 2, "A": {"kind": "const", "a": [0, 0]},
                        "B": {"kind": "const", "a": [0, 0]}})
    assert (cfg.tol, cfg.max_iter, cfg.divergence_threshold, cfg.seed) == (1e-8, 100_000, 1e8, 42)
    np.testing.assert_array_equal(cfg.x0, [0.0, 0.0])


@pytest.mark.parametrize("obj, field", [
    ({"x0": [1]}, "dim"),
    ({"dim": 2, "A": {"kind": "const", "a": [0, 0]}}, "B"),
    ({"dim": 2, "map": {"U": {"kind": "ball", "center": [0, 0]}, "V": {"kind": "ball", "center": [0, 0], "radius": 1}}},
     "map.U.radius"),
    ({"dim": 2, "A": {"kind": "nope"}, "B": {"kind": "const", "a": [0, 0]}}, "A.kind"),
    ({"dim": 2, "A": {"kind": "const", "a": [0, 0]}, "B": {"kind": "const", "a": [0, 0]},
      "method": "admm"}, "method"),
    ({"dim": 3, "A": {"kind": "const", "a": [0, 0]}, "B": {"kind": "const", "a": [0, 0]}}, "A"),
    ({"dim": 2}, "config"),
])
def test_errors_name_the_field(obj, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(obj)
    assert exc.value.field == field


def test_json_syntax_error_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2,\n "x0": [1, }')
    with pytest.raises(ConfigError, match="line 2, column"):
        load_config(p)


def test_product_and_map_configs():
    cfg = parse_config({"dim": 2, "x0": [1, 2], "product": {
        "kind": "product", "alphas": [1, 1],
        "ops": [{"kind": "const", "a": [1, 0]}, {"kind": "const", "a": [0, 1]}]}})
    np.testing.assert_array_equal(cfg.start(), [1, 2, 1, 2])
    assert cfg.split_problem().dim == 4
    cfg = parse_config({"dim": 2, "map": {"U": {"kind": "ball", "center": [0, 0], "radius": 1},
                                          "V": {"kind": "halfspace", "normal": [1, 0], "rhs": 0}},
                        "method": "dr", "shift": [1, 0]})
    T = cfg.fixed_point_map()
    assert T.dim == 2
