"""JSON (de)serialization of sets, operators, problems and run configurations.

Every object is a JSON object with a ``"kind"`` tag plus variant fields;
matrices are row-major nested lists. See ``docs/config-schema.md``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .convex_core import (AffineMap, AffineSubspace, Ball, Box, ConvexSet, Diagonal,
                          Halfspace, HyperbolaEpigraph, LinearMap, Orthant, Product, Ray,
                          Translate)
from .errors import ConfigError
from .operators import (AffineOp, Blockwise, ConstOp, DualInverse, GradHalfDistSq,
                        InnerShift, MonotoneOp, NormalCone, OuterShift, Scaled)

__all__ = ["set_to_dict", "set_from_dict", "op_to_dict", "op_from_dict", "RunConfig",
           "load_config", "parse_config"]


def _vec(obj, key, path):
    if key not in obj:
        raise ConfigError("missing field", f"{path}.{key}")
    try:
        v = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("expected a list of numbers", f"{path}.{key}") from None
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise ConfigError("expected a flat list of finite numbers", f"{path}.{key}")
    return v


def _mat(obj, key, path):
    if key not in obj:
        raise ConfigError("missing field", f"{path}.{key}")
    try:
        m = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("expected a nested list of numbers", f"{path}.{key}") from None
    if m.ndim != 2:
        raise ConfigError("expected a row-major matrix (list of rows)", f"{path}.{key}")
    return m


def _num(obj, key, path, default=None):
    if key not in obj:
        if default is None:
            raise ConfigError("missing field", f"{path}.{key}")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError("expected a number", f"{path}.{key}")
    return val


def _kind(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", path)
    if "kind" not in obj:
        raise ConfigError("missing field", f"{path}.kind")
    return obj["kind"]


def _list(x):
    return np.asarray(x).tolist()


def set_to_dict(s: ConvexSet) -> dict:
    if isinstance(s, Orthant):
        return {"kind": "orthant", "signs": ["+" if c > 0 else "-" for c in s.signs]}
    if isinstance(s, Box):
        return {"kind": "box", "lo": _list(s.lo), "hi": _list(s.hi)}
    if isinstance(s, AffineSubspace):
        return {"kind": "affine_subspace", "offset": _list(s.offset), "basis": _list(s.basis)}
    if isinstance(s, Halfspace):
        return {"kind": "halfspace", "normal": _list(s.normal), "rhs": s.rhs}
    if isinstance(s, Ball):
        return {"kind": "ball", "center": _list(s.center), "radius": s.radius}
    if isinstance(s, HyperbolaEpigraph):
        return {"kind": "hyperbola_epigraph"}
    if isinstance(s, Translate):
        return {"kind": "translate", "inner": set_to_dict(s.inner), "shift": _list(s.shift)}
    if isinstance(s, Product):
        return {"kind": "product", "parts": [set_to_dict(p) for p in s.parts]}
    if isinstance(s, Ray):
        return {"kind": "ray", "direction": _list(s.direction)}
    if isinstance(s, Diagonal):
        return {"kind": "diagonal", "m": s.m, "d": s.d}
    raise TypeError(f"cannot serialize {type(s).__name__}")


def set_from_dict(obj: dict, path: str = "set") -> ConvexSet:
    kind = _kind(obj, path)
    try:
        if kind == "orthant":
            if "signs" in obj:
                return Orthant(tuple(obj["signs"]))
            return Orthant.positive(int(_num(obj, "dim", path)))
        if kind == "box":
            return Box(_vec(obj, "lo", path), _vec(obj, "hi", path))
        if kind == "affine_subspace":
            off = _vec(obj, "offset", path)
            basis = np.asarray(obj.get("basis", np.zeros((off.size, 0))), dtype=float)
            if basis.size == 0:
                basis = np.zeros((off.size, 0))
            return AffineSubspace(off, basis)
        if kind == "halfspace":
            return Halfspace(_vec(obj, "normal", path), _num(obj, "rhs", path))
        if kind == "ball":
            return Ball(_vec(obj, "center", path), _num(obj, "radius", path))
        if kind == "hyperbola_epigraph":
            return HyperbolaEpigraph()
        if kind == "translate":
            return Translate(set_from_dict(obj.get("inner"), f"{path}.inner"), _vec(obj, "shift", path))
        if kind == "product":
            return Product(tuple(set_from_dict(p, f"{path}.parts[{i}]")
                                 for i, p in enumerate(obj.get("parts", []))))
        if kind == "ray":
            return Ray(_vec(obj, "direction", path))
        if kind == "diagonal":
            return Diagonal(int(_num(obj, "m", path)), int(_num(obj, "d", path)))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path) from None
    raise ConfigError(f"unknown set kind {kind!r}", f"{path}.kind")


def op_to_dict(op: MonotoneOp) -> dict:
    if isinstance(op, AffineOp):
        return {"kind": "affine", "L": _list(op.M.L.entries), "b": _list(op.M.b)}
    if isinstance(op, ConstOp):
        return {"kind": "const", "a": _list(op.a)}
    if isinstance(op, NormalCone):
        return {"kind": "normal_cone", "set": set_to_dict(op.set)}
    if isinstance(op, GradHalfDistSq):
        return {"kind": "grad_half_dist_sq", "set": set_to_dict(op.set)}
    if isinstance(op, Scaled):
        return {"kind": "scaled", "alpha": op.alpha, "inner": op_to_dict(op.inner)}
    if isinstance(op, InnerShift):
        return {"kind": "inner_shift", "w": _list(op.w), "inner": op_to_dict(op.inner)}
    if isinstance(op, OuterShift):
        return {"kind": "outer_shift", "w": _list(op.w), "inner": op_to_dict(op.inner)}
    if isinstance(op, Blockwise):
        return {"kind": "blockwise", "parts": [op_to_dict(p) for p in op.parts]}
    if isinstance(op, DualInverse):
        return {"kind": "dual_inverse", "inner": op_to_dict(op.inner)}
    raise TypeError(f"cannot serialize {type(op).__name__}")


def op_from_dict(obj: dict, path: str = "op") -> MonotoneOp:
    kind = _kind(obj, path)
    try:
        if kind == "affine":
            L = _mat(obj, "L", path)
            b = _vec(obj, "b", path) if "b" in obj else np.zeros(L.shape[0])
            return AffineOp(AffineMap(LinearMap(L), b))
        if kind == "const":
            return ConstOp(_vec(obj, "a", path))
        if kind == "normal_cone":
            return NormalCone(set_from_dict(obj.get("set"), f"{path}.set"))
        if kind == "grad_half_dist_sq":
            return GradHalfDistSq(set_from_dict(obj.get("set"), f"{path}.set"))
        if kind == "scaled":
            return Scaled(_num(obj, "alpha", path), op_from_dict(obj.get("inner"), f"{path}.inner"))
        if kind == "inner_shift":
            return InnerShift(_vec(obj, "w", path), op_from_dict(obj.get("inner"), f"{path}.inner"))
        if kind == "outer_shift":
            return OuterShift(_vec(obj, "w", path), op_from_dict(obj.get("inner"), f"{path}.inner"))
        if kind == "blockwise":
            return Blockwise(tuple(op_from_dict(p, f"{path}.parts[{i}]")
                                   for i, p in enumerate(obj.get("parts", []))))
        if kind == "dual_inverse":
            return DualInverse(op_from_dict(obj.get("inner"), f"{path}.inner"))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path) from None
    raise ConfigError(f"unknown operator kind {kind!r}", f"{path}.kind")


@dataclass
class RunConfig:
    """One CLI run.

    Exactly one problem description is present: ``A``/``B`` (a split pair),
    ``map`` (alternating projections between ``U`` and ``V``) or ``product``.
    ``shift`` optionally offsets the forward-backward map (``x -> w + T x``).
    """

    dim: int
    x0: np.ndarray
    A: MonotoneOp | None = None
    B: MonotoneOp | None = None
    map_sets: tuple | None = None
    product: Any = None
    shift: np.ndarray | None = None
    method: str = "fb"
    tol: float = 1e-8
    max_iter: int = 100_000
    divergence_threshold: float = 1e8
    seed: int = 42
    out_dir: str | None = None
    n_stages: int | None = None
    stage_len: int = 1000
    raw: dict = field(default_factory=dict, repr=False)

    def split_problem(self):
        from .splitting import SplitProblem, map_problem
        from .product_space import build_lifted_problem
        if self.product is not None:
            return build_lifted_problem(self.product)
        if self.map_sets is not None:
            return map_problem(*self.map_sets)
        return SplitProblem(self.A, self.B)

    def start(self):
        from .product_space import lift
        if self.product is not None:
            return lift(self.x0, self.product.m)
        return self.x0

    def fixed_point_map(self):
        from .splitting import DR, FB, Shifted
        p = self.split_problem()
        T = DR(p) if self.method == "dr" else FB(p)
        return T if self.shift is None else Shifted(T, self.shift)


def parse_config(obj: dict) -> RunConfig:
    from .product_space import ProductProblem
    if not isinstance(obj, dict):
        raise ConfigError("top level must be an object", "config")
    if "dim" not in obj:
        raise ConfigError("missing field", "dim")
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ConfigError("must be a positive integer", "dim")
    x0 = _vec(obj, "x0", "config") if "x0" in obj else np.zeros(dim)
    if x0.size != dim:
        raise ConfigError(f"length {x0.size} does not match dim={dim}", "x0")
    cfg = RunConfig(dim=dim, x0=x0, raw=obj)
    present = [k for k in ("A", "map", "product") if k in obj]
    if len(present) != 1:
        raise ConfigError("exactly one of 'A'/'B', 'map' or 'product' is required", "config")
    try:
        if "A" in obj:
            if "B" not in obj:
                raise ConfigError("missing field", "B")
            cfg.A = op_from_dict(obj["A"], "A")
            cfg.B = op_from_dict(obj["B"], "B")
            if cfg.A.dim != dim or cfg.B.dim != dim:
                raise ConfigError(f"operator dimension does not match dim={dim}", "A")
        elif "map" in obj:
            m = obj["map"]
            if not isinstance(m, dict):
                raise ConfigError("expected an object with U and V", "map")
            U = set_from_dict(m.get("U"), "map.U")
            V = set_from_dict(m.get("V"), "map.V")
            if U.dim != dim or V.dim != dim:
                raise ConfigError(f"set dimension does not match dim={dim}", "map")
            cfg.map_sets = (U, V)
        else:
            p = obj["product"]
            if not isinstance(p, dict) or p.get("kind", "product") != "product":
                raise ConfigError("expected {'kind': 'product', 'ops': [...], 'alphas': [...]}", "product")
            ops = tuple(op_from_dict(o, f"product.ops[{i}]") for i, o in enumerate(p.get("ops", [])))
            if "alphas" not in p:
                raise ConfigError("missing field", "product.alphas")
            cfg.product = ProductProblem(ops, tuple(p["alphas"]))
            if cfg.product.d != dim:
                raise ConfigError(f"operator dimension does not match dim={dim}", "product")
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), present[0]) from None
    if "shift" in obj:
        cfg.shift = _vec(obj, "shift", "config")
    cfg.method = obj.get("method", "fb")
    if cfg.method not in ("fb", "dr"):
        raise ConfigError("must be 'fb' or 'dr'", "method")
    cfg.tol = float(_num(obj, "tol", "config", 1e-8))
    cfg.max_iter = int(_num(obj, "max_iter", "config", 100_000))
    cfg.divergence_threshold = float(_num(obj, "divergence_threshold", "config", 1e8))
    cfg.seed = int(_num(obj, "seed", "config", 42))
    cfg.stage_len = int(_num(obj, "stage_len", "config", 1000))
    if "n_stages" in obj:
        cfg.n_stages = int(_num(obj, "n_stages", "config"))
    cfg.out_dir = obj.get("out_dir")
    return cfg


def load_config(path) -> RunConfig:
    """Read and validate a JSON run configuration.

    Raises
    ------
    ConfigError
        With the line/column of a JSON syntax error, or the dotted path of the
        offending field.
    """
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                          str(path)) from None
    return parse_config(obj)
