"""Catalog of maximally monotone operators with computable resolvents.

Single-valued operators support :func:`apply`; every operator supports
:func:`resolvent`. Set-valuedness is never materialized: a normal cone is
only ever used through its resolvent (the projector).

Scaling is threaded through the resolvent recursion, so ``Scaled(alpha, op)``
costs nothing extra for any catalog variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .convex_core import (AffineMap, ConvexSet, LinearMap, as_vector,
                          is_affine_set, _frozen)
from .errors import DimensionError, NotSingleValuedError, NumericalError
from .tolerances import DEFAULT_TOLERANCES

__all__ = [
    "MonotoneOp", "AffineOp", "ConstOp", "NormalCone", "GradHalfDistSq", "Scaled",
    "InnerShift", "OuterShift", "Blockwise", "DualInverse",
    "apply", "resolvent", "reflected_resolvent", "inverse_resolvent_complement",
    "dual_resolvent", "check_firmly_nonexpansive", "cocoercive_rescale",
    "CocoercivityWitness", "is_single_valued", "affine_parts", "has_affine_resolvent",
    "inverse_affine",
]


class MonotoneOp:
    dim: int


@dataclass(frozen=True, eq=False)
class AffineOp(MonotoneOp):
    """``x -> L x + b`` with ``L + L^T`` positive semidefinite."""

    M: AffineMap

    def __post_init__(self):
        L = self.M.L.entries
        sym = 0.5 * (L + L.T)
        lam = float(np.linalg.eigvalsh(sym).min())
        if lam < -DEFAULT_TOLERANCES.monotone_eig:
            raise ValueError(f"affine operator is not monotone (min eigenvalue of sym part {lam:.3e})")

    @classmethod
    def from_matrix(cls, L, b=None):
        L = np.asarray(L, dtype=float)
        b = np.zeros(L.shape[0]) if b is None else b
        return cls(AffineMap(LinearMap(L), b))

    @property
    def dim(self):
        return self.M.dim


@dataclass(frozen=True, eq=False)
class ConstOp(MonotoneOp):
    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(as_vector(self.a)))

    @property
    def dim(self):
        return self.a.size


@dataclass(frozen=True, eq=False)
class NormalCone(MonotoneOp):
    set: ConvexSet

    @property
    def dim(self):
        return self.set.dim


@dataclass(frozen=True, eq=False)
class GradHalfDistSq(MonotoneOp):
    """``x -> x - P_C x``, the gradient of half the squared distance to C."""

    set: ConvexSet

    @property
    def dim(self):
        return self.set.dim


@dataclass(frozen=True, eq=False)
class Scaled(MonotoneOp):
    alpha: float
    inner: MonotoneOp

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("scale factor must be positive")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def dim(self):
        return self.inner.dim


@dataclass(frozen=True, eq=False)
class InnerShift(MonotoneOp):
    """``x -> inner(x - w)``."""

    w: np.ndarray
    inner: MonotoneOp

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(as_vector(self.w, self.inner.dim)))

    @property
    def dim(self):
        return self.inner.dim


@dataclass(frozen=True, eq=False)
class OuterShift(MonotoneOp):
    """``x -> -w + inner(x)``."""

    w: np.ndarray
    inner: MonotoneOp

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(as_vector(self.w, self.inner.dim)))

    @property
    def dim(self):
        return self.inner.dim


@dataclass(frozen=True, eq=False)
class Blockwise(MonotoneOp):
    """Diagonal product operator acting on concatenated blocks."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise DimensionError("blockwise operator needs at least one part")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return sum(p.dim for p in self.parts)

    def split(self, x):
        out, i = [], 0
        for p in self.parts:
            out.append(x[i:i + p.dim])
            i += p.dim
        return out


@dataclass(frozen=True, eq=False)
class DualInverse(MonotoneOp):
    """``(-Id) o inner^{-1} o (-Id)``; only its resolvent is available."""

    inner: MonotoneOp

    @property
    def dim(self):
        return self.inner.dim


def inverse_affine(op: AffineOp) -> AffineOp:
    """Inverse of an affine operator with invertible linear part."""
    L = op.M.L.entries
    try:
        Li = np.linalg.inv(L)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("linear part is singular", np.linalg.cond(L)) from exc
    return AffineOp.from_matrix(Li, -Li @ op.M.b)


def is_single_valued(op: MonotoneOp) -> bool:
    if isinstance(op, (AffineOp, ConstOp, GradHalfDistSq)):
        return True
    if isinstance(op, (Scaled, InnerShift, OuterShift)):
        return is_single_valued(op.inner)
    if isinstance(op, Blockwise):
        return all(is_single_valued(p) for p in op.parts)
    return False


def _apply(op, x, s):
    if isinstance(op, AffineOp):
        return s * (op.M.L.entries @ x + op.M.b)
    if isinstance(op, ConstOp):
        return s * op.a
    if isinstance(op, GradHalfDistSq):
        return s * (x - op.set._project(x, DEFAULT_TOLERANCES))
    if isinstance(op, Scaled):
        return _apply(op.inner, x, s * op.alpha)
    if isinstance(op, InnerShift):
        return _apply(op.inner, x - op.w, s)
    if isinstance(op, OuterShift):
        return _apply(op.inner, x, s) - s * op.w
    if isinstance(op, Blockwise):
        return np.concatenate([_apply(p, xi, s) for p, xi in zip(op.parts, op.split(x))])
    raise NotSingleValuedError(f"{type(op).__name__} is set-valued; only its resolvent is available")


def apply(op: MonotoneOp, x) -> np.ndarray:
    """Evaluate a single-valued operator.

    Raises
    ------
    NotSingleValuedError
        For normal cones and dual inverses.
    """
    return _apply(op, as_vector(x, op.dim), 1.0)


def _resolvent(op, x, s):
    # resolvent of s*op at x
    if isinstance(op, AffineOp):
        L, b = op.M.L.entries, op.M.b
        K = np.eye(L.shape[0]) + s * L
        rhs = x - s * b
        try:
            y = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("singular resolvent system", np.linalg.cond(K)) from exc
        if np.linalg.norm(K @ y - rhs) > 1e-10 * (1.0 + np.linalg.norm(rhs)):
            raise NumericalError("inaccurate resolvent solve", np.linalg.cond(K))
        return y
    if isinstance(op, ConstOp):
        return x - s * op.a
    if isinstance(op, NormalCone):
        return op.set._project(x, DEFAULT_TOLERANCES)
    if isinstance(op, GradHalfDistSq):
        p = op.set._project(x, DEFAULT_TOLERANCES)
        return x + (s / (1.0 + s)) * (p - x)
    if isinstance(op, Scaled):
        return _resolvent(op.inner, x, s * op.alpha)
    if isinstance(op, InnerShift):
        return op.w + _resolvent(op.inner, x - op.w, s)
    if isinstance(op, OuterShift):
        return _resolvent(op.inner, x + s * op.w, s)
    if isinstance(op, Blockwise):
        return np.concatenate([_resolvent(p, xi, s) for p, xi in zip(op.parts, op.split(x))])
    if isinstance(op, DualInverse):
        # J_{s C^{-1}} = Id - s J_{C/s}(./s) with C = inner^v and J_{C/s}(y) = -J_{inner/s}(-y)
        return x + s * _resolvent(op.inner, -x / s, 1.0 / s)
    raise TypeError(f"unknown operator {type(op).__name__}")


def resolvent(op: MonotoneOp, x) -> np.ndarray:
    """``(Id + op)^{-1} x``."""
    return _resolvent(op, as_vector(x, op.dim), 1.0)


def reflected_resolvent(op: MonotoneOp, x) -> np.ndarray:
    x = as_vector(x, op.dim)
    return 2.0 * _resolvent(op, x, 1.0) - x


def inverse_resolvent_complement(op: MonotoneOp, x) -> np.ndarray:
    """Resolvent of the inverse operator, ``x - J_op(x)``."""
    x = as_vector(x, op.dim)
    return x - _resolvent(op, x, 1.0)


def dual_resolvent(op: MonotoneOp, x) -> np.ndarray:
    """Resolvent of ``(-Id) o op^{-1} o (-Id)``, computed as ``x + J_op(-x)``."""
    x = as_vector(x, op.dim)
    return x + _resolvent(op, -x, 1.0)


@dataclass(frozen=True)
class CocoercivityWitness:
    alpha: float
    samples_checked: int
    max_violation: float
    tolerance: float = DEFAULT_TOLERANCES.invariant

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def __bool__(self):
        return self.passed


def sample_pairs(dim, n_samples, seed, scale=10.0):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((n_samples, 2, dim))


def check_firmly_nonexpansive(map: Callable, dim: int, n_samples: int = 1000, seed: int = 0,
                              alpha: float = 1.0, tol: float | None = None,
                              scale: float = 10.0) -> CocoercivityWitness:
    """Sample ``|Tx - Ty|^2 <= <x - y, Tx - Ty>`` on random pairs.

    `map` is evaluated as ``alpha * map(x)``; pairs are Gaussian with standard
    deviation `scale`, drawn from a PCG64 generator seeded with `seed`.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    tol = DEFAULT_TOLERANCES.invariant if tol is None else tol
    worst = -np.inf
    for x, y in sample_pairs(dim, n_samples, seed, scale):
        d = alpha * (np.asarray(map(x)) - np.asarray(map(y)))
        worst = max(worst, float(d @ d - (x - y) @ d))
    return CocoercivityWitness(alpha, n_samples, worst, tol)


def cocoercive_rescale(A: MonotoneOp, B: MonotoneOp, alpha: float):
    """Replace the pair by ``(alpha A, alpha B)``; the zeros of the sum are unchanged."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return Scaled(alpha, A), Scaled(alpha, B)


def affine_parts(op: MonotoneOp):
    """``(L, b)`` as arrays if `op` is single-valued and affine, else ``None``."""
    n = op.dim
    if isinstance(op, AffineOp):
        return op.M.L.entries.copy(), op.M.b.copy()
    if isinstance(op, ConstOp):
        return np.zeros((n, n)), op.a.copy()
    if isinstance(op, GradHalfDistSq) and is_affine_set(op.set):
        c = op.set._project(np.zeros(n), DEFAULT_TOLERANCES)
        P = np.column_stack([op.set._project(e, DEFAULT_TOLERANCES) - c for e in np.eye(n)])
        return np.eye(n) - P, -c
    if isinstance(op, Scaled):
        inner = affine_parts(op.inner)
        return None if inner is None else (op.alpha * inner[0], op.alpha * inner[1])
    if isinstance(op, InnerShift):
        inner = affine_parts(op.inner)
        return None if inner is None else (inner[0], inner[1] - inner[0] @ op.w)
    if isinstance(op, OuterShift):
        inner = affine_parts(op.inner)
        return None if inner is None else (inner[0], inner[1] - op.w)
    if isinstance(op, Blockwise):
        parts = [affine_parts(p) for p in op.parts]
        if any(p is None for p in parts):
            return None
        L = np.zeros((n, n))
        i = 0
        for Li, _ in parts:
            k = Li.shape[0]
            L[i:i + k, i:i + k] = Li
            i += k
        return L, np.concatenate([b for _, b in parts])
    return None


def has_affine_resolvent(op: MonotoneOp) -> bool:
    if affine_parts(op) is not None:
        return True
    if isinstance(op, NormalCone):
        return is_affine_set(op.set)
    if isinstance(op, (Scaled, InnerShift, OuterShift, DualInverse)):
        return has_affine_resolvent(op.inner)
    if isinstance(op, Blockwise):
        return all(has_affine_resolvent(p) for p in op.parts)
    return False
