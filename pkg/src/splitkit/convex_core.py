"""Vectors, affine maps and a catalog of closed convex sets.

Every set in the catalog knows how to project onto itself. Projections are
exact (closed form) for all variants except :class:`HyperbolaEpigraph`, whose
boundary point is found by solving a scalar quartic.

Vectors are plain one-dimensional ``float64`` numpy arrays; :func:`as_vector`
performs the validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ProjectionError, UnsupportedSetError
from .tolerances import DEFAULT_TOLERANCES, ToleranceConfig

__all__ = [
    "as_vector", "LinearMap", "AffineMap",
    "ConvexSet", "Orthant", "Box", "AffineSubspace", "Halfspace", "Ball",
    "HyperbolaEpigraph", "Translate", "Product", "Ray", "Diagonal",
    "project", "distance", "grad_half_dist_sq", "polar_recession_cone",
    "contains", "is_affine_set",
]


def as_vector(x, dim=None) -> np.ndarray:
    """Return `x` as a finite 1-D float array, optionally checking its length."""
    v = np.array(x, dtype=float).reshape(-1) if np.ndim(x) == 0 else np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    if dim is not None and v.size != dim:
        raise DimensionError(f"dimension mismatch: expected {dim}, got {v.size}")
    return v


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Square matrix acting on R^n.

    Parameters
    ----------
    entries : array_like, shape (n, n)
    nonexpansive : bool
        If true, the operator norm is checked to be at most ``1 + 1e-10``.
    """

    entries: np.ndarray
    nonexpansive: bool = False

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"linear map must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("linear map has non-finite entries")
        object.__setattr__(self, "entries", m)
        if self.nonexpansive and self.norm() > 1 + DEFAULT_TOLERANCES.nonexpansive_norm:
            raise ValueError(f"linear map is not nonexpansive (norm {self.norm():.6g})")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    def __call__(self, x):
        return self.entries @ x


@dataclass(frozen=True, eq=False)
class AffineMap:
    """The map ``x -> L x + b``."""

    L: LinearMap
    b: np.ndarray

    def __post_init__(self):
        L = self.L if isinstance(self.L, LinearMap) else LinearMap(self.L)
        b = _frozen(as_vector(self.b, L.dim))
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.L.dim

    def __call__(self, x):
        return self.L.entries @ x + self.b

    def power_apply(self, x, n):
        for _ in range(n):
            x = self(x)
        return x


class ConvexSet:
    """Nonempty closed convex subset of R^n."""

    dim: int

    def _project(self, x: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
        raise NotImplementedError

    def project(self, x, tol: ToleranceConfig | None = None) -> np.ndarray:
        return project(self, x, tol)

    def __contains__(self, x) -> bool:
        return contains(self, x)


@dataclass(frozen=True, eq=False)
class Orthant(ConvexSet):
    """Closed orthant; ``signs[i]`` is +1 for ``x_i >= 0`` and -1 for ``x_i <= 0``."""

    signs: tuple

    def __post_init__(self):
        signs = tuple(_parse_sign(s) for s in self.signs)
        if not signs:
            raise DimensionError("orthant needs at least one axis")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "_s", _frozen(signs))

    @classmethod
    def positive(cls, dim):
        return cls((1,) * dim)

    @classmethod
    def negative(cls, dim):
        return cls((-1,) * dim)

    @property
    def dim(self):
        return len(self.signs)

    def _project(self, x, tol):
        s = self._s
        return s * np.maximum(s * x, 0.0)


def _parse_sign(s):
    if s in (1, "+", "+1"):
        return 1
    if s in (-1, "-", "-1"):
        return -1
    raise ValueError(f"orthant sign must be '+' or '-', got {s!r}")


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = _frozen(as_vector(self.lo))
        hi = _frozen(as_vector(self.hi, lo.size))
        if np.any(lo > hi):
            raise ValueError("box requires lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.size

    def _project(self, x, tol):
        return np.clip(x, self.lo, self.hi)


@dataclass(frozen=True, eq=False)
class AffineSubspace(ConvexSet):
    """``offset + span(directions)``.

    The spanning vectors (columns of `basis`) need not be orthonormal; an
    orthonormal basis of their span is computed once here. A ``(n, 0)`` basis
    denotes the single point `offset`.
    """

    offset: np.ndarray
    basis: np.ndarray = None

    def __post_init__(self):
        off = _frozen(as_vector(self.offset))
        n = off.size
        raw = np.zeros((n, 0)) if self.basis is None else np.array(self.basis, dtype=float)
        if raw.ndim == 1:
            raw = raw.reshape(n, -1)
        if raw.shape[0] != n:
            raise DimensionError(f"basis must have {n} rows, got {raw.shape[0]}")
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "basis", _frozen(orthonormal_basis(raw)))

    @classmethod
    def span(cls, *directions, offset=None):
        d = np.column_stack([as_vector(v) for v in directions])
        return cls(np.zeros(d.shape[0]) if offset is None else offset, d)

    @classmethod
    def whole_space(cls, dim):
        return cls(np.zeros(dim), np.eye(dim))

    @property
    def dim(self):
        return self.offset.size

    @property
    def rank(self):
        return self.basis.shape[1]

    def linear_part(self) -> "AffineSubspace":
        return AffineSubspace(np.zeros(self.dim), self.basis)

    def orthogonal_complement(self) -> "AffineSubspace":
        """Orthogonal complement of the parallel subspace (through 0)."""
        n = self.dim
        if self.rank == 0:
            return AffineSubspace.whole_space(n)
        q, _ = np.linalg.qr(self.basis, mode="complete")
        return AffineSubspace(np.zeros(n), q[:, self.rank:])

    def projector_matrix(self):
        return self.basis @ self.basis.T

    def _project(self, x, tol):
        B = self.basis
        return self.offset + B @ (B.T @ (x - self.offset))


def orthonormal_basis(vectors, cutoff=None) -> np.ndarray:
    """Orthonormal basis (as columns) of the column span of `vectors`."""
    vectors = np.asarray(vectors, dtype=float)
    n = vectors.shape[0]
    if vectors.size == 0:
        return np.zeros((n, 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s[0] == 0:
        return np.zeros((n, 0))
    cutoff = DEFAULT_TOLERANCES.rank_cutoff if cutoff is None else cutoff
    return u[:, s > cutoff * s[0]]


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """``{x : <normal, x> <= rhs}``."""

    normal: np.ndarray
    rhs: float

    def __post_init__(self):
        a = _frozen(as_vector(self.normal))
        if not np.any(a):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "rhs", float(self.rhs))

    @property
    def dim(self):
        return self.normal.size

    def _project(self, x, tol):
        a = self.normal
        excess = a @ x - self.rhs
        if excess <= 0:
            return x.copy()
        return x - (excess / (a @ a)) * a


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(as_vector(self.center)))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.size

    def _project(self, x, tol):
        d = x - self.center
        r = np.linalg.norm(d)
        if r <= self.radius:
            return x.copy()
        return self.center + (self.radius / r) * d


@dataclass(frozen=True, eq=False)
class HyperbolaEpigraph(ConvexSet):
    """The planar set ``{(s, t) : s > 0, t >= 1/s}``.

    Points outside are projected onto the boundary curve ``(t, 1/t)``; the
    stationarity condition of ``|(t, 1/t) - (a, b)|^2`` is the quartic
    ``t^4 - a t^3 + b t - 1 = 0``, which has exactly one positive root for
    exterior points.
    """

    @property
    def dim(self):
        return 2

    def _project(self, x, tol):
        a, b = float(x[0]), float(x[1])
        if a > 0 and a * b >= 1:
            return x.copy()
        t = hyperbola_boundary_parameter(a, b, tol)
        return np.array([t, 1.0 / t])


def _hyp_h(t, a, b):
    # quartic divided by t^3; far better conditioned for large |a|
    return t - a + b / (t * t) - 1.0 / (t * t * t)


def hyperbola_boundary_parameter(a, b, tol: ToleranceConfig | None = None) -> float:
    """Positive root of ``t^4 - a t^3 + b t - 1`` (safeguarded Newton).

    Raises
    ------
    ProjectionError
        If neither Newton nor bisection meets the residual tolerance within
        ``tol.root_max_iter`` iterations.
    """
    tol = tol or DEFAULT_TOLERANCES
    # bracket: h -> -inf as t -> 0+, h -> +inf as t -> inf
    lo = 1.0
    while _hyp_h(lo, a, b) > 0:
        lo *= 0.5
    hi = max(1.0, a + 1.0)
    while _hyp_h(hi, a, b) < 0:
        hi *= 2.0
    t = a if lo < a < hi else 0.5 * (lo + hi)
    res = float("inf")
    for _ in range(tol.root_max_iter):
        h = _hyp_h(t, a, b)
        scale = abs(t) + abs(a) + abs(b) / (t * t) + 1.0 / (t * t * t)
        res = abs(h) / scale
        if res <= tol.projection or hi - lo <= 4e-16 * hi:
            return t
        if h < 0:
            lo = t
        else:
            hi = t
        dh = 1.0 - 2.0 * b / (t * t * t) + 3.0 / (t * t * t * t)
        t_new = t - h / dh if dh > 0 else -1.0
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        t = t_new
    raise ProjectionError("hyperbola projection did not converge", residual=res)


@dataclass(frozen=True, eq=False)
class Translate(ConvexSet):
    """``shift + inner``."""

    inner: ConvexSet
    shift: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "shift", _frozen(as_vector(self.shift, self.inner.dim)))

    @property
    def dim(self):
        return self.inner.dim

    def _project(self, x, tol):
        return self.shift + self.inner._project(x - self.shift, tol)


@dataclass(frozen=True, eq=False)
class Product(ConvexSet):
    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise DimensionError("product needs at least one factor")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return sum(p.dim for p in self.parts)

    def blocks(self, x):
        out, i = [], 0
        for p in self.parts:
            out.append(x[i:i + p.dim])
            i += p.dim
        return out

    def _project(self, x, tol):
        return np.concatenate([p._project(xi, tol) for p, xi in zip(self.parts, self.blocks(x))])


@dataclass(frozen=True, eq=False)
class Ray(ConvexSet):
    """Closed half-line ``{t d : t >= 0}``."""

    direction: np.ndarray

    def __post_init__(self):
        d = as_vector(self.direction)
        n = np.linalg.norm(d)
        if n == 0:
            raise ValueError("ray direction must be nonzero")
        object.__setattr__(self, "direction", _frozen(d / n))

    @property
    def dim(self):
        return self.direction.size

    def _project(self, x, tol):
        return max(0.0, float(self.direction @ x)) * self.direction


@dataclass(frozen=True, eq=False)
class Diagonal(ConvexSet):
    """``{(x, ..., x)}`` inside ``(R^d)^m``; projection is block averaging."""

    m: int
    d: int

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise DimensionError("diagonal needs m >= 1 and d >= 1")

    @property
    def dim(self):
        return self.m * self.d

    def _project(self, x, tol):
        mean = x.reshape(self.m, self.d).mean(axis=0)
        return np.tile(mean, self.m)


def project(set: ConvexSet, x, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Nearest point of `set` to `x`."""
    x = as_vector(x, set.dim)
    return set._project(x, tol or DEFAULT_TOLERANCES)


def distance(set: ConvexSet, x, tol: ToleranceConfig | None = None) -> float:
    x = as_vector(x, set.dim)
    return float(np.linalg.norm(x - set._project(x, tol or DEFAULT_TOLERANCES)))


def grad_half_dist_sq(set: ConvexSet, x, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Gradient of ``x -> d_C(x)^2 / 2``, i.e. ``x - P_C x``."""
    x = as_vector(x, set.dim)
    return x - set._project(x, tol or DEFAULT_TOLERANCES)


def contains(set: ConvexSet, x, atol=1e-12) -> bool:
    return distance(set, x) <= atol


def is_affine_set(s: ConvexSet) -> bool:
    if isinstance(s, (AffineSubspace, Diagonal)):
        return True
    if isinstance(s, Translate):
        return is_affine_set(s.inner)
    if isinstance(s, Product):
        return all(is_affine_set(p) for p in s.parts)
    return False


def polar_recession_cone(set: ConvexSet) -> ConvexSet:
    """Polar cone of the recession cone of `set`, as a catalog set.

    Raises
    ------
    UnsupportedSetError
        For :class:`Box`, :class:`Product` and :class:`Diagonal`.
    """
    if isinstance(set, Orthant):
        return Orthant(tuple(-s for s in set.signs))
    if isinstance(set, AffineSubspace):
        return set.orthogonal_complement()
    if isinstance(set, Ball):
        return AffineSubspace.whole_space(set.dim)
    if isinstance(set, Halfspace):
        # rec = {d : <a, d> <= 0}, whose polar is the ray spanned by a
        return Ray(set.normal)
    if isinstance(set, Ray):
        # rec = the ray itself; polar is the halfspace <d, y> <= 0
        return Halfspace(set.direction, 0.0)
    if isinstance(set, HyperbolaEpigraph):
        return Orthant.negative(2)
    if isinstance(set, Translate):
        return polar_recession_cone(set.inner)
    raise UnsupportedSetError(f"polar recession cone not available for {type(set).__name__}")
