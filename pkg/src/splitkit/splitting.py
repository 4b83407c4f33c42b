"""Forward-backward and Douglas-Rachford fixed-point maps and the iteration engine."""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .convex_core import (AffineMap, ConvexSet, LinearMap, as_vector, is_affine_set,
                          _frozen)
from .errors import DimensionError, IterationError, NonConvergenceError
from .operators import (MonotoneOp, _apply, _resolvent, check_firmly_nonexpansive,
                        affine_parts, has_affine_resolvent, is_single_valued)
from .tolerances import DEFAULT_TOLERANCES

__all__ = [
    "SplitProblem", "FixedPointMap", "FB", "DR", "MAP", "Shifted", "StopReason",
    "IterationTrace", "Solution", "t_fb", "t_dr", "apply_map", "iterate",
    "solve_primal", "perturbed_residual", "averagedness_defect", "affine_form",
    "map_problem", "inclusion_residual",
]

TRACE_CAP = 10_000
DIVERGENCE_CONFIRMATIONS = 10


@dataclass(frozen=True, eq=False)
class SplitProblem:
    """Ordered pair ``(A, B)``: find x with ``0 in A x + B x``.

    `A` must be single-valued and firmly nonexpansive (rescale with
    :func:`~splitkit.operators.cocoercive_rescale` first if it is only
    cocoercive). The firm-nonexpansiveness check is a sampled diagnostic and
    can be skipped with ``validate=False``.
    """

    A: MonotoneOp
    B: MonotoneOp
    validate: bool = field(default=True, repr=False)
    n_check: int = field(default=64, repr=False)

    def __post_init__(self):
        if self.A.dim != self.B.dim:
            raise DimensionError(f"A has dimension {self.A.dim} but B has {self.B.dim}")
        if not is_single_valued(self.A):
            raise TypeError("A must be single-valued")
        if self.validate:
            w = check_firmly_nonexpansive(lambda x: _apply(self.A, x, 1.0), self.dim,
                                          n_samples=self.n_check, seed=12345)
            if not w.passed:
                raise ValueError(f"A is not firmly nonexpansive (violation {w.max_violation:.3e})")

    @property
    def dim(self) -> int:
        return self.A.dim


def t_fb(problem: SplitProblem, x) -> np.ndarray:
    """``J_B(x - A x)``."""
    x = as_vector(x, problem.dim)
    return _resolvent(problem.B, x - _apply(problem.A, x, 1.0), 1.0)


def t_dr(problem: SplitProblem, x) -> np.ndarray:
    """``x - J_A x + J_B(2 J_A x - x)``."""
    x = as_vector(x, problem.dim)
    ja = _resolvent(problem.A, x, 1.0)
    return x - ja + _resolvent(problem.B, 2.0 * ja - x, 1.0)


class FixedPointMap:
    dim: int

    def __call__(self, x):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class FB(FixedPointMap):
    problem: SplitProblem

    @property
    def dim(self):
        return self.problem.dim

    def __call__(self, x):
        p = self.problem
        return _resolvent(p.B, x - _apply(p.A, x, 1.0), 1.0)


@dataclass(frozen=True, eq=False)
class DR(FixedPointMap):
    problem: SplitProblem

    @property
    def dim(self):
        return self.problem.dim

    def __call__(self, x):
        p = self.problem
        ja = _resolvent(p.A, x, 1.0)
        return x - ja + _resolvent(p.B, 2.0 * ja - x, 1.0)


@dataclass(frozen=True, eq=False)
class MAP(FixedPointMap):
    """Alternating projections ``P_V P_U``."""

    U: ConvexSet
    V: ConvexSet

    def __post_init__(self):
        if self.U.dim != self.V.dim:
            raise DimensionError("U and V must live in the same space")

    @property
    def dim(self):
        return self.U.dim

    def __call__(self, x):
        tol = DEFAULT_TOLERANCES
        return self.V._project(self.U._project(x, tol), tol)


@dataclass(frozen=True, eq=False)
class Shifted(FixedPointMap):
    """``x -> w + inner(x)``."""

    inner: FixedPointMap
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(as_vector(self.w, self.inner.dim)))

    @property
    def dim(self):
        return self.inner.dim

    def __call__(self, x):
        return self.w + self.inner(x)


def map_problem(U: ConvexSet, V: ConvexSet, validate=False) -> SplitProblem:
    """The pair ``(Id - P_U, N_V)`` whose forward-backward map is ``P_V P_U``."""
    from .operators import GradHalfDistSq, NormalCone
    return SplitProblem(GradHalfDistSq(U), NormalCone(V), validate=validate)


def apply_map(map: FixedPointMap, x) -> np.ndarray:
    return map(as_vector(x, map.dim))


def affine_form(map: FixedPointMap) -> AffineMap | None:
    """Return ``T`` as ``x -> L x + b`` when `map` is structurally affine, else None.

    The coefficients are read off by evaluating the map at 0 and at the unit
    vectors.
    """
    if not _is_affine_map(map):
        return None
    n = map.dim
    b = map(np.zeros(n))
    L = np.column_stack([map(e) - b for e in np.eye(n)])
    return AffineMap(LinearMap(L), b)


def _is_affine_map(map) -> bool:
    if isinstance(map, Shifted):
        return _is_affine_map(map.inner)
    if isinstance(map, MAP):
        return is_affine_set(map.U) and is_affine_set(map.V)
    if isinstance(map, FB):
        return affine_parts(map.problem.A) is not None and has_affine_resolvent(map.problem.B)
    if isinstance(map, DR):
        return has_affine_resolvent(map.problem.A) and has_affine_resolvent(map.problem.B)
    if isinstance(map, AffineMap):
        return True
    return False


class StopReason(str, enum.Enum):
    TOLERANCE = "tolerance"
    MAX_ITER = "max_iter"
    DIVERGENCE = "divergence"


@dataclass
class IterationTrace:
    """Recorded orbit of a fixed-point map.

    ``step_norms[i]`` is ``|x_n - x_{n+1}|`` for ``n = ns[i]``; the final
    iterate has no step norm. Once more than ``cap`` points are stored, every
    other point is dropped and the recording stride doubles.
    """

    ns: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    step_norms: list = field(default_factory=list)
    displacement_residuals: list | None = None
    stop_reason: StopReason | None = None
    stride: int = 1

    @property
    def x_final(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def n_final(self) -> int:
        return self.ns[-1]

    def __len__(self):
        return len(self.ns)

    def _thin(self):
        keep = slice(0, None, 2)
        self.ns = self.ns[keep]
        self.iterates = self.iterates[keep]
        self.step_norms = self.step_norms[keep]
        if self.displacement_residuals is not None:
            self.displacement_residuals = self.displacement_residuals[keep]
        self.stride *= 2

    def rows(self):
        """Yield ``(n, step_norm | None, displacement_residual | None, x)``."""
        for i, (n, x) in enumerate(zip(self.ns, self.iterates)):
            step = self.step_norms[i] if i < len(self.step_norms) else None
            res = None
            if self.displacement_residuals is not None and i < len(self.displacement_residuals):
                res = self.displacement_residuals[i]
            yield n, step, res, x

    def to_csv(self, path):
        dim = len(self.iterates[0]) if self.iterates else 0
        fmt = lambda v: "" if v is None else format(float(v), ".17g")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "step_norm", "displacement_residual"] + [f"x_{i}" for i in range(dim)])
            for n, step, res, x in self.rows():
                w.writerow([n, fmt(step), fmt(res)] + [fmt(c) for c in x])

    def to_dict(self):
        return {
            "stop_reason": None if self.stop_reason is None else self.stop_reason.value,
            "stride": self.stride,
            "n": list(self.ns),
            "step_norm": [float(s) for s in self.step_norms],
            "displacement_residual": None if self.displacement_residuals is None
            else [float(r) for r in self.displacement_residuals],
            "x": [[float(c) for c in x] for x in self.iterates],
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)


def iterate(map: Callable, x0, max_iter: int = 100_000, tol: float = 1e-8,
            divergence_threshold: float = 1e8, reference_displacement=None,
            cap: int = TRACE_CAP) -> IterationTrace:
    """Iterate `map` from `x0` and record the orbit.

    Stops when ``|x_n - x_{n+1}| <= tol``, after `max_iter` steps, or when
    ``|x_n| >= divergence_threshold`` holds on 10 consecutive iterates.
    When `reference_displacement` is given, ``|x_n - x_{n+1} - v|`` is recorded
    too.

    Raises
    ------
    IterationError
        If the map produces a non-finite value; the partial trace is attached.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x0, dtype=float)
    v = None if reference_displacement is None else np.asarray(reference_displacement, dtype=float)
    trace = IterationTrace(displacement_residuals=None if v is None else [])
    above = 0
    n = 0
    while True:
        try:
            y = map(x)
        except (ArithmeticError, ValueError) as exc:
            trace.ns.append(n)
            trace.iterates.append(x)
            raise IterationError(f"map evaluation failed at n={n}: {exc}", trace) from exc
        if not np.all(np.isfinite(y)):
            trace.ns.append(n)
            trace.iterates.append(x)
            raise IterationError(f"non-finite iterate at n={n + 1}", trace)
        d = x - y
        step = float(np.sqrt(d @ d))
        if n % trace.stride == 0:
            trace.ns.append(n)
            trace.iterates.append(x)
            trace.step_norms.append(step)
            if v is not None:
                r = d - v
                trace.displacement_residuals.append(float(np.sqrt(r @ r)))
            if len(trace.ns) >= cap:
                trace._thin()
        n += 1
        x = y
        above = above + 1 if float(np.sqrt(x @ x)) >= divergence_threshold else 0
        if step <= tol:
            reason = StopReason.TOLERANCE
        elif above >= DIVERGENCE_CONFIRMATIONS:
            reason = StopReason.DIVERGENCE
        elif n >= max_iter:
            reason = StopReason.MAX_ITER
        else:
            continue
        trace.ns.append(n)
        trace.iterates.append(x)
        trace.stop_reason = reason
        return trace


@dataclass(frozen=True)
class Solution:
    z: np.ndarray
    primal_residual: float
    dual_point: np.ndarray
    trace: IterationTrace | None = None

    def to_dict(self):
        return {"z": self.z.tolist(), "primal_residual": self.primal_residual,
                "dual_point": self.dual_point.tolist()}


def solve_primal(problem: SplitProblem, x0, tol: float = 1e-8, max_iter: int = 100_000,
                 divergence_threshold: float = 1e8) -> Solution:
    """Find a zero of ``A + B`` as a fixed point of the forward-backward map.

    The dual solution is ``A z`` (it does not depend on which zero is found).

    Raises
    ------
    NonConvergenceError
        When the step norm does not fall below `tol` within `max_iter` steps;
        the trace is attached.
    """
    T = FB(problem)
    trace = iterate(T, as_vector(x0, problem.dim), max_iter=max_iter, tol=tol,
                    divergence_threshold=divergence_threshold)
    if trace.stop_reason is not StopReason.TOLERANCE:
        raise NonConvergenceError(
            f"no fixed point found after {trace.n_final} iterations ({trace.stop_reason.value}); "
            "the problem may be inconsistent", trace)
    z = trace.x_final
    res = float(np.linalg.norm(z - T(z)))
    return Solution(z, res, _apply(problem.A, z, 1.0), trace)


def perturbed_residual(problem: SplitProblem, w, x) -> float:
    """``|x - w - T_FB x|``; zero exactly when ``w in A x + B(x - w)``."""
    x = as_vector(x, problem.dim)
    w = as_vector(w, problem.dim)
    return float(np.linalg.norm(x - w - t_fb(problem, x)))


def inclusion_residual(problem: SplitProblem, z, n_samples=200, seed=0) -> float:
    """Violation of ``-A z in N_C(z)`` for problems whose B is a normal cone.

    Returns ``dist(z, C)`` plus the largest positive value of ``<-A z, c - z>``
    over sampled points ``c = P_C(z + noise)`` of C.
    """
    from .operators import NormalCone
    if not isinstance(problem.B, NormalCone):
        raise TypeError("inclusion residual needs B to be a normal cone")
    C = problem.B.set
    z = as_vector(z, problem.dim)
    pz = C._project(z, DEFAULT_TOLERANCES)
    u = -_apply(problem.A, z, 1.0)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for noise in rng.standard_normal((n_samples, problem.dim)):
        c = C._project(z + noise, DEFAULT_TOLERANCES)
        worst = max(worst, float(u @ (c - pz)) / max(1.0, float(np.linalg.norm(c - pz))))
    return float(np.linalg.norm(z - pz)) + worst


def averagedness_defect(problem_or_map, samples: int = 1000, seed: int = 0,
                        alpha: float = 2.0 / 3.0, scale: float = 10.0) -> float:
    """Largest sampled violation of the alpha-averagedness inequality.

    ``|Tx - Ty|^2 + (1 - alpha)/alpha |(x - Tx) - (y - Ty)|^2 - |x - y|^2``,
    where T is the forward-backward map of a :class:`SplitProblem` or any
    given fixed-point map.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    T = FB(problem_or_map) if isinstance(problem_or_map, SplitProblem) else problem_or_map
    rng = np.random.default_rng(seed)
    k = (1.0 - alpha) / alpha
    worst = -np.inf
    for x, y in scale * rng.standard_normal((samples, 2, T.dim)):
        tx, ty = T(x), T(y)
        a = tx - ty
        c = (x - tx) - (y - ty)
        worst = max(worst, float(a @ a + k * (c @ c) - (x - y) @ (x - y)))
    return worst
