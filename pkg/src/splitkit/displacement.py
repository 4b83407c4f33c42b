"""Minimal displacement vectors and the normal (v-perturbed) problem.

For a nonexpansive map T the minimal displacement vector ``v`` is the
least-norm element of the closure of ``ran(Id - T)``. For averaged maps the
successive differences ``T^n x - T^{n+1} x`` converge to ``v``, which is what
:func:`estimate_v_iterative` exploits. Affine maps additionally admit the
closed form :func:`v_affine_closed_form`.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .convex_core import AffineMap, as_vector
from .errors import IterationError, SplitkitError
from .splitting import (DR, FB, FixedPointMap, IterationTrace, Shifted, SplitProblem,
                        StopReason, affine_form, iterate, perturbed_residual)
from .tolerances import DEFAULT_TOLERANCES

log = logging.getLogger(__name__)

__all__ = [
    "DisplacementEstimate", "NormalStatus", "NormalSolveReport", "RateFit", "Summability",
    "DisplacementError", "estimate_v_iterative", "v_affine_closed_form", "v_fb_vs_v_dr",
    "normal_solve", "accelerated_estimate", "accelerated_sequence",
    "affine_shifted_iterate_identity_check", "rate_fit", "summability_check",
    "knopp_tail_check", "affine_fixed_set",
]


class DisplacementError(SplitkitError, ArithmeticError):
    """Numeric overflow while estimating; ``estimate`` holds the last good value."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


@dataclass
class DisplacementEstimate:
    v: np.ndarray
    iterations: int
    last_residual: float
    monotone_ok: bool | None = None
    stage_estimates: list = field(default_factory=list, repr=False)
    x_final: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self):
        return {"v": self.v.tolist(), "iterations": self.iterations,
                "last_residual": self.last_residual, "monotone_ok": self.monotone_ok}


def estimate_v_iterative(map: FixedPointMap, x0, n_stages: int = 100, stage_len: int = 1000,
                         accept_tol: float = 1e-8, check_monotone: bool = True
                         ) -> DisplacementEstimate:
    """Estimate the minimal displacement vector from the orbit of `x0`.

    The orbit is run in stages of `stage_len` steps; after each stage the
    current difference ``T^n x - T^{n+1} x`` is the stage estimate. The run
    stops once two successive stage estimates agree within `accept_tol`, or
    after ``n_stages * stage_len`` steps.

    For affine maps, ``monotone_ok`` reports whether
    ``n -> |T^n x - T^{n+1} x - v|`` was nonincreasing (up to the slack
    ``|L v - v|`` that comes from using the estimate in place of v).

    Raises
    ------
    DisplacementError
        If an iterate overflows before the budget is used.
    """
    x = as_vector(x0, map.dim)
    affine = check_monotone and affine_form(map) is not None
    diffs = [] if affine else None
    stages = []
    prev = None
    n = 0
    d = None
    last_residual = float("inf")
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n_stages):
            for _ in range(stage_len):
                y = map(x)
                if not np.all(np.isfinite(y)):
                    raise DisplacementError(f"overflow at iteration {n + 1}",
                                            None if d is None else d.copy())
                d = x - y
                if diffs is not None:
                    diffs.append(d)
                x = y
                n += 1
            stages.append(d.copy())
            if prev is not None:
                last_residual = float(np.linalg.norm(d - prev))
                if last_residual <= accept_tol:
                    break
            prev = d.copy()
    monotone_ok = None
    if diffs is not None:
        d_next = x - map(x)
        slack = float(np.linalg.norm(d_next - d)) + 1e-12
        r = np.linalg.norm(np.asarray(diffs) - d, axis=1)
        monotone_ok = bool(np.all(np.diff(r) <= slack))
    return DisplacementEstimate(d.copy(), n, last_residual, monotone_ok, stages, x)


def v_affine_closed_form(T: AffineMap, rcond: float | None = None) -> np.ndarray:
    """Minimal displacement vector of ``x -> L x + b``.

    ``ran(Id - T) = ran(Id - L) - b``, so ``v = P_{ran(Id - L)} b - b``. The
    range basis comes from an SVD of ``Id - L`` with singular values below
    ``rcond * s_max`` treated as zero.
    """
    rcond = DEFAULT_TOLERANCES.rank_cutoff if rcond is None else rcond
    L, b = T.L.entries, T.b
    M = np.eye(T.dim) - L
    u, s, _ = np.linalg.svd(M)
    if s[0] == 0:
        return -b.copy()
    Ur = u[:, s > rcond * s[0]]
    return Ur @ (Ur.T @ b) - b


def affine_fixed_set(T: AffineMap, v=None, rcond: float | None = None):
    """``Fix(v + T)`` as ``(point, orthonormal basis of Fix L)``.

    Solves ``(Id - L) a = v + b`` in the least-squares sense; the residual is
    zero exactly when ``v`` is in ``ran(Id - T)``.
    """
    rcond = DEFAULT_TOLERANCES.rank_cutoff if rcond is None else rcond
    v = v_affine_closed_form(T, rcond) if v is None else np.asarray(v, dtype=float)
    M = np.eye(T.dim) - T.L.entries
    a, *_ = np.linalg.lstsq(M, v + T.b, rcond=None)
    _, s, vt = np.linalg.svd(M)
    if s[0] == 0:
        return a, np.eye(T.dim)
    return a, vt[s <= rcond * s[0]].T


def v_fb_vs_v_dr(problem: SplitProblem, x0, budget: int = 100_000, stage_len: int = 1000):
    """Estimate the displacement vectors of the FB and DR maps from the same start.

    Returns ``(v_fb, v_dr, |v_fb - v_dr|)``.
    """
    n_stages = max(1, budget // stage_len)
    e_fb = estimate_v_iterative(FB(problem), x0, n_stages, stage_len, check_monotone=False)
    e_dr = estimate_v_iterative(DR(problem), x0, n_stages, stage_len, check_monotone=False)
    return e_fb.v, e_dr.v, float(np.linalg.norm(e_fb.v - e_dr.v))


class NormalStatus(str, enum.Enum):
    FOUND = "normal_solution_found"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass
class NormalSolveReport:
    v: np.ndarray
    z: np.ndarray | None
    status: NormalStatus
    perturbed_residual: float | None
    trace: IterationTrace
    estimate: DisplacementEstimate | None = None
    z_lifted: np.ndarray | None = None
    sum_residual: float | None = None

    def to_dict(self, trace_path=None):
        out = {
            "v": self.v.tolist(),
            "z": None if self.z is None else self.z.tolist(),
            "status": self.status.value,
            "perturbed_residual": self.perturbed_residual,
            "iterations": self.trace.n_final,
            "stop_reason": self.trace.stop_reason.value,
        }
        if self.estimate is not None:
            out["estimate"] = self.estimate.to_dict()
        if self.z_lifted is not None:
            out["z_lifted"] = self.z_lifted.tolist()
        if self.sum_residual is not None:
            out["sum_residual"] = self.sum_residual
        if trace_path is not None:
            out["trace"] = str(trace_path)
        return out


def normal_solve(problem: SplitProblem, x0, tol: float = 1e-8, max_iter: int = 100_000,
                 divergence_threshold: float = 1e8, n_stages: int = 100,
                 stage_len: int = 1000) -> NormalSolveReport:
    """Solve the v-perturbed problem ``v in A x + B(x - v)``.

    The displacement vector is estimated first, then ``v + T_FB`` is iterated
    from `x0`. The verdict is

    * ``normal_solution_found`` when the shifted iteration meets `tol` (the
      perturbed residual is then at most `tol`),
    * ``divergent`` when the iterates pass `divergence_threshold` with
      confirmed growth,
    * ``inconclusive`` otherwise (budget exhausted).
    """
    x0 = as_vector(x0, problem.dim)
    T = FB(problem)
    est = estimate_v_iterative(T, x0, n_stages, stage_len, check_monotone=False)
    v = est.v
    try:
        trace = iterate(Shifted(T, v), x0, max_iter=max_iter, tol=tol,
                        divergence_threshold=divergence_threshold)
    except IterationError as exc:
        if exc.trace is None:
            raise
        exc.trace.stop_reason = StopReason.DIVERGENCE
        return NormalSolveReport(v, None, NormalStatus.DIVERGENT, None, exc.trace, est)
    if trace.stop_reason is StopReason.TOLERANCE:
        z = trace.x_final
        res = perturbed_residual(problem, v, z)
        if res <= tol:
            return NormalSolveReport(v, z, NormalStatus.FOUND, res, trace, est)
        return NormalSolveReport(v, None, NormalStatus.INCONCLUSIVE, res, trace, est)
    if trace.stop_reason is StopReason.DIVERGENCE:
        return NormalSolveReport(v, None, NormalStatus.DIVERGENT, None, trace, est)
    return NormalSolveReport(v, None, NormalStatus.INCONCLUSIVE,
                             perturbed_residual(problem, v, trace.x_final), trace, est)


def _require_affine(map):
    T = map if isinstance(map, AffineMap) else affine_form(map)
    if T is None:
        raise TypeError("the accelerated estimator needs an affine map")
    return T


def accelerated_sequence(map, x, ns: Sequence[int]) -> dict:
    """``x_n = T^n x + n (T^{n^2} x - T^{n^2 + 1} x)`` for every n in `ns`.

    One forward pass of ``max(n)^2 + 1`` map applications serves all
    requested n; only the needed powers are kept.
    """
    _require_affine(map)
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 1:
        raise ValueError("n must be >= 1")
    x = np.asarray(x, dtype=float)
    wanted_pow = {n for n in ns} | {n * n for n in ns} | {n * n + 1 for n in ns}
    saved = {0: x} if 0 in wanted_pow else {}
    y = x
    for k in range(1, ns[-1] ** 2 + 2):
        y = map(y)
        if not np.all(np.isfinite(y)):
            raise DisplacementError(f"overflow at power {k}")
        if k in wanted_pow:
            saved[k] = y
    return {n: saved[n] + n * (saved[n * n] - saved[n * n + 1]) for n in ns}


def accelerated_estimate(map, x, n: int) -> np.ndarray:
    """Accelerated approximation of the projection of x onto ``Fix(v + T)``.

    Costs ``n^2 + 1`` applications of the (affine) map.
    """
    return accelerated_sequence(map, x, [n])[n]


def affine_shifted_iterate_identity_check(T: AffineMap, x, v, n: int) -> float:
    """``max_{k <= n} |T^k x + k v - (v + T)^k x|``."""
    x = as_vector(x, T.dim)
    v = as_vector(v, T.dim)
    lhs = x.copy()
    rhs = x.copy()
    worst = 0.0
    for k in range(1, n + 1):
        lhs = T(lhs)
        rhs = v + T(rhs)
        worst = max(worst, float(np.linalg.norm(lhs + k * v - rhs)))
    return worst


@dataclass(frozen=True)
class RateFit:
    mu: float
    r_squared: float
    window: tuple
    note: str = ""


def rate_fit(trace, limit, discard: float = 0.2, floor: float = 1e-13) -> RateFit:
    """Fit ``|x_n - limit| ~ C mu^n`` by least squares on the log errors.

    The first `discard` fraction of the trace is skipped as transient, and only
    errors above ``floor * max(1, |limit|)`` are used (smaller ones are at the
    rounding level). If no usable error remains the iteration converged
    exactly and ``mu = 0`` is returned with a note.
    """
    if isinstance(trace, IterationTrace):
        ns, xs = np.asarray(trace.ns, dtype=float), np.asarray(trace.iterates)
    else:
        xs = np.asarray(trace, dtype=float)
        ns = np.arange(len(xs), dtype=float)
    if len(xs) < 10:
        raise ValueError("rate fit needs at least 10 iterates")
    limit = np.asarray(limit, dtype=float)
    err = np.linalg.norm(xs - limit, axis=1)
    start = int(math.floor(discard * len(err)))
    cut = floor * max(1.0, float(np.linalg.norm(limit)))
    idx = [i for i in range(start, len(err)) if err[i] > cut]
    if len(idx) < 3:
        return RateFit(0.0, 1.0, (int(ns[start]), int(ns[-1])), "exact convergence")
    # stop at the first error below the floor; later points are noise
    run = [idx[0]]
    for i in idx[1:]:
        if i != run[-1] + 1:
            break
        run.append(i)
    if len(run) < 3:
        return RateFit(0.0, 1.0, (int(ns[run[0]]), int(ns[run[-1]])), "exact convergence")
    t, e = ns[run], np.log(err[run])
    slope, icpt = np.polyfit(t, e, 1)
    fitted = slope * t + icpt
    ss_res = float(np.sum((e - fitted) ** 2))
    ss_tot = float(np.sum((e - e.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return RateFit(float(math.exp(slope)), r2, (int(t[0]), int(t[-1])))


class Summability(NamedTuple):
    squared: float
    absolute: float
    squared_tail_increase: float
    absolute_tail_increase: float


def summability_check(map, x0, v, N: int) -> Summability:
    """Partial sums of ``|T^n x - T^{n+1} x - v|^2`` and ``|...|`` for n < N.

    The tail increases are the growth of each partial sum over the last
    ``N // 10`` terms.
    """
    x = np.asarray(x0, dtype=float)
    v = np.asarray(v, dtype=float)
    terms = np.empty(N)
    for n in range(N):
        y = map(x)
        terms[n] = float(np.linalg.norm(x - y - v))
        x = y
    sq = np.cumsum(terms ** 2)
    ab = np.cumsum(terms)
    k = max(1, N // 10)
    base = N - k - 1
    sq_tail = float(sq[-1] - sq[base]) if base >= 0 else float(sq[-1])
    ab_tail = float(ab[-1] - ab[base]) if base >= 0 else float(ab[-1])
    return Summability(float(sq[-1]), float(ab[-1]), sq_tail, ab_tail)


def knopp_tail_check(a, N: int | None = None, start: int = 0) -> float:
    """``max n a_n`` over the last tenth of the indices ``start .. start+N-1``.

    For a nonincreasing summable sequence this tends to 0. A warning is issued
    (and the value still computed) if the input is not nonincreasing.
    """
    a = np.asarray(a, dtype=float)
    if N is None:
        N = a.size
    a = a[:N]
    if np.any(np.diff(a) > 1e-15 * np.maximum(1.0, np.abs(a[:-1]))):
        warnings.warn("sequence is not nonincreasing; tail bound is not meaningful",
                      RuntimeWarning, stacklevel=2)
    k = max(1, N // 10)
    n = np.arange(start, start + N, dtype=float)
    return float(np.max(n[-k:] * a[-k:]))
