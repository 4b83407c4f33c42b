"""Parallel splitting for ``0 in A_1 x + ... + A_m x`` via the product space.

The sum problem is lifted to ``X^m``: the cocoercive operators act blockwise
and the coupling is the normal cone of the diagonal, whose resolvent is
block averaging. The forward-backward map of the lifted pair then reads
``xx -> lift(average(xx - alpha A(xx)))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convex_core import Diagonal, as_vector
from .displacement import NormalSolveReport, NormalStatus, normal_solve
from .errors import DimensionError
from .operators import (Blockwise, NormalCone, Scaled, _apply,
                        check_firmly_nonexpansive, is_single_valued)
from .splitting import SplitProblem

__all__ = ["ProductProblem", "lift", "average", "project_diagonal", "build_lifted_problem",
           "parallel_fb_solve"]


@dataclass(frozen=True, eq=False)
class ProductProblem:
    """``m >= 2`` single-valued operators with cocoercivity constants ``alphas``."""

    ops: tuple
    alphas: tuple
    validate: bool = True

    def __post_init__(self):
        ops, alphas = tuple(self.ops), tuple(float(a) for a in self.alphas)
        if len(ops) < 2:
            raise ValueError("need at least two operators")
        if len(alphas) != len(ops):
            raise ValueError("one cocoercivity constant per operator is required")
        if any(not a > 0 for a in alphas):
            raise ValueError("cocoercivity constants must be positive")
        d = ops[0].dim
        if any(op.dim != d for op in ops):
            raise DimensionError("all operators must share one dimension")
        if not all(is_single_valued(op) for op in ops):
            raise TypeError("product operators must be single-valued")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "alphas", alphas)
        if self.validate:
            for i, op in enumerate(ops):
                w = check_firmly_nonexpansive(lambda x, op=op: _apply(op, x, 1.0), d,
                                              n_samples=64, seed=777 + i, alpha=self.alpha)
                if not w.passed:
                    raise ValueError(f"operator {i} scaled by {self.alpha} is not firmly "
                                     f"nonexpansive (violation {w.max_violation:.3e})")

    @property
    def m(self) -> int:
        return len(self.ops)

    @property
    def d(self) -> int:
        return self.ops[0].dim

    @property
    def alpha(self) -> float:
        return min(self.alphas)


def lift(x, m: int) -> np.ndarray:
    """``(x, x, ..., x)`` with m copies."""
    return np.tile(as_vector(x), m)


def average(xx, m: int) -> np.ndarray:
    xx = as_vector(xx)
    if xx.size % m:
        raise DimensionError(f"length {xx.size} is not divisible by m={m}")
    return xx.reshape(m, -1).mean(axis=0)


def project_diagonal(xx, m: int) -> np.ndarray:
    return lift(average(xx, m), m)


def build_lifted_problem(p: ProductProblem) -> SplitProblem:
    """Pair ``(alpha A_1 x ... x alpha A_m, N_Delta)`` on ``X^m``."""
    A = Blockwise(tuple(Scaled(p.alpha, op) for op in p.ops))
    B = NormalCone(Diagonal(p.m, p.d))
    return SplitProblem(A, B, validate=False)


def parallel_fb_solve(p: ProductProblem, x0, tol: float = 1e-8, budget: int = 100_000,
                      divergence_threshold: float = 1e8, stage_len: int = 1000
                      ) -> NormalSolveReport:
    """Run the normal solver on the lifted problem from ``lift(x0)``.

    On success ``z`` is the block average of the lifted solution and
    ``sum_residual`` is ``|sum_i alpha A_i(z)|``.
    """
    x0 = as_vector(x0, p.d)
    lifted = build_lifted_problem(p)
    rep = normal_solve(lifted, lift(x0, p.m), tol=tol, max_iter=budget,
                       divergence_threshold=divergence_threshold,
                       n_stages=max(1, budget // stage_len), stage_len=stage_len)
    if rep.status is not NormalStatus.FOUND:
        return rep
    zz = rep.z
    z = average(zz, p.m)
    s = sum(p.alpha * _apply(op, z, 1.0) for op in p.ops)
    rep.z_lifted = zz
    rep.z = z
    rep.sum_residual = float(np.linalg.norm(s))
    return rep
