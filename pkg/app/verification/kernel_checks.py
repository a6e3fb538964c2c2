"""
Kernel checks: the two evaluation paths, the symmetry identities, additivity
in the plane and its failure in higher dimensions, and the growth bound.
"""

import logging
from typing import List

import numpy as np

from app.core.algebra import CliffordDim, Vector1, conjugation_signs
from app.core.kernel import (
    KernelArgs, additivity_defect, assemble, kernel_masks, kernel_terms_series, kernel_values, orthogonal_ray_sweep,
)
from app.verification.records import CheckRecord, CheckRegistry, VerificationContext, compare, diagnostic, holds

logger = logging.getLogger(__name__)


def random_ball(rng: np.random.Generator, count: int, d: int, radius: float) -> np.ndarray:
    """Points with uniform direction and uniform length in [0, radius]."""
    directions = rng.standard_normal((count, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return directions * rng.uniform(0.0, radius, size=(count, 1))


def check_series_agreement(ctx: VerificationContext) -> List[CheckRecord]:
    """Closed form against the truncated series for d = 4 and d = 6."""
    records = []
    kernel_model = ctx.config.kernel
    for d in sorted({4, 6} | ({ctx.d} if ctx.d >= 4 else set())):
        rng = ctx.rng(100 + d)
        x = random_ball(rng, 500, d, 3.0)
        y = random_ball(rng, 500, d, 3.0)
        closed = kernel_values(x, y, d, config=ctx.config.specfun)
        args = KernelArgs.from_arrays(x, y)
        terms = kernel_terms_series(args, CliffordDim(d), kernel_model.series_tol, kernel_model.series_max_terms,
                                    ctx.config.specfun)
        series = assemble(terms, args)
        error = float(np.max(np.abs(closed - series)))
        records.append(compare(
            f"kernel_series_d{d}", "K₋ closed Bessel sum = Bessel-Gegenbauer series", error,
            ctx.tol('kernel_series'), lhs=float(np.max(np.abs(closed))), rhs=float(np.max(np.abs(series))),
            detail=f"500 pairs with |x|,|y| <= 3; {terms.report.terms} terms, tail {terms.report.tail:.2e}",
        ))
    return records


def check_symmetry(ctx: VerificationContext) -> List[CheckRecord]:
    d = ctx.d
    rng = ctx.rng(200)
    x = random_ball(rng, 1000, d, 3.0)
    y = random_ball(rng, 1000, d, 3.0)
    signs = conjugation_signs(d)[list(kernel_masks(d))]
    forward = kernel_values(x, y, d)
    swapped = kernel_values(y, x, d)
    error = float(np.max(np.abs(swapped - forward * signs)))
    return [compare("kernel_symmetry", "K₋(y, x) = conj K₋(x, y)", error, ctx.tol('kernel_identity'),
                    detail="1000 pairs with |x|,|y| <= 3")]


def check_reflection(ctx: VerificationContext) -> List[CheckRecord]:
    d = ctx.d
    rng = ctx.rng(300)
    x = random_ball(rng, 1000, d, 3.0)
    y = random_ball(rng, 1000, d, 3.0)
    error = float(np.max(np.abs(kernel_values(-x, y, d) - kernel_values(x, -y, d))))
    return [compare("kernel_reflection", "K₋(−x, y) = K₋(x, −y)", error, ctx.tol('kernel_identity'),
                    detail="1000 pairs with |x|,|y| <= 3")]


def check_plus_kernel(ctx: VerificationContext) -> List[CheckRecord]:
    """K₊(x, y) = K₋(x, −y) for even d; the '+' path negates the second argument."""
    d = ctx.d
    rng = ctx.rng(350)
    x = random_ball(rng, 200, d, 3.0)
    y = random_ball(rng, 200, d, 3.0)
    plus = kernel_values(x, y, d, sign='+')
    reflected = kernel_values(-x, y, d)
    error = float(np.max(np.abs(plus - reflected)))
    return [compare("kernel_plus", "K₊(x, y) = K₋(−x, y)", error, ctx.tol('kernel_identity'),
                    detail="200 pairs; combines the reflection identity with K₊(x, y) = K₋(x, −y)")]


def _triples(rng: np.random.Generator, count: int, d: int, radius: float):
    for _ in range(count):
        yield tuple(Vector1.of(v) for v in random_ball(rng, 3, d, radius))


def check_additivity_plane(ctx: VerificationContext) -> List[CheckRecord]:
    dim = CliffordDim(2)
    rng = ctx.rng(400)
    worst = max(additivity_defect(x, y, z, dim) for x, y, z in _triples(rng, 200, 2, 2.0))
    return [compare("kernel_additivity_d2", "K₋(x, z) K₋(y, z) = K₋(x + y, z) for d = 2", worst, 1e-10,
                    detail="200 triples with norms <= 2")]


def check_non_additivity(ctx: VerificationContext) -> List[CheckRecord]:
    dim = CliffordDim(4)
    rng = ctx.rng(500)
    worst = max(additivity_defect(x, y, z, dim) for x, y, z in _triples(rng, 50, 4, 2.0))
    return [holds("kernel_non_additivity_d4", "K₋(x, z) K₋(y, z) ≠ K₋(x + y, z) for d = 4", worst > 0.1,
                  lhs=worst, rhs=0.1, detail="largest defect over 50 triples must exceed 0.1")]


def check_kernel_bound(ctx: VerificationContext) -> List[CheckRecord]:
    constant = ctx.kernel_constant
    return [holds(
        "kernel_bound", "|K₋(x, y)| ≤ c (1+|x|)^λ (1+|y|)^λ", constant.passed,
        lhs=constant.test_sup, rhs=constant.bound(), tolerance=constant.headroom,
        detail=(f"train sup {constant.train_sup:.6g} over {constant.train_count} pairs, "
                f"stability {constant.stability:.4f}"),
    )]


def check_ray_sweep(ctx: VerificationContext) -> List[CheckRecord]:
    model = ctx.config.kernel
    sweep = orthogonal_ray_sweep(ctx.dim, model.sweep_max, model.sweep_points)
    ratios = [ratio for _, ratio in sweep]
    increments = np.diff(ratios)
    trend = "nonincreasing" if np.all(increments <= 1e-12) else "non-monotone"
    return [diagnostic("kernel_ray_sweep", "|K₋(r e1, r e2)| / (1+r)^{2λ} along x ⟂ y",
                       lhs=max(ratios), rhs=ratios[-1],
                       detail=f"{len(sweep)} radii up to {model.sweep_max:g}; trend {trend}")]


def register_kernel_checks(registry: CheckRegistry) -> None:
    registry.add("kernel_series", check_series_agreement, "K₋ closed Bessel sum = Bessel-Gegenbauer series")
    registry.add("kernel_symmetry", check_symmetry, "K₋(y, x) = conj K₋(x, y)")
    registry.add("kernel_reflection", check_reflection, "K₋(−x, y) = K₋(x, −y)")
    registry.add("kernel_plus", check_plus_kernel, "K₊(x, y) = K₋(−x, y)")
    registry.add("kernel_additivity_d2", check_additivity_plane, "K₋(x, z) K₋(y, z) = K₋(x + y, z) for d = 2")
    registry.add("kernel_non_additivity_d4", check_non_additivity, "K₋(x, z) K₋(y, z) ≠ K₋(x + y, z) for d = 4")
    registry.add("kernel_bound", check_kernel_bound, "|K₋(x, y)| ≤ c (1+|x|)^λ (1+|y|)^λ")
    registry.add("kernel_ray_sweep", check_ray_sweep, "|K₋(r e1, r e2)| / (1+r)^{2λ} along x ⟂ y", 'diagnostic')
    logger.debug(f"Kernel checks registered ({len(registry)} total)")
