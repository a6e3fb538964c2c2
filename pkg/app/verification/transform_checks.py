"""
Transform checks: the eigenvalue table of the Laguerre-monogenic basis, the
Parseval and Plancherel identities, involution, inversion, the F₊/F₋
relation and right-module linearity.
"""

import logging
import math
from typing import List

import numpy as np

from app.core.algebra import Multivector, mv_conjugate, mv_product, weighted_product_sum
from app.core.eigenbasis import EigenIndex, eigen_indices, expected_eigenvalue, monogenic_basis, psi
from app.core.quadrature import Grid
from app.core.signals import parse_signal
from app.core.transform import CliffordField, l2_inner, l2_norm, transform_values
from app.verification.records import CheckRecord, CheckRegistry, VerificationContext, compare, diagnostic

logger = logging.getLogger(__name__)

# second field of the Plancherel and linearity checks
PARTNER_SIGNAL = "psi(even,1,0,1) + psi(odd,0,1,1)*e{1}"

# basis fields transformed together; bounds the memoized node samples
EIGEN_BATCH = 8


def rel_l2(values: np.ndarray, reference: np.ndarray, grid: Grid) -> float:
    """Relative L² distance of two sampled fields on a grid."""
    num = math.sqrt(float(grid.weights @ np.sum(np.abs(values - reference) ** 2, axis=-1)))
    den = math.sqrt(float(grid.weights @ np.sum(np.abs(reference) ** 2, axis=-1)))
    return num / den if den > 0 else num


def partner_signal(ctx: VerificationContext) -> CliffordField:
    return parse_signal(PARTNER_SIGNAL, ctx.dim, ctx.config.eigenbasis)


def _eigen_suite(ctx: VerificationContext, sign: str) -> CheckRecord:
    model = ctx.config.eigenbasis
    indices = eigen_indices(ctx.dim, model.max_j, model.max_k)
    out = ctx.output_grid
    worst, worst_label = 0.0, ""
    for start in range(0, len(indices), EIGEN_BATCH):
        batch = indices[start:start + EIGEN_BATCH]
        fields = [psi(idx, ctx.dim, model) for idx in batch]
        transformed = transform_values(fields, out.points, ctx.grids.transform, sign, workers=ctx.workers,
                                       config=ctx.config.specfun)
        for idx, field, values in zip(batch, fields, transformed):
            expected = expected_eigenvalue(idx, ctx.dim, sign).real * field(out.points)
            error = rel_l2(values, expected, out)
            logger.debug(f"F{sign} {idx.label}: eigenvalue {expected_eigenvalue(idx, ctx.dim, sign).real:+g}, "
                         f"rel error {error:.3e}")
            if error > worst or not worst_label:
                worst, worst_label = error, idx.label
        ctx.release_samples()
    return compare(
        f"eigen_suite_{'minus' if sign == '-' else 'plus'}",
        f"F{sign} ψ = λ ψ with the tabulated eigenvalues", worst, ctx.tol('eigen'),
        detail=f"{len(indices)} basis fields, j <= {model.max_j}, k <= {model.max_k}; worst {worst_label}",
    )


def check_eigen_minus(ctx: VerificationContext) -> List[CheckRecord]:
    return [_eigen_suite(ctx, '-')]


def check_eigen_plus(ctx: VerificationContext) -> List[CheckRecord]:
    return [_eigen_suite(ctx, '+')]


def check_odd_eigenvalue(ctx: VerificationContext) -> List[CheckRecord]:
    """Sign of F₋ on x e^{−|x|²/2}, compared with the tabulated value."""
    idx = EigenIndex('odd', 0, 0, 1)
    field = psi(idx, ctx.dim, ctx.config.eigenbasis)
    out = ctx.output_grid
    values = transform_values([field], out.points, ctx.grids.transform, workers=ctx.workers)[0]
    reference = field(out.points)
    # least-squares eigenvalue on the output grid
    measured = float(np.real(out.weights @ np.sum(np.conj(reference) * values, axis=-1)) /
                     (out.weights @ np.sum(np.abs(reference) ** 2, axis=-1)))
    expected = expected_eigenvalue(idx, ctx.dim, '-').real
    return [compare("eigen_odd_sign", "F₋(x e^{−|x|²/2}) = (−1)^{d/2+1} x e^{−|x|²/2}",
                    abs(measured - expected), ctx.tol('eigen'), lhs=measured, rhs=expected)]


def check_monogenic_dimension(ctx: VerificationContext) -> List[CheckRecord]:
    """Nullity of the Dirac matrix next to 2^d C(k+d−2, d−2)."""
    d = ctx.d
    records = []
    for k in range(ctx.config.eigenbasis.max_k + 1):
        real = monogenic_basis(k, ctx.dim, module='real')
        right = monogenic_basis(k, ctx.dim)
        formula = (1 << d) * math.comb(k + d - 2, d - 2)
        records.append(diagnostic(
            f"monogenic_dimension_k{k}", "dim M_k from the exact Dirac nullspace",
            lhs=real.nullity, rhs=formula, error=abs(real.nullity - formula),
            detail=f"{len(right)} right-module generator(s)",
        ))
    return records


def check_parseval(ctx: VerificationContext) -> List[CheckRecord]:
    f = ctx.signal
    grid = ctx.parseval_grid
    spectrum = transform_values([f], grid.points, ctx.grids.transform, workers=ctx.workers)[0]
    lhs = math.sqrt(float(grid.weights @ np.sum(np.abs(spectrum) ** 2, axis=-1)))
    rhs = l2_norm(f, ctx.grids.transform)
    return [compare("parseval", "‖F₋f‖₂ = ‖f‖₂", abs(lhs - rhs) / rhs, ctx.tol('parseval'), lhs=lhs, rhs=rhs,
                    detail=f"signal {f.name}; spectrum integrated on {grid.describe()}")]


def check_plancherel(ctx: VerificationContext) -> List[CheckRecord]:
    f, h = ctx.signal, partner_signal(ctx)
    grid = ctx.parseval_grid
    spec_f, spec_h = transform_values([f, h], grid.points, ctx.grids.transform, workers=ctx.workers)
    lhs = Multivector(ctx.dim, weighted_product_sum(mv_conjugate(spec_f, ctx.d), spec_h, grid.weights, ctx.d))
    rhs = l2_inner(f, h, ctx.grids.transform)
    scale = l2_norm(f, ctx.grids.transform) * l2_norm(h, ctx.grids.transform)
    return [compare("plancherel", "⟨F₋f, F₋h⟩ = ⟨f, h⟩", (lhs - rhs).modulus() / scale, ctx.tol('parseval'),
                    lhs=lhs.modulus(), rhs=rhs.modulus(), detail=f"h = {PARTNER_SIGNAL}")]


def _spectrum_or_skip(ctx: VerificationContext, name: str, anchor: str):
    f = ctx.signal
    if not f.has_spectrum:
        return None, [diagnostic(name, anchor, detail=f"signal {f.name} has no closed-form spectrum; skipped")]
    return f.spectrum, None


def check_involution(ctx: VerificationContext) -> List[CheckRecord]:
    anchor = "F₋ F₋ f = f"
    spectrum, skipped = _spectrum_or_skip(ctx, "involution", anchor)
    if skipped:
        return skipped
    out = ctx.output_grid
    values = transform_values([spectrum], out.points, ctx.grids.transform, workers=ctx.workers)[0]
    return [compare("involution", anchor, rel_l2(values, ctx.signal(out.points), out), ctx.tol('parseval'),
                    detail="F₋ applied numerically to the closed-form spectrum")]


def check_inversion(ctx: VerificationContext) -> List[CheckRecord]:
    anchor = "F₋⁻¹ F₋ f = f"
    spectrum, skipped = _spectrum_or_skip(ctx, "inversion", anchor)
    if skipped:
        return skipped
    out = ctx.output_grid
    values = transform_values([spectrum], out.points, ctx.grids.transform, inverse=True, workers=ctx.workers)[0]
    return [compare("inversion", anchor, rel_l2(values, ctx.signal(out.points), out), ctx.tol('parseval'))]


def check_plus_from_minus(ctx: VerificationContext) -> List[CheckRecord]:
    anchor = "F₊f(ω) = F₋f(−ω)"
    spectrum, skipped = _spectrum_or_skip(ctx, "plus_from_minus", anchor)
    if skipped:
        return skipped
    out = ctx.output_grid
    values = transform_values([ctx.signal], out.points, ctx.grids.transform, sign='+', workers=ctx.workers)[0]
    return [compare("plus_from_minus", anchor, rel_l2(values, spectrum(-out.points), out), ctx.tol('eigen'))]


def check_right_linearity(ctx: VerificationContext) -> List[CheckRecord]:
    f, h = ctx.signal, partner_signal(ctx)
    alpha = Multivector.scalar(ctx.dim, 0.5) + Multivector.blade(ctx.dim, (1, 2))
    beta = Multivector.blade(ctx.dim, (1,), -1.5)
    combined = f.right_mul(alpha) + h.right_mul(beta)
    out = ctx.output_grid
    lhs, spec_f, spec_h = transform_values([combined, f, h], out.points, ctx.grids.transform, workers=ctx.workers)
    rhs = (mv_product(spec_f, alpha.coeffs[None, :], ctx.d) +
           mv_product(spec_h, beta.coeffs[None, :], ctx.d))
    return [compare("right_linearity", "F₋(fα + hβ) = F₋(f)α + F₋(h)β", rel_l2(lhs, rhs, out),
                    ctx.tol('kernel_series'), detail="α = 0.5 + e12, β = −1.5 e1")]


def register_transform_checks(registry: CheckRegistry) -> None:
    registry.add("eigen_suite_minus", check_eigen_minus, "F₋ ψ = λ ψ with the tabulated eigenvalues")
    registry.add("eigen_suite_plus", check_eigen_plus, "F₊ ψ = λ ψ with the tabulated eigenvalues")
    registry.add("eigen_odd_sign", check_odd_eigenvalue, "F₋(x e^{−|x|²/2}) = (−1)^{d/2+1} x e^{−|x|²/2}")
    registry.add("monogenic_dimension", check_monogenic_dimension, "dim M_k from the exact Dirac nullspace",
                 'diagnostic')
    registry.add("parseval", check_parseval, "‖F₋f‖₂ = ‖f‖₂")
    registry.add("plancherel", check_plancherel, "⟨F₋f, F₋h⟩ = ⟨f, h⟩")
    registry.add("involution", check_involution, "F₋ F₋ f = f")
    registry.add("inversion", check_inversion, "F₋⁻¹ F₋ f = f")
    registry.add("plus_from_minus", check_plus_from_minus, "F₊f(ω) = F₋f(−ω)")
    registry.add("right_linearity", check_right_linearity, "F₋(fα + hβ) = F₋(f)α + F₋(h)β")
    logger.debug(f"Transform checks registered ({len(registry)} total)")
