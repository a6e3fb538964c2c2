"""
Short-time transform checks: reference values, right linearity, the
equivalent forms, the asymmetric coordinate map and the parity diagnostic.
"""

import logging
from typing import List

import numpy as np

from app.core.algebra import Multivector, mv_modulus, mv_product
from app.core.calibration import sobol_box
from app.core.cstft import asymmetric_coord, parity_deviation, stft_values, tensor_product, vstft, vstft_forms
from app.verification.records import CheckRecord, CheckRegistry, VerificationContext, compare, diagnostic
from app.verification.transform_checks import PARTNER_SIGNAL, partner_signal

logger = logging.getLogger(__name__)

FORMS = {
    'imp': ("V_g f = (2π)^{−d/2} ∫ conj(M_ω τ_x g) f", 'forms_exact'),
    'tensor': ("V_g f(x, ω) = F₂ T(f ⊗ g)(x, ω)", 'tensor'),
    'f2': ("V_g f = (2π)^{−d/2} ∫ conj(τ_ω M_x F₋g) F₋f", 'forms'),
    'fi': ("V_g f(x, ω) = V_{F₋g} F₋f(ω, x) − commutator term", 'forms'),
    'f5': ("V_g f(x, ω) = F₋(F₋f · τ_ω F₋g)(x) − commutator term", 'forms'),
}


def probe_rows(ctx: VerificationContext, count: int, offset: int, degenerate: bool) -> np.ndarray:
    """(x, ω) probes in [−1.5, 1.5]^{2d}; degenerate rows zero x on even rows and ω on odd rows."""
    d = ctx.d
    rows = sobol_box(2 * d, count, 1.5, ctx.config.qmc.seed + offset)
    if degenerate:
        rows[0::2, :d] = 0.0
        rows[1::2, d:] = 0.0
    return rows


def check_gaussian_value(ctx: VerificationContext) -> List[CheckRecord]:
    d = ctx.d
    value = vstft(ctx.gaussian, ctx.unit_window, np.zeros(d), np.zeros(d), ctx.grids.stft)
    expected = 2.0 ** (-d / 2.0)
    return [compare("stft_gaussian_origin", "V_g f(0, 0) = 2^{−d/2} for unit Gaussians f, g",
                    (value - expected).modulus(), ctx.tol('tensor'), lhs=value.scalar_part, rhs=expected)]


def check_stft_linearity(ctx: VerificationContext) -> List[CheckRecord]:
    f, h = ctx.signal, partner_signal(ctx)
    alpha = Multivector.scalar(ctx.dim, 0.5) + Multivector.blade(ctx.dim, (1, 2))
    beta = Multivector.blade(ctx.dim, (1,), -1.5)
    combined = f.right_mul(alpha) + h.right_mul(beta)
    rows = probe_rows(ctx, 8, 30, degenerate=False)
    d = ctx.d
    window = ctx.window
    lhs, v_f, v_h = stft_values([(combined, window), (f, window), (h, window)], rows[:, :d], rows[:, d:],
                                ctx.grids.stft, ctx.workers)
    rhs = mv_product(v_f, alpha.coeffs[None, :], d) + mv_product(v_h, beta.coeffs[None, :], d)
    scale = max(float(np.max(mv_modulus(rhs))), 1e-300)
    return [compare("stft_right_linearity", "V_g(fα + hβ) = V_g(f)α + V_g(h)β",
                    float(np.max(mv_modulus(lhs - rhs))) / scale, ctx.tol('kernel_series'),
                    detail=f"h = {PARTNER_SIGNAL}, α = 0.5 + e12, β = −1.5 e1, 8 probes")]


def check_forms(ctx: VerificationContext) -> List[CheckRecord]:
    """Every equivalent form on probes with x = 0 or ω = 0."""
    d = ctx.d
    rows = probe_rows(ctx, ctx.config.verify.form_probes, 20, degenerate=True)
    forms = [vstft_forms(ctx.signal, ctx.window, row[:d], row[d:], ctx.grids, nested=False, workers=ctx.workers)
             for row in rows]
    scale = max(max(record.definition.modulus() for record in forms), 1e-300)
    records = []
    for form, (anchor, tolerance) in FORMS.items():
        error = max(record.deviation(form) for record in forms) / scale
        records.append(compare(f"stft_form_{form}", anchor, error, ctx.tol(tolerance),
                               detail=f"{rows.shape[0]} probes with x = 0 or ω = 0; relative to max |V_g f|"))
    ctx.release_samples()
    return records


def check_forms_nested(ctx: VerificationContext) -> List[CheckRecord]:
    """The spectral forms at generic (x, ω), where the commutator term is nested."""
    d = ctx.d
    if not ctx.config.verify.nested:
        return [diagnostic("stft_forms_nested", "spectral forms at generic (x, ω)", detail="nested runs disabled")]
    rows = probe_rows(ctx, ctx.config.verify.nested_probes, 25, degenerate=False)
    forms = [vstft_forms(ctx.signal, ctx.window, row[:d], row[d:], ctx.grids, nested=True, workers=ctx.workers)
             for row in rows]
    scale = max(max(record.definition.modulus() for record in forms), 1e-300)
    records = []
    for form in ('f2', 'fi', 'f5'):
        error = max(record.deviation(form) for record in forms) / scale
        records.append(diagnostic(f"stft_form_{form}_nested", FORMS[form][0], error=error,
                                  detail=f"{rows.shape[0]} generic probes on {ctx.grids.nested_outer.describe()}"))
    ctx.release_samples()
    return records


def check_asymmetric_map(ctx: VerificationContext) -> List[CheckRecord]:
    """T T F(x, t) = F(t − x, −x) for F = f ⊗ g."""
    d = ctx.d
    pair = tensor_product(ctx.signal, ctx.window.field)
    twice = asymmetric_coord(asymmetric_coord(pair))
    rng = ctx.rng(60)
    x = rng.uniform(-2.0, 2.0, size=(50, d))
    t = rng.uniform(-2.0, 2.0, size=(50, d))
    error = float(np.max(mv_modulus(twice(x, t) - pair(t - x, -x))))
    return [compare("asymmetric_map", "T T F(x, t) = F(t − x, −x)", error, ctx.tol('forms_exact'),
                    detail="50 random (x, t)")]


def check_parity(ctx: VerificationContext) -> List[CheckRecord]:
    d = ctx.d
    rows = probe_rows(ctx, 16, 70, degenerate=False)
    deviation = parity_deviation(ctx.signal, ctx.window, rows[:, :d], rows[:, d:], ctx.grids.stft)
    return [diagnostic("stft_parity", "V_g f(x, ω) = V_g f(−x, ω)", error=deviation,
                       detail="max |V_g f(x, ω) − V_g f(−x, ω)| / max |V_g f| over 16 probes")]


def register_stft_checks(registry: CheckRegistry) -> None:
    registry.add("stft_gaussian_origin", check_gaussian_value, "V_g f(0, 0) = 2^{−d/2} for unit Gaussians f, g")
    registry.add("stft_right_linearity", check_stft_linearity, "V_g(fα + hβ) = V_g(f)α + V_g(h)β")
    registry.add("stft_forms", check_forms, "equivalent forms of V_g f")
    registry.add("stft_forms_nested", check_forms_nested, "spectral forms at generic (x, ω)", 'diagnostic')
    registry.add("asymmetric_map", check_asymmetric_map, "T T F(x, t) = F(t − x, −x)")
    registry.add("stft_parity", check_parity, "V_g f(x, ω) = V_g f(−x, ω)", 'diagnostic')
    logger.debug(f"STFT checks registered ({len(registry)} total)")
