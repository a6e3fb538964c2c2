"""
Translation, modulation, convolution and norm-space checks.
"""

import logging
import math
from typing import List

import numpy as np

from app.core.algebra import mv_modulus, mv_product
from app.core.calibration import sobol_box
from app.core.kernel import kernel_masks, kernel_values
from app.core.timefreq import (
    commutator_tm, convolve, convolve_spectral, modulate, translate, translate_integral, translation_continuity,
    weighted_lp,
)
from app.core.transform import transform_values
from app.verification.records import CheckRecord, CheckRegistry, VerificationContext, compare, diagnostic, holds
from app.verification.transform_checks import rel_l2

logger = logging.getLogger(__name__)

_SHIFT = (0.5, -0.3, 0.2, 0.1, 0.4, -0.2, 0.3, 0.15)
_FREQUENCY = (0.4, 0.3, -0.2, 0.25, -0.1, 0.2, 0.1, -0.3)
_INTERCHANGE_RADIUS = 1.2


def _shift(ctx: VerificationContext) -> np.ndarray:
    return np.array(_SHIFT[:ctx.d], dtype=float)


def _frequency(ctx: VerificationContext) -> np.ndarray:
    return np.array(_FREQUENCY[:ctx.d], dtype=float)


def check_translation_paths(ctx: VerificationContext) -> List[CheckRecord]:
    """Integral translation of a radial window against the classical shift."""
    g = ctx.window.field
    y = _shift(ctx)
    out = ctx.output_grid
    integral = translate_integral(g, y, ctx.grids.transform, workers=ctx.workers)(out.points)
    shifted = g(out.points - y)
    return [compare("translation_dual_path", "τ_y g(x) = g(x − y) for radial g", rel_l2(integral, shifted, out),
                    ctx.tol('translation'), detail=f"y = {y.tolist()}")]


def check_modulation_spectrum(ctx: VerificationContext) -> List[CheckRecord]:
    """F₋(M_η f) = τ_η F₋f and F₋(τ_y f) = M_y F₋f for the Gaussian."""
    gauss = ctx.gaussian
    eta, y = _frequency(ctx), _shift(ctx)
    out = ctx.output_grid
    spectrum = gauss.spectrum
    modulated, translated = transform_values(
        [modulate(gauss, eta), translate(gauss, y, ctx.grids.transform)], out.points, ctx.grids.transform,
        workers=ctx.workers,
    )
    shifted_spectrum = spectrum(out.points - eta)
    d = ctx.d
    modulated_spectrum = mv_product(kernel_values(y, out.points, d), spectrum(out.points), d,
                                    a_masks=kernel_masks(d))
    return [
        compare("modulation_spectrum", "F₋(M_η f) = τ_η F₋f", rel_l2(modulated, shifted_spectrum, out),
                ctx.tol('translation'), detail=f"η = {eta.tolist()}"),
        compare("translation_spectrum", "F₋(τ_y f) = M_y F₋f", rel_l2(translated, modulated_spectrum, out),
                ctx.tol('translation'), detail=f"y = {y.tolist()}"),
    ]


def check_interchange(ctx: VerificationContext) -> List[CheckRecord]:
    """
    F₋(M_ω τ_y f) = τ_ω M_y F₋f as an assertion, and F₋(τ_y M_ω f) = M_y τ_ω F₋f
    as a nested diagnostic at a few output points.

    The right side of the assertion never sees the closed-form spectrum of
    M_y F₋f: its spectrum is recomputed by quadrature on the nested grids.
    """
    gauss = ctx.gaussian
    omega, y = _frequency(ctx), _shift(ctx)
    grid = ctx.grids.transform
    out = ctx.output_grid
    inner, outer = ctx.grids.nested_inner, ctx.grids.nested_outer
    near = out.points[np.linalg.norm(out.points, axis=1) <= _INTERCHANGE_RADIUS]
    records = []

    lhs = transform_values([modulate(translate(gauss, y, grid), omega)], near, grid, workers=ctx.workers)[0]
    numeric = modulate(gauss.spectrum, y).detached()
    rhs = translate_integral(numeric, omega, outer, inner_grid=inner, workers=ctx.workers)(near)
    scale = float(np.max(mv_modulus(lhs)))
    records.append(compare("interchange_modulated_translated", "F₋(M_ω τ_y f) = τ_ω M_y F₋f",
                           float(np.max(mv_modulus(lhs - rhs))) / scale, ctx.tol('nested'),
                           detail=f"y = {y.tolist()}, ω = {omega.tolist()}, {near.shape[0]} points, "
                                  f"nested on {outer.describe()}"))

    if ctx.config.verify.nested:
        points = out.points[:8]
        shifted = translate(modulate(gauss, omega), y, inner, workers=ctx.workers)
        lhs = transform_values([shifted], points, outer, workers=ctx.workers)[0]
        rhs = modulate(translate(gauss.spectrum, omega, grid), y)(points)
        scale = float(np.max(mv_modulus(rhs)))
        records.append(diagnostic("interchange_translated_modulated", "F₋(τ_y M_ω f) = M_y τ_ω F₋f",
                                  lhs=float(np.max(mv_modulus(lhs))), rhs=scale,
                                  error=float(np.max(mv_modulus(lhs - rhs))) / scale,
                                  detail=f"{points.shape[0]} points, nested on {outer.describe()}"))
    ctx.release_samples()
    return records


def check_commutator(ctx: VerificationContext) -> List[CheckRecord]:
    """[τ_x, M_ω] g vanishes for x = 0 and not for x = e1, ω = e2."""
    g = ctx.gaussian
    d = ctx.d
    out = ctx.output_grid
    e1, e2 = np.eye(d)[0], np.eye(d)[1]
    grid = ctx.grids.transform
    zero = commutator_tm(g, np.zeros(d), e2, grid)(out.points)
    witness = commutator_tm(g, e1, e2, grid, workers=ctx.workers)(out.points)
    size = math.sqrt(float(out.weights @ np.sum(np.abs(witness) ** 2, axis=-1)))
    zero_size = math.sqrt(float(out.weights @ np.sum(np.abs(zero) ** 2, axis=-1)))
    return [
        compare("commutator_zero_shift", "[τ_0, M_ω] g = 0", zero_size, ctx.tol('commutator')),
        holds("commutator_witness", "[τ_x, M_ω] g ≠ 0 for x = e1, ω = e2", size > ctx.tol('commutator'),
              lhs=size, rhs=ctx.tol('commutator'), detail="L² size on the output grid"),
    ]


def check_convolution(ctx: VerificationContext) -> List[CheckRecord]:
    gauss = ctx.gaussian
    g = ctx.window.field
    out = ctx.output_grid
    stft_grid = ctx.grids.stft
    direct = convolve(gauss, g, stft_grid)(out.points)
    spectral = convolve_spectral(gauss, g, ctx.grids.transform, ctx.workers)(out.points)
    swapped = convolve(g, gauss, stft_grid)(out.points)
    self_conv = convolve(gauss, gauss, stft_grid)(out.points)
    r2 = np.sum(out.points ** 2, axis=-1)
    analytic = np.zeros_like(self_conv)
    analytic[:, 0] = 2.0 ** (-ctx.d / 2.0) * np.exp(-r2 / 4.0)
    return [
        compare("convolution_dual_path", "f ∗ g = F₋⁻¹(F₋f · F₋g) for radial f", rel_l2(direct, spectral, out),
                ctx.tol('convolution'), detail=f"f = {gauss.name}, g = {g.name}"),
        compare("convolution_commutative", "f ∗ g = g ∗ f for radial scalar f, g", rel_l2(direct, swapped, out),
                ctx.tol('translation')),
        compare("convolution_gaussian", "e^{−|x|²/2} ∗ e^{−|x|²/2} = 2^{−d/2} e^{−|x|²/4}",
                rel_l2(self_conv, analytic, out), ctx.tol('convolution')),
    ]


def check_translation_continuity(ctx: VerificationContext) -> List[CheckRecord]:
    norms = translation_continuity(ctx.window.field, ctx.grids.stft, steps=7)
    decreasing = all(b < a for a, b in zip(norms, norms[1:]))
    return [holds("translation_continuity", "‖τ_{2^{−n} e1} g − g‖₂ → 0", decreasing and norms[-1] < norms[0],
                  lhs=norms[-1], rhs=norms[0], detail="n = 0..6, strictly decreasing")]


def check_norm_spaces(ctx: VerificationContext) -> List[CheckRecord]:
    """Inclusion, product and translation bounds of the weighted spaces."""
    grid = ctx.grids.norms
    lam = ctx.dim.lam
    d = ctx.d
    f_values = ctx.signal(grid.points)
    g = ctx.window
    g_values = g.field(grid.points)
    slack = 1.0 + ctx.tol('norm_ratio')
    records = []

    worst = max(weighted_lp(f_values, grid, lam, p) / weighted_lp(f_values, grid, lam * p, p) for p in (2.0, 3.0))
    records.append(holds("norm_inclusion", "‖f‖_{B^p} ≤ ‖f‖_{W_pλ}", worst <= slack, lhs=worst, rhs=1.0,
                         tolerance=ctx.tol('norm_ratio'), detail="p = 2, 3"))

    product = mv_product(f_values, g_values, d)
    product_norm = weighted_lp(product, grid, lam, 1.0)
    c = float(1 << d)
    h1 = product_norm / (c * weighted_lp(g_values, grid, 2 * lam, 2.0) * weighted_lp(f_values, grid, 0.0, 2.0))
    h2 = product_norm / (c * weighted_lp(f_values, grid, lam, 2.0) * weighted_lp(g_values, grid, lam, 2.0))
    records.append(holds("product_bound_w", "‖f g‖_B ≤ c ‖g‖_{W_2λ} ‖f‖₂", h1 <= slack, lhs=h1, rhs=1.0,
                         tolerance=ctx.tol('norm_ratio'), detail="c = 2^d"))
    records.append(holds("product_bound_b2", "‖f g‖_B ≤ c ‖f‖_{B²} ‖g‖_{B²}", h2 <= slack, lhs=h2, rhs=1.0,
                         tolerance=ctx.tol('norm_ratio'), detail="c = 2^d"))

    shifts = sobol_box(d, 5, 1.5, ctx.config.qmc.seed + 40)
    b_norm = weighted_lp(g_values, grid, lam, 2.0)
    w_norm = weighted_lp(g_values, grid, 2 * lam, 2.0)
    inv1 = inv2 = 0.0
    for x in shifts:
        moved = g.field(grid.points - x)
        growth = 1.0 + float(np.linalg.norm(x))
        inv1 = max(inv1, weighted_lp(moved, grid, lam, 2.0) / (growth ** (lam / 2.0) * b_norm))
        inv2 = max(inv2, weighted_lp(moved, grid, 2 * lam, 2.0) / (growth ** lam * w_norm))
    records.append(holds("translation_bound_b2", "‖τ_x g‖_{B²} ≤ (1+|x|)^{λ/2} ‖g‖_{B²}", inv1 <= slack,
                         lhs=inv1, rhs=1.0, tolerance=ctx.tol('norm_ratio'), detail="5 shifts with |x_i| <= 1.5"))
    records.append(holds("translation_bound_w2", "‖τ_x g‖_{W_2λ} ≤ (1+|x|)^λ ‖g‖_{W_2λ}", inv2 <= slack,
                         lhs=inv2, rhs=1.0, tolerance=ctx.tol('norm_ratio'), detail="5 shifts with |x_i| <= 1.5"))
    return records


def register_timefreq_checks(registry: CheckRegistry) -> None:
    registry.add("translation_dual_path", check_translation_paths, "τ_y g(x) = g(x − y) for radial g")
    registry.add("modulation_spectrum", check_modulation_spectrum, "F₋(M_η f) = τ_η F₋f")
    registry.add("interchange", check_interchange, "F₋(M_ω τ_y f) = τ_ω M_y F₋f")
    registry.add("commutator", check_commutator, "[τ_x, M_ω] g")
    registry.add("convolution", check_convolution, "f ∗ g = F₋⁻¹(F₋f · F₋g) for radial f")
    registry.add("translation_continuity", check_translation_continuity, "‖τ_{2^{−n} e1} g − g‖₂ → 0")
    registry.add("norm_spaces", check_norm_spaces, "weighted space inclusions and bounds")
    logger.debug(f"Time-frequency checks registered ({len(registry)} total)")
