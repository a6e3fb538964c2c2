"""
Checks with outer integrals over R^{2d}: orthogonality, the norm identity,
reconstruction and the reproducing kernel; plus the inequality suite.
"""

import logging
from typing import List

import numpy as np

from app.core.algebra import CliffordDim
from app.core.cstft import (
    OrthogonalityCase, inequality_suite, orthogonality_batch, reconstruct, reproducing_check,
    reproducing_kernel_bound, reproducing_kernel_values,
)
from app.core.eigenbasis import EigenIndex, psi
from app.core.transform import l2_norm
from app.verification.records import CheckRecord, CheckRegistry, VerificationContext, compare, diagnostic, holds

logger = logging.getLogger(__name__)

ORTHOGONALITY_ANCHOR = "∫∫ conj(V_{g1} f1) V_{g2} f2 = ⟨f1, f2⟩ ∫ g1 g2"


def reconstruction_points(dim: CliffordDim, count: int) -> np.ndarray:
    """0, e1, (e1 + e2)/2, −0.7 e3, 0.4 (e1 − e_d), then points on the e2 axis."""
    d = dim.d
    eye = np.eye(d)
    points = [np.zeros(d), eye[0], 0.5 * (eye[0] + eye[1]), -0.7 * eye[min(2, d - 1)], 0.4 * (eye[0] - eye[d - 1])]
    while len(points) < count:
        points.append(0.15 * (len(points) - 4) * eye[1])
    return np.array(points[:count])


def reproducing_probes(dim: CliffordDim, count: int):
    """(x', ω') probes close to the origin, where V_g f is large."""
    d = dim.d
    eye = np.eye(d)
    x_primes = [np.zeros(d), 0.5 * eye[0], np.zeros(d), 0.3 * eye[0], -0.4 * eye[1]]
    omega_primes = [np.zeros(d), np.zeros(d), 0.5 * eye[1], 0.4 * eye[1], 0.3 * eye[0]]
    while len(x_primes) < count:
        shift = 0.1 * len(x_primes)
        x_primes.append(shift * eye[1])
        omega_primes.append(shift * eye[0])
    return np.array(x_primes[:count]), np.array(omega_primes[:count])


def check_orthogonality(ctx: VerificationContext) -> List[CheckRecord]:
    """Gaussian quadruple, an orthogonal pair and the norm identity from one sample set."""
    gauss = ctx.gaussian
    odd = psi(EigenIndex('odd', 0, 0, 1), ctx.dim, ctx.config.eigenbasis)
    unit = ctx.unit_window
    cases = [
        OrthogonalityCase("orthogonality_gaussian", gauss, gauss, unit, unit),
        OrthogonalityCase("orthogonality_even_odd", gauss, odd, unit, unit),
        OrthogonalityCase("norm_identity", ctx.signal, ctx.signal, ctx.window, ctx.window),
    ]
    qmc = ctx.config.qmc
    results = orthogonality_batch(cases, ctx.sampler(), ctx.grids, ctx.qmc_map, qmc.batch, ctx.workers)
    tolerance = ctx.tol('qmc')
    gaussian, orthogonal, identity = results
    analytic = np.pi ** ctx.d
    stft_grid = ctx.grids.stft
    scale = (l2_norm(gauss, stft_grid) * l2_norm(odd, stft_grid) *
             unit.square_integral(stft_grid))
    records = [
        compare(gaussian.name, ORTHOGONALITY_ANCHOR, gaussian.rel_dev, tolerance,
                lhs=gaussian.lhs.modulus(), rhs=gaussian.rhs.modulus(),
                detail=f"right side π^d = {analytic:.10g}; {gaussian.count} samples, QMC error {gaussian.error:.2g}"),
        compare(orthogonal.name, ORTHOGONALITY_ANCHOR, orthogonal.deviation / scale, tolerance,
                lhs=orthogonal.lhs.modulus(), rhs=orthogonal.rhs.modulus(),
                detail="f2 = x e^{−|x|²/2}; deviation relative to ‖f1‖‖f2‖∫g²"),
        compare(identity.name, "‖V_g f‖²_{L²(R^{2d})} = ‖f‖₂² ∫ g²", identity.rel_dev, tolerance,
                lhs=identity.lhs.modulus(), rhs=identity.rhs.modulus(),
                detail=f"signal {ctx.signal.name}; QMC error {identity.error:.2g}"),
    ]
    ctx.release_samples()
    return records


def check_reconstruction(ctx: VerificationContext) -> List[CheckRecord]:
    points = reconstruction_points(ctx.dim, ctx.config.verify.reconstruction_probes)
    result = reconstruct(ctx.gaussian, ctx.unit_window, points, ctx.sampler(offset=1), ctx.grids,
                         ctx.reconstruction_map, ctx.config.qmc.batch, ctx.workers)
    errors = result.rel_errors
    worst = int(np.argmax(errors))
    return [compare("reconstruction", "f(y) = (2π)^{−d/2}/∫g² ∫∫ M_ω τ_x g(y) V_g f(x, ω) dω dx",
                    float(errors[worst]), ctx.tol('qmc'),
                    lhs=float(np.real(result.values[worst, 0])), rhs=float(np.real(result.expected[worst, 0])),
                    detail=f"{points.shape[0]} probes, worst at y = {points[worst].tolist()}; "
                           f"QMC error {result.error:.2g}")]


def check_reproducing(ctx: VerificationContext) -> List[CheckRecord]:
    x_primes, omega_primes = reproducing_probes(ctx.dim, ctx.config.verify.reproducing_probes)
    comparisons = reproducing_check(ctx.signal, ctx.window, x_primes, omega_primes, ctx.sampler(offset=2),
                                    ctx.grids, ctx.reconstruction_map, ctx.config.qmc.batch, ctx.workers)
    scale = max(max(c.lhs.modulus() for c in comparisons), 1e-300)
    worst = max(comparisons, key=lambda c: c.deviation)
    return [compare("reproducing_identity", "V_g f(x', ω') = ∫∫ 𝕂_g(ω, x; ω', x') V_g f(x, ω) dω dx",
                    worst.deviation / scale, ctx.tol('qmc'), lhs=worst.lhs.modulus(), rhs=worst.rhs.modulus(),
                    detail=f"{len(comparisons)} probes; deviation relative to max |V_g f|")]


def check_reproducing_diagonal(ctx: VerificationContext) -> List[CheckRecord]:
    """On the diagonal the kernel is a nonnegative scalar."""
    d = ctx.d
    omega = np.zeros((1, d))
    omega[0, 0] = 0.7
    x = np.zeros((1, d))
    value = reproducing_kernel_values(ctx.window, omega, x, omega, x, ctx.grids.stft)[0]
    scalar = float(np.real(value[0]))
    residual = float(np.sqrt(np.sum(np.abs(value[1:]) ** 2)) + abs(np.imag(value[0])))
    anchor = "𝕂_g(ω, x; ω, x) is a positive scalar"
    if scalar <= 0:
        return [holds("reproducing_diagonal", anchor, False, lhs=scalar, detail="scalar part is not positive")]
    return [compare("reproducing_diagonal", anchor, residual / scalar, ctx.tol('kernel_series'), lhs=scalar,
                    rhs=residual, detail="ω = ω' = 0.7 e1, x = x' = 0")]


def check_reproducing_bound(ctx: VerificationContext) -> List[CheckRecord]:
    settings = ctx.inequality_settings
    constant = reproducing_kernel_bound(ctx.window, ctx.grids.stft, settings.samples, settings.radius,
                                        settings.seed, settings.headroom)
    return [holds("reproducing_kernel_bound", "|𝕂_g| ≤ C (1+|ω|)^λ (1+|ω'|)^λ (1+|x|)^{2λ} (1+|x'|)^{2λ}",
                  constant.passed, lhs=constant.test_sup, rhs=constant.bound(), tolerance=constant.headroom,
                  detail=f"train sup {constant.train_sup:.6g}, stability {constant.stability:.4f}")]


def check_inequalities(ctx: VerificationContext) -> List[CheckRecord]:
    results = inequality_suite(ctx.signal, ctx.window, ctx.grids, ctx.kernel_constant, ctx.inequality_settings,
                               ctx.workers)
    records = []
    for result in results:
        if result.kind == 'assertion':
            records.append(holds(result.name, result.anchor, result.passed, lhs=result.lhs, rhs=result.rhs,
                                 detail=result.detail))
        else:
            within = "within" if result.passed else "outside"
            records.append(diagnostic(result.name, result.anchor, lhs=result.lhs, rhs=result.rhs,
                                      detail=f"{result.detail}; {within} the calibrated bound"))
    ctx.release_samples()
    return records


def register_qmc_checks(registry: CheckRegistry) -> None:
    registry.add("orthogonality", check_orthogonality, ORTHOGONALITY_ANCHOR)
    registry.add("reconstruction", check_reconstruction,
                 "f(y) = (2π)^{−d/2}/∫g² ∫∫ M_ω τ_x g(y) V_g f(x, ω) dω dx")
    registry.add("reproducing_identity", check_reproducing,
                 "V_g f(x', ω') = ∫∫ 𝕂_g(ω, x; ω', x') V_g f(x, ω) dω dx")
    registry.add("reproducing_diagonal", check_reproducing_diagonal, "𝕂_g(ω, x; ω, x) is a positive scalar")
    registry.add("reproducing_kernel_bound", check_reproducing_bound,
                 "|𝕂_g| ≤ C (1+|ω|)^λ (1+|ω'|)^λ (1+|x|)^{2λ} (1+|x'|)^{2λ}")
    registry.add("inequalities", check_inequalities, "covariance, signal and window estimates")
    logger.debug(f"QMC checks registered ({len(registry)} total)")
