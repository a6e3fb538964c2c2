"""
Clifford-Fourier Kernel Module

Evaluates the kernel K₋(x, y) of the Clifford-Fourier transform for even d in
two independent ways:
- the finite Bessel sum A*, B*, C* in the variables s = ⟨x,y⟩, t = |x∧y|
- the truncated Bessel-Gegenbauer series A_λ, B_λ, C_λ in |x||y| and ⟨ξ,η⟩

and derives K₊, the conjugated kernels, and the growth ratio
|K₋(x,y)| / ((1+|x|)^λ (1+|y|)^λ).

Kernel values only have grades 0 and 2, so the array-level entry point
`kernel_values` returns compact arrays whose columns follow `kernel_masks(d)`:
the scalar first, then the bivectors e_j e_k in lexicographic order.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Literal, Optional, Tuple

import numpy as np

from app.config.config_model import KernelModel, SpecFunConfig
from app.core.algebra import (
    CliffordDim,
    Multivector,
    Vector1,
    bivector_masks,
    expand_columns,
    mv_modulus,
    mv_product,
    wedge_components,
)
from app.core.errors import DimensionError, SeriesConvergenceError
from app.core.specfun import gamma_fn, gegenbauer_iter, scaled_bessel, tilde_j

logger = logging.getLogger(__name__)

Sign = Literal['-', '+']

_DEFAULT_KERNEL = KernelModel()


# ==================================================================================
# Arguments and terms
# ==================================================================================

def _direction(v: np.ndarray) -> Optional[np.ndarray]:
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    return None if np.any(norms == 0) else v / norms


@dataclass(frozen=True)
class KernelArgs:
    """
    Derived arguments of a batch of kernel evaluations.

    All arrays broadcast against each other; `wedge` carries the unnormalized
    bivector coefficients of x∧y on its last axis, so t never divides anything.
    """
    s: np.ndarray
    t: np.ndarray
    norm_x: np.ndarray
    norm_y: np.ndarray
    wedge: np.ndarray
    xi: Optional[np.ndarray] = None
    eta: Optional[np.ndarray] = None

    @classmethod
    def from_arrays(cls, x: np.ndarray, y: np.ndarray) -> "KernelArgs":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape[-1] != y.shape[-1]:
            raise DimensionError("kernel arguments have different lengths", {"x": x.shape, "y": y.shape})
        x, y = np.broadcast_arrays(x, y)
        wedge = wedge_components(x, y)
        return cls(
            s=np.sum(x * y, axis=-1),
            t=np.sqrt(np.sum(wedge * wedge, axis=-1)),
            norm_x=np.linalg.norm(x, axis=-1),
            norm_y=np.linalg.norm(y, axis=-1),
            wedge=wedge,
            xi=_direction(x),
            eta=_direction(y),
        )

    @classmethod
    def from_vectors(cls, x: Vector1, y: Vector1) -> "KernelArgs":
        return cls.from_arrays(x.as_array(), y.as_array())

    @property
    def z(self) -> np.ndarray:
        """|x||y|."""
        return self.norm_x * self.norm_y

    @property
    def cos_angle(self) -> np.ndarray:
        """⟨ξ, η⟩ clamped to [−1, 1]; 0 where x or y vanishes."""
        z = self.z
        with np.errstate(divide='ignore', invalid='ignore'):
            u = np.where(z > 0, self.s / np.where(z > 0, z, 1.0), 0.0)
        return np.clip(u, -1.0, 1.0)

    def wedge_multivector(self, dim: CliffordDim) -> Multivector:
        out = Multivector.zero(dim)
        for (_, _, mask), value in zip(bivector_masks(dim.d), np.ravel(self.wedge)):
            out.coeffs[mask] = value
        return out


@dataclass(frozen=True)
class SeriesReport:
    """Truncation record of the series path."""
    terms: int
    tail: float
    converged: bool


@dataclass(frozen=True)
class KernelTerms:
    """
    Scalar multipliers of a kernel evaluation.

    For the closed form `a`, `b`, `c` hold A*, B*, C* and `prefactor` is
    (−1)^{λ+1} sqrt(π/2); for the series they hold A_λ, B_λ, C_λ and the
    prefactor is 1. The kernel is prefactor · (a + b + (x∧y) c).
    """
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    prefactor: float
    form: Literal['closed', 'series']
    report: Optional[SeriesReport] = field(default=None)

    @property
    def scalar(self) -> np.ndarray:
        return self.prefactor * (self.a + self.b)

    @property
    def bivector_factor(self) -> np.ndarray:
        return self.prefactor * self.c


# ==================================================================================
# Closed form
# ==================================================================================

@lru_cache(maxsize=16)
def _closed_coefficients(lam: int) -> Tuple[Tuple[Tuple[float, int, float], ...], ...]:
    """
    (coefficient, power of s, Bessel order) triples of A*, B*, C*.

    The A* range is empty for λ = 0 because (2λ−1)//4 = −1.
    """
    g = gamma_fn(lam + 1.0)
    a_terms = tuple(
        (g / (2.0 ** l * math.factorial(l) * gamma_fn(lam - 2.0 * l)), lam - 1 - 2 * l, (2 * lam - 2 * l - 1) / 2.0)
        for l in range((2 * lam - 1) // 4 + 1)
    )
    b_terms = tuple(
        (-g / (2.0 ** l * math.factorial(l) * gamma_fn(lam - 2.0 * l + 1.0)), lam - 2 * l, (2 * lam - 2 * l - 1) / 2.0)
        for l in range(lam // 2 + 1)
    )
    c_terms = tuple((coef, power, order + 1.0) for coef, power, order in b_terms)
    return a_terms, b_terms, c_terms


def kernel_terms_closed(args: KernelArgs, dim: CliffordDim, config: Optional[SpecFunConfig] = None) -> KernelTerms:
    """
    Finite Bessel sums A*(s,t), B*(s,t), C*(s,t).

    Args:
        args: Kernel arguments
        dim: Algebra dimension
        config: Normalized Bessel settings

    Returns:
        KernelTerms of the closed form
    """
    lam = dim.lam
    a_terms, b_terms, c_terms = _closed_coefficients(lam)
    bessel = {}

    def jt(order: float) -> np.ndarray:
        if order not in bessel:
            bessel[order] = np.asarray(tilde_j(order, args.t, config), dtype=float)
        return bessel[order]

    def total(terms) -> np.ndarray:
        out = np.zeros(np.shape(args.s), dtype=float)
        for coef, power, order in terms:
            out = out + coef * args.s ** power * jt(order)
        return out

    prefactor = (-1.0) ** (lam + 1) * math.sqrt(math.pi / 2.0)
    return KernelTerms(a=total(a_terms), b=total(b_terms), c=total(c_terms), prefactor=prefactor, form='closed')


# ==================================================================================
# Series form
# ==================================================================================

def kernel_terms_series(args: KernelArgs, dim: CliffordDim, tol: float = 1e-12, max_terms: int = 200,
                        config: Optional[SpecFunConfig] = None) -> KernelTerms:
    """
    Truncated Bessel-Gegenbauer series A_λ, B_λ, C_λ.

    Summation stops once three consecutive terms are below tol relative to
    max(1, |partial sum|) at every point and k exceeds |x||y| + 2, or at
    max_terms. The report carries the last term magnitude as tail estimate.

    Raises:
        DimensionError: For d = 2, where Γ(λ) has a pole
    """
    lam = dim.lam
    if lam == 0:
        raise DimensionError("the series form needs lambda > 0 (d >= 4)", {"d": dim.d})
    z = np.asarray(args.z, dtype=float)
    u = args.cos_angle
    wnorm = args.t
    i_d = (-1.0) ** (dim.d // 2)
    a_scale = 2.0 ** (lam - 1) * gamma_fn(lam + 1.0)
    b_scale = -(2.0 ** (lam - 1)) * gamma_fn(float(lam))
    c_scale = -(2.0 * lam) * 2.0 ** (lam - 1) * gamma_fn(float(lam))

    a = np.zeros_like(z)
    b = np.zeros_like(z)
    c = np.zeros_like(z)
    quiet = np.zeros(z.shape, dtype=int)
    gegen = gegenbauer_iter(lam, u)
    gegen_shifted = gegenbauer_iter(lam + 1.0, u)
    k_floor = float(np.max(z, initial=0.0)) + 2.0
    last = np.zeros_like(z)
    k = 0
    for k in range(max_terms):
        parity = (-1.0) ** k
        base = scaled_bessel(k, lam, z, config) * next(gegen)
        da = a_scale * (i_d + parity) * base
        db = b_scale * (k + lam) * (i_d - parity) * base
        if k == 0:
            dc = np.zeros_like(z)
        else:
            dc = c_scale * (i_d + parity) * scaled_bessel(k - 1, lam + 1.0, z, config) * next(gegen_shifted)
        a, b, c = a + da, b + db, c + dc
        last = np.abs(da) + np.abs(db) + np.abs(dc) * wnorm
        current = np.abs(a + b) + np.abs(c) * wnorm
        quiet = np.where(last <= tol * np.maximum(current, 1.0), quiet + 1, 0)
        if k > k_floor and np.all(quiet >= 3):
            break
    converged = bool(np.all(quiet >= 3))
    report = SeriesReport(terms=k + 1, tail=float(np.max(last, initial=0.0)), converged=converged)
    if not converged:
        logger.warning(f"Kernel series stopped at {report.terms} terms with tail {report.tail:.3e} (tol {tol:.1e})")
    return KernelTerms(a=a, b=b, c=c, prefactor=1.0, form='series', report=report)


# ==================================================================================
# Array-level evaluation
# ==================================================================================

@lru_cache(maxsize=8)
def kernel_masks(d: int) -> Tuple[int, ...]:
    """Blade masks of the compact kernel columns: scalar, then e_j e_k."""
    return (0,) + tuple(mask for _, _, mask in bivector_masks(d))


def assemble(terms: KernelTerms, args: KernelArgs) -> np.ndarray:
    """Compact (..., 1 + d(d−1)/2) array of prefactor · (a + b + (x∧y) c)."""
    scalar = terms.scalar
    biv = terms.bivector_factor[..., None] * args.wedge
    return np.concatenate([np.asarray(scalar)[..., None], biv], axis=-1)


def kernel_values(x: np.ndarray, y: np.ndarray, d: int, sign: Sign = '-', inverse: bool = False,
                  config: Optional[SpecFunConfig] = None) -> np.ndarray:
    """
    Closed-form kernel values on broadcast point arrays.

    K₊(x, y) = K₋(x, −y)^c and the inverse kernels are complex conjugates, so
    for even d every variant is real and only the sign of y changes.

    Args:
        x: Points of shape (..., d), first (integrated) argument
        y: Points of shape (..., d), second argument
        d: Even dimension
        sign: '-' for K₋, '+' for K₊
        inverse: Whether the conjugated kernel of the inverse transform is wanted
        config: Normalized Bessel settings

    Returns:
        Compact real array (..., len(kernel_masks(d)))
    """
    dim = CliffordDim(d)
    y = np.asarray(y, dtype=float)
    if sign == '+':
        y = -y
    elif sign != '-':
        raise ValueError(f"kernel sign must be '-' or '+', got {sign!r}")
    args = KernelArgs.from_arrays(x, y)
    values = assemble(kernel_terms_closed(args, dim, config), args)
    # conjugation is the identity on real values
    return np.conj(values).real if inverse else values


def expand_kernel(values: np.ndarray, d: int) -> np.ndarray:
    """Full (..., 2^d) coefficient array of compact kernel values."""
    return expand_columns(values, kernel_masks(d), d)


def _as_multivector(values: np.ndarray, dim: CliffordDim) -> Multivector:
    return Multivector(dim, expand_kernel(np.asarray(values), dim.d))


# ==================================================================================
# Element-level operations
# ==================================================================================

def _check_vectors(x: Vector1, y: Vector1, dim: CliffordDim) -> None:
    if x.d != dim.d or y.d != dim.d:
        raise DimensionError("vector length does not match dimension", {"d": dim.d, "x": x.d, "y": y.d})


def kernel_minus_closed(x: Vector1, y: Vector1, dim: CliffordDim, config: Optional[SpecFunConfig] = None) -> Multivector:
    """K₋(x, y) from the finite Bessel sum."""
    _check_vectors(x, y, dim)
    return _as_multivector(kernel_values(x.as_array(), y.as_array(), dim.d, config=config), dim)


def kernel_minus_series(x: Vector1, y: Vector1, dim: CliffordDim, tol: Optional[float] = None,
                        max_terms: Optional[int] = None, strict: bool = False,
                        config: Optional[SpecFunConfig] = None) -> Multivector:
    """
    K₋(x, y) from the truncated series.

    Args:
        x: First argument
        y: Second argument
        dim: Algebra dimension (d >= 4)
        tol: Stopping tolerance
        max_terms: Term cap
        strict: Raise instead of warning when the tail exceeds tol

    Raises:
        SeriesConvergenceError: If strict and the series did not converge
    """
    _check_vectors(x, y, dim)
    args = KernelArgs.from_vectors(x, y)
    terms = kernel_terms_series(
        args, dim,
        tol=tol if tol is not None else _DEFAULT_KERNEL.series_tol,
        max_terms=max_terms or _DEFAULT_KERNEL.series_max_terms,
        config=config,
    )
    if strict and not terms.report.converged:
        raise SeriesConvergenceError(
            "kernel series did not converge",
            {"terms": terms.report.terms, "tail": terms.report.tail, "z": float(args.z)},
        )
    return _as_multivector(assemble(terms, args), dim)


def kernel_plus(x: Vector1, y: Vector1, dim: CliffordDim) -> Multivector:
    """K₊(x, y) = (K₋(x, −y))^c."""
    return kernel_minus_closed(x, -y, dim).complex_conjugate()


def kernel_tilde(x: Vector1, y: Vector1, dim: CliffordDim, sign: Sign = '-') -> Multivector:
    """Kernel of the inverse transform, the complex conjugate of K_±(x, y)."""
    base = kernel_minus_closed(x, y, dim) if sign == '-' else kernel_plus(x, y, dim)
    return base.complex_conjugate()


def additivity_defect(x: Vector1, y: Vector1, z: Vector1, dim: CliffordDim) -> float:
    """|K₋(x,z) K₋(y,z) − K₋(x+y,z)|, zero for d = 2 and generically not for d > 2."""
    d = dim.d
    left = mv_product(
        kernel_values(x.as_array(), z.as_array(), d), kernel_values(y.as_array(), z.as_array(), d), d,
        a_masks=kernel_masks(d), b_masks=kernel_masks(d),
    )
    right = expand_kernel(kernel_values((x + y).as_array(), z.as_array(), d), d)
    return float(mv_modulus(left - right))


# ==================================================================================
# Growth bound diagnostics
# ==================================================================================

def bound_ratios(x: np.ndarray, y: np.ndarray, d: int) -> np.ndarray:
    """|K₋(x,y)| / ((1+|x|)^λ (1+|y|)^λ) on broadcast point arrays."""
    lam = CliffordDim(d).lam
    values = kernel_values(x, y, d)
    weight = (1.0 + np.linalg.norm(x, axis=-1)) ** lam * (1.0 + np.linalg.norm(y, axis=-1)) ** lam
    return mv_modulus(values) / weight


def bound_ratio(x: Vector1, y: Vector1, dim: CliffordDim) -> float:
    _check_vectors(x, y, dim)
    return float(bound_ratios(x.as_array(), y.as_array(), dim.d))


def orthogonal_ray_sweep(dim: CliffordDim, max_radius: float = 10.0, points: int = 21) -> List[Tuple[float, float]]:
    """
    Bound ratio along x = r e1, y = r e2 for r in [0, max_radius].

    Returns:
        (r, ratio) pairs in increasing r
    """
    radii = np.linspace(0.0, max_radius, points)
    x = np.zeros((points, dim.d))
    y = np.zeros((points, dim.d))
    x[:, 0] = radii
    y[:, 1] = radii
    ratios = bound_ratios(x, y, dim.d)
    logger.debug(f"Ray sweep d={dim.d}: max ratio {float(np.max(ratios)):.4f} over r <= {max_radius}")
    return [(float(r), float(q)) for r, q in zip(radii, ratios)]
