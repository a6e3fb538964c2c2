"""
Time-Frequency Operators Module

Generalized translation τ_y, modulation M_y, the commutator [τ_x, M_ω],
convolution, and the weighted norms of the spaces L^p, B, B^p and W_pλ.

Translation is defined through the spectrum, F₋(τ_y f) = K₋(y, ·) F₋f, which
gives the integral
    τ_y f(x) = (2π)^{−d/2} ∫ K₋(ξ, x) K₋(y, ξ) F₋f(ξ) dξ = F₋(M_y F₋f)(x).
On radial fields it reduces to the shift f(x − y). Every operator links the
spectrum of its result when the input spectrum is known, so chains such as
τ_x M_ω g cost a single quadrature per output point.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Union

import numpy as np

from app.core.algebra import CliffordDim, Vector1, mv_modulus, mv_product, weighted_product_sum
from app.core.errors import DimensionError
from app.core.kernel import kernel_masks, kernel_values
from app.core.quadrature import Grid, check_finite
from app.core.transform import CHUNK_ELEMENTS, CliffordField, cft, cft_inverse, pointwise_product, spectrum_of

logger = logging.getLogger(__name__)

PointLike = Union[Vector1, Sequence[float], np.ndarray]


def _point(y: PointLike, dim: CliffordDim) -> np.ndarray:
    arr = y.as_array() if isinstance(y, Vector1) else np.asarray(y, dtype=float)
    if arr.shape != (dim.d,):
        raise DimensionError("shift does not match the field dimension", {"d": dim.d, "shape": arr.shape})
    return arr


def _label(y: np.ndarray) -> str:
    return "(" + ",".join(f"{v:g}" for v in y) + ")"


# ==================================================================================
# Modulation
# ==================================================================================

def _modulated(f: CliffordField, y: np.ndarray) -> CliffordField:
    d = f.dim.d
    masks = kernel_masks(d)

    def evaluate(points: np.ndarray) -> np.ndarray:
        kernel = kernel_values(y, points, d)
        return mv_product(kernel, f(points), d, a_masks=masks)

    return CliffordField(f.dim, evaluate, name=f"M{_label(y)}[{f.name}]")


def modulate(f: CliffordField, y: PointLike) -> CliffordField:
    """
    M_y f(x) = K₋(y, x) f(x), kernel on the left.

    The spectrum τ_y F₋f is attached when F₋f is known and radial.
    """
    y = _point(y, f.dim)
    if not np.any(y):
        return f
    result = _modulated(f, y)
    if f.has_spectrum and f.spectrum.radial:
        result.link_spectrum(_shifted(f.spectrum, y))
    return result


# ==================================================================================
# Translation
# ==================================================================================

def _shifted(f: CliffordField, y: np.ndarray) -> CliffordField:
    return CliffordField(f.dim, lambda points: f(points - y), name=f"T{_label(y)}[{f.name}]")


def translate(f: CliffordField, y: PointLike, grid: Grid, inner_grid: Optional[Grid] = None,
              workers: int = 1) -> CliffordField:
    """
    Generalized translation τ_y f.

    Radial fields are shifted, x ↦ f(x − y). Other fields take the integral
    path F₋(M_y F₋f) over `grid`; when F₋f is unknown it is itself computed
    by quadrature over `inner_grid`, which nests two d-dimensional rules.

    Args:
        f: Field to translate
        y: Shift
        grid: Quadrature grid of the ξ integral
        inner_grid: Grid of the numerical spectrum for fields without one
        workers: Threads partitioning output points

    Returns:
        The translated field, with its spectrum M_y F₋f linked when known
    """
    y = _point(y, f.dim)
    if not np.any(y):
        return f
    if f.radial:
        result = _shifted(f, y)
        if f.has_spectrum:
            result.link_spectrum(_modulated(f.spectrum, y))
        return result
    return translate_integral(f, y, grid, inner_grid, workers)


def translate_integral(f: CliffordField, y: PointLike, grid: Grid, inner_grid: Optional[Grid] = None,
                       workers: int = 1) -> CliffordField:
    """τ_y f(x) = (2π)^{−d/2} ∫ K₋(ξ, x) K₋(y, ξ) F₋f(ξ) dξ, whatever the symmetry of f."""
    y = _point(y, f.dim)
    if not f.has_spectrum:
        logger.warning(f"Translating {f.name} without a known spectrum: nested quadrature")
    spectrum = spectrum_of(f, inner_grid or grid, workers)
    modulated = _modulated(spectrum, y)
    result = cft(modulated, '-', grid, workers)
    result.name = f"T{_label(y)}[{f.name}]"
    return result


def commutator_tm(g: CliffordField, x: PointLike, omega: PointLike, grid: Grid,
                  inner_grid: Optional[Grid] = None, workers: int = 1) -> CliffordField:
    """
    [τ_x, M_ω] g = τ_x(M_ω g) − M_ω(τ_x g).

    The first term runs through the integral path, the second through the
    shift when g is radial. The commutator is identically zero for x = 0 or
    ω = 0.
    """
    x = _point(x, g.dim)
    omega = _point(omega, g.dim)
    if not np.any(x) or not np.any(omega):
        return CliffordField.zero(g.dim)
    first = translate(modulate(g, omega), x, grid, inner_grid, workers)
    second = modulate(translate(g, x, grid, inner_grid, workers), omega)
    result = first - second
    result.name = f"[T{_label(x)},M{_label(omega)}][{g.name}]"
    return result


def translation_continuity(g: CliffordField, grid: Grid, direction: Optional[PointLike] = None,
                           steps: int = 7, inner_grid: Optional[Grid] = None) -> List[float]:
    """‖τ_{2^{−n} e} g − g‖₂ for n = 0..steps−1 along a direction e (e1 by default)."""
    e = np.zeros(g.dim.d)
    e[0] = 1.0
    if direction is not None:
        e = _point(direction, g.dim)
    out = []
    for n in range(steps):
        shifted = translate(g, e * 2.0 ** (-n), grid, inner_grid)
        diff = shifted(grid.points) - g.sample(grid)
        out.append(float(np.sqrt(grid.weights @ np.sum(np.abs(diff) ** 2, axis=-1))))
    return out


# ==================================================================================
# Convolution
# ==================================================================================

def _convolve_radial(f: CliffordField, g: CliffordField, grid: Grid) -> CliffordField:
    d = f.dim.d
    scale = (2.0 * math.pi) ** (-d / 2.0)

    def evaluate(points: np.ndarray) -> np.ndarray:
        flat = points.reshape(-1, d)
        right = g.sample(grid)
        out = np.zeros((flat.shape[0], f.dim.size), dtype=np.result_type(right.dtype, float))
        step = max(1, CHUNK_ELEMENTS // (grid.size * f.dim.size))
        for start in range(0, flat.shape[0], step):
            chunk = slice(start, start + step)
            left = f(flat[chunk, None, :] - grid.points[None, :, :])
            out[chunk] = scale * weighted_product_sum(left, right[None], grid.weights[None], d)
        return out.reshape(points.shape[:-1] + (f.dim.size,))

    return CliffordField(f.dim, evaluate, name=f"({f.name}*{g.name})", radial=g.radial)


def _convolve_nested(f: CliffordField, g: CliffordField, outer: Grid, inner: Grid, workers: int) -> CliffordField:
    """
    Double sum (2π)^{−d} Σ_y Σ_ξ w_y w_ξ K₋(ξ, x) K₋(y, ξ) F₋f(ξ) g(y).

    The y sum is taken first for each ξ, blade by blade of g, so the
    ξ-dependent factor is computed once and the outer sum is one transform.
    """
    d = f.dim.d
    masks = kernel_masks(d)
    spectrum = spectrum_of(f, inner, workers).sample(inner)
    values = g.sample(outer)
    check_finite(values, outer.points)
    accumulated = np.zeros((inner.size, f.dim.size), dtype=np.result_type(spectrum.dtype, values.dtype, float))
    step = max(1, CHUNK_ELEMENTS // (outer.size * len(masks)))
    scale = (2.0 * math.pi) ** (-d / 2.0)
    for blade in np.flatnonzero(np.any(values != 0, axis=0)):
        unit = np.zeros(f.dim.size)
        unit[blade] = 1.0
        for start in range(0, inner.size, step):
            chunk = slice(start, start + step)
            kernel = kernel_values(outer.points[None, :, :], inner.points[chunk, None, :], d)
            weighted = np.tensordot(kernel, outer.weights * values[:, blade], axes=(1, 0))
            left = mv_product(weighted, spectrum[chunk], d, a_masks=masks)
            accumulated[chunk] += scale * mv_product(left, unit, d)
    bracket = CliffordField(f.dim, lambda points: _lookup(points, inner, accumulated), name="bracket")
    result = cft(bracket, '-', inner, workers)
    result.name = f"({f.name}*{g.name})"
    return result


def _lookup(points: np.ndarray, grid: Grid, values: np.ndarray) -> np.ndarray:
    """Values of a grid-sampled function; only defined on the grid nodes themselves."""
    if points.shape == grid.points.shape and np.array_equal(points, grid.points):
        return values
    raise ValueError("grid-sampled bracket evaluated off its grid")


def convolve(f: CliffordField, g: CliffordField, grid: Grid, inner_grid: Optional[Grid] = None,
             workers: int = 1) -> CliffordField:
    """
    (f ∗ g)(x) = (2π)^{−d/2} ∫ τ_y f(x) g(y) dy.

    Radial f uses the shift inside a single quadrature over `grid`; then
    F₋(f ∗ g) = F₋f · F₋g and that spectrum is linked when both are known.
    Other f need the translation integral for every node and run nested
    over `grid` (y) and `inner_grid` (ξ).
    """
    f.dim.check_same(g.dim)
    if f.radial:
        result = _convolve_radial(f, g, grid)
        if f.has_spectrum and g.has_spectrum:
            result.link_spectrum(pointwise_product(f.spectrum, g.spectrum))
        return result
    logger.warning(f"Convolution with non-radial {f.name}: nested quadrature")
    return _convolve_nested(f, g, grid, inner_grid or grid, workers)


def convolve_spectral(f: CliffordField, g: CliffordField, grid: Grid, workers: int = 1) -> CliffordField:
    """F₋⁻¹(F₋f · F₋g), the product-theorem route to f ∗ g for radial f."""
    product = pointwise_product(spectrum_of(f, grid, workers), spectrum_of(g, grid, workers))
    result = cft_inverse(product, '-', grid, workers)
    result.name = f"({f.name}*{g.name})^"
    return result


# ==================================================================================
# Norms
# ==================================================================================

@dataclass(frozen=True)
class NormKind:
    """
    Norm family and exponent.

    Lp: (∫|f|^p)^{1/p}; B: ∫(1+|y|)^λ|f|; Bp: (∫(1+|y|)^λ|f|^p)^{1/p};
    Wp: (∫(1+|y|)^{λp}|f|^p)^{1/p}. For p = 1 the last three coincide.
    """
    kind: Literal['Lp', 'B', 'Bp', 'Wp']
    p: float = 2.0

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"norm exponent must be >= 1, got {self.p}")
        if self.kind == 'B' and self.p != 1:
            object.__setattr__(self, 'p', 1.0)

    @classmethod
    def lp(cls, p: float = 2.0) -> "NormKind":
        return cls('Lp', p)

    @classmethod
    def b(cls) -> "NormKind":
        return cls('B', 1.0)

    @classmethod
    def bp(cls, p: float) -> "NormKind":
        return cls('Bp', p)

    @classmethod
    def w(cls, p: float) -> "NormKind":
        return cls('Wp', p)

    def weight_exponent(self, lam: float) -> float:
        if self.kind == 'Lp':
            return 0.0
        if self.kind == 'Wp':
            return lam * self.p
        return lam

    @property
    def label(self) -> str:
        return {'Lp': f"L{self.p:g}", 'B': "B", 'Bp': f"B^{self.p:g}", 'Wp': f"W_{self.p:g},lam"}[self.kind]


def weighted_lp(values: np.ndarray, grid: Grid, weight_exponent: float = 0.0, p: float = 2.0) -> float:
    """(Σ w_n (1+|x_n|)^a |v_n|^p)^{1/p} for (N, 2^d) values on the grid."""
    check_finite(values, grid.points)
    weight = (1.0 + np.linalg.norm(grid.points, axis=-1)) ** weight_exponent
    total = float(grid.weights @ (weight * mv_modulus(values) ** p))
    return total ** (1.0 / p)


def norm(f: CliffordField, kind: NormKind, grid: Grid) -> float:
    """Quadrature value of the weighted norm of f."""
    return weighted_lp(f.sample(grid), grid, kind.weight_exponent(f.dim.lam), kind.p)
