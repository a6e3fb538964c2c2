"""
Clifford-Fourier Transform Module

Clifford-valued fields on R^d and the transforms acting on them:
- CliffordField, an evaluable f: R^d → R_d ⊗ C with an optional radial
  representation and an optional known spectrum F₋f
- cft / cft_inverse, lazily evaluated quadratures of
  (2π)^{−d/2} ∫ K(x, ω) f(x) dx with the kernel on the left
- partial_cft, the transform in the second slot of a pair function
- l2_inner, l2_norm and relative_error on quadrature grids

Radial fields f(x) = Σ f₀(|x|) c get their spectrum from a one-dimensional
Hankel rule, F₋f(ξ) = Σ (∫ f₀(r) r^{d−1} J̃_λ(r|ξ|) dr) c, so the operators of
the time-frequency layer can use F₋f without a nested quadrature.
"""

import functools
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.stats import special_ortho_group

from app.config.config_model import HankelModel, SpecFunConfig
from app.core.algebra import CliffordDim, Multivector, Vector1, mv_conjugate, mv_modulus, mv_product, weighted_product_sum
from app.core.cache_manager import get_cache
from app.core.errors import DimensionError
from app.core.kernel import Sign, kernel_masks, kernel_values
from app.core.quadrature import Grid, check_finite
from app.core.specfun import tilde_j

logger = logging.getLogger(__name__)

Profile = Callable[[np.ndarray], np.ndarray]
PairFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]
Coefficient = Union[Multivector, np.ndarray, float, complex]

# kernel elements held in memory per chunk of output points
CHUNK_ELEMENTS = 1 << 23

_DEFAULT_HANKEL = HankelModel()
_tokens = itertools.count(1)


def _coeff_array(dim: CliffordDim, value: Coefficient) -> np.ndarray:
    if isinstance(value, Multivector):
        dim.check_same(value.dim)
        return value.coeffs.copy()
    if np.ndim(value) == 0:
        return Multivector.scalar(dim, complex(value)).coeffs
    arr = np.asarray(value, dtype=complex)
    if arr.shape != (dim.size,):
        raise DimensionError("coefficient vector has wrong length", {"d": dim.d, "shape": arr.shape})
    return arr


def _tidy(values: np.ndarray) -> np.ndarray:
    """Drop an imaginary part that is identically zero."""
    if np.iscomplexobj(values) and not np.any(values.imag):
        return values.real
    return values


def _is_scalar(coeffs: np.ndarray) -> bool:
    return not np.any(coeffs[1:])


# ==================================================================================
# Hankel rule for radial spectra
# ==================================================================================

@functools.lru_cache(maxsize=8)
def _hankel_rule(radius: float, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    u, w = leggauss(nodes)
    return 0.5 * radius * (u + 1.0), 0.5 * radius * w


def hankel_transform(profile: Profile, d: int, rho: np.ndarray, model: Optional[HankelModel] = None,
                     config: Optional[SpecFunConfig] = None) -> np.ndarray:
    """
    Radial Fourier transform ∫₀^∞ f₀(r) r^{d−1} J̃_λ(r ρ) dr by Gauss-Legendre.

    Args:
        profile: Radial profile f₀, vectorized over r
        d: Dimension
        rho: Spectral radii |ξ|
        model: Upper limit and node count of the radial rule

    Returns:
        Array shaped like rho
    """
    model = model or _DEFAULT_HANKEL
    lam = CliffordDim(d).lam
    r, w = _hankel_rule(model.radius, model.nodes)
    rho = np.asarray(rho, dtype=float)
    weights = w * np.asarray(profile(r), dtype=float) * r ** (d - 1)
    bessel = tilde_j(float(lam), np.multiply.outer(rho, r), config)
    return np.asarray(bessel) @ weights


# ==================================================================================
# Fields
# ==================================================================================

RadialPart = Tuple[Profile, np.ndarray]


class CliffordField:
    """
    Evaluable Clifford-valued function on R^d.

    `func` maps an (N, d) array of points to (N, 2^d) blade coefficients.
    Radial fields either carry `radial_parts` ((profile, right constant) pairs
    with f(x) = Σ f₀(|x|) c) or are flagged radial because they were derived
    from radial fields by an operation that preserves radiality.

    A field may know its own spectrum F₋f. Since F₋F₋ = Id for even d the
    spectrum's spectrum is the field itself, and the link is kept both ways.
    """

    def __init__(self, dim: CliffordDim, func: Callable[[np.ndarray], np.ndarray], name: str = "field",
                 radial: bool = False, radial_parts: Optional[Sequence[RadialPart]] = None,
                 spectrum: Optional["CliffordField"] = None):
        self.dim = dim
        self.func = func
        self.name = name
        self.radial_parts: Optional[Tuple[RadialPart, ...]] = tuple(radial_parts) if radial_parts else None
        self.radial = bool(radial or self.radial_parts)
        self.token = f"{name}#{next(_tokens)}"
        self._spectrum: Optional[CliffordField] = None
        if spectrum is not None:
            self.link_spectrum(spectrum)

    # ---- construction ------------------------------------------------------------

    @classmethod
    def from_radial(cls, dim: CliffordDim, parts: Sequence[Tuple[Profile, Coefficient]], name: str = "radial",
                    spectrum_parts: Optional[Sequence[Tuple[Profile, Coefficient]]] = None) -> "CliffordField":
        """
        Field Σ f₀(|x|) c from radial profiles and right constants.

        Args:
            dim: Algebra dimension
            parts: (profile, constant) pairs
            name: Token prefix
            spectrum_parts: Analytic profiles of the spectrum, same constants
        """
        normalized = tuple((profile, _coeff_array(dim, coeff)) for profile, coeff in parts)

        def evaluate(points: np.ndarray) -> np.ndarray:
            r = np.linalg.norm(points, axis=-1)
            out = np.zeros(r.shape + (dim.size,), dtype=complex)
            for profile, coeff in normalized:
                out += np.asarray(profile(r), dtype=float)[..., None] * coeff
            return _tidy(out)

        field = cls(dim, evaluate, name=name, radial_parts=normalized)
        if spectrum_parts is not None:
            field.link_spectrum(cls.from_radial(dim, spectrum_parts, name=f"F[{name}]"))
        return field

    @classmethod
    def gaussian(cls, dim: CliffordDim, sigma: float = 1.0, coeff: Coefficient = 1.0) -> "CliffordField":
        """e^{−|x|²/(2σ²)} c, whose spectrum σ^d e^{−σ²|ξ|²/2} c is known in closed form."""
        if sigma <= 0:
            raise ValueError(f"gaussian scale must be positive, got {sigma}")
        return cls.from_radial(
            dim,
            [(lambda r: np.exp(-r * r / (2.0 * sigma * sigma)), coeff)],
            name=f"gaussian({sigma:g})",
            spectrum_parts=[(lambda r: sigma ** dim.d * np.exp(-sigma * sigma * r * r / 2.0), coeff)],
        )

    @classmethod
    def zero(cls, dim: CliffordDim) -> "CliffordField":
        field = cls(dim, lambda points: np.zeros(points.shape[:-1] + (dim.size,)), name="zero", radial=True)
        field.link_spectrum(field)
        return field

    @classmethod
    def constant(cls, dim: CliffordDim, value: Coefficient) -> "CliffordField":
        coeffs = _coeff_array(dim, value)
        return cls(dim, lambda points: _tidy(np.broadcast_to(coeffs, points.shape[:-1] + (dim.size,)).copy()),
                   name="constant", radial=True)

    # ---- spectrum ----------------------------------------------------------------

    def link_spectrum(self, spectrum: "CliffordField") -> None:
        self.dim.check_same(spectrum.dim)
        self._spectrum = spectrum
        spectrum._spectrum = self

    @property
    def spectrum(self) -> Optional["CliffordField"]:
        """F₋f when known analytically or from the Hankel rule, else None."""
        if self._spectrum is None and self.radial_parts is not None:
            d = self.dim.d
            parts = [
                (functools.partial(_hankel_profile, profile, d), coeff) for profile, coeff in self.radial_parts
            ]
            self.link_spectrum(CliffordField.from_radial(self.dim, parts, name=f"H[{self.name}]"))
        return self._spectrum

    @property
    def has_spectrum(self) -> bool:
        return self._spectrum is not None or self.radial_parts is not None

    def detached(self) -> "CliffordField":
        """Same values with no spectrum and no radial profiles, so F₋ of it runs by quadrature."""
        return CliffordField(self.dim, self.func, name=f"{self.name}~", radial=self.radial)

    # ---- evaluation --------------------------------------------------------------

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim.d:
            raise DimensionError("points do not match the field dimension", {"d": self.dim.d, "shape": points.shape})
        values = np.asarray(self.func(points))
        if values.shape != points.shape[:-1] + (self.dim.size,):
            raise DimensionError(f"field {self.name} returned a malformed array",
                                 {"expected": points.shape[:-1] + (self.dim.size,), "got": values.shape})
        return values

    def at(self, x: Union[Vector1, Sequence[float]]) -> Multivector:
        point = x.as_array() if isinstance(x, Vector1) else np.asarray(x, dtype=float)
        return Multivector(self.dim, self(point[None, :])[0])

    def sample(self, grid: Grid) -> np.ndarray:
        """Values on every grid node, memoized per field and grid."""
        if grid.dim != self.dim.d:
            raise DimensionError("grid and field dimensions differ", {"grid": grid.dim, "field": self.dim.d})
        cache = get_cache()
        key = cache.generate_cache_key(self.token, grid.describe(), category="samples")
        return cache.get_or_compute(key, lambda: self(grid.points), category="samples")

    # ---- algebra -----------------------------------------------------------------

    def right_mul(self, value: Coefficient) -> "CliffordField":
        """f·c; the spectrum is F₋f·c and radiality is kept."""
        return self._right_mul(_coeff_array(self.dim, value), follow=True)

    def _right_mul(self, coeffs: np.ndarray, follow: bool) -> "CliffordField":
        d = self.dim.d
        parts = None
        if self.radial_parts is not None:
            parts = [(profile, mv_product(coeff, coeffs, d)) for profile, coeff in self.radial_parts]
        field = CliffordField(self.dim, lambda points: _tidy(mv_product(self(points), coeffs, d)),
                              name=f"{self.name}*c", radial=self.radial, radial_parts=parts)
        if follow and self._spectrum is not None:
            field.link_spectrum(self._spectrum._right_mul(coeffs, follow=False))
        return field

    def left_mul(self, value: Coefficient) -> "CliffordField":
        """c·f; the spectrum survives only for scalar c."""
        coeffs = _coeff_array(self.dim, value)
        if _is_scalar(coeffs):
            return self.right_mul(coeffs)
        d = self.dim.d
        return CliffordField(self.dim, lambda points: _tidy(mv_product(coeffs, self(points), d)),
                             name=f"c*{self.name}", radial=self.radial)

    def _combine(self, other: "CliffordField", sign: float, follow: bool = True) -> "CliffordField":
        self.dim.check_same(other.dim)
        parts = None
        if self.radial_parts is not None and other.radial_parts is not None:
            parts = list(self.radial_parts) + [(p, sign * c) for p, c in other.radial_parts]
        op = "+" if sign > 0 else "-"
        field = CliffordField(self.dim, lambda points: self(points) + sign * other(points),
                              name=f"({self.name}{op}{other.name})", radial=self.radial and other.radial,
                              radial_parts=parts)
        if follow and self._spectrum is not None and other._spectrum is not None:
            field.link_spectrum(self._spectrum._combine(other._spectrum, sign, follow=False))
        return field

    def __add__(self, other: "CliffordField") -> "CliffordField":
        return self._combine(other, 1.0)

    def __sub__(self, other: "CliffordField") -> "CliffordField":
        return self._combine(other, -1.0)

    def __neg__(self) -> "CliffordField":
        return self.right_mul(-1.0)

    def __mul__(self, value: Union[float, complex]) -> "CliffordField":
        return self.right_mul(value)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        flags = ", radial" if self.radial else ""
        return f"CliffordField({self.token}, d={self.dim.d}{flags})"


def _hankel_profile(profile: Profile, d: int, rho: np.ndarray) -> np.ndarray:
    return hankel_transform(profile, d, rho)


def pointwise_product(f: CliffordField, g: CliffordField, name: Optional[str] = None) -> CliffordField:
    """t ↦ f(t) g(t) with the geometric product."""
    f.dim.check_same(g.dim)
    d = f.dim.d
    return CliffordField(f.dim, lambda points: _tidy(mv_product(f(points), g(points), d)),
                         name=name or f"{f.name}.{g.name}", radial=f.radial and g.radial)


def check_radial(field: CliffordField, count: int = 64, rotations: int = 4, radius: float = 3.0,
                 seed: int = 0) -> float:
    """
    Largest deviation |f(Rx) − f(x)| over random points and rotations.

    Returns:
        The maximum modulus of the differences; 0 for a truly radial field
    """
    rng = np.random.default_rng(seed)
    points = rng.uniform(-radius, radius, size=(count, field.dim.d))
    base = field(points)
    worst = 0.0
    for matrix in special_ortho_group.rvs(field.dim.d, size=rotations, random_state=seed).reshape(
            rotations, field.dim.d, field.dim.d):
        worst = max(worst, float(np.max(mv_modulus(field(points @ matrix.T) - base))))
    return worst


# ==================================================================================
# Transforms
# ==================================================================================

def _normalization(d: int) -> float:
    return (2.0 * math.pi) ** (-d / 2.0)


def _row_chunks(rows: int, nodes: int, columns: int) -> List[slice]:
    step = max(1, CHUNK_ELEMENTS // max(1, nodes * columns))
    return [slice(start, min(start + step, rows)) for start in range(0, rows, step)]


def transform_values(fields: Sequence[CliffordField], points: np.ndarray, grid: Grid, sign: Sign = '-',
                     inverse: bool = False, workers: int = 1,
                     config: Optional[SpecFunConfig] = None) -> List[np.ndarray]:
    """
    (2π)^{−d/2} Σ_n w_n K(x_n, ω) f(x_n) at every output point ω for several fields.

    Kernel values are computed once per chunk of output points and shared by
    all fields.

    Args:
        fields: Fields of one dimension
        points: (M, d) output points
        grid: Input quadrature grid
        sign: Kernel sign
        inverse: Use the kernel of the inverse transform
        workers: Threads partitioning the output points

    Returns:
        One (M, 2^d) array per field
    """
    if not fields:
        return []
    dim = fields[0].dim
    for field in fields[1:]:
        dim.check_same(field.dim)
    d = dim.d
    points = np.asarray(points, dtype=float).reshape(-1, d)
    samples = [field.sample(grid) for field in fields]
    for values in samples:
        check_finite(values, grid.points)
    masks = kernel_masks(d)
    scale = _normalization(d)
    outputs = [np.zeros((points.shape[0], dim.size), dtype=np.result_type(v.dtype, float)) for v in samples]
    chunks = _row_chunks(points.shape[0], grid.size, len(masks))

    def run(chunk: slice) -> None:
        kernel = kernel_values(grid.points[None, :, :], points[chunk, None, :], d, sign, inverse, config)
        for values, out in zip(samples, outputs):
            out[chunk] = scale * weighted_product_sum(kernel, values[None], grid.weights[None], d, a_masks=masks)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, chunks))
    else:
        for chunk in chunks:
            run(chunk)
    logger.debug(f"Transformed {len(fields)} field(s) at {points.shape[0]} points on {grid.describe()}")
    return [_tidy(out) for out in outputs]


def _transform_field(f: CliffordField, grid: Grid, sign: Sign, inverse: bool, workers: int,
                     config: Optional[SpecFunConfig]) -> CliffordField:
    label = f"F{'-' if sign == '-' else '+'}{'^-1' if inverse else ''}"
    key = f"{f.token}|{label}|{grid.describe()}"

    def evaluate(points: np.ndarray) -> np.ndarray:
        flat = points.reshape(-1, f.dim.d)
        rows = get_cache().lookup_rows(
            "transform", key, flat,
            lambda missing: transform_values([f], missing, grid, sign, inverse, workers, config)[0],
        )
        return rows.reshape(points.shape[:-1] + (f.dim.size,))

    result = CliffordField(f.dim, evaluate, name=f"{label}[{f.name}]", radial=f.radial)
    if sign == '-':
        # F₋⁻¹ = F₋ for even d, and F₋F₋ = Id; a spectrum f already has is kept
        if f.has_spectrum:
            result._spectrum = f
        else:
            result.link_spectrum(f)
    return result


def cft(f: CliffordField, sign: Sign = '-', grid: Optional[Grid] = None, workers: int = 1,
        config: Optional[SpecFunConfig] = None) -> CliffordField:
    """
    Clifford-Fourier transform F_± f(ω) = (2π)^{−d/2} ∫ K_±(x, ω) f(x) dx.

    The result is lazy: each requested output point costs one quadrature over
    `grid`, memoized by quantized coordinates.

    Args:
        f: Input field
        sign: '-' or '+'
        grid: Input quadrature grid
        workers: Threads partitioning output points

    Returns:
        CliffordField evaluating the transform
    """
    if grid is None:
        raise ValueError("cft needs an input grid")
    return _transform_field(f, grid, sign, False, workers, config)


def cft_inverse(f: CliffordField, sign: Sign = '-', grid: Optional[Grid] = None, workers: int = 1,
                config: Optional[SpecFunConfig] = None) -> CliffordField:
    """Inverse transform (2π)^{−d/2} ∫ K̃_±(ξ, y) f(ξ) dξ with K̃ the conjugated kernel."""
    if grid is None:
        raise ValueError("cft_inverse needs an input grid")
    return _transform_field(f, grid, sign, True, workers, config)


def spectrum_of(f: CliffordField, grid: Grid, workers: int = 1) -> CliffordField:
    """F₋f, from the known spectrum when there is one and by quadrature otherwise."""
    if f.has_spectrum:
        return f.spectrum
    logger.warning(f"No analytic spectrum for {f.name}; falling back to quadrature on {grid.describe()}")
    return cft(f, '-', grid, workers)


def plus_from_minus(spectrum: CliffordField) -> CliffordField:
    """F₊f(ω) = F₋f(−ω) for even d, since K₊(x, ω) = K₋(x, −ω)."""
    return CliffordField(spectrum.dim, lambda points: spectrum(-points), name=f"reflect[{spectrum.name}]",
                         radial=spectrum.radial)


def partial_cft(pair: PairFunction, dim: CliffordDim, grid: Grid, sign: Sign = '-') -> PairFunction:
    """
    Transform in the second variable, (x, ω) ↦ (2π)^{−d/2} ∫ K(t, ω) F(x, t) dt.

    Args:
        pair: Vectorized F mapping (..., d) x and (..., d) t to (..., 2^d)
        dim: Algebra dimension
        grid: Quadrature grid of the t variable
        sign: Kernel sign

    Returns:
        Callable mapping (M, d) x and (M, d) ω to (M, 2^d); x is a parameter
    """
    d = dim.d
    masks = kernel_masks(d)
    scale = _normalization(d)

    def evaluate(x: np.ndarray, omega: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, d)
        omega = np.asarray(omega, dtype=float).reshape(-1, d)
        out = np.zeros((x.shape[0], dim.size), dtype=complex)
        for chunk in _row_chunks(x.shape[0], grid.size, dim.size):
            values = np.asarray(pair(x[chunk, None, :], grid.points[None, :, :]))
            check_finite(values.reshape(-1, dim.size), np.repeat(x[chunk], grid.size, axis=0))
            kernel = kernel_values(grid.points[None, :, :], omega[chunk, None, :], d, sign)
            out[chunk] = scale * weighted_product_sum(kernel, values, grid.weights[None], d, a_masks=masks)
        return _tidy(out)

    return evaluate


# ==================================================================================
# Inner products and norms on grids
# ==================================================================================

def l2_inner(f: CliffordField, g: CliffordField, grid: Grid) -> Multivector:
    """⟨f, g⟩ = ∫ conj(f(x)) g(x) dx, Clifford-valued."""
    f.dim.check_same(g.dim)
    d = f.dim.d
    left = mv_conjugate(f.sample(grid), d)
    right = g.sample(grid)
    check_finite(left, grid.points)
    check_finite(right, grid.points)
    return Multivector(f.dim, weighted_product_sum(left, right, grid.weights, d))


def l2_norm(f: CliffordField, grid: Grid) -> float:
    """‖f‖₂ = (∫ |f(x)|² dx)^{1/2}."""
    values = f.sample(grid)
    check_finite(values, grid.points)
    return float(np.sqrt(grid.weights @ np.sum(np.abs(values) ** 2, axis=-1)))


def relative_error(f: CliffordField, reference: CliffordField, grid: Grid) -> float:
    """‖f − reference‖₂ / ‖reference‖₂ on the grid; absolute when the reference vanishes."""
    f.dim.check_same(reference.dim)
    diff = f.sample(grid) - reference.sample(grid)
    num = float(np.sqrt(grid.weights @ np.sum(np.abs(diff) ** 2, axis=-1)))
    den = l2_norm(reference, grid)
    return num / den if den > 0 else num
