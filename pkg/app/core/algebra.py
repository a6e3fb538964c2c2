"""
Clifford Algebra Module

Arithmetic in the complexified Clifford algebra R_d ⊗ C with d anticommuting
imaginary units (e_i² = −1) for even d. This module provides:
- CliffordDim, the validated runtime dimension with λ = (d−2)/2
- Blade, the sorted index set naming a basis element e_A
- Multivector, a single algebra element with blade-indexed complex coefficients
- Vector1, a point of R^d viewed as a grade-1 element
- Array-level kernels working on (..., 2^d) coefficient arrays, used by the
  transform and quadrature layers for batched products

Coefficients are stored densely by blade bitmask (bit i−1 set when e_i is
present). Products iterate only over components that are nonzero somewhere in
the operands, so grade-{0,2} kernel values cost 1 + d(d−1)/2 columns instead of
2^d.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.errors import DimensionError

logger = logging.getLogger(__name__)

Number = Union[int, float, complex, np.number]


# ==================================================================================
# Dimension and blades
# ==================================================================================

@dataclass(frozen=True)
class CliffordDim:
    """Validated even dimension d ≥ 2 and the derived half-dimension λ."""
    d: int = 4

    def __post_init__(self):
        if isinstance(self.d, bool) or not isinstance(self.d, (int, np.integer)):
            raise DimensionError("dimension must be an integer", {"d": self.d})
        if self.d < 2 or self.d % 2:
            raise DimensionError(
                "only even dimensions d >= 2 are supported; the kernel closed form "
                "and its polynomial bound are unavailable for odd d",
                {"d": self.d},
            )

    @property
    def lam(self) -> int:
        """λ = (d−2)/2, an integer for even d."""
        return (self.d - 2) // 2

    @property
    def lam_exact(self) -> Fraction:
        return Fraction(self.d - 2, 2)

    @property
    def size(self) -> int:
        """Number of blades, 2^d."""
        return 1 << self.d

    def check_same(self, other: "CliffordDim") -> None:
        if other.d != self.d:
            raise DimensionError("dimension mismatch", {"left": self.d, "right": other.d})


@dataclass(frozen=True, order=True)
class Blade:
    """Basis element e_A for a strictly increasing index set A ⊆ {1..d}."""
    indices: Tuple[int, ...] = ()

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if any(i < 1 for i in indices):
            raise DimensionError("blade indices start at 1", {"indices": indices})
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise DimensionError("blade indices must be strictly increasing", {"indices": indices})
        object.__setattr__(self, "indices", indices)

    @property
    def grade(self) -> int:
        return len(self.indices)

    @property
    def mask(self) -> int:
        return sum(1 << (i - 1) for i in self.indices)

    @classmethod
    def from_mask(cls, mask: int) -> "Blade":
        indices = tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)
        return cls(indices)

    def fits(self, dim: CliffordDim) -> bool:
        return all(i <= dim.d for i in self.indices)

    @property
    def label(self) -> str:
        """Report label, e.g. ``e{1 2}``; the scalar unit is ``1``."""
        if not self.indices:
            return "1"
        return "e{" + " ".join(str(i) for i in self.indices) + "}"

    @property
    def column(self) -> str:
        """Compact column name for tabular output, e.g. ``e1_2``; scalar is ``s``."""
        if not self.indices:
            return "s"
        return "e" + "_".join(str(i) for i in self.indices)


BladeLike = Union[Blade, Sequence[int], int]


def _as_mask(blade: BladeLike) -> int:
    if isinstance(blade, Blade):
        return blade.mask
    if isinstance(blade, (int, np.integer)):
        return int(blade)
    return Blade(tuple(blade)).mask


# ==================================================================================
# Cayley tables
# ==================================================================================

def blade_sign(a: int, b: int) -> int:
    """
    Sign of e_a e_b for bitmask blades in the negative-definite signature.

    Reordering parity is counted by transpositions; each shared generator
    contributes e_i² = −1.
    """
    swaps = 0
    shifted = a >> 1
    while shifted:
        swaps += bin(shifted & b).count("1")
        shifted >>= 1
    contractions = bin(a & b).count("1")
    return -1 if (swaps + contractions) % 2 else 1


@lru_cache(maxsize=8)
def cayley_table(d: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index and sign tables: e_a e_b = sign[a, b] · e_{index[a, b]}."""
    size = 1 << d
    masks = np.arange(size)
    index = masks[:, None] ^ masks[None, :]
    sign = np.array([[blade_sign(a, b) for b in range(size)] for a in range(size)], dtype=float)
    index.setflags(write=False)
    sign.setflags(write=False)
    logger.debug(f"Built Cayley table for d={d} ({size}x{size})")
    return index, sign


@lru_cache(maxsize=8)
def conjugation_signs(d: int) -> np.ndarray:
    """Per-blade sign of the Clifford conjugate, (−1)^{k(k+1)/2} for grade k."""
    grades = np.array([bin(m).count("1") for m in range(1 << d)])
    signs = np.where((grades * (grades + 1) // 2) % 2, -1.0, 1.0)
    signs.setflags(write=False)
    return signs


@lru_cache(maxsize=8)
def blade_order(d: int) -> Tuple[Blade, ...]:
    """All blades of R_d in lexicographic order of their index sets."""
    blades = [Blade.from_mask(m) for m in range(1 << d)]
    return tuple(sorted(blades, key=lambda b: b.indices))


@lru_cache(maxsize=8)
def bivector_masks(d: int) -> Tuple[Tuple[int, int, int], ...]:
    """(j, k, mask) for every pair j < k (0-based axes) in lexicographic order."""
    return tuple((j, k, (1 << j) | (1 << k)) for j in range(d) for k in range(j + 1, d))


# ==================================================================================
# Array-level kernels on (..., 2^d) coefficient arrays
# ==================================================================================

def _support(a: np.ndarray) -> np.ndarray:
    flat = a.reshape(-1, a.shape[-1])
    return np.flatnonzero(np.any(flat != 0, axis=0))


def _columns(a: np.ndarray, masks: Optional[Sequence[int]], d: int) -> Tuple[np.ndarray, np.ndarray]:
    """(blade masks, column positions) of the components taking part in a product."""
    if masks is None:
        if a.shape[-1] != 1 << d:
            raise DimensionError("coefficient arrays do not match 2^d", {"d": d, "shape": a.shape})
        support = _support(a)
        return support, support
    masks = np.asarray(masks, dtype=int)
    if a.shape[-1] != masks.size:
        raise DimensionError("compact array does not match its blade masks", {"shape": a.shape, "masks": masks.size})
    return masks, np.arange(masks.size)


def mv_product(a: np.ndarray, b: np.ndarray, d: int,
               a_masks: Optional[Sequence[int]] = None,
               b_masks: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Batched geometric product of coefficient arrays with broadcasting.

    Args:
        a: Array of shape (..., 2^d), or (..., len(a_masks)) when compact
        b: Array of shape (..., 2^d), or (..., len(b_masks)) when compact
        d: Algebra dimension
        a_masks: Blade masks of the columns of a compact left operand
        b_masks: Blade masks of the columns of a compact right operand

    Returns:
        Full array of the broadcast shape (..., 2^d) holding a·b row by row
    """
    index, sign = cayley_table(d)
    masks_a, cols_a = _columns(a, a_masks, d)
    masks_b, cols_b = _columns(b, b_masks, d)
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (1 << d,)
    out = np.zeros(shape, dtype=np.result_type(a.dtype, b.dtype, float))
    for i, ci in zip(masks_a, cols_a):
        left = a[..., ci]
        for j, cj in zip(masks_b, cols_b):
            out[..., index[i, j]] += sign[i, j] * left * b[..., cj]
    return out


def weighted_product_sum(a: np.ndarray, b: np.ndarray, w: np.ndarray, d: int,
                         a_masks: Optional[Sequence[int]] = None,
                         b_masks: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Quadrature-style reduction Σ_n w_n · a_n · b_n with the geometric product.

    The node axis is the second to last one. The reduction runs as a matrix
    product over the supported blades and the Cayley table folds the result.

    Args:
        a: Array of shape (..., N, 2^d) or compact (..., N, len(a_masks)), left factors
        b: Array of shape (..., N, 2^d) or compact (..., N, len(b_masks)), right factors
        w: Array of shape (..., N), real weights
        d: Algebra dimension
        a_masks: Blade masks of a compact left operand
        b_masks: Blade masks of a compact right operand

    Returns:
        Array of shape (..., 2^d)
    """
    index, sign = cayley_table(d)
    masks_a, cols_a = _columns(a, a_masks, d)
    masks_b, cols_b = _columns(b, b_masks, d)
    lead = np.broadcast_shapes(a.shape[:-2], b.shape[:-2], w.shape[:-1])
    dtype = np.result_type(a.dtype, b.dtype, float)
    out = np.zeros(lead + (1 << d,), dtype=dtype)
    if masks_a.size == 0 or masks_b.size == 0:
        return out
    weighted = a[..., cols_a] * w[..., None]
    gram = np.matmul(np.swapaxes(weighted, -1, -2), b[..., cols_b])
    for row, i in enumerate(masks_a):
        out[..., index[i, masks_b]] += sign[i, masks_b] * gram[..., row, :]
    return out


def expand_columns(a: np.ndarray, masks: Sequence[int], d: int) -> np.ndarray:
    """Scatter a compact (..., len(masks)) array into full (..., 2^d) form."""
    out = np.zeros(a.shape[:-1] + (1 << d,), dtype=a.dtype)
    out[..., np.asarray(masks, dtype=int)] = a
    return out


def mv_conjugate(a: np.ndarray, d: int) -> np.ndarray:
    """Clifford conjugate of each row: blade signs and complex conjugation."""
    return np.conj(a) * conjugation_signs(d)


def mv_modulus(a: np.ndarray) -> np.ndarray:
    """|a| = sqrt(Σ_A |a_A|²) along the last axis."""
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=-1))


def embed_vectors(x: np.ndarray, d: int) -> np.ndarray:
    """Embed points of shape (..., d) as grade-1 coefficient arrays (..., 2^d)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1] + (1 << d,), dtype=float)
    for i in range(d):
        out[..., 1 << i] = x[..., i]
    return out


def wedge_components(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coefficients x_j y_k − x_k y_j for j < k, lexicographic pair order."""
    d = x.shape[-1]
    pairs = [x[..., j] * y[..., k] - x[..., k] * y[..., j] for j in range(d) for k in range(j + 1, d)]
    return np.stack(pairs, axis=-1)


# ==================================================================================
# Multivector and Vector1
# ==================================================================================

class Multivector:
    """
    Element of R_d ⊗ C with blade-indexed complex coefficients.

    Supports the geometric product (``*`` and ``@``), addition, scalar scaling,
    Clifford and complex conjugation, grade projection and the modulus
    |a| = sqrt(Σ_A |a_A|²).
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: CliffordDim, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (dim.size,):
            raise DimensionError("coefficient vector has wrong length", {"d": dim.d, "shape": coeffs.shape})
        self.dim = dim
        self.coeffs = coeffs

    # ---- construction ------------------------------------------------------------

    @classmethod
    def zero(cls, dim: CliffordDim) -> "Multivector":
        return cls(dim, np.zeros(dim.size, dtype=complex))

    @classmethod
    def scalar(cls, dim: CliffordDim, value: Number = 1.0) -> "Multivector":
        out = cls.zero(dim)
        out.coeffs[0] = value
        return out

    @classmethod
    def blade(cls, dim: CliffordDim, blade: BladeLike, value: Number = 1.0) -> "Multivector":
        mask = _as_mask(blade)
        if mask >= dim.size:
            raise DimensionError("blade does not exist in this dimension", {"d": dim.d, "blade": blade})
        out = cls.zero(dim)
        out.coeffs[mask] = value
        return out

    @classmethod
    def from_terms(cls, dim: CliffordDim, terms: Mapping[BladeLike, Number]) -> "Multivector":
        out = cls.zero(dim)
        for blade, value in terms.items():
            mask = _as_mask(blade)
            if mask >= dim.size:
                raise DimensionError("blade does not exist in this dimension", {"d": dim.d, "blade": blade})
            out.coeffs[mask] += value
        return out

    # ---- inspection --------------------------------------------------------------

    def terms(self, tol: float = 0.0) -> Dict[Blade, complex]:
        """Nonzero coefficients keyed by blade, in lexicographic blade order."""
        return {
            b: complex(self.coeffs[b.mask])
            for b in blade_order(self.dim.d)
            if abs(self.coeffs[b.mask]) > tol
        }

    def __getitem__(self, blade: BladeLike) -> complex:
        return complex(self.coeffs[_as_mask(blade)])

    @property
    def scalar_part(self) -> complex:
        return complex(self.coeffs[0])

    def grade(self, k: int) -> "Multivector":
        masks = np.arange(self.dim.size)
        keep = np.array([bin(m).count("1") == k for m in masks])
        return Multivector(self.dim, np.where(keep, self.coeffs, 0))

    def grades(self, tol: float = 1e-12) -> List[int]:
        return sorted({b.grade for b in self.terms(tol)})

    def modulus(self) -> float:
        return float(mv_modulus(self.coeffs))

    def is_close(self, other: "Multivector", tol: float = 1e-12) -> bool:
        self.dim.check_same(other.dim)
        return float(mv_modulus(self.coeffs - other.coeffs)) <= tol

    # ---- arithmetic --------------------------------------------------------------

    def _coerce(self, other) -> "Multivector":
        if isinstance(other, Multivector):
            self.dim.check_same(other.dim)
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Multivector.scalar(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self.dim, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self.dim, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self.dim, other.coeffs - self.coeffs)

    def __neg__(self) -> "Multivector":
        return Multivector(self.dim, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Multivector(self.dim, self.coeffs * other)
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Multivector(self.dim, other * self.coeffs)
        return NotImplemented

    def __matmul__(self, other: "Multivector") -> "Multivector":
        return geometric_product(self, other)

    def __truediv__(self, other: Number) -> "Multivector":
        return Multivector(self.dim, self.coeffs / other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def conjugate(self) -> "Multivector":
        return clifford_conjugate(self)

    def complex_conjugate(self) -> "Multivector":
        return Multivector(self.dim, np.conj(self.coeffs))

    # ---- rendering ---------------------------------------------------------------

    def __str__(self) -> str:
        terms = self.terms()
        if not terms:
            return "0"
        parts = []
        for blade, value in terms.items():
            coefficient = _format_complex(value)
            parts.append(coefficient if blade.grade == 0 else f"{coefficient} {blade.label}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Multivector(d={self.dim.d}, {self})"


def _format_complex(value: complex) -> str:
    if value.imag == 0:
        return f"{value.real:.12g}"
    if value.real == 0:
        return f"{value.imag:.12g}i"
    return f"({value.real:.12g}{value.imag:+.12g}i)"


@dataclass(frozen=True)
class Vector1:
    """Point of R^d, identified with the grade-1 element Σ x_i e_i."""
    components: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(float(c) for c in self.components))

    @classmethod
    def of(cls, values: Iterable[float]) -> "Vector1":
        return cls(tuple(values))

    @classmethod
    def basis(cls, d: int, i: int, scale: float = 1.0) -> "Vector1":
        """The scaled unit vector scale·e_i (1-based i)."""
        values = [0.0] * d
        values[i - 1] = scale
        return cls(tuple(values))

    @classmethod
    def zeros(cls, d: int) -> "Vector1":
        return cls((0.0,) * d)

    @property
    def d(self) -> int:
        return len(self.components)

    def as_array(self) -> np.ndarray:
        return np.array(self.components, dtype=float)

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.components))

    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.components)

    def embed(self, dim: CliffordDim) -> Multivector:
        if self.d != dim.d:
            raise DimensionError("vector length does not match dimension", {"d": dim.d, "len": self.d})
        return Multivector(dim, embed_vectors(self.as_array(), dim.d))

    def _check(self, other: "Vector1") -> None:
        if other.d != self.d:
            raise DimensionError("vector dimension mismatch", {"left": self.d, "right": other.d})

    def __add__(self, other: "Vector1") -> "Vector1":
        self._check(other)
        return Vector1(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "Vector1") -> "Vector1":
        self._check(other)
        return Vector1(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "Vector1":
        return Vector1(tuple(-c for c in self.components))

    def __mul__(self, scale: float) -> "Vector1":
        return Vector1(tuple(scale * c for c in self.components))

    __rmul__ = __mul__


# ==================================================================================
# Operations on single elements
# ==================================================================================

def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    """Geometric product a·b; bilinear and associative."""
    a.dim.check_same(b.dim)
    return Multivector(a.dim, mv_product(a.coeffs, b.coeffs, a.dim.d))


def clifford_conjugate(a: Multivector) -> Multivector:
    """Anti-automorphism with conj(e_i) = −e_i and complex-conjugated coefficients."""
    return Multivector(a.dim, mv_conjugate(a.coeffs, a.dim.d))


def inner(x: Vector1, y: Vector1) -> float:
    """Euclidean inner product ⟨x, y⟩."""
    x._check(y)
    return float(sum(a * b for a, b in zip(x.components, y.components)))


def wedge(x: Vector1, y: Vector1, dim: CliffordDim) -> Multivector:
    """Grade-2 part x∧y, so that xy = −⟨x,y⟩ + x∧y."""
    x._check(y)
    if x.d != dim.d:
        raise DimensionError("vector length does not match dimension", {"d": dim.d, "len": x.d})
    out = Multivector.zero(dim)
    components = wedge_components(x.as_array(), y.as_array())
    for (_, _, mask), value in zip(bivector_masks(dim.d), components):
        out.coeffs[mask] = value
    return out


def modulus(a: Multivector) -> float:
    return a.modulus()
