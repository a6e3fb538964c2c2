"""
Eigenbasis Module

Spherical monogenics and the Laguerre-monogenic Schwartz basis.

- PolyMV: polynomial in x_1..x_d with exact rational multivector coefficients
- dirac_apply: the left Dirac operator Σ e_i ∂/∂x_i
- monogenic_basis: kernel of the Dirac operator on homogeneous polynomials of
  degree k, from an exact nullspace over the rationals
- psi: basis field ψ for an EigenIndex, with its spectrum attached
- expected_eigenvalue: the eigenvalue of F_± on ψ

Nullspace vectors come from sympy in its column order, so the `l` index of a
basis element is deterministic but carries no further meaning.
"""

import functools
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import sympy

from app.config.config_model import EigenbasisModel
from app.core.algebra import CliffordDim, Multivector, blade_sign, embed_vectors, mv_product
from app.core.errors import DimensionError
from app.core.specfun import laguerre
from app.core.transform import CliffordField

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Parity = Literal['even', 'odd']

_DEFAULT_EIGENBASIS = EigenbasisModel()


# ==================================================================================
# Polynomials with multivector coefficients
# ==================================================================================

class PolyMV:
    """
    Sparse polynomial Σ_a x^a c_a with multivector coefficients c_a.

    Terms map an exponent tuple to a blade map {mask: Fraction}; zero
    coefficients are never stored.
    """

    def __init__(self, dim: CliffordDim, terms: Optional[Dict[Exponent, Dict[int, Fraction]]] = None):
        self.dim = dim
        self.terms: Dict[Exponent, Dict[int, Fraction]] = {}
        for exponent, blades in (terms or {}).items():
            if len(exponent) != dim.d:
                raise DimensionError("exponent length does not match dimension", {"d": dim.d, "exponent": exponent})
            for mask, value in blades.items():
                self._accumulate(tuple(exponent), mask, Fraction(value))

    @classmethod
    def monomial(cls, dim: CliffordDim, exponent: Exponent, mask: int = 0, value=1) -> "PolyMV":
        return cls(dim, {tuple(exponent): {mask: Fraction(value)}})

    @classmethod
    def constant(cls, dim: CliffordDim, mask: int = 0, value=1) -> "PolyMV":
        return cls.monomial(dim, (0,) * dim.d, mask, value)

    def _accumulate(self, exponent: Exponent, mask: int, value: Fraction) -> None:
        if mask >= self.dim.size:
            raise DimensionError("blade does not exist in this dimension", {"d": self.dim.d, "mask": mask})
        if value == 0:
            return
        blades = self.terms.setdefault(exponent, {})
        total = blades.get(mask, Fraction(0)) + value
        if total == 0:
            blades.pop(mask, None)
            if not blades:
                del self.terms[exponent]
        else:
            blades[mask] = total

    # ---- inspection --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degrees(self) -> List[int]:
        return sorted({sum(exponent) for exponent in self.terms})

    @property
    def degree(self) -> int:
        """Total degree; −1 for the zero polynomial."""
        return max(self.degrees, default=-1)

    def is_homogeneous(self, k: int) -> bool:
        return all(sum(exponent) == k for exponent in self.terms)

    def coordinates(self, monomials: List[Exponent]) -> List[Fraction]:
        """Coefficients in the (monomial, blade) order used by the Dirac matrix."""
        size = self.dim.size
        out = [Fraction(0)] * (len(monomials) * size)
        position = {m: i for i, m in enumerate(monomials)}
        for exponent, blades in self.terms.items():
            for mask, value in blades.items():
                out[position[exponent] * size + mask] = value
        return out

    # ---- arithmetic --------------------------------------------------------------

    def __add__(self, other: "PolyMV") -> "PolyMV":
        self.dim.check_same(other.dim)
        out = self.copy()
        for exponent, blades in other.terms.items():
            for mask, value in blades.items():
                out._accumulate(exponent, mask, value)
        return out

    def scale(self, value) -> "PolyMV":
        factor = Fraction(value)
        return PolyMV(self.dim, {e: {m: v * factor for m, v in b.items()} for e, b in self.terms.items()})

    def right_blade(self, mask: int) -> "PolyMV":
        """p · e_mask."""
        out = PolyMV(self.dim)
        for exponent, blades in self.terms.items():
            for own, value in blades.items():
                out._accumulate(exponent, own ^ mask, value * blade_sign(own, mask))
        return out

    def copy(self) -> "PolyMV":
        return PolyMV(self.dim, {e: dict(b) for e, b in self.terms.items()})

    # ---- evaluation --------------------------------------------------------------

    @functools.cached_property
    def _float_terms(self) -> Tuple[np.ndarray, np.ndarray]:
        exponents = np.array(list(self.terms), dtype=int).reshape(-1, self.dim.d)
        coeffs = np.zeros((len(self.terms), self.dim.size))
        for row, blades in enumerate(self.terms.values()):
            for mask, value in blades.items():
                coeffs[row, mask] = float(value)
        return exponents, coeffs

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Values at (..., d) points as (..., 2^d) arrays."""
        points = np.asarray(points, dtype=float)
        exponents, coeffs = self._float_terms
        if exponents.shape[0] == 0:
            return np.zeros(points.shape[:-1] + (self.dim.size,))
        monomials = np.prod(points[..., None, :] ** exponents, axis=-1)
        return monomials @ coeffs

    def at(self, point) -> Multivector:
        return Multivector(self.dim, self(np.asarray(point, dtype=float)))

    def __repr__(self) -> str:
        return f"PolyMV(d={self.dim.d}, terms={len(self.terms)}, degree={self.degree})"


def dirac_apply(p: PolyMV) -> PolyMV:
    """
    Left Dirac operator Σ_i e_i ∂p/∂x_i; lowers the degree by one.

    Coefficients stay rational, so a monogenic input gives the exact zero.
    """
    out = PolyMV(p.dim)
    for exponent, blades in p.terms.items():
        for i, power in enumerate(exponent):
            if power == 0:
                continue
            lowered = exponent[:i] + (power - 1,) + exponent[i + 1:]
            unit = 1 << i
            for mask, value in blades.items():
                out._accumulate(lowered, unit ^ mask, value * power * blade_sign(unit, mask))
    return out


# ==================================================================================
# Monogenic bases
# ==================================================================================

def homogeneous_monomials(d: int, k: int) -> List[Exponent]:
    """Exponents of degree k in d variables, in a fixed lexicographic order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(d), k):
        exponent = [0] * d
        for i in combo:
            exponent[i] += 1
        out.append(tuple(exponent))
    return sorted(out, reverse=True)


def dirac_matrix(dim: CliffordDim, k: int) -> sympy.Matrix:
    """Integer matrix of the Dirac operator from degree k to degree k−1 coordinates."""
    columns = homogeneous_monomials(dim.d, k)
    rows = homogeneous_monomials(dim.d, k - 1) if k > 0 else []
    data = []
    for exponent in columns:
        for mask in range(dim.size):
            image = dirac_apply(PolyMV.monomial(dim, exponent, mask))
            data.append([int(v) for v in image.coordinates(rows)])
    if not rows:
        return sympy.zeros(0, len(data))
    return sympy.Matrix(data).T


@dataclass(frozen=True)
class MonogenicBasis:
    """
    Basis of homogeneous degree-k monogenics.

    module='real' lists a real basis of the whole kernel (its length is the
    nullity of the Dirac matrix); module='right' lists generators of the
    kernel as a right Clifford module, the elements M_k^(l).
    """
    degree: int
    dim: CliffordDim
    elements: Tuple[PolyMV, ...]
    module: Literal['right', 'real']
    nullity: int

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, l: int) -> PolyMV:
        """1-based access M_k^(l)."""
        if not 1 <= l <= len(self.elements):
            raise IndexError(f"monogenic index l={l} outside 1..{len(self.elements)}")
        return self.elements[l - 1]


def _from_vector(dim: CliffordDim, monomials: List[Exponent], vector) -> PolyMV:
    poly = PolyMV(dim)
    size = dim.size
    for position, value in enumerate(vector):
        if value != 0:
            rational = sympy.Rational(value)
            poly._accumulate(monomials[position // size], position % size,
                             Fraction(int(rational.p), int(rational.q)))
    return poly


def _right_span(poly: PolyMV, monomials: List[Exponent]) -> np.ndarray:
    return np.array([[float(v) for v in poly.right_blade(mask).coordinates(monomials)]
                     for mask in range(poly.dim.size)])


def _module_generators(real_basis: List[PolyMV], monomials: List[Exponent], nullity: int) -> List[PolyMV]:
    """Greedy right-module generators: each pick maximizes the rank gained."""
    chosen: List[PolyMV] = []
    span = np.zeros((0, len(monomials) * (real_basis[0].dim.size if real_basis else 1)))
    rank = 0
    spans = [_right_span(p, monomials) for p in real_basis]
    while rank < nullity:
        best, best_rank = None, rank
        for index, block in enumerate(spans):
            candidate = int(np.linalg.matrix_rank(np.vstack([span, block])))
            if candidate > best_rank:
                best, best_rank = index, candidate
        if best is None:
            break
        chosen.append(real_basis[best])
        span = np.vstack([span, spans[best]])
        rank = best_rank
    return chosen


@functools.lru_cache(maxsize=32)
def monogenic_basis(k: int, dim: CliffordDim, module: Literal['right', 'real'] = 'right') -> MonogenicBasis:
    """
    Basis of ker(∂) ∩ P_k from the exact rational nullspace of the Dirac matrix.

    Args:
        k: Degree (small; the matrix has C(k+d−1, k)·2^d columns)
        dim: Algebra dimension
        module: 'right' for module generators, 'real' for a real basis

    Returns:
        MonogenicBasis whose elements all satisfy dirac_apply(p) = 0 exactly
    """
    if k < 0:
        raise ValueError(f"monogenic degree must be >= 0, got {k}")
    monomials = homogeneous_monomials(dim.d, k)
    matrix = dirac_matrix(dim, k)
    if k == 0:
        real_basis = [PolyMV.constant(dim, mask) for mask in range(dim.size)]
    else:
        real_basis = [_from_vector(dim, monomials, vector) for vector in matrix.nullspace()]
    for poly in real_basis:
        if not dirac_apply(poly).is_zero():
            raise ArithmeticError(f"nullspace vector of degree {k} is not monogenic")
    nullity = len(real_basis)
    if module == 'real':
        elements = real_basis
    elif k == 0:
        elements = [PolyMV.constant(dim)]
    else:
        elements = _module_generators(real_basis, monomials, nullity)
    logger.debug(f"Monogenic basis d={dim.d} k={k}: nullity {nullity}, {len(elements)} {module} element(s)")
    return MonogenicBasis(degree=k, dim=dim, elements=tuple(elements), module=module, nullity=nullity)


# ==================================================================================
# Laguerre-monogenic basis fields
# ==================================================================================

@dataclass(frozen=True)
class EigenIndex:
    """Index (parity, j, k, l) of a basis field; l is 1-based."""
    parity: Parity
    j: int
    k: int
    l: int = 1

    def __post_init__(self):
        if self.parity not in ('even', 'odd'):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if self.j < 0 or self.k < 0 or self.l < 1:
            raise ValueError(f"invalid eigen index {self}")

    @property
    def label(self) -> str:
        return f"psi({self.parity},{self.j},{self.k},{self.l})"


def _laguerre_order(idx: EigenIndex, dim: CliffordDim) -> float:
    shift = dim.d / 2.0 + idx.k
    return shift - 1.0 if idx.parity == 'even' else shift


def expected_eigenvalue(idx: EigenIndex, dim: CliffordDim, sign: Literal['-', '+'] = '-') -> complex:
    """
    Eigenvalue of F_± on ψ.

    even: (−1)^{j+k} (∓1)^k; odd: i^d (−1)^{j+1} (∓1)^{k+d−1}, where ∓1 is +1
    for F₋ and −1 for F₊.
    """
    flip = 1 if sign == '-' else -1
    if idx.parity == 'even':
        return complex((-1) ** (idx.j + idx.k) * flip ** idx.k)
    # i^d = (−1)^{d/2} for even d
    return complex((-1) ** (dim.d // 2) * (-1) ** (idx.j + 1) * flip ** (idx.k + dim.d - 1))


def psi(idx: EigenIndex, dim: CliffordDim, config: Optional[EigenbasisModel] = None) -> CliffordField:
    """
    Basis field with its F₋ spectrum attached.

    even: L_j^{d/2+k−1}(|x|²) M(x) e^{−|x|²/2}
    odd:  L_j^{d/2+k}(|x|²) x M(x) e^{−|x|²/2}, or M(x) x with odd_factor_order='m_then_x'

    Raises:
        IndexError: If l exceeds the number of module generators of degree k
    """
    config = config or _DEFAULT_EIGENBASIS
    monogenic = monogenic_basis(idx.k, dim)[idx.l]
    order = _laguerre_order(idx, dim)
    eigen = expected_eigenvalue(idx, dim, '-')
    d = dim.d

    if idx.parity == 'even' and idx.k == 0:
        coeff = monogenic.at(np.zeros(d))

        def profile(r: np.ndarray, scale: float = 1.0) -> np.ndarray:
            return scale * laguerre(idx.j, order, r * r) * np.exp(-r * r / 2.0)

        return CliffordField.from_radial(
            dim, [(profile, coeff)], name=idx.label,
            spectrum_parts=[(functools.partial(profile, scale=eigen.real), coeff)],
        )

    def evaluate(points: np.ndarray) -> np.ndarray:
        r2 = np.sum(points * points, axis=-1)
        radial = laguerre(idx.j, order, r2) * np.exp(-r2 / 2.0)
        values = monogenic(points)
        if idx.parity == 'odd':
            vector = embed_vectors(points, d)
            if config.odd_factor_order == 'x_then_m':
                values = mv_product(vector, values, d)
            else:
                values = mv_product(values, vector, d)
        return np.asarray(radial)[..., None] * values

    field = CliffordField(dim, evaluate, name=idx.label)
    field.link_spectrum(field.right_mul(eigen.real))
    return field


def eigen_indices(dim: CliffordDim, max_j: int, max_k: int) -> List[EigenIndex]:
    """Every (parity, j, k, l) with j ≤ max_j and k ≤ max_k, l over module generators."""
    out = []
    for parity in ('even', 'odd'):
        for j in range(max_j + 1):
            for k in range(max_k + 1):
                for l in range(1, len(monogenic_basis(k, dim)) + 1):
                    out.append(EigenIndex(parity, j, k, l))
    return out
