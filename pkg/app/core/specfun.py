"""
Special Functions Module

Bessel functions of the first kind of real order ≥ −1/2, the normalized
J̃_α(t) = t^{−α} J_α(t), Gegenbauer and generalized Laguerre polynomials, and
the Gamma function. Every function accepts scalars or numpy arrays and returns
the same kind.

J̃_α is summed from its ascending series below the switch point t0 and taken
from the direct quotient above it, so the removable singularity at t = 0 never
produces 0/0. Half-integer orders use the spherical Bessel closed forms.
"""

import logging
import math
from typing import Iterator, Optional, Union

import numpy as np
from scipy import special

from app.config.config_model import SpecFunConfig
from app.core.errors import SpecialFunctionDomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_DEFAULT_CONFIG = SpecFunConfig()
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def _finish(value: np.ndarray, like) -> ArrayLike:
    return float(value) if np.ndim(like) == 0 else value


def is_half_integer(alpha: float) -> bool:
    twice = 2.0 * alpha
    return twice == round(twice) and int(round(twice)) % 2 == 1


def _nonnegative(t: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise SpecialFunctionDomainError(f"{name} requires t >= 0", {"min_t": float(np.nanmin(arr))})
    return arr


# ==================================================================================
# Gamma
# ==================================================================================

def gamma_fn(x: ArrayLike) -> ArrayLike:
    """
    Gamma function with exact fast paths for positive integers and half-integers.

    Raises:
        SpecialFunctionDomainError: At the poles x = 0, −1, −2, ...
    """
    arr = np.asarray(x, dtype=float)
    if np.any((arr <= 0) & (arr == np.round(arr))):
        raise SpecialFunctionDomainError("Gamma has poles at non-positive integers", {"x": x})
    if arr.ndim == 0:
        value = float(arr)
        if value == round(value) and value <= 171:
            return float(math.factorial(int(value) - 1))
        if is_half_integer(value) and 0 < value <= 170:
            n = int(value - 0.5)
            return math.factorial(2 * n) * math.sqrt(math.pi) / (4 ** n * math.factorial(n))
        return float(special.gamma(value))
    return special.gamma(arr)


# ==================================================================================
# Bessel J and normalized J
# ==================================================================================

def bessel_j(alpha: float, t: ArrayLike) -> ArrayLike:
    """
    Bessel function of the first kind J_α(t) for real α ≥ −1/2 and t ≥ 0.

    Raises:
        SpecialFunctionDomainError: If α < −1/2 or t < 0
    """
    if alpha < -0.5:
        raise SpecialFunctionDomainError("Bessel order must be >= -1/2", {"alpha": alpha})
    arr = _nonnegative(t, "bessel_j")
    return _finish(special.jv(alpha, arr), t)


def bessel_j_half_integer(alpha: float, t: ArrayLike) -> ArrayLike:
    """
    J_{n+1/2}(t) from the trigonometric closed forms.

    J_{−1/2}(t) = sqrt(2/(πt)) cos t and J_{n+1/2}(t) = sqrt(2t/π) j_n(t) for
    n ≥ 0, where j_n is the spherical Bessel function.
    """
    if not is_half_integer(alpha) or alpha < -0.5:
        raise SpecialFunctionDomainError("order must be a half-integer >= -1/2", {"alpha": alpha})
    arr = _nonnegative(t, "bessel_j_half_integer")
    if alpha == -0.5:
        with np.errstate(divide='ignore'):
            value = np.sqrt(2.0 / (math.pi * arr)) * np.cos(arr)
    else:
        value = np.sqrt(2.0 * arr / math.pi) * special.spherical_jn(int(alpha - 0.5), arr)
    return _finish(value, t)


def bessel_j_series(alpha: float, t: ArrayLike, terms: int = 30) -> ArrayLike:
    """Ascending series Σ_m (−1)^m (t/2)^{2m+α} / (m! Γ(m+α+1)), truncated."""
    arr = _nonnegative(t, "bessel_j_series")
    return _finish(_tilde_series(alpha, arr, terms, 0.0) * arr ** alpha, t)


def _tilde_series(alpha: float, t: np.ndarray, terms: int, tol: float) -> np.ndarray:
    term = np.full_like(t, 1.0 / (2.0 ** alpha * gamma_fn(alpha + 1.0)), dtype=float)
    total = term.copy()
    quarter = -(t * t) / 4.0
    for m in range(terms - 1):
        term = term * quarter / ((m + 1.0) * (m + 1.0 + alpha))
        total += term
        if tol and np.all(np.abs(term) <= tol * np.abs(total)):
            break
    return total


def tilde_j(alpha: float, t: ArrayLike, config: Optional[SpecFunConfig] = None) -> ArrayLike:
    """
    Normalized Bessel function J̃_α(t) = t^{−α} J_α(t), continuous at t = 0.

    Args:
        alpha: Real order ≥ −1/2
        t: Nonnegative argument(s)
        config: Series switch point and term budget

    Returns:
        J̃_α(t), with J̃_α(0) = 1 / (2^α Γ(α+1))
    """
    if alpha < -0.5:
        raise SpecialFunctionDomainError("Bessel order must be >= -1/2", {"alpha": alpha})
    cfg = config or _DEFAULT_CONFIG
    arr = _nonnegative(t, "tilde_j")
    small = arr < cfg.series_switch_t0
    out = np.empty_like(arr)
    out[small] = _tilde_series(alpha, arr[small], cfg.series_terms, cfg.tol)
    large = arr[~small]
    if alpha == -0.5:
        out[~small] = _SQRT_2_OVER_PI * np.cos(large)
    elif is_half_integer(alpha):
        n = int(alpha - 0.5)
        out[~small] = _SQRT_2_OVER_PI * special.spherical_jn(n, large) / large ** n
    else:
        out[~small] = special.jv(alpha, large) / large ** alpha
    return _finish(out, t)


def scaled_bessel(k: int, lam: float, z: np.ndarray, config: Optional[SpecFunConfig] = None) -> np.ndarray:
    """
    z^{−λ} J_{k+λ}(z) = z^k J̃_{k+λ}(z), the building block of the kernel series.

    Computed without forming z^{k+λ}, so large k at moderate z does not overflow.
    """
    cfg = config or _DEFAULT_CONFIG
    z = np.asarray(z, dtype=float)
    small = z < cfg.series_switch_t0
    out = np.empty_like(z)
    near = z[small]
    out[small] = near ** k * _tilde_series(k + lam, near, cfg.series_terms, cfg.tol)
    far = z[~small]
    out[~small] = special.jv(k + lam, far) * far ** (-lam)
    return out


# ==================================================================================
# Orthogonal polynomials
# ==================================================================================

def gegenbauer(k: int, lam: float, u: ArrayLike) -> ArrayLike:
    """
    Gegenbauer polynomial C_k^λ(u) by the three-term recurrence.

    C_{−1} ≡ 0 by convention, C_0 = 1, C_1 = 2λu and
    n C_n = 2u(n+λ−1) C_{n−1} − (n+2λ−2) C_{n−2}.
    """
    if k < -1:
        raise SpecialFunctionDomainError("Gegenbauer degree must be >= -1", {"k": k})
    return _finish(gegenbauer_table(k, lam, np.asarray(u, dtype=float))[k + 1], u)


def gegenbauer_table(kmax: int, lam: float, u: np.ndarray) -> np.ndarray:
    """Rows C_{−1}, C_0, ..., C_kmax stacked on a leading axis."""
    u = np.asarray(u, dtype=float)
    table = np.zeros((max(kmax, -1) + 2,) + u.shape, dtype=float)
    for n, row in zip(range(kmax + 1), gegenbauer_iter(lam, u)):
        table[n + 1] = row
    return table


def gegenbauer_iter(lam: float, u: np.ndarray) -> Iterator[np.ndarray]:
    """Endless stream C_0^λ(u), C_1^λ(u), ... for series that stop adaptively."""
    u = np.asarray(u, dtype=float)
    previous = np.zeros_like(u)
    current = np.ones_like(u)
    yield current
    n = 1
    while True:
        if n == 1:
            following = 2.0 * lam * u
        else:
            following = (2.0 * u * (n + lam - 1.0) * current - (n + 2.0 * lam - 2.0) * previous) / n
        previous, current = current, following
        yield current
        n += 1


def laguerre(j: int, alpha: float, r: ArrayLike) -> ArrayLike:
    """
    Generalized Laguerre polynomial L_j^α(r) by the three-term recurrence.

    n L_n = (2n−1+α−r) L_{n−1} − (n−1+α) L_{n−2}.
    """
    if j < 0:
        raise SpecialFunctionDomainError("Laguerre degree must be >= 0", {"j": j})
    arr = np.asarray(r, dtype=float)
    previous = np.zeros_like(arr)
    current = np.ones_like(arr)
    for n in range(1, j + 1):
        previous, current = current, ((2 * n - 1 + alpha - arr) * current - (n - 1 + alpha) * previous) / n
    return _finish(current, r)
