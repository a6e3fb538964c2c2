"""
Quadrature Module

Deterministic tensor-product rules over R^d and scrambled Sobol integration
over R^{2d}.

Tensor grids come in two families:
- hermite: Gauss-Hermite nodes scaled by `scale`, with the Gaussian factor
  folded back into the weights so the grid integrates plain ∫ f(x) dx and is
  exact for e^{−|x|²/scale²} times polynomials of degree < 2n per axis
- trapezoid: equispaced nodes on [−R, R] per axis with halved end weights

Either family can be pruned to a ball with `max_radius`, which drops nodes
whose contribution is negligible for Gaussian-class integrands.
"""

import functools
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.stats import norm, qmc

from app.config.config_model import GridModel
from app.core.algebra import CliffordDim, Multivector, Vector1
from app.core.errors import QuadratureGuardError

logger = logging.getLogger(__name__)

Scheme = Literal['hermite', 'trapezoid']

MAX_NODES = 10 ** 7


# ==================================================================================
# Tensor grids
# ==================================================================================

@dataclass(frozen=True)
class Grid:
    """Tensor-product quadrature rule; `points` is (N, d) and `weights` is (N,)."""
    dim: int
    scheme: Scheme
    nodes_per_axis: int
    radius: float
    scale: float
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    max_radius: Optional[float] = None

    @property
    def size(self) -> int:
        return int(self.weights.size)

    def nodes(self) -> Iterator[Tuple[Vector1, float]]:
        """(point, weight) pairs in storage order."""
        for point, weight in zip(self.points, self.weights):
            yield Vector1.of(point), float(weight)

    def describe(self) -> str:
        extent = f"scale={self.scale:g}" if self.scheme == 'hermite' else f"R={self.radius:g}"
        pruned = f", |x|<={self.max_radius:g}" if self.max_radius else ""
        return f"{self.scheme} n={self.nodes_per_axis} {extent}{pruned} ({self.size} nodes, d={self.dim})"


@functools.lru_cache()
def _axis_rule(scheme: Scheme, n: int, radius: float, scale: float) -> Tuple[np.ndarray, np.ndarray]:
    if scheme == 'hermite':
        nodes, weights = hermgauss(n)
        return scale * nodes, scale * weights * np.exp(nodes ** 2)
    if scheme == 'trapezoid':
        nodes = np.linspace(-radius, radius, n)
        weights = np.full(n, 2.0 * radius / (n - 1))
        weights[[0, -1]] *= 0.5
        return nodes, weights
    raise ValueError(f"unknown quadrature scheme {scheme!r}")


@functools.lru_cache(maxsize=32)
def _product_rule(dim: int, scheme: Scheme, n: int, radius: float, scale: float,
                  max_radius: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    base_nodes, base_weights = _axis_rule(scheme, n, radius, scale)
    points = np.array(list(itertools.product(base_nodes, repeat=dim)), dtype=float).reshape(-1, dim)
    weights = functools.reduce(np.kron, itertools.repeat(base_weights, dim))
    if max_radius is not None:
        keep = np.linalg.norm(points, axis=1) <= max_radius
        points, weights = points[keep], weights[keep]
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def build_grid(dim: int, scheme: Scheme = 'hermite', nodes_per_axis: int = 20, radius: float = 8.0,
               scale: float = 1.0, max_radius: Optional[float] = None) -> Grid:
    """
    Build a deterministic tensor-product grid.

    Args:
        dim: Number of coordinates
        scheme: 'hermite' or 'trapezoid'
        nodes_per_axis: Nodes per coordinate (>= 2)
        radius: Box half-width of the trapezoid rule
        scale: Node scale of the Hermite rule
        max_radius: Optional ball the nodes are pruned to

    Returns:
        Grid with positive weights

    Raises:
        QuadratureGuardError: If nodes_per_axis^dim exceeds 10^7
        ValueError: For invalid parameters
    """
    if nodes_per_axis < 2:
        raise ValueError(f"nodes_per_axis must be >= 2, got {nodes_per_axis}")
    if scheme == 'trapezoid' and radius <= 0:
        raise ValueError(f"trapezoid radius must be positive, got {radius}")
    count = nodes_per_axis ** dim
    if count > MAX_NODES:
        raise QuadratureGuardError(
            "grid exceeds the node budget", {"nodes": count, "budget": MAX_NODES, "dim": dim}
        )
    points, weights = _product_rule(dim, scheme, nodes_per_axis, float(radius), float(scale), max_radius)
    grid = Grid(dim=dim, scheme=scheme, nodes_per_axis=nodes_per_axis, radius=float(radius), scale=float(scale),
                points=points, weights=weights, max_radius=max_radius)
    logger.debug(f"Built grid {grid.describe()}")
    return grid


def grid_from_model(model: GridModel, dim: int) -> Grid:
    """Grid described by a configuration section."""
    return build_grid(dim, model.scheme, model.nodes_per_axis, model.radius, model.scale, model.max_radius)


def hermite_moment_weights(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Raw Gauss-Hermite nodes and weights for ∫ p(x) e^{−x²} dx."""
    return hermgauss(n)


# ==================================================================================
# Integration
# ==================================================================================

def check_finite(values: np.ndarray, points: np.ndarray) -> None:
    finite = np.isfinite(values)
    if finite.all():
        return
    rows = np.flatnonzero(~finite.reshape(finite.shape[0], -1).all(axis=1))
    location = points[rows[0]] if rows.size else None
    raise QuadratureGuardError(
        "non-finite integrand value",
        {"node": None if location is None else np.round(location, 6).tolist(), "count": int(rows.size)},
    )


def integrate_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    """
    Σ_n w_n · values_n along the first axis.

    Raises:
        QuadratureGuardError: If a value is not finite, with the node location
    """
    values = np.asarray(values)
    check_finite(values, grid.points)
    return np.tensordot(grid.weights, values, axes=(0, 0))


def integrate(field_like, grid: Grid) -> Multivector:
    """
    Componentwise quadrature of a Clifford-valued field.

    Args:
        field_like: Object with `dim` (CliffordDim) and `sample(grid)` returning (N, 2^d)
        grid: Quadrature grid

    Returns:
        Multivector Σ weight · f(node)
    """
    values = field_like.sample(grid)
    return Multivector(field_like.dim, integrate_values(values, grid))


# ==================================================================================
# Quasi-random integration over R^{2d}
# ==================================================================================

@dataclass(frozen=True)
class QmcSampler:
    """
    Scrambled Sobol sampler; the count is rounded up to a power of two.

    Replicate r uses seed + r, so estimates are reproducible bit for bit.
    """
    dim: int
    count: int
    seed: int = 0
    replicates: int = 2

    def __post_init__(self):
        if self.count < 1000:
            raise ValueError(f"QMC count must be at least 1000, got {self.count}")
        if self.replicates < 2:
            raise ValueError("at least two replicates are needed for an error estimate")

    @property
    def log2_count(self) -> int:
        return int(math.ceil(math.log2(self.count)))

    @property
    def effective_count(self) -> int:
        return 1 << self.log2_count

    def unit_samples(self, replicate: int = 0) -> np.ndarray:
        """Points of the unit cube, shape (effective_count, dim)."""
        engine = qmc.Sobol(d=self.dim, scramble=True, seed=self.seed + replicate)
        return engine.random_base2(m=self.log2_count)


@dataclass(frozen=True)
class QmcMap:
    """
    Map from the unit cube to the integration domain with its density.

    kind='gaussian' draws coordinates from N(mean, sigma²); kind='box' spreads
    them uniformly over [−radius, radius].
    """
    kind: Literal['gaussian', 'box'] = 'gaussian'
    sigma: Union[float, Sequence[float]] = 1.0
    mean: Union[float, Sequence[float]] = 0.0
    radius: float = 1.0

    def apply(self, unit: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(points, 1/density) for unit-cube samples."""
        if self.kind == 'box':
            points = (2.0 * unit - 1.0) * self.radius
            volume = (2.0 * self.radius) ** unit.shape[1]
            return points, np.full(unit.shape[0], volume)
        sigma = np.broadcast_to(np.asarray(self.sigma, dtype=float), (unit.shape[1],))
        mean = np.broadcast_to(np.asarray(self.mean, dtype=float), (unit.shape[1],))
        normal = norm.ppf(np.clip(unit, 1e-15, 1.0 - 1e-15))
        points = mean + sigma * normal
        log_density = np.sum(norm.logpdf(normal) - np.log(sigma), axis=1)
        return points, np.exp(-log_density)


@dataclass
class QmcResult:
    """Mean over replicates and the standard error of that mean."""
    value: np.ndarray
    error: float
    count: int
    replicate_values: List[np.ndarray] = field(default_factory=list)

    def as_multivector(self, dim: CliffordDim) -> Multivector:
        return Multivector(dim, self.value)

    @property
    def modulus(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.value) ** 2)))


def _replicate_estimate(integrand: Callable[[np.ndarray], np.ndarray], points: np.ndarray,
                        inverse_density: np.ndarray, batch: int, workers: int) -> np.ndarray:
    chunks = [slice(start, start + batch) for start in range(0, points.shape[0], batch)]

    def run(chunk: slice) -> np.ndarray:
        values = np.asarray(integrand(points[chunk]))
        check_finite(values, points[chunk])
        return np.tensordot(inverse_density[chunk], values, axes=(0, 0))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, chunks))
    else:
        partials = [run(chunk) for chunk in chunks]
    # fixed summation order keeps reruns bit-identical
    total = partials[0]
    for part in partials[1:]:
        total = total + part
    return total / points.shape[0]


def qmc_integrate(integrand: Callable[[np.ndarray], np.ndarray], sampler: QmcSampler,
                  qmap: Optional[QmcMap] = None, batch: int = 64, workers: int = 1) -> QmcResult:
    """
    Quasi-random estimate of ∫ integrand over R^{sampler.dim}.

    Args:
        integrand: Vectorized callable mapping (B, dim) points to (B, ...) values
        sampler: Sobol sampler
        qmap: Map to the integration domain (standard Gaussian when None)
        batch: Points per integrand call
        workers: Threads evaluating batches

    Returns:
        QmcResult with the replicate mean and its standard error
    """
    qmap = qmap or QmcMap()
    if sampler.effective_count != sampler.count:
        logger.debug(f"QMC count {sampler.count} rounded up to {sampler.effective_count}")
    estimates = []
    for replicate in range(sampler.replicates):
        points, inverse_density = qmap.apply(sampler.unit_samples(replicate))
        estimates.append(_replicate_estimate(integrand, points, inverse_density, batch, workers))
    stacked = np.stack([np.atleast_1d(e) for e in estimates])
    mean = stacked.mean(axis=0)
    spread = np.sqrt(np.sum(np.abs(stacked - mean) ** 2, axis=tuple(range(1, stacked.ndim))))
    error = float(np.sqrt(np.sum(spread ** 2) / (sampler.replicates * (sampler.replicates - 1))))
    return QmcResult(
        value=mean if np.ndim(estimates[0]) else mean[0],
        error=error,
        count=sampler.effective_count,
        replicate_values=estimates,
    )
