"""
Configuration models for the Clifford STFT toolkit.

This module defines Pydantic models that provide type safety and validation
for the run configuration: the YAML file shipped in app/config, an optional
user file (nested sections or flat keys mirroring the CLI flags), environment
overrides loaded from .env, and the command-line flags themselves.
"""

import math
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


# ==================================================================================
# Environment Variable Models (BaseSettings)
# ==================================================================================

class RuntimeSettings(BaseSettings):
    """
    Runtime overrides read from the environment or a .env file.

    Variables are prefixed with CSTFT_, e.g. CSTFT_LOG_LEVEL=DEBUG.
    """
    log_level: Optional[str] = Field(default=None, description="Overrides logging.level")
    output_dir: Optional[str] = Field(default=None, description="Overrides output.directory")
    workers: Optional[int] = Field(default=None, ge=1, description="Overrides runtime.workers")

    model_config = SettingsConfigDict(env_file='.env', env_prefix='CSTFT_', extra='ignore')


# ==================================================================================
# Numerical sections
# ==================================================================================

class AlgebraModel(BaseModel):
    """Model for the Clifford algebra dimension."""
    dim: int = Field(default=4, description="Even dimension d >= 2 of the signal domain")

    @field_validator('dim')
    @classmethod
    def _even_dimension(cls, value: int) -> int:
        if value < 2 or value % 2:
            raise ValueError(
                f"dimension d={value} is not allowed: only even d >= 2 are supported "
                "(the kernel closed form and its bound exist for even dimensions only)"
            )
        return value


class SpecFunConfig(BaseModel):
    """Settings of the normalized Bessel function evaluation."""
    series_switch_t0: float = Field(default=1.0, gt=0, description="Below t0 the ascending series is summed")
    series_terms: int = Field(default=40, ge=10, description="Number of ascending series terms")
    tol: float = Field(default=1e-15, gt=0, description="Relative tolerance for early series termination")


class KernelModel(BaseModel):
    """Model for kernel series evaluation and bound calibration."""
    series_tol: float = Field(default=1e-12, gt=0, description="Stopping tolerance of the truncated series")
    series_max_terms: int = Field(default=200, ge=10, description="Hard cap on series terms")
    calibration_pairs: int = Field(default=10000, ge=100, description="Quasi-random pairs per calibration sample")
    calibration_radius: float = Field(default=5.0, gt=0, description="Box half-width of calibration pairs")
    headroom: float = Field(default=1.5, ge=1.0, description="Allowed test/train sup ratio")
    sweep_max: float = Field(default=10.0, gt=0, description="Largest |x| = |y| on the orthogonal ray sweep")
    sweep_points: int = Field(default=21, ge=2, description="Points on the orthogonal ray sweep")


class GridModel(BaseModel):
    """Model for a tensor quadrature grid."""
    scheme: Literal['hermite', 'trapezoid'] = Field(default='hermite', description="Quadrature family")
    nodes_per_axis: int = Field(default=20, ge=2, description="Nodes per coordinate axis")
    radius: float = Field(default=8.0, gt=0, description="Box half-width (trapezoid only)")
    scale: float = Field(default=1.0, gt=0, description="Hermite node scale; sqrt(2) matches exp(-|x|^2/2)")
    max_radius: Optional[float] = Field(default=None, gt=0, description="Drop nodes farther than this from the origin")


class GridsModel(BaseModel):
    """Named grids used by the different evaluation paths."""
    transform: GridModel = Field(
        default_factory=lambda: GridModel(scheme='hermite', nodes_per_axis=20, scale=math.sqrt(2.0)),
        description="Input grid of Clifford-Fourier transforms",
    )
    output: GridModel = Field(
        default_factory=lambda: GridModel(scheme='hermite', nodes_per_axis=6, scale=1.0, max_radius=2.6),
        description="Output sampling grid for field comparisons",
    )
    parseval: GridModel = Field(
        default_factory=lambda: GridModel(scheme='hermite', nodes_per_axis=6, scale=1.0, max_radius=4.5),
        description="Output grid integrating squared transforms",
    )
    stft: GridModel = Field(
        default_factory=lambda: GridModel(scheme='hermite', nodes_per_axis=16, scale=1.0),
        description="Inner grid of short-time transform evaluations",
    )
    qmc_inner: GridModel = Field(
        default_factory=lambda: GridModel(scheme='hermite', nodes_per_axis=12, scale=1.0),
        description="Inner grid used under quasi-random outer integrals",
    )
    nested_outer: GridModel = Field(
        default_factory=lambda: GridModel(scheme='hermite', nodes_per_axis=8, scale=1.0),
        description="Outer grid of nested evaluations",
    )
    nested_inner: GridModel = Field(
        default_factory=lambda: GridModel(scheme='hermite', nodes_per_axis=12, scale=1.0),
        description="Inner grid of nested evaluations",
    )
    norms: GridModel = Field(
        default_factory=lambda: GridModel(scheme='trapezoid', nodes_per_axis=25, radius=8.0),
        description="Grid for weighted function-space norms",
    )


class HankelModel(BaseModel):
    """One-dimensional rule for transforms of radial fields."""
    radius: float = Field(default=12.0, gt=0, description="Upper limit of the radial integral")
    nodes: int = Field(default=160, ge=16, description="Gauss-Legendre nodes on [0, radius]")


class EigenbasisModel(BaseModel):
    """Model for the Laguerre-monogenic basis."""
    odd_factor_order: Literal['x_then_m', 'm_then_x'] = Field(
        default='x_then_m', description="Order of the 1-vector and monogenic factors in odd basis functions"
    )
    max_j: int = Field(default=2, ge=0, description="Largest Laguerre index in the eigen suite")
    max_k: int = Field(default=1, ge=0, description="Largest monogenic degree in the eigen suite")


class WindowModel(BaseModel):
    """Model for the radial window."""
    sigma: float = Field(default=1.0, gt=0, description="Gaussian window scale")


class SignalModel(BaseModel):
    """Model for the analysed signal."""
    spec: str = Field(default="gaussian", description="Signal selector, e.g. 'gaussian + psi(odd,0,0,1)*e{1,2}'")


class QmcModel(BaseModel):
    """Model for quasi-random outer integrals."""
    count: int = Field(default=8192, ge=1000, description="Sample count, rounded up to a power of two")
    seed: int = Field(default=20240607, ge=0, description="Scrambling seed")
    replicates: int = Field(default=2, ge=2, description="Independent scrambles for the error estimate")
    sigma_x: float = Field(default=1.0, gt=0, description="Importance scale of the time variable")
    sigma_omega: float = Field(default=1.2, gt=0, description="Importance scale of the frequency variable")
    batch: int = Field(default=64, ge=1, description="Samples per vectorized batch")
    light_count: int = Field(default=2048, ge=1000, description="Sample count of the cheaper concentration integrals")
    reconstruction_sigma_x: float = Field(
        default=1.2, gt=0, description="Time scale of the reconstruction and reproducing integrals"
    )
    reconstruction_sigma_omega: float = Field(
        default=1.6, gt=0, description="Frequency scale of the reconstruction and reproducing integrals"
    )


class ToleranceModel(BaseModel):
    """Named tolerances; `tol` overrides every assertion tolerance when set."""
    tol: Optional[float] = Field(default=None, gt=0, description="Global override")
    kernel_identity: float = Field(default=1e-12, gt=0)
    kernel_series: float = Field(default=1e-8, gt=0)
    eigen: float = Field(default=1e-6, gt=0)
    parseval: float = Field(default=1e-6, gt=0)
    translation: float = Field(default=1e-6, gt=0)
    commutator: float = Field(default=1e-8, gt=0)
    convolution: float = Field(default=1e-4, gt=0)
    forms_exact: float = Field(default=1e-12, gt=0)
    tensor: float = Field(default=1e-8, gt=0)
    forms: float = Field(default=1e-4, gt=0)
    qmc: float = Field(default=0.02, gt=0)
    norm_ratio: float = Field(default=1e-6, gt=0)
    nested: float = Field(default=5e-2, gt=0)

    def get(self, name: str) -> float:
        """Tolerance by name, honouring the global override."""
        if self.tol is not None:
            return self.tol
        return getattr(self, name)


class SliceModel(BaseModel):
    """Two-coordinate slice for spectrogram and transform tables."""
    first_axis: int = Field(default=1, ge=1, description="1-based coordinate varied on the first slice axis")
    second_axis: int = Field(default=1, ge=1, description="1-based coordinate varied on the second slice axis")
    radius: float = Field(default=3.0, gt=0, description="Slice half-width")
    points: int = Field(default=31, ge=2, description="Points per slice axis")
    fixed_x: List[float] = Field(default_factory=list, description="Remaining x coordinates (zeros when empty)")
    fixed_omega: List[float] = Field(default_factory=list, description="Remaining omega coordinates (zeros when empty)")


class OutputModel(BaseModel):
    """Model for produced artifacts."""
    path: Optional[str] = Field(default=None, description="Artifact path; output/<command>.<ext> when unset")
    directory: Optional[str] = Field(default=None, description="Directory prepended to a relative artifact path")
    format: Literal['csv', 'json-lines'] = Field(default='csv', description="Artifact format")
    sign: Literal['-', '+'] = Field(default='-', description="Kernel sign of the transform table")
    slice: SliceModel = Field(default_factory=SliceModel, description="Slice definition")
    kernel_pairs: int = Field(default=200, ge=1, description="Rows of the kernel table")
    kernel_radius: float = Field(default=3.0, gt=0, description="Box half-width of kernel table points")


class VerifyModel(BaseModel):
    """Model for the verification suite."""
    form_probes: int = Field(default=10, ge=1, description="Probe points of the equivalent-form checks")
    reconstruction_probes: int = Field(default=5, ge=1, description="Probe points of the reconstruction check")
    reproducing_probes: int = Field(default=5, ge=1, description="Probe points of the reproducing identity")
    inequality_samples: int = Field(default=64, ge=8, description="Train and test samples per inequality")
    nested: bool = Field(default=True, description="Run nested-quadrature diagnostics")
    nested_probes: int = Field(default=3, ge=1, description="Probe points of nested-quadrature diagnostics")
    inequality_radius: float = Field(default=1.5, gt=0, description="Box half-width of inequality parameters")
    uncertainty_radius: float = Field(default=2.0, gt=0, description="Half-width of the box U of the concentration check")
    only: List[str] = Field(default_factory=list, description="Check name prefixes to run; all checks when empty")


class CacheModel(BaseModel):
    """Model for the memo cache of transform outputs and node samples."""
    enabled: bool = Field(default=True, description="Whether caching is enabled")
    max_size: int = Field(default=50000, ge=1, description="Maximum number of cached items")
    quantum: float = Field(default=1e-9, gt=0, description="Coordinate quantization step of cache keys")


class RuntimeModel(BaseModel):
    """Model for execution settings."""
    workers: int = Field(default=1, ge=1, description="Threads used to partition evaluation points")


class LoggingModel(BaseModel):
    """Model for logging configuration."""
    level: str = Field(default="INFO", description="Global log level")
    log_file_path: str = Field(default="logs/cstft.log", description="Path to log file")
    max_file_size_mb: int = Field(default=10, description="Maximum log file size in MB")
    backup_count: int = Field(default=3, description="Number of backup log files to keep")
    console_output: bool = Field(default=True, description="Whether to output logs to console")
    format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s", description="Log message format"
    )
    date_format: str = Field(default="%Y-%m-%d %H:%M:%S", description="Log date format")
    component_levels: Dict[str, str] = Field(default_factory=dict, description="Component-specific log levels")


# ==================================================================================
# Top-Level Root Model (AppConfig)
# ==================================================================================

class AppConfig(BaseModel):
    """
    Root configuration aggregating every section.

    All sections have defaults, so an empty YAML document is a valid
    configuration for a d = 4 run.
    """
    algebra: AlgebraModel = Field(default_factory=AlgebraModel)
    specfun: SpecFunConfig = Field(default_factory=SpecFunConfig)
    kernel: KernelModel = Field(default_factory=KernelModel)
    grids: GridsModel = Field(default_factory=GridsModel)
    hankel: HankelModel = Field(default_factory=HankelModel)
    eigenbasis: EigenbasisModel = Field(default_factory=EigenbasisModel)
    window: WindowModel = Field(default_factory=WindowModel)
    signal: SignalModel = Field(default_factory=SignalModel)
    qmc: QmcModel = Field(default_factory=QmcModel)
    tolerances: ToleranceModel = Field(default_factory=ToleranceModel)
    output: OutputModel = Field(default_factory=OutputModel)
    verify: VerifyModel = Field(default_factory=VerifyModel)
    cache: CacheModel = Field(default_factory=CacheModel)
    runtime: RuntimeModel = Field(default_factory=RuntimeModel)
    logging: LoggingModel = Field(default_factory=LoggingModel)

    class Config:
        """Pydantic configuration for validation."""
        validate_assignment = True  # Validates assignments to model fields
        extra = 'forbid'  # Forbids extra fields not defined in the model


# ==================================================================================
# Flat keys (CLI flags and flat config files)
# ==================================================================================

# Flat key -> list of dotted paths it sets.
FLAT_KEYS: Dict[str, List[str]] = {
    'dim': ['algebra.dim'],
    'window_sigma': ['window.sigma'],
    'signal': ['signal.spec'],
    'grid_scheme': ['grids.transform.scheme', 'grids.stft.scheme'],
    'grid_n': ['grids.transform.nodes_per_axis', 'grids.stft.nodes_per_axis'],
    'grid_radius': ['grids.transform.radius', 'grids.stft.radius'],
    'qmc_count': ['qmc.count'],
    'qmc_seed': ['qmc.seed'],
    'out': ['output.path'],
    'format': ['output.format'],
    'sign': ['output.sign'],
    'workers': ['runtime.workers'],
    'only': ['verify.only'],
    'tol': ['tolerances.tol'],
    'log_level': ['logging.level'],
}


def _set_path(data: Dict[str, Any], dotted: str, value: Any) -> None:
    node = data
    parts = dotted.split('.')
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def nest_flat_keys(raw: Dict[str, Any]) -> Dict[str, Any]:
    """
    Translate flat keys into nested sections; nested sections pass through.

    Raises:
        ValueError: If a key is neither a flat key nor a section name
    """
    nested: Dict[str, Any] = {}
    sections = set(AppConfig.model_fields)
    for key, value in raw.items():
        normalized = key.replace('-', '_')
        if normalized in FLAT_KEYS:
            for dotted in FLAT_KEYS[normalized]:
                _set_path(nested, dotted, value)
        elif normalized in sections:
            nested.setdefault(normalized, {})
            if isinstance(value, dict):
                _deep_merge(nested[normalized], value)
            else:
                nested[normalized] = value
        else:
            raise ValueError(f"unknown configuration key '{key}'")
    return nested


def _deep_merge(target: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(target.get(key), dict):
            _deep_merge(target[key], value)
        else:
            target[key] = value
    return target


def merge_config(base: AppConfig, overrides: Dict[str, Any]) -> AppConfig:
    """Return a new validated AppConfig with flat or nested overrides applied."""
    data = base.model_dump()
    _deep_merge(data, nest_flat_keys(overrides))
    return AppConfig(**data)


def load_config_from_yaml(yaml_file_path: str, base: Optional[AppConfig] = None) -> AppConfig:
    """
    Load and validate configuration from a YAML file.

    Args:
        yaml_file_path: Path to the YAML configuration file
        base: Configuration the file is layered on (defaults when None)

    Returns:
        Validated AppConfig instance

    Raises:
        ValidationError: If the configuration doesn't match the expected schema
        FileNotFoundError: If the YAML file doesn't exist
    """
    with open(yaml_file_path, 'r', encoding='utf-8') as file:
        yaml_data = yaml.safe_load(file) or {}
    if not isinstance(yaml_data, dict):
        raise ValueError(f"configuration file {yaml_file_path} must contain a mapping")
    return merge_config(base or AppConfig(), yaml_data)


def get_config_schema() -> Dict[str, Any]:
    """
    Get the JSON schema for the configuration model.

    Returns:
        JSON schema dictionary that can be used for validation or documentation
    """
    return AppConfig.model_json_schema()


def apply_runtime_settings(config: AppConfig, settings: RuntimeSettings) -> AppConfig:
    """Layer the environment overrides of RuntimeSettings onto a configuration."""
    overrides: Dict[str, Any] = {}
    if settings.log_level:
        overrides['logging'] = {'level': settings.log_level.upper()}
    if settings.output_dir:
        overrides['output'] = {'directory': settings.output_dir}
    if settings.workers is not None:
        overrides['runtime'] = {'workers': settings.workers}
    return merge_config(config, overrides) if overrides else config
