"""
Run configuration: JSON file plus command-line overrides
Copyright (c) 2025 Arjun-M/CKNKit
"""

import json
import logging
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ConfigurationError, ValidationError
from ..exponents import OperatorParams
from ..quadrature import QuadratureSpec

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")

Grid = Tuple[float, ...]


def parse_grid(text: Union[str, float, int, Sequence[float]]) -> Grid:
    """
    Parse ``"a,b,c"``, ``"lo:hi:n"`` (n evenly spaced points) or a plain number.

    Lists from a JSON config are accepted as they are. The result must be
    finite and strictly monotone.

    Raises:
        ValidationError: unparsable, non-finite or non-monotone values
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        values = [float(text)]
    elif isinstance(text, str):
        spec = text.strip()
        try:
            if ':' in spec:
                parts = spec.split(':')
                if len(parts) != 3:
                    raise ValueError("range grids read lo:hi:n")
                lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
                if n < 1:
                    raise ValueError("a range grid needs at least one point")
                values = [lo] if n == 1 else np.linspace(lo, hi, n).tolist()
            else:
                values = [float(part) for part in spec.split(',') if part.strip()]
        except ValueError as e:
            raise ValidationError(f"cannot parse grid {text!r}: {e}", context={'grid': text})
    else:
        try:
            values = [float(v) for v in text]
        except (TypeError, ValueError):
            raise ValidationError(f"cannot parse grid {text!r}", context={'grid': repr(text)})

    if not values:
        raise ValidationError("empty grid", context={'grid': repr(text)})
    if not all(math.isfinite(v) for v in values):
        raise ValidationError(f"grid values must be finite: {values}", context={'grid': repr(text)})
    steps = np.diff(values)
    if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValidationError(f"grid must be strictly monotone: {values}", context={'grid': repr(text)})
    return tuple(values)


def _scalar_or_grid(value) -> Union[float, Grid, None]:
    if value is None:
        return None
    grid = parse_grid(value)
    return grid[0] if len(grid) == 1 else grid


def parse_formats(value: Union[str, Sequence[str]]) -> Tuple[str, ...]:
    items = value.split(',') if isinstance(value, str) else list(value)
    formats = tuple(sorted({item.strip().lower() for item in items if item.strip()}))
    unknown = [f for f in formats if f not in FORMATS]
    if unknown or not formats:
        raise ValidationError(f"formats must be a subset of {FORMATS} (got {value!r})", context={'formats': value})
    return formats


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a command needs, after merging the config file with flags.

    Fields listed in ``RUNTIME_FIELDS`` steer execution only and are left out
    of the report echo, so reports do not depend on worker count or output
    location.
    """
    N: float = 3.0
    mu1: float = 0.0
    mu2: float = 0.0
    theta: float = 0.0
    p: Union[float, Grid, None] = None
    q0: float = 1.0
    k: float = 0.0
    a: float = 0.0
    domain_radius: float = 1.0
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    mu1_grid: Optional[Grid] = None
    mu2_grid: Optional[Grid] = None
    p_grid: Optional[Grid] = None
    test_function: Optional[str] = None
    witness: bool = False
    output_dir: Optional[Path] = None
    formats: Tuple[str, ...] = ("json",)
    workers: int = 1
    log_level: str = "WARNING"
    log_format: str = "text"

    RUNTIME_FIELDS = ('output_dir', 'formats', 'workers', 'log_level', 'log_format')

    def __post_init__(self):
        for name in ('N', 'mu1', 'mu2', 'theta', 'q0', 'k', 'a', 'domain_radius'):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                raise ValidationError(f"{name} must be a finite number (got {value!r})", context={name: repr(value)})
        if self.domain_radius <= 0:
            raise ValidationError(f"radius must be positive (got {self.domain_radius})",
                                  context={'domain_radius': self.domain_radius})
        if self.workers < 1:
            raise ValidationError(f"workers must be at least 1 (got {self.workers})", context={'workers': self.workers})

    @property
    def params(self) -> OperatorParams:
        return OperatorParams(float(self.N), float(self.mu1), float(self.mu2))

    def scalar_p(self) -> float:
        """p for single-point commands; raises ValidationError when missing or a grid."""
        if self.p is None:
            raise ValidationError("this command needs --p", context={'p': None})
        if isinstance(self.p, tuple):
            raise ValidationError("this command needs a single --p value, not a grid", context={'p': list(self.p)})
        return float(self.p)

    def sweep_grids(self) -> Tuple[Grid, Grid, Grid]:
        """(mu1, mu2, p) grids, falling back to the scalar values"""
        p_grid = self.p_grid
        if p_grid is None:
            if self.p is None:
                raise ValidationError("sweep needs --p or --p-grid", context={'p': None})
            p_grid = self.p if isinstance(self.p, tuple) else (float(self.p),)
        return (self.mu1_grid or (float(self.mu1),), self.mu2_grid or (float(self.mu2),), p_grid)

    def to_dict(self) -> Dict[str, Any]:
        """Echo for reports: every field except the runtime ones."""
        out: Dict[str, Any] = {}
        for f in fields(self):
            if f.name in self.RUNTIME_FIELDS:
                continue
            value = getattr(self, f.name)
            if isinstance(value, QuadratureSpec):
                value = value.to_dict()
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base: "RunConfig" = None) -> "RunConfig":
        """
        Overlay ``data`` on ``base`` (defaults when None).

        Keys mirror the field names; ``quadrature`` is a nested object with
        QuadratureSpec keys.

        Raises:
            ConfigurationError: unknown keys
            ValidationError: bad values
        """
        base = base or cls()
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown configuration keys: {', '.join(unknown)}",
                                     context={'unknown': unknown})

        updates: Dict[str, Any] = {}
        for key, value in data.items():
            if value is None:
                updates[key] = None
            elif key == 'quadrature':
                if not isinstance(value, dict):
                    raise ConfigurationError("quadrature must be an object", context={'quadrature': repr(value)})
                try:
                    updates[key] = replace(base.quadrature, **value)
                except TypeError as e:
                    raise ConfigurationError(f"bad quadrature settings: {e}", context={'quadrature': value})
            elif key == 'p':
                updates[key] = _scalar_or_grid(value)
            elif key in ('mu1_grid', 'mu2_grid', 'p_grid'):
                updates[key] = parse_grid(value)
            elif key == 'formats':
                updates[key] = parse_formats(value)
            elif key == 'output_dir':
                updates[key] = Path(value)
            elif key == 'workers':
                updates[key] = int(value)
            elif key in ('test_function', 'log_level', 'log_format'):
                updates[key] = str(value)
            elif key == 'witness':
                updates[key] = bool(value)
            else:
                updates[key] = value
        return replace(base, **updates)


def load_config(path: Union[str, Path]) -> RunConfig:
    """
    Read a JSON config file.

    Raises:
        ConfigurationError: unreadable file, invalid JSON, or not a JSON object
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e}", context={'path': str(path)})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"invalid JSON in {path}: {e}", context={'path': str(path)})
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object", context={'path': str(path)})
    logger.debug(f"loaded config {path} with keys {sorted(data)}")
    return RunConfig.from_dict(data)


# argparse destination -> RunConfig field
_FLAG_FIELDS = {
    'N': 'N', 'mu1': 'mu1', 'mu2': 'mu2', 'theta': 'theta', 'p': 'p', 'q0': 'q0',
    'k': 'k', 'a': 'a', 'radius': 'domain_radius', 'test_function': 'test_function',
    'mu1_grid': 'mu1_grid', 'mu2_grid': 'mu2_grid', 'p_grid': 'p_grid',
    'out': 'output_dir', 'format': 'formats', 'workers': 'workers',
    'log_level': 'log_level', 'log_format': 'log_format', 'witness': 'witness',
}


def build_config(args) -> RunConfig:
    """Config file first (when ``--config`` is given), then every flag that was set."""
    config = load_config(args.config) if getattr(args, 'config', None) else RunConfig()

    overrides = {}
    for dest, name in _FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[name] = value
    config = RunConfig.from_dict(overrides, base=config)

    rel_tol = getattr(args, 'rel_tol', None)
    if rel_tol is not None:
        config = replace(config, quadrature=config.quadrature.with_tolerance(rel_tol=rel_tol))
    return config
