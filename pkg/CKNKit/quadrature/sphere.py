"""
Deterministic quadrature rules on S^1 and S^2
Copyright (c) 2025 Arjun-M/CKNKit
"""

import math
from typing import Tuple

import numpy as np

from ..exceptions import DomainError

DEFAULT_CIRCLE_POINTS = 128
DEFAULT_SPHERE_RESOLUTION = (32, 64)


def circle_rule(M: int = DEFAULT_CIRCLE_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    """Trapezoid rule on the unit circle: M equispaced directions, weights 2 pi / M."""
    if M < 1:
        raise DomainError("circle rule needs at least one point", {'M': M})
    angles = 2.0 * math.pi * np.arange(M) / M
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    return directions, np.full(M, 2.0 * math.pi / M)


def sphere_rule(n_theta: int = DEFAULT_SPHERE_RESOLUTION[0],
                n_phi: int = DEFAULT_SPHERE_RESOLUTION[1]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Product rule on S^2: Gauss-Legendre in cos(theta) times trapezoid in azimuth.

    Weights sum to 4 pi.
    """
    if n_theta < 1 or n_phi < 1:
        raise DomainError("sphere rule needs positive resolution", {'n_theta': n_theta, 'n_phi': n_phi})
    t, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    sin_theta = np.sqrt(1.0 - t * t)
    x = np.outer(sin_theta, np.cos(phi))
    y = np.outer(sin_theta, np.sin(phi))
    z = np.outer(t, np.ones(n_phi))
    directions = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=-1)
    weights = np.outer(w, np.full(n_phi, 2.0 * math.pi / n_phi)).ravel()
    return directions, weights


def angular_rule(N: float, resolution: Tuple[int, ...] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Rule for S^{N-1}; only N = 2 and N = 3 are supported."""
    if N == 2:
        return circle_rule(*(resolution or (DEFAULT_CIRCLE_POINTS,)))
    if N == 3:
        return sphere_rule(*(resolution or DEFAULT_SPHERE_RESOLUTION))
    raise DomainError(f"non-radial quadrature is available for N in {{2, 3}} only (got N={N})", {'N': N})
