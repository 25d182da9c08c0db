"""Longitudinal-current model of a narrow strip.

Only the total current I(k_x) = pi h c_0(k_x) is kept and only the lowest
E_x test is enforced, which leaves one scalar equation per k_x.  Its kernel
is the (0, 0) entry of the full-wave even system divided by pi h.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import PoleProximityError
from .fullwave import source_prefactor, spectral_integrals
from .quadrature import QuadratureConfig

POLE_FLOOR = 1e-12


@dataclass
class NarrowSpectralCurrent:
    samples: list = field(default_factory=list)   # (k_x, I) pairs

    @property
    def kx(self):
        return np.array([s[0] for s in self.samples], dtype=complex)

    @property
    def current(self):
        return np.array([s[1] for s in self.samples], dtype=complex)


def _integrals(medium, scenario, kx, quad_cfg, with_rhs, extract_rhs=True):
    rhs_terms = [(0, "ex")] if with_rhs else []
    pv, rv, _ = spectral_integrals(medium, scenario, kx, [("tm", 0, 0)], rhs_terms,
                                   quad_cfg or QuadratureConfig(), extract_rhs)
    return pv[0], (rv[0] if with_rhs else None)


def narrow_kernel(medium, scenario, kx, quad_cfg=None):
    """(k^2 - k_x^2)/k times the J0^2-weighted k_y integral."""
    k = medium.k
    integral, _ = _integrals(medium, scenario, kx, quad_cfg, False)
    return (k * k - kx * kx) / k * integral


def narrow_rhs(medium, scenario, kx, quad_cfg=None, extract_rhs=True):
    _, rhs = _integrals(medium, scenario, kx, quad_cfg, True, extract_rhs)
    return source_prefactor(medium, scenario, kx) * rhs


def solve_narrow(medium, scenario, kx, quad_cfg=None, extract_rhs=True):
    """Spectral total current I(k_x) = rhs / kernel."""
    k = medium.k
    kx = complex(kx)
    integral, rhs = _integrals(medium, scenario, kx, quad_cfg, True, extract_rhs)
    kernel = (k * k - kx * kx) / k * integral
    rhs = source_prefactor(medium, scenario, kx) * rhs
    if rhs == 0:
        return 0j
    scale = abs(k) * abs(integral)
    if abs(kernel) < POLE_FLOOR * scale:
        raise PoleProximityError(f"kernel vanishes at k_x={kx} (TEM pole on the contour)")
    return rhs / kernel
