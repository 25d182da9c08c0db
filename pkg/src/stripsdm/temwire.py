"""TEM-mode current on a thin circular wire above a PEC ground plane.

Closed forms from image theory.  The wire of radius ``s`` is centred at
height ``a``; its electrical images sit at z = +/- sqrt(a^2 - s^2).  A
strip of half-width h is represented by the equivalent radius s = h/2.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WireGeometry:
    s: float
    a: float

    def __post_init__(self):
        if not 0 < self.s < self.a:
            raise ValueError("wire radius must satisfy 0 < s < a")

    @classmethod
    def from_strip(cls, h, a):
        return cls(h / 2.0, a)

    @property
    def image_height(self):
        return math.sqrt(self.a ** 2 - self.s ** 2)

    @property
    def arccosh(self):
        r = self.a / self.s
        return math.log(r + math.sqrt(r * r - 1.0))


@dataclass
class TemCurrent:
    x: np.ndarray
    current: np.ndarray


def _check_outside(y, z, a, s):
    if np.any(np.asarray(y) ** 2 + (np.asarray(z) - a) ** 2 < s * s):
        raise ValueError("point lies inside the wire")


def image_potential(y, z, a, s, scale=1.0):
    """Potential of the line charge and its image; ``scale`` = lambda/eps."""
    _check_outside(y, z, a, s)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    c = math.sqrt(a * a - s * s)
    r2 = y * y + z * z + a * a - s * s
    return scale / (2 * math.pi) * 0.5 * np.log((r2 + 2 * z * c) / (r2 - 2 * z * c))


def tem_field_pattern(y, z, a, s):
    """Normalised transverse field e(y, z); E_t = (lambda / 2 pi eps) e."""
    _check_outside(y, z, a, s)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    c = math.sqrt(a * a - s * s)
    d1 = y * y + (z - c) ** 2
    d2 = y * y + (z + c) ** 2
    return np.stack([y / d1 - y / d2, (z - c) / d1 - (z + c) / d2])


def tem_current(medium, scenario, wire, x):
    """TEM current on the wire excited by the scenario's dipole.

    ``I(x) = -sgn(x - x0) j w p . e(y0, z0) / (2 arccosh(a/s)) exp(-j k |x - x0|)``
    """
    x = np.asarray(x, dtype=float)
    p = scenario.dipole.vector
    e = tem_field_pattern(scenario.y0, scenario.z0, wire.a, wire.s)
    proj = p[1] * e[0] + p[2] * e[1]
    dx = x - scenario.x0
    amp = -1j * medium.omega * proj / (2 * wire.arccosh)
    cur = np.sign(dx) * amp * np.exp(-1j * medium.k * np.abs(dx))
    return TemCurrent(x, cur)
