"""Medium, geometry, source, and the spectral-domain building blocks.

Conventions: time dependence exp(+j w t), forward transform kernel
exp(+j k_t . rho), and k_z on the branch with Im(k_z) <= 0 so that
exp(-j k_z z) decays upward.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpectralPoint

EPS0 = 8.8541878128e-12
MU0 = 1.25663706212e-6

AXES = ("x", "y", "z")

KT_FLOOR = 1e-30
KZ_FLOOR = 1e-30


@dataclass(frozen=True)
class Medium:
    epsilon: complex
    mu: complex
    omega: float

    def __post_init__(self):
        if not (complex(self.epsilon).imag < 0 and complex(self.mu).imag < 0):
            raise ValueError("passive medium requires Im(epsilon) < 0 and Im(mu) < 0")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @classmethod
    def lossy_vacuum(cls, frequency, loss_tangent=1e-5):
        """Vacuum with eps = eps0 (1 - j tan d) and mu = mu0 (1 - j tan d)."""
        return cls(EPS0 * (1 - 1j * loss_tangent), MU0 * (1 - 1j * loss_tangent),
                   2 * np.pi * frequency)

    @property
    def k(self):
        kk = self.omega * np.sqrt(complex(self.epsilon) * complex(self.mu))
        return -kk if kk.imag > 0 else kk

    @property
    def eta(self):
        return complex(np.sqrt(complex(self.mu) / complex(self.epsilon)))


@dataclass(frozen=True)
class Dipole:
    axis: str
    moment: complex = 1.0

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"dipole axis must be one of {AXES}, got {self.axis!r}")

    @property
    def vector(self):
        v = np.zeros(3, dtype=complex)
        v[AXES.index(self.axis)] = self.moment
        return v


@dataclass(frozen=True)
class Scenario:
    h: float
    a: float
    dipole_position: tuple
    dipole: Dipole = field(default_factory=lambda: Dipole("x"))

    def __post_init__(self):
        x0, y0, z0 = self.dipole_position
        if self.h <= 0 or self.a <= 0:
            raise ValueError("strip half-width h and height a must be positive")
        if z0 <= 0:
            raise ValueError("dipole must lie above the ground plane (z0 > 0)")
        if z0 == self.a:
            raise ValueError("dipole may not lie in the strip plane (z0 == a)")

    @property
    def x0(self):
        return self.dipole_position[0]

    @property
    def y0(self):
        return self.dipole_position[1]

    @property
    def z0(self):
        return self.dipole_position[2]

    def with_dipole(self, axis=None, moment=None, position=None):
        dip = Dipole(axis or self.dipole.axis,
                     self.dipole.moment if moment is None else moment)
        return Scenario(self.h, self.a, tuple(position or self.dipole_position), dip)


def longitudinal_wavenumber(k, kx, ky):
    """sqrt(k^2 - kx^2 - ky^2) on the decaying branch (Im <= 0).

    Works elementwise on arrays.  Exact ties Im == 0 take Re >= 0.
    """
    kz = np.sqrt(np.asarray(k * k - kx * kx - ky * ky, dtype=complex))
    flip = (kz.imag > 0) | ((kz.imag == 0) & (kz.real < 0))
    return np.where(flip, -kz, kz)


@dataclass(frozen=True)
class SpectralPoint:
    kx: complex
    ky: float
    kz: complex

    @classmethod
    def at(cls, k, kx, ky):
        return cls(complex(kx), float(ky), complex(longitudinal_wavenumber(k, kx, ky)))

    @property
    def kt2(self):
        return self.kx * self.kx + self.ky * self.ky


def mode_vectors(k, point):
    """(f, f_plus, f_minus, g) as complex 3-vectors."""
    kt2 = point.kt2
    if abs(kt2) < KT_FLOOR * abs(k) ** 2:
        raise DegenerateSpectralPoint(f"k_t^2 = {kt2} is degenerate (TEM point)")
    kt_vec = np.array([point.kx, point.ky, 0.0], dtype=complex)
    zhat = np.array([0.0, 0.0, 1.0], dtype=complex)
    f = point.kz / kt2 * kt_vec
    g = k / kt2 * np.array([-point.ky, point.kx, 0.0], dtype=complex)
    return f, f - zhat, f + zhat, g


def _check_kz(kz, k):
    if np.any(np.abs(kz) < KZ_FLOOR * abs(k)):
        raise DegenerateSpectralPoint("k_z vanishes at this spectral point")


def dipole_coefficients(medium, scenario, kx, ky, z):
    """Dipole TM/TE amplitudes A1(k_t, z), B1(k_t, z).

    ``kx``, ``ky`` may be arrays (broadcast).  ``z`` must differ from z0.
    """
    if z == scenario.z0:
        raise ValueError("z == z0 is on the source plane")
    k = medium.k
    eps = complex(medium.epsilon)
    kx = np.asarray(kx, dtype=complex)
    ky = np.asarray(ky, dtype=complex)
    kz = longitudinal_wavenumber(k, kx, ky)
    p = scenario.dipole.moment
    phase = np.exp(1j * (kx * scenario.x0 + ky * scenario.y0)) * \
        np.exp(-1j * kz * abs(z - scenario.z0))
    axis = scenario.dipole.axis
    pre = 1j * p / (2 * eps)
    if axis == "x":
        _check_kz(kz, k)
        return -pre * kx * phase, pre * k * ky / kz * phase
    if axis == "y":
        _check_kz(kz, k)
        return -pre * ky * phase, -pre * k * kx / kz * phase
    _check_kz(kz, k)
    return np.sign(z - scenario.z0) * pre * (kx * kx + ky * ky) / kz * phase, \
        np.zeros_like(phase)


def source_amplitudes(medium, scenario, kx, ky):
    """A+/-, B+/- for a point dipole from the reciprocity projections.

    Independent route to the dipole amplitudes: the current
    J = j w p delta(r - r0) is projected on the TM/TE test fields directly.
    Returns ``{"+": (A, B), "-": (A, B)}``.
    """
    k = medium.k
    eta = medium.eta
    kx = complex(kx)
    ky = complex(ky)
    kz = complex(longitudinal_wavenumber(k, kx, ky))
    kt2 = kx * kx + ky * ky
    current = 1j * medium.omega * scenario.dipole.vector
    out = {}
    for sign, s in (("+", 1), ("-", -1)):
        phase = np.exp(1j * (kx * scenario.x0 + ky * scenario.y0 + s * kz * scenario.z0))
        jt = current * phase
        a = -eta / (2 * kz * k) * np.dot(np.array([kz * kx, kz * ky, -s * kt2]), jt)
        b = -eta / (2 * kz) * np.dot(np.array([-ky, kx, 0.0]), jt)
        out[sign] = (a, b)
    return out
