"""Built-in numerical checks run by ``stripsdm selftest``."""

from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.special

from . import specfun
from .emcore import Dipole, Medium, Scenario, longitudinal_wavenumber
from .fields import dipole_image_field
from .quadrature import bessel_product_integral
from .temwire import WireGeometry, image_potential


@dataclass
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<34s} error={self.error:.3e}  tol={self.tolerance:.1e}"


def check_identities():
    worst = 0.0
    for m in range(7):
        for n in range(7 - m):
            for odd in (0, 1):
                mu, nu = 2 * m + odd, 2 * n + odd
                if mu == nu == 0:
                    continue
                exact = 1.0 / (2 * (m + n + odd)) if m == n else 0.0
                worst = max(worst, abs(bessel_product_integral(mu, nu) - exact))
    return CheckResult("bessel product identities", worst, 1e-7)


def check_tail_constant():
    val = bessel_product_integral(0, 0, lower=1.0)
    return CheckResult("J0^2 tail constant", abs(val - specfun.J0_SQUARED_TAIL), 1e-8)


def check_bessel():
    x = np.concatenate([np.linspace(-80, 80, 401), [1e-8, 0.3, 250.0, 1e3]])
    jb = specfun.bessel_j_batch(20, x)
    ref = scipy.special.jv(np.arange(21)[:, None], x[None, :])
    return CheckResult("Bessel J_0..J_20 vs reference", float(np.max(np.abs(jb - ref))), 1e-12)


def check_branch():
    rng = np.random.default_rng(7)
    k = 2 * np.pi * (1 - 1e-5j)
    kx = rng.normal(0, 10, 500) + 1j * rng.normal(0, 0.5, 500)
    ky = rng.normal(0, 10, 500)
    kz = longitudinal_wavenumber(k, kx, ky)
    sq = np.max(np.abs(kz * kz - (k * k - kx * kx - ky * ky)))
    bad = float(np.max(kz.imag))
    return CheckResult("k_z branch (Im k_z <= 0)", max(sq, bad, 0.0), 1e-10)


def check_laplace_bessel():
    h = 0.3
    worst = 0.0
    for b in (0.5 - 0.2j, 1.2 + 0.7j):
        for m in range(4):
            num = scipy.integrate.quad(lambda t: np.exp(-b * t).real * scipy.special.jv(m, t * h),
                                       0, np.inf, limit=400)[0] + 1j * \
                scipy.integrate.quad(lambda t: np.exp(-b * t).imag * scipy.special.jv(m, t * h),
                                     0, np.inf, limit=400)[0]
            worst = max(worst, abs(num - specfun.laplace_bessel_0(b, h, m)))
    return CheckResult("Laplace-Bessel closed forms", worst, 1e-8)


def check_image_potential():
    a, s = 1.0, 0.01
    th = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    phi = image_potential(s * np.cos(th), a + s * np.sin(th), a, s)
    ref = WireGeometry(s, a).arccosh / (2 * np.pi)
    return CheckResult("wire surface equipotential", float(np.max(np.abs(phi - ref))), 1e-12)


def check_ground_plane():
    med = Medium.lossy_vacuum(300e6)
    worst = 0.0
    for axis in "xyz":
        sc = Scenario(0.1, 1.0, (0.0, 0.2, 0.5), Dipole(axis))
        E, _ = dipole_image_field(med, sc, (0.3, -0.4, 0.0))
        worst = max(worst, float(np.max(np.abs(E[:2])) / np.max(np.abs(E))))
    return CheckResult("dipole image tangential E at z=0", worst, 1e-12)


CHECKS = (check_identities, check_tail_constant, check_bessel, check_branch,
          check_laplace_bessel, check_image_potential, check_ground_plane)


def run_selftest():
    return [check() for check in CHECKS]
