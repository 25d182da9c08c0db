"""Mode coefficients, spectral fields and spatial field evaluation.

The total field is the sum of three families: the dipole field, the
upward mode launched by the ground plane and the pair of modes radiated by
the strip current.  In the spatial domain the dipole family together with
the ground-plane reflection of the dipole is the field of the dipole and
its image, which is evaluated in closed form.  Only the strip-induced part
(strip family plus its ground reflection) goes through the numerical
double transform; that part is regular at k_z = 0.
"""

import math
from dataclasses import dataclass

import numpy as np

from .emcore import dipole_coefficients, longitudinal_wavenumber, mode_vectors
from .fullwave import weight_tm
from .quadrature import adaptive_vector
from .transform import spectral_current_density

PLANE_GAP = 1e-9


@dataclass
class ModeCoefficients:
    A0: complex
    B0: complex
    A2: complex
    B2: complex
    A1: complex      # dipole amplitudes at the evaluation height
    B1: complex


@dataclass
class FieldSample:
    position: tuple
    E: np.ndarray
    H: np.ndarray


def strip_mode_coefficients(Kx, Ky, point, medium):
    """(A2, B2) radiated by the spectral surface current (K_x, K_y)."""
    k, eta = medium.k, medium.eta
    if abs(point.kz) < 1e-14 * abs(k):
        raise ValueError("k_z vanishes; B2 is undefined on the branch point")
    A2 = -eta * (point.kx * Kx + point.ky * Ky) / (2 * k)
    B2 = -eta * (point.kx * Ky - point.ky * Kx) / (2 * point.kz)
    return A2, B2


def ground_mode_coefficients(A1_at_0, B1_at_0, A2, B2, kz, a):
    """(A0, B0) that cancel the tangential E of the other families at z = 0."""
    e = np.exp(-1j * kz * a)
    return -A1_at_0 - A2 * e, -B1_at_0 - B2 * e


def _check_height(z, scenario):
    if z < 0:
        raise ValueError("field points must not lie below the ground plane")
    for plane, name in ((scenario.z0, "source"), (scenario.a, "strip")):
        if abs(z - plane) < PLANE_GAP:
            raise ValueError(f"z={z} lies on the {name} plane; offset by at least {PLANE_GAP} m")


def mode_coefficients(medium, scenario, point, Kx, Ky, z):
    """All family amplitudes at one spectral point for evaluation height z."""
    _check_height(z, scenario)
    A1_0, B1_0 = dipole_coefficients(medium, scenario, point.kx, point.ky, 0.0)
    A1, B1 = dipole_coefficients(medium, scenario, point.kx, point.ky, z)
    A2, B2 = strip_mode_coefficients(Kx, Ky, point, medium)
    A0, B0 = ground_mode_coefficients(complex(A1_0), complex(B1_0), A2, B2, point.kz,
                                      scenario.a)
    return ModeCoefficients(A0, B0, A2, B2, complex(A1), complex(B1))


def spectral_field(coeffs, point, z, medium, scenario):
    """Total spectral (E, H) at height z as complex 3-vectors."""
    _check_height(z, scenario)
    k, eta, kz = medium.k, medium.eta, point.kz
    f, fp, fm, g = mode_vectors(k, point)
    s0 = 1.0 if z > scenario.z0 else -1.0
    sa = 1.0 if z > scenario.a else -1.0
    f_dip = fp if s0 > 0 else fm
    f_str = fp if sa > 0 else fm
    e_str = np.exp(-1j * kz * abs(z - scenario.a))
    e_gnd = np.exp(-1j * kz * z)
    E = coeffs.A1 * f_dip + coeffs.B1 * g
    etaH = s0 * (coeffs.A1 * g - coeffs.B1 * f_dip)
    E = E + (coeffs.A0 * fp + coeffs.B0 * g) * e_gnd
    etaH = etaH + (coeffs.A0 * g - coeffs.B0 * fp) * e_gnd
    E = E + (coeffs.A2 * f_str + coeffs.B2 * g) * e_str
    etaH = etaH + sa * (coeffs.A2 * g - coeffs.B2 * f_str) * e_str
    return E, etaH / eta


def strip_plane_field(medium, scenario, point, Kx, Ky):
    """Tangential E at z = a written directly in the currents.

    Both components carry the same factor (1 - exp(-2j k_z a)); the
    dipole part enters as A1(a) - A1(0) exp(-j k_z a).
    """
    k, kz, a = medium.k, point.kz, scenario.a
    f, _, _, g = mode_vectors(k, point)
    A1a, B1a = dipole_coefficients(medium, scenario, point.kx, point.ky, a)
    A10, B10 = dipole_coefficients(medium, scenario, point.kx, point.ky, 0.0)
    A2, B2 = strip_mode_coefficients(Kx, Ky, point, medium)
    e = np.exp(-1j * kz * a)
    w = -np.expm1(-2j * kz * a)
    return ((A1a - A10 * e + A2 * w) * f + (B1a - B10 * e + B2 * w) * g)[:2]


def induced_spectrum(k, eta, kx, ky, z, a, Kx, Ky):
    """Strip-induced spectral (E, eta*H) at height z in Cartesian form.

    This is the strip family plus its ground reflection, simplified so that
    no 1/k_t^2 or bare 1/k_z remains.  Arrays broadcast.
    """
    kz = longitudinal_wavenumber(k, kx, ky)
    e1 = np.exp(-1j * kz * abs(z - a))
    e2 = np.exp(-1j * kz * (z + a))
    s = 1.0 if z > a else -1.0
    lo = 2 * min(z, a)
    small = np.abs(kz * lo) < 1e-8
    safe = np.where(small, 1.0, kz)
    D = e1 * np.where(small, 1j * lo * (1 - 0.5j * kz * lo), -np.expm1(-1j * safe * lo) / safe)
    pre = -eta / (2 * k)
    Ex = pre * D * ((k * k - kx * kx) * Kx - kx * ky * Ky)
    Ey = pre * D * ((k * k - ky * ky) * Ky - kx * ky * Kx)
    Ez = pre * (kx * Kx + ky * Ky) * (e2 - s * e1)
    t = 0.5 * eta * (s * e1 - e2)
    Hx = t * Ky
    Hy = -t * Kx
    Hz = -0.5 * eta * (kx * Ky - ky * Kx) * D
    return np.array([Ex, Ey, Ez]), np.array([Hx, Hy, Hz])


def dipole_free_field(medium, p, r_src, r):
    """Closed-form (E, H) of a point dipole p at r_src in the unbounded medium."""
    k, eps, w = medium.k, complex(medium.epsilon), medium.omega
    R = np.asarray(r, dtype=float) - np.asarray(r_src, dtype=float)
    dist = float(np.linalg.norm(R))
    if dist == 0:
        raise ValueError("field point coincides with the dipole")
    u = R / dist
    ph = np.exp(-1j * k * dist)
    up = np.dot(u, p)
    E = ph / (4 * np.pi * eps) * (
        k * k * (p - u * up) / dist
        + (3 * u * up - p) * (1 / dist ** 3 + 1j * k / dist ** 2))
    H = ph / (4 * np.pi * dist) * (w * k - 1j * w / dist) * np.cross(u, p)
    return E, H


def dipole_image_field(medium, scenario, r):
    """Dipole plus its PEC image below z = 0."""
    p = scenario.dipole.vector
    x0, y0, z0 = scenario.dipole_position
    E1, H1 = dipole_free_field(medium, p, (x0, y0, z0), r)
    E2, H2 = dipole_free_field(medium, p * np.array([-1, -1, 1]), (x0, y0, -z0), r)
    return E1 + E2, H1 + H2


def _ky_points(k, kx, h, kmax):
    pts = {0.0, kmax, abs(k), 1.0 / h}
    kink = np.sqrt(complex(k * k - kx * kx))
    if 0 < kink.real < kmax:
        pts.add(kink.real)
    pos = sorted(p for p in pts if 0 <= p <= kmax)
    return [-p for p in pos[::-1] if p > 0] + pos


def spatial_field(solution, probes, rel_tol=1e-6, ky_max=None, max_intervals=4000):
    """Total (E, H) at probe points off the source and strip planes."""
    sc, med = solution.scenario, solution.medium
    k, eta, h, a = med.k, med.eta, sc.h, sc.a
    probes = [tuple(float(v) for v in p) for p in probes]
    for p in probes:
        _check_height(p[2], sc)
    gap = min(abs(p[2] - a) for p in probes)
    kmax = ky_max or max(4 * abs(k), min(60.0 / gap, 1000.0 / h))
    ys = np.array([p[1] for p in probes])
    zs = [p[2] for p in probes]
    c, d = solution.c, solution.d
    nodes = solution.contour.nodes
    weights = solution.contour.weights
    acc = np.zeros((len(probes), 6), dtype=complex)
    xs = np.array([p[0] for p in probes])
    for i, kx in enumerate(nodes):
        ci, di = c[:, i], d[:, i]
        if not (ci.any() or di.any()):
            continue

        def integrand(ky, kx=kx, ci=ci, di=di):
            Kx, Ky = spectral_current_density(ci, di, ky, h)
            rows = []
            for y, z in zip(ys, zs):
                E, etaH = induced_spectrum(k, eta, kx, ky, z, a, Kx, Ky)
                ph = np.exp(-1j * ky * y)
                rows.append(E * ph)
                rows.append(etaH * ph)
            return np.concatenate(rows)

        vals, _ = adaptive_vector(integrand, _ky_points(k, kx, h, kmax), 0.0, rel_tol,
                                  max_intervals, shared=True)
        vals = vals.reshape(len(probes), 6) / (2 * np.pi)
        acc += vals * (weights[i] * np.exp(-1j * kx * xs) / (2 * np.pi))[:, None]
    out = []
    for j, r in enumerate(probes):
        E0, H0 = dipole_image_field(med, sc, r)
        out.append(FieldSample(r, E0 + acc[j, :3], H0 + acc[j, 3:] / eta))
    return out


def _sgn_bessel_transform(n, y, h):
    """Integral over the real line of sgn(k) J_n(k h) exp(-j k y), |y| < h."""
    th = np.arcsin(y / h)
    root = np.sqrt(h * h - y * y)
    if n % 2:
        return 2 * np.cos(n * th) / root
    return -2j * np.sin(n * th) / root


def strip_surface_field(solution, x, y, rel_tol=1e-7, ky_max=None, max_intervals=4000):
    """Total tangential E on the strip (z = a, |y| < h).

    The E_y integrand grows like |k_y| K_y; its leading large-k_y law is
    removed and integrated in closed form.  Returns ``(E_t, E_inc_t)`` with
    shape ``(2, len(x), len(y))``; the second array is the dipole-plus-image
    part alone.
    """
    sc, med = solution.scenario, solution.medium
    k, eta, h, a = med.k, med.eta, sc.h, sc.a
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(np.abs(y) >= h):
        raise ValueError("surface points must satisfy |y| < h")
    kmax = ky_max or max(4 * abs(k), 1000.0 / h)
    c, d = solution.c, solution.d
    nq = c.shape[0]
    S = np.array([[_sgn_bessel_transform(n, yy, h) for yy in y] for n in range(nq + 1)])
    pre = -eta / (2 * k)
    acc = np.zeros((2, len(y), len(x)), dtype=complex)
    for i, kx in enumerate(solution.contour.nodes):
        ci, di = c[:, i], d[:, i]
        if not (ci.any() or di.any()):
            continue

        def integrand(ky, kx=kx, ci=ci, di=di):
            Kx, Ky = spectral_current_density(ci, di, ky, h)
            w1 = weight_tm(k, kx, ky, a)
            ex = w1 * ((k * k - kx * kx) * Kx - kx * ky * Ky)
            lead = -1j * np.abs(ky) * Ky - 1j * kx * np.sign(ky) * Kx
            ey = w1 * ((k * k - ky * ky) * Ky - kx * ky * Kx) - lead
            ph = np.exp(-1j * np.multiply.outer(y, ky))
            return np.concatenate([ex * ph, ey * ph])

        vals, _ = adaptive_vector(integrand, _ky_points(k, kx, h, kmax), 0.0, rel_tol,
                                  max_intervals, shared=True)
        ex, ey = vals[:len(y)], vals[len(y):]
        back = sum(1j ** q * (-1j * math.pi * di[q] * (q + 1) * S[q + 1]
                              - 1j * kx * math.pi * h * ci[q] * S[q]) for q in range(nq))
        ey = ey + back
        ph = solution.contour.weights[i] * np.exp(-1j * kx * x) / (4 * np.pi ** 2)
        acc[0] += pre * np.outer(ex, ph)
        acc[1] += pre * np.outer(ey, ph)
    inc = np.zeros((2, len(x), len(y)), dtype=complex)
    for ix, xx in enumerate(x):
        for iy, yy in enumerate(y):
            E0, _ = dipole_image_field(med, sc, (xx, yy, a))
            inc[:, ix, iy] = E0[:2]
    return inc + acc.transpose(0, 2, 1), inc
