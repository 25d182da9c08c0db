"""Inverse Fourier transform in k_x along a deformed contour.

The path runs along the real axis except around the TEM poles: it is lifted
to +j*delta around Re(k_x) = +Re(k) and lowered to -j*delta around -Re(k),
so it passes the poles on the same side as the real axis does for a lossy
medium.  The price is a factor exp(delta*|x|) of cancellation in the sum.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContourError
from .specfun import bessel_j_batch

OVERFLOW_GUARD = 1e10


@dataclass
class KxContour:
    nodes: np.ndarray        # complex k_x
    weights: np.ndarray      # complex dk_x along the path
    kx_max: float
    delta: float
    x_max: float
    vertices: np.ndarray

    def __len__(self):
        return self.nodes.size

    @property
    def x_limit(self):
        """Largest |x| with exp(delta*|x|) below the overflow guard."""
        if self.delta == 0:
            return np.inf
        return math.log(OVERFLOW_GUARD) / self.delta


def _gl_segment(z0, z1, panels, order):
    """Composite Gauss-Legendre on the straight segment z0 -> z1."""
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(panels, dtype=float)  # fractions 0..1
    nodes, weights = [], []
    dz = z1 - z0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        nodes.append(z0 + dz * (mid + half * t))
        weights.append(dz * half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _uniform(length, max_panel):
    n = max(1, int(math.ceil(length / max_panel - 1e-12)))
    return np.linspace(0.0, 1.0, n + 1)


def _graded(length, first, max_panel, ratio=1.4):
    """Panel edges on [0, 1] growing geometrically away from 0."""
    edges = [0.0]
    step = first
    while edges[-1] < length:
        edges.append(min(length, edges[-1] + step))
        step = min(step * ratio, max_panel)
    return np.array(edges) / length


def build_contour(k, x_max, samples_per_period=6, delta=None, kx_max=None,
                  half_width=None, source_gap=None, order=8, real_axis=False):
    """Build the k_x integration path.

    ``samples_per_period`` counts Gauss nodes per period 2*pi/x_max of the
    transform kernel.  ``source_gap`` (|a - z0|) sets the spectral decay
    used for ``kx_max``.  ``real_axis=True`` forces delta = 0.
    """
    if x_max <= 0:
        raise ValueError("x_max must be positive")
    kr = abs(complex(k).real)
    loss = -complex(k).imag
    cap = math.log(OVERFLOW_GUARD) / x_max
    if real_axis:
        delta = 0.0
    elif delta is None:
        lower = 100.0 * loss
        if lower > cap:
            raise ContourError(
                f"contour lift {lower:.3g} required by the medium loss exceeds the "
                f"overflow cap {cap:.3g} for x_max={x_max}; reduce x_max or the loss")
        delta = max(lower, min(0.02 * abs(k), cap / 4))
    elif delta * x_max > math.log(OVERFLOW_GUARD):
        raise ContourError(f"exp(delta*x_max) = exp({delta * x_max:.1f}) exceeds the guard")
    if kx_max is None:
        kx_max = 8.0 * abs(k)
        if source_gap:
            kx_max = max(kx_max, 30.0 / source_gap)
    half_width = 0.5 * kr if half_width is None else half_width
    period = 2 * math.pi / x_max
    max_panel = min(period * order / samples_per_period, abs(k) / 4)

    lo_re, hi_re = kr - half_width, kr + half_width
    if delta == 0:
        verts = np.array([-kx_max, kx_max], dtype=complex)
        pieces = [_gl_segment(-kx_max, kx_max, _uniform(2 * kx_max, max_panel), order)]
    else:
        first = max(delta / 2, 1e-3 * kr)
        fine_max = min(max_panel, max(delta, first))
        verts = np.array([-kx_max, -hi_re, -hi_re - 1j * delta, -kr - 1j * delta,
                          -lo_re - 1j * delta, -lo_re, lo_re, lo_re + 1j * delta,
                          kr + 1j * delta, hi_re + 1j * delta, hi_re, kx_max])
        pieces = []
        for z0, z1 in zip(verts[:-1], verts[1:]):
            length = abs(z1 - z0)
            if length == 0:
                continue
            near_pole = abs(abs(z1.real) - kr) < 1e-12 * kr and z1.imag != 0
            leaves_pole = abs(abs(z0.real) - kr) < 1e-12 * kr and z0.imag != 0
            if near_pole:
                edges = 1.0 - _graded(length, first, fine_max)[::-1]
            elif leaves_pole:
                edges = _graded(length, first, fine_max)
            else:
                edges = _uniform(length, max_panel)
            pieces.append(_gl_segment(z0, z1, edges, order))
    nodes = np.concatenate([p[0] for p in pieces])
    weights = np.concatenate([p[1] for p in pieces])
    return KxContour(nodes, weights, float(kx_max), float(delta), float(x_max), verts)


def inverse_transform(contour, values, x):
    """(1/2pi) * integral of values(k_x) exp(-j k_x x) along the contour.

    ``values`` is sampled on ``contour.nodes`` (last axis); ``x`` scalar or
    array.  Result has shape ``values.shape[:-1] + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > contour.x_limit):
        raise ContourError(f"|x| exceeds the contour guard range {contour.x_limit:.3g}")
    values = np.asarray(values, dtype=complex)
    kern = np.exp(-1j * np.multiply.outer(contour.nodes, x.ravel()))
    out = np.tensordot(values * contour.weights, kern, axes=([-1], [0])) / (2 * np.pi)
    return out.reshape(values.shape[:-1] + x.shape)


@dataclass
class CurrentMap:
    x: np.ndarray
    y: np.ndarray
    Kx: np.ndarray     # (len(x), len(y))
    Ky: np.ndarray
    I: np.ndarray      # (len(x),)


def chebyshev_t(n_max, u):
    u = np.asarray(u, dtype=float)
    out = np.empty((n_max + 1,) + u.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = u
    for n in range(1, n_max):
        out[n + 1] = 2 * u * out[n] - out[n - 1]
    return out


def chebyshev_u(n_max, u):
    u = np.asarray(u, dtype=float)
    out = np.empty((n_max + 1,) + u.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2 * u
    for n in range(1, n_max):
        out[n + 1] = 2 * u * out[n] - out[n - 1]
    return out


def currents_from_coefficients(c_x, d_x, y, h):
    """K_x and K_y on the strip from spatial coefficients c_n(x), d_n(x).

    ``c_x``, ``d_x`` have shape ``(N, nx)``; returns ``(Kx, Ky)`` of shape
    ``(nx, ny)``.  Zero outside |y| < h; |y| == h is rejected.
    """
    y = np.asarray(y, dtype=float)
    u = y / h
    if np.any(np.abs(u) == 1.0):
        raise ValueError("K_x is singular at the strip edges |y| = h")
    inside = np.abs(u) < 1
    uu = np.where(inside, u, 0.0)
    root = np.sqrt(1 - uu * uu)
    n = c_x.shape[0]
    T = chebyshev_t(n - 1, uu)
    U = chebyshev_u(n - 1, uu)
    Kx = (c_x.T @ T) / root
    Ky = (d_x.T @ U) * root
    Kx[:, ~inside] = 0
    Ky[:, ~inside] = 0
    return Kx, Ky


def reconstruct_currents(contour, c_k, d_k, x, y, h):
    """Spatial current map from spectral coefficients sampled on the contour.

    ``c_k``, ``d_k``: arrays ``(N, len(contour))``.  Narrow mode passes
    ``c_k = I(k_x)/(pi h)`` with a single row and ``d_k = zeros``.
    """
    x = np.asarray(x, dtype=float)
    c_x = inverse_transform(contour, c_k, x)
    d_x = inverse_transform(contour, d_k, x)
    Kx, Ky = currents_from_coefficients(c_x, d_x, y, h)
    return CurrentMap(x, np.asarray(y, dtype=float), Kx, Ky, np.pi * h * c_x[0])


def narrow_current_map(contour, i_k, x, y, h):
    c_k = np.asarray(i_k, dtype=complex)[None, :] / (np.pi * h)
    return reconstruct_currents(contour, c_k, np.zeros_like(c_k), x, y, h)


def spectral_current_density(c, d, ky, h):
    """K_x(k_x, k_y), K_y(k_x, k_y) from the Chebyshev coefficients at one k_x."""
    ky = np.asarray(ky, dtype=float)
    n = len(c)
    jb = bessel_j_batch(n + 1, ky * h)
    kx_val = np.zeros(ky.shape, dtype=complex)
    ky_val = np.zeros(ky.shape, dtype=complex)
    arg = ky * h
    small = np.abs(arg) < 1e-300
    safe = np.where(small, 1.0, arg)
    for q in range(n):
        phase = 1j ** q      # (-1)^n for even 2n, j(-1)^n for odd 2n+1
        kx_val += np.pi * h * phase * c[q] * jb[q]
        # (q+1) J_{q+1}(x)/x -> 1/2 for q = 0, 0 otherwise, as x -> 0
        ratio = np.where(small, 0.5 if q == 0 else 0.0, (q + 1) * jb[q + 1] / safe)
        ky_val += np.pi * h * phase * d[q] * ratio
    return kx_val, ky_val
