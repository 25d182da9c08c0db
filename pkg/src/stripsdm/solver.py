"""Per-k_x solves over the inversion contour and the resulting currents."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import StripError
from .fullwave import solve_all
from .narrowstrip import solve_narrow
from .quadrature import QuadratureConfig
from .transform import build_contour, inverse_transform, reconstruct_currents

log = logging.getLogger(__name__)


@dataclass
class SpectralSolution:
    """Chebyshev coefficients sampled on the contour nodes.

    ``c`` and ``d`` have shape ``(2 (m_max + 1), len(contour))``; row ``q``
    of ``c`` multiplies T_q and row ``q`` of ``d`` multiplies U_q.  The
    narrow model fills only ``c[0]``.
    """

    medium: object
    scenario: object
    contour: object
    c: np.ndarray
    d: np.ndarray
    kind: str
    max_residual: float = 0.0

    @property
    def m_max(self):
        return self.c.shape[0] // 2 - 1

    @property
    def spectral_current(self):
        """I(k_x) = pi h c_0(k_x) on the contour nodes."""
        return np.pi * self.scenario.h * self.c[0]

    def total_current(self, x):
        return np.pi * self.scenario.h * inverse_transform(self.contour, self.c[0], x)

    def current_map(self, x, y):
        return reconstruct_currents(self.contour, self.c, self.d, x, y, self.scenario.h)


def default_contour(medium, scenario, x_max, samples_per_period=6, **kw):
    return build_contour(medium.k, x_max, samples_per_period=samples_per_period,
                         source_gap=abs(scenario.a - scenario.z0), **kw)


def _map(func, items, threads):
    if threads <= 1:
        return [func(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _with_context(func, kx):
    try:
        return func(kx)
    except StripError as exc:
        if exc.args:
            exc.args = (f"at k_x={kx:.6g}: {exc.args[0]}",) + exc.args[1:]
        raise


def solve_fullwave(medium, scenario, contour, m_max, quad_cfg=None, threads=1):
    """Solve both parity systems at every contour node."""
    quad_cfg = quad_cfg or QuadratureConfig()
    nodes = list(contour.nodes)

    def one(kx):
        return _with_context(lambda q: solve_all(medium, scenario, q, m_max, quad_cfg), kx)

    sols = _map(one, nodes, threads)
    c = np.stack([s.c for s in sols], axis=1)
    d = np.stack([s.d for s in sols], axis=1)
    res = max(s.residual for s in sols)
    log.info("full-wave sweep: %d nodes, worst residual %.2e", len(nodes), res)
    return SpectralSolution(medium, scenario, contour, c, d, "fullwave", res)


def solve_narrow_strip(medium, scenario, contour, quad_cfg=None, threads=1):
    """Scalar narrow-strip current at every contour node."""
    quad_cfg = quad_cfg or QuadratureConfig()
    nodes = list(contour.nodes)

    def one(kx):
        return _with_context(lambda q: solve_narrow(medium, scenario, q, quad_cfg), kx)

    cur = np.array(_map(one, nodes, threads), dtype=complex)
    c = np.zeros((2, len(nodes)), dtype=complex)
    c[0] = cur / (np.pi * scenario.h)
    return SpectralSolution(medium, scenario, contour, c, np.zeros_like(c), "narrow")


ZERO_CURRENT = 1e-9


def relative_difference(i_app, i_gen, floor=ZERO_CURRENT):
    """d(x) = |I_app - I_gen| / |I_gen|.

    Samples where |I_gen| is below ``floor`` times its maximum (a symmetry
    zero, e.g. x = x0 for an odd current) have no meaningful ratio and are
    returned as NaN.
    """
    i_app = np.asarray(i_app)
    i_gen = np.asarray(i_gen)
    mag = np.abs(i_gen)
    d = np.full(mag.shape, np.nan)
    ok = mag > floor * np.max(mag)
    d[ok] = np.abs(i_app[ok] - i_gen[ok]) / mag[ok]
    return d
