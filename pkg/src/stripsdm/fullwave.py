"""Chebyshev-Galerkin systems for the spectral strip current coefficients.

For each k_x the unknowns split by parity in y:

* even system: ``c_0, c_2, ..., c_2M`` and ``d_1, d_3, ..., d_2M+1``
* odd system:  ``c_1, c_3, ..., c_2M+1`` and ``d_0, d_2, ..., d_2M``

Rows are the E_x tests (Bessel order 2m or 2m+1) followed by the E_y tests
(order 2m+2 or 2m+1).  All k_y integrals of one system share a single
adaptive partition.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .emcore import longitudinal_wavenumber
from .errors import QuadratureError, SingularSystemError
from .quadrature import (QuadratureConfig, TailSubtractionPlan, adaptive_vector,
                         select_kymax)
from .specfun import (bessel_j_batch, laplace_bessel0_difference, laplace_bessel_0,
                      laplace_bessel_over_k)

log = logging.getLogger(__name__)

COND_WARN = 1e12
COND_FAIL = 1e14


@dataclass
class SpectralSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    parity: str
    kx: complex
    m_max: int
    errors: np.ndarray | None = None

    @property
    def condition(self):
        return float(np.linalg.cond(self.matrix, 1))


@dataclass
class SpectralCoefficients:
    c: np.ndarray
    d: np.ndarray
    kx: complex
    residual: float = 0.0


# -- weights ---------------------------------------------------------------

def weight_tm(k, kx, ky, a):
    """(1 - exp(-2j k_z a)) / k_z, regular at k_z = 0."""
    kz = longitudinal_wavenumber(k, kx, ky)
    small = np.abs(kz * a) < 1e-8
    safe = np.where(small, 1.0, kz)
    w = -np.expm1(-2j * safe * a) / safe
    return np.where(small, 2j * a * (1 - 1j * kz * a), w)


def weight_te(k, kx, ky, a):
    """weight_tm * (k^2 - k_y^2) / k_y^2."""
    return weight_tm(k, kx, ky, a) * (k * k - ky * ky) / (ky * ky)


def ky_breakpoints(k, kx, h, a, kmax, extra=()):
    pts = [0.0, kmax, abs(k), 1.0 / h, 1.0 / a]
    kink = np.sqrt(complex(k * k - kx * kx))
    if kink.real > 0:
        pts.append(kink.real)
    pts.extend(extra)
    return sorted({p for p in pts if 0 <= p <= kmax})


# -- driving terms ---------------------------------------------------------

def _exponentials(kz, a, z0):
    near = np.exp(-1j * kz * abs(a - z0))
    far = np.exp(-1j * kz * (a + z0))
    return near - far, np.sign(a - z0) * near + far


def rhs_bracket(axis, test, k, kx, ky, kz, a, z0, h):
    """Orientation-dependent bracket of the driving integrals.

    ``test`` is ``"ex"`` (E_x tested with J_mu) or ``"ey"`` (E_y tested
    with J_mu / (k_y h), the 1/(k_y h) already folded in).
    """
    diff, summ = _exponentials(kz, a, z0)
    if test == "ex":
        if axis == "x":
            return -(k * k - kx * kx) / kz * diff
        if axis == "y":
            return kx * ky / kz * diff
        return kx * summ
    if axis == "x":
        return kx / (kz * h) * diff
    if axis == "y":
        return -(k * k - ky * ky) / (ky * kz * h) * diff
    return summ / h


def _bracket_is_odd(axis):
    return axis == "y"


def rhs_leading(axis, test, k, kx, h):
    """Coefficient and form of the near-term large-k_y law.

    Returns ``(alpha, over_k)``: the bracket's near exponential behaves as
    ``alpha * exp(-k_y d)`` (or ``alpha * exp(-k_y d) / k_y``).
    """
    if test == "ex":
        if axis == "x":
            return -1j * (k * k - kx * kx), True
        if axis == "y":
            return 1j * kx, False
        return kx, False  # sign of (a - z0) applied by the caller
    if axis == "x":
        return 1j * kx / h, True
    if axis == "y":
        return 1j / h, False
    return 1.0 / h, False


class _RhsTerm:
    """One driving integral: order ``mu`` and test type, with extraction."""

    def __init__(self, scenario, k, kx, mu, test, extract):
        self.mu = mu
        self.test = test
        axis = scenario.dipole.axis
        self.axis = axis
        self.use_sin = (mu % 2 == 1) != _bracket_is_odd(axis)
        self.extract = extract
        self.d = abs(scenario.a - scenario.z0)
        self.c = max(self.d, scenario.h)
        alpha, over_k = rhs_leading(axis, test, k, kx, scenario.h)
        if axis == "z":
            alpha = alpha * np.sign(scenario.a - scenario.z0)
        self.alpha = alpha
        self.over_k = over_k
        self.y0 = scenario.y0
        self.h = scenario.h

    def yfactor(self, ky):
        return 1j * np.sin(ky * self.y0) if self.use_sin else np.cos(ky * self.y0)

    def leading(self, ky, jmu):
        lead = self.alpha * jmu * self.yfactor(ky) * np.exp(-ky * self.d)
        if self.over_k:
            if self.mu == 0:
                lead = lead * -np.expm1(-ky * self.c)
            lead = lead / ky
        return lead

    def add_back(self):
        if not self.extract:
            return 0j
        bm = self.d - 1j * self.y0
        bp = self.d + 1j * self.y0
        if self.over_k and self.mu == 0:
            val = [laplace_bessel0_difference(b, b + self.c, self.h) for b in (bm, bp)]
        elif self.over_k:
            val = [laplace_bessel_over_k(b, self.h, self.mu) for b in (bm, bp)]
        else:
            val = [laplace_bessel_0(b, self.h, self.mu) for b in (bm, bp)]
        s = -1 if self.use_sin else 1
        return complex(self.alpha * 0.5 * (val[0] + s * val[1]))


# -- integral engine -------------------------------------------------------

def _pair_plan(weight, mu, nu, h):
    kind = "even" if mu % 2 == 0 else "odd"
    return TailSubtractionPlan(kind, mu, nu, 1 if weight == "tm" else -1, h)


def spectral_integrals(medium, scenario, kx, pairs, rhs_terms, quad_cfg, extract_rhs=True):
    """Integrate weighted Bessel products and driving terms over (0, inf).

    ``pairs``: list of ``(weight, mu, nu)`` with weight ``"tm"`` or ``"te"``.
    ``rhs_terms``: list of ``(mu, test)``.  Returns ``(pair_values,
    rhs_values, errors)``; driving integrals exclude the source prefactor.
    """
    k = medium.k
    h, a = scenario.h, scenario.a
    kmax = quad_cfg.ky_max or select_kymax(h, a)
    kx = complex(kx)
    plans = [_pair_plan(w, mu, nu, h) for (w, mu, nu) in pairs]
    terms = [_RhsTerm(scenario, k, kx, mu, test, extract_rhs) for (mu, test) in rhs_terms]
    top = max([max(mu, nu) for (_, mu, nu) in pairs] + [mu for (mu, _) in rhs_terms] + [0])
    knee = 1.0 / h
    z0 = scenario.z0
    axis = scenario.dipole.axis

    def integrand(ky):
        jb = bessel_j_batch(top, ky * h)
        w1 = weight_tm(k, kx, ky, a)
        rows = []
        need_te = any(w == "te" for (w, _, _) in pairs)
        w2 = w1 * (k * k - ky * ky) / (ky * ky) if need_te else None
        for (w, mu, nu), plan in zip(pairs, plans):
            prod = jb[mu] * jb[nu]
            lead = plan.sign * 1j * prod / ky
            val = (w1 if w == "tm" else w2) * prod
            if plan.split_origin:
                rows.append(np.where(ky > knee, val - lead, val))
            else:
                rows.append(val - lead)
        if terms:
            kz = longitudinal_wavenumber(k, kx, ky)
            for t in terms:
                br = rhs_bracket(axis, t.test, k, kx, ky, kz, a, z0, h)
                val = jb[t.mu] * br * t.yfactor(ky)
                if t.extract:
                    val = val - t.leading(ky, jb[t.mu])
                rows.append(val)
        return np.array(rows)

    bps = ky_breakpoints(k, kx, h, a, kmax, quad_cfg.split_points)
    vals, errs = adaptive_vector(integrand, bps, quad_cfg.abs_tol, quad_cfg.rel_tol,
                                 quad_cfg.max_intervals)
    npair = len(pairs)
    pv = vals[:npair] + np.array([p.add_back for p in plans], dtype=complex)
    rv = vals[npair:] + np.array([t.add_back() for t in terms], dtype=complex)
    return pv, rv, errs


def source_prefactor(medium, scenario, kx):
    p = scenario.dipole.moment
    return 1j * p / (complex(medium.epsilon) * medium.eta) * np.exp(1j * kx * scenario.x0)


def _assemble(medium, scenario, kx, m_max, quad_cfg, parity, extract_rhs=True):
    k = medium.k
    h = scenario.h
    kx = complex(kx)
    M = m_max + 1
    if parity == "even":
        c_ord = [2 * n for n in range(M)]           # c_{2n} carries J_{2n}
        d_ord = [2 * n + 2 for n in range(M)]       # d_{2n+1} carries J_{2n+2}
        ex_ord = [2 * m for m in range(M)]
        ey_ord = [2 * m + 2 for m in range(M)]
    else:
        c_ord = [2 * n + 1 for n in range(M)]       # c_{2n+1}
        d_ord = [2 * n + 1 for n in range(M)]       # d_{2n}
        ex_ord = [2 * m + 1 for m in range(M)]
        ey_ord = [2 * m + 1 for m in range(M)]
    index = {}
    pairs = []

    def want(w, mu, nu):
        key = (w,) + tuple(sorted((mu, nu)))
        if key not in index:
            index[key] = len(pairs)
            pairs.append(key)
        return index[key]

    layout = []
    for m in range(M):
        for n in range(M):
            sgn = (-1) ** n
            layout.append((m, n, want("tm", ex_ord[m], c_ord[n]), "ex_c", sgn))
            layout.append((m, M + n, want("tm", ex_ord[m], d_ord[n]), "ex_d", sgn))
            layout.append((M + m, M + n, want("te", ey_ord[m], d_ord[n]), "ey_d", sgn))
            layout.append((M + m, n, want("tm", ey_ord[m], c_ord[n]), "ey_c", sgn))
    rhs_terms = [(mu, "ex") for mu in ex_ord] + [(mu, "ey") for mu in ey_ord]
    try:
        pv, rv, errs = spectral_integrals(medium, scenario, kx, pairs, rhs_terms, quad_cfg,
                                          extract_rhs)
    except QuadratureError as exc:
        raise QuadratureError(f"{parity} system at k_x={kx}: {exc}", exc.estimate,
                              exc.error) from exc
    A = np.zeros((2 * M, 2 * M), dtype=complex)
    jj = 1j
    for (row, col, idx, kind, sgn) in layout:
        n = col % M
        if parity == "even":
            factor = {
                "ex_c": (k * k - kx * kx),
                "ex_d": -jj * kx / h * (2 * n + 2),
                "ey_d": jj * (2 * n + 2) / (h * h),
                "ey_c": -kx / h,
            }[kind]
        else:
            factor = {
                "ex_c": jj * (k * k - kx * kx),
                "ex_d": -kx / h * (2 * n + 1),
                "ey_d": (2 * n + 1) / (h * h),
                "ey_c": -jj * kx / h,
            }[kind]
        A[row, col] = np.pi * h * sgn * factor / k * pv[idx]
    b = source_prefactor(medium, scenario, kx) * rv
    return SpectralSystem(A, b, parity, kx, m_max, errs)


def assemble_even(medium, scenario, kx, m_max, quad_cfg, extract_rhs=True):
    return _assemble(medium, scenario, kx, m_max, quad_cfg, "even", extract_rhs)


def assemble_odd(medium, scenario, kx, m_max, quad_cfg, extract_rhs=True):
    return _assemble(medium, scenario, kx, m_max, quad_cfg, "odd", extract_rhs)


def solve_linear(matrix, rhs):
    """Row-scaled LU solve.  Returns ``(x, relative_residual, condition)``."""
    A = np.asarray(matrix, dtype=complex)
    b = np.asarray(rhs, dtype=complex)
    scale = np.max(np.abs(A), axis=1)
    if np.any(scale == 0):
        raise SingularSystemError("matrix has an all-zero row", condition=np.inf)
    As = A / scale[:, None]
    bs = b / scale
    lu, piv = scipy.linalg.lu_factor(As, check_finite=True)
    anorm = np.linalg.norm(As, 1)
    rcond, info = scipy.linalg.lapack.zgecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if cond > COND_FAIL:
        raise SingularSystemError(f"matrix is singular to working precision (cond={cond:.3e})",
                                  condition=cond)
    if cond > COND_WARN:
        log.warning("ill-conditioned spectral system, cond=%.3e", cond)
    x = scipy.linalg.lu_solve((lu, piv), bs)
    bnorm = np.linalg.norm(b)
    res = np.linalg.norm(A @ x - b) / bnorm if bnorm > 0 else np.linalg.norm(A @ x)
    return x, float(res), cond


def solve_system(system):
    """Solve one parity block; returns a partial SpectralCoefficients."""
    x, res, _ = solve_linear(system.matrix, system.rhs)
    if res > 1e-10:
        log.warning("spectral solve residual %.2e at k_x=%s", res, system.kx)
    M = system.m_max + 1
    c = np.zeros(2 * M, dtype=complex)
    d = np.zeros(2 * M, dtype=complex)
    if system.parity == "even":
        c[0::2] = x[:M]
        d[1::2] = x[M:]
    else:
        c[1::2] = x[:M]
        d[0::2] = x[M:]
    return SpectralCoefficients(c, d, system.kx, res)


def solve_all(medium, scenario, kx, m_max, quad_cfg=None, extract_rhs=True):
    """Both parities at one k_x, merged into full ``c``, ``d`` vectors."""
    quad_cfg = quad_cfg or QuadratureConfig()
    even = solve_system(assemble_even(medium, scenario, kx, m_max, quad_cfg, extract_rhs))
    odd = solve_system(assemble_odd(medium, scenario, kx, m_max, quad_cfg, extract_rhs))
    return SpectralCoefficients(even.c + odd.c, even.d + odd.d, complex(kx),
                                max(even.residual, odd.residual))
