"""Semi-infinite k_y integrals of Bessel-product integrands.

The integrands in the strip equations fall off like j/k_y * J_m J_n for
large k_y.  That leading term is subtracted on the finite interval and
its closed form over (0, inf) added back.  The remainder is integrated
with a vectorised adaptive Gauss-Kronrod (7/15) rule that refines all
components of a vector-valued integrand on a shared partition.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import QuadratureError
from .specfun import J0_SQUARED_TAIL, bessel_j_batch

# Gauss-Kronrod 7/15 nodes on [-1, 1] (positive half incl. centre).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (xgk[1], xgk[3], ...).
_WG15 = np.zeros(15)
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[7] = _WG[3]
_WG15[[9, 11, 13]] = _WG[2::-1]


@dataclass
class QuadratureConfig:
    ky_max: float | None = None
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    split_points: list = field(default_factory=list)
    max_intervals: int = 4000

    def __post_init__(self):
        if self.ky_max is not None and self.ky_max <= 0:
            raise ValueError("ky_max must be positive")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class TailSubtractionPlan:
    """Leading large-k_y law ``sign * j * J_m(k h) J_n(k h) / k`` to remove.

    ``m`` and ``n`` are the Bessel orders themselves (same parity).
    ``kind`` is ``"even"``, ``"odd"`` or ``"none"``.
    """

    kind: str
    m: int = 0
    n: int = 0
    sign: int = 1
    h: float = 1.0

    def __post_init__(self):
        if self.kind not in ("even", "odd", "none"):
            raise ValueError(f"unknown subtraction kind {self.kind!r}")
        if self.kind != "none" and (self.m - self.n) % 2:
            raise ValueError("tail subtraction needs orders of equal parity")
        if self.kind == "even" and (self.m % 2 or self.n % 2):
            raise ValueError("even plan needs even orders")
        if self.kind == "odd" and not (self.m % 2 and self.n % 2):
            raise ValueError("odd plan needs odd orders")

    @property
    def split_origin(self):
        """The J0*J0 case: subtraction only beyond k = 1/h."""
        return self.kind == "even" and self.m == 0 and self.n == 0

    @property
    def add_back(self):
        if self.kind == "none":
            return 0j
        return self.sign * 1j * bessel_product_over_k(self.m, self.n, self.split_origin)


def bessel_product_over_k(m, n, from_one=False):
    """Integral of J_m(u) J_n(u) / u over (0, inf) for orders of equal parity.

    With ``from_one`` (only m = n = 0), the lower limit is 1 instead.
    """
    if from_one:
        if m or n:
            raise ValueError("only J0^2 uses the shifted lower limit")
        return J0_SQUARED_TAIL
    if (m - n) % 2:
        raise ValueError("closed form only for equal parity")
    if m == n == 0:
        raise ValueError("J0^2/u diverges at the origin")
    return 1.0 / (2 * m) if m == n else 0.0


def select_kymax(h, a, rel_target=1e-6, k=None):
    """Truncation point of the k_y integrals.

    Policy ``max(200/h, 50/a, 100|k|)``; the ``|k|`` term only when ``k`` is
    given.  The tail-subtracted remainder decays like k_y^-3, so tighter
    targets scale the limit by ``(1e-6/rel_target)^(1/3)``.
    """
    if h <= 0 or a <= 0:
        raise ValueError("h and a must be positive")
    kmax = max(200.0 / h, 50.0 / a)
    if k is not None:
        kmax = max(kmax, 100.0 * abs(k))
    if rel_target < 1e-6:
        kmax *= (1e-6 / rel_target) ** (1.0 / 3.0)
    return kmax


def _gk_panel(func, lo, hi):
    """Kronrod estimate and |K - G| for each interval; func -> (ncomp, npts)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    vals = np.asarray(func(pts))
    if vals.ndim == 1:
        vals = vals[None, :]
    vals = vals.reshape(vals.shape[0], lo.size, 15)
    kron = (vals * _WK).sum(axis=2) * half
    gauss = (vals * _WG15).sum(axis=2) * half
    return kron, np.abs(kron - gauss)


def adaptive_vector(func, breakpoints, abs_tol=1e-10, rel_tol=1e-8, max_intervals=4000,
                    shared=False):
    """Integrate a vector-valued ``func`` over ``[breakpoints[0], breakpoints[-1]]``.

    ``func(k)`` takes a 1-D array and returns ``(ncomp, k.size)`` values.
    Returns ``(values, errors)``, both of length ``ncomp``.  Every component
    must meet ``err <= max(abs_tol, rel_tol*|value|)``; with ``shared`` the
    relative part uses the largest component instead.
    """
    bp = np.unique(np.asarray(breakpoints, dtype=float))
    lo, hi = bp[:-1], bp[1:]
    kron, err = _gk_panel(func, lo, hi)
    while True:
        total = kron.sum(axis=1)
        total_err = err.sum(axis=1)
        mag = np.abs(total)
        if shared:
            mag = np.full_like(mag, mag.max())
        tol = np.maximum(abs_tol, rel_tol * mag)
        bad = total_err > tol
        if not bad.any():
            return total, total_err
        nint = lo.size
        if nint >= max_intervals:
            raise QuadratureError(
                f"adaptive quadrature did not converge with {nint} intervals "
                f"(worst error {np.max(total_err - tol):.3e} above tolerance)",
                estimate=total, error=total_err)
        # Split the intervals carrying a fair share of any failing error budget.
        share = err[bad] / tol[bad, None]
        ratio = share.max(axis=0)
        split = ratio > 0.5 / nint
        if not split.any():
            split = ratio >= ratio.max()
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        k_new, e_new = _gk_panel(func, new_lo, new_hi)
        keep = ~split
        order = np.argsort(np.concatenate([lo[keep], new_lo]), kind="stable")
        lo = np.concatenate([lo[keep], new_lo])[order]
        hi = np.concatenate([hi[keep], new_hi])[order]
        kron = np.concatenate([kron[:, keep], k_new], axis=1)[:, order]
        err = np.concatenate([err[:, keep], e_new], axis=1)[:, order]


def leading_term(plan, k):
    """``sign * j * J_m(k h) J_n(k h) / k`` evaluated at the array ``k``."""
    jb = bessel_j_batch(max(plan.m, plan.n), k * plan.h)
    return plan.sign * 1j * jb[plan.m] * jb[plan.n] / k


def integrate_spectral(integrand, plan, cfg, breakpoints=(), ky_max=None):
    """Integral of ``integrand`` over (0, inf) with the plan's tail removed.

    ``integrand`` maps an array of k_y to complex values.  Returns
    ``(value, error_bound)``.
    """
    kmax = ky_max or cfg.ky_max
    if kmax is None:
        raise ValueError("ky_max must be set in the config or passed explicitly")
    pts = [0.0, kmax] + [p for p in list(breakpoints) + list(cfg.split_points) if 0 < p < kmax]
    if plan.kind == "none":
        val, err = adaptive_vector(lambda k: integrand(k)[None, :], pts,
                                   cfg.abs_tol, cfg.rel_tol, cfg.max_intervals)
        return complex(val[0]), float(err[0])
    if plan.split_origin:
        knee = 1.0 / plan.h
        pts.append(knee)

        def f(k):
            v = np.asarray(integrand(k), dtype=complex)
            return np.where(k > knee, v - leading_term(plan, k), v)[None, :]
    else:
        def f(k):
            return (np.asarray(integrand(k), dtype=complex) - leading_term(plan, k))[None, :]
    val, err = adaptive_vector(f, pts, cfg.abs_tol, cfg.rel_tol, cfg.max_intervals)
    return complex(val[0]) + plan.add_back, float(err[0])


def bessel_product_tail(m, n, kmax):
    """Asymptotic value of the integral of J_m J_n / u from ``kmax`` to inf.

    Leading non-oscillating and oscillating terms; the neglected part is
    O(kmax^-3).
    """
    if (m - n) % 2:
        raise ValueError("equal parity required")
    c = np.cos((n - m) * np.pi / 2)
    phi = (m + n) * np.pi / 2 + np.pi / 2
    # (1/(pi u^2)) [c + cos(2u - phi)] integrated from kmax
    return c / (np.pi * kmax) - np.sin(2 * kmax - phi) / (2 * np.pi * kmax ** 2)


def bessel_product_integral(m, n, kmax=4000.0, lower=0.0, rel_tol=1e-12):
    """Numerical integral of J_m(u) J_n(u) / u over (lower, inf).

    Adaptive quadrature up to ``kmax`` plus the asymptotic tail; used to
    check the closed forms and the J0^2 constant independently of them.
    """
    if lower <= 0 and m == n == 0:
        raise ValueError("J0^2/u diverges at the origin")
    top = max(m, n)

    def f(u):
        jb = bessel_j_batch(top, u)
        return (jb[m] * jb[n] / u)[None, :]

    pts = np.arange(lower, kmax + 1e-9, 2.0)
    if pts[-1] < kmax:
        pts = np.append(pts, kmax)
    val, _ = adaptive_vector(f, pts, 1e-15, rel_tol, max_intervals=20000)
    return float(val[0].real) + float(bessel_product_tail(m, n, kmax))
