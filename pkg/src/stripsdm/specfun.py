"""Bessel functions of the first kind and Laplace-Bessel closed forms.

Only integer orders on real arguments are needed by the solver.  Small
arguments use Miller's backward recurrence normalised with
``J0 + 2*(J2 + J4 + ...) = 1``; large arguments start from the Hankel
asymptotic expansion of J0, J1 and recur upwards, which is stable while
the order stays below the argument.
"""

import math

import numpy as np

MAX_ORDER = 64

# Value of the integral of J0(u)**2 / u from 1 to infinity.
J0_SQUARED_TAIL = 0.3438831082

_RESCALE = 1e200
SERIES_LIMIT = 1e-4


def _crossover(max_order):
    return max(30.0, 2.0 * max_order)


def _check_order(max_order):
    if max_order < 0 or max_order > MAX_ORDER:
        raise ValueError(f"Bessel order must lie in 0..{MAX_ORDER}, got {max_order}")


def _miller(max_order, x):
    """Backward recurrence for 0 < x <= crossover.  Returns (max_order+1, n)."""
    top = max(max_order, float(np.max(x)))
    start = int(top + 30 + math.sqrt(60.0 * (top + 1)))
    start += start % 2
    out = np.zeros((max_order + 1, x.size))
    nxt = np.zeros_like(x)
    cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        # cur holds J_k, nxt J_{k+1}; step to J_{k-1}
        prev = k * two_over_x * cur - nxt
        nxt, cur = cur, prev
        if k - 1 <= max_order:
            out[k - 1] = cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * cur
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            nxt[big] /= _RESCALE
            norm[big] /= _RESCALE
            out[:, big] /= _RESCALE
    norm += cur  # J0 term
    return out / norm


def _hankel_j01(x):
    """J0 and J1 from the asymptotic expansion, valid for x >= 30."""
    result = []
    sx, cx = np.sin(x), np.cos(x)
    amp = np.sqrt(2.0 / (np.pi * x))
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        p = np.ones_like(x)
        q = np.zeros_like(x)
        term = np.ones_like(x)
        k = 1
        while True:
            term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
            if k % 2 == 1:
                q += (-1) ** ((k - 1) // 2) * term
            else:
                p += (-1) ** (k // 2) * term
            if np.max(np.abs(term)) < 1e-17 or k > 60:
                break
            k += 1
        # chi = x - nu*pi/2 - pi/4, expanded to keep the phase exact
        if nu == 0:
            cchi, schi = (cx + sx) / math.sqrt(2), (sx - cx) / math.sqrt(2)
        else:
            cchi, schi = (sx - cx) / math.sqrt(2), -(sx + cx) / math.sqrt(2)
        result.append(amp * (p * cchi - q * schi))
    return result


def _upward(max_order, x):
    out = np.empty((max_order + 1, x.size))
    j0, j1 = _hankel_j01(x)
    out[0] = j0
    if max_order >= 1:
        out[1] = j1
    for n in range(1, max_order):
        out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1]
    return out


def _series(max_order, x):
    """Two-term power series, exact to rounding for x < SERIES_LIMIT."""
    out = np.empty((max_order + 1, x.size))
    half = 0.5 * x
    term = np.ones_like(x)
    for n in range(max_order + 1):
        if n:
            term = term * half / n
        out[n] = term * (1.0 - half * half / (n + 1))
    return out


def bessel_j_batch(max_order, x):
    """All orders ``J_0 .. J_max_order`` at the real argument(s) ``x``.

    Returns an array of shape ``(max_order + 1,) + np.shape(x)``.
    """
    _check_order(max_order)
    x = np.asarray(x, dtype=float)
    shape = x.shape
    flat = x.ravel()
    ax = np.abs(flat)
    out = np.zeros((max_order + 1, flat.size))
    zero = ax == 0.0
    out[0, zero] = 1.0
    cross = _crossover(max_order)
    tiny = (~zero) & (ax < SERIES_LIMIT)
    small = (ax >= SERIES_LIMIT) & (ax <= cross)
    large = ax > cross
    if tiny.any():
        out[:, tiny] = _series(max_order, ax[tiny])
    if small.any():
        out[:, small] = _miller(max_order, ax[small])
    if large.any():
        out[:, large] = _upward(max_order, ax[large])
    neg = flat < 0
    if neg.any():
        out[1::2, neg] *= -1.0
    return out.reshape((max_order + 1,) + shape)


def bessel_j(n, x):
    """``J_n(x)`` for integer ``n >= 0`` and real ``x`` (scalar or array)."""
    if n < 0:
        raise ValueError("order must be non-negative")
    return bessel_j_batch(n, x)[n]


def _check_b(b, h):
    if not complex(b).real > 0:
        raise ValueError(f"Re(b) must be positive for convergence, got b={b}")
    if h <= 0:
        raise ValueError("h must be positive")


def laplace_bessel_0(b, h, m):
    """Integral of exp(-t*b) * J_m(t*h) over t in (0, inf)."""
    _check_b(b, h)
    b = np.asarray(b, dtype=complex)
    r = np.sqrt(b * b + h * h)
    # (r - b)/h == h/(r + b) without the cancellation for |b| >> h
    return (h / (r + b)) ** m / r


def laplace_bessel_over_k(b, h, m):
    """Integral of exp(-t*b) * J_m(t*h) / t over t in (0, inf), m >= 1.

    This is the Gauss hypergeometric form
    (1/m) (h/2b)^m F(m/2, (m+1)/2; m+1; -(h/b)^2), reduced algebraically.
    """
    if m < 1:
        raise ValueError("m = 0 diverges logarithmically at the origin")
    _check_b(b, h)
    b = np.asarray(b, dtype=complex)
    r = np.sqrt(b * b + h * h)
    return (h / (r + b)) ** m / m


def laplace_bessel0_difference(b1, b2, h):
    """Integral of (exp(-t*b1) - exp(-t*b2)) * J_0(t*h) / t over (0, inf)."""
    _check_b(b1, h)
    _check_b(b2, h)
    b1 = np.asarray(b1, dtype=complex)
    b2 = np.asarray(b2, dtype=complex)
    r1 = np.sqrt(b1 * b1 + h * h)
    r2 = np.sqrt(b2 * b2 + h * h)
    return np.log(b2 + r2) - np.log(b1 + r1)


def j0_squared_tail_constant():
    return J0_SQUARED_TAIL
