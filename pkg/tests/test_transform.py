import numpy as np
import pytest

from stripsdm.errors import ContourError
from stripsdm.specfun import bessel_j_batch
from stripsdm.transform import (build_contour, chebyshev_t, chebyshev_u,
                                currents_from_coefficients, inverse_transform,
                                narrow_current_map, reconstruct_currents,
                                spectral_current_density)

K = 2 * np.pi * (1 - 1e-5j)


def test_contour_shape():
    c = build_contour(K, 20.0)
    assert c.delta > 0 and c.x_limit >= 20.0
    assert np.all(np.diff(c.nodes.real) >= 0)
    assert np.max(np.abs(c.nodes.imag)) == pytest.approx(c.delta)
    # lifted above +Re k, lowered below -Re k
    near_plus = np.abs(c.nodes.real - K.real) < 1e-3
    near_minus = np.abs(c.nodes.real + K.real) < 1e-3
    assert np.all(c.nodes[near_plus].imag > 0) and np.all(c.nodes[near_minus].imag < 0)
    assert abs(np.sum(c.weights) - 2 * c.kx_max) < 1e-9


def test_gaussian_pair():
    x = np.linspace(-20, 20, 81)
    c = build_contour(K, 20.0)
    vals = np.exp(-c.nodes ** 2 / 4)
    got = inverse_transform(c, vals, x)
    ref = np.exp(-x ** 2) / np.sqrt(np.pi)
    assert np.max(np.abs(got - ref)) < 1e-8


def test_pole_pair():
    # F = 1/(k^2 - kx^2) with Im k < 0 -> f(x) = j exp(-jk|x|)/(2k)
    k = 2 * np.pi * (1 - 1e-3j)
    x = np.array([1.0, 5.0, 12.0])
    c = build_contour(k, 12.0, samples_per_period=12, kx_max=3000.0)
    got = inverse_transform(c, 1 / (k * k - c.nodes ** 2), x)
    ref = 1j * np.exp(-1j * k * np.abs(x)) / (2 * k)
    assert np.max(np.abs(got - ref)) < 1e-4 * abs(ref[0])


def test_contour_guards():
    with pytest.raises(ContourError):
        build_contour(2 * np.pi * (1 - 0.1j), 200.0)
    c = build_contour(K, 10.0)
    with pytest.raises(ContourError):
        inverse_transform(c, np.ones(len(c)), [2 * c.x_limit])
    assert build_contour(K, 10.0, real_axis=True).delta == 0
    with pytest.raises(ValueError):
        build_contour(K, 0.0)


def test_chebyshev_against_numpy():
    th = np.linspace(0.1, 3.0, 17)
    u = np.cos(th)
    T = chebyshev_t(6, u)
    U = chebyshev_u(6, u)
    for n in range(7):
        coef = np.zeros(n + 1)
        coef[n] = 1
        np.testing.assert_allclose(T[n], np.polynomial.chebyshev.chebval(u, coef), atol=1e-13)
        np.testing.assert_allclose(U[n], np.sin((n + 1) * th) / np.sin(th), atol=1e-12)


def test_spectral_density_is_fourier_transform():
    # integral of T_n(y/h)/sqrt(1-(y/h)^2) and U_n sqrt(...) times exp(+j ky y)
    h = 0.3
    N = 6
    c = np.zeros(N, complex)
    d = np.zeros(N, complex)
    c[3] = 1.0
    d[2] = 1.0
    ky = np.array([0.7, 5.0, 23.0])
    kx_val, ky_val = spectral_current_density(c, d, ky, h)
    # Gauss-Chebyshev for the first kind and Gauss-Chebyshev-U for the second
    n = 200
    th = np.pi * (np.arange(n) + 0.5) / n
    u = np.cos(th)
    ref_x = [h * np.pi / n * np.sum(np.cos(3 * th) * np.exp(1j * q * h * u)) for q in ky]
    th2 = np.pi * np.arange(1, n + 1) / (n + 1)
    u2 = np.cos(th2)
    w2 = np.pi / (n + 1) * np.sin(th2) ** 2
    U2 = 4 * u2 ** 2 - 1
    ref_y = [h * np.sum(w2 * U2 * np.exp(1j * q * h * u2)) for q in ky]
    np.testing.assert_allclose(kx_val, ref_x, atol=1e-12)
    np.testing.assert_allclose(ky_val, ref_y, atol=1e-12)
    # small-argument limit of the second-kind transform
    d0 = np.zeros(N, complex)
    d0[0] = 1.0
    assert spectral_current_density(c * 0, d0, np.array([0.0]), h)[1][0] == pytest.approx(
        np.pi * h / 2)


def test_currents_from_coefficients():
    h = 0.5
    y = np.array([-0.4, 0.0, 0.3, 0.7])
    c = np.array([[1.0], [0.5]], dtype=complex)
    d = np.array([[0.0], [2.0]], dtype=complex)
    Kx, Ky = currents_from_coefficients(c, d, y, h)
    u = y[:3] / h
    np.testing.assert_allclose(Kx[0, :3], (1 + 0.5 * u) / np.sqrt(1 - u * u))
    np.testing.assert_allclose(Ky[0, :3], 4 * u * np.sqrt(1 - u * u))
    assert Kx[0, 3] == 0 and Ky[0, 3] == 0
    with pytest.raises(ValueError):
        currents_from_coefficients(c, d, [h], h)


def test_reconstruct_and_narrow_map():
    c = build_contour(K, 5.0)
    g = np.exp(-c.nodes ** 2 / 4)
    ck = np.vstack([g, 0 * g])
    cm = reconstruct_currents(c, ck, 0 * ck, [0.0, 1.0], [0.0], 0.2)
    ref = np.exp(-np.array([0.0, 1.0]) ** 2) / np.sqrt(np.pi)
    np.testing.assert_allclose(cm.I, np.pi * 0.2 * ref, atol=1e-9)
    nm = narrow_current_map(c, np.pi * 0.2 * g, [0.0, 1.0], [0.0], 0.2)
    np.testing.assert_allclose(nm.I, cm.I, atol=1e-12)
    np.testing.assert_allclose(nm.Kx[:, 0], cm.I / (np.pi * 0.2), atol=1e-12)
