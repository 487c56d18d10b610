"""Oracle contracts: fields, J0, benchmark truths, the mode-series reference."""
import numpy as np
import pytest
from scipy.special import j0 as scipy_j0

from bepgp import oracles as O
from bepgp.errors import DomainError


def test_gaussian_bump_center_value():
    b = O.gaussian_bump((1.0, 1.0), 10.0, 5.0)
    assert b(np.array([[1.0, 1.0]]))[0] == pytest.approx(5.0)


def test_gaussian_bump_gradient_matches_fd(rng):
    b = O.gaussian_bump((0.3, -0.2), 3.0, 2.0)
    pts = rng.uniform(-1, 1, size=(20, 2))
    g = b.gradient(pts)
    h = 1e-6
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd = (b(pts + e) - b(pts - e)) / (2 * h)
        assert np.max(np.abs(fd - g[:, i])) <= 1e-6 * max(1.0, np.abs(g).max())


def test_gaussian_bump_gradient_energy_is_pi():
    # integral of |grad exp(-a r^2)|^2 over the plane equals pi for any a
    for a in (3.0, 10.0):
        b = O.gaussian_bump((0.0, 0.0), a, 1.0)
        x, w = np.polynomial.legendre.leggauss(160)
        half = 6.0 / np.sqrt(a / 10.0)
        xs, ws = half * x, half * w
        XX, YY = np.meshgrid(xs, xs, indexing="ij")
        G = b.gradient(np.column_stack([XX.ravel(), YY.ravel()]))
        E = np.einsum("i,j,ij->", ws, ws, (G**2).sum(axis=1).reshape(160, 160))
        assert E == pytest.approx(np.pi, rel=1e-6)


def test_bump_rejects_bad_sharpness():
    with pytest.raises(ValueError):
        O.gaussian_bump((0.0,), -1.0)


# --- J0 -------------------------------------------------------------------

def test_j0_at_zero():
    assert O.bessel_j0(0.0) == 1.0


def test_j0_first_zero():
    assert abs(O.bessel_j0(2.404825557695773)) <= 1e-10


def test_j0_against_scipy_dense():
    xs = np.concatenate([np.linspace(0.0, 30.0, 3001), np.linspace(30.0, 700.0, 1500)])
    assert np.max(np.abs(O.bessel_j0(xs) - scipy_j0(xs))) <= 1e-10


def test_j0_seam_dual_method():
    xs = np.linspace(11.5, 12.5, 41)
    series = O._j0_series(xs)
    asym = O._j0_asymptotic(xs)
    assert np.max(np.abs(series - asym)) <= 1e-9


def test_j0_even_and_domain():
    assert O.bessel_j0(-3.7) == O.bessel_j0(3.7)
    with pytest.raises(DomainError):
        O.bessel_j0(701.0)


# --- benchmark truths -------------------------------------------------------

def test_wave1d_truth_initial_slice():
    x = np.linspace(0.0, 12.0, 121)
    f = lambda s: np.exp(-5 * s**2)
    g = lambda s: np.exp(-10 * s**2)
    h1 = f(x - 3) + f(x + 3) + g(x - 1) + g(x + 1)
    got = O.exact_solution(
        "wave1d_neumann_benchmark", np.column_stack([np.zeros_like(x), x])
    )
    assert np.max(np.abs(got - h1)) <= 1e-15


def test_wave1d_truth_neumann_derivative_at_origin(rng):
    # analytic x-derivative of the mirror formula collapses pairwise at x = 0
    fp = lambda s: -10.0 * s * np.exp(-5 * s**2)
    gp = lambda s: -20.0 * s * np.exp(-10 * s**2)
    for t in rng.uniform(0, 4, size=25):
        du = (
            fp(t - 3) + fp(3 - t)
            + 0.5 * (gp(t - 1) + gp(-t - 1) + gp(t + 1) + gp(1 - t))
        )
        assert abs(du) <= 1e-10


def test_wave1d_truth_fd_residual(rng):
    h = 1e-3
    worst = 0.0
    for _ in range(100):
        p = np.array([rng.uniform(0.2, 3.8), rng.uniform(0.5, 7.5)])
        u = lambda q: O.exact_solution("wave1d_neumann_benchmark", q[None, :])[0]

        def d2(i):
            e = np.zeros(2)
            e[i] = 1.0
            return (
                -u(p + 2 * h * e) + 16 * u(p + h * e) - 30 * u(p)
                + 16 * u(p - h * e) - u(p - 2 * h * e)
            ) / (12 * h * h)

        worst = max(worst, abs(d2(0) - d2(1)))
    assert worst <= 1e-5


def test_bessel_truth_t0_reduction(rng):
    pts = rng.uniform(0, 4, size=(30, 2))
    full = np.column_stack([np.zeros(30), pts])
    want = O.bessel_initial_field(pts)
    got = O.exact_solution("wave2d_bessel_benchmark", full)
    assert np.max(np.abs(got - want)) <= 1e-14


def test_bessel_truth_neumann_and_pde(rng):
    h = 1e-3
    u = lambda q: O.exact_solution("wave2d_bessel_benchmark", q[None, :])[0]
    # Neumann at x = 0: one-sided 4th-order stencil stays in-domain
    for _ in range(20):
        p = np.array([rng.uniform(0, 2), 0.0, rng.uniform(0.5, 3.5)])
        c = [-25.0, 48.0, -36.0, 16.0, -3.0]
        du = sum(
            ci * u(p + np.array([0.0, k * h, 0.0])) for k, ci in enumerate(c)
        ) / (12 * h)
        assert abs(du) <= 1e-8
    # interior wave residual
    worst = 0.0
    for _ in range(25):
        p = np.array([rng.uniform(0.2, 2), rng.uniform(0.5, 3.5), rng.uniform(0.5, 3.5)])

        def d2(i):
            e = np.zeros(3)
            e[i] = 1.0
            return (
                -u(p + 2 * h * e) + 16 * u(p + h * e) - 30 * u(p)
                + 16 * u(p - h * e) - u(p - 2 * h * e)
            ) / (12 * h * h)

        scale = max(1.0, abs(u(p)))
        worst = max(worst, abs(d2(0) - d2(1) - d2(2)) / scale)
    assert worst <= 1e-5


def test_wave3d_truth_t0_and_residual(rng):
    # rest release: the value at t = 0 is the four-bump even extension
    pts = np.column_stack(
        [np.zeros(20), rng.uniform(-1, 3, 20), rng.uniform(0, 2, 20),
         rng.uniform(0, 2, 20)]
    )
    got = O.exact_solution("wave3d_images_benchmark", pts)
    want = np.zeros(20)
    for c in O.WAVE3D_IMAGE_CENTERS:
        d2 = ((pts[:, 1:] - np.asarray(c)) ** 2).sum(axis=1)
        want += np.exp(-O.WAVE3D_SHARPNESS * d2)
    assert np.max(np.abs(got - want)) <= 1e-12

    # the construction is validated by a wave-operator residual check
    h, worst = 1e-3, 0.0
    u = lambda q: O.exact_solution("wave3d_images_benchmark", q[None, :])[0]
    for _ in range(40):
        p = np.array([rng.uniform(0.1, 2), rng.uniform(-1, 3),
                      rng.uniform(0.3, 2), rng.uniform(0.3, 2)])

        def d2(i):
            e = np.zeros(4)
            e[i] = 1.0
            return (
                -u(p + 2 * h * e) + 16 * u(p + h * e) - 30 * u(p)
                + 16 * u(p - h * e) - u(p - 2 * h * e)
            ) / (12 * h * h)

        worst = max(worst, abs(d2(0) - d2(1) - d2(2) - d2(3)))
    assert worst <= 1e-5


def test_exact_solution_domain_gate():
    with pytest.raises(DomainError):
        O.exact_solution("wave1d_neumann_benchmark", np.array([[0.0, -1.0]]))
    with pytest.raises(DomainError):
        O.exact_solution("wave3d_images_benchmark", np.array([[0.0, 0.0, -0.5, 0.5]]))
    with pytest.raises(KeyError):
        O.exact_solution("bogus", np.array([[0.0, 0.0]]))


# --- separation-of-variables series ----------------------------------------

def test_series_orthogonality_single_mode():
    L = 4.0
    init = O.FieldFn(
        lambda pts: np.sin(np.pi * np.atleast_2d(pts)[:, 0] / L)
        * np.sin(np.pi * np.atleast_2d(pts)[:, 1] / L),
        None,
        dim=2,
    )
    series = O.RectangleWaveSeries(init, L, 6)
    assert series.coeffs[0, 0] == pytest.approx(1.0, abs=1e-10)
    rest = series.coeffs.copy()
    rest[0, 0] = 0.0
    assert np.max(np.abs(rest)) <= 1e-10


def test_series_energy_constant_parseval():
    series = O.RectangleWaveSeries(O.gaussian_bump((1.0, 1.0), 10.0), 4.0, 10)
    x, w = np.polynomial.legendre.leggauss(96)
    xs, ws = 2.0 * (x + 1.0), 2.0 * w
    XX, YY = np.meshgrid(xs, xs, indexing="ij")
    grid = np.column_stack([XX.ravel(), YY.ravel()])
    energies = []
    for t in (0.0, 0.7, 1.9):
        pts = np.column_stack([np.full(len(grid), t), grid])
        dens = (
            series(pts, (1, 0, 0)) ** 2
            + series(pts, (0, 1, 0)) ** 2
            + series(pts, (0, 0, 1)) ** 2
        )
        energies.append(np.einsum("i,j,ij->", ws, ws, dens.reshape(96, 96)))
    energies = np.asarray(energies)
    assert np.max(np.abs(energies - energies[0])) <= 1e-10 * energies[0]


def test_series_reproduces_initial_bump():
    series = O.RectangleWaveSeries(O.gaussian_bump((1.0, 1.0), 10.0), 4.0, 40)
    xs = np.linspace(0, 4, 41)
    XX, YY = np.meshgrid(xs, xs, indexing="ij")
    grid = np.column_stack([XX.ravel(), YY.ravel()])
    pts = np.column_stack([np.zeros(len(grid)), grid])
    bump = O.gaussian_bump((1.0, 1.0), 10.0)
    assert np.max(np.abs(series(pts) - bump(grid))) <= 1e-4


def test_series_converges_in_cutoff():
    # centered, spectrally resolved bump: modes above j = 20 sit below 1e-6
    bump = O.gaussian_bump((2.0, 2.0), 4.0)
    s20 = O.RectangleWaveSeries(bump, 4.0, 20)
    s40 = O.RectangleWaveSeries(bump, 4.0, 40)
    xs = np.linspace(0.3, 3.7, 9)
    XX, YY = np.meshgrid(xs, xs, indexing="ij")
    grid = np.column_stack([XX.ravel(), YY.ravel()])
    for t in (0.0, 1.1):
        pts = np.column_stack([np.full(len(grid), t), grid])
        assert np.max(np.abs(s20(pts) - s40(pts))) <= 1e-6


def test_fourier_rectangle_oracle_wrapper():
    val = O.fourier_rectangle_oracle(
        O.gaussian_bump((1.0, 1.0), 10.0), 4.0, 30, np.array([0.0, 1.0, 1.0])
    )
    assert val == pytest.approx(1.0, abs=1e-3)
