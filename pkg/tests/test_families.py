"""Catalog contracts: closed forms, exactness, derivatives, enumeration."""
import numpy as np
import pytest

from bepgp import families as F
from bepgp.errors import BranchSingularity, ContinuousFamily, DiscreteFamily, Overflow

ALL_IDS = F.family_ids()
CONTINUOUS = [n for n in ALL_IDS if F.catalog_lookup(n).kind == "continuous"]
DISCRETE = [n for n in ALL_IDS if F.catalog_lookup(n).kind == "discrete"]


def test_catalog_is_total():
    assert len(ALL_IDS) == 21
    for name in ALL_IDS:
        fam = F.catalog_lookup(name)
        assert fam.name == name
    with pytest.raises(KeyError):
        F.catalog_lookup("wave9d_mystery")


def test_catalog_term_counts():
    assert len(F.catalog_lookup("heat1d_halfline_dirichlet").terms) == 2
    assert F.catalog_lookup("heat1d_halfline_dirichlet").signs == (1.0, -1.0)
    assert len(F.catalog_lookup("wave3d_two_neumann_planes").terms) == 8
    assert all(s == 1.0 for s in F.catalog_lookup("wave3d_two_neumann_planes").signs)
    assert len(F.catalog_lookup("wave2d_wedge45_neumann").terms) == 16
    assert len(F.catalog_lookup("wave2d_wedge90_mixed").terms) == 4
    rect = F.catalog_lookup("wave2d_rectangle_dirichlet")
    assert rect.kind == "discrete" and rect.free_params == 3


def test_eval_basis_pinned_values():
    fam = F.catalog_lookup("heat1d_halfline_dirichlet")
    # On the pinned edge the two mirror terms cancel exactly.
    assert F.eval_basis(fam, [1.0], (0.0, 0.0)) == 0
    val = F.eval_basis(fam, [1.0], (0.0, 1.0))
    assert val == pytest.approx(np.e - 1 / np.e, abs=1e-12)
    assert val == pytest.approx(2.350402387, abs=1e-9)


def test_grad_params_pinned_values():
    fam = F.catalog_lookup("heat1d_halfline_dirichlet")
    g = F.grad_params(fam, [1.0], (0.0, 1.0))
    assert g[0] == pytest.approx(np.e + 1 / np.e, abs=1e-12)
    assert g[0] == pytest.approx(3.086161270, abs=1e-9)

    fam = F.catalog_lookup("wave1d_free")
    g = F.grad_params(fam, [0.0], (1.0, 1.0))
    assert g[0] == pytest.approx(2.0, abs=1e-14)


def test_grad_params_rejects_discrete():
    fam = F.catalog_lookup("wave1d_slab_dirichlet")
    with pytest.raises(DiscreteFamily):
        F.grad_params(fam, [1.0, 1.0], (0.5, 0.5))


def test_neumann_halfline_derivative_vanishes():
    fam = F.catalog_lookup("wave1d_halfline_neumann")
    for theta in ([0.3 + 1.1j], [2.0 - 0.4j]):
        for t in (0.0, 0.7, 2.0):
            assert F.eval_basis(fam, theta, (t, 0.0), (0, 1)) == 0


@pytest.mark.parametrize("name", ALL_IDS)
def test_variety_membership(name, rng):
    fam = F.catalog_lookup(name)
    thetas = fam.sample_theta(rng, 1000)
    worst = max(F.variety_residual(fam, th) for th in thetas)
    assert worst <= 1e-12


def test_variety_residual_detects_fault():
    fam = F.catalog_lookup("heat2d_wedge90_neumann")
    assert F.variety_residual(fam, [0.5, -1.2j]) <= 1e-14
    z = fam.frequencies(np.array([[0.5, -1.2j]]))
    z = z.copy()
    z[..., 0] += 1.0  # corrupt the time frequency off the variety
    resid = np.abs(fam.variety_values(z)) / (1 + np.linalg.norm(z, axis=-1) ** 2)
    assert np.all(resid > 1e-3)


@pytest.mark.parametrize("name", ALL_IDS)
def test_boundary_annihilation(name, rng):
    fam = F.catalog_lookup(name)
    for bc in fam.boundary_ops:
        for th in fam.sample_theta(rng, 10):
            for x in fam.sample_boundary(rng, 10, bc):
                assert F.boundary_residual_element(fam, th, x, bc) <= 1e-10


@pytest.mark.parametrize("name", ALL_IDS)
def test_pde_exactness_analytic_and_fd(name, rng):
    fam = F.catalog_lookup(name)
    h = 1e-3
    for th in fam.sample_theta(rng, 5):
        for x in fam.sample_interior(rng, 4, margin=0.01):
            scale = F.term_magnitude(fam, th, x)
            res = fam.apply_operator(lambda d: F.eval_basis(fam, th, x, d), x)
            assert abs(res) / scale <= 1e-10
            res_fd = _fd_operator(fam, th, x, h)
            assert abs(res_fd) / scale <= 1e-5


def _fd_operator(fam, th, x, h):
    def val(q):
        return F.eval_basis(fam, th, q)

    def d2(i):
        e = np.zeros(fam.dim)
        e[i] = 1.0
        return (
            -val(x + 2 * h * e) + 16 * val(x + h * e) - 30 * val(x)
            + 16 * val(x - h * e) - val(x - 2 * h * e)
        ) / (12 * h * h)

    def d1(i):
        e = np.zeros(fam.dim)
        e[i] = 1.0
        return (
            val(x - 2 * h * e) - 8 * val(x - h * e)
            + 8 * val(x + h * e) - val(x + 2 * h * e)
        ) / (12 * h)

    if fam.variety == "heat":
        return d1(0) - sum(d2(i) for i in range(1, fam.dim))
    if fam.variety == "wave":
        return d2(0) - sum(d2(i) for i in range(1, fam.dim))
    return d2(0) + d2(1)


@pytest.mark.parametrize("name", CONTINUOUS)
def test_grad_params_matches_finite_differences(name, rng):
    fam = F.catalog_lookup(name)
    h = 1e-6
    for th in fam.sample_theta(rng, 3):
        x = fam.sample_interior(rng, 1)[0]
        g = F.grad_params(fam, th, x)
        for l in range(fam.free_params):
            for step in (h, 1j * h):
                tp, tm = th.copy(), th.copy()
                tp[l] += step
                tm[l] -= step
                fd = (F.eval_basis(fam, tp, x) - F.eval_basis(fam, tm, x)) / (2 * h)
                want = g[l] if step == h else 1j * g[l]
                assert abs(fd - want) <= 1e-5 * max(1.0, abs(want))


@pytest.mark.parametrize("name", ALL_IDS)
def test_derivative_consistency_first_order(name, rng):
    fam = F.catalog_lookup(name)
    h = 1e-6
    th = fam.sample_theta(rng, 1)[0]
    for x in fam.sample_interior(rng, 3, margin=0.01):
        for i in range(fam.dim):
            d = tuple(1 if j == i else 0 for j in range(fam.dim))
            e = np.zeros(fam.dim)
            e[i] = h
            fd = (F.eval_basis(fam, th, x + e) - F.eval_basis(fam, th, x - e)) / (2 * h)
            an = F.eval_basis(fam, th, x, d)
            scale = max(abs(an), F.term_magnitude(fam, th, x))
            assert abs(fd - an) <= 1e-6 * scale


def test_branch_guard():
    fam = F.catalog_lookup("wave2d_free")
    with pytest.raises(BranchSingularity):
        F.eval_basis(fam, [1.0, 1.0j], (0.5, 0.5, 0.5))  # a^2 + b^2 = 0


def test_overflow_guard():
    fam = F.catalog_lookup("wave1d_free")
    with pytest.raises(Overflow):
        F.eval_basis(fam, [400.0], (1.0, 1.0))
    # the column-scale convention absorbs the same exponent
    val = F.eval_basis(fam, [400.0], (1.0, 1.0), log_scale=800.0)
    assert np.isfinite(val)


def test_enumerate_discrete_counts():
    slab = F.catalog_lookup("wave1d_slab_dirichlet")
    assert len(F.enumerate_discrete(slab, 3)) == 6
    rect = F.catalog_lookup("wave2d_rectangle_dirichlet")
    assert len(F.enumerate_discrete(rect, 2)) == 8
    tri = F.catalog_lookup("wave2d_triangle_dirichlet")
    modes = F.enumerate_discrete(tri, 2)
    assert len(modes) == 2 and np.all(modes[:, 0] < modes[:, 1])
    with pytest.raises(ContinuousFamily):
        F.enumerate_discrete(F.catalog_lookup("wave2d_free"), 2)


def test_triangle_antisymmetric_diagonal_mode_vanishes():
    # j = k antisymmetrizes to zero, hence its exclusion from the lattice
    fam = F.catalog_lookup("wave2d_triangle_dirichlet")
    z = fam.frequencies(np.array([[2.0, 2.0, 1.0]]))
    pts = np.array([[0.3, 1.0, 0.5], [1.0, 3.0, 2.0]])
    for x in pts:
        vals = np.exp(z[0] @ x)
        assert abs(np.sum(np.asarray(fam.signs) * vals)) < 1e-14


@pytest.mark.parametrize("name", DISCRETE)
def test_discrete_families_periodic(name, rng):
    fam = F.catalog_lookup(name)
    th = fam.sample_theta(rng, 1)[0]
    x = fam.sample_interior(rng, 1)[0]
    for i in range(1, fam.dim):
        shift = np.zeros(fam.dim)
        shift[i] = 2.0 * fam.length
        a = F.eval_basis(fam, th, x)
        b = F.eval_basis(fam, th, x + shift)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_length_override_rescales_modes():
    fam = F.catalog_lookup("wave1d_slab_dirichlet", length=2.0)
    assert fam.length == 2.0
    # mode j = 1 vanishes at both ends of (0, 2)
    for x in (0.0, 2.0):
        assert abs(F.eval_basis(fam, [1.0, 1.0], (0.7, x))) < 1e-14
    assert fam.boundary_ops[1].offset == 2.0


def test_design_batch_matches_scalar(rng):
    fam = F.catalog_lookup("wave2d_wedge90_mixed")
    thetas = fam.sample_theta(rng, 4)
    pts = fam.sample_interior(rng, 6)
    derivs = np.zeros((6, 3), dtype=int)
    derivs[3:, 0] = 1
    B = F.evaluate_design(fam, thetas, pts, derivs)
    for m in range(6):
        for j in range(4):
            d = tuple(derivs[m])
            assert B[m, j] == F.eval_basis(fam, thetas[j], pts[m], d)
