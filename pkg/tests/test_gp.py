"""Regression engine contracts: likelihood closed forms, gradients,
posterior algebra, prediction, sampling, training, checkpoints."""
import numpy as np
import pytest

from bepgp.errors import EmptyDataset, TrainingError
from bepgp.families import catalog_lookup, column_log_scales, enumerate_discrete
from bepgp.gp import (
    Dataset,
    ModelState,
    Observation,
    Predictor,
    TrainConfig,
    assemble_design,
    fit,
    load_checkpoint,
    nlml,
    nlml_grad,
    posterior_coeffs,
    predict,
    sample,
    save_checkpoint,
)


def unit_model(y=2.0, var=1.0, noise=0.01, mode="complex"):
    data = Dataset([[0.5, 0.5]], [[0, 0]], [y])
    model = ModelState(
        "wave1d_free", np.array([[0.0 + 0j]]), np.array([np.log(var)]),
        float(np.log(noise)), np.array([0.0]), fit_mode=mode,
    )
    return model, data


def test_nlml_scalar_closed_form():
    y, var, noise = 2.0, 1.3, 0.01
    model, data = unit_model(y, var, noise)
    A = noise / var + 1.0
    expected = (y**2 / noise) * (1 - 1 / A) + np.log(var) + np.log(A)
    assert nlml(model, data) == pytest.approx(expected, rel=1e-7)


def test_nlml_zero_data_reduces_to_logdets():
    model, data = unit_model(0.0, 1.3, 0.01)
    A = 0.01 / 1.3 + 1.0
    # M = N = 1 so the (M - N) log s0 term drops
    assert nlml(model, data) == pytest.approx(np.log(1.3) + np.log(A), rel=1e-7)


def test_posterior_scalar_closed_form():
    y, var, noise = 2.0, 1.0, 0.01
    model, data = unit_model(y, var, noise)
    C = posterior_coeffs(model, data)
    assert C[0] == pytest.approx(y / (noise / var + 1.0), rel=1e-7)


def test_posterior_zero_data_is_zero():
    model, data = unit_model(0.0)
    assert np.allclose(posterior_coeffs(model, data), 0.0)


def test_log_var_gradient_vanishes_at_stationary_point():
    y, noise = 2.0, 0.01
    model, data = unit_model(y, y**2 - noise, noise)
    g = nlml_grad(model, data)
    assert abs(g.log_var[0]) < 1e-8


def _random_instance(name, M, N, seed, mode="complex"):
    fam = catalog_lookup(name)
    r = np.random.default_rng(seed)
    if fam.kind == "discrete":
        thetas = enumerate_discrete(fam, 3)[:N]
    else:
        thetas = 0.3 * r.standard_normal((N, fam.free_params)) + 1j * r.standard_normal(
            (N, fam.free_params)
        )
    pts = fam.sample_interior(r, M)
    derivs = np.zeros((M, fam.dim), int)
    derivs[M // 2 :, 0] = 1
    data = Dataset(pts, derivs, r.standard_normal(M))
    model = ModelState(
        name, thetas, 0.1 * r.standard_normal(len(thetas)), float(np.log(0.05)),
        np.zeros(len(thetas)), length=fam.length, fit_mode=mode,
    )
    model.log_scales = column_log_scales(fam, model.thetas, data.points, data.derivs)
    return fam, model, data


def _fd_gradient_gap(fam, model, data, h=1e-6):
    g = nlml_grad(model, data)
    fd, an = [], []
    if fam.kind == "continuous":
        for j in range(model.n_basis):
            for l in range(fam.free_params):
                for part, block in ((1.0, g.theta_re), (1j, g.theta_im)):
                    m = model.copy()
                    m.thetas[j, l] += part * h
                    Lp = nlml(m, data)
                    m = model.copy()
                    m.thetas[j, l] -= part * h
                    Lm = nlml(m, data)
                    fd.append((Lp - Lm) / (2 * h))
                    an.append(block[j, l])
    for j in range(model.n_basis):
        m = model.copy()
        m.log_var[j] += h
        Lp = nlml(m, data)
        m = model.copy()
        m.log_var[j] -= h
        Lm = nlml(m, data)
        fd.append((Lp - Lm) / (2 * h))
        an.append(g.log_var[j])
    m = model.copy()
    m.log_noise += h
    Lp = nlml(m, data)
    m = model.copy()
    m.log_noise -= h
    Lm = nlml(m, data)
    fd.append((Lp - Lm) / (2 * h))
    an.append(g.log_noise)
    fd, an = np.asarray(fd), np.asarray(an)
    denom = np.maximum(np.abs(fd), 1e-6 * np.abs(fd).max())
    return float(np.max(np.abs(an - fd) / denom))


@pytest.mark.parametrize(
    "name,mode",
    [
        ("wave1d_halfline_neumann", "complex"),
        ("heat2d_wedge90_dirichlet", "complex"),
        ("wave2d_rectangle_dirichlet", "complex"),
        ("laplace2d_free", "real_part"),
        ("wave2d_free", "real_part"),
    ],
)
def test_gradient_matches_finite_differences(name, mode):
    fam, model, data = _random_instance(name, M=24, N=4, seed=5, mode=mode)
    assert _fd_gradient_gap(fam, model, data) <= 1e-4


def test_discrete_family_theta_gradient_block_empty():
    fam, model, data = _random_instance("wave1d_slab_dirichlet", 20, 4, 0)
    g = nlml_grad(model, data)
    assert g.theta_re.shape == (4, 0) and g.theta_im.shape == (4, 0)
    assert g.log_var.shape == (4,)


def test_assemble_design_matches_scalar_eval(rng):
    from bepgp.families import eval_basis

    fam, model, data = _random_instance("wave2d_wedge90_neumann", 12, 3, 2)
    dm = assemble_design(fam, model, data, refresh_scales=True)
    for h in range(len(data)):
        for j in range(3):
            want = eval_basis(
                fam, model.thetas[j], data.points[h], tuple(data.derivs[h]),
                log_scale=dm.log_scales[j],
            )
            assert dm.values[h, j] == pytest.approx(want, rel=1e-14)


def test_assemble_design_boundary_rows_vanish(rng):
    fam = catalog_lookup("wave2d_halfplane_dirichlet")
    thetas = fam.sample_theta(rng, 4)
    pts = fam.sample_boundary(rng, 8, fam.boundary_ops[0])
    data = Dataset(pts, np.zeros((8, 3), int), np.zeros(8))
    model = ModelState(fam.name, thetas, np.zeros(4), np.log(1e-4), np.zeros(4))
    dm = assemble_design(fam, model, data)
    assert np.max(np.abs(dm.values)) < 1e-10


def test_nlml_invariant_under_column_rescaling():
    # evaluated at tiny jitter: the regularizer tracks the diagonal scale
    fam, model, data = _random_instance("wave2d_wedge90_neumann", 20, 5, 3)
    L0 = nlml(model, data, jitter=1e-14)
    shift = np.linspace(-1.0, 2.0, model.n_basis)
    m = model.copy()
    m.log_scales = m.log_scales + shift  # rescale columns by exp(shift)
    m.log_var = m.log_var + 2.0 * shift  # and compensate the weight priors
    assert nlml(m, data, jitter=1e-14) == pytest.approx(L0, abs=1e-8)


def test_posterior_satisfies_normal_equations():
    fam, model, data = _random_instance("heat2d_wedge90_neumann", 30, 6, 4)
    dm = assemble_design(fam, model, data, refresh_scales=False)
    B = dm.values
    C = posterior_coeffs(model, data, jitter=1e-14)
    s0 = np.exp(model.log_noise)
    A = model.n_basis * s0 * np.diag(np.exp(-model.log_var)) + B.conj().T @ B
    r = B.conj().T @ data.values
    assert np.linalg.norm(A @ C - r) <= 1e-10 * np.linalg.norm(r)


def test_interpolation_limit():
    # N = M, invertible design, vanishing noise -> B C reproduces Y
    fam, model, data = _random_instance("wave1d_halfline_neumann", 6, 6, 6)
    model.log_noise = float(np.log(1e-12))
    C = posterior_coeffs(model, data)
    dm = assemble_design(fam, model, data, refresh_scales=False)
    assert np.linalg.norm(dm.values @ C - data.values) <= 1e-5


def test_predict_linear_in_coeffs(rng):
    fam, model, data = _random_instance("wave2d_wedge90_mixed", 10, 4, 7)
    pts = fam.sample_interior(rng, 5)
    c1 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    c2 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    a = 1.7
    v1, _ = predict(model, c1, pts)
    v2, _ = predict(model, c2, pts)
    v12, _ = predict(model, a * c1 + c2, pts)
    assert np.allclose(v12, a * v1 + v2, atol=1e-12 * max(1, np.abs(v12).max()))


def test_predict_zero_coeffs():
    _, model, data = _random_instance("wave2d_free", 5, 3, 8)
    vals, imag = predict(model, np.zeros(3), data.points)
    assert np.all(vals == 0.0) and imag == 0.0


def test_predict_training_point_interpolation():
    fam, model, data = _random_instance("wave1d_halfline_neumann", 6, 6, 9)
    model.log_noise = float(np.log(1e-12))
    C = posterior_coeffs(model, data)
    vals, _ = predict(model, C, data.points[:3])
    # rows 0..2 carry derivative order 0 in this instance
    assert np.all(data.derivs[:3].sum(axis=1) == 0)
    assert np.allclose(vals, data.values[:3], atol=1e-6)


def test_sample_zero_variance_is_zero(rng):
    _, model, data = _random_instance("wave2d_wedge90_dirichlet", 8, 3, 10)
    model.log_var = np.full(3, -1e6)
    draws = sample(model, data.points, 50, seed=0, mode="prior")
    assert np.max(np.abs(draws)) == 0.0


def test_prior_sample_variance_matches_formula(rng):
    fam, model, data = _random_instance("wave2d_wedge90_dirichlet", 6, 4, 11)
    pts = fam.sample_interior(rng, 3)
    draws = sample(model, pts, 200_000, seed=1, mode="prior")
    from bepgp.families import evaluate_design

    B = evaluate_design(fam, model.thetas, pts, np.zeros((3, 3), int),
                        model.log_scales)
    want = (np.exp(model.log_var)[None, :] * np.abs(B) ** 2).sum(axis=1)
    got = draws.var(axis=0)
    # variance of the sample variance ~ 2 var^2 / n
    se = want * np.sqrt(2.0 / draws.shape[0])
    assert np.all(np.abs(got - want) <= 3.0 * se)


def test_samples_of_dirichlet_family_vanish_on_boundary(rng):
    fam = catalog_lookup("wave2d_wedge90_dirichlet")
    thetas = fam.sample_theta(rng, 5)
    model = ModelState(fam.name, thetas, np.zeros(5), np.log(1e-4), np.zeros(5))
    bpts = fam.sample_boundary(rng, 12, fam.boundary_ops[0])
    ipts = fam.sample_interior(rng, 12)
    prior = sample(model, np.vstack([bpts, ipts]), 20, seed=2, mode="prior")
    scale = np.abs(prior).max()
    assert np.abs(prior[:, :12]).max() <= 1e-10 * scale
    data = Dataset(ipts, np.zeros((12, 3), int), rng.standard_normal(12))
    post = sample(model, np.vstack([bpts, ipts]), 20, seed=3, mode="posterior",
                  data=data)
    assert np.abs(post[:, :12]).max() <= 1e-10 * max(1.0, np.abs(post).max())


def test_fit_zero_epochs_returns_initial_state():
    fam = catalog_lookup("wave1d_free")
    data = Dataset([[0.0, 1.0], [0.0, 2.0]], np.zeros((2, 2), int), [1.0, 2.0])
    cfg = TrainConfig(schedule=((0, 0.1),), seed=42)
    model = fit(fam, data, 5, cfg)
    rng = np.random.default_rng(42)
    span = data.points.max(axis=0) - data.points.min(axis=0)
    diam = float(np.linalg.norm(span))
    want = (0.5 / diam) * rng.standard_normal((5, 1)) + 1j * (
        np.pi * 20.0 / diam
    ) * rng.standard_normal((5, 1))
    assert np.allclose(model.thetas, want)
    assert np.all(model.log_var == 0.0)


def test_fit_recovers_single_heat_mode():
    t = np.linspace(0, 1, 9)
    x = np.linspace(0, np.pi, 13)
    T, X = np.meshgrid(t, x, indexing="ij")
    pts = np.column_stack([T.ravel(), X.ravel()])
    vals = np.exp(-pts[:, 0]) * np.sin(pts[:, 1])
    data = Dataset(pts, np.zeros_like(pts, dtype=int), vals)
    cfg = TrainConfig(schedule=((300, 0.1), (300, 0.01), (100, 0.001)), seed=1)
    model = fit("heat1d_halfline_dirichlet", data, 8, cfg)
    C = posterior_coeffs(model, data)
    pred, _ = predict(model, C, pts)
    rmse = float(np.sqrt(np.mean((pred - vals) ** 2)))
    assert rmse <= 1e-4


def test_fit_discrete_trains_variances_only():
    fam = catalog_lookup("wave1d_slab_dirichlet")
    x = np.linspace(0, np.pi, 21)
    pts = np.column_stack([np.zeros_like(x), x])
    vals = np.sin(x)
    data = Dataset(pts, np.zeros((21, 2), int), vals)
    cfg = TrainConfig(schedule=((50, 0.05),), seed=0, discrete_cutoff=3)
    model = fit(fam, data, None, cfg)
    assert model.n_basis == 6
    assert np.all(model.thetas == enumerate_discrete(fam, 3))
    assert not np.allclose(model.log_var, 0.0)  # variances moved


def test_fit_deterministic_given_seed():
    data = Dataset([[0.0, 1.0], [0.0, 2.0], [0.0, 3.0]], np.zeros((3, 2), int),
                   [0.5, -0.2, 0.1])
    cfg = TrainConfig(schedule=((40, 0.1),), seed=11)
    m1 = fit("wave1d_halfline_neumann", data, 4, cfg)
    m2 = fit("wave1d_halfline_neumann", data, 4, cfg)
    assert np.array_equal(m1.thetas, m2.thetas)
    assert np.array_equal(m1.log_var, m2.log_var)
    assert m1.log_noise == m2.log_noise


def test_dataset_validation():
    with pytest.raises(EmptyDataset):
        Dataset.from_observations([])
    with pytest.raises(ValueError):
        Observation((0.0, 0.0), (0, 0), float("nan"))
    with pytest.raises(ValueError):
        Observation((0.0, 0.0), (0, 0), 1.0, group="bogus")


def test_checkpoint_roundtrip(tmp_path):
    _, model, data = _random_instance("wave2d_halfplane_neumann", 10, 3, 12)
    cfg = TrainConfig(seed=3)
    path = tmp_path / "model.json"
    save_checkpoint(model, path, cfg)
    loaded = load_checkpoint(path)
    assert loaded.family == model.family
    assert np.allclose(loaded.thetas, model.thetas)
    assert np.allclose(loaded.log_var, model.log_var)
    assert np.allclose(loaded.log_scales, model.log_scales)
    assert loaded.log_noise == model.log_noise
    assert loaded.fit_mode == model.fit_mode
    # predictions agree
    pts = data.points[:4]
    C = np.arange(3) + 0.5j
    assert np.allclose(predict(model, C, pts)[0], predict(loaded, C, pts)[0])


def test_predictor_term_scale_positive(rng):
    fam, model, data = _random_instance("wave2d_wedge90_dirichlet", 8, 3, 13)
    C = posterior_coeffs(model, data)
    p = Predictor(model, C)
    assert p.term_scale(data.points) > 0.0
