"""Regression engine over a basis family: design assembly, marginal
likelihood and gradient, training, posterior coefficients, prediction,
and prior/posterior sampling.

The model places independent complex normal priors with variances s_j^2 on
the weights of N basis elements, plus observation noise s0^2.  Training
minimizes

    L = (|Y|^2 - Y^H B A^{-1} B^H Y) / s0^2 + (M - N) log s0^2
        + log det Sigma + log det A,          A = N s0^2 Sigma^{-1} + B^H B

over the element parameters (continuous families only), log-variances, and
log-noise.  The posterior weight mean is C = A^{-1} B^H Y with coefficient
covariance s0^2 A^{-1}.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from . import families as fam_mod
from .errors import EmptyDataset, NotPD, TrainingError
from .families import catalog_lookup, column_log_scales, enumerate_discrete

OBS_GROUPS = ("initial_value", "initial_velocity", "boundary_collocation", "interior")


@dataclass(frozen=True)
class Observation:
    """One scalar observation of (a derivative of) the field at a point."""

    point: tuple
    deriv: tuple
    value: float
    group: str = "initial_value"

    def __post_init__(self):
        if self.group not in OBS_GROUPS:
            raise ValueError(f"unknown observation group {self.group!r}")
        if not np.isfinite(self.value):
            raise ValueError("observation value must be finite")


class Dataset:
    """Observations in array form: points (M, n), derivs (M, n), values (M,).

    `noise_scale` holds per-row noise multipliers (noise sd is s0 * scale);
    rows with scale != 1 are whitened before entering the likelihood, which
    reduces the heteroscedastic case to the homoscedastic formula exactly.
    """

    def __init__(self, points, derivs, values, groups=None, noise_floor=0.0,
                 noise_scale=None):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.derivs = np.atleast_2d(np.asarray(derivs, dtype=int))
        self.values = np.asarray(values, dtype=float).ravel()
        if len(self.points) == 0:
            raise EmptyDataset("dataset has no observations")
        if not (len(self.points) == len(self.derivs) == len(self.values)):
            raise ValueError("points, derivs, values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("observation values must be finite")
        self.groups = (
            np.asarray(groups) if groups is not None
            else np.full(len(self.values), "initial_value")
        )
        self.noise_floor = float(noise_floor)
        self.noise_scale = (
            np.ones(len(self.values)) if noise_scale is None
            else np.asarray(noise_scale, dtype=float)
        )

    @classmethod
    def from_observations(cls, observations, noise_floor=0.0, noise_scale=None):
        obs = list(observations)
        if not obs:
            raise EmptyDataset("dataset has no observations")
        return cls(
            [o.point for o in obs],
            [o.deriv for o in obs],
            [o.value for o in obs],
            [o.group for o in obs],
            noise_floor=noise_floor,
            noise_scale=noise_scale,
        )

    def __len__(self):
        return len(self.values)


@dataclass
class ModelState:
    """Trained state: element parameters, log-variances, log-noise, scales.

    `log_scales` are the per-column overflow-control scales in log form
    (design entries are divided by exp(log_scales[j])).  `use_n_factor`
    keeps or drops the explicit factor N in A = N s0^2 Sigma^{-1} + B^H B.

    `fit_mode` selects the observation model.  "complex" applies the
    likelihood to the N-column complex design verbatim, which implicitly
    asks the imaginary part of B C to vanish on the data.  "real_part"
    augments the design with the conjugate columns (2N weights, variances
    duplicated) so only Re(B C) is fit; families whose elements are
    holomorphic in a complex coordinate (the Laplace atoms) can only match
    real-valued data in this mode.
    """

    family: str
    thetas: np.ndarray
    log_var: np.ndarray
    log_noise: float
    log_scales: np.ndarray
    use_n_factor: bool = True
    length: Optional[float] = None
    fit_mode: str = "complex"

    def __post_init__(self):
        self.thetas = np.atleast_2d(np.asarray(self.thetas))
        self.log_var = np.asarray(self.log_var, dtype=float).ravel()
        self.log_scales = np.asarray(self.log_scales, dtype=float).ravel()
        if len(self.log_var) != len(self.thetas) or len(self.log_scales) != len(self.thetas):
            raise ValueError("thetas, log_var, log_scales must have equal length")

    @property
    def n_basis(self):
        return len(self.thetas)

    def resolve_family(self):
        return catalog_lookup(self.family, length=self.length)

    def copy(self):
        return ModelState(
            self.family, self.thetas.copy(), self.log_var.copy(),
            float(self.log_noise), self.log_scales.copy(),
            self.use_n_factor, self.length, self.fit_mode,
        )


@dataclass
class TrainConfig:
    """Full-batch training schedule; learning rates per stage."""

    schedule: tuple = ((10000, 0.1), (10000, 0.01), (1000, 0.001))
    optimizer: str = "adam"
    seed: int = 0
    jitter: float = 1e-10
    discrete_cutoff: Optional[int] = None
    use_n_factor: bool = True
    init_log_noise: float = float(np.log(1e-4))
    fit_mode: str = "complex"

    def __post_init__(self):
        self.schedule = tuple((int(e), float(lr)) for e, lr in self.schedule)
        if any(e < 0 for e, _ in self.schedule):
            raise ValueError("epochs must be >= 0")
        if any(lr <= 0 for _, lr in self.schedule):
            raise ValueError("learning rates must be > 0")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.fit_mode not in ("complex", "real_part"):
            raise ValueError(f"unknown fit mode {self.fit_mode!r}")

    def scaled(self, factor):
        """Schedule with epoch counts multiplied by `factor` (>= 0)."""
        sched = tuple((max(0, int(round(e * factor))), lr) for e, lr in self.schedule)
        return replace(self, schedule=sched)

    def digest(self):
        payload = json.dumps(
            {
                "schedule": self.schedule,
                "optimizer": self.optimizer,
                "seed": self.seed,
                "jitter": self.jitter,
                "discrete_cutoff": self.discrete_cutoff,
                "use_n_factor": self.use_n_factor,
                "init_log_noise": self.init_log_noise,
                "fit_mode": self.fit_mode,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class DesignMatrix:
    values: np.ndarray  # (M, N) complex, column-scaled and row-whitened
    log_scales: np.ndarray  # (N,)


def assemble_design(family, model, data, refresh_scales=True):
    """Design matrix B[h, j] = (d^deriv_h b)(x_h; theta_j) / exp(scale_j).

    Column scales are recomputed from the current parameters unless
    `refresh_scales` is False, in which case the model's stored scales apply.
    Rows with a non-unit noise multiplier are whitened in place.
    """
    if isinstance(family, str):
        family = catalog_lookup(family, length=model.length)
    ls = (
        column_log_scales(family, model.thetas, data.points, data.derivs)
        if refresh_scales else model.log_scales
    )
    B = fam_mod.evaluate_design(family, model.thetas, data.points, data.derivs, ls)
    B = _whiten_rows(B, data)
    return DesignMatrix(B, ls)


def _whiten_rows(B, data):
    if np.any(data.noise_scale != 1.0):
        B = B / data.noise_scale[:, None]
    return B


def _whitened_values(data):
    y = data.values
    if np.any(data.noise_scale != 1.0):
        y = y / data.noise_scale
    return y


def _augmented(B, log_var, mode):
    """Effective design and per-column log variances for the fit mode."""
    if mode == "real_part":
        return np.hstack([B, B.conj()]), np.concatenate([log_var, log_var])
    if mode != "complex":
        raise ValueError(f"unknown fit mode {mode!r}")
    return B, log_var


def _collapse_coeffs(C, mode):
    """Weights on the original N columns: Re(B_aug C_aug) == Re(B C_collapsed)."""
    if mode == "real_part":
        n = len(C) // 2
        return C[:n] + np.conj(C[n:])
    return C


def _chol_jitter(A, jitter):
    """Upper Cholesky of A + jit*I, escalating jitter x10 up to 3 times."""
    diag_mean = float(np.mean(np.abs(np.diag(A)))) or 1.0
    jit = jitter * diag_mean
    for attempt in range(4):
        try:
            U = cholesky(A + jit * np.eye(len(A)), lower=False)
            return U, jit
        except np.linalg.LinAlgError:
            jit *= 10.0
        except Exception:
            jit *= 10.0
    raise NotPD(f"Hermitian factorization failed (final jitter {jit:.3e})")


class _NlmlCore:
    """Shared pieces of one likelihood evaluation at fixed design."""

    def __init__(self, B, y, log_var, log_noise, use_n_factor, jitter):
        M, N = B.shape
        self.B, self.y = B, y
        self.M, self.N = M, N
        self.s0 = float(np.exp(log_noise))
        self.var = np.exp(log_var)
        self.nu = (N if use_n_factor else 1) * self.s0
        G = B.conj().T @ B
        A = G + np.diag(self.nu / self.var)
        A = 0.5 * (A + A.conj().T)
        self.U, self.jit = _chol_jitter(A, jitter)
        self.r = B.conj().T @ y.astype(complex)
        self.C = cho_solve((self.U, False), self.r)
        self.ysq = float(y @ y)
        self.logdet_A = 2.0 * float(np.sum(np.log(np.diag(self.U).real)))
        self.data_term = (self.ysq - float(np.real(np.vdot(self.r, self.C)))) / self.s0
        self.value = (
            self.data_term
            + (M - N) * float(log_noise)
            + float(np.sum(log_var))
            + self.logdet_A
        )

    def diag_A_inv(self):
        Uinv = solve_triangular(self.U, np.eye(self.N), lower=False)
        return np.sum(np.abs(Uinv) ** 2, axis=1)

    def adjoint(self):
        """K with dL/dB_hj = 2 Re(K_hj * dB_hj) for real perturbations."""
        rho = self.B @ self.C - self.y
        G = cho_solve((self.U, False), self.B.conj().T)  # A^{-1} B^H, (N, M)
        return np.conj(rho)[:, None] * self.C[None, :] / self.s0 + G.T


def nlml(model, data, jitter=1e-10, refresh_scales=False):
    """Negative log marginal likelihood at the model's stored column scales."""
    fam = model.resolve_family()
    dm = assemble_design(fam, model, data, refresh_scales=refresh_scales)
    B, lv = _augmented(dm.values, model.log_var, model.fit_mode)
    core = _NlmlCore(
        B, _whitened_values(data), lv, model.log_noise, model.use_n_factor, jitter
    )
    return core.value


@dataclass
class NlmlGradient:
    theta_re: np.ndarray  # (N, p); empty second axis for discrete families
    theta_im: np.ndarray
    log_var: np.ndarray  # (N,)
    log_noise: float
    value: float  # the likelihood at the evaluation point


def nlml_grad(model, data, jitter=1e-10):
    """Analytic gradient of `nlml` in (Re theta, Im theta, log_var, log_noise).

    Frequencies of discrete families are fixed, so their theta blocks are
    empty.  Column scales are treated as constants of the evaluation.
    """
    fam = model.resolve_family()
    y = _whitened_values(data)
    if fam.kind == "discrete":
        B = fam_mod.evaluate_design(
            fam, model.thetas, data.points, data.derivs, model.log_scales
        )
        B = _whiten_rows(B, data)
        dB = None
    else:
        B, dB = fam_mod.evaluate_design_jac(
            fam, model.thetas, data.points, data.derivs, model.log_scales
        )
        B = _whiten_rows(B, data)
        dB = dB / data.noise_scale[:, None, None] if np.any(data.noise_scale != 1.0) else dB

    N = B.shape[1]
    B_eff, lv_eff = _augmented(B, model.log_var, model.fit_mode)
    core = _NlmlCore(B_eff, y, lv_eff, model.log_noise, model.use_n_factor, jitter)
    M, N_eff = core.M, core.N
    n_eff = N_eff if model.use_n_factor else 1
    inv_var = 1.0 / core.var
    diag_Ainv = core.diag_A_inv()
    c_sq = np.abs(core.C) ** 2

    g_var = 1.0 - core.nu * inv_var * diag_Ainv - n_eff * inv_var * c_sq
    if model.fit_mode == "real_part":
        g_var = g_var[:N] + g_var[N:]
    g_noise = (
        -core.data_term
        + n_eff * float(np.sum(inv_var * c_sq))
        + (M - N_eff)
        + core.nu * float(np.sum(inv_var * diag_Ainv))
    )

    if dB is None:
        g_re = np.zeros((N, 0))
        g_im = np.zeros((N, 0))
    else:
        K = core.adjoint()  # (M, N_eff)
        if model.fit_mode == "real_part":
            K = K[:, :N] + np.conj(K[:, N:])
        g = np.einsum("mj,mjp->jp", K, dB)
        g_re = 2.0 * g.real
        g_im = -2.0 * g.imag
    return NlmlGradient(g_re, g_im, g_var, float(g_noise), core.value)


def posterior_coeffs(model, data, jitter=1e-10):
    """Posterior weight mean C = A^{-1} B^H Y (column-scaled convention).

    In real_part mode the conjugate-column weights are folded back onto the
    original N columns, so Re(B C) is unchanged and predict applies as is.
    """
    fam = model.resolve_family()
    dm = assemble_design(fam, model, data, refresh_scales=False)
    B, lv = _augmented(dm.values, model.log_var, model.fit_mode)
    core = _NlmlCore(
        B, _whitened_values(data), lv, model.log_noise, model.use_n_factor, jitter
    )
    return _collapse_coeffs(core.C, model.fit_mode)


def predict(model, coeffs, points, deriv=None):
    """Real-part prediction and the max imaginary magnitude diagnostic."""
    fam = model.resolve_family()
    d = (0,) * fam.dim if deriv is None else tuple(deriv)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    derivs = np.tile(d, (len(points), 1))
    B = fam_mod.evaluate_design(fam, model.thetas, points, derivs, model.log_scales)
    vals = B @ np.asarray(coeffs, dtype=complex)
    return vals.real, float(np.max(np.abs(vals.imag), initial=0.0))


def sample(model, points, count, seed, mode="prior", data=None, jitter=1e-10):
    """Draw `count` realizations at `points` from the prior or the posterior.

    Weights are complex with independent real and imaginary parts of
    variance s_j^2 (prior) or coefficient covariance s0^2 A^{-1} about the
    posterior mean.
    """
    fam = model.resolve_family()
    rng = np.random.default_rng(seed)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    derivs = np.zeros((len(points), fam.dim), dtype=int)
    B_pts = fam_mod.evaluate_design(fam, model.thetas, points, derivs, model.log_scales)
    N = model.n_basis
    if mode == "prior":
        sd = np.exp(0.5 * model.log_var)
        w = sd * (rng.standard_normal((count, N)) + 1j * rng.standard_normal((count, N)))
    elif mode == "posterior":
        if data is None:
            raise ValueError("posterior sampling requires a dataset")
        dm = assemble_design(fam, model, data, refresh_scales=False)
        Bd, lv = _augmented(dm.values, model.log_var, model.fit_mode)
        core = _NlmlCore(
            Bd, _whitened_values(data), lv, model.log_noise,
            model.use_n_factor, jitter,
        )
        n_eff = Bd.shape[1]
        xi = rng.standard_normal((count, n_eff)) + 1j * rng.standard_normal(
            (count, n_eff)
        )
        # A = U^H U, so U^{-1} xi has covariance A^{-1} per part.
        delta = np.sqrt(core.s0) * solve_triangular(core.U, xi.T, lower=False)
        w = core.C[None, :] + delta.T
        if model.fit_mode == "real_part":
            w = w[:, :N] + np.conj(w[:, N:])
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    return (w @ B_pts.T).real


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------

class _Adam:
    def __init__(self, size, beta1=0.9, beta2=0.999, eps=1e-8):
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.b1, self.b2, self.eps = beta1, beta2, eps
        self.t = 0

    def step(self, params, grad, lr):
        self.t += 1
        self.m = self.b1 * self.m + (1 - self.b1) * grad
        self.v = self.b2 * self.v + (1 - self.b2) * grad**2
        m_hat = self.m / (1 - self.b1**self.t)
        v_hat = self.v / (1 - self.b2**self.t)
        return params - lr * m_hat / (np.sqrt(v_hat) + self.eps)


class _Sgd:
    def __init__(self, size):
        pass

    def step(self, params, grad, lr):
        return params - lr * grad


def _init_state(family, data, n_basis, config, rng):
    """Initial model: centered complex parameters scaled by the data extent."""
    if family.kind == "discrete":
        if config.discrete_cutoff is None:
            raise ValueError("discrete families need TrainConfig.discrete_cutoff")
        thetas = enumerate_discrete(family, config.discrete_cutoff)
    else:
        if n_basis is None or n_basis < 1:
            raise ValueError("n_basis must be >= 1 for continuous families")
        span = data.points.max(axis=0) - data.points.min(axis=0)
        diam = float(np.linalg.norm(span))
        if diam <= 0:
            diam = 1.0
        # Oscillatory frequencies dominate bounded-domain physics; the prior
        # width covers about 20 half-waves across the data extent.
        sd_re = 0.5 / diam
        sd_im = np.pi * 20.0 / diam
        p = family.free_params
        thetas = sd_re * rng.standard_normal((n_basis, p)) + 1j * (
            sd_im * rng.standard_normal((n_basis, p))
        )
    N = len(thetas)
    model = ModelState(
        family=family.name,
        thetas=thetas,
        log_var=np.zeros(N),  # unit prior variance on the scaled columns
        log_noise=config.init_log_noise,
        log_scales=column_log_scales(family, thetas, data.points, data.derivs),
        use_n_factor=config.use_n_factor,
        length=family.length,
        fit_mode=config.fit_mode,
    )
    return model


def _refresh_scales(family, model, data):
    """Recompute column scales; compensate log-variances so the modeled
    function-space prior (and hence the loss) is unchanged."""
    new = column_log_scales(family, model.thetas, data.points, data.derivs)
    model.log_var = model.log_var + 2.0 * (new - model.log_scales)
    model.log_scales = new


def _pack(model, continuous):
    parts = [model.log_var, [model.log_noise]]
    if continuous:
        parts = [model.thetas.real.ravel(), model.thetas.imag.ravel()] + parts
    return np.concatenate([np.asarray(q, dtype=float).ravel() for q in parts])


def _unpack(vec, model, continuous, noise_floor):
    N = model.n_basis
    k = 0
    if continuous:
        p = model.thetas.shape[1]
        re = vec[k : k + N * p].reshape(N, p)
        k += N * p
        im = vec[k : k + N * p].reshape(N, p)
        k += N * p
        model.thetas = re + 1j * im
    model.log_var = vec[k : k + N].copy()
    k += N
    model.log_noise = float(vec[k])
    if noise_floor > 0:
        model.log_noise = max(model.log_noise, float(np.log(noise_floor)))


def _grad_vec(g, continuous):
    parts = [g.log_var, [g.log_noise]]
    if continuous:
        parts = [g.theta_re.ravel(), g.theta_im.ravel()] + parts
    return np.concatenate([np.asarray(q, dtype=float).ravel() for q in parts])


def fit(family, data, n_basis, config):
    """Train a model on full-batch likelihood gradients.

    Returns the best state seen (by likelihood value).  Discrete families
    train variances only, over the lattice enumerate_discrete(cutoff).
    Deterministic for a fixed seed and pinned thread count.
    """
    if isinstance(family, str):
        family = catalog_lookup(family)
    rng = np.random.default_rng(config.seed)
    model = _init_state(family, data, n_basis, config, rng)
    continuous = family.kind == "continuous"

    params = _pack(model, continuous)
    opt = (_Adam if config.optimizer == "adam" else _Sgd)(params.size)
    best = model.copy()
    best_loss = np.inf
    halvings = 0
    epoch_index = 0

    for stage_epochs, stage_lr in config.schedule:
        lr = stage_lr
        for _ in range(stage_epochs):
            _unpack(params, model, continuous, data.noise_floor)
            if continuous:
                _refresh_scales(family, model, data)
                params = _pack(model, continuous)
            try:
                g = nlml_grad(model, data, jitter=config.jitter)
                loss = g.value
            except NotPD as exc:
                raise TrainingError(f"epoch {epoch_index}: {exc}") from exc
            if not np.isfinite(loss):
                halvings += 1
                if halvings > 5:
                    raise TrainingError(
                        f"epoch {epoch_index}: loss diverged after 5 step halvings"
                    )
                lr *= 0.5
                params = _pack(best, continuous)
                epoch_index += 1
                continue
            if loss < best_loss:
                best_loss = loss
                best = model.copy()
            params = opt.step(params, _grad_vec(g, continuous), lr)
            epoch_index += 1

    _unpack(params, model, continuous, data.noise_floor)
    if continuous:
        _refresh_scales(family, model, data)
    try:
        final_loss = nlml(model, data, jitter=config.jitter)
        if np.isfinite(final_loss) and final_loss < best_loss:
            best_loss = final_loss
            best = model.copy()
    except NotPD:
        pass
    return best


# ---------------------------------------------------------------------------
# prediction helper and checkpoints
# ---------------------------------------------------------------------------

class Predictor:
    """Callable wrapper around (model, coefficients) for grids and diagnostics."""

    def __init__(self, model, coeffs):
        self.model = model
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.family = model.resolve_family()

    def __call__(self, points, deriv=None):
        values, _ = predict(self.model, self.coeffs, points, deriv)
        return values

    def with_imag(self, points, deriv=None):
        return predict(self.model, self.coeffs, points, deriv)

    def term_scale(self, points):
        """Cancellation-free magnitude bound sum_j |c_j| max_k |term_jk| / scale_j."""
        points = np.atleast_2d(np.asarray(points, float))
        fam = self.family
        z = fam.frequencies(self.model.thetas)  # (N, K, n)
        E_re = np.einsum("mn,jkn->mjk", points, z.real)
        lm = fam_mod._log_term_mag(z, (0,) * fam.dim, fam.signs, E_re)
        mags = np.exp(lm.max(axis=2) - self.model.log_scales[None, :])
        return float(np.max(mags @ np.abs(self.coeffs)))


CHECKPOINT_FORMAT = "bepgp-model"
CHECKPOINT_VERSION = 1


def save_checkpoint(model, path, train_config=None):
    """Write the model as self-describing JSON (portable across languages)."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "family": model.family,
        "length": model.length,
        "n_basis": model.n_basis,
        "params_per_element": int(model.thetas.shape[1]),
        "thetas_re": model.thetas.real.tolist(),
        "thetas_im": np.asarray(model.thetas).imag.tolist(),
        "log_variances": model.log_var.tolist(),
        "log_noise_variance": model.log_noise,
        "log_column_scales": model.log_scales.tolist(),
        "use_n_factor": model.use_n_factor,
        "fit_mode": model.fit_mode,
        "train_config_digest": train_config.digest() if train_config else None,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def load_checkpoint(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not a {CHECKPOINT_FORMAT} file: {path}")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
    thetas = np.asarray(doc["thetas_re"]) + 1j * np.asarray(doc["thetas_im"])
    fam = catalog_lookup(doc["family"], length=doc.get("length"))
    if fam.kind == "discrete":
        thetas = thetas.real
    return ModelState(
        family=doc["family"],
        thetas=thetas,
        log_var=np.asarray(doc["log_variances"]),
        log_noise=float(doc["log_noise_variance"]),
        log_scales=np.asarray(doc["log_column_scales"]),
        use_n_factor=bool(doc.get("use_n_factor", True)),
        length=doc.get("length"),
        fit_mode=doc.get("fit_mode", "complex"),
    )
