"""Quantitative health checks: L1 metrics, the energy functional, and
boundary/interior residuals computed by routes independent of the basis
algebra (the interior residual uses finite differences of plain values)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyGrid, ZeroTruth
from .geometry import lattice

ENERGY_DEFAULT_H = 0.1


def l1_metrics(pred, truth):
    """(median |pred - truth|, sum|pred - truth| / sum|truth|).

    The relative error is a norm ratio, reported as a fraction.
    """
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if pred.shape != truth.shape or pred.size == 0:
        raise ValueError("pred and truth must be equal-length, non-empty")
    diff = np.abs(pred - truth)
    denom = float(np.sum(np.abs(truth)))
    if denom == 0.0:
        raise ZeroTruth("relative error undefined for identically-zero truth")
    return float(np.median(diff)), float(np.sum(diff) / denom)


@dataclass
class EnergySeries:
    """Area-normalized Riemann sums of u_t^2 + |grad u|^2 on an h-lattice."""

    times: np.ndarray
    energy: np.ndarray
    h: float

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.energy = np.asarray(self.energy, dtype=float)
        if len(self.times) != len(self.energy):
            raise ValueError("times and energy must have equal length")

    @property
    def max_relative_drift(self):
        ref = float(np.max(np.abs(self.energy)))
        if ref == 0.0:
            return 0.0
        return float((np.max(self.energy) - np.min(self.energy)) / ref)


def energy_series(predictor, domain, times, h=ENERGY_DEFAULT_H):
    """Q(t) = Area / |grid| * sum over the h-lattice of u_t^2 + sum_i u_{x_i}^2.

    `predictor(points, deriv)` must supply first derivatives analytically.
    """
    grid = lattice(domain, h)
    if len(grid) == 0:
        raise EmptyGrid(f"h = {h} lattice misses the domain")
    k = domain.dim
    norm = domain.area / len(grid)
    out = np.empty(len(times))
    for it, t in enumerate(times):
        pts = np.column_stack([np.full(len(grid), t), grid])
        total = np.zeros(len(grid))
        for i in range(k + 1):
            d = tuple(1 if j == i else 0 for j in range(k + 1))
            total += predictor(pts, d) ** 2
        out[it] = norm * float(total.sum())
    return EnergySeries(np.asarray(times, dtype=float), out, h)


def boundary_residual(predictor, boundary_sampler, count, seed):
    """max |B(d) u| over sampled boundary points, relative to the field scale.

    `boundary_sampler(rng, count)` yields (points, unit normals, kinds); the
    scale prefers the predictor's cancellation-free term bound when exposed
    (exact families annihilate pointwise, so raw boundary values cannot
    serve as their own normalizer), else max |u| over the sample.
    """
    rng = np.random.default_rng(seed)
    points, normals, kinds = boundary_sampler(rng, count)
    points = np.atleast_2d(points)
    n_coords = points.shape[1]
    resid = np.zeros(len(points))
    for kind in np.unique(kinds):
        rows = np.flatnonzero(np.asarray(kinds) == kind)
        if kind == "dirichlet":
            resid[rows] = np.abs(predictor(points[rows]))
        else:
            acc = np.zeros(len(rows))
            for i in range(n_coords):
                ni = np.asarray(normals)[rows, i]
                if np.all(ni == 0.0):
                    continue
                d = tuple(1 if j == i else 0 for j in range(n_coords))
                acc = acc + ni * predictor(points[rows], d)
            resid[rows] = np.abs(acc)
    scale = getattr(predictor, "term_scale", None)
    if scale is not None:
        norm = scale(points)
    else:
        norm = float(np.max(np.abs(predictor(points)), initial=0.0))
    if norm == 0.0:
        return 0.0
    return float(resid.max() / norm)


_FD4_SECOND = (-1.0, 16.0, -30.0, 16.0, -1.0)
_FD4_FIRST = (1.0, -8.0, 0.0, 8.0, -1.0)


def _fd_derivative(values_at, points, axis, order, step):
    """4th-order central first/second derivative from plain value evaluations."""
    offsets = (-2, -1, 0, 1, 2)
    weights = _FD4_SECOND if order == 2 else _FD4_FIRST
    acc = np.zeros(len(points))
    for o, w in zip(offsets, weights):
        if w == 0.0:
            continue
        shifted = points.copy()
        shifted[:, axis] += o * step
        acc = acc + w * values_at(shifted)
    return acc / (12.0 * step**order)


def pde_residual_fd(predictor, interior_points, step, operator="wave"):
    """max |A(d)u| via 4th-order central differences of values alone,
    normalized by the max field magnitude over the points."""
    pts = np.atleast_2d(np.asarray(interior_points, dtype=float))
    values_at = lambda q: np.asarray(predictor(q), dtype=float)
    n = pts.shape[1]
    if operator == "wave":
        res = _fd_derivative(values_at, pts, 0, 2, step)
        for i in range(1, n):
            res = res - _fd_derivative(values_at, pts, i, 2, step)
    elif operator == "heat":
        res = _fd_derivative(values_at, pts, 0, 1, step)
        for i in range(1, n):
            res = res - _fd_derivative(values_at, pts, i, 2, step)
    elif operator == "laplace":
        res = _fd_derivative(values_at, pts, 0, 2, step) + _fd_derivative(
            values_at, pts, 1, 2, step
        )
    else:
        raise ValueError(f"unknown operator {operator!r}")
    scale = float(np.max(np.abs(values_at(pts)), initial=0.0))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(res)) / scale)


def family_boundary_sampler(family, time_range=(0.0, 4.0)):
    """Sampler over all boundary pieces of a catalog family (for diagnostics)."""
    def sampler(rng, count):
        pts, normals, kinds = [], [], []
        ops = family.boundary_ops
        if not ops:
            raise ValueError(f"{family.name} has no boundary pieces")
        per = max(1, count // len(ops))
        for bc in ops:
            p = family.sample_boundary(rng, per, bc)
            if time_range is not None and family.variety != "laplace":
                p[:, 0] = rng.uniform(*time_range, size=len(p))
            pts.append(p)
            normals.append(np.tile(bc.unit_normal(), (len(p), 1)))
            kinds.extend([bc.kind] * len(p))
        return np.vstack(pts), np.vstack(normals), np.asarray(kinds)

    return sampler
