"""Catalog of exponential solution families for heat, wave, and Laplace problems.

Each family maps a vector of free parameters to a signed sum of complex
exponentials exp(x.z) whose frequency vectors z lie on the characteristic
variety of the operator, arranged so the sum is annihilated by the family's
boundary operators on the stated hyperplanes.  Continuous families carry
complex parameters trained by gradient descent; discrete families carry an
integer mode lattice (separation-of-variables bases on slabs, rectangles,
and triangles).

Coordinates are spacetime with time first: (t, x[, y[, z]]).  The Laplace
family is purely spatial, (x, y).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BranchSingularity, ContinuousFamily, DiscreteFamily, Overflow

# Branch-point guard for radicands under principal square roots.
BRANCH_TOL = 1e-10
# Imaginary shift applied to a radicand near the cut, gradient path only.
CUT_SHIFT = 1e-6j
# Exponent cap after column scaling; float64 overflows near 709.
EXP_CAP = 700.0
LOG_SCALE_MIN, LOG_SCALE_MAX = -200.0, 700.0

DIRICHLET = "dirichlet"
NEUMANN = "neumann"

FAMILY_IDS = (
    "heat1d_halfline_dirichlet",
    "heat1d_halfline_neumann",
    "heat2d_free",
    "heat2d_wedge90_dirichlet",
    "heat2d_wedge90_neumann",
    "wave1d_free",
    "wave1d_halfline_neumann",
    "wave1d_slab_dirichlet",
    "wave1d_slab_neumann",
    "wave2d_free",
    "wave2d_halfplane_dirichlet",
    "wave2d_halfplane_neumann",
    "wave2d_wedge90_mixed",
    "wave2d_wedge90_dirichlet",
    "wave2d_wedge90_neumann",
    "wave2d_wedge45_neumann",
    "wave2d_rectangle_dirichlet",
    "wave2d_triangle_dirichlet",
    "wave3d_free",
    "wave3d_two_neumann_planes",
    "laplace2d_free",
)


@dataclass(frozen=True)
class BoundaryOp:
    """Boundary operator on the hyperplane {x : normal.x = offset}.

    `normal` spans all coordinates (time component zero) and need not be
    normalized; `kind` is "dirichlet" (value) or "neumann" (normal derivative).
    """

    normal: tuple
    offset: float
    kind: str

    def unit_normal(self):
        n = np.asarray(self.normal, dtype=float)
        return n / np.linalg.norm(n)


# A term frequency coordinate is coeff * m(theta) with m one of:
#   "param":  theta[index]
#   "sumsq":  sum_k theta[k]^2
#   "root":   principal sqrt(sum_k theta[k]^2)
@dataclass(frozen=True)
class CoordExpr:
    kind: str
    coeff: complex
    index: int = 0


@dataclass(frozen=True)
class BasisFamily:
    name: str
    dim: int
    free_params: int
    kind: str  # "continuous" | "discrete"
    signs: tuple  # complex weight per term
    terms: tuple  # per term: tuple[CoordExpr] of length dim (continuous only)
    variety: str  # "heat" | "wave" | "laplace"
    boundary_ops: tuple
    domain_geometry: str
    formula: str
    length: Optional[float] = None  # mode spacing pi/length for discrete families
    has_root: bool = False  # any term uses a principal square root
    sample_box: tuple = ()  # per-coordinate (lo, hi) used by the test samplers
    spatial_constraint: Optional[Callable] = None  # extra membership predicate
    _freq_discrete: Optional[Callable] = None  # lattice -> (z, signs) for discrete

    # -- frequency maps ----------------------------------------------------

    def frequencies(self, thetas):
        """Frequency vectors z for a batch of parameters.

        thetas: (..., p) complex (continuous) or lattice floats (discrete).
        Returns z of shape (..., K, n) with K the number of terms.
        """
        thetas = np.asarray(thetas)
        if self.kind == "discrete":
            return self._freq_discrete(self, thetas)
        return self._freq_continuous(thetas, jac=False)[0]

    def frequencies_jac(self, thetas):
        """Frequencies and their parameter Jacobian (continuous families).

        Returns (z, dz) with dz of shape (..., K, n, p); the square-root
        derivative is taken on a radicand shifted off the negative real axis.
        """
        if self.kind == "discrete":
            raise DiscreteFamily(f"{self.name} has no trainable frequencies")
        return self._freq_continuous(np.asarray(thetas, dtype=complex), jac=True)

    def _freq_continuous(self, thetas, jac):
        th = np.asarray(thetas, dtype=complex)
        if th.shape[-1] != self.free_params:
            raise ValueError(
                f"{self.name} expects {self.free_params} parameters, got {th.shape[-1]}"
            )
        base = th.shape[:-1]
        K, n, p = len(self.terms), self.dim, self.free_params

        sumsq = np.sum(th * th, axis=-1)
        root = droot = None
        if self.has_root:
            if np.any(np.abs(sumsq) < BRANCH_TOL):
                raise BranchSingularity(
                    f"{self.name}: radicand within {BRANCH_TOL} of the branch point"
                )
            root = np.sqrt(sumsq)
            if jac:
                near_cut = (sumsq.real < 0) & (np.abs(sumsq.imag) < 1e-6)
                shifted = np.where(near_cut, sumsq + CUT_SHIFT, sumsq)
                droot = 0.5 / np.sqrt(shifted)

        z = np.zeros(base + (K, n), dtype=complex)
        dz = np.zeros(base + (K, n, p), dtype=complex) if jac else None
        for k, term in enumerate(self.terms):
            for i, ce in enumerate(term):
                if ce.kind == "param":
                    z[..., k, i] = ce.coeff * th[..., ce.index]
                    if jac:
                        dz[..., k, i, ce.index] = ce.coeff
                elif ce.kind == "sumsq":
                    z[..., k, i] = ce.coeff * sumsq
                    if jac:
                        for l in range(p):
                            dz[..., k, i, l] = 2.0 * ce.coeff * th[..., l]
                elif ce.kind == "root":
                    z[..., k, i] = ce.coeff * root
                    if jac:
                        for l in range(p):
                            dz[..., k, i, l] = 2.0 * ce.coeff * th[..., l] * droot
                else:  # pragma: no cover
                    raise ValueError(f"unknown coordinate expression {ce.kind}")
        return (z, dz) if jac else (z, None)

    # -- characteristic polynomial -----------------------------------------

    def variety_values(self, z):
        """A(z) for frequency vectors z of shape (..., n)."""
        z = np.asarray(z)
        if self.variety == "heat":
            return z[..., 0] - np.sum(z[..., 1:] ** 2, axis=-1)
        if self.variety == "wave":
            return z[..., 0] ** 2 - np.sum(z[..., 1:] ** 2, axis=-1)
        if self.variety == "laplace":
            return z[..., 0] ** 2 + z[..., 1] ** 2
        raise ValueError(self.variety)  # pragma: no cover

    @property
    def variety_degree(self):
        return 2

    def apply_operator(self, deriv_eval, points):
        """Analytic PDE residual assembled from derivative evaluations.

        deriv_eval(multi_index) must return the field's derivative values at
        `points`; combines them according to the family's operator.
        """
        n = self.dim
        e = lambda i, o: tuple(o if j == i else 0 for j in range(n))
        if self.variety == "heat":
            res = deriv_eval(e(0, 1))
            for i in range(1, n):
                res = res - deriv_eval(e(i, 2))
            return res
        if self.variety == "wave":
            res = deriv_eval(e(0, 2))
            for i in range(1, n):
                res = res - deriv_eval(e(i, 2))
            return res
        res = deriv_eval(e(0, 2)) + deriv_eval(e(1, 2))
        return res

    # -- samplers used by the verification suites ---------------------------

    def sample_theta(self, rng, count=1):
        """Random admissible parameters (complex normal / lattice rows)."""
        if self.kind == "discrete":
            return _sample_lattice(self, rng, count)
        p = self.free_params
        out = np.empty((count, p), dtype=complex)
        filled = 0
        while filled < count:
            cand = rng.standard_normal((count - filled, p)) + 1j * rng.standard_normal(
                (count - filled, p)
            )
            if self.has_root:
                ok = np.abs(np.sum(cand * cand, axis=-1)) > 1e-6
                cand = cand[ok]
            out[filled : filled + len(cand)] = cand
            filled += len(cand)
        return out

    def sample_interior(self, rng, count, margin=0.0):
        """Random points in the sample box satisfying the domain constraint."""
        box = np.asarray(self.sample_box, dtype=float)
        lo, hi = box[:, 0] + margin, box[:, 1] - margin
        pts = np.empty((count, self.dim))
        filled = 0
        while filled < count:
            cand = rng.uniform(lo, hi, size=(count - filled, self.dim))
            if self.spatial_constraint is not None:
                cand = cand[self.spatial_constraint(cand, margin)]
            pts[filled : filled + len(cand)] = cand
            filled += len(cand)
        return pts

    def sample_boundary(self, rng, count, bc):
        """Random points on the hyperplane of `bc`, inside the sample box."""
        pts = self.sample_interior(rng, count)
        n = bc.unit_normal()
        # Project the spatial part onto the plane; time is tangential.
        shift = pts @ n - bc.offset
        return pts - shift[:, None] * n[None, :]


# ---------------------------------------------------------------------------
# catalog construction
# ---------------------------------------------------------------------------

def _P(i, c=1.0):
    return CoordExpr("param", complex(c), i)


def _SQ(c=1.0):
    return CoordExpr("sumsq", complex(c))


def _RT(c=1.0):
    return CoordExpr("root", complex(c))


def _pos(points, margin=0.0, axes=()):
    m = np.ones(len(points), dtype=bool)
    for a in axes:
        m &= points[:, a] > margin
    return m


def _below_diag(points, margin=0.0):
    # spatial region {0 < y < x}
    return (points[:, 2] > margin) & (points[:, 2] < points[:, 1] - margin)


def _slab_freq(fam, th):
    """th rows (j, s): exp(i*s*w*t) * sin_or_cos(w*x), w = j*pi/L."""
    j, s = th[..., 0], th[..., 1]
    w = 1j * j * (np.pi / fam.length)
    zt = s * w
    z = np.stack(
        [np.stack([zt, w], axis=-1), np.stack([zt, -w], axis=-1)], axis=-2
    )
    return z


def _rect_freq(fam, th):
    """th rows (j, k, s): exp(i*s*w*t) * sin(wx*x) * sin(wy*y)."""
    j, k, s = th[..., 0], th[..., 1], th[..., 2]
    c = np.pi / fam.length
    wx, wy = 1j * j * c, 1j * k * c
    zt = 1j * s * c * np.sqrt(j.real**2 + k.real**2)
    terms = []
    for sx, sy in itertools.product((1, -1), repeat=2):
        terms.append(np.stack([zt, sx * wx, sy * wy], axis=-1))
    return np.stack(terms, axis=-2)


def _tri_freq(fam, th):
    """Rectangle modes antisymmetrized under the x/y swap (j < k)."""
    j, k, s = th[..., 0], th[..., 1], th[..., 2]
    c = np.pi / fam.length
    zt = 1j * s * c * np.sqrt(j.real**2 + k.real**2)
    terms = []
    for a, b in ((j, k), (k, j)):
        wx, wy = 1j * a * c, 1j * b * c
        for sx, sy in itertools.product((1, -1), repeat=2):
            terms.append(np.stack([zt, sx * wx, sy * wy], axis=-1))
    return np.stack(terms, axis=-2)


def _sample_lattice(fam, rng, count):
    J = 5
    if fam.name == "wave1d_slab_dirichlet":
        j = rng.integers(1, J + 1, size=count)
        s = rng.choice([-1, 1], size=count)
        return np.stack([j, s], axis=-1).astype(float)
    if fam.name == "wave1d_slab_neumann":
        j = rng.integers(0, J + 1, size=count)
        s = rng.choice([-1, 1], size=count)
        s[j == 0] = 1
        return np.stack([j, s], axis=-1).astype(float)
    if fam.name == "wave2d_rectangle_dirichlet":
        jk = rng.integers(1, J + 1, size=(count, 2))
        s = rng.choice([-1, 1], size=count)
        return np.column_stack([jk, s]).astype(float)
    if fam.name == "wave2d_triangle_dirichlet":
        j = rng.integers(1, J, size=count)
        k = np.array([rng.integers(jj + 1, J + 1) for jj in j])
        s = rng.choice([-1, 1], size=count)
        return np.column_stack([j, k, s]).astype(float)
    raise DiscreteFamily(fam.name)  # pragma: no cover


def _sign_product_terms(dim, flip_axes, time_expr, fixed, sign_rule, time_signs=(1,)):
    """Terms for wedge/halfplane constructions: reflect `flip_axes`, optionally
    both time signs, with a per-flip sign rule."""
    terms, signs = [], []
    for st in time_signs:
        for combo in itertools.product((1, -1), repeat=len(flip_axes)):
            coords = [None] * dim
            te = time_expr
            coords[0] = CoordExpr(te.kind, te.coeff * st, te.index)
            for (axis, ce), s in zip(flip_axes, combo):
                coords[axis] = CoordExpr(ce.kind, ce.coeff * s, ce.index)
            for axis, ce in fixed:
                coords[axis] = ce
            terms.append(tuple(coords))
            signs.append(sign_rule(combo))
    return tuple(terms), tuple(signs)


def _build_catalog():
    cat = {}

    def add(fam):
        cat[fam.name] = fam

    # --- heat, half line -------------------------------------------------
    for bc_kind, s2, tag in ((DIRICHLET, -1.0, "dirichlet"), (NEUMANN, 1.0, "neumann")):
        add(
            BasisFamily(
                name=f"heat1d_halfline_{tag}",
                dim=2,
                free_params=1,
                kind="continuous",
                signs=(1.0 + 0j, s2 + 0j),
                terms=((_SQ(), _P(0)), (_SQ(), _P(0, -1))),
                variety="heat",
                boundary_ops=(BoundaryOp((0.0, 1.0), 0.0, bc_kind),),
                domain_geometry="half line x > 0, boundary at x = 0",
                formula=f"exp(t*h^2 + x*h) {'-' if s2 < 0 else '+'} exp(t*h^2 - x*h)",
                sample_box=((0.0, 2.0), (0.0, 3.0)),
            )
        )

    # --- heat, 2d free and quarter-plane wedge ---------------------------
    add(
        BasisFamily(
            name="heat2d_free",
            dim=3,
            free_params=2,
            kind="continuous",
            signs=(1.0 + 0j,),
            terms=(((_SQ(), _P(0), _P(1))),),
            variety="heat",
            boundary_ops=(),
            domain_geometry="full plane",
            formula="exp((a^2+b^2)*t + a*x + b*y)",
            sample_box=((0.0, 1.5), (-2.0, 2.0), (-2.0, 2.0)),
        )
    )
    for tag, rule, kinds in (
        ("dirichlet", lambda c: c[0] * c[1], (DIRICHLET, DIRICHLET)),
        ("neumann", lambda c: 1.0, (NEUMANN, NEUMANN)),
    ):
        terms, signs = _sign_product_terms(
            3, [(1, _P(0)), (2, _P(1))], _SQ(), [], rule
        )
        op = "-" if tag == "dirichlet" else "+"
        add(
            BasisFamily(
                name=f"heat2d_wedge90_{tag}",
                dim=3,
                free_params=2,
                kind="continuous",
                signs=signs,
                terms=terms,
                variety="heat",
                boundary_ops=(
                    BoundaryOp((0.0, 1.0, 0.0), 0.0, kinds[0]),
                    BoundaryOp((0.0, 0.0, 1.0), 0.0, kinds[1]),
                ),
                domain_geometry="quarter plane x, y > 0, boundaries at x = 0 and y = 0",
                formula=(
                    f"exp(q*t+a*x+b*y) {op} exp(q*t-a*x+b*y) {op} "
                    f"exp(q*t+a*x-b*y) + exp(q*t-a*x-b*y),  q = a^2+b^2"
                ),
                sample_box=((0.0, 1.5), (0.0, 3.0), (0.0, 3.0)),
                spatial_constraint=lambda p, m=0.0: _pos(p, m, axes=(1, 2)),
            )
        )

    # --- wave, 1d ---------------------------------------------------------
    add(
        BasisFamily(
            name="wave1d_free",
            dim=2,
            free_params=1,
            kind="continuous",
            signs=(1.0 + 0j,),
            terms=(((_P(0), _P(0))),),
            variety="wave",
            boundary_ops=(),
            domain_geometry="full line",
            formula="exp(h*(t + x))",
            sample_box=((0.0, 3.0), (-3.0, 3.0)),
        )
    )
    add(
        BasisFamily(
            name="wave1d_halfline_neumann",
            dim=2,
            free_params=1,
            kind="continuous",
            signs=(1.0 + 0j, 1.0 + 0j),
            terms=((_P(0), _P(0)), (_P(0), _P(0, -1))),
            variety="wave",
            boundary_ops=(BoundaryOp((0.0, 1.0), 0.0, NEUMANN),),
            domain_geometry="half line x > 0, reflecting boundary at x = 0",
            formula="exp(h*t + h*x) + exp(h*t - h*x)",
            sample_box=((0.0, 3.0), (0.0, 4.0)),
        )
    )

    # --- wave, slab modes ---------------------------------------------------
    for tag, trig in ((DIRICHLET, "sin"), (NEUMANN, "cos")):
        sgn1 = -0.5j if tag == DIRICHLET else 0.5
        add(
            BasisFamily(
                name=f"wave1d_slab_{tag}",
                dim=2,
                free_params=2,
                kind="discrete",
                signs=(sgn1, -sgn1 if tag == DIRICHLET else sgn1),
                terms=(),
                variety="wave",
                boundary_ops=(
                    BoundaryOp((0.0, 1.0), 0.0, tag),
                    BoundaryOp((0.0, 1.0), np.pi, tag),
                ),
                domain_geometry="interval 0 < x < L (default L = pi)",
                formula=f"exp(i*s*(j*pi/L)*t) * {trig}(j*pi*x/L),  j integer, s = +/-1",
                length=np.pi,
                sample_box=((0.0, 3.0), (0.0, np.pi)),
                _freq_discrete=_slab_freq,
            )
        )

    # --- wave, 2d continuous ----------------------------------------------
    add(
        BasisFamily(
            name="wave2d_free",
            dim=3,
            free_params=2,
            kind="continuous",
            signs=(1.0 + 0j,),
            terms=(((_RT(), _P(0), _P(1))),),
            variety="wave",
            boundary_ops=(),
            domain_geometry="full plane",
            formula="exp(r*t + a*x + b*y),  r = sqrt(a^2+b^2)",
            has_root=True,
            sample_box=((0.0, 3.0), (-2.0, 2.0), (-2.0, 2.0)),
        )
    )
    add(
        BasisFamily(
            name="wave2d_halfplane_dirichlet",
            dim=3,
            free_params=2,
            kind="continuous",
            signs=(1.0 + 0j, -1.0 + 0j),
            terms=((_RT(), _P(0), _P(1)), (_RT(), _P(0, -1), _P(1))),
            variety="wave",
            boundary_ops=(BoundaryOp((0.0, 1.0, 0.0), 0.0, DIRICHLET),),
            domain_geometry="half plane x > 0, pinned boundary at x = 0",
            formula="exp(r*t+a*x+b*y) - exp(r*t-a*x+b*y),  r = sqrt(a^2+b^2)",
            has_root=True,
            sample_box=((0.0, 3.0), (0.0, 4.0), (-2.0, 2.0)),
        )
    )
    terms, signs = _sign_product_terms(
        3, [(1, _P(0))], _RT(), [(2, _P(1))], lambda c: 1.0, time_signs=(1, -1)
    )
    add(
        BasisFamily(
            name="wave2d_halfplane_neumann",
            dim=3,
            free_params=2,
            kind="continuous",
            signs=signs,
            terms=terms,
            variety="wave",
            boundary_ops=(BoundaryOp((0.0, 1.0, 0.0), 0.0, NEUMANN),),
            domain_geometry="half plane x > 0, reflecting boundary at x = 0",
            formula=(
                "exp(r*t+a*x+b*y) + exp(r*t-a*x+b*y) + exp(-r*t+a*x+b*y) "
                "+ exp(-r*t-a*x+b*y),  r = sqrt(a^2+b^2)"
            ),
            has_root=True,
            sample_box=((0.0, 3.0), (0.0, 4.0), (-2.0, 2.0)),
        )
    )

    wedge_cases = (
        ("mixed", lambda c: c[0], (DIRICHLET, NEUMANN), ("-", "+")),
        ("dirichlet", lambda c: c[0] * c[1], (DIRICHLET, DIRICHLET), ("-", "-")),
        ("neumann", lambda c: 1.0, (NEUMANN, NEUMANN), ("+", "+")),
    )
    for tag, rule, kinds, (ox, oy) in wedge_cases:
        terms, signs = _sign_product_terms(3, [(1, _P(0)), (2, _P(1))], _RT(), [], rule)
        add(
            BasisFamily(
                name=f"wave2d_wedge90_{tag}",
                dim=3,
                free_params=2,
                kind="continuous",
                signs=signs,
                terms=terms,
                variety="wave",
                boundary_ops=(
                    BoundaryOp((0.0, 1.0, 0.0), 0.0, kinds[0]),
                    BoundaryOp((0.0, 0.0, 1.0), 0.0, kinds[1]),
                ),
                domain_geometry="quarter plane x, y > 0, boundaries at x = 0 and y = 0",
                formula=(
                    f"exp(r*t+b*x+c*y) {ox} exp(r*t-b*x+c*y) {oy} exp(r*t+b*x-c*y) "
                    f"{'+' if ox == oy else '-'} exp(r*t-b*x-c*y),  r = sqrt(b^2+c^2)"
                ),
                has_root=True,
                sample_box=((0.0, 3.0), (0.0, 3.0), (0.0, 3.0)),
                spatial_constraint=lambda p, m=0.0: _pos(p, m, axes=(1, 2)),
            )
        )

    # 45-degree wedge: reflections plus the coordinate swap, both time signs.
    terms, signs = [], []
    for st in (1, -1):
        for i0, i1 in ((0, 1), (1, 0)):
            for sx, sy in itertools.product((1, -1), repeat=2):
                terms.append((_RT(st), _P(i0, sx), _P(i1, sy)))
                signs.append(1.0)
    add(
        BasisFamily(
            name="wave2d_wedge45_neumann",
            dim=3,
            free_params=2,
            kind="continuous",
            signs=tuple(signs),
            terms=tuple(terms),
            variety="wave",
            boundary_ops=(
                BoundaryOp((0.0, 0.0, 1.0), 0.0, NEUMANN),
                BoundaryOp((0.0, 1.0, -1.0), 0.0, NEUMANN),
            ),
            domain_geometry="45-degree wedge 0 < y < x, reflecting on y = 0 and y = x",
            formula=(
                "sum over (+/-h1, +/-h2), the (h1, h2) swap, and both time signs of "
                "exp(+/-r*t +/- h*x +/- h'*y),  r = sqrt(h1^2+h2^2), 16 terms"
            ),
            has_root=True,
            sample_box=((0.0, 3.0), (0.0, 3.0), (0.0, 3.0)),
            spatial_constraint=_below_diag,
        )
    )

    # --- wave, rectangle and triangle modes ---------------------------------
    add(
        BasisFamily(
            name="wave2d_rectangle_dirichlet",
            dim=3,
            free_params=3,
            kind="discrete",
            signs=(-0.25, 0.25, 0.25, -0.25),
            terms=(),
            variety="wave",
            boundary_ops=(
                BoundaryOp((0.0, 1.0, 0.0), 0.0, DIRICHLET),
                BoundaryOp((0.0, 1.0, 0.0), 4.0, DIRICHLET),
                BoundaryOp((0.0, 0.0, 1.0), 0.0, DIRICHLET),
                BoundaryOp((0.0, 0.0, 1.0), 4.0, DIRICHLET),
            ),
            domain_geometry="square (0, L)^2 (default L = 4), pinned on all edges",
            formula=(
                "exp(i*s*(pi/L)*sqrt(j^2+k^2)*t) * sin(j*pi*x/L) * sin(k*pi*y/L),"
                "  j, k >= 1, s = +/-1"
            ),
            length=4.0,
            sample_box=((0.0, 3.0), (0.0, 4.0), (0.0, 4.0)),
            _freq_discrete=_rect_freq,
        )
    )
    add(
        BasisFamily(
            name="wave2d_triangle_dirichlet",
            dim=3,
            free_params=3,
            kind="discrete",
            signs=(-0.25, 0.25, 0.25, -0.25, 0.25, -0.25, -0.25, 0.25),
            terms=(),
            variety="wave",
            boundary_ops=(
                BoundaryOp((0.0, 0.0, 1.0), 0.0, DIRICHLET),
                BoundaryOp((0.0, 1.0, 0.0), 4.0, DIRICHLET),
                BoundaryOp((0.0, 1.0, -1.0), 0.0, DIRICHLET),
            ),
            domain_geometry="triangle 0 < y < x < L (default L = 4), pinned on all edges",
            formula=(
                "exp(i*s*(pi/L)*sqrt(j^2+k^2)*t) * [sin(j*pi*x/L)*sin(k*pi*y/L)"
                " - sin(k*pi*x/L)*sin(j*pi*y/L)],  1 <= j < k, s = +/-1"
            ),
            length=4.0,
            sample_box=((0.0, 3.0), (0.0, 4.0), (0.0, 4.0)),
            spatial_constraint=_below_diag,
            _freq_discrete=_tri_freq,
        )
    )

    # --- wave, 3d -----------------------------------------------------------
    add(
        BasisFamily(
            name="wave3d_free",
            dim=4,
            free_params=3,
            kind="continuous",
            signs=(1.0 + 0j,),
            terms=(((_RT(), _P(0), _P(1), _P(2))),),
            variety="wave",
            boundary_ops=(),
            domain_geometry="full space",
            formula="exp(r*t + a*x + b*y + c*z),  r = sqrt(a^2+b^2+c^2)",
            has_root=True,
            sample_box=((0.0, 2.0), (-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)),
        )
    )
    terms, signs = _sign_product_terms(
        4, [(2, _P(1)), (3, _P(2))], _RT(), [(1, _P(0))], lambda c: 1.0,
        time_signs=(1, -1),
    )
    add(
        BasisFamily(
            name="wave3d_two_neumann_planes",
            dim=4,
            free_params=3,
            kind="continuous",
            signs=signs,
            terms=terms,
            variety="wave",
            boundary_ops=(
                BoundaryOp((0.0, 0.0, 1.0, 0.0), 0.0, NEUMANN),
                BoundaryOp((0.0, 0.0, 0.0, 1.0), 0.0, NEUMANN),
            ),
            domain_geometry="octant-like region y, z > 0, reflecting on y = 0 and z = 0",
            formula=(
                "sum over +/-b, +/-c and both time signs of "
                "exp(+/-r*t + a*x +/- b*y +/- c*z),  r = sqrt(a^2+b^2+c^2), 8 terms"
            ),
            has_root=True,
            sample_box=((0.0, 2.0), (-2.0, 2.0), (0.0, 2.0), (0.0, 2.0)),
            spatial_constraint=lambda p, m=0.0: _pos(p, m, axes=(2, 3)),
        )
    )

    # --- Laplace ------------------------------------------------------------
    add(
        BasisFamily(
            name="laplace2d_free",
            dim=2,
            free_params=1,
            kind="continuous",
            signs=(1.0 + 0j,),
            terms=(((_P(0), _P(0, 1j))),),
            variety="laplace",
            boundary_ops=(),
            domain_geometry="plane (x, y), no time coordinate",
            formula="exp(h*(x + i*y))",
            sample_box=((0.5, 3.0), (0.5, 3.0)),
        )
    )

    assert set(cat) == set(FAMILY_IDS)
    return cat


_CATALOG = _build_catalog()


def catalog_lookup(family_id, length=None):
    """Resolve a family id, optionally overriding the mode length scale."""
    try:
        fam = _CATALOG[family_id]
    except KeyError:
        raise KeyError(
            f"unknown family {family_id!r}; known ids: {', '.join(FAMILY_IDS)}"
        ) from None
    if length is not None and fam.length is not None and length != fam.length:
        ops = tuple(
            BoundaryOp(b.normal, length if b.offset != 0.0 else 0.0, b.kind)
            for b in fam.boundary_ops
        )
        box = ((0.0, 3.0),) + ((0.0, length),) * (fam.dim - 1)
        fam = BasisFamily(
            **{
                **fam.__dict__,
                "length": float(length),
                "boundary_ops": ops,
                "sample_box": box,
            }
        )
    return fam


def family_ids():
    return FAMILY_IDS


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _check_deriv(deriv, dim):
    d = np.asarray(deriv, dtype=int)
    if d.shape[-1] != dim or np.any(d < 0) or np.any(d.sum(axis=-1) > 2):
        raise ValueError(f"derivative multi-index must be length {dim} with total order <= 2")
    return d


def _monomials(z, d, jac_dz=None):
    """prod_i z_i^{d_i} over the term axis, and optionally its theta-Jacobian.

    z: (N, K, n); d: (n,) ints.  Returns P (N, K) and dP (N, K, p).
    """
    P = np.ones(z.shape[:-1], dtype=complex)
    for i, di in enumerate(d):
        if di:
            P = P * z[..., i] ** di
    if jac_dz is None:
        return P, None
    dP = np.zeros(z.shape[:-1] + (jac_dz.shape[-1],), dtype=complex)
    for i, di in enumerate(d):
        if not di:
            continue
        rest = np.ones(z.shape[:-1], dtype=complex)
        for i2, di2 in enumerate(d):
            if di2 and i2 != i:
                rest = rest * z[..., i2] ** di2
        dP += (di * z[..., i] ** (di - 1) * rest)[..., None] * jac_dz[..., i, :]
    return P, dP


def _log_term_mag(z, d, signs, E_re):
    """log |sign_k * prod z^d * exp(E)| per (row, theta, term)."""
    with np.errstate(divide="ignore"):
        out = E_re + np.log(np.abs(np.asarray(signs)))[None, None, :]
        for i, di in enumerate(d):
            if di:
                out = out + di * np.log(np.maximum(np.abs(z[..., i]), 1e-300))[None]
    return out


def column_log_scales(family, thetas, points, derivs, block=96):
    """Max log term magnitude per column over the given rows.

    This is the overflow-control scale divided out of each design column;
    rescaling a column only rescales the matching weight prior.
    """
    thetas = np.atleast_2d(thetas)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    derivs = _check_deriv(np.atleast_2d(derivs), family.dim)
    best = np.full(len(thetas), -np.inf)
    for j0 in range(0, len(thetas), block):
        jb = slice(j0, min(j0 + block, len(thetas)))
        z = family.frequencies(thetas[jb])  # (Nb, K, n)
        for d, rows in _deriv_groups(derivs):
            E_re = np.einsum("mn,jkn->mjk", points[rows], z.real)
            lm = _log_term_mag(z, d, family.signs, E_re)
            best[jb] = np.maximum(best[jb], lm.max(axis=(0, 2)))
    return np.clip(best, LOG_SCALE_MIN, LOG_SCALE_MAX)


def _deriv_groups(derivs):
    uniq, inv = np.unique(derivs, axis=0, return_inverse=True)
    for g, d in enumerate(uniq):
        yield tuple(int(v) for v in d), np.flatnonzero(inv == g)


def evaluate_design(family, thetas, points, derivs, log_scales=None, block=96):
    """Design matrix B[m, j] = d^(derivs[m]) b(points[m]; thetas[j]) / exp(scale_j).

    thetas (N, p), points (M, n), derivs (M, n).  Raises Overflow when a term's
    log magnitude exceeds the cap after scaling, naming the offending entry.
    """
    thetas = np.atleast_2d(thetas)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    derivs = _check_deriv(np.atleast_2d(derivs), family.dim)
    M, N = len(points), len(thetas)
    if log_scales is None:
        log_scales = np.zeros(N)
    B = np.empty((M, N), dtype=complex)
    signs = np.asarray(family.signs)
    for j0 in range(0, N, block):
        jb = slice(j0, min(j0 + block, N))
        z = family.frequencies(thetas[jb])
        ls = log_scales[jb]
        for d, rows in _deriv_groups(derivs):
            E = np.einsum("mn,jkn->mjk", points[rows], z)
            _guard_overflow(family, z, d, signs, E.real, ls, rows, j0)
            P, _ = _monomials(z, d)
            B[rows, jb] = np.einsum(
                "k,jk,mjk->mj", signs, P, np.exp(E - ls[None, :, None])
            )
    return B


def evaluate_design_jac(family, thetas, points, derivs, log_scales=None, block=96):
    """Design matrix and its holomorphic parameter Jacobian dB (M, N, p)."""
    if family.kind == "discrete":
        raise DiscreteFamily(f"{family.name} has no trainable frequencies")
    thetas = np.atleast_2d(np.asarray(thetas, dtype=complex))
    points = np.atleast_2d(np.asarray(points, dtype=float))
    derivs = _check_deriv(np.atleast_2d(derivs), family.dim)
    M, N, p = len(points), len(thetas), family.free_params
    if log_scales is None:
        log_scales = np.zeros(N)
    B = np.empty((M, N), dtype=complex)
    dB = np.empty((M, N, p), dtype=complex)
    signs = np.asarray(family.signs)
    for j0 in range(0, N, block):
        jb = slice(j0, min(j0 + block, N))
        z, dz = family.frequencies_jac(thetas[jb])
        ls = log_scales[jb]
        xdz = np.einsum("mn,jknp->mjkp", points, dz)  # (M, Nb, K, p)
        for d, rows in _deriv_groups(derivs):
            E = np.einsum("mn,jkn->mjk", points[rows], z)
            _guard_overflow(family, z, d, signs, E.real, ls, rows, j0)
            P, dP = _monomials(z, d, dz)
            ex = np.exp(E - ls[None, :, None])
            B[rows, jb] = np.einsum("k,jk,mjk->mj", signs, P, ex)
            inner = dP[None, :, :, :] + P[None, :, :, None] * xdz[rows]
            dB[rows, jb, :] = np.einsum("k,mjk,mjkp->mjp", signs, ex, inner)
    return B, dB


def _guard_overflow(family, z, d, signs, E_re, ls, rows, j0):
    lm = _log_term_mag(z, d, signs, E_re) - ls[None, :, None]
    if np.any(lm > EXP_CAP):
        m, j, _ = np.unravel_index(np.argmax(lm), lm.shape)
        raise Overflow(
            f"{family.name}: term magnitude exceeds exp cap at row {rows[m]}, "
            f"column {j0 + j}"
        )


def term_magnitude(family, theta, x, deriv=None):
    """Largest single-term magnitude of an element at a point (scale 1)."""
    theta = np.atleast_2d(theta)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    d = (0,) * family.dim if deriv is None else tuple(deriv)
    z = family.frequencies(theta)
    E_re = np.einsum("mn,jkn->mjk", x, z.real)
    lm = _log_term_mag(z, d, family.signs, E_re)
    return float(np.exp(lm.max()))


def eval_basis(family, theta, x, deriv=None, log_scale=0.0):
    """One basis element derivative at one point: d^deriv b(x; theta) / exp(scale)."""
    d = (0,) * family.dim if deriv is None else tuple(deriv)
    B = evaluate_design(
        family, np.atleast_2d(theta), np.atleast_2d(x), np.atleast_2d(d),
        log_scales=np.array([log_scale]),
    )
    return complex(B[0, 0])


def grad_params(family, theta, x, deriv=None, log_scale=0.0):
    """Holomorphic gradient of eval_basis in the free parameters (length p)."""
    d = (0,) * family.dim if deriv is None else tuple(deriv)
    _, dB = evaluate_design_jac(
        family, np.atleast_2d(theta), np.atleast_2d(x), np.atleast_2d(d),
        log_scales=np.array([log_scale]),
    )
    return dB[0, 0]


def variety_residual(family, theta):
    """max_k |A(z_k)| / (1 + |z_k|^deg) over the element's terms."""
    z = family.frequencies(np.atleast_2d(theta))
    resid = np.abs(family.variety_values(z))
    norm = 1.0 + np.linalg.norm(z, axis=-1) ** family.variety_degree
    return float(np.max(resid / norm))


def boundary_residual_element(family, theta, x, bc):
    """|B(d) b| at an on-boundary point, relative to the max term magnitude."""
    if bc.kind == DIRICHLET:
        val = eval_basis(family, theta, x)
        scale = term_magnitude(family, theta, x)
        return abs(val) / scale
    n = bc.unit_normal()
    val = 0.0 + 0j
    scale = 0.0
    for i, ni in enumerate(n):
        if ni == 0.0:
            continue
        d = tuple(1 if j == i else 0 for j in range(family.dim))
        val += ni * eval_basis(family, theta, x, d)
        scale = max(scale, abs(ni) * term_magnitude(family, theta, x, d))
    return abs(val) / scale


def enumerate_discrete(family, cutoff):
    """All lattice parameters with components up to `cutoff`, deduplicated
    under the family's sign symmetries; both time signs are emitted."""
    if family.kind != "discrete":
        raise ContinuousFamily(f"{family.name} is continuous")
    J = int(cutoff)
    if J < 1:
        raise ValueError("cutoff must be >= 1")
    rows = []
    if family.name == "wave1d_slab_dirichlet":
        for j in range(1, J + 1):
            for s in (1, -1):
                rows.append((j, s))
    elif family.name == "wave1d_slab_neumann":
        rows.append((0, 1))
        for j in range(1, J + 1):
            for s in (1, -1):
                rows.append((j, s))
    elif family.name == "wave2d_rectangle_dirichlet":
        for j in range(1, J + 1):
            for k in range(1, J + 1):
                for s in (1, -1):
                    rows.append((j, k, s))
    elif family.name == "wave2d_triangle_dirichlet":
        for j in range(1, J + 1):
            for k in range(j + 1, J + 1):
                for s in (1, -1):
                    rows.append((j, k, s))
    else:  # pragma: no cover
        raise DiscreteFamily(family.name)
    return np.asarray(rows, dtype=float)
