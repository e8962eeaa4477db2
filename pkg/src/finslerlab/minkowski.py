"""Pointwise tangent-space quantities: fundamental tensor, Cartan torsion,
distortion, Busemann-Hausdorff density, and indicatrix geometry."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ._grids import sphere_surface_nodes, unit_ball_volume
from .errors import (
    ConfigurationError,
    MetricValidityError,
    NumericalIntegrityError,
    PreconditionError,
)
from .metrics import F_FLOOR, MetricSpec

_E = {}


def _unit(n, i):
    key = (n, i)
    if key not in _E:
        _E[key] = tuple(1 if k == i else 0 for k in range(n))
    return _E[key]


def _zero(n):
    return tuple(0 for _ in range(n))


@dataclass(frozen=True)
class TangentSample:
    """A base point with a nonvanishing tangent vector."""

    x: np.ndarray
    y: np.ndarray

    def __init__(self, x, y):
        object.__setattr__(self, "x", np.asarray(x, dtype=float))
        object.__setattr__(self, "y", np.asarray(y, dtype=float))

    def validate(self, metric: MetricSpec):
        if not metric.chart.contains(self.x):
            raise PreconditionError(f"base point {self.x} outside the metric chart")
        if metric.F(self.x, self.y) <= F_FLOOR:
            raise PreconditionError("tangent vector too close to zero")
        return self


@dataclass(frozen=True)
class FundamentalTensor:
    """g_ij(y) with its Cholesky-backed inverse and determinant."""

    g: np.ndarray
    g_inv: np.ndarray
    det_g: float
    F: float

    def inner(self, u, v):
        return float(np.asarray(u) @ self.g @ np.asarray(v))


@dataclass(frozen=True)
class CartanData:
    """Cartan torsion family at one tangent sample (fields filled on demand)."""

    C: np.ndarray | None = None
    C_tilde: np.ndarray | None = None
    I: np.ndarray | None = None
    tau: float | None = None


def _f2_jet(metric, sample, mx, my):
    fj = metric.jet(sample.x, sample.y, mx, my)
    return fj * fj, fj.value


def fundamental_tensor(metric: MetricSpec, sample: TangentSample) -> FundamentalTensor:
    """g_ij = half the second fiber derivative of F^2, from the jet engine."""
    sample.validate(metric)
    n = metric.n
    f2, F = _f2_jet(metric, sample, 0, 2)
    g = np.empty((n, n))
    z = _zero(n)
    for i in range(n):
        for j in range(i, n):
            b = tuple(u + v for u, v in zip(_unit(n, i), _unit(n, j)))
            g[i, j] = g[j, i] = 0.5 * f2.partial(z, b)
    try:
        c, low = cho_factor(g)
    except np.linalg.LinAlgError as exc:
        raise MetricValidityError(
            f"fundamental tensor not positive definite at x={sample.x}, y={sample.y}"
        ) from exc
    g_inv = cho_solve((c, low), np.eye(n))
    det_g = float(np.prod(np.diag(c)) ** 2)
    return FundamentalTensor(g=g, g_inv=g_inv, det_g=det_g, F=F)


def cartan_tensor(metric: MetricSpec, sample: TangentSample) -> np.ndarray:
    """C_ijk = quarter of the third fiber derivative of F^2."""
    sample.validate(metric)
    n = metric.n
    f2, _ = _f2_jet(metric, sample, 0, 3)
    C = np.empty((n, n, n))
    z = _zero(n)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                b = tuple(u + v + w for u, v, w in zip(_unit(n, i), _unit(n, j), _unit(n, k)))
                val = 0.25 * f2.partial(z, b)
                for perm in ((i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)):
                    C[perm] = val
    return C


def cartan_torsion(metric: MetricSpec, sample: TangentSample) -> CartanData:
    return CartanData(C=cartan_tensor(metric, sample))


def cartan_tilde(metric: MetricSpec, sample: TangentSample) -> np.ndarray:
    """C-tilde: fourth fiber derivative of F^2 over four (the y-derivative of C)."""
    sample.validate(metric)
    n = metric.n
    f2, _ = _f2_jet(metric, sample, 0, 4)
    Ct = np.empty((n, n, n, n))
    z = _zero(n)
    for combo in itertools.combinations_with_replacement(range(n), 4):
        b = [0] * n
        for c in combo:
            b[c] += 1
        val = 0.25 * f2.partial(z, tuple(b))
        for perm in set(itertools.permutations(combo)):
            Ct[perm] = val
    return Ct


def mean_cartan(metric: MetricSpec, sample: TangentSample,
                ft: FundamentalTensor | None = None,
                C: np.ndarray | None = None) -> np.ndarray:
    """I_u = g^{ij} C(e_i, e_j, u)."""
    if ft is None:
        ft = fundamental_tensor(metric, sample)
    if C is None:
        C = cartan_tensor(metric, sample)
    return np.einsum("ij,ijk->k", ft.g_inv, C)


def distortion(metric: MetricSpec, sample: TangentSample, density: float,
               ft: FundamentalTensor | None = None) -> float:
    """tau = log(sqrt(det g_ij(y)) / sigma) for a positive density sigma at x."""
    if density <= 0:
        raise ConfigurationError("distortion needs a positive density")
    if ft is None:
        ft = fundamental_tensor(metric, sample)
    return float(0.5 * np.log(ft.det_g) - np.log(density))


def distortion_derivative_check(metric: MetricSpec, sample: TangentSample,
                                density: float, h=1e-4) -> float:
    """max over basis directions of |d/dt tau(y + t v) - I_y(v)|.

    The left side is finite differences of jet-computed distortions; the right
    side is the mean Cartan torsion, so the two routes are independent.
    """
    n = metric.n
    ft = fundamental_tensor(metric, sample)
    I = mean_cartan(metric, sample, ft=ft)
    scale = float(np.linalg.norm(sample.y))
    worst = 0.0
    for v in np.eye(n):
        vals = []
        for step in (h * scale, 0.5 * h * scale):
            taus = [
                distortion(metric, TangentSample(sample.x, sample.y + s * v), density)
                for s in (-step, step)
            ]
            vals.append((taus[1] - taus[0]) / (2 * step))
        deriv = (4 * vals[1] - vals[0]) / 3.0
        worst = max(worst, abs(deriv - float(I @ v)))
    return worst


def cartan_data(metric: MetricSpec, sample: TangentSample, density: float) -> CartanData:
    ft = fundamental_tensor(metric, sample)
    C = cartan_tensor(metric, sample)
    return CartanData(
        C=C,
        C_tilde=cartan_tilde(metric, sample),
        I=mean_cartan(metric, sample, ft=ft, C=C),
        tau=distortion(metric, sample, density, ft=ft),
    )


def cartan_norm(metric: MetricSpec, sample: TangentSample,
                ft: FundamentalTensor | None = None,
                C: np.ndarray | None = None) -> float:
    """Fully g-contracted Frobenius norm of the Cartan torsion."""
    if ft is None:
        ft = fundamental_tensor(metric, sample)
    if C is None:
        C = cartan_tensor(metric, sample)
    Cup = np.einsum("ia,jb,kc,abc->ijk", ft.g_inv, ft.g_inv, ft.g_inv, C)
    return float(np.sqrt(np.einsum("ijk,ijk->", Cup, C)))


# ---------------------------------------------------------------------------
# Busemann-Hausdorff density
# ---------------------------------------------------------------------------


def unit_body_volume(metric: MetricSpec, x) -> float:
    """Lebesgue volume of {y : F(x, y) < 1} by the 1-homogeneity reduction."""
    dirs, w = sphere_surface_nodes(metric.n)
    F = metric.F_batch(np.broadcast_to(np.asarray(x, dtype=float), dirs.shape), dirs)
    return float(np.sum(w * F ** (-metric.n)) / metric.n)


def unit_body_volume_mc(metric: MetricSpec, x, n_samples=200_000, seed=0):
    """Rejection Monte-Carlo estimate of the unit-body volume with its stderr."""
    x = np.asarray(x, dtype=float)
    dirs, _ = sphere_surface_nodes(metric.n)
    Fd = metric.F_batch(np.broadcast_to(x, dirs.shape), dirs)
    half = 1.05 / np.min(Fd)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-half, half, size=(n_samples, metric.n))
    F = metric.F_batch(np.broadcast_to(x, pts.shape), pts)
    inside = F < 1.0
    box = (2 * half) ** metric.n
    p = np.mean(inside)
    value = box * p
    stderr = box * np.sqrt(max(p * (1 - p), 1e-300) / n_samples)
    return value, stderr


def bh_density(metric: MetricSpec, x, mc_check=False, seed=0) -> float:
    """sigma_F(x) = Vol(B^n) / Vol{F(x, .) < 1}.

    Closed forms registered on the metric are used when available; otherwise
    spherical quadrature.  With mc_check=True a seeded rejection sampler must
    agree within 3 sigma or a NumericalIntegrityError is raised.
    """
    x = np.asarray(x, dtype=float)
    if metric.sigma_bh is not None and not mc_check:
        return float(metric.sigma_bh(x))
    vol = unit_body_volume(metric, x)
    sigma = unit_ball_volume(metric.n) / vol
    if mc_check:
        mc, err = unit_body_volume_mc(metric, x, seed=seed)
        if abs(mc - vol) > 3.0 * max(err, 1e-12):
            raise NumericalIntegrityError(
                f"unit-body volume: quadrature {vol} vs MC {mc} +- {err}"
            )
    if metric.sigma_bh is not None:
        closed = float(metric.sigma_bh(x))
        if abs(closed - sigma) > 1e-6 * max(1.0, abs(sigma)):
            raise NumericalIntegrityError(
                f"closed-form density {closed} disagrees with quadrature {sigma}"
            )
        return closed
    return float(sigma)


def density_field(metric: MetricSpec):
    """Callable sigma(x) backed by the closed form or by quadrature."""
    if metric.sigma_bh is not None:
        return lambda x: float(metric.sigma_bh(np.asarray(x, dtype=float)))
    return lambda x: bh_density(metric, x)


# ---------------------------------------------------------------------------
# Indicatrix geometry
# ---------------------------------------------------------------------------


def _require_minkowski(metric):
    if not metric.is_minkowski:
        raise PreconditionError(
            "indicatrix operations need an x-independent (Minkowski) norm"
        )


def tangent_basis(ft: FundamentalTensor, y):
    """g_y-orthonormal basis of the g_y-orthogonal complement of y."""
    n = len(y)
    y = np.asarray(y, dtype=float)
    gy = ft.g @ y
    # coordinate vectors least aligned with y, projected off y
    order = np.argsort(np.abs(gy))
    basis = []
    for idx in order[: n - 1]:
        v = np.eye(n)[idx] - (gy[idx] / float(y @ gy)) * y
        for b in basis:
            v = v - ft.inner(v, b) * b
        nv = np.sqrt(ft.inner(v, v))
        if nv < 1e-12:
            raise PreconditionError("degenerate tangent basis")
        basis.append(v / nv)
    return basis


def _check_tangent(ft, y, vecs, tol=1e-8):
    F = ft.F
    for v in vecs:
        if abs(ft.inner(y, v)) > tol * F * np.sqrt(ft.inner(v, v)):
            raise PreconditionError("input vector not tangent to the indicatrix")


def indicatrix_riemann(metric: MetricSpec, y, u, v, w) -> np.ndarray:
    """Curvature R(u,v)w of the induced indicatrix metric via the Cartan form.

    Uses C(C(u,w),v) - C(C(v,w),u) + g(v,w)u - g(u,w)v, with C(u,v) the
    g_y-dual vector of C_y(u, v, .).  Inputs must be g_y-orthogonal to y.
    """
    _require_minkowski(metric)
    y = np.asarray(y, dtype=float)
    sample = TangentSample(np.zeros(metric.n), y)
    ft = fundamental_tensor(metric, sample)
    _check_tangent(ft, y, [u, v, w])
    C = cartan_tensor(metric, sample)

    def cdual(a, b):
        rhs = np.einsum("ijk,i,j->k", C, a, b)
        return ft.g_inv @ rhs

    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    term = np.einsum("ijk,j,k->i", C, cdual(u, w), v) - np.einsum(
        "ijk,j,k->i", C, cdual(v, w), u
    )
    term = ft.g_inv @ term
    return term + ft.inner(v, w) * u - ft.inner(u, w) * v


def indicatrix_sectional(metric: MetricSpec, y, u, v) -> float:
    """Sectional curvature of the plane (u, v) tangent to the indicatrix."""
    sample = TangentSample(np.zeros(metric.n), np.asarray(y, dtype=float))
    ft = fundamental_tensor(metric, sample)
    R = indicatrix_riemann(metric, y, u, v, v)
    num = ft.inner(R, u)
    den = ft.inner(u, u) * ft.inner(v, v) - ft.inner(u, v) ** 2
    return float(num / den)


def indicatrix_gauss_oracle(metric: MetricSpec, y, h=2e-3) -> float:
    """Gauss curvature of the embedded indicatrix surface at y/F(y) (n = 3).

    Brioschi formula on the first fundamental form of the central-projection
    parametrization, with finite differences in the chart parameters; fully
    independent of the Cartan-form curvature route.
    """
    _require_minkowski(metric)
    if metric.n != 3:
        raise PreconditionError("the Gauss oracle is a surface computation (n = 3)")
    y = np.asarray(y, dtype=float)
    x0 = np.zeros(3)
    F0 = metric.F(x0, y)
    y = y / F0
    # chart directions transversal to y
    sample = TangentSample(x0, y)
    ft = fundamental_tensor(metric, sample)
    a, b = tangent_basis(ft, y)

    def point(s, t):
        nu = y + s * a + t * b
        return nu / metric.F(x0, nu)

    def first_form(s, t):
        # E, F, G of the induced metric g_{p(s,t)} at the surface point
        p = point(s, t)
        ps = (point(s + h, t) - point(s - h, t)) / (2 * h)
        pt = (point(s, t + h) - point(s, t - h)) / (2 * h)
        g = fundamental_tensor(metric, TangentSample(x0, p)).g
        return np.array([ps @ g @ ps, ps @ g @ pt, pt @ g @ pt])

    # Brioschi from E, F, G and their first/second parameter derivatives
    def efg_grid():
        vals = {}
        for i in (-2, -1, 0, 1, 2):
            for j in (-2, -1, 0, 1, 2):
                if abs(i) + abs(j) <= 2:
                    vals[(i, j)] = first_form(i * h, j * h)
        return vals

    V = efg_grid()
    E, F, G = V[(0, 0)]
    Es = (V[(1, 0)] - V[(-1, 0)]) / (2 * h)
    Et = (V[(0, 1)] - V[(0, -1)]) / (2 * h)
    Ess = (V[(2, 0)] - 2 * V[(0, 0)] + V[(-2, 0)]) / (4 * h * h)
    Ett = (V[(0, 2)] - 2 * V[(0, 0)] + V[(0, -2)]) / (4 * h * h)
    Est = (V[(1, 1)] - V[(1, -1)] - V[(-1, 1)] + V[(-1, -1)]) / (4 * h * h)
    Eu, Fu, Gu = Es
    Ev, Fv, Gv = Et
    Euu, Fuu, Guu = Ess
    Evv, Fvv, Gvv = Ett
    Euv, Fuv, Guv = Est
    m1 = np.array([
        [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E, F],
        [0.5 * Gv, F, G],
    ])
    m2 = np.array([
        [0.0, 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, E, F],
        [0.5 * Gu, F, G],
    ])
    det = E * G - F * F
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (det * det))


def santalo_volume(metric: MetricSpec, n_nodes=None) -> float:
    """Riemannian volume of the indicatrix in the induced metric.

    Only defined here for reversible Minkowski norms in dimensions 2 and 3;
    equals Vol(S^(n-1)) exactly when the norm is Euclidean.
    """
    _require_minkowski(metric)
    if not metric.reversible:
        raise PreconditionError("the indicatrix volume bound assumes a reversible norm")
    n = metric.n
    if n not in (2, 3):
        raise PreconditionError("indicatrix volume implemented for n in {2, 3}")
    x0 = np.zeros(n)
    if n == 2:
        m = n_nodes or 2048
        theta = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
        total = 0.0
        h = 1e-5
        for t in theta:
            def pt(tt):
                nu = np.array([np.cos(tt), np.sin(tt)])
                return nu / metric.F(x0, nu)

            p = pt(t)
            dp = (pt(t + h) - pt(t - h)) / (2 * h)
            g = fundamental_tensor(metric, TangentSample(x0, p)).g
            total += np.sqrt(dp @ g @ dp)
        return float(total * (2 * np.pi / m))

    npol, nazi = (n_nodes, 2 * n_nodes) if n_nodes else (48, 96)
    z, wz = np.polynomial.legendre.leggauss(npol)
    theta = np.arccos(z)
    phi = np.linspace(0.0, 2 * np.pi, nazi, endpoint=False)
    h = 1e-5
    total = 0.0
    for th, wt in zip(theta, wz):
        for ph in phi:
            def pt(a, b):
                nu = np.array([
                    np.sin(a) * np.cos(b), np.sin(a) * np.sin(b), np.cos(a)
                ])
                return nu / metric.F(x0, nu)

            p = pt(th, ph)
            pu = (pt(th + h, ph) - pt(th - h, ph)) / (2 * h)
            pv = (pt(th, ph + h) - pt(th, ph - h)) / (2 * h)
            g = fundamental_tensor(metric, TangentSample(x0, p)).g
            E = pu @ g @ pu
            Fm = pu @ g @ pv
            G = pv @ g @ pv
            # weight wt already includes sin(theta) via the z substitution
            total += np.sqrt(max(E * G - Fm * Fm, 0.0)) / np.sin(th) * wt
    return float(total * (2 * np.pi / nazi))


def indicatrix_bh_length(metric: MetricSpec, n_nodes=2048) -> float:
    """Busemann-Hausdorff length of the indicatrix curve (n = 2), reported
    for comparison of the dimension-dependent volume bounds."""
    _require_minkowski(metric)
    if metric.n != 2:
        raise PreconditionError("BH indicatrix length implemented for n = 2")
    x0 = np.zeros(2)
    theta = np.linspace(0.0, 2 * np.pi, n_nodes, endpoint=False)
    h = 1e-5
    total = 0.0
    for t in theta:
        def pt(tt):
            nu = np.array([np.cos(tt), np.sin(tt)])
            return nu / metric.F(x0, nu)

        dp = (pt(t + h) - pt(t - h)) / (2 * h)
        fwd = metric.F(x0, dp)
        bwd = metric.F(x0, -dp)
        total += 2.0 / (1.0 / fwd + 1.0 / bwd)
    return float(total * (2 * np.pi / n_nodes))
