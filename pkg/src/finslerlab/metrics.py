"""Built-in Finsler metrics: definitions, distances and validity checks.

Every metric is a MetricSpec whose evaluator is written against the
polymorphic math in :mod:`finslerlab.jets`, so the same code path serves
plain floats, batched numpy arrays and jets.  The catalog covers
Euclidean/Riemannian charts, Randers metrics, a Berwald product, a quartic
Minkowski norm, and the Funk/Hilbert metrics on strongly convex domains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import jets
from ._grids import halton, halton_directions, unit_ball_volume
from .errors import ConfigurationError, GeometryError, MetricValidityError
from .jets import Jet, JetSpec, lift

F_FLOOR = 1e-12


def _dot(u, v):
    s = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        s = s + a * b
    return s


def _find_jet(vals):
    for v in vals:
        if isinstance(v, Jet):
            return v
    return None


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexDomain:
    """Strongly convex bounded domain {phi < 0} with jet-capable boundary data.

    kind is "unit_ball" (phi = |z|^2 - 1) or "quartic_perturbed"
    (phi = |z|^2 + eps * sum z_i^4 - 1); both have positive-definite Hessian
    everywhere, so strong convexity holds for any eps >= 0.
    """

    kind: str
    n: int
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in ("unit_ball", "quartic_perturbed"):
            raise ConfigurationError(f"unknown domain kind {self.kind!r}")
        if self.eps < 0:
            raise ConfigurationError("quartic perturbation must be nonnegative")
        if self.n < 2:
            raise ConfigurationError("domain dimension must be >= 2")

    def phi(self, z):
        s = _dot(z, z)
        if self.kind == "quartic_perturbed" and self.eps != 0.0:
            q = z[0] * z[0] * z[0] * z[0]
            for zi in z[1:]:
                q = q + zi * zi * zi * zi
            s = s + self.eps * q
        return s - 1.0

    def grad_phi(self, z):
        if self.kind == "quartic_perturbed" and self.eps != 0.0:
            return [2.0 * zi + 4.0 * self.eps * zi * zi * zi for zi in z]
        return [2.0 * zi for zi in z]

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        z = [x[..., i] for i in range(self.n)]
        return self.phi(z) < 0.0

    def margin(self, x):
        """Positive inside the domain, zero on the boundary."""
        x = np.asarray(x, dtype=float)
        z = [x[..., i] for i in range(self.n)]
        return -self.phi(z)

    @property
    def bounding_radius(self):
        # phi >= |z|^2 - 1, so the domain sits inside the unit ball
        return 1.0

    def boundary_checks(self, n_samples=32):
        """Spot-check phi(0) < 0, nonzero gradient and convexity on the boundary."""
        if not self.phi([0.0] * self.n) < 0:
            raise MetricValidityError("domain does not contain the origin")
        dirs = halton_directions(self.n, n_samples)
        for d in dirs:
            r = brentq(lambda t: self.phi(list(t * d)), 0.0, 2.0)
            z = r * d
            g = np.array(self.grad_phi(list(z)))
            if np.linalg.norm(g) < 1e-10:
                raise MetricValidityError("vanishing boundary gradient", sample=z)
            h = 2.0 * np.eye(self.n)
            if self.kind == "quartic_perturbed":
                h = h + np.diag(12.0 * self.eps * z ** 2)
            if np.min(np.linalg.eigvalsh(h)) <= 0:
                raise MetricValidityError("boundary Hessian not positive definite", sample=z)


def unit_ball_domain(n):
    return ConvexDomain("unit_ball", n)


def quartic_domain(n, eps=0.1):
    return ConvexDomain("quartic_perturbed", n, eps)


@dataclass(frozen=True)
class ChartDomain:
    """Chart of definition for a metric: membership, boundary margin, sample box."""

    contains: object
    margin: object  # positive inside, 0 at the boundary; None when unbounded
    sample_box: tuple


def _ball_chart(n, radius=1.0):
    def contains(x):
        x = np.asarray(x, dtype=float)
        return np.sum(x ** 2, axis=-1) < radius ** 2

    def margin(x):
        x = np.asarray(x, dtype=float)
        return radius ** 2 - np.sum(x ** 2, axis=-1)

    return ChartDomain(contains, margin, ((-radius,) * n, (radius,) * n))


def _full_chart(n, box=1.5):
    def contains(x):
        x = np.asarray(x, dtype=float)
        return np.ones(x.shape[:-1], dtype=bool) if x.ndim > 1 else True

    return ChartDomain(contains, None, ((-box,) * n, (box,) * n))


def _convex_chart(domain: ConvexDomain):
    return ChartDomain(domain.contains, domain.margin,
                       ((-1.0,) * domain.n, (1.0,) * domain.n))


# ---------------------------------------------------------------------------
# Metric spec
# ---------------------------------------------------------------------------


@dataclass
class MetricSpec:
    """A chart-based Finsler metric with a jet-capable evaluator."""

    name: str
    n: int
    evaluator: object
    chart: ChartDomain
    reversible: bool
    is_minkowski: bool = False
    positively_complete_only: bool = False
    params: dict = field(default_factory=dict)
    convex_domain: ConvexDomain | None = None
    sigma_bh: object | None = None  # closed-form Busemann-Hausdorff density, or None

    def F(self, x, y):
        return float(self.evaluator(list(np.asarray(x, dtype=float)),
                                    list(np.asarray(y, dtype=float))))

    def F_batch(self, x, y):
        """Vectorized evaluation; x, y arrays of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xs = [x[..., i] for i in range(self.n)]
        ys = [y[..., i] for i in range(self.n)]
        return np.asarray(self.evaluator(xs, ys), dtype=float)

    def jet(self, x, y, mx, my) -> Jet:
        """F as a jet at the tangent point (x, y)."""
        spec = JetSpec(self.n, mx, my)
        xs, ys = lift(np.asarray(x, dtype=float), np.asarray(y, dtype=float), spec)
        return self.evaluator(xs, ys)

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"MetricSpec({self.name}, n={self.n}{', ' + ps if ps else ''})"


# ---------------------------------------------------------------------------
# Funk / Hilbert metrics
# ---------------------------------------------------------------------------


def funk_unit_ball(x, y):
    """Closed form on the unit ball, from solving |x + y/F|^2 = 1."""
    xy = _dot(x, y)
    yy = _dot(y, y)
    one_minus = 1.0 - _dot(x, x)
    return (jets.sqrt(xy * xy + yy * one_minus) + xy) / one_minus


def _ball_exit_parameter(x0, y0):
    """Closed-form s with |x0 + s y0| = 1, s > 0."""
    xy = np.sum(x0 * y0, axis=-1)
    yy = np.sum(y0 * y0, axis=-1)
    xx = np.sum(x0 * x0, axis=-1)
    return (np.sqrt(xy * xy + yy * (1.0 - xx)) - xy) / yy


def _funk_ray_scalar(domain, x0, y0):
    """Exit parameter s* > 0 with phi(x0 + s* y0) = 0 for plain floats."""
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    ny = np.linalg.norm(y0)
    if ny < F_FLOOR:
        raise GeometryError("funk metric evaluated on a vanishing vector")
    if domain.phi(list(x0)) >= 0:
        raise GeometryError(f"point {x0} outside the convex domain")
    if domain.kind == "unit_ball":
        return float(_ball_exit_parameter(x0, y0))
    s_hi = (domain.bounding_radius + np.linalg.norm(x0) + 1.0) / ny
    g = lambda s: domain.phi(list(x0 + s * y0))
    if g(s_hi) <= 0:
        raise GeometryError("ray failed to exit the convex domain")
    return brentq(g, 0.0, s_hi, xtol=1e-15, rtol=8.9e-16)


def _funk_ray_batch(domain, x0, y0, iters=70):
    """Vectorized exit parameter; x0, y0 of shape (m, n)."""
    if domain.kind == "unit_ball":
        return _ball_exit_parameter(x0, y0)
    ny = np.linalg.norm(y0, axis=-1)
    s_hi = (domain.bounding_radius + np.linalg.norm(x0, axis=-1) + 1.0) / ny
    s_lo = np.zeros_like(s_hi)

    def phi_at(s):
        z = x0 + s[..., None] * y0
        return domain.phi([z[..., i] for i in range(domain.n)])

    for _ in range(iters):
        mid = 0.5 * (s_lo + s_hi)
        inside = phi_at(mid) < 0.0
        s_lo = np.where(inside, mid, s_lo)
        s_hi = np.where(inside, s_hi, mid)
    return 0.5 * (s_lo + s_hi)


def funk_general(domain: ConvexDomain, x, y):
    """Funk metric on a convex domain: the unique F > 0 with phi(x + y/F) = 0.

    Jets are handled by Newton iteration in the truncated algebra, which is
    the implicit-function rule carried to all stored orders.
    """
    j = _find_jet(x) or _find_jet(y)
    if j is not None:
        ctx = j.ctx

        def as_jet(v):
            if isinstance(v, Jet):
                return v
            c = np.zeros(ctx.size)
            c[0] = float(v)
            return Jet(ctx, c, ctx.spec.max_x_order, ctx.spec.max_y_order)

        xj = [as_jet(v) for v in x]
        yj = [as_jet(v) for v in y]
        x0 = np.array([v.value for v in xj])
        y0 = np.array([v.value for v in yj])
        s_star = _funk_ray_scalar(domain, x0, y0)
        u = as_jet(s_star)
        for _ in range(4):
            z = [xi + yi * u for xi, yi in zip(xj, yj)]
            num = domain.phi(z)
            den = _dot(domain.grad_phi(z), yj)
            u = u - num / den
        return 1.0 / u

    arrs = [np.asarray(v, dtype=float) for v in x + y]
    if any(a.ndim > 0 for a in arrs):
        shape = np.broadcast_shapes(*[a.shape for a in arrs])
        x0 = np.stack([np.broadcast_to(np.asarray(v, dtype=float), shape) for v in x], axis=-1)
        y0 = np.stack([np.broadcast_to(np.asarray(v, dtype=float), shape) for v in y], axis=-1)
        return 1.0 / _funk_ray_batch(domain, x0, y0)
    return 1.0 / _funk_ray_scalar(domain, [float(v) for v in x], [float(v) for v in y])


def hilbert_metric(domain: ConvexDomain, x, y):
    """Symmetrized Funk metric; reversible by construction."""
    if domain.kind == "unit_ball":
        forward = funk_unit_ball(x, y)
        backward = funk_unit_ball(x, [-yi for yi in y])
    else:
        forward = funk_general(domain, x, y)
        backward = funk_general(domain, x, [-yi for yi in y])
    return 0.5 * (forward + backward)


def funk_distance(domain: ConvexDomain, p, q):
    """log of the exit-point distance ratio along the ray from p through q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if not domain.contains(p) or not domain.contains(q):
        raise GeometryError("distance endpoints must be interior points")
    u = q - p
    du = np.linalg.norm(u)
    if du == 0.0:
        return 0.0
    s = _funk_ray_scalar(domain, p, u)  # z = p + s u with s >= 1
    if s <= 1.0:
        raise GeometryError("ray exit before reaching the second endpoint")
    return float(np.log(s / (s - 1.0)))


def hilbert_distance(domain: ConvexDomain, p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.array_equal(p, q):
        return 0.0
    return 0.5 * (funk_distance(domain, p, q) + funk_distance(domain, q, p))


def funk_distance_batch(domain: ConvexDomain, p, Q):
    """d_f(p, q) for many interior points q at once."""
    p = np.asarray(p, dtype=float)
    Q = np.asarray(Q, dtype=float)
    u = Q - p
    du = np.linalg.norm(u, axis=-1)
    out = np.zeros(Q.shape[:-1])
    mask = du > 0
    if np.any(mask):
        P = np.broadcast_to(p, Q.shape)[mask]
        s = _funk_ray_batch(domain, P, u[mask])
        out[mask] = np.log(s / (s - 1.0))
    return out


def hilbert_distance_batch(domain: ConvexDomain, p, Q):
    p = np.asarray(p, dtype=float)
    Q = np.asarray(Q, dtype=float)
    forward = funk_distance_batch(domain, p, Q)
    u = p - Q
    du = np.linalg.norm(u, axis=-1)
    out = np.zeros(Q.shape[:-1])
    mask = du > 0
    if np.any(mask):
        s = _funk_ray_batch(domain, Q[mask], u[mask])
        out[mask] = np.log(s / (s - 1.0))
    return 0.5 * (forward + out)


def okada_residual(metric: MetricSpec, x, y):
    """Componentwise dF/dx^i - F * dF/dy^i; vanishes exactly for Funk metrics."""
    n = metric.n
    fj = metric.jet(x, y, 1, 1)
    f0 = fj.value
    res = np.empty(n)
    for i in range(n):
        a = tuple(1 if k == i else 0 for k in range(n))
        zero = tuple(0 for _ in range(n))
        res[i] = fj.partial(a, zero) - f0 * fj.partial(zero, a)
    return res


# ---------------------------------------------------------------------------
# Catalog evaluators
# ---------------------------------------------------------------------------


def _euclidean_eval(x, y):
    return jets.sqrt(_dot(y, y))


def _conformal_eval(sign):
    # 2|y| / (1 + sign*|x|^2): round sphere for +, hyperbolic ball for -
    def ev(x, y):
        return 2.0 * jets.sqrt(_dot(y, y)) / (1.0 + sign * _dot(x, x))

    return ev


def _quartic_eval(eps):
    def ev(x, y):
        yy = _dot(y, y)
        q = y[0] * y[0] * y[0] * y[0]
        for yi in y[1:]:
            q = q + yi * yi * yi * yi
        return jets.power(yy * yy + eps * q, 0.25)

    return ev


@dataclass(frozen=True)
class RandersData:
    """Riemannian metric a_ij(x) and 1-form b_i(x), with alpha-norm of b < 1."""

    alpha: object  # callable x -> (n, n) nested list of scalars
    beta: object   # callable x -> length-n list of scalars

    def norm_beta(self, x):
        """alpha-length of beta at a plain point x."""
        a = np.array([[float(v) for v in row] for row in self.alpha(list(x))])
        b = np.array([float(v) for v in self.beta(list(x))])
        return float(np.sqrt(b @ np.linalg.solve(a, b)))


def _randers_eval(data: RandersData):
    def ev(x, y):
        a = data.alpha(x)
        b = data.beta(x)
        quad = _dot([_dot(row, y) for row in a], y)
        return jets.sqrt(quad) + _dot(b, y)

    return ev


def _berwald_product_eval(c):
    # hyperbolic plane (conformal ball chart) times a line, with a constant
    # 1-form on the flat factor: beta is parallel, so the metric is Berwald.
    def ev(x, y):
        rho2 = x[0] * x[0] + x[1] * x[1]
        conf = 2.0 / (1.0 - rho2)
        alpha2 = conf * conf * (y[0] * y[0] + y[1] * y[1]) + y[2] * y[2]
        return jets.sqrt(alpha2) + c * y[2]

    return ev


# ---------------------------------------------------------------------------
# Busemann-Hausdorff density closed forms
# ---------------------------------------------------------------------------


def _const_sigma(value):
    def sigma(x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], value) if x.ndim > 1 else float(value)

    return sigma


def _conformal_sigma(sign, n):
    def sigma(x):
        x = np.asarray(x, dtype=float)
        conf = 2.0 / (1.0 + sign * np.sum(x ** 2, axis=-1))
        return conf ** n

    return sigma


def _klein_sigma(n):
    # Hilbert metric on the unit ball is the Klein metric
    def sigma(x):
        x = np.asarray(x, dtype=float)
        return (1.0 - np.sum(x ** 2, axis=-1)) ** (-(n + 1) / 2.0)

    return sigma


def _flat_randers_sigma(data: RandersData, n):
    def sigma(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return (1.0 - data.norm_beta(x) ** 2) ** ((n + 1) / 2.0)
        return np.array([(1.0 - data.norm_beta(p) ** 2) ** ((n + 1) / 2.0) for p in x])

    return sigma


def _berwald_product_sigma(c):
    def sigma(x):
        x = np.asarray(x, dtype=float)
        rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
        conf = 2.0 / (1.0 - rho2)
        return conf ** 2 * (1.0 - c ** 2) ** 2

    return sigma


def _domain_lebesgue_volume(domain: ConvexDomain, m=2048):
    """Lebesgue volume of the convex body by radial quadrature."""
    from ._grids import sphere_surface_nodes

    dirs, w = sphere_surface_nodes(domain.n)
    r = np.array([brentq(lambda t: domain.phi(list(t * d)), 0.0, 2.0) for d in dirs])
    return float(np.sum(w * r ** domain.n) / domain.n)


def _funk_sigma(domain: ConvexDomain):
    # the unit body {F_f(x, .) < 1} is the translate Omega - x, so the
    # Busemann-Hausdorff density of any Funk metric is constant
    if domain.kind == "unit_ball":
        return _const_sigma(1.0)
    vol = _domain_lebesgue_volume(domain)
    return _const_sigma(unit_ball_volume(domain.n) / vol)


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------


def chart_points(metric: MetricSpec, count, shrink=0.9):
    """Deterministic Halton points inside the metric's chart."""
    lo = np.asarray(metric.chart.sample_box[0], dtype=float)
    hi = np.asarray(metric.chart.sample_box[1], dtype=float)
    pts = []
    stream = halton(metric.n, 8 * count + 64)
    for u in stream:
        x = shrink * (lo + u * (hi - lo))
        if metric.chart.contains(x):
            pts.append(x)
            if len(pts) == count:
                break
    if len(pts) < count:
        raise ConfigurationError("could not draw enough chart points for validation")
    return np.array(pts)


def validate_metric(metric: MetricSpec, n_samples=100,
                    tol_homog=1e-10, tol_rev=1e-10):
    """Positivity, homogeneity (F2a), definiteness (F2b), reversibility claims.

    Raises MetricValidityError naming the first offending sample.
    """
    pts = chart_points(metric, n_samples)
    dirs = halton_directions(metric.n, n_samples)
    n = metric.n
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    for x, d in zip(pts, dirs):
        F = metric.F(x, d)
        if not np.isfinite(F) or F <= F_FLOOR:
            raise MetricValidityError(f"F not positive at sample", sample=(x, d))
        for lam in (0.5, 2.0):
            if abs(metric.F(x, lam * d) - lam * F) > tol_homog * max(1.0, F):
                raise MetricValidityError("homogeneity F(x, lam y) = lam F(x, y) violated",
                                          sample=(x, d, lam))
        fj = metric.jet(x, d, 0, 2)
        f2 = fj * fj
        g = np.empty((n, n))
        zero = tuple(0 for _ in range(n))
        for i, j in idx:
            b = tuple((1 if k == i else 0) + (1 if k == j else 0) for k in range(n))
            g[i, j] = g[j, i] = 0.5 * f2.partial(zero, b)
        if np.min(np.linalg.eigvalsh(g)) <= 0:
            raise MetricValidityError("fundamental tensor not positive definite",
                                      sample=(x, d))
        if metric.reversible:
            if abs(F - metric.F(x, -d)) > tol_rev * F:
                raise MetricValidityError("metric flagged reversible is not",
                                          sample=(x, d))
    return True


def _build(name, n, evaluator, chart, reversible, validate=True,
           n_validation=100, **kw):
    m = MetricSpec(name=name, n=n, evaluator=evaluator, chart=chart,
                   reversible=reversible, **kw)
    if validate:
        validate_metric(m, n_samples=n_validation)
    return m


def make_euclidean(n=2, validate=True):
    return _build("euclidean", n, _euclidean_eval, _full_chart(n), True,
                  validate=validate, is_minkowski=True,
                  sigma_bh=_const_sigma(1.0), params={"n": n})


def make_sphere(n=2, validate=True):
    """Round sphere of curvature +1 in a conformally flat chart."""
    return _build("riemannian_sphere", n, _conformal_eval(+1.0), _full_chart(n), True,
                  validate=validate, sigma_bh=_conformal_sigma(+1.0, n), params={"n": n})


def make_hyperbolic(n=2, validate=True):
    """Hyperbolic space of curvature -1 in the conformal ball chart."""
    return _build("riemannian_hyperbolic", n, _conformal_eval(-1.0), _ball_chart(n), True,
                  validate=validate, sigma_bh=_conformal_sigma(-1.0, n), params={"n": n})


def make_quartic(n=2, eps=0.1, validate=True):
    if eps < 0:
        raise ConfigurationError("quartic perturbation must be nonnegative")
    return _build("quartic_norm", n, _quartic_eval(eps), _full_chart(n), True,
                  validate=validate, is_minkowski=True,
                  params={"n": n, "eps": eps})


def make_randers(n=2, variant="curl", c=0.3, validate=True,
                 data: RandersData | None = None):
    """Randers metrics F = alpha + beta on a flat alpha.

    variant "const": constant beta (locally Minkowski, Berwald);
    variant "closed": beta = c d(sin x1), closed but not parallel, so the
    geodesics agree with alpha's straight lines while B != 0;
    variant "curl": beta = c x2 dx1, with dbeta != 0.
    Custom fields go through `data`.
    """
    if data is None:
        if not 0 <= c < 1:
            raise ConfigurationError("randers parameter must satisfy 0 <= c < 1")
        identity = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
        alpha = lambda x: identity
        if variant == "const":
            beta = lambda x: [c] + [0.0] * (n - 1)
        elif variant == "closed":
            beta = lambda x: [c * jets.cos(x[0])] + [0.0] * (n - 1)
        elif variant == "curl":
            beta = lambda x: [c * x[1]] + [0.0] * (n - 1)
        else:
            raise ConfigurationError(f"unknown randers variant {variant!r}")
        data = RandersData(alpha, beta)
    # the curl variant needs |x2| < 1/c to keep the beta norm below 1
    chart = _ball_chart(n) if variant == "curl" and c > 0 else _full_chart(n)
    pts = halton(n, 64) * 1.8 - 0.9
    for p in pts:
        if chart.contains(p) and data.norm_beta(p) >= 1.0:
            raise MetricValidityError("alpha-length of beta must stay below 1", sample=p)
    sigma = _flat_randers_sigma(data, n) if variant in ("const", "closed", "curl") else None
    return _build("randers", n, _randers_eval(data), chart,
                  reversible=(variant == "const" and c == 0), validate=validate,
                  params={"n": n, "variant": variant, "c": c}, sigma_bh=sigma)


def make_berwald_product(c=0.25, validate=True):
    """Hyperbolic plane x line with a parallel 1-form: Berwald, non-Riemannian."""
    if not 0 <= c < 1:
        raise ConfigurationError("berwald product parameter must satisfy 0 <= c < 1")
    n = 3

    def contains(x):
        x = np.asarray(x, dtype=float)
        return (x[..., 0] ** 2 + x[..., 1] ** 2 < 1.0) & (np.abs(x[..., 2]) < 4.0)

    def margin(x):
        x = np.asarray(x, dtype=float)
        return np.minimum(1.0 - x[..., 0] ** 2 - x[..., 1] ** 2, 4.0 - np.abs(x[..., 2]))

    chart = ChartDomain(contains, margin, ((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)))
    return _build("berwald_product", n, _berwald_product_eval(c), chart,
                  reversible=(c == 0), validate=validate,
                  params={"n": n, "c": c}, sigma_bh=_berwald_product_sigma(c))


def _domain_from_param(n, domain):
    if isinstance(domain, ConvexDomain):
        return domain
    if domain in (None, "unit_ball"):
        return unit_ball_domain(n)
    if isinstance(domain, str) and domain.startswith("quartic"):
        eps = float(domain.split(":", 1)[1]) if ":" in domain else 0.1
        return quartic_domain(n, eps)
    raise ConfigurationError(f"unknown domain parameter {domain!r}")


def make_funk(n=2, domain=None, validate=True):
    dom = _domain_from_param(n, domain)
    dom.boundary_checks()
    if dom.kind == "unit_ball":
        ev = funk_unit_ball
    else:
        ev = lambda x, y: funk_general(dom, x, y)
    return _build("funk", n, ev, _convex_chart(dom), reversible=False,
                  validate=validate, positively_complete_only=True,
                  convex_domain=dom, sigma_bh=_funk_sigma(dom),
                  params={"n": n, "domain": dom.kind, "eps": dom.eps})


def make_hilbert(n=2, domain=None, validate=True):
    dom = _domain_from_param(n, domain)
    dom.boundary_checks()
    ev = lambda x, y: hilbert_metric(dom, x, y)
    sigma = _klein_sigma(n) if dom.kind == "unit_ball" else None
    return _build("hilbert", n, ev, _convex_chart(dom), reversible=True,
                  validate=validate, convex_domain=dom, sigma_bh=sigma,
                  params={"n": n, "domain": dom.kind, "eps": dom.eps})


def zoo_constructors():
    """Catalog of metric factories addressable by string id."""
    return {
        "euclidean": make_euclidean,
        "riemannian_sphere": make_sphere,
        "riemannian_hyperbolic": make_hyperbolic,
        "randers": make_randers,
        "berwald_product": make_berwald_product,
        "quartic_norm": make_quartic,
        "funk": make_funk,
        "hilbert": make_hilbert,
    }


def make_metric(name, **params) -> MetricSpec:
    zoo = zoo_constructors()
    if name not in zoo:
        raise ConfigurationError(
            f"unknown metric id {name!r}; available: {', '.join(sorted(zoo))}"
        )
    return zoo[name](**params)
