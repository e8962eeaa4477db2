"""Truncated multivariate Taylor (jet) arithmetic on base/fiber coordinates.

A jet stores the Taylor coefficients of a scalar function of the 2n
coordinates (x, y) at an expansion point, exactly to truncation order:
every multi-index pair (a, b) with |a| <= max_x_order and |b| <= max_y_order
is kept.  Arithmetic on jets reproduces the coefficients of the composed
function, so one evaluation of a metric through this module yields all the
mixed partial derivatives the curvature machinery needs.

Base (x) orders are capped at 2 and fiber (y) orders at 5; larger requests
are rejected at configuration time.  A finite-difference oracle with
Richardson extrapolation is provided for cross-validation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, JetDomainError

MAX_X_ORDER = 2
MAX_Y_ORDER = 5

_SCALARS = (int, float, np.integer, np.floating)


@dataclass(frozen=True)
class JetSpec:
    """Dimension and truncation orders of a jet algebra."""

    n: int
    max_x_order: int
    max_y_order: int

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError(f"jet dimension must be >= 2, got {self.n}")
        if not 0 <= self.max_x_order <= MAX_X_ORDER:
            raise ConfigurationError(
                f"base order {self.max_x_order} outside supported range [0, {MAX_X_ORDER}]"
            )
        if not 0 <= self.max_y_order <= MAX_Y_ORDER:
            raise ConfigurationError(
                f"fiber order {self.max_y_order} outside supported range [0, {MAX_Y_ORDER}]"
            )


def _multi_indices(nvars, max_order):
    idx = [
        t
        for t in itertools.product(range(max_order + 1), repeat=nvars)
        if sum(t) <= max_order
    ]
    idx.sort(key=lambda t: (sum(t), t))
    return idx


class _JetContext:
    """Cached combinatorics for one JetSpec: basis, product and shift tables."""

    def __init__(self, spec: JetSpec):
        n = spec.n
        self.spec = spec
        self.xidx = _multi_indices(n, spec.max_x_order)
        self.yidx = _multi_indices(n, spec.max_y_order)
        self.nx = len(self.xidx)
        self.ny = len(self.yidx)
        self.size = self.nx * self.ny
        self.xpos = {a: i for i, a in enumerate(self.xidx)}
        self.ypos = {b: i for i, b in enumerate(self.yidx)}

        xdeg = np.array([sum(a) for a in self.xidx], dtype=np.int64)
        ydeg = np.array([sum(b) for b in self.yidx], dtype=np.int64)
        self.xdeg = np.repeat(xdeg, self.ny)
        self.ydeg = np.tile(ydeg, self.nx)

        fact = np.empty(self.size)
        for i, a in enumerate(self.xidx):
            fa = float(np.prod([math.factorial(k) for k in a]))
            for j, b in enumerate(self.yidx):
                fb = float(np.prod([math.factorial(k) for k in b]))
                fact[i * self.ny + j] = fa * fb
        self.factorial = fact

        self._build_mul_table(spec)
        self._build_shift_tables(spec)
        self._masks = {}

    def _build_mul_table(self, spec):
        xpairs = []
        for i1, a1 in enumerate(self.xidx):
            for i2, a2 in enumerate(self.xidx):
                s = tuple(u + v for u, v in zip(a1, a2))
                if sum(s) <= spec.max_x_order:
                    xpairs.append((i1, i2, self.xpos[s]))
        ypairs = []
        for j1, b1 in enumerate(self.yidx):
            for j2, b2 in enumerate(self.yidx):
                s = tuple(u + v for u, v in zip(b1, b2))
                if sum(s) <= spec.max_y_order:
                    ypairs.append((j1, j2, self.ypos[s]))
        xa, xb, xo = (np.array(t, dtype=np.int64) for t in zip(*xpairs))
        ya, yb, yo = (np.array(t, dtype=np.int64) for t in zip(*ypairs))
        ny = self.ny
        self.tab_a = (xa[:, None] * ny + ya[None, :]).ravel()
        self.tab_b = (xb[:, None] * ny + yb[None, :]).ravel()
        self.tab_out = (xo[:, None] * ny + yo[None, :]).ravel()

    def _build_shift_tables(self, spec):
        n = spec.n
        ny = self.ny
        self.dx_src = np.zeros((n, self.size), dtype=np.int64)
        self.dx_fac = np.zeros((n, self.size))
        self.dy_src = np.zeros((n, self.size), dtype=np.int64)
        self.dy_fac = np.zeros((n, self.size))
        for v in range(n):
            for i, a in enumerate(self.xidx):
                up = list(a)
                up[v] += 1
                up = tuple(up)
                if sum(up) <= spec.max_x_order:
                    for j in range(ny):
                        k = i * ny + j
                        self.dx_src[v, k] = self.xpos[up] * ny + j
                        self.dx_fac[v, k] = up[v]
            for j, b in enumerate(self.yidx):
                up = list(b)
                up[v] += 1
                up = tuple(up)
                if sum(up) <= spec.max_y_order:
                    for i in range(self.nx):
                        k = i * ny + j
                        self.dy_src[v, k] = i * ny + self.ypos[up]
                        self.dy_fac[v, k] = up[v]

    def mask(self, vx, vy):
        key = (vx, vy)
        m = self._masks.get(key)
        if m is None:
            m = (self.xdeg <= vx) & (self.ydeg <= vy)
            self._masks[key] = m
        return m

    def slot(self, a, b):
        return self.xpos[tuple(a)] * self.ny + self.ypos[tuple(b)]


_CONTEXTS: dict[JetSpec, _JetContext] = {}


def _context(spec: JetSpec) -> _JetContext:
    ctx = _CONTEXTS.get(spec)
    if ctx is None:
        ctx = _JetContext(spec)
        _CONTEXTS[spec] = ctx
    return ctx


class Jet:
    """One element of the truncated Taylor algebra.

    ``coeffs[k]`` is the normalized coefficient (partial derivative divided
    by a! b!) for basis slot k.  ``vx``/``vy`` are the orders up to which the
    stored coefficients are trusted; differentiating a jet lowers them.
    Jets are immutable values; all operations return new jets.
    """

    __slots__ = ("ctx", "coeffs", "vx", "vy")

    def __init__(self, ctx, coeffs, vx, vy):
        coeffs = np.where(ctx.mask(vx, vy), coeffs, 0.0)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "vx", vx)
        object.__setattr__(self, "vy", vy)

    def __setattr__(self, name, value):
        raise AttributeError("jets are immutable")

    # -- inspection ---------------------------------------------------------

    @property
    def spec(self) -> JetSpec:
        return self.ctx.spec

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def partial(self, a, b) -> float:
        """Raw mixed partial derivative: a! b! times the stored coefficient."""
        a = tuple(int(k) for k in a)
        b = tuple(int(k) for k in b)
        if len(a) != self.spec.n or len(b) != self.spec.n:
            raise ConfigurationError("multi-index length does not match dimension")
        if sum(a) > self.vx or sum(b) > self.vy:
            raise ConfigurationError(
                f"partial order ({sum(a)},{sum(b)}) exceeds valid orders ({self.vx},{self.vy})"
            )
        k = self.ctx.slot(a, b)
        return float(self.coeffs[k] * self.ctx.factorial[k])

    # -- constant / coercion helpers ---------------------------------------

    def _const_like(self, value, vx=None, vy=None):
        c = np.zeros(self.ctx.size)
        c[0] = value
        return Jet(self.ctx, c, self.vx if vx is None else vx, self.vy if vy is None else vy)

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.ctx is not self.ctx:
                raise ConfigurationError("jets from different specs cannot be mixed")
            return other
        if isinstance(other, _SCALARS):
            return self._const_like(float(other), self.spec.max_x_order, self.spec.max_y_order)
        return None

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, _SCALARS):
            c = self.coeffs.copy()
            c[0] += float(other)
            return Jet(self.ctx, c, self.vx, self.vy)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.ctx, self.coeffs + o.coeffs, min(self.vx, o.vx), min(self.vy, o.vy))

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.ctx, -self.coeffs, self.vx, self.vy)

    def __sub__(self, other):
        if isinstance(other, _SCALARS):
            return self.__add__(-float(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.ctx, self.coeffs - o.coeffs, min(self.vx, o.vx), min(self.vy, o.vy))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            return Jet(self.ctx, self.coeffs * float(other), self.vx, self.vy)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        ctx = self.ctx
        prod = self.coeffs[ctx.tab_a] * o.coeffs[ctx.tab_b]
        c = np.bincount(ctx.tab_out, weights=prod, minlength=ctx.size)
        return Jet(ctx, c, min(self.vx, o.vx), min(self.vy, o.vy))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _SCALARS):
            if other == 0:
                raise ZeroDivisionError("jet divided by zero scalar")
            return Jet(self.ctx, self.coeffs / float(other), self.vx, self.vy)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o._reciprocal()

    def __rtruediv__(self, other):
        if isinstance(other, _SCALARS):
            return self._reciprocal() * float(other)
        return NotImplemented

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            p = int(p)
            if p < 0:
                return self._reciprocal() ** (-p)
            out = self._const_like(1.0)
            base = self
            while p:
                if p & 1:
                    out = out * base
                base = base * base if p > 1 else base
                p >>= 1
            return out
        if isinstance(p, _SCALARS):
            return self._pow_real(float(p))
        return NotImplemented

    # -- analytic functions via truncated series ----------------------------

    def _nilpotency(self):
        return self.vx + self.vy

    def _series(self, coeff_fn, opname, require=None):
        u0 = self.value
        if require is not None and not require(u0):
            raise JetDomainError(f"{opname} of jet with constant term {u0}")
        K = self._nilpotency()
        cs = coeff_fn(u0, K)
        uhat = Jet(self.ctx, np.where(np.arange(self.ctx.size) == 0, 0.0, self.coeffs),
                   self.vx, self.vy)
        out = self._const_like(cs[K])
        for k in range(K - 1, -1, -1):
            out = out * uhat + cs[k]
        return out

    def _reciprocal(self):
        if self.value == 0.0:
            raise JetDomainError("division by jet with zero constant term")
        return self._pow_real(-1.0)

    def _pow_real(self, p):
        def coeffs(u0, K):
            cs = []
            c = u0 ** p
            cs.append(c)
            for k in range(1, K + 1):
                c = c * (p - (k - 1)) / k / u0
                cs.append(c)
            return cs

        if self.value <= 0.0:
            raise JetDomainError(f"real power {p} of jet with nonpositive constant term")
        return self._series(coeffs, f"pow({p})")

    def sqrt(self):
        if self.value <= 0.0:
            raise JetDomainError("sqrt of jet with nonpositive constant term")
        return self._pow_real(0.5)

    def log(self):
        def coeffs(u0, K):
            cs = [math.log(u0)]
            for k in range(1, K + 1):
                cs.append((-1.0) ** (k - 1) / (k * u0 ** k))
            return cs

        return self._series(coeffs, "log", require=lambda u: u > 0.0)

    def exp(self):
        def coeffs(u0, K):
            e = math.exp(u0)
            return [e / math.factorial(k) for k in range(K + 1)]

        return self._series(coeffs, "exp")

    def sin(self):
        def coeffs(u0, K):
            cycle = [math.sin(u0), math.cos(u0), -math.sin(u0), -math.cos(u0)]
            return [cycle[k % 4] / math.factorial(k) for k in range(K + 1)]

        return self._series(coeffs, "sin")

    def cos(self):
        def coeffs(u0, K):
            cycle = [math.cos(u0), -math.sin(u0), -math.cos(u0), math.sin(u0)]
            return [cycle[k % 4] / math.factorial(k) for k in range(K + 1)]

        return self._series(coeffs, "cos")

    def sinh(self):
        def coeffs(u0, K):
            cycle = [math.sinh(u0), math.cosh(u0)]
            return [cycle[k % 2] / math.factorial(k) for k in range(K + 1)]

        return self._series(coeffs, "sinh")

    def cosh(self):
        def coeffs(u0, K):
            cycle = [math.cosh(u0), math.sinh(u0)]
            return [cycle[k % 2] / math.factorial(k) for k in range(K + 1)]

        return self._series(coeffs, "cosh")

    # -- polynomial differentiation ------------------------------------------

    def dx(self, i):
        """Derivative with respect to base coordinate x^i (validity drops by one)."""
        if not 0 <= i < self.spec.n:
            raise ConfigurationError(f"base variable index {i} out of range")
        if self.vx < 1:
            raise ConfigurationError("jet has no base orders left to differentiate")
        ctx = self.ctx
        c = self.coeffs[ctx.dx_src[i]] * ctx.dx_fac[i]
        return Jet(ctx, c, self.vx - 1, self.vy)

    def dy(self, i):
        """Derivative with respect to fiber coordinate y^i (validity drops by one)."""
        if not 0 <= i < self.spec.n:
            raise ConfigurationError(f"fiber variable index {i} out of range")
        if self.vy < 1:
            raise ConfigurationError("jet has no fiber orders left to differentiate")
        ctx = self.ctx
        c = self.coeffs[ctx.dy_src[i]] * ctx.dy_fac[i]
        return Jet(ctx, c, self.vx, self.vy - 1)

    def __repr__(self):
        return (f"Jet(n={self.spec.n}, orders=({self.spec.max_x_order},{self.spec.max_y_order}), "
                f"valid=({self.vx},{self.vy}), value={self.value:.6g})")


# -- construction -------------------------------------------------------------


def constant(spec: JetSpec, value: float) -> Jet:
    ctx = _context(spec)
    c = np.zeros(ctx.size)
    c[0] = float(value)
    return Jet(ctx, c, spec.max_x_order, spec.max_y_order)


def lift(x, y, spec: JetSpec):
    """Seed coordinate jets at the expansion point (x, y).

    Returns two lists of n jets each: the base coordinates and the fiber
    coordinates, carrying unit first-order coefficients in their own
    variable.  Any smooth expression of them evaluates to its exact Taylor
    coefficients at (x, y).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (spec.n,) or y.shape != (spec.n,):
        raise ConfigurationError(
            f"expansion point must have {spec.n} base and {spec.n} fiber coordinates"
        )
    ctx = _context(spec)
    e = [tuple(1 if j == i else 0 for j in range(spec.n)) for i in range(spec.n)]
    zero = tuple(0 for _ in range(spec.n))
    xs = []
    ys = []
    for i in range(spec.n):
        c = np.zeros(ctx.size)
        c[0] = x[i]
        if spec.max_x_order >= 1:
            c[ctx.slot(e[i], zero)] = 1.0
        xs.append(Jet(ctx, c, spec.max_x_order, spec.max_y_order))
    for i in range(spec.n):
        c = np.zeros(ctx.size)
        c[0] = y[i]
        if spec.max_y_order >= 1:
            c[ctx.slot(zero, e[i])] = 1.0
        ys.append(Jet(ctx, c, spec.max_x_order, spec.max_y_order))
    return xs, ys


def partial(j: Jet, a, b) -> float:
    return j.partial(a, b)


# -- scalar/array/jet polymorphic math ----------------------------------------
#
# Metric evaluators are written against these wrappers so the same code runs
# on plain floats, numpy arrays (batch evaluation) and jets.


def sqrt(v):
    return v.sqrt() if isinstance(v, Jet) else np.sqrt(v)


def log(v):
    return v.log() if isinstance(v, Jet) else np.log(v)


def exp(v):
    return v.exp() if isinstance(v, Jet) else np.exp(v)


def sin(v):
    return v.sin() if isinstance(v, Jet) else np.sin(v)


def cos(v):
    return v.cos() if isinstance(v, Jet) else np.cos(v)


def sinh(v):
    return v.sinh() if isinstance(v, Jet) else np.sinh(v)


def cosh(v):
    return v.cosh() if isinstance(v, Jet) else np.cosh(v)


def power(v, p):
    return v.__pow__(p) if isinstance(v, Jet) else np.power(v, p)


def smooth_max(a, b, eps=1e-6):
    """Differentiable softening of max(a, b); exact as eps -> 0."""
    d = a - b
    return 0.5 * (a + b + sqrt(d * d + eps * eps))


# -- finite-difference oracle --------------------------------------------------


@dataclass(frozen=True)
class FdScheme:
    """Central-difference settings: base step and Richardson levels (1-3)."""

    step: float = 1e-3
    richardson_levels: int = 2

    def __post_init__(self):
        if self.step <= 0:
            raise ConfigurationError("finite-difference step must be positive")
        if not 1 <= self.richardson_levels <= 3:
            raise ConfigurationError("richardson_levels must be in 1..3")


@dataclass(frozen=True)
class FdEstimate:
    value: float
    error: float
    ok: bool


# second-order central stencils for the k-th derivative, k = 0..4
_STENCILS = {
    0: ((0, 1.0),),
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


def _fd_single(f, x, y, vars_orders, steps):
    """One tensor-product central-difference pass at the given steps."""
    stencils = [_STENCILS[k] for _, _, k in vars_orders]
    total = 0.0
    denom = 1.0
    for (_, _, k), h in zip(vars_orders, steps):
        denom *= h ** k
    for combo in itertools.product(*stencils):
        xs = x.copy()
        ys = y.copy()
        w = 1.0
        for (kind, idx, _), (off, cw), h in zip(vars_orders, combo, steps):
            w *= cw
            if kind == 0:
                xs[idx] += off * h
            else:
                ys[idx] += off * h
        val = f(xs, ys)
        if not np.isfinite(val):
            return None
        total += w * float(val)
    return total / denom


def fd_oracle(f, x, y, a, b, scheme: FdScheme = FdScheme()) -> FdEstimate:
    """Mixed partial derivative of f(x, y) by central differences.

    Richardson extrapolation runs over step doublings (the base step is the
    smallest used), which keeps roundoff amplification bounded for the
    higher orders.  Total order up to 4 is supported; non-finite function
    values inside any stencil yield ok=False rather than a silent number.
    """
    x = np.asarray(x, dtype=float).copy()
    y = np.asarray(y, dtype=float).copy()
    a = tuple(int(k) for k in a)
    b = tuple(int(k) for k in b)
    vars_orders = [(0, i, k) for i, k in enumerate(a) if k > 0]
    vars_orders += [(1, i, k) for i, k in enumerate(b) if k > 0]
    total_order = sum(a) + sum(b)
    if any(k > 4 for _, _, k in vars_orders) or total_order > 4:
        raise ConfigurationError("fd_oracle supports per-variable and total order <= 4")
    if not vars_orders:
        v = float(f(x, y))
        return FdEstimate(v, 0.0, np.isfinite(v))

    base = []
    for kind, idx, _ in vars_orders:
        c = x[idx] if kind == 0 else y[idx]
        bump = 5.0 if total_order >= 3 else 1.0
        base.append(scheme.step * bump * max(1.0, abs(c)))

    levels = scheme.richardson_levels
    raw = []
    for lev in range(levels + 1):
        steps = [h * 2.0 ** lev for h in base]
        d = _fd_single(f, x, y, vars_orders, steps)
        if d is None:
            return FdEstimate(float("nan"), float("inf"), False)
        raw.append(d)

    def extrapolate(vals):
        vals = list(vals)
        m = 1
        while len(vals) > 1:
            fac = 4.0 ** m
            vals = [
                (fac * vals[i] - vals[i + 1]) / (fac - 1.0)
                for i in range(len(vals) - 1)
            ]
            m += 1
        return vals[0]

    value = extrapolate(raw)
    prev = extrapolate(raw[:-1])
    err = abs(value - prev) if levels >= 1 else abs(value) * 1e-8
    return FdEstimate(float(value), float(err), True)
