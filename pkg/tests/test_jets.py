"""Jet algebra: exact polynomials, elementary ops, FD oracle cross-checks."""

import math

import numpy as np
import pytest

from finslerlab import jets
from finslerlab.errors import ConfigurationError, JetDomainError
from finslerlab.jets import FdScheme, Jet, JetSpec, fd_oracle, lift


def _rng():
    return np.random.default_rng(20240817)


def _random_smooth_jet(spec, rng, positive=False):
    """A generic smooth composition seeded with random coefficients."""
    xs, ys = lift(rng.uniform(0.3, 1.2, spec.n), rng.uniform(0.4, 1.3, spec.n), spec)
    c = rng.uniform(-0.5, 0.5, 6)
    j = 1.5 + c[0] * xs[0] + c[1] * ys[0] * ys[1] + c[2] * xs[1] * ys[0]
    j = j + c[3] * jets.sin(ys[0] * c[4]) + jets.exp(xs[0] * c[5] * 0.3)
    if positive:
        j = j * j + 0.7
    return j


class TestLift:
    def test_polynomial_exact(self):
        spec = JetSpec(2, 0, 2)
        xs, ys = lift([0.0, 0.0], [1.0, 0.0], spec)
        f = ys[0] * ys[0] + ys[1] * ys[1]
        assert f.value == pytest.approx(1.0, abs=0)
        assert f.partial((0, 0), (0, 2)) == pytest.approx(2.0, abs=0)

    def test_constant_has_no_higher_orders(self):
        spec = JetSpec(2, 2, 3)
        xs, ys = lift([0.1, 0.2], [0.5, 0.7], spec)
        f = 0.0 * xs[0] + 7.0
        assert f.value == 7.0
        assert np.all(f.coeffs[1:] == 0.0)

    def test_norm_derivative(self):
        spec = JetSpec(2, 0, 2)
        _, ys = lift([0.0, 0.0], [3.0, 4.0], spec)
        f = jets.sqrt(ys[0] * ys[0] + ys[1] * ys[1])
        assert f.value == pytest.approx(5.0, rel=1e-14)
        assert f.partial((0, 0), (1, 0)) == pytest.approx(0.6, rel=1e-14)

    def test_bad_point_shape(self):
        with pytest.raises(ConfigurationError):
            lift([0.0], [1.0], JetSpec(2, 1, 1))


class TestSpecValidation:
    def test_order_caps(self):
        with pytest.raises(ConfigurationError):
            JetSpec(2, 3, 2)
        with pytest.raises(ConfigurationError):
            JetSpec(2, 1, 6)
        with pytest.raises(ConfigurationError):
            JetSpec(1, 1, 1)

    def test_partial_beyond_validity(self):
        spec = JetSpec(2, 1, 3)
        _, ys = lift([0.0, 0.0], [1.0, 2.0], spec)
        g = ys[0].dy(0)  # fiber validity drops to 2
        with pytest.raises(ConfigurationError):
            g.partial((0, 0), (0, 3))


class TestElementaryOps:
    def test_sqrt_first_order(self):
        spec = JetSpec(2, 0, 2)
        _, ys = lift([0.0, 0.0], [4.0, 1.0], spec)
        r = jets.sqrt(ys[0])
        assert r.value == pytest.approx(2.0)
        assert r.partial((0, 0), (1, 0)) == pytest.approx(0.25)

    def test_log_exp_roundtrip(self):
        spec = JetSpec(2, 1, 4)
        rng = _rng()
        for _ in range(10):
            j = _random_smooth_jet(spec, rng)
            back = jets.log(jets.exp(j))
            np.testing.assert_allclose(back.coeffs, j.coeffs, rtol=1e-12, atol=1e-12)

    def test_product_rule(self):
        spec = JetSpec(2, 1, 4)
        rng = _rng()
        for _ in range(10):
            j = _random_smooth_jet(spec, rng)
            sq = j * j
            for i in range(2):
                lhs = sq.dy(i)
                rhs = 2.0 * j * j.dy(i)
                np.testing.assert_allclose(
                    lhs.coeffs[lhs.ctx.mask(lhs.vx, lhs.vy)],
                    rhs.coeffs[rhs.ctx.mask(rhs.vx, rhs.vy)],
                    rtol=1e-12, atol=1e-12,
                )

    def test_trig_identity(self):
        spec = JetSpec(2, 1, 3)
        j = _random_smooth_jet(spec, _rng())
        one = jets.sin(j) * jets.sin(j) + jets.cos(j) * jets.cos(j)
        assert one.value == pytest.approx(1.0, rel=1e-13)
        assert np.max(np.abs(one.coeffs[1:])) < 1e-12

    def test_hyperbolic_identity(self):
        spec = JetSpec(2, 1, 3)
        j = _random_smooth_jet(spec, _rng())
        one = jets.cosh(j) * jets.cosh(j) - jets.sinh(j) * jets.sinh(j)
        assert one.value == pytest.approx(1.0, rel=1e-13)
        assert np.max(np.abs(one.coeffs[1:])) < 1e-12

    def test_division(self):
        spec = JetSpec(2, 1, 3)
        rng = _rng()
        a = _random_smooth_jet(spec, rng)
        b = _random_smooth_jet(spec, rng, positive=True)
        q = a / b
        np.testing.assert_allclose((q * b).coeffs, a.coeffs, rtol=1e-11, atol=1e-12)

    def test_scalar_mixing(self):
        spec = JetSpec(2, 1, 2)
        _, ys = lift([0.0, 0.0], [2.0, 3.0], spec)
        j = 1.0 + 2.0 * ys[0] - ys[1] / 3.0
        assert j.value == pytest.approx(4.0)
        assert (5.0 - j).value == pytest.approx(1.0)
        assert (6.0 / (j + 2.0)).value == pytest.approx(1.0)

    def test_pow_int_matches_mul(self):
        spec = JetSpec(2, 1, 3)
        j = _random_smooth_jet(spec, _rng())
        np.testing.assert_allclose((j ** 3).coeffs, (j * j * j).coeffs, rtol=1e-12)

    def test_pow_real(self):
        spec = JetSpec(2, 1, 3)
        j = _random_smooth_jet(spec, _rng(), positive=True)
        q = jets.power(j, 0.25)
        np.testing.assert_allclose((q ** 4).coeffs, j.coeffs, rtol=1e-11, atol=1e-12)

    def test_smooth_max(self):
        spec = JetSpec(2, 1, 2)
        _, ys = lift([0.0, 0.0], [2.0, 0.5], spec)
        m = jets.smooth_max(ys[0], ys[1], eps=1e-9)
        assert m.value == pytest.approx(2.0, abs=1e-8)
        # plain numbers too
        assert jets.smooth_max(1.0, 3.0, eps=1e-9) == pytest.approx(3.0, abs=1e-8)

    def test_domain_errors(self):
        spec = JetSpec(2, 0, 2)
        _, ys = lift([0.0, 0.0], [-1.0, 1.0], spec)
        with pytest.raises(JetDomainError):
            jets.sqrt(ys[0])
        with pytest.raises(JetDomainError):
            jets.log(ys[0])
        zero = ys[0] + 1.0
        with pytest.raises(JetDomainError):
            ys[1] / zero


class TestPartial:
    def test_cubic(self):
        spec = JetSpec(2, 0, 3)
        _, ys = lift([0.0, 0.0], [1.0, 1.0], spec)
        f = ys[0] * ys[0] * ys[0]
        assert f.partial((0, 0), (3, 0)) == pytest.approx(6.0, abs=0)

    def test_mixed(self):
        spec = JetSpec(2, 1, 1)
        xs, ys = lift([0.3, 0.0], [0.7, 0.0], spec)
        f = xs[0] * ys[0]
        assert f.partial((1, 0), (1, 0)) == pytest.approx(1.0, abs=0)

    def test_schwarz_symmetry_structural(self):
        # canonical multi-index storage: one slot per unordered derivative
        spec = JetSpec(3, 2, 3)
        ctx = jets._context(spec)
        assert ctx.slot((1, 1, 0), (0, 1, 2)) == ctx.slot((1, 1, 0), (0, 1, 2))
        assert len({ctx.slot(a, b) for a in ctx.xidx for b in ctx.yidx}) == ctx.size


class TestFdOracle:
    def test_sin_first_derivative(self):
        f = lambda x, y: math.sin(y[0])
        est = fd_oracle(f, [0.0, 0.0], [0.0, 1.0], (0, 0), (1, 0))
        assert est.ok
        assert est.value == pytest.approx(1.0, abs=1e-10)

    def test_quartic_fourth_derivative(self):
        f = lambda x, y: y[0] ** 4
        est = fd_oracle(f, [0.0, 0.0], [0.0, 0.0], (0, 0), (4, 0))
        assert est.ok
        assert est.value == pytest.approx(24.0, abs=1e-6)

    def test_zeroth_order_is_eval(self):
        f = lambda x, y: x[0] + 2 * y[1]
        est = fd_oracle(f, [0.5, 0.0], [0.0, 0.25], (0, 0), (0, 0))
        assert est.value == pytest.approx(1.0)

    def test_nonfinite_flags(self):
        f = lambda x, y: math.sqrt(y[0]) if y[0] >= 0 else float("nan")
        est = fd_oracle(f, [0.0, 0.0], [0.0005, 1.0], (0, 0), (1, 0))
        assert not est.ok
        assert not math.isfinite(est.value)

    def test_order_cap(self):
        f = lambda x, y: y[0] ** 6
        with pytest.raises(ConfigurationError):
            fd_oracle(f, [0.0, 0.0], [0.0, 0.0], (0, 0), (5, 0))

    def test_scheme_validation(self):
        with pytest.raises(ConfigurationError):
            FdScheme(step=-1.0)
        with pytest.raises(ConfigurationError):
            FdScheme(richardson_levels=5)

    def test_extrapolation_converges_monotonically(self):
        f = lambda x, y: math.sin(y[0]) * math.exp(0.3 * x[0])
        truth = math.cos(0.7) * math.exp(0.3 * 0.4)
        errors = []
        for levels in (1, 2, 3):
            est = fd_oracle(f, [0.4, 0.0], [0.7, 0.0], (0, 0), (1, 0),
                            FdScheme(step=2e-2, richardson_levels=levels))
            errors.append(abs(est.value - truth))
        assert errors[0] > errors[1] > errors[2]

    def test_jet_agrees_with_fd_on_smooth_compositions(self):
        # 100 random smooth compositions, one mixed order each
        spec = JetSpec(2, 2, 3)
        rng = _rng()

        def make_fn(c):
            def f(x, y):
                return (
                    1.5
                    + c[0] * x[0]
                    + c[1] * y[0] * y[1]
                    + c[2] * x[1] * y[0]
                    + c[3] * math.sin(c[4] * y[0])
                    + math.exp(0.3 * c[5] * x[0])
                )
            return f

        orders = [((1, 0), (1, 0)), ((0, 0), (2, 1)), ((0, 1), (1, 1)),
                  ((2, 0), (0, 1)), ((0, 0), (1, 2)), ((1, 1), (0, 1))]
        for trial in range(100):
            c = rng.uniform(-0.5, 0.5, 6)
            f = make_fn(c)
            x0 = rng.uniform(0.3, 1.2, 2)
            y0 = rng.uniform(0.4, 1.3, 2)
            xs, ys = lift(x0, y0, spec)
            jf = (
                1.5
                + c[0] * xs[0]
                + c[1] * ys[0] * ys[1]
                + c[2] * xs[1] * ys[0]
                + c[3] * jets.sin(c[4] * ys[0])
                + jets.exp(0.3 * c[5] * xs[0])
            )
            a, b = orders[trial % len(orders)]
            est = fd_oracle(f, x0, y0, a, b)
            assert est.ok
            jv = jf.partial(a, b)
            assert jv == pytest.approx(est.value, rel=1e-6, abs=1e-8)


class TestJetsAgainstZooMetrics:
    def test_partials_match_fd_across_zoo(self, zoo):
        # every jet partial of total order <= 3 vs the FD oracle, at 50
        # deterministic samples per metric
        from conftest import tangent_samples

        orders = [((0, 0), (1, 0)), ((0, 0), (0, 2)), ((1, 0), (0, 0)),
                  ((0, 1), (1, 0)), ((0, 0), (1, 2)), ((1, 0), (0, 2)),
                  ((0, 0), (3, 0))]
        for name, m in zoo.items():
            if m.n != 2:
                continue
            f = lambda x, y: m.F(x, y)
            for k, (x, y) in enumerate(tangent_samples(m, 50, seed=23)):
                fj = m.jet(x, y, 2, 3)
                a, b = orders[k % len(orders)]
                est = fd_oracle(f, x, y, a, b)
                assert est.ok
                want = est.value
                assert fj.partial(a, b) == pytest.approx(want, rel=1e-6, abs=1e-8)

    def test_homogeneity_propagation_on_metrics(self, zoo):
        # order-(0,b) coefficients scale by lam**(1-|b|) when y is scaled
        for name in ("funk", "quartic_norm", "randers_curl", "hilbert_quartic"):
            m = zoo[name]
            from conftest import tangent_samples

            x, y = tangent_samples(m, 1, seed=24)[0]
            f1 = m.jet(x, y, 0, 3)
            for lam in (0.5, 2.0, 3.0):
                f2 = m.jet(x, lam * y, 0, 3)
                for b in [(1, 0), (0, 1), (1, 1), (2, 0), (2, 1), (0, 3)]:
                    want = lam ** (1 - sum(b)) * f1.partial((0, 0), b)
                    assert f2.partial((0, 0), b) == pytest.approx(
                        want, rel=1e-10, abs=1e-12)


class TestHomogeneityPropagation:
    def test_one_homogeneous_scaling(self):
        # F(x, y) = |y| scaled in y: order-(0,b) coefficients scale by lam**(1-|b|)
        spec = JetSpec(2, 0, 3)
        y0 = np.array([0.8, 0.6])
        _, ys = lift([0.0, 0.0], y0, spec)
        f1 = jets.sqrt(ys[0] * ys[0] + ys[1] * ys[1])
        for lam in (0.5, 2.0, 3.0):
            _, ysl = lift([0.0, 0.0], lam * y0, spec)
            f2 = jets.sqrt(ysl[0] * ysl[0] + ysl[1] * ysl[1])
            for b in [(0, 0), (1, 0), (1, 1), (2, 0), (0, 2), (2, 1)]:
                want = lam ** (1 - sum(b)) * f1.partial((0, 0), b)
                assert f2.partial((0, 0), b) == pytest.approx(want, rel=1e-10, abs=1e-12)


class TestImmutability:
    def test_jets_reject_mutation(self):
        spec = JetSpec(2, 1, 1)
        xs, _ = lift([0.0, 0.0], [1.0, 0.0], spec)
        with pytest.raises(AttributeError):
            xs[0].vx = 0


class TestRingAxioms:
    def test_associativity_distributivity(self):
        spec = JetSpec(2, 2, 3)
        rng = _rng()
        for _ in range(10):
            a = _random_smooth_jet(spec, rng)
            b = _random_smooth_jet(spec, rng)
            c = _random_smooth_jet(spec, rng)
            lhs = (a * b) * c
            rhs = a * (b * c)
            np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-12, atol=1e-13)
            lhs = a * (b + c)
            rhs = a * b + a * c
            np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-12, atol=1e-13)

    def test_derivations_commute(self):
        # Schwarz symmetry at the operator level: dx then dy = dy then dx
        spec = JetSpec(2, 2, 3)
        j = _random_smooth_jet(spec, _rng())
        a = j.dx(0).dy(1)
        b = j.dy(1).dx(0)
        mask = a.ctx.mask(a.vx, a.vy)
        np.testing.assert_allclose(a.coeffs[mask], b.coeffs[mask], rtol=1e-13)
