"""Metric zoo: closed forms, distances, Okada residual, validity checks."""

import numpy as np
import pytest

from finslerlab import metrics
from finslerlab.errors import ConfigurationError, GeometryError
from finslerlab.metrics import (
    ConvexDomain,
    funk_distance,
    funk_distance_batch,
    funk_general,
    funk_unit_ball,
    hilbert_distance,
    hilbert_metric,
    make_metric,
    okada_residual,
    quartic_domain,
    unit_ball_domain,
    validate_metric,
    zoo_constructors,
)

from conftest import tangent_samples


class TestFunkClosedForm:
    def test_center_is_euclidean(self):
        for y in ([1.0, 0.0], [0.3, -0.4], [0.0, 2.0]):
            F = funk_unit_ball([0.0, 0.0], list(y))
            assert F == pytest.approx(np.linalg.norm(y), rel=1e-14)

    def test_worked_point_forward(self):
        assert funk_unit_ball([0.5, 0.0], [1.0, 0.0]) == pytest.approx(2.0, rel=1e-14)

    def test_worked_point_backward(self):
        assert funk_unit_ball([0.5, 0.0], [-1.0, 0.0]) == pytest.approx(2.0 / 3.0, rel=1e-14)

    def test_membership_condition(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            x = rng.uniform(-0.6, 0.6, 2)
            y = rng.uniform(-1, 1, 2)
            F = funk_unit_ball(list(x), list(y))
            z = x + y / F
            assert abs(np.dot(z, z) - 1.0) < 1e-12

    def test_nonreversibility_witness(self):
        # a ratio of at least 2 between opposite directions
        F1 = funk_unit_ball([0.5, 0.0], [1.0, 0.0])
        F2 = funk_unit_ball([0.5, 0.0], [-1.0, 0.0])
        assert F1 / F2 >= 2.0


class TestFunkGeneralDomain:
    def test_matches_closed_form_on_ball(self):
        dom = unit_ball_domain(2)
        rng = np.random.default_rng(11)
        for _ in range(100):
            x = rng.uniform(-0.6, 0.6, 2)
            y = rng.uniform(-1, 1, 2)
            if np.linalg.norm(y) < 0.1:
                continue
            a = funk_general(dom, list(x), list(y))
            b = funk_unit_ball(list(x), list(y))
            assert a == pytest.approx(b, rel=1e-10)

    def test_quartic_eps_zero_degenerates_to_ball(self):
        dom = ConvexDomain("quartic_perturbed", 2, 0.0)
        rng = np.random.default_rng(12)
        for _ in range(20):
            x = rng.uniform(-0.5, 0.5, 2)
            y = rng.uniform(-1, 1, 2)
            a = funk_general(dom, list(x), list(y))
            b = funk_unit_ball(list(x), list(y))
            assert a == pytest.approx(b, rel=1e-12)

    def test_membership_residual(self):
        dom = quartic_domain(2, 0.1)
        rng = np.random.default_rng(13)
        for _ in range(50):
            x = rng.uniform(-0.5, 0.5, 2)
            y = rng.uniform(-1, 1, 2)
            F = funk_general(dom, list(x), list(y))
            z = x + y / F
            assert abs(dom.phi(list(z))) < 1e-12

    def test_batch_matches_scalar(self):
        dom = quartic_domain(2, 0.1)
        rng = np.random.default_rng(14)
        X = rng.uniform(-0.5, 0.5, (64, 2))
        Y = rng.uniform(-1, 1, (64, 2))
        batch = funk_general(dom, [X[:, 0], X[:, 1]], [Y[:, 0], Y[:, 1]])
        for k in range(64):
            scalar = funk_general(dom, list(X[k]), list(Y[k]))
            assert batch[k] == pytest.approx(scalar, rel=1e-12)

    def test_point_outside_domain_rejected(self):
        dom = unit_ball_domain(2)
        with pytest.raises(GeometryError):
            funk_general(dom, [1.5, 0.0], [1.0, 0.0])


class TestHilbert:
    def test_worked_point(self):
        dom = unit_ball_domain(2)
        assert hilbert_metric(dom, [0.5, 0.0], [1.0, 0.0]) == pytest.approx(4.0 / 3.0, rel=1e-14)

    def test_center(self):
        dom = unit_ball_domain(2)
        for y in ([1.0, 0.0], [0.6, -0.8]):
            assert hilbert_metric(dom, [0.0, 0.0], list(y)) == pytest.approx(
                np.linalg.norm(y), rel=1e-13)

    def test_exactly_reversible(self):
        dom = quartic_domain(2, 0.1)
        rng = np.random.default_rng(15)
        for _ in range(30):
            x = rng.uniform(-0.5, 0.5, 2)
            y = rng.uniform(-1, 1, 2)
            a = hilbert_metric(dom, list(x), list(y))
            b = hilbert_metric(dom, list(x), list(-y))
            assert a == pytest.approx(b, rel=1e-15)


class TestDistances:
    def test_worked_funk_distance(self):
        dom = unit_ball_domain(2)
        assert funk_distance(dom, [0.0, 0.0], [0.5, 0.0]) == pytest.approx(
            np.log(2.0), rel=1e-12)

    def test_identity_of_indiscernibles(self):
        dom = unit_ball_domain(2)
        assert funk_distance(dom, [0.2, 0.1], [0.2, 0.1]) == 0.0
        assert hilbert_distance(dom, [0.2, 0.1], [0.2, 0.1]) == 0.0

    def test_triangle_inequality_sampled(self):
        dom = unit_ball_domain(2)
        rng = np.random.default_rng(16)
        for _ in range(1000):
            p, q, r = rng.uniform(-0.7, 0.7, (3, 2))
            if max(np.linalg.norm(v) for v in (p, q, r)) >= 0.95:
                continue
            dpq = funk_distance(dom, p, q)
            dpr = funk_distance(dom, p, r)
            drq = funk_distance(dom, r, q)
            assert dpq <= dpr + drq + 1e-12

    def test_hilbert_symmetric_funk_not(self):
        dom = quartic_domain(2, 0.1)
        p = np.array([0.3, 0.1])
        q = np.array([-0.2, 0.4])
        assert hilbert_distance(dom, p, q) == hilbert_distance(dom, q, p)
        assert abs(funk_distance(dom, p, q) - funk_distance(dom, q, p)) > 1e-3

    def test_batch_distances(self):
        dom = unit_ball_domain(2)
        rng = np.random.default_rng(17)
        Q = rng.uniform(-0.6, 0.6, (32, 2))
        p = np.array([0.1, -0.2])
        batch = funk_distance_batch(dom, p, Q)
        for k in range(32):
            assert batch[k] == pytest.approx(funk_distance(dom, p, Q[k]), rel=1e-10)

    def test_batch_distances_quartic(self):
        from finslerlab.metrics import hilbert_distance_batch

        dom = quartic_domain(2, 0.1)
        rng = np.random.default_rng(18)
        Q = rng.uniform(-0.55, 0.55, (16, 2))
        p = np.array([0.2, 0.1])
        fb = funk_distance_batch(dom, p, Q)
        hb = hilbert_distance_batch(dom, p, Q)
        for k in range(16):
            assert fb[k] == pytest.approx(funk_distance(dom, p, Q[k]), rel=1e-9)
            assert hb[k] == pytest.approx(hilbert_distance(dom, p, Q[k]), rel=1e-9)


class TestOkada:
    def test_funk_satisfies_okada(self, zoo):
        worst = 0.0
        for x, y in tangent_samples(zoo["funk"], 50):
            worst = max(worst, np.max(np.abs(okada_residual(zoo["funk"], x, y))))
        assert worst < 1e-8

    def test_funk_quartic_satisfies_okada(self, zoo):
        worst = 0.0
        for x, y in tangent_samples(zoo["funk_quartic"], 20):
            worst = max(worst, np.max(np.abs(okada_residual(zoo["funk_quartic"], x, y))))
        assert worst < 1e-8

    def test_euclidean_fails_okada(self, zoo):
        res = okada_residual(zoo["euclidean"], [0.5, 0.0], [1.0, 0.0])
        np.testing.assert_allclose(res, [-1.0, 0.0], atol=1e-12)

    def test_hilbert_fails_okada(self, zoo):
        worst = 0.0
        for x, y in tangent_samples(zoo["hilbert"], 10):
            worst = max(worst, np.max(np.abs(okada_residual(zoo["hilbert"], x, y))))
        assert worst > 1e-3


class TestZooCatalog:
    def test_catalog_contents(self):
        names = set(zoo_constructors())
        assert {"euclidean", "riemannian_sphere", "riemannian_hyperbolic",
                "randers", "berwald_product", "quartic_norm", "funk",
                "hilbert"} <= names

    def test_unknown_metric_rejected(self):
        with pytest.raises(ConfigurationError):
            make_metric("moebius")

    def test_all_catalog_metrics_validate(self, zoo):
        # (F2a) homogeneity and (F2b) definiteness at 100 deterministic samples
        for name in ("euclidean", "riemannian_sphere", "riemannian_hyperbolic",
                     "randers_curl", "berwald_product", "quartic_norm", "funk",
                     "hilbert", "funk_quartic", "hilbert_quartic"):
            assert validate_metric(zoo[name], n_samples=100)

    def test_reversibility_flags(self, zoo):
        rng = np.random.default_rng(18)
        for name, m in zoo.items():
            for x, y in tangent_samples(m, 10, seed=7):
                F = m.F(x, y)
                B = m.F(x, -y)
                if m.reversible:
                    assert abs(F - B) <= 1e-10 * F
        # and the funk metric is genuinely non-reversible
        fu = zoo["funk"]
        assert abs(fu.F([0.5, 0.0], [1.0, 0.0]) - fu.F([0.5, 0.0], [-1.0, 0.0])) > 1.0

    def test_randers_zero_beta_equals_alpha(self):
        m = metrics.make_randers(2, variant="const", c=0.0, validate=False)
        rng = np.random.default_rng(19)
        for _ in range(20):
            x = rng.uniform(-0.5, 0.5, 2)
            y = rng.uniform(-1, 1, 2)
            assert m.F(x, y) == pytest.approx(np.linalg.norm(y), rel=1e-14)

    def test_randers_beta_too_large_rejected(self):
        with pytest.raises(ConfigurationError):
            metrics.make_randers(2, variant="const", c=1.1)

    def test_quartic_negative_eps_rejected(self):
        with pytest.raises(ConfigurationError):
            metrics.make_quartic(2, -0.5)

    def test_quartic_positive_definite_sweep(self, zoo):
        # 360-direction sweep of the fundamental tensor spectrum
        from finslerlab.minkowski import TangentSample, fundamental_tensor

        m = zoo["quartic_norm"]
        for theta in np.linspace(0, 2 * np.pi, 360, endpoint=False):
            ft = fundamental_tensor(m, TangentSample([0.0, 0.0],
                                                     [np.cos(theta), np.sin(theta)]))
            assert np.min(np.linalg.eigvalsh(ft.g)) > 0

    def test_domain_validation(self):
        dom = quartic_domain(2, 0.1)
        dom.boundary_checks()
        with pytest.raises(ConfigurationError):
            ConvexDomain("octagon", 2)

    def test_homogeneity_across_zoo(self, zoo):
        for name, m in zoo.items():
            for x, y in tangent_samples(m, 10, seed=21):
                F = m.F(x, y)
                for lam in (0.5, 2.0):
                    assert m.F(x, lam * y) == pytest.approx(lam * F, rel=1e-10)
