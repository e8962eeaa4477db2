"""Shared fixtures: the metric zoo is built once per session."""

import numpy as np
import pytest

from finslerlab import metrics


@pytest.fixture(scope="session")
def zoo():
    """All catalog metrics (n=2 where a dimension applies, plus n=3 entries),
    built without construction-time validation; the validation invariants get
    their own dedicated test."""
    return {
        "euclidean": metrics.make_euclidean(2, validate=False),
        "euclidean3": metrics.make_euclidean(3, validate=False),
        "riemannian_sphere": metrics.make_sphere(2, validate=False),
        "riemannian_hyperbolic": metrics.make_hyperbolic(2, validate=False),
        "randers_const": metrics.make_randers(2, variant="const", c=0.3, validate=False),
        "randers_closed": metrics.make_randers(2, variant="closed", c=0.3, validate=False),
        "randers_curl": metrics.make_randers(2, variant="curl", c=0.3, validate=False),
        "berwald_product": metrics.make_berwald_product(validate=False),
        "quartic_norm": metrics.make_quartic(2, 0.1, validate=False),
        "quartic_norm3": metrics.make_quartic(3, 0.1, validate=False),
        "funk": metrics.make_funk(2, validate=False),
        "funk3": metrics.make_funk(3, validate=False),
        "funk_quartic": metrics.make_funk(2, domain="quartic:0.1", validate=False),
        "hilbert": metrics.make_hilbert(2, validate=False),
        "hilbert_quartic": metrics.make_hilbert(2, domain="quartic:0.1", validate=False),
    }


def tangent_samples(metric, count, seed=20240817, y_lo=0.4, y_hi=1.3):
    """Deterministic tangent samples inside the metric's chart."""
    from finslerlab._grids import halton_directions
    from finslerlab.metrics import chart_points

    rng = np.random.default_rng(seed)
    pts = chart_points(metric, count)
    dirs = halton_directions(metric.n, count)
    scales = rng.uniform(y_lo, y_hi, count)
    return [(x, s * d) for x, d, s in zip(pts, dirs, scales)]
