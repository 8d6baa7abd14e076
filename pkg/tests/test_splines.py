import numpy as np
import pytest

from dgiga.splines import (
    KnotVector,
    NurbsBasis2D,
    breakpoints,
    eval_bspline,
    eval_nurbs2d,
    greville,
    insert_knots,
    midpoint_refine,
    uniform_open_knots,
)

KV_CASES = [
    KnotVector(1, [0, 0, 0.5, 1, 1]),
    KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1]),
    KnotVector(2, [0, 0, 0, 0.25, 0.5, 0.5, 0.75, 1, 1, 1]),
    KnotVector(3, [0, 0, 0, 0, 0.2, 0.5, 0.8, 1, 1, 1, 1]),
    KnotVector(4, np.concatenate([np.zeros(5), [0.3, 0.6], np.ones(5)])),
]


# -- independent oracle: textbook recursion, term by term ---------------------

def cox_de_boor_value(U, i, p, x):
    if p == 0:
        return 1.0 if U[i] <= x < U[i + 1] else 0.0
    out = 0.0
    den = U[i + p] - U[i]
    if den > 0:
        out += (x - U[i]) / den * cox_de_boor_value(U, i, p - 1, x)
    den = U[i + p + 1] - U[i + 1]
    if den > 0:
        out += (U[i + p + 1] - x) / den * cox_de_boor_value(U, i + 1, p - 1, x)
    return out


def cox_de_boor_deriv(U, i, p, x):
    out = 0.0
    den = U[i + p] - U[i]
    if den > 0:
        out += p / den * cox_de_boor_value(U, i, p - 1, x)
    den = U[i + p + 1] - U[i + 1]
    if den > 0:
        out -= p / den * cox_de_boor_value(U, i + 1, p - 1, x)
    return out


def rational_curve_oracle(kv, weights, points, x):
    """Homogeneous-coordinate evaluation of a NURBS curve via the recursion."""
    num = np.zeros(points.shape[1])
    den = 0.0
    for i in range(kv.n):
        b = cox_de_boor_value(kv.knots, i, kv.degree, x)
        num += weights[i] * b * points[i]
        den += weights[i] * b
    return num / den


def test_matches_recursive_oracle():
    kv = KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1])
    ev = eval_bspline(kv, 0.25)
    for r in range(kv.degree + 1):
        i = ev.first_active + r
        assert ev.values[r] == pytest.approx(
            cox_de_boor_value(kv.knots, i, 2, 0.25), abs=1e-14
        )
        assert ev.derivs[r] == pytest.approx(
            cox_de_boor_deriv(kv.knots, i, 2, 0.25), abs=1e-12
        )


@pytest.mark.parametrize("kv", KV_CASES)
def test_matches_oracle_at_random_interior_points(kv, rng):
    for x in rng.uniform(0.01, 0.99, size=25):
        if np.any(np.abs(kv.knots - x) < 1e-6):
            continue
        ev = eval_bspline(kv, x)
        dense = np.zeros(kv.n)
        dense[ev.first_active : ev.first_active + kv.degree + 1] = ev.values
        for i in range(kv.n):
            assert dense[i] == pytest.approx(
                cox_de_boor_value(kv.knots, i, kv.degree, x), abs=1e-13
            )


def test_open_vector_interpolates_at_zero():
    kv = KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1])
    ev = eval_bspline(kv, 0.0)
    assert ev.first_active == 0
    np.testing.assert_allclose(ev.values, [1.0, 0.0, 0.0], atol=1e-15)


def test_right_endpoint_uses_last_span():
    kv = KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1])
    ev = eval_bspline(kv, 1.0)
    assert ev.first_active == kv.n - kv.degree - 1
    np.testing.assert_allclose(ev.values, [0.0, 0.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("kv", KV_CASES)
def test_partition_of_unity_and_deriv_sum(kv, rng):
    for x in rng.random(1000):
        ev = eval_bspline(kv, x)
        assert abs(ev.values.sum() - 1.0) <= 1e-12
        assert abs(ev.derivs.sum()) <= 1e-10


@pytest.mark.parametrize("kv", KV_CASES)
def test_derivatives_match_finite_differences(kv, rng):
    h = 1e-6
    for x in rng.uniform(0.05, 0.95, size=50):
        if np.any(np.abs(kv.knots - x) < 10 * h):
            continue
        lo = eval_bspline(kv, x - h)
        hi = eval_bspline(kv, x + h)
        if lo.first_active != hi.first_active:
            continue
        ev = eval_bspline(kv, x)
        fd = (hi.values - lo.values) / (2 * h)
        scale = np.maximum(np.abs(ev.derivs), 1.0)
        assert np.max(np.abs(fd - ev.derivs) / scale) <= 1e-5


def test_domain_error_outside_interval():
    kv = KV_CASES[1]
    with pytest.raises(ValueError):
        eval_bspline(kv, -0.1)
    with pytest.raises(ValueError):
        eval_bspline(kv, 1.0001)


def test_knot_vector_validation():
    with pytest.raises(ValueError):
        KnotVector(2, [0, 0, 0.5, 1, 1])  # not open
    with pytest.raises(ValueError):
        KnotVector(1, [0, 0, 0.7, 0.3, 1, 1])  # decreasing
    with pytest.raises(ValueError):
        KnotVector(-1, [0, 1])


def test_greville_reproduces_linears(rng):
    for kv in KV_CASES:
        g = greville(kv)
        for x in rng.random(20):
            ev = eval_bspline(kv, x)
            active = g[ev.first_active : ev.first_active + kv.degree + 1]
            assert float(active @ ev.values) == pytest.approx(x, abs=1e-13)


# -- knot insertion -----------------------------------------------------------

def test_insert_sorted_merge():
    kv = KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1])
    refined, T = insert_knots(kv, [0.25, 0.75])
    np.testing.assert_allclose(
        refined.knots, [0, 0, 0, 0.25, 0.5, 0.75, 1, 1, 1], atol=0
    )
    assert T.shape == (refined.n, kv.n)


def test_midpoint_refine_doubles_elements():
    for kv in KV_CASES:
        refined, _ = midpoint_refine(kv)
        assert refined.num_elements == 2 * kv.num_elements


def test_insertion_multiplicity_error():
    kv = KnotVector(2, [0, 0, 0, 0.5, 0.5, 1, 1, 1])
    with pytest.raises(ValueError, match="multiplicity"):
        insert_knots(kv, [0.5])


def test_insertion_rejects_boundary_knots():
    with pytest.raises(ValueError):
        insert_knots(KV_CASES[1], [0.0])


def test_insertion_preserves_curve(rng):
    kv = KnotVector(3, [0, 0, 0, 0, 0.4, 1, 1, 1, 1])
    w = rng.uniform(0.5, 2.0, kv.n)
    pts = rng.normal(size=(kv.n, 2))
    refined, T = insert_knots(kv, [0.1, 0.2, 0.6, 0.9])
    hom = np.concatenate([pts * w[:, None], w[:, None]], axis=1)
    hom_f = T @ hom
    w_f = hom_f[:, 2]
    pts_f = hom_f[:, :2] / w_f[:, None]
    for x in rng.random(20):
        orig = rational_curve_oracle(kv, w, pts, x)
        fine = rational_curve_oracle(refined, w_f, pts_f, x)
        np.testing.assert_allclose(fine, orig, atol=1e-12)


# -- bivariate rational basis -------------------------------------------------

def test_nurbs2d_reduces_to_bspline_for_equal_weights(rng):
    kv = KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1])
    basis = NurbsBasis2D(kv, kv, 3.7 * np.ones((kv.n, kv.n)))
    for _ in range(10):
        xi = rng.random(2)
        vals, _, _ = eval_nurbs2d(basis, xi)
        eu = eval_bspline(kv, xi[0])
        ev = eval_bspline(kv, xi[1])
        np.testing.assert_allclose(vals, np.outer(eu.values, ev.values), atol=1e-14)


def test_nurbs2d_partition_of_unity(rng):
    kv_u = KnotVector(2, [0, 0, 0, 1, 1, 1])
    kv_v = KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1])
    basis = NurbsBasis2D(kv_u, kv_v, rng.uniform(0.5, 2.0, (kv_u.n, kv_v.n)))
    for _ in range(200):
        vals, grads, _ = eval_nurbs2d(basis, rng.random(2))
        assert abs(vals.sum() - 1.0) <= 1e-12
        assert np.max(np.abs(grads.sum(axis=(0, 1)))) <= 1e-10


def test_quarter_circle_basis_matches_rational_oracle():
    # Weights of the exact 90-degree arc; the midparameter value vector must
    # reproduce the point (sqrt2/2, sqrt2/2) when combined with the arc's
    # control points.
    kv = KnotVector(2, [0, 0, 0, 1, 1, 1])
    w = np.array([1.0, np.sqrt(2) / 2, 1.0])
    basis = NurbsBasis2D(kv, kv, np.repeat(w[:, None], 3, axis=1))
    vals, _, _ = eval_nurbs2d(basis, (0.5, 0.3))
    cp = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    pt = np.einsum("ab,ak->k", vals, cp)
    np.testing.assert_allclose(pt, [np.sqrt(2) / 2, np.sqrt(2) / 2], atol=1e-14)
    oracle = rational_curve_oracle(kv, w, cp, 0.5)
    np.testing.assert_allclose(pt, oracle, atol=1e-14)


def test_nurbs2d_rejects_bad_weights():
    kv = KnotVector(1, [0, 0, 1, 1])
    with pytest.raises(ValueError):
        NurbsBasis2D(kv, kv, np.array([[1.0, -1.0], [1.0, 1.0]]))
    with pytest.raises(ValueError):
        NurbsBasis2D(kv, kv, np.ones((3, 2)))


def test_counts_and_breakpoints():
    kv = KnotVector(2, [0, 0, 0, 0.5, 1, 1, 1])
    assert kv.n == 4
    np.testing.assert_allclose(breakpoints(kv), [0, 0.5, 1])
    assert uniform_open_knots(2, 4).num_elements == 4
