"""Tests for the ambient Kähler product space."""

import numpy as np
import pytest

from kahlerprod.ambient import (
    CURVATURE_TERMS,
    AmbientSpace,
    curvature,
    curvature_symmetry_report,
    fit_curvature_coefficients,
    product_curvature_reference,
)
from kahlerprod.linalg import QQ, SeedStream, identity_matrix

CELLS = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)]


def rv(space, stream):
    return space.random_vector(stream)


def test_construction_invariants():
    for m, n in CELLS + [(1, 0), (0, 1), (2, 0)]:
        sp = AmbientSpace(m, n, 4, -4)
        eye = identity_matrix(sp.dim)
        assert np.array_equal(sp.J @ sp.J, -eye)
        assert np.array_equal(sp.F @ sp.F, eye)
        assert np.array_equal(sp.J @ sp.F, sp.F @ sp.J)
    with pytest.raises(ValueError):
        AmbientSpace(0, 0, 1, 1)
    with pytest.raises(ValueError):
        AmbientSpace(-1, 2, 1, 1)


def test_J_convention_defining_case():
    sp = AmbientSpace(1, 0, 4, 0)
    assert list(sp.apply_J(np.array([1, 0], dtype=object))) == [0, 1]


def test_J_is_metric_compatible():
    sp = AmbientSpace(2, 1, 4, 8)
    st = SeedStream(10, 0)
    for _ in range(30):
        x, y = rv(sp, st), rv(sp, st)
        assert np.dot(sp.apply_J(x), sp.apply_J(y)) == np.dot(x, y)


def test_F_action_on_factors():
    sp = AmbientSpace(1, 1, 4, 8)
    first = np.array([3, -2, 0, 0], dtype=object)
    second = np.array([0, 0, 5, 1], dtype=object)
    assert np.array_equal(sp.apply_F(first), first)
    assert np.array_equal(sp.apply_F(second), -second)
    st = SeedStream(11, 0)
    x = rv(sp, st)
    assert np.array_equal(sp.apply_F(sp.apply_J(x)), sp.apply_J(sp.apply_F(x)))


def test_dimension_mismatch_raises():
    sp = AmbientSpace(1, 1, 4, 8)
    with pytest.raises(ValueError):
        sp.apply_J(np.array([1, 0], dtype=object))


def test_flat_ambient_has_zero_curvature():
    sp = AmbientSpace(2, 1, 0, 0)
    st = SeedStream(12, 0)
    X, Y, Z = rv(sp, st), rv(sp, st), rv(sp, st)
    for mode in ("corrected", "paper-literal"):
        assert not any(curvature(sp, mode, X, Y, Z))


def test_corrected_matches_product_reference():
    for m, n in CELLS:
        sp = AmbientSpace(m, n, QQ(8, 3), QQ(-5, 2))
        st = SeedStream(13, 10 * m + n)
        for _ in range(25):
            X, Y, Z = rv(sp, st), rv(sp, st), rv(sp, st)
            assert np.array_equal(
                curvature(sp, "corrected", X, Y, Z),
                product_curvature_reference(sp, X, Y, Z),
            ), (m, n)


def test_literal_differs_from_reference_generically():
    sp = AmbientSpace(2, 2, 4, 8)
    st = SeedStream(14, 0)
    X, Y, Z = rv(sp, st), rv(sp, st), rv(sp, st)
    lit = curvature(sp, "paper-literal", X, Y, Z)
    ref = product_curvature_reference(sp, X, Y, Z)
    assert not np.array_equal(lit, ref)
    # the difference is exactly the extra g(FY,Z)FX contribution
    extra = (sp.c1 + sp.c2) / 16 * np.dot(sp.F @ Y, Z) * (sp.F @ X)
    assert np.array_equal(lit - ref, extra)


def test_single_factor_reduction():
    # With an empty second factor the whole expression must collapse to the
    # five-term complex space form curvature, whatever c2 is set to.
    sp = AmbientSpace(2, 0, 4, 7)
    st = SeedStream(15, 0)
    for _ in range(25):
        X, Y, Z = rv(sp, st), rv(sp, st), rv(sp, st)
        assert np.array_equal(
            curvature(sp, "corrected", X, Y, Z),
            product_curvature_reference(sp, X, Y, Z),
        )


def test_curvature_is_bilinear():
    sp = AmbientSpace(1, 2, 4, 8)
    st = SeedStream(16, 0)
    X, Xp, Y, Z = (rv(sp, st) for _ in range(4))
    a, b = QQ(3, 2), QQ(-7, 5)
    lhs = curvature(sp, "corrected", a * X + b * Xp, Y, Z)
    rhs = a * curvature(sp, "corrected", X, Y, Z) + b * curvature(sp, "corrected", Xp, Y, Z)
    assert np.array_equal(lhs, rhs)


def test_holomorphic_sectional_curvature():
    sp = AmbientSpace(2, 1, 4, -4)
    X = np.zeros(6, dtype=object) + QQ(0)
    X[0] = QQ(1)
    JX = sp.apply_J(X)
    assert np.dot(curvature(sp, "corrected", X, JX, JX), X) == sp.c1
    # orthogonal section with Y perpendicular to JX: quarter pinch
    Y = np.zeros(6, dtype=object) + QQ(0)
    Y[2] = QQ(1)
    assert np.dot(curvature(sp, "corrected", X, Y, Y), X) == sp.c1 / 4
    # second factor sees c2
    Z = np.zeros(6, dtype=object) + QQ(0)
    Z[4] = QQ(1)
    JZ = sp.apply_J(Z)
    assert np.dot(curvature(sp, "corrected", Z, JZ, JZ), Z) == sp.c2


def test_symmetry_report_corrected_is_exact_zero():
    sp = AmbientSpace(1, 1, 4, -4)
    rep = curvature_symmetry_report(sp, "corrected", 100, 21)
    assert all(v == 0 for v in rep["max_residuals"].values())


def test_symmetry_report_literal_fails_skew():
    sp = AmbientSpace(2, 1, 4, 8)
    rep = curvature_symmetry_report(sp, "paper-literal", 20, 21)
    res = rep["max_residuals"]
    assert res["skew_xy"] > 0
    assert res["first_bianchi"] > 0
    assert res["j_invariance"] > 0
    # the stray term happens to be pair-symmetric on its own
    assert res["pair_symmetry"] == 0


def test_coefficient_fit_recovers_corrected_catalog():
    sp = AmbientSpace(2, 2, 16, 48)
    fit = fit_curvature_coefficients(sp, trials=40, seed=3)
    assert fit["unique"] and fit["consistent"]
    assert fit["rank"] == len(CURVATURE_TERMS) == 20
    assert "corrected_mismatches" not in fit
    assert [d["term"] for d in fit["printed_mismatches"]] == ["g(FY,Z)FX"]
    only = fit["printed_mismatches"][0]
    assert only["printed"] == 2 and only["recovered"] == 1


def test_coefficient_fit_reports_rank_deficiency():
    sp = AmbientSpace(1, 1, 16, 48)
    fit = fit_curvature_coefficients(sp, trials=40, seed=3)
    assert not fit["unique"]
    assert fit["rank"] < 20


def test_coefficient_fit_rejects_degenerate_weights():
    with pytest.raises(ValueError):
        fit_curvature_coefficients(AmbientSpace(2, 2, 4, -4), trials=5, seed=0)
    with pytest.raises(ValueError):
        fit_curvature_coefficients(AmbientSpace(2, 2, 4, 4), trials=5, seed=0)
