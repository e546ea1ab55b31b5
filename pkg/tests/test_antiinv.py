"""Tests for the f = 0 specializations: collapsed divergence identities, the
totally-geodesic implication chains, and the simplified quartic term."""

import numpy as np
import pytest
from gmpy2 import mpq

from kahlerprod.ambient import CURVATURE_MODES, AmbientSpace
from kahlerprod.antiinv import (
    AntiInvariantInstance,
    _t_row_shapes,
    anti_invariant_instance,
    collapsed_divergence_check,
    kernel_valued_second_form,
    lagrangian_route_check,
    paired_shape_trace_identity,
    totally_geodesic_check,
    w6_specialized,
)
from kahlerprod.forms import random_second_form
from kahlerprod.frames import derive_structure_tensors, random_point, special_point
from kahlerprod.linalg import QQ

CELLS = [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (2, 4)]


def fap(m, l, seed=7, c=(4, -8)):
    sp = AmbientSpace(m, m, QQ(c[0]), QQ(c[1]))
    pt = special_point(sp, "F-anti-invariant", l, seed)
    return sp, pt, derive_structure_tensors(pt)


def tr(M):
    return sum(M[i, i] for i in range(M.shape[0]))


def test_distinguished_frames_structure():
    # f vanishes on every diagonal-type frame; s vanishes exactly when the
    # tangent space is a full diagonal, l = 2m; the composite t Fs vanishes
    # identically on this family (though not, e.g., on twisted frames).
    for m, l in CELLS:
        _, _, ts = fap(m, l)
        assert not np.any(ts.f + mpq(0)), (m, l)
        full = l == 2 * m
        assert (not np.any(ts.s + mpq(0))) == full, (m, l)
        G = (ts.t + mpq(0)) @ (ts.Fs + mpq(0))
        assert not np.any(G), (m, l)


def test_kernel_valued_forms_annihilate():
    for m, l in [(2, 2), (2, 3)]:
        _, pt, ts = fap(m, l)
        form = kernel_valued_second_form(ts, seed=5)
        assert any(np.any(M) for M in form.A), (m, l)
        assert all(not np.any(M) for M in _t_row_shapes(ts, form)), (m, l)
        inst = anti_invariant_instance(pt, form, imported_hypothesis=True)
        assert inst.imported_hypothesis
    # on a full diagonal t has a trivial kernel, so only the zero form fits
    _, pt, ts = fap(2, 4)
    form = kernel_valued_second_form(ts, seed=5)
    assert all(not np.any(M) for M in form.A)


def test_instance_validation():
    sp = AmbientSpace(2, 1, QQ(4), QQ(-8))
    pt = random_point(sp, 3, 11)  # generic frame: f != 0
    with pytest.raises(ValueError):
        anti_invariant_instance(pt, random_second_form(3, pt))
    _, pt, ts = fap(2, 2)
    with pytest.raises(ValueError):
        anti_invariant_instance(pt, random_second_form(3, pt),
                                imported_hypothesis=True)
    anti_invariant_instance(pt, random_second_form(3, pt))  # flag off is fine


def test_collapsed_divergence_both_modes():
    for m, l in [(1, 1), (1, 2), (2, 2), (2, 3)]:
        _, pt, ts = fap(m, l)
        form = random_second_form(31, pt)
        inst = AntiInvariantInstance(pt, ts, form, False)
        for mode in CURVATURE_MODES:
            rep = collapsed_divergence_check(inst, mode)
            assert rep["pass"], (m, l, mode)
            assert rep["first_identity_residuals"] == ("0", "0")
            assert rep["closed_traces_match"]
            assert rep["slot_expression_T"].coeff("DIV_T") == 1
            assert rep["slot_expression_t"].coeff("DIV_t") == -1


def test_collapsed_remainders_lose_the_difference_block_for_equal_constants():
    sp, pt, ts = fap(2, 2, c=(4, 4))
    form = random_second_form(31, pt)
    rep = collapsed_divergence_check(AntiInvariantInstance(pt, ts, form, False))
    assert rep["pass"]
    q = mpq(0)
    P, T, Fs, h, t = ts.P + q, ts.T + q, ts.Fs + q, ts.h + q, ts.t + q
    kp = QQ(sp.c1 + sp.c2, 16)
    FsT = Fs @ T
    bracket = (-(ts.l - 1) * tr(FsT) + 3 * tr(P @ P @ T @ Fs)
               + 3 * tr(h @ t @ FsT @ FsT))
    assert rep["slot_expression_T"].remainder == -kp * bracket


def test_totally_geodesic_chain_verdicts():
    _, pt, ts = fap(2, 4)  # s = 0 frame
    zero = random_second_form(None, pt)
    for flag in (False, True):
        rep = totally_geodesic_check(AntiInvariantInstance(pt, ts, zero, flag))
        assert rep["verdict"] == "totally geodesic forced", flag
        assert rep["ht_is_identity"] and rep["reconstruction_holds"]
        assert rep["trace_identity_holds"] and rep["b_zero"]
    nz = random_second_form(3, pt)
    rep = totally_geodesic_check(AntiInvariantInstance(pt, ts, nz, False))
    assert rep["verdict"] == "hypothesis required"
    assert not rep["tb_zero"]
    with pytest.raises(ValueError):
        totally_geodesic_check(AntiInvariantInstance(pt, ts, nz, True))
    # s != 0 frames are outside the chain's precondition
    _, pt1, ts1 = fap(2, 2)
    with pytest.raises(ValueError):
        totally_geodesic_check(
            AntiInvariantInstance(pt1, ts1, random_second_form(None, pt1), True))


def test_every_consistent_s_zero_instance_is_forced():
    # With s = 0 the t-map has full column rank, so hypothesis-consistent
    # forms are zero and the verdict cannot be anything but positive.
    for m, seed in [(1, 2), (2, 5), (2, 8)]:
        _, pt, ts = fap(m, 2 * m, seed=seed)
        form = kernel_valued_second_form(ts, seed=seed + 1)
        inst = anti_invariant_instance(pt, form, imported_hypothesis=True)
        rep = totally_geodesic_check(inst)
        assert rep["verdict"] == "totally geodesic forced", (m, seed)
        assert rep["b_zero"]


def test_lagrangian_route():
    for m in (1, 2):
        rep = lagrangian_route_check(m, seed=9)
        assert rep["pass"], m
        assert rep["half_dimension"] and rep["l"] == 2 * m
        assert rep["f_zero"] and rep["P_zero"]
        # s vanishes on this frame, so the pointwise chain applies directly
        assert rep["s_zero"] and rep["ht_is_identity"]
        assert rep["route"] == "pointwise chain"
        assert rep["verdict"] == "totally geodesic forced"
        off = lagrangian_route_check(m, seed=9, imported_hypothesis=False)
        assert off["verdict"] == "hypothesis required"


def test_w6_specialized_matches_its_defect_closed_form():
    for m, l in [(1, 2), (2, 2), (2, 3)]:
        _, pt, ts = fap(m, l)
        form = random_second_form(31, pt)
        inst = AntiInvariantInstance(pt, ts, form, False)
        for mode in CURVATURE_MODES:
            rep = w6_specialized(inst, mode)
            assert rep["pass"], (m, l, mode)
            assert rep["difference_matches_defect"]
    # the two columns disagree on the size of the defect for the same data
    _, pt, ts = fap(2, 3)
    form = random_second_form(31, pt)
    inst = AntiInvariantInstance(pt, ts, form, False)
    lit = w6_specialized(inst, "paper-literal")
    cor = w6_specialized(inst, "corrected")
    assert lit["difference"] != cor["difference"]
    assert not cor["defect_zero"]


def test_w6_specialized_agrees_on_annihilated_forms():
    for m, l in [(2, 2), (2, 3)]:
        _, pt, ts = fap(m, l)
        form = kernel_valued_second_form(ts, seed=5)
        inst = anti_invariant_instance(pt, form, imported_hypothesis=True)
        for mode in CURVATURE_MODES:
            rep = w6_specialized(inst, mode)
            assert rep["difference"] == "0", (m, l, mode)
            assert rep["defect_zero"] and rep["pass"]
    # zero form: both routes vanish outright
    _, pt, ts = fap(2, 2)
    rep = w6_specialized(
        AntiInvariantInstance(pt, ts, random_second_form(None, pt), False))
    assert rep["general"] == "0" and rep["simplified"] == "0"


def test_paired_shape_trace_identity():
    # the two contraction routes agree on any frame, anti-invariant or not
    for m, n, l in [(1, 1, 2), (2, 1, 3), (2, 2, 4)]:
        sp = AmbientSpace(m, n, QQ(4), QQ(-8))
        pt = random_point(sp, l, 19)
        ts = derive_structure_tensors(pt)
        rep = paired_shape_trace_identity(ts, random_second_form(23, pt))
        assert rep["routes_equal"], (m, n, l)
    _, pt, ts = fap(2, 2)
    rep = paired_shape_trace_identity(ts, kernel_valued_second_form(ts, seed=5))
    assert rep["routes_equal"] and rep["rows_zero"]
    assert rep["value"] == "0" and rep["pass"]
