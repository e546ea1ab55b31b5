"""Tests for second-fundamental-form data, the induced fundamental equations,
and the commutator-trace suite."""

import numpy as np
import pytest

from kahlerprod.ambient import CURVATURE_MODES, AmbientSpace
from kahlerprod.forms import (
    SIGN_STATEMENTS,
    TRACE_ITEMS,
    SecondFundamentalForm,
    _combine,
    _contraction_entries,
    _int_blocks,
    _stage_a_residuals,
    codazzi_curvature_oracle,
    codazzi_rhs,
    commutator_trace_suite,
    gauss_curvature_oracle,
    gauss_rhs,
    random_second_form,
    ricci_contraction_reference,
    ricci_curvature_oracle,
    ricci_rhs,
    shape_operator,
)
from kahlerprod.frames import derive_structure_tensors, random_point, special_point
from kahlerprod.linalg import QQ, SeedStream

CELLS = [(1, 1, 2), (2, 1, 3), (1, 2, 3), (2, 2, 4), (3, 1, 4)]

ITEM = {it.key: it for it in TRACE_ITEMS}


def make(m, n, l, seed=11, c=(4, -8)):
    sp = AmbientSpace(m, n, QQ(c[0]), QQ(c[1]))
    pt = random_point(sp, l, seed)
    return sp, pt, derive_structure_tensors(pt)


def rv(stream, k):
    return np.array([stream.randint(-4, 4) for _ in range(k)], dtype=object)


def test_form_construction_and_validation():
    _, pt, _ = make(2, 1, 3)
    form = random_second_form(5, pt)
    assert form.l == 3 and form.p == 3 and form.minimal
    for A in form.A:
        assert np.array_equal(A, A.T)
        assert sum(A[i, i] for i in range(3)) == 0
    zero = random_second_form(None, pt)
    assert all(not np.any(A) for A in zero.A)
    free = random_second_form(5, pt, minimal=False)
    assert any(sum(A[i, i] for i in range(3)) != 0 for A in free.A)
    with pytest.raises(ValueError):
        SecondFundamentalForm(
            A=(np.array([[0, 1], [2, 0]], dtype=object),), minimal=False
        ).validate()


def test_shape_operator_is_linear_in_direction():
    _, pt, _ = make(2, 1, 3)
    form = random_second_form(5, pt)
    d = np.array([2, -1, 3], dtype=object)
    expected = 2 * form.A[0] - form.A[1] + 3 * form.A[2]
    assert np.array_equal(shape_operator(form, d), expected)
    with pytest.raises(ValueError):
        shape_operator(form, np.array([1, 2], dtype=object))


def test_gauss_rhs_matches_ambient_projection():
    # With B = 0 the right side is pure curvature and must equal the
    # frame-projected ambient catalog exactly, in both coefficient modes.
    for m, n, l in CELLS:
        _, pt, ts = make(m, n, l)
        zero = random_second_form(None, pt)
        st = SeedStream(100 * m + 10 * n + l, 3)
        for mode in CURVATURE_MODES:
            x, y, z = rv(st, l), rv(st, l), rv(st, l)
            got = gauss_rhs(pt, ts, zero, mode, x, y, z)
            want = gauss_curvature_oracle(pt, mode, x, y, z)
            assert np.array_equal(got, want), (m, n, l, mode)


def test_gauss_shape_part():
    _, pt, ts = make(2, 1, 3)
    form = random_second_form(9, pt)
    zero = random_second_form(None, pt)
    st = SeedStream(42, 3)
    x, y, z = rv(st, 3), rv(st, 3), rv(st, 3)
    with_b = gauss_rhs(pt, ts, form, "corrected", x, y, z)
    without = gauss_rhs(pt, ts, zero, "corrected", x, y, z)
    byz = np.array([(form.A[a] @ y * z).sum() for a in range(form.p)], dtype=object)
    bxz = np.array([(form.A[a] @ x * z).sum() for a in range(form.p)], dtype=object)
    manual = shape_operator(form, byz) @ x - shape_operator(form, bxz) @ y
    assert np.array_equal(with_b - without, manual)


def test_codazzi_rhs_matches_ambient_projection():
    for m, n, l in CELLS:
        _, pt, ts = make(m, n, l)
        st = SeedStream(7 * m + 5 * n + l, 3)
        for mode in CURVATURE_MODES:
            x, y, z = rv(st, l), rv(st, l), rv(st, l)
            got = codazzi_rhs(pt, ts, mode, x, y, z)
            want = codazzi_curvature_oracle(pt, mode, x, y, z)
            assert np.array_equal(got, want), (m, n, l, mode)


def test_ricci_rhs_matches_ambient_projection():
    for m, n, l in CELLS:
        _, pt, ts = make(m, n, l)
        p = pt.p
        st = SeedStream(13 * m + 3 * n + l, 3)
        for mode in CURVATURE_MODES:
            x, y = rv(st, l), rv(st, l)
            u, v = rv(st, p), rv(st, p)
            got = ricci_rhs(pt, ts, mode, x, y, u, v)
            want = ricci_curvature_oracle(pt, mode, x, y, u, v)
            assert got == want, (m, n, l, mode)


def test_corrected_mode_has_curvature_symmetries():
    for m, n, l in CELLS[:3]:
        _, pt, ts = make(m, n, l)
        st = SeedStream(l + 17 * m, 4)
        x, z = rv(st, l), rv(st, l)
        u = rv(st, pt.p)
        assert not np.any(codazzi_rhs(pt, ts, "corrected", x, x, z))
        assert ricci_rhs(pt, ts, "corrected", x, x, u, rv(st, pt.p)) == 0
        assert ricci_rhs(pt, ts, "corrected", x, rv(st, l), u, u) == 0


def test_literal_mode_breaks_antisymmetry_by_the_known_term():
    # The literal coefficient table carries one doubled monomial; on equal
    # arguments the whole right side collapses to that surplus term.
    sp, pt, ts = make(2, 1, 3)
    st = SeedStream(23, 4)
    x, z = rv(st, 3), rv(st, 3)
    lit = codazzi_rhs(pt, ts, "paper-literal", x, x, z)
    kp = QQ(sp.c1 + sp.c2, 16)
    surplus = (kp * ((ts.f @ x) * z).sum()) * (ts.h @ x)
    assert np.array_equal(lit, surplus)
    assert np.any(lit)


def test_flat_ambient_gives_zero_curvature_parts():
    for mode in CURVATURE_MODES:
        _, pt, ts = make(2, 1, 3, c=(0, 0))
        zero = random_second_form(None, pt)
        st = SeedStream(3, 3)
        x, y, z = rv(st, 3), rv(st, 3), rv(st, 3)
        assert not np.any(gauss_rhs(pt, ts, zero, mode, x, y, z))
        assert not np.any(codazzi_rhs(pt, ts, mode, x, y, z))
        assert ricci_rhs(pt, ts, mode, x, y, rv(st, pt.p), rv(st, pt.p)) == 0


def first_factor_setup(c):
    sp = AmbientSpace(2, 1, QQ(c[0]), QQ(c[1]))
    pt = special_point(sp, "first-factor", 4, seed=6)
    return sp, pt, derive_structure_tensors(pt)


def test_first_factor_point_sees_only_the_first_curvature():
    # Tangent to a J-invariant first factor: the corrected tangential
    # equation cannot depend on the second curvature constant, the normal
    # ones must vanish outright.
    st = SeedStream(51, 3)
    x, y, z = rv(st, 4), rv(st, 4), rv(st, 4)
    u, v = rv(st, 2), rv(st, 2)
    results = {}
    for c in ((4, -8), (4, 100)):
        _, pt, ts = first_factor_setup(c)
        zero = random_second_form(None, pt)
        results[c] = gauss_rhs(pt, ts, zero, "corrected", x, y, z)
        for mode in CURVATURE_MODES:
            assert not np.any(codazzi_rhs(pt, ts, mode, x, y, z))
            assert ricci_rhs(pt, ts, mode, x, y, u, v) == 0
    assert np.array_equal(results[(4, -8)], results[(4, 100)])
    assert np.any(results[(4, -8)])
    # the literal table does not have this independence: its surplus term
    # enters with a weight containing the second constant
    lits = [
        gauss_rhs(p, t, random_second_form(None, p), "paper-literal", x, y, z)
        for _, p, t in (first_factor_setup((4, -8)), first_factor_setup((4, 100)))
    ]
    assert not np.array_equal(lits[0], lits[1])


def test_float_inputs_take_the_float_path():
    _, pt, ts = make(2, 1, 3)
    form = random_second_form(4, pt)
    st = SeedStream(8, 3)
    xi, yi, zi = rv(st, 3), rv(st, 3), rv(st, 3)
    ui, vi = rv(st, pt.p), rv(st, pt.p)
    xf, yf, zf = (np.asarray(w, dtype=float) for w in (xi, yi, zi))
    uf, vf = (np.asarray(w, dtype=float) for w in (ui, vi))
    ge = gauss_rhs(pt, ts, form, "corrected", xi, yi, zi)
    gf = gauss_rhs(pt, ts, form, "corrected", xf, yf, zf)
    assert gf.dtype.kind == "f"
    np.testing.assert_allclose(gf, np.asarray([float(c) for c in ge]), rtol=1e-12)
    ce = codazzi_rhs(pt, ts, "corrected", xi, yi, zi)
    cf = codazzi_rhs(pt, ts, "corrected", xf, yf, zf)
    np.testing.assert_allclose(cf, np.asarray([float(c) for c in ce]), rtol=1e-12)
    re_ = ricci_rhs(pt, ts, "corrected", xi, yi, ui, vi)
    rf = ricci_rhs(pt, ts, "corrected", xf, yf, uf, vf)
    assert isinstance(rf, float)
    np.testing.assert_allclose(rf, float(re_), rtol=1e-12)


def contraction_value(blocks, s2, item, mode, side):
    plus_terms, h_extra, minus_terms = _contraction_entries(blocks, item)
    if side == "plus":
        entries = list(plus_terms)
        if mode == "paper-literal":
            entries.append(h_extra)
    else:
        entries = list(minus_terms)
    dmax = max(d for _, d in entries)
    return QQ(_combine(entries, s2), s2**dmax)


def test_fast_contraction_matches_summed_rhs_reference():
    # Independent slow route: literally sum ricci_rhs over the slot vectors.
    # Separate the two bracket weights by evaluating over two ambient spaces
    # that share the same frame.
    for m, n, l in ((1, 1, 2), (2, 1, 3)):
        for mode in CURVATURE_MODES:
            for key in ("TT", "NP", "TL", "NG"):
                vals = {}
                for c in ((4, 4), (4, -8)):
                    sp, pt, ts = make(m, n, l, seed=19, c=c)
                    vals[c] = ricci_contraction_reference(pt, ts, key, mode)
                _, pt, ts = make(m, n, l, seed=19)
                blocks = _int_blocks(ts, pt.scale_sq)
                s2 = int(pt.scale_sq)
                plus = contraction_value(blocks, s2, ITEM[key], mode, "plus")
                minus = contraction_value(blocks, s2, ITEM[key], mode, "minus")
                # (c1, c2) = (4, 4): weights (1/2, 0); (4, -8): (-1/4, 3/4)
                assert vals[(4, 4)] == QQ(1, 2) * plus, (key, mode)
                assert vals[(4, -8)] == QQ(-1, 4) * plus + QQ(3, 4) * minus, (key, mode)


def test_suite_passes_and_isolates_single_literal_discrepancy():
    for m, n, l in CELLS:
        _, pt, ts = make(m, n, l, seed=29)
        form = random_second_form(31, pt)
        rep = commutator_trace_suite(pt, ts, form)
        assert rep["pass"], (m, n, l)
        assert all(r["pass"] for r in rep["stage_a"]["corrected"])
        assert all(r["pass"] for r in rep["stage_b"])
        assert all(r["equality_pass"] and r["sign_pass"] for r in rep["signs"])
        literal = {r["item"]: r for r in rep["stage_a"]["paper-literal"]}
        for key, row in literal.items():
            assert row["minus_residual_zero"], (m, n, l, key)
            assert row["plus_residual_zero"] == (key != "TT"), (m, n, l, key)


def test_literal_discrepancy_witness_value():
    # The only literal-mode failure is the cancelling pair of trace squares;
    # its residual must equal [tr(HT)]^2 - tr[(HT)^2] in lifted units (both
    # sides sit at the maximal degree of the comparison, so no rescaling).
    _, pt, ts = make(2, 2, 4, seed=29)
    blocks = _int_blocks(ts, pt.scale_sq)
    s2 = int(pt.scale_sq)
    rp_lit, rm_lit = _stage_a_residuals(blocks, s2, ITEM["TT"], "paper-literal")
    rp_cor, rm_cor = _stage_a_residuals(blocks, s2, ITEM["TT"], "corrected")
    HT = blocks["H"] @ blocks["T"]
    tr = lambda M: sum(M[i, i] for i in range(M.shape[0]))
    assert rp_lit == tr(HT) ** 2 - tr(HT @ HT)
    assert rp_lit != 0
    assert rm_lit == 0 and rp_cor == 0 and rm_cor == 0


def test_stage_b_holds_for_arbitrary_symmetric_forms():
    # The commutator rewritings are linear-algebra identities: they cannot
    # care about minimality of the shape set.
    _, pt, ts = make(2, 2, 5, seed=3)
    form = random_second_form(77, pt, minimal=False)
    rep = commutator_trace_suite(pt, ts, form)
    assert all(r["pass"] for r in rep["stage_b"])


def test_sign_statement_catalog_is_complete():
    assert len(SIGN_STATEMENTS) == 8
    keys = [s[0] for s in SIGN_STATEMENTS]
    assert len(set(keys)) == 8
    items = {s[1] for s in SIGN_STATEMENTS}
    assert items <= {it.key for it in TRACE_ITEMS}


def test_suite_is_deterministic():
    _, pt, ts = make(2, 1, 3, seed=12)
    form = random_second_form(5, pt)
    assert commutator_trace_suite(pt, ts, form) == commutator_trace_suite(pt, ts, form)


def test_input_validation():
    _, pt, ts = make(2, 1, 3)
    form = random_second_form(1, pt)
    bad = np.array([1, 2], dtype=object)
    good = np.array([1, 0, -1], dtype=object)
    with pytest.raises(ValueError):
        gauss_rhs(pt, ts, form, "corrected", bad, good, good)
    with pytest.raises(ValueError):
        codazzi_rhs(pt, ts, "corrected", good, bad, good)
    with pytest.raises(ValueError):
        ricci_rhs(pt, ts, "corrected", good, good, bad, np.array([1, 0, 0], dtype=object))
    with pytest.raises(ValueError):
        gauss_rhs(pt, ts, form, "no-such-mode", good, good, good)
