"""Tests for adapted frames and induced structure tensors."""

import numpy as np
import pytest

from kahlerprod.ambient import AmbientSpace
from kahlerprod.frames import (
    SPECIAL_KINDS,
    STRUCTURE_IDENTITY_IDS,
    derive_structure_tensors,
    random_point,
    special_point,
    structure_identity_suite,
)
from kahlerprod.linalg import QQ

CELLS = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)]


def space_for(m, n):
    return AmbientSpace(m, n, QQ(4), QQ(-8))


def all_l(space):
    return range(1, space.dim)


def test_random_point_frame_is_exactly_orthogonal():
    for m, n in CELLS:
        sp = space_for(m, n)
        for seed in (None, 1, 2):
            pt = random_point(sp, min(2, sp.dim - 1), seed)
            pt.validate()
            assert pt.p == sp.dim - pt.l


def test_random_point_rejects_bad_l():
    sp = space_for(1, 1)
    for l in (0, sp.dim, sp.dim + 3, -1):
        with pytest.raises(ValueError):
            random_point(sp, l, 1)


def test_random_point_is_deterministic():
    sp = space_for(2, 1)
    a = random_point(sp, 3, 77)
    b = random_point(sp, 3, 77)
    assert np.array_equal(a.frame, b.frame)
    assert a.scale_sq == b.scale_sq


def test_structure_tensor_block_adjoints():
    # Fs = -T^T and h = t^T are forced by J-skewness / F-symmetry.
    for m, n in CELLS:
        sp = space_for(m, n)
        for l in all_l(sp):
            ts = derive_structure_tensors(random_point(sp, l, 3))
            assert np.array_equal(ts.Fs, -ts.T.T)
            assert np.array_equal(ts.h, ts.t.T)
            assert np.array_equal(ts.P, -ts.P.T)
            assert np.array_equal(ts.N, -ts.N.T)
            assert np.array_equal(ts.f, ts.f.T)
            assert np.array_equal(ts.s, ts.s.T)


def test_identity_suite_passes_on_random_frames():
    for m, n in CELLS:
        sp = space_for(m, n)
        for l in all_l(sp):
            for seed in (None, 1, 9):
                rep = structure_identity_suite(random_point(sp, l, seed))
                failing = [it["id"] for it in rep["items"] if not it["pass"]]
                assert not failing, (m, n, l, seed, failing)
                assert rep["pass"]


def test_identity_suite_is_itemized_and_complete():
    rep = structure_identity_suite(random_point(space_for(1, 1), 2, 4))
    assert tuple(it["id"] for it in rep["items"]) == STRUCTURE_IDENTITY_IDS
    assert len(STRUCTURE_IDENTITY_IDS) == 33
    assert all(isinstance(it["residual"], int) for it in rep["items"])


def test_first_factor_point_tensors():
    sp = space_for(2, 1)
    pt = special_point(sp, "first-factor", 4, seed=3)
    ts = derive_structure_tensors(pt)
    eye_l = np.eye(pt.l, dtype=object)
    assert np.array_equal(ts.f, eye_l)
    assert not np.any(ts.t)
    assert not np.any(ts.h)
    assert np.array_equal(ts.s, -np.eye(pt.p, dtype=object))
    # the first factor is J-invariant, so J never mixes tangent and normal
    assert not np.any(ts.T)
    assert not np.any(ts.Fs)


def test_f_anti_invariant_point_kills_f():
    sp = space_for(2, 2)
    for l in (1, 2, 3, 4):
        ts = derive_structure_tensors(special_point(sp, "F-anti-invariant", l, seed=6))
        assert not np.any(ts.f)


def test_totally_real_point_kills_P():
    for m, n in CELLS:
        sp = space_for(m, n)
        for l in range(1, m + n + 1):
            ts = derive_structure_tensors(special_point(sp, "totally-real", l, seed=2))
            assert not np.any(ts.P)


def test_lagrangian_point_kills_f_P_s():
    sp = space_for(2, 2)
    ts = derive_structure_tensors(special_point(sp, "anti-invariant-lagrangian", 4, seed=5))
    assert not np.any(ts.f)
    assert not np.any(ts.P)
    assert not np.any(ts.s)


def test_special_points_pass_identity_suite():
    sp = space_for(2, 2)
    cases = [("first-factor", 4), ("F-anti-invariant", 3), ("totally-real", 4),
             ("anti-invariant-lagrangian", 4)]
    for kind, l in cases:
        for seed in (None, 8):
            rep = structure_identity_suite(special_point(sp, kind, l, seed))
            assert rep["pass"], (kind, seed)


def test_commuting_rotation_preserves_tensors():
    # For the kinds built from a fixed frame, the seeded ambient rotation
    # (which commutes with J and F) must not change any induced tensor.
    sp = space_for(2, 1)
    for kind, l in (("first-factor", 4), ("totally-real", 3)):
        base = derive_structure_tensors(special_point(sp, kind, l, None))
        spun = derive_structure_tensors(special_point(sp, kind, l, 31))
        for name in ("P", "T", "Fs", "N", "f", "t", "h", "s"):
            assert np.array_equal(getattr(base, name), getattr(spun, name)), (kind, name)


def test_special_point_validates_inputs():
    sp = space_for(2, 1)
    with pytest.raises(ValueError):
        special_point(sp, "no-such-kind", 2, 1)
    with pytest.raises(ValueError):
        special_point(sp, "first-factor", 3, 1)  # needs l = 2m
    with pytest.raises(ValueError):
        special_point(sp, "F-anti-invariant", 2, 1)  # needs m = n
    with pytest.raises(ValueError):
        special_point(sp, "totally-real", 4, 1)  # needs l <= m + n
    assert set(SPECIAL_KINDS) == {
        "first-factor", "F-anti-invariant", "totally-real", "anti-invariant-lagrangian"
    }


def test_trace_relations_vanish_exactly():
    # tr(fP), tr(sN), tr(hT), tr(Fst) are each zero for every frame; the
    # suite checks them in scaled units, here we recheck in rationals.
    sp = space_for(2, 2)
    for l in (2, 4, 6):
        ts = derive_structure_tensors(random_point(sp, l, 13))
        for prod in (ts.f @ ts.P, ts.s @ ts.N, ts.h @ ts.T, ts.Fs @ ts.t):
            assert sum(prod[i, i] for i in range(prod.shape[0])) == 0


def test_degree_four_trace_identity():
    sp = space_for(2, 1)
    for l in (2, 3, 4):
        ts = derive_structure_tensors(random_point(sp, l, 21))
        hT = ts.h @ ts.T
        Fst = ts.Fs @ ts.t
        # normal-normal blocks of FJ = JF agree...
        assert np.array_equal(hT + ts.s @ ts.N, Fst + ts.N @ ts.s)
        # ...and their fourth-degree traces coincide.
        lhs = sum((hT @ hT)[i, i] for i in range(hT.shape[0]))
        rhs = sum((Fst @ Fst)[i, i] for i in range(Fst.shape[0]))
        assert lhs == rhs
