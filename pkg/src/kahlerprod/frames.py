"""Pointwise submanifold data: adapted frames and induced structure tensors.

A point of an l-dimensional submanifold is modelled by an adapted frame of
the ambient R^(2m+2n): l tangent vectors followed by p = 2m+2n-l normal
vectors.  Frames are carried as integer matrices X (columns = frame vectors)
with

    X^T X = scale_sq * I,   scale_sq a positive integer,

i.e. the columns are pairwise orthogonal with a common squared length.  A
frame of exactly unit vectors is not always available over the rationals --
the natural anti-invariant frames are diagonal vectors of squared length 2 --
but every identity below is homogeneous, so the common scale divides out.
Random frames come from the Cayley transform of an integer skew matrix
(scale_sq = det(I+S)^2); the four special constructions realize the
submanifold classes the source text singles out.

The induced structure tensors are the frame-component blocks of J and F:

    X^T J X / scale_sq = [[P, T], [Fs, N]],   X^T F X / scale_sq = [[f, t], [h, s]]

with P, f acting on tangent indices, N, s on normal ones, and T/Fs, t/h the
mixed blocks.  The whole basic identity suite (the squares of J and
F, the mixed commutation relations, both splittings of the composite FJ,
symmetry/skewness claims, and the trace relations) reduces to exact integer
matrix identities on the scaled blocks, which is what ``structure_identity_suite``
checks.  Residuals are exact integers in the scaled units; zero means zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from .ambient import AmbientSpace
from .linalg import (
    QQ,
    SeedStream,
    bareiss_solve,
    cayley_orthogonal_int,
    random_skew_int,
)

__all__ = [
    "SubmanifoldPoint",
    "StructureTensors",
    "random_point",
    "special_point",
    "SPECIAL_KINDS",
    "derive_structure_tensors",
    "structure_identity_suite",
    "STRUCTURE_IDENTITY_IDS",
]

SPECIAL_KINDS = (
    "first-factor",
    "F-anti-invariant",
    "totally-real",
    "anti-invariant-lagrangian",
)


@dataclass(frozen=True)
class SubmanifoldPoint:
    """Adapted frame at a point: integer columns, X^T X = scale_sq * I."""

    space: AmbientSpace
    l: int
    frame: np.ndarray
    scale_sq: int

    @property
    def p(self) -> int:
        return self.space.dim - self.l

    @property
    def tangent(self) -> np.ndarray:
        return self.frame[:, : self.l]

    @property
    def normal(self) -> np.ndarray:
        return self.frame[:, self.l :]

    def validate(self) -> None:
        """Exact orthogonality/uniform-scale check of the adapted frame."""
        F = self.frame.astype(object)
        G = F.T @ F
        expect = self.scale_sq * np.eye(self.space.dim, dtype=object)
        if not np.array_equal(G, expect):
            raise AssertionError("frame Gram matrix is not scale_sq * I")


@dataclass(frozen=True)
class StructureTensors:
    """Frame components of J and F at a point (exact rationals).

    P (l x l) and N (p x p) are the tangent/normal blocks of J, T (l x p) and
    Fs (p x l) its mixed blocks; f, s, t, h are the same blocks of F.
    """

    l: int
    p: int
    P: np.ndarray
    T: np.ndarray
    Fs: np.ndarray
    N: np.ndarray
    f: np.ndarray
    t: np.ndarray
    h: np.ndarray
    s: np.ndarray

    # The four composite operators the later formulas are written in.  G and H
    # are the tangential/normal parts of FJ on tangent vectors, L and K the
    # same on normal vectors.
    @property
    def G(self) -> np.ndarray:
        return self.f @ self.P + self.t @ self.Fs

    @property
    def H(self) -> np.ndarray:
        return self.h @ self.P + self.s @ self.Fs

    @property
    def L(self) -> np.ndarray:
        return self.P @ self.t + self.T @ self.s

    @property
    def K(self) -> np.ndarray:
        return self.Fs @ self.t + self.N @ self.s


def _check_l(space: AmbientSpace, l: int) -> None:
    if not 1 <= l <= space.dim - 1:
        raise ValueError(
            f"tangent dimension l={l} out of range 1..{space.dim - 1} "
            f"(the normal frame must be nonempty)"
        )


def random_point(space: AmbientSpace, l: int, seed: int | None) -> SubmanifoldPoint:
    """Seeded random adapted frame; seed=None gives the standard basis."""
    _check_l(space, l)
    if seed is None:
        frame = np.eye(space.dim, dtype=np.int64)
        return SubmanifoldPoint(space, l, frame, 1)
    X, d = cayley_orthogonal_int(space.dim, SeedStream(seed, 2))
    return SubmanifoldPoint(space, l, X, int(d) * int(d))


@lru_cache(maxsize=None)
def _j_perm_signs(dim: int):
    # J acts per complex pair as (x, y) -> (-y, x); as row operations on a
    # matrix of column vectors: row 2k of JX is -row 2k+1 of X, row 2k+1 is
    # row 2k.
    perm = np.empty(dim, dtype=np.intp)
    signs = np.empty(dim, dtype=np.int64)
    for k in range(dim // 2):
        perm[2 * k] = 2 * k + 1
        perm[2 * k + 1] = 2 * k
        signs[2 * k] = -1
        signs[2 * k + 1] = 1
    return perm, signs


def _apply_J_rows(space: AmbientSpace, X: np.ndarray) -> np.ndarray:
    perm, signs = _j_perm_signs(space.dim)
    if X.dtype == object:
        return X[perm] * signs.astype(object)[:, None]
    return X[perm] * signs[:, None]


def _apply_F_rows(space: AmbientSpace, X: np.ndarray) -> np.ndarray:
    fs = np.ones(space.dim, dtype=np.int64)
    fs[2 * space.m :] = -1
    if X.dtype == object:
        return X * fs.astype(object)[:, None]
    return X * fs[:, None]


def _commuting_rotation_int(space: AmbientSpace, stream: SeedStream) -> tuple[np.ndarray, int]:
    """Integer-scaled ambient rotation commuting with both J and F.

    Block-diagonal per factor (commutes with F); each block is the Cayley
    transform of S0 - J S0 J, which commutes with the factor's J.
    """
    blocks = []
    dens = []
    for fdim in (2 * space.m, 2 * space.n):
        if fdim == 0:
            blocks.append(np.zeros((0, 0), dtype=object))
            dens.append(1)
            continue
        S0 = random_skew_int(fdim, stream).astype(object)
        S = S0 - _sandwich_J(S0)
        n_ = fdim
        I = np.eye(n_, dtype=object)
        Xb, db = bareiss_solve(I - S, I + S)
        blocks.append(np.asarray(Xb, dtype=object))
        dens.append(abs(int(db)))
    d1, d2 = dens
    top = blocks[0] * d2
    bot = blocks[1] * d1
    R = np.zeros((space.dim, space.dim), dtype=object)
    k = top.shape[0]
    R[:k, :k] = top
    R[k:, k:] = bot
    return R, d1 * d2


def special_point(space: AmbientSpace, kind: str, l: int, seed: int | None) -> SubmanifoldPoint:
    """Adapted frame of one of the four distinguished submanifold classes.

    * ``first-factor``  (l = 2m): tangent space is the whole first factor,
      so F restricts to +identity tangentially (f = I, h = 0, s = -I, t = 0).
    * ``F-anti-invariant``  (m = n, l <= 2m): tangent spanned by diagonal
      vectors u + u, so F maps tangents to normals (f = 0).
    * ``totally-real``  (l <= m+n): J maps tangents to normals (P = 0).
    * ``anti-invariant-lagrangian``  (m = n, l = 2m): diagonal over a
      totally-real frame together with its twisted J-images; f = 0 and P = 0
      (and s = 0) simultaneously.

    A seeded ambient rotation commuting with J and F is applied for variety
    in coordinates; it leaves every induced structure tensor unchanged.
    """
    if kind not in SPECIAL_KINDS:
        raise ValueError(f"unknown special point kind {kind!r}")
    _check_l(space, l)
    m, n, dim = space.m, space.n, space.dim
    stream = SeedStream(0 if seed is None else seed, 5)

    if kind == "first-factor":
        if l != 2 * m or n == 0:
            raise ValueError("first-factor points need l = 2m and n >= 1")
        frame = np.eye(dim, dtype=object)
        scale_sq = 1
    elif kind == "F-anti-invariant":
        if m != n or l > 2 * m:
            raise ValueError("F-anti-invariant points need m = n and l <= 2m")
        U, d = (np.eye(2 * m, dtype=np.int64), 1) if seed is None else cayley_orthogonal_int(2 * m, stream)
        U = U.astype(object)
        diag = np.vstack([U, U])        # columns u_a + u_a
        anti = np.vstack([U, -U])       # columns u_a - u_a
        cols = [diag[:, a] for a in range(l)]
        cols += [anti[:, a] for a in range(l)]
        cols += [diag[:, a] for a in range(l, 2 * m)]
        cols += [anti[:, a] for a in range(l, 2 * m)]
        frame = np.stack(cols, axis=1)
        scale_sq = 2 * int(d) * int(d)
    elif kind == "totally-real":
        if l > m + n:
            raise ValueError("totally-real points need l <= m + n")
        # the x-axis directions of each complex pair, tangent first
        x_axes = [2 * k for k in range(m + n)]
        y_axes = [2 * k + 1 for k in range(m + n)]
        order = x_axes[:l] + x_axes[l:] + y_axes
        frame = np.eye(dim, dtype=object)[:, order]
        scale_sq = 1
    else:  # anti-invariant-lagrangian
        if m != n or l != 2 * m:
            raise ValueError("anti-invariant-lagrangian points need m = n and l = m + n = 2m")
        U, d = (np.eye(2 * m, dtype=np.int64), 1) if seed is None else _commuting_factor_rotation(m, stream)
        U = U.astype(object)
        u_cols = [U[:, 2 * i] for i in range(m)]           # totally real frame
        ju_cols = [_apply_J_rows_factor(U[:, 2 * i]) for i in range(m)]
        cols = []
        for u in u_cols:
            cols.append(np.concatenate([u, u]))
        for ju in ju_cols:
            cols.append(np.concatenate([ju, -ju]))
        for u in u_cols:
            cols.append(np.concatenate([u, -u]))
        for ju in ju_cols:
            cols.append(np.concatenate([ju, ju]))
        frame = np.stack(cols, axis=1)
        scale_sq = 2 * int(d) * int(d)

    if seed is not None:
        R, dr = _commuting_rotation_int(space, stream)
        frame = R @ frame.astype(object)
        scale_sq = scale_sq * dr * dr
    point = SubmanifoldPoint(space, l, frame, int(scale_sq))
    point.validate()
    return point


def _apply_J_rows_factor(col: np.ndarray) -> np.ndarray:
    fdim = col.shape[0]
    perm, signs = _j_perm_signs(fdim)
    return col[perm] * signs.astype(object)


def _sandwich_J(M: np.ndarray) -> np.ndarray:
    """J M J for the standard block J, via row and column operations.

    Left: (J M)[2k] = -M[2k+1], (J M)[2k+1] = M[2k].  Right: (M J)[:, 2k] =
    M[:, 2k+1], (M J)[:, 2k+1] = -M[:, 2k] (note the opposite sign pattern).
    """
    fdim = M.shape[0]
    perm, signs = _j_perm_signs(fdim)
    sgn = signs.astype(object)
    JM = M[perm] * sgn[:, None]
    return JM[:, perm] * (-sgn)[None, :]


def _commuting_factor_rotation(m: int, stream: SeedStream) -> tuple[np.ndarray, int]:
    """Rational rotation of one factor commuting with its complex structure."""
    fdim = 2 * m
    S0 = random_skew_int(fdim, stream).astype(object)
    S = S0 - _sandwich_J(S0)
    I = np.eye(fdim, dtype=object)
    X, d = bareiss_solve(I - S, I + S)
    return np.asarray(X, dtype=object), abs(int(d))


# ---------------------------------------------------------------------------
# structure tensors
# ---------------------------------------------------------------------------


def _scaled_blocks(point: SubmanifoldPoint):
    """Integer matrices scale_sq*[[P,T],[Fs,N]], scale_sq*[[f,t],[h,s]], and
    scale_sq*(frame components of the composite FJ)."""
    X = point.frame
    sp = point.space
    big = _needs_bigint(point)
    Xw = X.astype(object) if big else np.asarray(X, dtype=np.int64)
    JX = _apply_J_rows(sp, Xw)
    FX = _apply_F_rows(sp, Xw)
    FJX = _apply_F_rows(sp, JX)
    Jhat = Xw.T @ JX
    Fhat = Xw.T @ FX
    Ghat = Xw.T @ FJX
    return Jhat, Fhat, Ghat


def _needs_bigint(point: SubmanifoldPoint) -> bool:
    s = int(point.scale_sq)
    # degree-2 residuals reach ~ (dim+1) * s^2; stay clear of 2^63
    return point.frame.dtype == object or (point.space.dim + 2) * s * s >= 2**62


def derive_structure_tensors(point: SubmanifoldPoint) -> StructureTensors:
    """Exact rational structure tensor blocks at the point."""
    Jhat, Fhat, _ = _scaled_blocks(point)
    l, s = point.l, int(point.scale_sq)

    def q(block):
        return np.array(
            [[mpq(int(v), s) for v in row] for row in block], dtype=object
        )

    return StructureTensors(
        l=l,
        p=point.p,
        P=q(Jhat[:l, :l]),
        T=q(Jhat[:l, l:]),
        Fs=q(Jhat[l:, :l]),
        N=q(Jhat[l:, l:]),
        f=q(Fhat[:l, :l]),
        t=q(Fhat[:l, l:]),
        h=q(Fhat[l:, :l]),
        s=q(Fhat[l:, l:]),
    )


STRUCTURE_IDENTITY_IDS = (
    "P^2 = -I - T Fs",
    "Fs P + N Fs = 0",
    "P T + T N = 0",
    "N^2 = -I - Fs T",
    "f^2 = I - t h",
    "h f + s h = 0",
    "f t + t s = 0",
    "s^2 = I - h t",
    "f T + t N = P t + T s",
    "h P + s Fs = Fs f + N h",
    "f P + t Fs = P f + T h",
    "h T + s N = Fs t + N s",
    "FJ tangent = (fP+tFs) + (hP+sFs)",
    "FJ tangent = (Pf+Th) + (Fsf+Nh)",
    "FJ normal = (Pt+Ts) + (Fst+Ns)",
    "FJ normal = (fT+tN) + (hT+sN)",
    "f symmetric",
    "s symmetric",
    "h t symmetric",
    "Fs T symmetric",
    "P skew",
    "N skew",
    "FJ skew",
    "f P + t Fs skew",
    "Fs t + N s skew",
    "Fs = -T^T",
    "h = t^T",
    "(h P + s Fs) adjoint to -(P t + T s)",
    "tr(f P) = 0",
    "tr(s N) = 0",
    "tr(h T) = 0",
    "tr(Fs t) = 0",
    "tr[(h T)^2] = tr[(Fs t)^2]",
)


def _maxabs(M) -> int:
    if M.size == 0:
        return 0
    return int(np.abs(M).max())


def structure_identity_suite(point: SubmanifoldPoint) -> dict:
    """Every basic structure-tensor identity, exact, itemized.

    Returns ``{"scale_sq":..., "items": [{"id":..., "residual": int,
    "pass": bool}, ...], "pass": bool}``.  Residuals are reported in scaled
    integer units (homogeneous in scale_sq, so zero iff the rational identity
    holds; the nonzero magnitude is diagnostic only).
    """
    Jh, Fh, Gh = _scaled_blocks(point)
    l = point.l
    s = int(point.scale_sq)
    s2 = s * s
    if Jh.dtype == object:
        Il = s2 * np.eye(l, dtype=object)
        Ip = s2 * np.eye(point.p, dtype=object)
    else:
        Il = s2 * np.eye(l, dtype=np.int64)
        Ip = s2 * np.eye(point.p, dtype=np.int64)

    P, T = Jh[:l, :l], Jh[:l, l:]
    Fs, N = Jh[l:, :l], Jh[l:, l:]
    f, t = Fh[:l, :l], Fh[:l, l:]
    h, sm = Fh[l:, :l], Fh[l:, l:]

    fP_tFs = f @ P + t @ Fs
    hP_sFs = h @ P + sm @ Fs
    Pt_Ts = P @ t + T @ sm
    Fst_Ns = Fs @ t + N @ sm
    hT = h @ T
    Fst = Fs @ t

    # degree-4 traces exceed int64 comfortably; lift to big ints
    hT_o = hT.astype(object)
    Fst_o = Fst.astype(object)

    vals = {
        "P^2 = -I - T Fs": _maxabs(P @ P + Il + T @ Fs),
        "Fs P + N Fs = 0": _maxabs(Fs @ P + N @ Fs),
        "P T + T N = 0": _maxabs(P @ T + T @ N),
        "N^2 = -I - Fs T": _maxabs(N @ N + Ip + Fs @ T),
        "f^2 = I - t h": _maxabs(f @ f - Il + t @ h),
        "h f + s h = 0": _maxabs(h @ f + sm @ h),
        "f t + t s = 0": _maxabs(f @ t + t @ sm),
        "s^2 = I - h t": _maxabs(sm @ sm - Ip + h @ t),
        "f T + t N = P t + T s": _maxabs(f @ T + t @ N - Pt_Ts),
        "h P + s Fs = Fs f + N h": _maxabs(hP_sFs - Fs @ f - N @ h),
        "f P + t Fs = P f + T h": _maxabs(fP_tFs - P @ f - T @ h),
        "h T + s N = Fs t + N s": _maxabs(h @ T + sm @ N - Fst_Ns),
        "FJ tangent = (fP+tFs) + (hP+sFs)": max(
            _maxabs(s * Gh[:l, :l] - fP_tFs), _maxabs(s * Gh[l:, :l] - hP_sFs)
        ),
        "FJ tangent = (Pf+Th) + (Fsf+Nh)": max(
            _maxabs(s * Gh[:l, :l] - P @ f - T @ h),
            _maxabs(s * Gh[l:, :l] - Fs @ f - N @ h),
        ),
        "FJ normal = (Pt+Ts) + (Fst+Ns)": max(
            _maxabs(s * Gh[:l, l:] - Pt_Ts), _maxabs(s * Gh[l:, l:] - Fst_Ns)
        ),
        "FJ normal = (fT+tN) + (hT+sN)": max(
            _maxabs(s * Gh[:l, l:] - f @ T - t @ N),
            _maxabs(s * Gh[l:, l:] - h @ T - sm @ N),
        ),
        "f symmetric": _maxabs(f - f.T),
        "s symmetric": _maxabs(sm - sm.T),
        "h t symmetric": _maxabs(h @ t - (h @ t).T),
        "Fs T symmetric": _maxabs(Fs @ T - (Fs @ T).T),
        "P skew": _maxabs(P + P.T),
        "N skew": _maxabs(N + N.T),
        "FJ skew": _maxabs(Gh + Gh.T),
        "f P + t Fs skew": _maxabs(fP_tFs + fP_tFs.T),
        "Fs t + N s skew": _maxabs(Fst_Ns + Fst_Ns.T),
        "Fs = -T^T": _maxabs(Fs + T.T),
        "h = t^T": _maxabs(h - t.T),
        "(h P + s Fs) adjoint to -(P t + T s)": _maxabs(hP_sFs + Pt_Ts.T),
        "tr(f P) = 0": abs(int((f * P.T).sum())),
        "tr(s N) = 0": abs(int((sm * N.T).sum())),
        "tr(h T) = 0": abs(int((h * T.T).sum())),
        "tr(Fs t) = 0": abs(int((Fs * t.T).sum())),
        "tr[(h T)^2] = tr[(Fs t)^2]": abs(
            int((hT_o * hT_o.T).sum() - (Fst_o * Fst_o.T).sum())
        ),
    }
    items = [
        {"id": key, "residual": vals[key], "pass": vals[key] == 0}
        for key in STRUCTURE_IDENTITY_IDS
    ]
    return {
        "scale_sq": s,
        "items": items,
        "pass": all(it["pass"] for it in items),
    }
