"""Numerical checks on explicit parametric submanifolds of the flat product.

Everything in this module lives in C^m x C^n with both curvature constants
zero.  That makes the ambient covariant derivative the plain coordinate
derivative, so the whole submanifold apparatus is realized by projections:
for fields along the submanifold, nabla_X W = tangential part of dW(X), and
D_X V = normal part of dV(X); the second fundamental form is the normal part
of the parameter Hessian of the immersion.  The product structure F is as
nontrivial here as in any curved ambient, so the eight covariant-derivative
formulas for the structure tensors, and the (flat-ambient) Gauss, Codazzi
and Ricci equations, are all exercised with honest residuals.

Derivatives are taken with 4th-order central stencils at a default step of
1e-3.  Two quantities need differentiable *frames* rather than projections:
the normal-connection coefficients and the frame components of B.  For those
a continuity gauge is used -- the normal frame at a displaced parameter is
the orthonormal polar alignment of the base-point frame projected onto the
new normal space -- which is smooth in the parameter and frees the residuals
from frame-flip artifacts.  Mixed parameter second derivatives are computed
once per unordered pair, so component symmetry of B is structural; the
residual checks that matter are the equation residuals themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .frames import STRUCTURE_IDENTITY_IDS, StructureTensors

__all__ = [
    "Embedding",
    "NumericalPointData",
    "builtin_embeddings",
    "get_embedding",
    "frame_at",
    "structure_identity_residuals",
    "verify_fundamental_equations",
    "verify_structure_derivatives",
    "convergence_check",
    "FUNDAMENTAL_TOLS",
    "STRUCTURE_DERIVATIVE_IDS",
]

# acceptance tolerances for the fundamental-equation residuals at step 1e-3
FUNDAMENTAL_TOLS = {"gauss": 1e-6, "codazzi": 1e-4, "ricci": 1e-4}

_DERIV_TOL = 1e-4
_FRAME_TOL = 1e-10
_RANK_TOL = 1e-8


@dataclass(frozen=True)
class Embedding:
    """Parametric submanifold u in R^l -> R^(2m+2n) of the flat product.

    ``chart`` maps a parameter array of shape (l,) to an ambient point;
    ``domain`` is a box of (lo, hi) bounds per parameter.  The Jacobian must
    have rank l on the interior (checked on use, not on construction).
    """

    name: str
    m: int
    n: int
    l: int
    domain: tuple[tuple[float, float], ...]
    chart: Callable[[np.ndarray], np.ndarray]
    summary: str = ""

    @property
    def ambient_dim(self) -> int:
        return 2 * self.m + 2 * self.n

    def center(self) -> np.ndarray:
        return np.array([(lo + hi) / 2.0 for lo, hi in self.domain])

    def _check_margin(self, u: np.ndarray, margin: float) -> None:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.l,):
            raise ValueError(f"parameter shape {u.shape} != ({self.l},)")
        for k, (lo, hi) in enumerate(self.domain):
            if not (lo + margin <= u[k] <= hi - margin):
                raise ValueError(
                    f"parameter {u[k]} in slot {k} leaves no stencil margin "
                    f"{margin} inside [{lo}, {hi}]"
                )


@dataclass(frozen=True)
class NumericalPointData:
    """Finite-difference frame data at one parameter of an embedding.

    Tangent/normal frames are orthonormal columns; ``shape_operators`` holds
    the p matrices of the second fundamental form in those frames (symmetric
    by construction); ``christoffels[k, i, j]`` are the induced-metric
    connection coefficients in the parameter coordinates.
    """

    embedding: Embedding
    u: np.ndarray
    step: float
    tangent: np.ndarray
    normal: np.ndarray
    jacobian: np.ndarray
    metric: np.ndarray
    christoffels: np.ndarray
    shape_operators: tuple[np.ndarray, ...]

    @property
    def l(self) -> int:
        return self.embedding.l

    @property
    def p(self) -> int:
        return self.embedding.ambient_dim - self.embedding.l

    def structure_blocks(self) -> StructureTensors:
        """Float frame components of J and F, same layout as the exact ones."""
        E, V = self.tangent, self.normal
        JE, JV = _J(self.embedding, E), _J(self.embedding, V)
        FE, FV = _F(self.embedding, E), _F(self.embedding, V)
        return StructureTensors(
            l=self.l, p=self.p,
            P=E.T @ JE, T=E.T @ JV, Fs=V.T @ JE, N=V.T @ JV,
            f=E.T @ FE, t=E.T @ FV, h=V.T @ FE, s=V.T @ FV,
        )


# ---------------------------------------------------------------------------
# stencils


def _d1(fn, u, i, h):
    """4th-order central first derivative of a vector/matrix field."""
    e = np.zeros_like(u)
    e[i] = h
    return (fn(u - 2 * e) - 8 * fn(u - e) + 8 * fn(u + e) - fn(u + 2 * e)) / (12 * h)


def _d2_diag(fn, u, i, h):
    e = np.zeros_like(u)
    e[i] = h
    return (
        -fn(u - 2 * e) + 16 * fn(u - e) - 30 * fn(u) + 16 * fn(u + e) - fn(u + 2 * e)
    ) / (12 * h * h)


def _hessian(fn, u, l, h):
    """All second derivatives; each unordered pair evaluated once."""
    probe = fn(u)
    sec = np.empty((l, l) + probe.shape)
    for i in range(l):
        sec[i, i] = _d2_diag(fn, u, i, h)
        for j in range(i + 1, l):
            sec[i, j] = sec[j, i] = _d1(lambda v: _d1(fn, v, j, h), u, i, h)
    return sec


# ---------------------------------------------------------------------------
# ambient operators (row action on column-vector matrices)


def _J(emb: Embedding, X: np.ndarray) -> np.ndarray:
    out = np.empty_like(X)
    out[0::2] = -X[1::2]
    out[1::2] = X[0::2]
    return out


def _F(emb: Embedding, X: np.ndarray) -> np.ndarray:
    out = X.copy()
    out[2 * emb.m :] *= -1.0
    return out


# ---------------------------------------------------------------------------
# pointwise frame data


def _jacobian(emb: Embedding, u: np.ndarray, h: float) -> np.ndarray:
    cols = [_d1(emb.chart, u, i, h) for i in range(emb.l)]
    return np.stack(cols, axis=1)


def _split_frames(jac: np.ndarray):
    """Orthonormal tangent/normal frames from a full QR, sign-fixed."""
    dim, l = jac.shape
    Q, R = np.linalg.qr(jac, mode="complete")
    diag = np.abs(np.diagonal(R[:l, :l]))
    if diag.min() <= _RANK_TOL * max(diag.max(), 1.0):
        raise ValueError("Jacobian is rank deficient at this parameter")
    signs = np.sign(np.diagonal(R[:l, :l]))
    E = Q[:, :l] * signs
    return E, Q[:, l:]


def _metric_derivatives(emb: Embedding, u, h, jac, sec):
    # d_k g_ij = <d_k d_i phi, d_j phi> + <d_i phi, d_k d_j phi>, using the
    # direct second-derivative stencils rather than differencing the metric
    l = emb.l
    dg = np.empty((l, l, l))
    for k in range(l):
        ski = sec[k] @ jac
        dg[k] = ski + ski.T
    return dg


def _christoffels(metric_inv, dg):
    l = dg.shape[0]
    gamma = np.empty((l, l, l))
    for i in range(l):
        for j in range(l):
            v = 0.5 * (dg[i][j] + dg[j][i] - dg[:, i, j])
            gamma[:, i, j] = metric_inv @ v
    return gamma


def frame_at(emb: Embedding, u, step: float = 1e-3) -> NumericalPointData:
    """Orthonormal adapted frame, shape operators and Christoffels at u."""
    u = np.asarray(u, dtype=float)
    emb._check_margin(u, 2 * step)
    jac = _jacobian(emb, u, step)
    sec = _hessian(emb.chart, u, emb.l, step)
    E, V = _split_frames(jac)
    metric = jac.T @ jac
    dg = _metric_derivatives(emb, u, step, jac, sec)
    gamma = _christoffels(np.linalg.inv(metric), dg)
    # B in the orthonormal tangent frame: pull the normal part of the Hessian
    # back through the coordinate change E = jac @ C
    C = np.linalg.solve(metric, jac.T @ E)
    b_norm = np.einsum("ijd,da->ija", sec, V)  # normal components, coord slots
    b = np.einsum("ia,jb,ijq->qab", C, C, b_norm)
    ops = tuple(0.5 * (b[q] + b[q].T) for q in range(V.shape[1]))
    return NumericalPointData(
        embedding=emb, u=u, step=step, tangent=E, normal=V, jacobian=jac,
        metric=metric, christoffels=gamma, shape_operators=ops,
    )


def structure_identity_residuals(data: NumericalPointData) -> dict:
    """Float residuals of the full basic identity suite on a numeric frame.

    Same identity ids as the exact suite; pass threshold 1e-9.
    """
    ts = data.structure_blocks()
    l, p = ts.l, ts.p
    Il, Ip = np.eye(l), np.eye(p)
    P, T, Fs, N = ts.P, ts.T, ts.Fs, ts.N
    f, t, h, s = ts.f, ts.t, ts.h, ts.s
    G, H, L, K = ts.G, ts.H, ts.L, ts.K
    X = np.hstack([data.tangent, data.normal])
    FJX = _F(data.embedding, _J(data.embedding, X))
    Gh = X.T @ FJX
    hT, Fst = h @ T, Fs @ t

    def mx(M):
        return 0.0 if M.size == 0 else float(np.abs(M).max())

    vals = {
        "P^2 = -I - T Fs": mx(P @ P + Il + T @ Fs),
        "Fs P + N Fs = 0": mx(Fs @ P + N @ Fs),
        "P T + T N = 0": mx(P @ T + T @ N),
        "N^2 = -I - Fs T": mx(N @ N + Ip + Fs @ T),
        "f^2 = I - t h": mx(f @ f - Il + t @ h),
        "h f + s h = 0": mx(h @ f + s @ h),
        "f t + t s = 0": mx(f @ t + t @ s),
        "s^2 = I - h t": mx(s @ s - Ip + h @ t),
        "f T + t N = P t + T s": mx(f @ T + t @ N - L),
        "h P + s Fs = Fs f + N h": mx(H - Fs @ f - N @ h),
        "f P + t Fs = P f + T h": mx(G - P @ f - T @ h),
        "h T + s N = Fs t + N s": mx(h @ T + s @ N - K),
        "FJ tangent = (fP+tFs) + (hP+sFs)": max(
            mx(Gh[:l, :l] - G), mx(Gh[l:, :l] - H)
        ),
        "FJ tangent = (Pf+Th) + (Fsf+Nh)": max(
            mx(Gh[:l, :l] - P @ f - T @ h), mx(Gh[l:, :l] - Fs @ f - N @ h)
        ),
        "FJ normal = (Pt+Ts) + (Fst+Ns)": max(
            mx(Gh[:l, l:] - L), mx(Gh[l:, l:] - K)
        ),
        "FJ normal = (fT+tN) + (hT+sN)": max(
            mx(Gh[:l, l:] - f @ T - t @ N), mx(Gh[l:, l:] - h @ T - s @ N)
        ),
        "f symmetric": mx(f - f.T),
        "s symmetric": mx(s - s.T),
        "h t symmetric": mx(h @ t - (h @ t).T),
        "Fs T symmetric": mx(Fs @ T - (Fs @ T).T),
        "P skew": mx(P + P.T),
        "N skew": mx(N + N.T),
        "FJ skew": mx(Gh + Gh.T),
        "f P + t Fs skew": mx(G + G.T),
        "Fs t + N s skew": mx(K + K.T),
        "Fs = -T^T": mx(Fs + T.T),
        "h = t^T": mx(h - t.T),
        "(h P + s Fs) adjoint to -(P t + T s)": mx(H + L.T),
        "tr(f P) = 0": abs(float((f * P.T).sum())),
        "tr(s N) = 0": abs(float((s * N.T).sum())),
        "tr(h T) = 0": abs(float((h * T.T).sum())),
        "tr(Fs t) = 0": abs(float((Fs * t.T).sum())),
        "tr[(h T)^2] = tr[(Fs t)^2]": abs(
            float((hT * hT.T).sum() - (Fst * Fst.T).sum())
        ),
    }
    assert set(vals) == set(STRUCTURE_IDENTITY_IDS)
    items = [
        {"id": key, "residual": vals[key], "pass": vals[key] <= 1e-9}
        for key in STRUCTURE_IDENTITY_IDS
    ]
    return {"items": items, "pass": all(it["pass"] for it in items)}


# ---------------------------------------------------------------------------
# differentiable frame fields (continuity gauge)


def _tangent_projector(emb: Embedding, u: np.ndarray, h: float) -> np.ndarray:
    jac = _jacobian(emb, u, h)
    return jac @ np.linalg.solve(jac.T @ jac, jac.T)


def _aligned_normal(emb: Embedding, u, h, base_normal):
    """Normal frame at u smoothly gauged to the base frame (polar alignment)."""
    jac = _jacobian(emb, u, h)
    _, V0 = _split_frames(jac)
    U, _, Wt = np.linalg.svd(V0.T @ base_normal)
    return V0 @ (U @ Wt)


# ---------------------------------------------------------------------------
# fundamental equations


def verify_fundamental_equations(emb: Embedding, u, step: float = 1e-3) -> dict:
    """Gauss / Codazzi / Ricci residuals at u, flat-ambient right sides.

    Gauss compares the coordinate curvature of the induced metric, moved to
    the orthonormal frame, with the shape-operator commutator expression.
    Codazzi differentiates the frame components of B with Christoffel and
    normal-connection corrections; Ricci compares the curvature of the
    normal connection with -[A, A].  All stencil nesting stays within a
    5-step margin of the domain.
    """
    u = np.asarray(u, dtype=float)
    emb._check_margin(u, 5 * step)
    h = step
    l = emb.l
    data = frame_at(emb, u, h)
    jac, E, V = data.jacobian, data.tangent, data.normal
    metric, gamma = data.metric, data.christoffels
    ginv = np.linalg.inv(metric)
    C = np.linalg.solve(metric, jac.T @ E)
    sec = _hessian(emb.chart, u, l, h)
    b_coord = np.einsum("ijd,da->ija", sec, V @ V.T)  # ambient normal parts

    def gamma_field(up):
        jac_u = _jacobian(emb, up, h)
        sec_u = _hessian(emb.chart, up, l, h)
        dg = _metric_derivatives(emb, up, h, jac_u, sec_u)
        return _christoffels(np.linalg.inv(jac_u.T @ jac_u), dg)

    # Gauss: R(di,dj)dk = sum_q Rc[q,i,j,k] dq from the coordinate formula
    dgamma = np.stack([_d1(gamma_field, u, i, h) for i in range(l)])
    Rc = (
        np.einsum("iqjk->qijk", dgamma)
        - np.einsum("jqik->qijk", dgamma)
        + np.einsum("qia,ajk->qijk", gamma, gamma)
        - np.einsum("qja,aik->qijk", gamma, gamma)
    )
    R_low = np.einsum("qm,qijk->ijkm", metric, Rc)
    rhs_low = np.einsum("jkd,imd->ijkm", b_coord, b_coord) - np.einsum(
        "ikd,jmd->ijkm", b_coord, b_coord
    )
    gauss = np.einsum(
        "ia,jb,kc,md,ijkm->abcd", C, C, C, C, R_low - rhs_low
    )
    res_gauss = float(np.abs(gauss).max())

    # frame fields for the normal connection
    def normal_field(up):
        return _aligned_normal(emb, up, h, V)

    def omega_field(up):
        # D_{d_j} v_a = sum_b omega[j, b, a] v_b
        Vu = normal_field(up)
        dV = np.stack([_d1(normal_field, up, j, h) for j in range(l)])
        return np.einsum("jda,db->jba", dV, Vu)

    def b_comp_field(up):
        sec_u = _hessian(emb.chart, up, l, h)
        return np.einsum("ijd,da->aij", sec_u, normal_field(up))

    omega = omega_field(u)
    b_comp = b_comp_field(u)
    db = np.stack([_d1(b_comp_field, u, i, h) for i in range(l)])
    # (nabla_i B)^beta_jk, then antisymmetrized in i, j
    nabla_b = (
        db
        + np.einsum("iba,ajk->ibjk", omega, b_comp)
        - np.einsum("aij,bak->ibjk", gamma, b_comp)
        - np.einsum("aik,bja->ibjk", gamma, b_comp)
    )
    codazzi_coord = nabla_b - np.einsum("ibjk->jbik", nabla_b)
    codazzi = np.einsum("ia,jc,ibjk,kq->abcq", C, C, codazzi_coord, C)
    res_codazzi = float(np.abs(codazzi).max())

    # Ricci: curvature of the normal connection against -[A_V, A_U]
    domega = np.stack([_d1(omega_field, u, i, h) for i in range(l)])
    Omega = np.empty((l, l, V.shape[1], V.shape[1]))
    for i in range(l):
        for j in range(l):
            Omega[i, j] = (
                domega[i][j]
                - domega[j][i]
                + omega[i] @ omega[j]
                - omega[j] @ omega[i]
            )
    Acoord = np.einsum("ka,bai->bki", ginv, b_comp)
    comm = np.einsum("bkq,aqi->baki", Acoord, Acoord) - np.einsum(
        "akq,bqi->baki", Acoord, Acoord
    )
    comm_low = np.einsum("baki,kj->baij", comm, metric)
    ricci_coord = Omega + np.einsum("baij->ijba", comm_low)
    ricci = np.einsum("ia,jc,ijqw->acqw", C, C, ricci_coord)
    res_ricci = float(np.abs(ricci).max())

    items = [
        {"id": "gauss", "residual": res_gauss,
         "pass": res_gauss <= FUNDAMENTAL_TOLS["gauss"]},
        {"id": "codazzi", "residual": res_codazzi,
         "pass": res_codazzi <= FUNDAMENTAL_TOLS["codazzi"]},
        {"id": "ricci", "residual": res_ricci,
         "pass": res_ricci <= FUNDAMENTAL_TOLS["ricci"]},
    ]
    return {
        "embedding": emb.name, "u": [float(x) for x in u], "step": step,
        "items": items, "pass": all(it["pass"] for it in items),
    }


# ---------------------------------------------------------------------------
# structure-tensor derivative formulas

STRUCTURE_DERIVATIVE_IDS = (
    "(nabla P)Y = A_{FsY} X + T B(X,Y)",
    "(nabla Fs)Y = -B(X,PY) + N B(X,Y)",
    "(nabla T)V = -P A_V X + A_{NV} X",
    "(nabla N)V = -Fs A_V X - B(X,TV)",
    "(nabla f)Y = A_{hY} X + t B(X,Y)",
    "(nabla h)Y = s B(X,Y) - B(X,fY)",
    "(nabla t)V = A_{sV} X - f A_V X",
    "(nabla s)V = -B(X,tV) - h A_V X",
)


def verify_structure_derivatives(emb: Embedding, u, step: float = 1e-3) -> dict:
    """Residuals of the eight covariant-derivative formulas at u.

    Left sides finite-difference the tensor fields (projection composites of
    J and F along the embedding, and gauged normal frame fields); right
    sides are assembled from the frame data at u alone.  Arguments run over
    the coordinate fields and the gauged normal frame.
    """
    u = np.asarray(u, dtype=float)
    emb._check_margin(u, 5 * step)
    h = step
    l = emb.l
    data = frame_at(emb, u, h)
    jac, V = data.jacobian, data.normal
    metric = data.metric
    ginv = np.linalg.inv(metric)
    sec = _hessian(emb.chart, u, l, h)
    Pt = _tangent_projector(emb, u, h)
    Pn = np.eye(emb.ambient_dim) - Pt
    b_coord = np.einsum("ijd,dq->ijq", sec, Pn)

    def Jv(w):
        return _J(emb, w.reshape(-1, 1)).ravel() if w.ndim == 1 else _J(emb, w)

    def Fv(w):
        return _F(emb, w.reshape(-1, 1)).ravel() if w.ndim == 1 else _F(emb, w)

    def shape_vec(w, i):
        # ambient A_W(d_i) for a normal vector w
        return jac @ (ginv @ (b_coord[i] @ w))

    def b_mixed(i, w):
        # B(d_i, W) for a tangent ambient vector w
        comps = ginv @ (jac.T @ w)
        return np.einsum("jq,j->q", b_coord[i], comps)

    def tangent_part_field(op, j):
        def fld(up):
            jac_u = _jacobian(emb, up, h)
            Ptu = jac_u @ np.linalg.solve(jac_u.T @ jac_u, jac_u.T)
            return Ptu @ op(jac_u[:, j])
        return fld

    def normal_part_field(op, j):
        def fld(up):
            jac_u = _jacobian(emb, up, h)
            Ptu = jac_u @ np.linalg.solve(jac_u.T @ jac_u, jac_u.T)
            return op(jac_u[:, j]) - Ptu @ op(jac_u[:, j])
        return fld

    def normal_frame_field(up):
        return _aligned_normal(emb, up, h, V)

    def normal_op_tan_field(op, a):
        def fld(up):
            jac_u = _jacobian(emb, up, h)
            Ptu = jac_u @ np.linalg.solve(jac_u.T @ jac_u, jac_u.T)
            return Ptu @ op(normal_frame_field(up)[:, a])
        return fld

    def normal_op_nor_field(op, a):
        def fld(up):
            jac_u = _jacobian(emb, up, h)
            Ptu = jac_u @ np.linalg.solve(jac_u.T @ jac_u, jac_u.T)
            w = op(normal_frame_field(up)[:, a])
            return w - Ptu @ w
        return fld

    res = dict.fromkeys(STRUCTURE_DERIVATIVE_IDS, 0.0)

    def bump(key, v):
        res[key] = max(res[key], float(np.abs(v).max()))

    for j in range(l):
        Yj = jac[:, j]
        for i in range(l):
            nab_ij = Pt @ sec[i, j]  # nabla_{d_i} d_j, ambient
            Bij = b_coord[i, j]
            # J-built tensors on tangent arguments
            lhs = Pt @ _d1(tangent_part_field(Jv, j), u, i, h) - Pt @ Jv(nab_ij)
            rhs = shape_vec(Pn @ Jv(Yj), i) + Pt @ Jv(Bij)
            bump(STRUCTURE_DERIVATIVE_IDS[0], lhs - rhs)
            lhs = Pn @ _d1(normal_part_field(Jv, j), u, i, h) - (
                Jv(nab_ij) - Pt @ Jv(nab_ij)
            )
            rhs = -b_mixed(i, Pt @ Jv(Yj)) + (Jv(Bij) - Pt @ Jv(Bij))
            bump(STRUCTURE_DERIVATIVE_IDS[1], lhs - rhs)
            # F-built tensors on tangent arguments
            lhs = Pt @ _d1(tangent_part_field(Fv, j), u, i, h) - Pt @ Fv(nab_ij)
            rhs = shape_vec(Pn @ Fv(Yj), i) + Pt @ Fv(Bij)
            bump(STRUCTURE_DERIVATIVE_IDS[4], lhs - rhs)
            lhs = Pn @ _d1(normal_part_field(Fv, j), u, i, h) - (
                Fv(nab_ij) - Pt @ Fv(nab_ij)
            )
            rhs = (Fv(Bij) - Pt @ Fv(Bij)) - b_mixed(i, Pt @ Fv(Yj))
            bump(STRUCTURE_DERIVATIVE_IDS[5], lhs - rhs)

    for a in range(V.shape[1]):
        va = V[:, a]
        for i in range(l):
            DiV = Pn @ _d1(lambda up: normal_frame_field(up)[:, a], u, i, h)
            Ava = shape_vec(va, i)
            lhs = Pt @ _d1(normal_op_tan_field(Jv, a), u, i, h) - Pt @ Jv(DiV)
            rhs = -Pt @ Jv(Ava) + shape_vec(Pn @ Jv(va), i)
            bump(STRUCTURE_DERIVATIVE_IDS[2], lhs - rhs)
            lhs = Pn @ _d1(normal_op_nor_field(Jv, a), u, i, h) - Pn @ Jv(DiV)
            rhs = -Pn @ Jv(Ava) - b_mixed(i, Pt @ Jv(va))
            bump(STRUCTURE_DERIVATIVE_IDS[3], lhs - rhs)
            lhs = Pt @ _d1(normal_op_tan_field(Fv, a), u, i, h) - Pt @ Fv(DiV)
            rhs = shape_vec(Pn @ Fv(va), i) - Pt @ Fv(Ava)
            bump(STRUCTURE_DERIVATIVE_IDS[6], lhs - rhs)
            lhs = Pn @ _d1(normal_op_nor_field(Fv, a), u, i, h) - Pn @ Fv(DiV)
            rhs = -b_mixed(i, Pt @ Fv(va)) - Pn @ Fv(Ava)
            bump(STRUCTURE_DERIVATIVE_IDS[7], lhs - rhs)

    items = [
        {"id": key, "residual": res[key], "pass": res[key] <= _DERIV_TOL}
        for key in STRUCTURE_DERIVATIVE_IDS
    ]
    return {
        "embedding": emb.name, "u": [float(x) for x in u], "step": step,
        "items": items, "pass": all(it["pass"] for it in items),
    }


def convergence_check(emb: Embedding, u, step: float = 2e-2) -> dict:
    """One step halving of the fundamental-equation residuals.

    4th-order stencils should shrink residuals ~16x per halving; the pass
    bar is a ratio of at least 8 (or a fine residual already at the noise
    floor, 1e-10, where ratios stop being meaningful).
    """
    coarse = verify_fundamental_equations(emb, u, step)
    fine = verify_fundamental_equations(emb, u, step / 2)
    items = []
    for ic, if_ in zip(coarse["items"], fine["items"]):
        ratio = ic["residual"] / max(if_["residual"], 1e-300)
        ok = ratio >= 8.0 or if_["residual"] <= 1e-10
        items.append({
            "id": ic["id"], "coarse": ic["residual"], "fine": if_["residual"],
            "ratio": ratio, "pass": ok,
        })
    return {
        "embedding": emb.name, "step": step, "items": items,
        "pass": all(it["pass"] for it in items),
    }


# ---------------------------------------------------------------------------
# built-in embeddings


def _affine_chart(u):
    a = np.array([1.0, 0.0, 1.0, 0.0]) / math.sqrt(2.0)
    b = np.array([0.0, 1.0, 0.0, -1.0]) / math.sqrt(2.0)
    return u[0] * a + u[1] * b


def _product_torus_chart(u):
    r1, r2 = 1.0, 0.75
    return np.array([
        r1 * math.cos(u[0]), r1 * math.sin(u[0]),
        r2 * math.cos(u[1]), r2 * math.sin(u[1]),
    ])


def _holomorphic_square_chart(u):
    x, y = u
    return np.array([x, y, x * x - y * y, 2 * x * y])


def _holomorphic_cube_chart(u):
    x, y = u
    return np.array([x, y, x**3 - 3 * x * y * y, 3 * x * x * y - y**3])


def _real_graph_chart(u):
    x, y = u
    return np.array([x, y, 0.5 * x * x + 0.3 * x * y, 0.4 * y * y - 0.2 * x])


def _diagonal_torus_chart(u):
    a, b = u
    return 0.5 * np.array([
        math.cos(a) + math.cos(b), math.sin(a) + math.sin(b),
        math.cos(a) - math.cos(b), math.sin(a) - math.sin(b),
    ])


def _mixed_graph_chart(u):
    x, y, z = u
    return np.array([
        x, y, z, 0.3 * x * y, 0.2 * x + 0.1 * z * z, 0.25 * y * z,
    ])


def builtin_embeddings() -> tuple[Embedding, ...]:
    """The shipped test submanifolds, each with documented (m, n, l)."""
    box2 = ((-1.0, 1.0), (-1.0, 1.0))
    torus_box = ((0.2, 2 * math.pi - 0.2),) * 2
    return (
        Embedding(
            "affine-plane", 1, 1, 2, box2, _affine_chart,
            "totally geodesic 2-plane through the origin of C x C, mixing "
            "both factors; B = 0",
        ),
        Embedding(
            "product-torus", 1, 1, 2, torus_box, _product_torus_chart,
            "circle product S^1(1) x S^1(3/4) in C x C; |B|^2 = 1/r1^2 + 1/r2^2",
        ),
        Embedding(
            "holomorphic-graph", 1, 1, 2, ((0.5, 1.5), (-0.5, 0.5)),
            _holomorphic_square_chart,
            "graph of z -> z^2 in C x C; holomorphic, hence minimal",
        ),
        Embedding(
            "holomorphic-cubic", 1, 1, 2, ((0.1, 0.9), (-0.4, 0.4)),
            _holomorphic_cube_chart,
            "graph of z -> z^3 in C x C; holomorphic, hence minimal",
        ),
        Embedding(
            "real-graph", 1, 1, 2, box2, _real_graph_chart,
            "real graph (u, v, phi(u,v), psi(u,v)) over the first factor",
        ),
        Embedding(
            "diagonal-torus", 1, 1, 2, torus_box, _diagonal_torus_chart,
            "torus ((e^{ia}+e^{ib})/2, (e^{ia}-e^{ib})/2); all four F-blocks "
            "nonzero at generic points",
        ),
        Embedding(
            "mixed-graph", 2, 1, 3, ((-1.0, 1.0),) * 3, _mixed_graph_chart,
            "3-dimensional graph in C^2 x C; odd tangent dimension, m != n",
        ),
    )


def get_embedding(name: str) -> Embedding:
    for emb in builtin_embeddings():
        if emb.name == name:
            return emb
    known = ", ".join(e.name for e in builtin_embeddings())
    raise KeyError(f"unknown embedding {name!r}; built-ins: {known}")
