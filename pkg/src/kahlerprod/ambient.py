"""Ambient geometry: the Kähler product of two complex space forms at a point.

The ambient space is C^m x C^n carrying the product metric, with the first
factor of constant holomorphic sectional curvature c1 and the second of c2.
At a point everything we need is linear algebra on R^(2m+2n):

* ``J`` -- the complex structure, a block rotation acting on each complex
  coordinate pair as (x, y) |-> (-y, x);
* ``F`` -- the product structure, +1 on the first factor and -1 on the second
  (so the factor projections are (I+F)/2 and (I-F)/2);
* the curvature operator, a constant-coefficient expression in g, J and F
  with twenty terms split into a (c1+c2)/16 bracket and a (c1-c2)/16 bracket.

The twenty-term expression exists in two modes.  ``paper-literal`` evaluates
the source text verbatim.  ``corrected`` replaces the coefficient 2 printed on
the g(FY,Z)FX term of the first bracket by 1, which is the unique choice (see
``fit_curvature_coefficients``) matching the honest product curvature: each
factor's complex-space-form curvature, direct-summed.  That reference operator
is built independently in ``product_curvature_reference`` and is the oracle
for everything here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import QQ, SeedStream, identity_matrix, rref

__all__ = [
    "AmbientSpace",
    "CurvatureTerm",
    "CURVATURE_TERMS",
    "CURVATURE_MODES",
    "curvature",
    "product_curvature_reference",
    "curvature_symmetry_report",
    "fit_curvature_coefficients",
]

CURVATURE_MODES = ("corrected", "paper-literal")


@dataclass(frozen=True)
class CurvatureTerm:
    """One summand of the twenty-term curvature expression.

    The summand is  coeff * g(scalar[0], scalar[1]) * vector,  where the
    strings name prepared vectors: "X", "JY", "FJZ", ... and coeff is the
    signed integer coefficient (printed vs. corrected).
    """

    bracket: str  # "sum" -> weight (c1+c2)/16, "diff" -> weight (c1-c2)/16
    printed: int
    corrected: int
    scalar: tuple[str, str]
    vector: str

    @property
    def label(self) -> str:
        return f"g({self.scalar[0]},{self.scalar[1]}){self.vector}"


# The source text, one term per entry.  The single printed/corrected
# disagreement is the g(FY,Z)FX term; the closing term of the second bracket
# prints the operator as JF, equal to FJ since the structures commute.
CURVATURE_TERMS: tuple[CurvatureTerm, ...] = (
    CurvatureTerm("sum", 1, 1, ("Y", "Z"), "X"),
    CurvatureTerm("sum", -1, -1, ("X", "Z"), "Y"),
    CurvatureTerm("sum", 1, 1, ("JY", "Z"), "JX"),
    CurvatureTerm("sum", -1, -1, ("JX", "Z"), "JY"),
    CurvatureTerm("sum", 2, 2, ("X", "JY"), "JZ"),
    CurvatureTerm("sum", 2, 1, ("FY", "Z"), "FX"),
    CurvatureTerm("sum", -1, -1, ("FX", "Z"), "FY"),
    CurvatureTerm("sum", 1, 1, ("FJY", "Z"), "FJX"),
    CurvatureTerm("sum", -1, -1, ("FJX", "Z"), "FJY"),
    CurvatureTerm("sum", 2, 2, ("FX", "JY"), "FJZ"),
    CurvatureTerm("diff", 1, 1, ("FY", "Z"), "X"),
    CurvatureTerm("diff", -1, -1, ("FX", "Z"), "Y"),
    CurvatureTerm("diff", 1, 1, ("Y", "Z"), "FX"),
    CurvatureTerm("diff", -1, -1, ("X", "Z"), "FY"),
    CurvatureTerm("diff", 1, 1, ("FJY", "Z"), "JX"),
    CurvatureTerm("diff", -1, -1, ("FJX", "Z"), "JY"),
    CurvatureTerm("diff", 1, 1, ("JY", "Z"), "FJX"),
    CurvatureTerm("diff", -1, -1, ("JX", "Z"), "FJY"),
    CurvatureTerm("diff", 2, 2, ("FX", "JY"), "JZ"),
    CurvatureTerm("diff", 2, 2, ("X", "JY"), "FJZ"),
)


class AmbientSpace:
    """C^m(c1) x C^n(c2) as matrices at a point of R^(2m+2n).

    Zero-dimensional factors are admitted so reduction checks can compare the
    product expression against a single space form; the submanifold suites all
    use m >= 1 and n >= 1.
    """

    def __init__(self, m: int, n: int, c1, c2):
        if m < 0 or n < 0 or m + n < 1:
            raise ValueError(f"need m, n >= 0 and m + n >= 1, got m={m} n={n}")
        self.m = int(m)
        self.n = int(n)
        self.c1 = QQ(c1)
        self.c2 = QQ(c2)
        self.dim = 2 * (self.m + self.n)
        self.J = _block_J(self.m, self.n)
        self.F = np.diag(
            np.array([1] * (2 * self.m) + [-1] * (2 * self.n), dtype=object)
        )
        eye = identity_matrix(self.dim)
        if not np.array_equal(self.J @ self.J, -eye):
            raise AssertionError("J^2 != -I")
        if not np.array_equal(self.F @ self.F, eye):
            raise AssertionError("F^2 != I")
        if not np.array_equal(self.J @ self.F, self.F @ self.J):
            raise AssertionError("JF != FJ")

    def __repr__(self) -> str:
        return (
            f"AmbientSpace(m={self.m}, n={self.n}, "
            f"c1={self.c1}, c2={self.c2})"
        )

    def _check_dim(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got shape {x.shape}")
        return x

    def apply_J(self, x) -> np.ndarray:
        """Complex structure: rotate each complex coordinate pair."""
        return self.J @ self._check_dim(x)

    def apply_F(self, x) -> np.ndarray:
        """Product structure: negate the second-factor coordinates."""
        return self.F @ self._check_dim(x)

    def random_vector(self, stream: SeedStream, bound: int = 9) -> np.ndarray:
        """Random integer vector with entries in [-bound, bound] (object dtype)."""
        return np.array(stream.randints(-bound, bound, self.dim), dtype=object)


def _block_J(m: int, n: int) -> np.ndarray:
    d = 2 * (m + n)
    J = np.zeros((d, d), dtype=object)
    for k in range(m + n):
        J[2 * k + 1, 2 * k] = 1
        J[2 * k, 2 * k + 1] = -1
    return J


def _prepare(space: AmbientSpace, X, Y, Z) -> dict:
    """All operator images the term catalog refers to, computed once."""
    prep = {}
    for name, v in (("X", X), ("Y", Y), ("Z", Z)):
        v = space._check_dim(v)
        jv = space.J @ v
        prep[name] = v
        prep["J" + name] = jv
        prep["F" + name] = space.F @ v
        prep["FJ" + name] = space.F @ jv
    return prep


def curvature(space: AmbientSpace, mode: str, X, Y, Z) -> np.ndarray:
    """Evaluate the twenty-term curvature expression R(X,Y)Z.

    Works on exact (object dtype) and float vectors alike; the bracket
    weights (c1 +- c2)/16 are kept rational in the exact case.
    """
    if mode not in CURVATURE_MODES:
        raise ValueError(f"mode must be one of {CURVATURE_MODES}, got {mode!r}")
    prep = _prepare(space, X, Y, Z)
    exact = prep["X"].dtype == object
    if exact:
        weights = {"sum": (space.c1 + space.c2) / 16, "diff": (space.c1 - space.c2) / 16}
        out = np.zeros(space.dim, dtype=object) + QQ(0)
    else:
        c1, c2 = float(space.c1), float(space.c2)
        weights = {"sum": (c1 + c2) / 16.0, "diff": (c1 - c2) / 16.0}
        out = np.zeros(space.dim)
    for term in CURVATURE_TERMS:
        coeff = term.corrected if mode == "corrected" else term.printed
        w = weights[term.bracket]
        if w == 0 or coeff == 0:
            continue
        s = np.dot(prep[term.scalar[0]], prep[term.scalar[1]])
        if s != 0:
            out = out + (w * coeff * s) * prep[term.vector]
    return out


def _space_form_curvature(c, J, X, Y, Z):
    """R(X,Y)Z in one complex space form of holomorphic sectional curvature c.

    The standard five-term formula; this is the independent reference the
    twenty-term product expression is checked against.
    """
    JX, JY, JZ = J @ X, J @ Y, J @ Z
    g = np.dot
    val = (
        g(Y, Z) * X
        - g(X, Z) * Y
        + g(JY, Z) * JX
        - g(JX, Z) * JY
        + 2 * g(X, JY) * JZ
    )
    return (c / 4) * val


def product_curvature_reference(space: AmbientSpace, X, Y, Z) -> np.ndarray:
    """Brute-force product curvature: factorwise space-form curvature, direct sum.

    This never touches the twenty-term catalog, so agreement with
    ``curvature(..., "corrected", ...)`` is a real two-route check.
    """
    X = space._check_dim(X)
    Y = space._check_dim(Y)
    Z = space._check_dim(Z)
    exact = X.dtype == object
    d1 = 2 * space.m
    out = np.zeros(space.dim, dtype=object if exact else float)
    if exact:
        out = out + QQ(0)
    c1 = space.c1 if exact else float(space.c1)
    c2 = space.c2 if exact else float(space.c2)
    if space.m > 0:
        J1 = space.J[:d1, :d1]
        out[:d1] = _space_form_curvature(c1, J1, X[:d1], Y[:d1], Z[:d1])
    if space.n > 0:
        J2 = space.J[d1:, d1:]
        out[d1:] = _space_form_curvature(c2, J2, X[d1:], Y[d1:], Z[d1:])
    return out


def curvature_symmetry_report(space: AmbientSpace, mode: str, trials: int, seed: int) -> dict:
    """Max residuals of the four curvature-tensor symmetries over random rational vectors.

    Checks skew-symmetry in (X, Y), the pair symmetry
    g(R(X,Y)Z,W) = g(R(Z,W)X,Y), the first Bianchi identity, and
    J-invariance R(JX,JY) = R(X,Y).  Exact arithmetic: a zero means zero.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    stream = SeedStream(seed, 0)
    res = {
        "skew_xy": QQ(0),
        "pair_symmetry": QQ(0),
        "first_bianchi": QQ(0),
        "j_invariance": QQ(0),
    }
    for _ in range(trials):
        X = space.random_vector(stream)
        Y = space.random_vector(stream)
        Z = space.random_vector(stream)
        W = space.random_vector(stream)
        rxyz = curvature(space, mode, X, Y, Z)
        skew = rxyz + curvature(space, mode, Y, X, Z)
        res["skew_xy"] = max(res["skew_xy"], max(abs(v) for v in skew))
        pair = np.dot(rxyz, W) - np.dot(curvature(space, mode, Z, W, X), Y)
        res["pair_symmetry"] = max(res["pair_symmetry"], abs(pair))
        bianchi = (
            rxyz
            + curvature(space, mode, Y, Z, X)
            + curvature(space, mode, Z, X, Y)
        )
        res["first_bianchi"] = max(res["first_bianchi"], max(abs(v) for v in bianchi))
        jinv = curvature(space, mode, space.J @ X, space.J @ Y, Z) - rxyz
        res["j_invariance"] = max(res["j_invariance"], max(abs(v) for v in jinv))
    return {
        "mode": mode,
        "trials": trials,
        "seed": seed,
        "max_residuals": res,
    }


def fit_curvature_coefficients(space: AmbientSpace, trials: int = 40, seed: int = 0) -> dict:
    """Recover the twenty coefficients from the product-curvature oracle.

    Treats the coefficient of every catalog term as an unknown, evaluates each
    term on seeded random rational triples, and solves the exact linear system
    "sum of unknown * term == product_curvature_reference".  Requires c1+c2
    and c1-c2 nonzero so both bracket weights are invertible; the recovered
    coefficients are reported normalized by their bracket weight, directly
    comparable to the printed integers.

    Returns a dict with the system rank, whether the solution is unique, the
    recovered coefficient per term, and the list of terms whose printed
    coefficient disagrees.
    """
    kplus = (space.c1 + space.c2) / 16
    kminus = (space.c1 - space.c2) / 16
    if kplus == 0 or kminus == 0:
        raise ValueError("coefficient fit needs c1+c2 != 0 and c1-c2 != 0")
    stream = SeedStream(seed, 1)
    nterms = len(CURVATURE_TERMS)
    rows = []
    for _ in range(trials):
        X = space.random_vector(stream, bound=4)
        Y = space.random_vector(stream, bound=4)
        Z = space.random_vector(stream, bound=4)
        prep = _prepare(space, X, Y, Z)
        ref = product_curvature_reference(space, X, Y, Z)
        termvecs = []
        for term in CURVATURE_TERMS:
            s = np.dot(prep[term.scalar[0]], prep[term.scalar[1]])
            termvecs.append(s * prep[term.vector])
        for comp in range(space.dim):
            row = [termvecs[j][comp] for j in range(nterms)] + [ref[comp]]
            rows.append(row)
    aug = np.array(rows, dtype=object)
    R, pivots = rref(aug)
    consistent = nterms not in pivots
    unique = consistent and len(pivots) == nterms
    result: dict = {
        "rank": len(pivots),
        "n_terms": nterms,
        "consistent": consistent,
        "unique": unique,
        "coefficients": {},
        "printed_mismatches": [],
    }
    if unique:
        sol = [R[i, nterms] for i in range(nterms)]
        for j, term in enumerate(CURVATURE_TERMS):
            w = kplus if term.bracket == "sum" else kminus
            rec = sol[j] / w
            result["coefficients"][term.label] = rec
            if rec != term.corrected:
                # would indicate the corrected catalog itself is wrong
                result.setdefault("corrected_mismatches", []).append(term.label)
            if rec != term.printed:
                result["printed_mismatches"].append(
                    {
                        "term": term.label,
                        "bracket": term.bracket,
                        "printed": term.printed,
                        "recovered": rec,
                    }
                )
    return result
