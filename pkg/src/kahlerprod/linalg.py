"""Exact rational / float scalar and matrix layer.

Everything downstream runs in one of two scalar modes:

* ``"exact"`` -- arbitrary-precision rationals (``gmpy2.mpq``).  Arithmetic is
  closed, comparisons are exact, and a residual of zero means zero.
* ``"float"`` -- IEEE double via numpy, compared against explicit tolerances.

Matrices are numpy arrays: ``dtype=object`` holding rationals in exact mode,
``float64`` in float mode.  ``np.dot`` works for both, which keeps the
identity-checking code mode-agnostic.

The performance-critical random-frame pipeline avoids rational arithmetic
altogether: a Cayley transform of an integer skew matrix S yields an
orthogonal matrix with a single common denominator d = det(I + S), so frames
are carried as integer matrices X with X^T X = d^2 I and identities are
checked on integer-scaled tensors.  With skew entries in {-1, 0, 1} and
ambient dimension <= 12 the fraction-free elimination provably fits in int64
(squared Hadamard bound < 2^63); otherwise we transparently fall back to
Python big integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq

__all__ = [
    "QQ",
    "qstr",
    "SeedStream",
    "splitmix64",
    "Tolerance",
    "as_exact_matrix",
    "as_float_matrix",
    "bareiss_solve",
    "cayley",
    "cayley_orthogonal_int",
    "random_skew_int",
    "exact_inverse",
    "rref",
    "orthonormalize",
    "operator_stats",
    "max_abs",
    "frobenius_sq",
    "mat_eq",
    "zero_matrix",
    "identity_matrix",
]


def QQ(num, den=None):
    """Exact rational constructor. Accepts ints, strings like '-4/3', mpq."""
    if den is None:
        return mpq(num)
    return mpq(num, den)


def qstr(x) -> str:
    """Canonical string form of an exact scalar ('0', '3/5', '-7')."""
    return str(x)


# ---------------------------------------------------------------------------
# deterministic seeding
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (next_state, output)."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, z


class SeedStream:
    """Deterministic integer stream derived from (seed, stream_index).

    Frame k of base seed s is reproducible independently of how many frames
    were drawn before it: each (s, k) pair starts its own splitmix64 chain.
    """

    def __init__(self, seed: int, stream: int = 0):
        # mix the stream index in with one splitmix step so that nearby
        # (seed, stream) pairs decorrelate
        _, z = splitmix64((seed & _MASK64) ^ ((stream * _GOLDEN) & _MASK64))
        self._state = z

    def next_u64(self) -> int:
        self._state, z = splitmix64(self._state)
        return z

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (inclusive). Rejection-free enough."""
        span = hi - lo + 1
        return lo + self.next_u64() % span

    def randints(self, lo: int, hi: int, count: int) -> list[int]:
        return [self.randint(lo, hi) for _ in range(count)]


# ---------------------------------------------------------------------------
# modes and tolerances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tolerance:
    """Comparison policy for float mode. Exact mode ignores it."""

    rel: float = 1e-9
    abs: float = 1e-9

    def is_zero(self, value: float, scale: float = 1.0) -> bool:
        return abs(value) <= max(self.abs, self.rel * max(scale, 1.0))


DEFAULT_TOL = Tolerance()


def as_exact_matrix(rows) -> np.ndarray:
    """Object-dtype matrix of mpq from any nested int/str/rational data."""
    arr = np.array([[mpq(x) for x in row] for row in rows], dtype=object)
    return arr


def as_float_matrix(rows) -> np.ndarray:
    return np.array([[float(Fraction(str(x))) if isinstance(x, str) else float(x)
                      for x in row] for row in rows], dtype=float)


def zero_matrix(r: int, c: int, mode: str = "exact") -> np.ndarray:
    if mode == "exact":
        return np.full((r, c), mpq(0), dtype=object)
    return np.zeros((r, c))


def identity_matrix(n: int, mode: str = "exact") -> np.ndarray:
    if mode == "exact":
        out = np.full((n, n), mpq(0), dtype=object)
        for i in range(n):
            out[i, i] = mpq(1)
        return out
    return np.eye(n)


def max_abs(M) -> object:
    """Largest absolute entry; exact scalar for object arrays, float else."""
    M = np.asarray(M)
    if M.size == 0:
        return mpq(0) if M.dtype == object else 0.0
    flat = M.ravel()
    best = abs(flat[0])
    for v in flat[1:]:
        a = abs(v)
        if a > best:
            best = a
    return best


def frobenius_sq(M) -> object:
    M = np.asarray(M)
    return (M * M).sum()


def mat_eq(A, B) -> bool:
    """Exact elementwise equality (use only in exact mode)."""
    return bool(np.array_equal(np.asarray(A), np.asarray(B)))


# ---------------------------------------------------------------------------
# fraction-free exact elimination
# ---------------------------------------------------------------------------


def _hadamard_bound(A: np.ndarray) -> int:
    """Upper bound on |det| of an integer matrix (Hadamard, rounded up)."""
    bound = 1.0
    for row in A:
        norm = math.sqrt(float(sum(int(x) * int(x) for x in row)))
        bound *= max(norm, 1.0)
    return int(bound) + 1


def bareiss_solve(A, B):
    """Solve A X = d * B over the integers, d = +-det(A) (fraction-free).

    One-pass fraction-free Gauss-Jordan (Bareiss-style exact divisions):
    at termination the left block is d * I and the right block is the
    scaled solution. A must be square, nonsingular, with integer entries.
    Uses int64 numpy when a Hadamard bound certifies no overflow, Python
    big integers otherwise. Returns (X, d) with A @ X == d * B exactly.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    n = A.shape[0]
    had = _hadamard_bound(np.hstack([A, B]))
    use_i64 = had * had * (n + 1) < 2 ** 62
    dtype = np.int64 if use_i64 else object
    M = np.hstack([A, B]).astype(dtype)
    prev = 1
    for k in range(n):
        if M[k, k] == 0:
            for r in range(k + 1, n):
                if M[r, k] != 0:
                    M[[k, r]] = M[[r, k]]
                    break
            else:
                raise ZeroDivisionError("matrix is singular")
        piv = M[k, k]
        for i in range(n):
            if i != k:
                M[i] = (M[i] * piv - M[k] * M[i, k]) // prev
        prev = piv
    d = int(M[n - 1, n - 1])
    X = M[:, n:]
    if not use_i64:
        X = np.array([[int(v) for v in row] for row in X], dtype=object)
    return X, d


def random_skew_int(dim: int, stream: SeedStream, bound: int = 1) -> np.ndarray:
    """Seeded integer skew-symmetric matrix with entries in [-bound, bound]."""
    S = np.zeros((dim, dim), dtype=np.int64)
    for i in range(dim):
        for j in range(i + 1, dim):
            S[i, j] = stream.randint(-bound, bound)
            S[j, i] = -S[i, j]
    return S


def cayley_orthogonal_int(dim: int, stream: SeedStream, bound: int = 1):
    """Integer-scaled rational orthogonal matrix via the Cayley transform.

    Returns (X, d) where Q = X / d is orthogonal, d = det(I + S) for a seeded
    skew S, and X^T X = d^2 I exactly. Q has no eigenvalue -1 by construction,
    and every rational rotation matters only through the frame it produces.
    """
    S = random_skew_int(dim, stream, bound)
    I = np.eye(dim, dtype=np.int64)
    X, d = bareiss_solve(I + S, I - S)
    if d < 0:
        # det(I+S) > 0 always holds for real skew S; guard anyway
        X, d = -X, -d
    return X, d


def cayley(S: np.ndarray) -> np.ndarray:
    """Exact Cayley transform (I - S)(I + S)^{-1} of a rational skew matrix.

    >>> S = as_exact_matrix([[0, "1/2"], ["-1/2", 0]])
    >>> cayley(S)[0, 0]
    mpq(3,5)
    """
    n = S.shape[0]
    I = identity_matrix(n)
    return (I - S) @ exact_inverse(I + S)


def exact_inverse(A: np.ndarray) -> np.ndarray:
    """Inverse of a rational matrix by Gauss-Jordan with exact pivots."""
    n = A.shape[0]
    M = np.hstack([A.astype(object), identity_matrix(n)]) + mpq(0)
    for k in range(n):
        if M[k, k] == 0:
            for r in range(k + 1, n):
                if M[r, k] != 0:
                    M[[k, r]] = M[[r, k]]
                    break
            else:
                raise ZeroDivisionError("matrix is singular")
        M[k] = M[k] / M[k, k]
        for i in range(n):
            if i != k and M[i, k] != 0:
                M[i] = M[i] - M[i, k] * M[k]
    return M[:, n:]


def rref(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a rational matrix.

    Returns ``(R, pivots)`` where ``pivots`` lists the pivot column of each
    nonzero row.  Used by the curvature coefficient fit to decide whether a
    linear system determines its unknowns uniquely.
    """
    # mpq-ify so that row / pivot stays exact even for plain-int input
    M = A.astype(object) + mpq(0)
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = None
        for i in range(r, rows):
            if M[i, c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] / M[r, c]
        for i in range(rows):
            if i != r and M[i, c] != 0:
                M[i] = M[i] - M[i, c] * M[r]
        pivots.append(c)
        r += 1
    return M, pivots


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------


def orthonormalize(vectors: Sequence, mode: str = "exact"):
    """Gram-Schmidt.

    exact mode: returns (V, sq_norms) where the rows of V are pairwise
    orthogonal rational vectors spanning the same flag as the input and
    sq_norms[i] = <V[i], V[i]>.  Vectors are left unnormalized (their true
    unit versions are V[i]/sqrt(sq_norms[i]), which is generally irrational);
    downstream consumers divide paired inner products by the scale instead.

    float mode: returns (V, None) with orthonormal rows.
    """
    if mode == "float":
        V = np.array(vectors, dtype=float)
        out = []
        for v in V:
            w = v.copy()
            for u in out:
                w = w - np.dot(w, u) * u
            nrm = np.linalg.norm(w)
            if nrm < 1e-12:
                raise ValueError("linearly dependent input")
            out.append(w / nrm)
        return np.array(out), None
    V = [np.array([mpq(x) for x in v], dtype=object) for v in vectors]
    out = []
    sq = []
    for v in V:
        w = v
        for u, s in zip(out, sq):
            w = w - (np.dot(w, u) / s) * u
        s = np.dot(w, w)
        if s == 0:
            raise ValueError("linearly dependent input")
        # clear denominators so entries stay integral-ish and small
        den = 1
        for x in w:
            den = den * x.denominator // math.gcd(den, int(x.denominator))
        w = np.array([x * den for x in w], dtype=object)
        g = 0
        for x in w:
            g = math.gcd(g, int(x.numerator))
        if g > 1:
            w = np.array([x / g for x in w], dtype=object)
        out.append(w)
        sq.append(np.dot(w, w))
    return np.array(out, dtype=object), sq


def operator_stats(M: np.ndarray) -> dict:
    """Symmetry/trace diagnostics of a square operator matrix.

    Returned values are exact scalars for object arrays, floats otherwise.
    """
    M = np.asarray(M)
    sym = max_abs(M - M.T)
    skew = max_abs(M + M.T)
    tr = np.trace(M)
    return {
        "shape": tuple(M.shape),
        "symmetry_defect": sym,
        "skewness_defect": skew,
        "trace": tr,
        "frobenius_sq": frobenius_sq(M),
    }


if __name__ == "__main__":
    import doctest

    doctest.testmod()
