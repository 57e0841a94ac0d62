"""The unit matrix interval [0, I]: membership, rank-one projections, the
strength function along a projection, and the explicit 2x2 constructions
that drive the order-automorphism machinery.

The strength of a positive A along a rank-one projection P = xx^t is the
largest t with tP <= A. For x in the range of A it has the closed form
1 / <A+ x, x> (A+ the pseudoinverse); for x outside the range it is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from . import linalg
from .errors import (
    BadParameter,
    DimensionMismatch,
    NotComparable,
    NotDiagonal,
    NotPSD,
    OutOfInterval,
    PreconditionViolated,
)
from .linalg import DEFAULT_TOL, SymMat, Tolerances


@dataclass(frozen=True)
class Effect:
    """A symmetric matrix certified to satisfy 0 <= A <= I at construction."""

    mat: SymMat

    @property
    def n(self) -> int:
        return self.mat.n


class RankOneProjection:
    """xx^t for a unit vector x; the matrix is cached at construction."""

    __slots__ = ("x", "mat")

    def __init__(self, direction):
        vec = np.array(direction, dtype=float).reshape(-1)
        norm = float(np.linalg.norm(vec))
        if norm <= 1e-12:
            raise BadParameter("projection direction must be a nonzero vector")
        vec = vec / norm
        vec.flags.writeable = False
        self.x = vec
        self.mat = SymMat(np.outer(vec, vec))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def __repr__(self):
        return f"RankOneProjection({self.x.tolist()!r})"


def standard_projection(i: int, n: int) -> RankOneProjection:
    e = np.zeros(n)
    e[i] = 1.0
    return RankOneProjection(e)


# Fixed 2x2 frames: the diagonal sign flip, its rotated counterpart, and the
# Hadamard-basis pair summing to the identity.
J = SymMat([[1.0, 0.0], [0.0, -1.0]])
J_SHARP = SymMat([[0.0, 1.0], [1.0, 0.0]])
BASIS_PLUS = SymMat([[0.5, 0.5], [0.5, 0.5]])
BASIS_MINUS = SymMat([[0.5, -0.5], [-0.5, 0.5]])


@dataclass(frozen=True)
class SingletonDiagonal:
    """The only maximal diagonal below A is A itself (A diagonal)."""

    effect: Effect


@dataclass(frozen=True)
class ZeroOnly:
    """Zero is the only diagonal below A (A rank one, off-diagonal nonzero)."""


@dataclass(frozen=True)
class DiagonalCurve:
    """Maximal diagonals of [[t, u], [u, s]] form the hyperbola arc
    { diag(p, q) : 0 <= p <= t, 0 <= q <= s, (t - p)(s - q) = u^2 }."""

    t: float
    s: float
    u: float

    def contains(self, p: float, q: float, tol: Tolerances = DEFAULT_TOL) -> bool:
        if p < -tol.psd_tol or q < -tol.psd_tol:
            return False
        if p > self.t + tol.psd_tol or q > self.s + tol.psd_tol:
            return False
        return abs((self.t - p) * (self.s - q) - self.u * self.u) <= tol.equality_tol


MaxDiagonalSet = Union[SingletonDiagonal, ZeroOnly, DiagonalCurve]


def make_effect(A: SymMat, tol: Tolerances = DEFAULT_TOL) -> Effect:
    """Certify 0 <= A <= I; OutOfInterval carries the offending eigenvalue."""
    lam = linalg.eigvalsh(A, tol)
    if float(lam[0]) < -tol.psd_tol:
        raise OutOfInterval(f"eigenvalue {lam[0]!r} below 0", offending_eigenvalue=float(lam[0]))
    if float(lam[-1]) > 1.0 + tol.psd_tol:
        raise OutOfInterval(f"eigenvalue {lam[-1]!r} above 1", offending_eigenvalue=float(lam[-1]))
    return Effect(mat=A)


def _require_psd(A: SymMat, tol: Tolerances, who: str) -> None:
    if not linalg.is_psd(A, tol):
        raise NotPSD(f"{who} must be positive semidefinite")


def _strength_bisection_local(A: SymMat, P: RankOneProjection, tol: Tolerances) -> float:
    # Boundary fallback only; the test-side oracle lives in loewner.oracle
    # and stays independent of this module.
    lo, hi = 0.0, linalg.spectral_norm(A, tol) + 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if linalg.loewner_le(SymMat(mid * P.mat.a), A, tol):
            lo = mid
        else:
            hi = mid
    return lo


def strength(A: SymMat, P: RankOneProjection, tol: Tolerances = DEFAULT_TOL) -> float:
    """max { t : t P <= A } for PSD A and a rank-one projection P.

    Closed form: 0 when the direction of P leaves the range of A, else
    1 / <A+ x, x>. When <A+ x, x> sits inside 10 * rank_tol of zero the
    result is resolved by bisection instead (two-tier rule for inputs at
    the range boundary).
    """
    if A.n != P.n:
        raise DimensionMismatch(f"dimensions differ: {A.n} vs {P.n}")
    _require_psd(A, tol, "strength input")
    pinv, in_range = linalg.pinv_and_range(A, tol)
    if not in_range(P.x):
        return 0.0
    g = float(P.x @ pinv.a @ P.x)
    if abs(g) < 10.0 * tol.rank_tol:
        return _strength_bisection_local(A, P, tol)
    return 1.0 / g


def strength_witness(
    A: SymMat, B: SymMat, tol: Tolerances = DEFAULT_TOL
) -> Optional[Tuple[RankOneProjection, float]]:
    """A rank-one certificate that A <= B fails.

    Returns None when A <= B. Otherwise picks a unit x with
    <(A - B)x, x> > 0 (the most negative eigendirection of B - A), spans Q
    by Ax and sets t = ||Ax||^2 / <Ax, x>; then tQ <= A while tQ <= B
    fails, so the strength of A along Q strictly exceeds that of B.
    """
    _require_psd(A, tol, "first argument")
    _require_psd(B, tol, "second argument")
    if linalg.loewner_le(A, B, tol):
        return None
    spec = linalg.eigh(B - A, tol)
    x = spec.eigenvectors[:, 0]
    ax = A.a @ x
    quad = float(ax @ x)
    if quad <= 0.0:
        raise NotPSD("degenerate witness direction; input not PSD at tolerance")
    t = float(ax @ ax) / quad
    return RankOneProjection(ax), t


def rank_one_segment(
    A: Effect, B: Effect, tol: Tolerances = DEFAULT_TOL
) -> Optional[Tuple[float, RankOneProjection]]:
    """Detect B = A + tP along a single projection.

    Requires A <= B (NotComparable otherwise). Returns (t, P) when B - A
    has rank at most one, None otherwise. Rank is decided by the
    second-largest eigenvalue against rank_tol * (1 + ||B - A||_2).
    """
    if not linalg.loewner_le(A.mat, B.mat, tol):
        raise NotComparable("lower effect is not below upper effect")
    diff = B.mat - A.mat
    spec = linalg.eigh(diff, tol)
    lam = spec.eigenvalues
    top = float(lam[-1])
    if top <= tol.rank_tol:
        return 0.0, standard_projection(0, A.n)
    second = float(lam[-2]) if A.n >= 2 else 0.0
    if abs(second) > tol.rank_tol * (1.0 + top):
        return None
    return top, RankOneProjection(spec.eigenvectors[:, -1])


def identity_block(
    A: Effect,
    P: RankOneProjection,
    Q: RankOneProjection,
    tol: Tolerances = DEFAULT_TOL,
) -> Tuple[np.ndarray, Optional[SymMat]]:
    """Split A as the identity on K = span(Im P, Im Q) plus a block B on
    the orthocomplement.

    Preconditions P <= A, Q <= A, A <= I force A to act as the identity
    on K; the returned pair is an orthonormal basis of K (n x 2 columns)
    and the compression B of A to the complement (None when n = 2).
    Residuals of the certificate scale like the square root of the
    allowed order slack, so the check runs at 10 * sqrt(psd_tol).
    """
    n = A.n
    if P.n != n or Q.n != n:
        raise DimensionMismatch("projection dimensions differ from the effect")
    if abs(float(P.x @ Q.x)) > 1.0 - 1e-10:
        raise PreconditionViolated("P != Q is required")
    for name, proj in (("P <= A", P), ("Q <= A", Q)):
        if not linalg.loewner_le(proj.mat, A.mat, tol):
            raise PreconditionViolated(f"{name} fails")
    if not linalg.loewner_le(A.mat, SymMat.identity(n), tol):
        raise PreconditionViolated("A <= I fails")

    k1 = P.x
    w = Q.x - k1 * float(k1 @ Q.x)
    k2 = w / float(np.linalg.norm(w))
    K = np.column_stack([k1, k2])
    full = linalg.complete_basis(K)
    W = full[:, 2:]

    cert = 10.0 * math.sqrt(tol.psd_tol)
    for k in (k1, k2):
        if float(np.linalg.norm(A.mat.a @ k - k)) > cert:
            raise PreconditionViolated("A does not act as the identity on K at tolerance")
    if W.shape[1] == 0:
        return K, None
    off = K.T @ A.mat.a @ W
    if float(np.linalg.norm(off)) > cert:
        raise PreconditionViolated("off-diagonal block of A does not vanish at tolerance")
    B = SymMat(W.T @ A.mat.a @ W)
    if not linalg.is_psd(B, tol):
        raise PreconditionViolated("compressed block is not PSD at tolerance")
    if not linalg.loewner_le(B, SymMat.identity(B.n), tol):
        raise PreconditionViolated("compressed block exceeds the identity at tolerance")
    return K, B


def prescribed_strength_pair(
    R: RankOneProjection, s: float, tol: Tolerances = DEFAULT_TOL
) -> Tuple[RankOneProjection, RankOneProjection]:
    """Orthogonal projections P, Q with strength((1/2)P + Q, R) = s.

    Works for 1/2 < s < 1: pick a unit x in a 2-plane through Im R with
    <Rx, x> = (1 - s)/s, complete it with y orthogonal to x inside the
    plane, and take P = xx^t, Q = yy^t. Then pR <= (1/2)P + Q iff p <= s.
    The plane is spanned by Im R and the lowest-index standard basis
    vector not parallel to it, so the output is reproducible.
    """
    if not (0.5 < s < 1.0):
        raise BadParameter("s must lie strictly between 1/2 and 1")
    n = R.n
    if n < 2:
        raise DimensionMismatch("dimension must be at least 2")
    r = R.x
    g = None
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        w = e - r * float(r @ e)
        norm = float(np.linalg.norm(w))
        if norm > 1e-8:
            g = w / norm
            break
    assert g is not None
    c = math.sqrt((1.0 - s) / s)
    x = c * r + math.sqrt(1.0 - c * c) * g
    y = -math.sqrt(1.0 - c * c) * r + c * g
    return RankOneProjection(x), RankOneProjection(y)


def one_third_decompose(
    A: SymMat, P: RankOneProjection, tol: Tolerances = DEFAULT_TOL
) -> Optional[RankOneProjection]:
    """Recognize A = (1/3)Q + (I - Q) on a 2x2 matrix, with tr(PQ) = 1/2.

    Returns the projection Q when the form holds, None otherwise. Q is
    read off directly as (3/2)(I - A) and validated as a rank-one
    projection with the required trace pairing; the equivalent
    three-rank-one-factor characterization is exercised by the tests as
    an independent route.
    """
    if A.n != 2 or P.n != 2:
        raise DimensionMismatch("this decomposition is defined for 2x2 matrices")
    q_mat = 1.5 * (np.eye(2) - A.a)
    lam = linalg.eigvalsh(SymMat(q_mat), tol)
    gate = 10.0 * max(tol.rank_tol, tol.psd_tol)
    if abs(float(lam[0])) > gate or abs(float(lam[1]) - 1.0) > gate:
        return None
    if abs(float(np.trace(P.mat.a @ q_mat)) - 0.5) > tol.equality_tol:
        return None
    spec = linalg.eigh(SymMat(q_mat), tol)
    return RankOneProjection(spec.eigenvectors[:, -1])


def maximal_diagonals(A, tol: Tolerances = DEFAULT_TOL) -> MaxDiagonalSet:
    """Describe the maximal diagonal effects below a 2x2 matrix A.

    Accepts an Effect or any PSD SymMat whose diagonal entries lie in
    [0, 1]; the analysis depends only on the diagonal entries and the
    determinant slack, so matrices with norm above one (but unit-bounded
    diagonal) are legitimate inputs.
    """
    mat = A.mat if isinstance(A, Effect) else A
    if mat.n != 2:
        raise DimensionMismatch("maximal diagonals are defined for 2x2 matrices")
    m = mat.a
    t, s, u = float(m[0, 0]), float(m[1, 1]), float(m[0, 1])
    lam = linalg.eigvalsh(mat, tol)
    if float(lam[0]) < -tol.psd_tol:
        raise NotPSD("input must be positive semidefinite")
    for entry in (t, s):
        if entry > 1.0 + tol.psd_tol:
            raise OutOfInterval(f"diagonal entry {entry!r} above 1",
                                offending_eigenvalue=entry)
    if abs(u) <= tol.equality_tol:
        effect = A if isinstance(A, Effect) else make_effect(mat, tol)
        return SingletonDiagonal(effect=effect)
    if abs(float(lam[0])) <= tol.rank_tol * (1.0 + abs(float(lam[1]))):
        return ZeroOnly()
    return DiagonalCurve(t=t, s=s, u=u)


def sharp(X: SymMat, tol: Tolerances = DEFAULT_TOL) -> Effect:
    """Rotate a diagonal 2x2 effect diag(s, t) into the Hadamard basis:
    s * BASIS_PLUS + t * BASIS_MINUS."""
    if X.n != 2:
        raise DimensionMismatch("sharp is defined for 2x2 matrices")
    if abs(float(X.a[0, 1])) > tol.equality_tol:
        raise NotDiagonal("input must be diagonal")
    s, t = float(X.a[0, 0]), float(X.a[1, 1])
    for value in (s, t):
        if value < -tol.psd_tol or value > 1.0 + tol.psd_tol:
            raise OutOfInterval(f"diagonal entry {value!r} outside [0, 1]",
                                offending_eigenvalue=value)
    return Effect(mat=SymMat(s * BASIS_PLUS.a + t * BASIS_MINUS.a))
