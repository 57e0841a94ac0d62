"""Dense symmetric-matrix kernel: spectral decomposition, Loewner-order
predicates, PSD square root, inverse/pseudoinverse, and scalar functional
calculus.

Every operation here is a pure function over immutable values. The
eigensolver is a hand-rolled cyclic Jacobi iteration, adequate for the
small dimensions this package targets; nothing in this module calls into
LAPACK.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    NonConvergence,
    NotPSD,
    Singular,
)

_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the whole package.

    eig_tol      Jacobi convergence: stop once the off-diagonal Frobenius
                 mass drops below eig_tol * ||A||_F.
    psd_tol      slack below zero accepted when testing semidefiniteness;
                 applied relative to the spectral scale max(1, |lambda|_max).
    rank_tol     relative cutoff for rank decisions and spectral truncation.
    equality_tol relative threshold for treating two matrices as equal.
    """

    eig_tol: float = 1e-14
    psd_tol: float = 1e-9
    rank_tol: float = 1e-9
    equality_tol: float = 1e-8

    def __post_init__(self):
        for name in ("eig_tol", "psd_tol", "rank_tol", "equality_tol"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = Tolerances()


class SymMat:
    """Real symmetric matrix, symmetrized and frozen at construction.

    The stored array is (M + M^t)/2 of the input, with writes disabled.
    Entries must be finite.
    """

    __slots__ = ("a", "n")

    def __init__(self, entries):
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 1:
            raise DimensionMismatch("matrix dimension must be at least 1")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        m = (m + m.T) / 2.0
        m.flags.writeable = False
        self.a = m
        self.n = int(m.shape[0])

    @classmethod
    def identity(cls, n: int) -> "SymMat":
        return cls(np.eye(n))

    @classmethod
    def zero(cls, n: int) -> "SymMat":
        return cls(np.zeros((n, n)))

    @classmethod
    def diagonal(cls, values) -> "SymMat":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def __array__(self, dtype=None):
        return self.a if dtype is None else self.a.astype(dtype)

    def __add__(self, other: "SymMat") -> "SymMat":
        return SymMat(self.a + other.a)

    def __sub__(self, other: "SymMat") -> "SymMat":
        return SymMat(self.a - other.a)

    def __neg__(self) -> "SymMat":
        return SymMat(-self.a)

    def __mul__(self, scalar: float) -> "SymMat":
        return SymMat(self.a * float(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"SymMat({self.a.tolist()!r})"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (ascending) and an orthonormal eigenvector column set."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _check_same_dim(A: SymMat, B: SymMat):
    if A.n != B.n:
        raise DimensionMismatch(f"dimensions differ: {A.n} vs {B.n}")


def _jacobi(m: np.ndarray, eig_tol: float, want_vectors: bool):
    """Cyclic Jacobi sweeps; returns (eigenvalues ascending, V or None).

    Runs on plain Python lists: at the target dimensions this beats
    per-element numpy access by a wide margin.
    """
    n = m.shape[0]
    a = [list(row) for row in m.tolist()]
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)] if want_vectors else None

    scale = math.sqrt(sum(a[i][j] * a[i][j] for i in range(n) for j in range(n)))
    if scale == 0.0 or n == 1:
        values = [a[i][i] for i in range(n)]
    else:
        stop = eig_tol * scale
        skip = stop / (2.0 * n * n)
        for _ in range(_MAX_SWEEPS):
            off = math.sqrt(2.0 * sum(a[i][j] * a[i][j]
                                      for i in range(n - 1)
                                      for j in range(i + 1, n)))
            if off <= stop:
                break
            for p in range(n - 1):
                ap = a[p]
                for q in range(p + 1, n):
                    apq = ap[q]
                    if abs(apq) <= skip:
                        continue
                    aq = a[q]
                    app = ap[p]
                    aqq = aq[q]
                    tau = (aqq - app) / (2.0 * apq)
                    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    ap[p] = app - t * apq
                    aq[q] = aqq + t * apq
                    ap[q] = 0.0
                    aq[p] = 0.0
                    for k in range(n):
                        if k == p or k == q:
                            continue
                        akp = ap[k]
                        akq = aq[k]
                        ap[k] = c * akp - s * akq
                        aq[k] = s * akp + c * akq
                        a[k][p] = ap[k]
                        a[k][q] = aq[k]
                    if v is not None:
                        for row in v:
                            vp = row[p]
                            vq = row[q]
                            row[p] = c * vp - s * vq
                            row[q] = s * vp + c * vq
        else:
            raise NonConvergence(f"Jacobi iteration did not converge in {_MAX_SWEEPS} sweeps")
        values = [a[i][i] for i in range(n)]

    order = sorted(range(n), key=values.__getitem__)
    lam = np.array([values[i] for i in order])
    if not want_vectors:
        return lam, None
    vec = np.array(v)[:, order]
    return lam, vec


def eigh(A: SymMat, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Full spectral decomposition A = V diag(lam) V^t, eigenvalues ascending."""
    lam, vec = _jacobi(A.a, tol.eig_tol, want_vectors=True)
    lam.flags.writeable = False
    vec.flags.writeable = False
    return Spectrum(eigenvalues=lam, eigenvectors=vec)


def eigvalsh(A: SymMat, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues only (ascending); skips eigenvector accumulation."""
    lam, _ = _jacobi(A.a, tol.eig_tol, want_vectors=False)
    return lam


def _psd_threshold(lam: np.ndarray, tol: Tolerances) -> float:
    scale = float(np.max(np.abs(lam))) if lam.size else 0.0
    return tol.psd_tol * max(1.0, scale)


def loewner_le(A: SymMat, B: SymMat, tol: Tolerances = DEFAULT_TOL) -> bool:
    """A <= B in the Loewner order: lambda_min(B - A) >= -psd_tol (scaled)."""
    _check_same_dim(A, B)
    lam = eigvalsh(B - A, tol)
    return float(lam[0]) >= -_psd_threshold(lam, tol)


def loewner_lt(A: SymMat, B: SymMat, tol: Tolerances = DEFAULT_TOL) -> bool:
    """A < B in the Loewner order: lambda_min(B - A) > psd_tol (scaled)."""
    _check_same_dim(A, B)
    lam = eigvalsh(B - A, tol)
    return float(lam[0]) > _psd_threshold(lam, tol)


def is_psd(A: SymMat, tol: Tolerances = DEFAULT_TOL) -> bool:
    lam = eigvalsh(A, tol)
    return float(lam[0]) >= -_psd_threshold(lam, tol)


def sym_close(A: SymMat, B: SymMat, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Frobenius-relative equality at equality_tol."""
    _check_same_dim(A, B)
    scale = max(1.0, float(np.linalg.norm(A.a)), float(np.linalg.norm(B.a)))
    return float(np.linalg.norm(A.a - B.a)) <= tol.equality_tol * scale


def sqrt_psd(A: SymMat, tol: Tolerances = DEFAULT_TOL) -> SymMat:
    """Unique PSD square root. Eigenvalues in [-psd_tol, 0) are clamped to 0."""
    spec = eigh(A, tol)
    lam = spec.eigenvalues
    if float(lam[0]) < -_psd_threshold(lam, tol):
        raise NotPSD(f"matrix has eigenvalue {lam[0]:.3e} below -psd_tol")
    clamped = np.sqrt(np.clip(lam, 0.0, None))
    return SymMat((spec.eigenvectors * clamped) @ spec.eigenvectors.T)


def inv(A: SymMat, tol: Tolerances = DEFAULT_TOL) -> SymMat:
    """Inverse through the spectral decomposition; Singular when the
    smallest |eigenvalue| falls at or below rank_tol * |lambda|_max."""
    spec = eigh(A, tol)
    lam = spec.eigenvalues
    maxabs = float(np.max(np.abs(lam)))
    if maxabs == 0.0 or float(np.min(np.abs(lam))) <= tol.rank_tol * maxabs:
        raise Singular("matrix is singular within rank tolerance")
    return SymMat((spec.eigenvectors / lam) @ spec.eigenvectors.T)


def apply_fn(A: SymMat, f: Callable[[float], float], tol: Tolerances = DEFAULT_TOL) -> SymMat:
    """Scalar functional calculus V diag(f(lam)) V^t.

    DomainError when f raises or produces a non-finite value at some
    eigenvalue.
    """
    spec = eigh(A, tol)
    mapped = []
    for level in spec.eigenvalues:
        try:
            value = float(f(float(level)))
        except (ArithmeticError, ValueError) as exc:
            raise DomainError(f"function undefined at eigenvalue {level!r}: {exc}") from exc
        if not math.isfinite(value):
            raise DomainError(f"function non-finite at eigenvalue {level!r}")
        mapped.append(value)
    return SymMat((spec.eigenvectors * np.array(mapped)) @ spec.eigenvectors.T)


def pinv_and_range(A: SymMat, tol: Tolerances = DEFAULT_TOL) -> Tuple[SymMat, Callable[[np.ndarray], bool]]:
    """Moore-Penrose inverse of a PSD matrix plus a range-membership test.

    The spectrum is truncated at rank_tol * lambda_max; the predicate
    reports whether a vector's residual off the retained eigenspace is
    within rank_tol (relative to max(1, ||x||)).
    """
    spec = eigh(A, tol)
    lam = spec.eigenvalues
    if float(lam[0]) < -_psd_threshold(lam, tol):
        raise NotPSD(f"matrix has eigenvalue {lam[0]:.3e} below -psd_tol")
    clamped = np.clip(lam, 0.0, None)
    lam_max = float(np.max(clamped)) if clamped.size else 0.0
    keep = clamped > tol.rank_tol * lam_max if lam_max > 0.0 else np.zeros_like(clamped, dtype=bool)
    basis = spec.eigenvectors[:, keep]
    if basis.shape[1] > 0:
        pinv = SymMat((basis / clamped[keep]) @ basis.T)
    else:
        pinv = SymMat.zero(A.n)
    n = A.n
    rank_tol = tol.rank_tol

    def in_range(x) -> bool:
        vec = np.asarray(x, dtype=float)
        if vec.shape != (n,):
            raise DimensionMismatch(f"expected a vector of length {n}, got shape {vec.shape}")
        residual = vec - basis @ (basis.T @ vec)
        return float(np.linalg.norm(residual)) <= rank_tol * max(1.0, float(np.linalg.norm(vec)))

    return pinv, in_range


def spectral_norm(A: SymMat, tol: Tolerances = DEFAULT_TOL) -> float:
    lam = eigvalsh(A, tol)
    return float(np.max(np.abs(lam)))


def principal_angle(U, W, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest principal angle (radians) between the column spans of U and W.

    Columns are orthonormalized internally; the subspaces must have equal
    dimension.
    """
    Un = _orthonormalize(_as_columns(U))
    Wn = _orthonormalize(_as_columns(W))
    if Un.shape != Wn.shape:
        raise DimensionMismatch("subspaces have different dimensions")
    G = Un.T @ Wn
    lam = eigvalsh(SymMat(G.T @ G), tol)
    cos2 = float(np.clip(np.min(lam), 0.0, 1.0))
    return math.acos(math.sqrt(cos2))


def _as_columns(M) -> np.ndarray:
    arr = np.asarray(M, dtype=float)
    return arr[:, None] if arr.ndim == 1 else arr


def _orthonormalize(M: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on columns, dropping nothing (raises if rank-deficient)."""
    M = _as_columns(M)
    cols = []
    for j in range(M.shape[1]):
        w = M[:, j].copy()
        for c in cols:
            w -= c * float(c @ w)
        norm = float(np.linalg.norm(w))
        if norm <= 1e-12:
            raise Singular("columns are numerically dependent")
        cols.append(w / norm)
    return np.column_stack(cols)


def complete_basis(cols: np.ndarray) -> np.ndarray:
    """Deterministically extend orthonormal columns to a full basis of R^n
    by sweeping the standard basis."""
    n = cols.shape[0]
    out = [cols[:, j].copy() for j in range(cols.shape[1])]
    for i in range(n):
        if len(out) == n:
            break
        w = np.zeros(n)
        w[i] = 1.0
        for c in out:
            w -= c * float(c @ w)
        norm = float(np.linalg.norm(w))
        if norm > 1e-8:
            out.append(w / norm)
    if len(out) != n:
        raise Singular("failed to complete the basis")
    return np.column_stack(out)
