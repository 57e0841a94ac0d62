"""Order automorphisms of the unit matrix interval [0, I].

Every order automorphism is a congruence-like fractional map driven by an
invertible generator T:

    phi_T(X) = T (X (T^t T - I) + I)^{-1} X T^t,

with T unique up to sign. This module provides the group operations on
generators, evaluation of the map, recovery of the generator from a
black-box automorphism, and the older fractional-linear (Mobius)
parametrization together with its conversion to generator form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from . import linalg
from .effects import Effect, RankOneProjection, make_effect, standard_projection
from .errors import (
    BadParameter,
    DimensionMismatch,
    DomainError,
    InternalInversionFailure,
    NotAnEffect,
    NotAutomorphism,
    NotPSD,
    OutOfInterval,
    Singular,
)
from .linalg import DEFAULT_TOL, SymMat, Tolerances

_RESIDUAL_PROBE_SEED = 271828
_CONVERSION_CHECK_SEED = 314159


def _canonical_sign(t: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Flip T so its first significantly nonzero entry (row-major) is positive."""
    scale = float(np.linalg.norm(t, 2))
    for value in t.ravel():
        if abs(float(value)) > tol.equality_tol * scale:
            return -t if float(value) < 0.0 else t
    raise Singular("generator is numerically zero")


def _coerce_effect(X, tol: Tolerances) -> Effect:
    if isinstance(X, Effect):
        return X
    if isinstance(X, SymMat):
        try:
            return make_effect(X, tol)
        except OutOfInterval as exc:
            raise NotAnEffect(str(exc)) from exc
    raise NotAnEffect(f"expected an Effect or SymMat, got {type(X).__name__}")


class EffectAutomorphism:
    """phi_T with the generator stored in canonical sign.

    The extension bound eps is the certified radius beyond the unit
    interval on which the defining formula stays invertible: the map is
    well defined on [0, (1 + eps) I), with eps = None meaning unbounded.
    """

    __slots__ = ("t", "n", "gram", "extension_bound", "_noise_gate")

    def __init__(self, generator, tol: Tolerances = DEFAULT_TOL):
        t = np.array(generator, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise DimensionMismatch(f"generator must be square, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise Singular("generator entries must be finite")
        n = t.shape[0]
        gram_spec = linalg.eigh(SymMat(t.T @ t), tol)
        lam = gram_spec.eigenvalues
        sigma_max = math.sqrt(max(float(lam[-1]), 0.0))
        sigma_min = math.sqrt(max(float(lam[0]), 0.0))
        abs_det = math.sqrt(float(np.prod(np.clip(lam, 0.0, None))))
        if abs_det <= tol.rank_tol or sigma_min <= tol.rank_tol * max(1.0, sigma_max):
            raise Singular("generator is singular within rank tolerance")
        t = _canonical_sign(t, tol)
        t.flags.writeable = False
        self.t = t
        self.n = n
        gram = SymMat(t.T @ t)
        self.gram = gram

        delta = float(lam[0])
        if delta >= 1.0:
            self.extension_bound: Optional[float] = None
        else:
            shrunk = delta * (1.0 - 1e-12)
            self.extension_bound = shrunk / (1.0 - shrunk)

        # Roundoff in the defining formula grows with the conditioning of
        # T^t T; images are certified against psd_tol widened by this
        # float-noise bound and then clamped back onto [0, 1].
        cond = float(lam[-1]) / float(lam[0])
        self._noise_gate = 64.0 * np.finfo(float).eps * cond * max(1.0, float(lam[-1]))

        # Well-definedness certificate on a fixed probe set.
        shift = gram.a - np.eye(n)
        probes = [np.zeros((n, n)), np.eye(n), 0.5 * np.eye(n)]
        e11 = np.zeros((n, n))
        e11[0, 0] = 1.0
        probes.append(e11)
        for probe in probes:
            m = probe @ shift + np.eye(n)
            sv = np.linalg.svd(m, compute_uv=False)
            if float(sv[-1]) <= tol.rank_tol * max(1.0, float(sv[0])):
                raise Singular("defining formula is not invertible on the probe set")

    def apply(self, X, tol: Tolerances = DEFAULT_TOL) -> Effect:
        """Evaluate T (X (T^t T - I) + I)^{-1} X T^t, certified back into [0, I]."""
        eff = _coerce_effect(X, tol)
        if eff.n != self.n:
            raise DimensionMismatch(f"dimensions differ: {eff.n} vs {self.n}")
        x = eff.mat.a
        m = x @ (self.gram.a - np.eye(self.n)) + np.eye(self.n)
        try:
            z = np.linalg.solve(m, x)
        except np.linalg.LinAlgError as exc:
            raise InternalInversionFailure(
                "certified-invertible matrix was numerically intractable") from exc
        y = self.t @ z @ self.t.T
        image = SymMat((y + y.T) / 2.0)
        spec = linalg.eigh(image, tol)
        lam = spec.eigenvalues
        gate = max(tol.psd_tol, self._noise_gate)
        if float(lam[0]) < -gate or float(lam[-1]) > 1.0 + gate:
            raise InternalInversionFailure(
                f"image left the unit interval beyond the noise gate "
                f"(eigenvalues {lam[0]!r}..{lam[-1]!r})")
        if float(lam[0]) < 0.0 or float(lam[-1]) > 1.0:
            clipped = np.clip(lam, 0.0, 1.0)
            image = SymMat((spec.eigenvectors * clipped) @ spec.eigenvectors.T)
        return Effect(mat=image)

    def compose(self, other: "EffectAutomorphism", tol: Tolerances = DEFAULT_TOL) -> "EffectAutomorphism":
        """Generator product: applying `other` first, then `self`."""
        if self.n != other.n:
            raise DimensionMismatch(f"dimensions differ: {self.n} vs {other.n}")
        return EffectAutomorphism(self.t @ other.t, tol)

    def inverse(self, tol: Tolerances = DEFAULT_TOL) -> "EffectAutomorphism":
        return EffectAutomorphism(np.linalg.inv(self.t), tol)

    def equals(self, other: "EffectAutomorphism", tol: Tolerances = DEFAULT_TOL) -> bool:
        if self.n != other.n:
            raise DimensionMismatch(f"dimensions differ: {self.n} vs {other.n}")
        return float(np.linalg.norm(self.t - other.t)) <= tol.equality_tol * float(np.linalg.norm(self.t))

    def project_image(self, P: RankOneProjection, tol: Tolerances = DEFAULT_TOL) -> RankOneProjection:
        """Projection onto T x for x spanning Im P; certified against the
        dominant eigendirection of the mapped projection."""
        if P.n != self.n:
            raise DimensionMismatch(f"dimensions differ: {P.n} vs {self.n}")
        image = RankOneProjection(self.t @ P.x)
        mapped = self.apply(Effect(mat=P.mat), tol)
        spec = linalg.eigh(mapped.mat, tol)
        dominant = spec.eigenvectors[:, -1]
        cosine = min(1.0, abs(float(image.x @ dominant)))
        if math.acos(cosine) > 1e-6:
            raise InternalInversionFailure("image direction certificate failed")
        return image

    def __repr__(self):
        return f"EffectAutomorphism(n={self.n}, t={self.t.tolist()!r})"


def identity_automorphism(n: int) -> EffectAutomorphism:
    return EffectAutomorphism(np.eye(n))


def _mixed_projection(j: int, n: int) -> RankOneProjection:
    e = np.zeros(n)
    e[0] = 1.0
    e[j] = 1.0
    return RankOneProjection(e)


def _random_effects(n: int, count: int, seed: int) -> List[Effect]:
    """Deterministic effects used for residual checks; spectrum squeezed
    into (0, 1) so probes stay away from the boundary."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = rng.standard_normal((n, n))
        sym = SymMat(g)
        lam = linalg.eigvalsh(sym)
        lo, hi = float(lam[0]), float(lam[-1])
        if hi - lo < 1e-9:
            out.append(make_effect(SymMat(0.5 * np.eye(n))))
            continue
        scaled = (sym.a - lo * np.eye(n)) * (0.8 / (hi - lo)) + 0.1 * np.eye(n)
        out.append(make_effect(SymMat(scaled)))
    return out


def recovery_probe_effects(n: int) -> List[Effect]:
    """The exact ordered list of effects recover_generator feeds to its
    oracle: (1/2)I, the basis projections, the mixed two-index
    projections, then the ten deterministic residual-check effects."""
    probes: List[Effect] = [make_effect(SymMat(0.5 * np.eye(n)))]
    probes.extend(Effect(mat=standard_projection(i, n).mat) for i in range(n))
    probes.extend(Effect(mat=_mixed_projection(j, n).mat) for j in range(1, n))
    probes.extend(_random_effects(n, 10, _RESIDUAL_PROBE_SEED))
    return probes


def _dominant_direction(E: Effect, tol: Tolerances) -> np.ndarray:
    spec = linalg.eigh(E.mat, tol)
    return spec.eigenvectors[:, -1]


def recover_generator(
    oracle: Callable[[Effect], Effect],
    n: int,
    tol: Tolerances = DEFAULT_TOL,
) -> EffectAutomorphism:
    """Reconstruct the generator of a black-box order automorphism.

    The image of (1/2)I determines T T^t; probing the basis projections
    recovers the orthogonal factor column by column, with per-column sign
    ambiguity resolved through the mixed (e_1 + e_j) projections. A final
    residual check compares the rebuilt map against the oracle on ten
    deterministic effects at 1e-6.
    """
    if n < 2:
        raise DimensionMismatch("dimension must be at least 2")
    probes = recovery_probe_effects(n)
    half_identity, basis = probes[0], probes[1:1 + n]
    mixed = probes[1 + n:2 * n]
    residual_probes = probes[2 * n:]

    C = oracle(half_identity)
    if not isinstance(C, Effect) or C.n != n:
        raise NotAutomorphism("oracle must return effects of matching dimension")
    if not (linalg.loewner_lt(SymMat.zero(n), C.mat, tol)
            and linalg.loewner_lt(C.mat, SymMat.identity(n), tol)):
        raise NotAutomorphism("image of (1/2)I must lie strictly inside (0, I)")

    try:
        shifted = linalg.inv(C.mat, tol) - SymMat.identity(n)
        M = linalg.sqrt_psd(linalg.inv(shifted, tol), tol)
        M_inv = linalg.inv(M, tol)
    except (Singular, NotPSD) as exc:
        raise NotAutomorphism(f"midpoint image is inconsistent: {exc}") from exc

    columns = []
    for i in range(n):
        v = _dominant_direction(oracle(basis[i]), tol)
        u = M_inv.a @ v
        norm = float(np.linalg.norm(u))
        if norm <= 1e-12:
            raise NotAutomorphism("degenerate image of a basis projection")
        columns.append(u / norm)

    # Fix the overall sign on the first column, then align the rest.
    u1 = columns[0]
    for value in u1:
        if abs(float(value)) > 1e-8:
            if float(value) < 0.0:
                u1 = -u1
            break
    columns[0] = u1
    for j in range(1, n):
        w = _dominant_direction(oracle(mixed[j - 1]), tol)
        z = M_inv.a @ w
        z = z / float(np.linalg.norm(z))
        best_sign, best_score = 1.0, -1.0
        for sign in (1.0, -1.0):
            cand = u1 + sign * columns[j]
            norm = float(np.linalg.norm(cand))
            if norm <= 1e-12:
                continue
            score = abs(float((cand / norm) @ z))
            if score > best_score:
                best_sign, best_score = sign, score
        columns[j] = best_sign * columns[j]

    O = np.column_stack(columns)
    if float(np.linalg.norm(O.T @ O - np.eye(n))) > 1e-6:
        raise NotAutomorphism("recovered frame is not orthogonal")

    phi = EffectAutomorphism(M.a @ O, tol)
    for probe in residual_probes:
        image = oracle(probe)
        if float(np.linalg.norm(phi.apply(probe, tol).mat.a - image.mat.a)) > 1e-6:
            raise NotAutomorphism("residual check against the oracle failed")
    return phi


def unit_mobius(p: float, x: float) -> float:
    """The increasing fractional-linear bijection of [0, 1]:
    x / (p x + (1 - p)), defined for every p < 1."""
    if not p < 1.0:
        raise BadParameter("p must be strictly below 1")
    if x < 0.0 or x > 1.0:
        raise BadParameter("x must lie in [0, 1]")
    return x / (p * x + (1.0 - p))


@dataclass(frozen=True)
class MobiusParams:
    """Parameters (p, q, T) of the fractional-linear automorphism form:
    p, q < 1 and T an invertible contraction."""

    p: float
    q: float
    t: np.ndarray

    def __post_init__(self):
        if not (self.p < 1.0 and self.q < 1.0):
            raise BadParameter("p and q must be strictly below 1")
        t = np.array(self.t, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise BadParameter("T must be a square matrix")
        lam = linalg.eigvalsh(SymMat(t.T @ t))
        sigma_max = math.sqrt(max(float(lam[-1]), 0.0))
        sigma_min = math.sqrt(max(float(lam[0]), 0.0))
        if sigma_max > 1.0 + DEFAULT_TOL.equality_tol:
            raise BadParameter("T must be a contraction (largest singular value <= 1)")
        if sigma_min <= DEFAULT_TOL.rank_tol:
            raise BadParameter("T must be invertible")
        t.flags.writeable = False
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.t.shape[0]


def mobius_apply(params: MobiusParams, X, tol: Tolerances = DEFAULT_TOL) -> Effect:
    """Evaluate the fractional-linear automorphism form on an effect:

        f_q( f_p(T T^t)^{-1/2} f_p(T X T^t) f_p(T T^t)^{-1/2} )

    with every scalar function taken spectrally and eigenvalues clamped
    into their theoretical ranges at tolerance.
    """
    eff = _coerce_effect(X, tol)
    if eff.n != params.n:
        raise DimensionMismatch(f"dimensions differ: {eff.n} vs {params.n}")
    p, q, t = params.p, params.q, params.t

    # Upper slack admits the contraction check's own tolerance on ||T||.
    upper_slack = tol.psd_tol + 3.0 * tol.equality_tol

    def clamped_mobius(level: float) -> float:
        if level < -tol.psd_tol or level > 1.0 + upper_slack:
            raise DomainError(f"eigenvalue {level!r} outside [0, 1] at tolerance")
        return unit_mobius(p, min(1.0, max(0.0, level)))

    inner = SymMat(t @ eff.mat.a @ t.T)
    gram = SymMat(t @ t.T)
    f_inner = linalg.apply_fn(inner, clamped_mobius, tol)
    f_gram = linalg.apply_fn(gram, clamped_mobius, tol)
    floor = tol.rank_tol ** 2
    normalizer = linalg.apply_fn(f_gram, lambda level: 1.0 / math.sqrt(max(level, floor)), tol)
    middle = normalizer.a @ f_inner.a @ normalizer.a
    middle_sym = SymMat((middle + middle.T) / 2.0)
    lam = linalg.eigvalsh(middle_sym, tol)
    if float(lam[0]) < -tol.psd_tol or float(lam[-1]) > 1.0 + tol.psd_tol:
        raise InternalInversionFailure("normalized middle term left [0, I]")
    result = linalg.apply_fn(middle_sym, lambda level: unit_mobius(q, min(1.0, max(0.0, level))), tol)
    return make_effect(result, tol)


def mobius_to_canonical(params: MobiusParams, tol: Tolerances = DEFAULT_TOL) -> EffectAutomorphism:
    """Convert the fractional-linear form to generator form by running the
    recovery algorithm against it, then verify on twenty deterministic
    effects at 1e-6."""
    phi = recover_generator(lambda E: mobius_apply(params, E, tol), params.n, tol)
    for probe in _random_effects(params.n, 20, _CONVERSION_CHECK_SEED):
        direct = mobius_apply(params, probe, tol)
        if float(np.linalg.norm(phi.apply(probe, tol).mat.a - direct.mat.a)) > 1e-6:
            raise NotAutomorphism("canonical form does not reproduce the fractional-linear map")
    return phi
