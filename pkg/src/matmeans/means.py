"""Matrix means of positive definite matrices.

Weighted geometric mean, two-variable power mean (closed form) and its
m-variable fixed-point solution, the quasi-arithmetic mean Q_t, Heron means
and the Heinz-type product sums. Results that are Hermitian positive definite
come back as :class:`SpdMatrix`; the non-Hermitian ones are plain arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoConvergenceError, ParameterRangeError
from .linalg import (
    GeneralMatrix,
    SpdMatrix,
    check_same_dimension,
    hermitian_eigen,
    hermitian_part,
    real_power,
    spd,
)

FIXED_POINT_STEP_TOL = 1e-12
FIXED_POINT_MAX_ITER = 500


def _require_unit(name: str, value: float, *, open_left: bool = False) -> float:
    value = float(value)
    lo_ok = value > 0 if open_left else value >= 0
    if not (lo_ok and value <= 1):
        interval = "(0, 1]" if open_left else "[0, 1]"
        raise ParameterRangeError(f"{name.upper()}_OUT_OF_RANGE", f"{name}={value} not in {interval}")
    return value


@dataclass(frozen=True)
class MeanParams:
    """Geodesic parameter ``t``, Heron weight ``s`` and scale ``r``."""

    t: float = 0.5
    s: float = 0.5
    r: float = 1.0

    def __post_init__(self):
        _require_unit("t", self.t)
        _require_unit("s", self.s)
        if not float(self.r) >= 0:
            raise ParameterRangeError("R_OUT_OF_RANGE", f"r={self.r} must be >= 0")


def _whitened(a: SpdMatrix, b: SpdMatrix):
    """R with A = R*R, and R^{-*} B R^{-1} as an SpdMatrix.

    Any factor works by congruence invariance. The Cholesky factor keeps
    the back-multiplication R* f(M) R accurate when A is ill-conditioned,
    where A^{1/2} f(M) A^{1/2} loses digits to cancellation.
    """
    check_same_dimension(a.matrix, b.matrix)
    r = np.linalg.cholesky(a.matrix).conj().T
    left = np.linalg.solve(r.conj().T, b.matrix)            # R^{-*} B
    m = np.linalg.solve(r.conj().T, left.conj().T).conj().T  # R^{-*} B R^{-1}
    return r, spd(m)


def sharp(a: SpdMatrix, b: SpdMatrix, t: float) -> SpdMatrix:
    """A #_t B for any real t (the geodesic extended past its endpoints)."""
    t = float(t)
    if t == 0.0:
        return a
    r, m = _whitened(a, b)
    return spd(r.conj().T @ real_power(m, t).matrix @ r)


def geometric_mean_t(a: SpdMatrix, b: SpdMatrix, t: float) -> SpdMatrix:
    """A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}, t in [0, 1]."""
    t = _require_unit("t", t)
    if t == 1.0:
        check_same_dimension(a.matrix, b.matrix)
        return b
    return sharp(a, b, t)


def geometric_mean(a: SpdMatrix, b: SpdMatrix) -> SpdMatrix:
    return geometric_mean_t(a, b, 0.5)


def power_mean_closed(a: SpdMatrix, b: SpdMatrix, t: float) -> SpdMatrix:
    """Two-variable power mean R* ((I + M^t)/2)^{1/t} R, A = R*R, M = R^{-*} B R^{-1}.

    Equal to A #_{1/t} ((A + A #_t B)/2); the spectral form avoids the
    extrapolated geodesic.
    """
    t = _require_unit("t", t, open_left=True)
    r, m = _whitened(a, b)
    mid = SpdMatrix.from_eig(((1.0 + m.eig.values ** t) / 2.0) ** (1.0 / t), m.eig.vectors)
    return spd(r.conj().T @ mid.matrix @ r)


def _fixed_point_map(x: np.ndarray, As: Sequence[SpdMatrix], t: float) -> np.ndarray:
    ex = hermitian_eigen(x)
    root = ex.apply(np.sqrt(ex.values))
    iroot = ex.apply(1.0 / np.sqrt(ex.values))
    acc = np.zeros_like(x)
    for a in As:
        em = hermitian_eigen(hermitian_part(iroot @ a.matrix @ iroot))
        acc += em.apply(em.values ** t)
    return hermitian_part(root @ (acc / len(As)) @ root)


def power_mean_fixed_point(As: Sequence[SpdMatrix], t: float, *,
                           step_tol: float = FIXED_POINT_STEP_TOL,
                           max_iter: int = FIXED_POINT_MAX_ITER) -> SpdMatrix:
    """Solve X = (1/m) sum_i X #_t A_i by direct iteration from the arithmetic mean.

    The map is a strict contraction for the Thompson metric when t in (0, 1].
    Stops on a relative Frobenius step below ``step_tol``.
    """
    t = _require_unit("t", t, open_left=True)
    if len(As) < 2:
        raise ValueError("power mean needs at least two matrices")
    check_same_dimension(*(a.matrix for a in As))
    x = sum(a.matrix for a in As) / len(As)
    for _ in range(max_iter):
        nxt = _fixed_point_map(x, As, t)
        step = np.linalg.norm(nxt - x) / np.linalg.norm(nxt)
        x = nxt
        if step < step_tol:
            return spd(x)
    raise NoConvergenceError(f"power mean iteration did not settle in {max_iter} steps (t={t})")


def fixed_point_residual(x: SpdMatrix, As: Sequence[SpdMatrix], t: float) -> float:
    """||X - (1/m) sum X #_t A_i||_F / ||X||_F."""
    mapped = _fixed_point_map(x.matrix, As, t)
    return float(np.linalg.norm(x.matrix - mapped) / np.linalg.norm(x.matrix))


def power_mean(As: Sequence[SpdMatrix], t: float) -> SpdMatrix:
    """Closed form for two matrices, fixed point otherwise."""
    if len(As) == 2:
        return power_mean_closed(As[0], As[1], t)
    return power_mean_fixed_point(As, t)


def q_mean(As: Sequence[SpdMatrix], t: float) -> SpdMatrix:
    """((1/m) sum A_i^t)^{1/t}."""
    t = _require_unit("t", t, open_left=True)
    check_same_dimension(*(a.matrix for a in As))
    avg = spd(sum(real_power(a, t).matrix for a in As) / len(As))
    return real_power(avg, 1.0 / t)


def heron_kubo_ando(a: SpdMatrix, b: SpdMatrix, s: float) -> SpdMatrix:
    """(1-s)(A+B)/2 + s A#B."""
    s = _require_unit("s", s)
    check_same_dimension(a.matrix, b.matrix)
    arith = (a.matrix + b.matrix) / 2
    if s == 0.0:
        return spd(arith)
    return spd((1 - s) * arith + s * geometric_mean(a, b).matrix)


def heinz_products(a: SpdMatrix, b: SpdMatrix, t: float) -> tuple[GeneralMatrix, GeneralMatrix]:
    """(A^t B^{1-t} + A^{1-t} B^t,  A^t B^{1-t} + B^t A^{1-t}).

    Neither is Hermitian in general; at t = 1/2 the second one is.
    """
    t = _require_unit("t", t)
    check_same_dimension(a.matrix, b.matrix)
    at, a1t = real_power(a, t).matrix, real_power(a, 1 - t).matrix
    bt, b1t = real_power(b, t).matrix, real_power(b, 1 - t).matrix
    first = at @ b1t
    return first + a1t @ bt, first + bt @ a1t


def heron_naive(a: SpdMatrix, b: SpdMatrix, s: float, t: float) -> GeneralMatrix:
    """(1-s)(A+B)/2 + s (A^t B^{1-t} + A^{1-t} B^t)/2, not Hermitian in general."""
    s = _require_unit("s", s)
    heinz, _ = heinz_products(a, b, t)
    return (1 - s) * (a.matrix + b.matrix) / 2 + s * heinz / 2
