"""Spectral functionals and majorization comparators."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    LengthMismatchError,
    NonPositiveForLogError,
    ParameterRangeError,
)
from .linalg import GeneralMatrix, SpdMatrix, as_general, hermitian_eigen, hermitian_part

INF = math.inf

MAJORIZATION_ABS_TOL = 1e-9
MAJORIZATION_REL_TOL = 1e-9


class Verdict(str, enum.Enum):
    HOLDS = "HOLDS"
    EQUALITY_WITHIN_TOL = "EQUALITY_WITHIN_TOL"
    VIOLATED = "VIOLATED"


class MajorizationKind(str, enum.Enum):
    LOG = "LOG"            # prefix products, full products equal
    WEAK = "WEAK"          # prefix sums only
    WEAK_LOG = "WEAK_LOG"  # prefix products only


def eigenvalues(h) -> np.ndarray:
    """lambda(H) for Hermitian H, descending."""
    if isinstance(h, SpdMatrix):
        return np.array(h.eig.values)
    return np.array(hermitian_eigen(h).values)


def singular_values(m) -> np.ndarray:
    """s(M): square roots of the eigenvalues of M*M, descending."""
    m = as_general(m)
    vals = hermitian_eigen(hermitian_part(m.conj().T @ m)).values
    return np.sqrt(np.clip(vals, 0.0, None))


def parse_p(p) -> float:
    """Schatten index from a number or the strings 'inf'/'INF'."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        p = float(p)
    p = float(p)
    if not (p >= 1):
        raise ParameterRangeError("P_OUT_OF_RANGE", f"Schatten index p={p} must be >= 1 or inf")
    return p


def schatten_norm(m, p) -> float:
    """(sum s_i^p)^{1/p}; the largest singular value for p = inf."""
    p = parse_p(p)
    s = singular_values(m.matrix if isinstance(m, SpdMatrix) else m)
    if p == INF:
        return float(s[0])
    top = s[0]
    if top == 0:
        return 0.0
    # factor out the top singular value against overflow
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


class Trace(NamedTuple):
    real: float
    imag: float

    @property
    def value(self) -> complex:
        return complex(self.real, self.imag)

    @property
    def imag_magnitude(self) -> float:
        return abs(self.imag)

    def __complex__(self):
        return self.value


def trace_product(ms: Sequence) -> Trace:
    """Tr(M_1 M_2 ... M_k)."""
    arrays = [np.asarray(m.matrix if isinstance(m, SpdMatrix) else m, dtype=np.complex128)
              for m in ms]
    if not arrays:
        raise ValueError("empty product")
    for left, right in zip(arrays, arrays[1:]):
        if left.shape[1] != right.shape[0]:
            raise DimensionMismatchError(f"cannot multiply {left.shape} by {right.shape}")
    if arrays[0].shape[0] != arrays[-1].shape[1]:
        raise DimensionMismatchError("product is not square")
    prod = arrays[0]
    for a in arrays[1:]:
        prod = prod @ a
    tr = complex(np.trace(prod))
    return Trace(tr.real, tr.imag)


def log_det(a: SpdMatrix) -> float:
    return float(np.sum(np.log(a.eig.values)))


def compound(m, k: int) -> GeneralMatrix:
    """k-th compound: all k x k minors, rows/columns in lexicographic subset order."""
    m = as_general(m)
    n = m.shape[0]
    if not (1 <= k <= n):
        raise ParameterRangeError("K_OUT_OF_RANGE", f"k={k} outside [1, {n}]")
    if k == 1:
        return m.copy()
    subsets = np.array(list(itertools.combinations(range(n), k)))
    rows = subsets[:, None, :, None]
    cols = subsets[None, :, None, :]
    return np.linalg.det(m[rows, cols])


@dataclass(frozen=True)
class MajorizationReport:
    """Prefix-by-prefix comparison of two descending vectors.

    ``left_prefix``/``right_prefix`` hold cumulative log-sums for the
    product kinds and cumulative sums for WEAK. ``differences`` is
    left minus right per prefix; ``tolerances`` the slack allowed there.
    """

    kind: MajorizationKind
    left: np.ndarray
    right: np.ndarray
    left_prefix: np.ndarray
    right_prefix: np.ndarray
    differences: np.ndarray
    tolerances: np.ndarray
    prefix_ok: np.ndarray
    final_equality: bool | None

    @property
    def holds(self) -> bool:
        if self.kind is MajorizationKind.LOG:
            return bool(np.all(self.prefix_ok)) and bool(self.final_equality)
        return bool(np.all(self.prefix_ok))

    @property
    def all_equal(self) -> bool:
        return bool(np.all(np.abs(self.differences) <= self.tolerances))

    @property
    def verdict(self) -> Verdict:
        if not self.holds:
            return Verdict.VIOLATED
        if self.all_equal:
            return Verdict.EQUALITY_WITHIN_TOL
        return Verdict.HOLDS

    @property
    def first_failure(self) -> int | None:
        """1-based prefix length of the first failing comparison."""
        bad = np.flatnonzero(~self.prefix_ok)
        if bad.size:
            return int(bad[0]) + 1
        if self.kind is MajorizationKind.LOG and not self.final_equality:
            return len(self.left)
        return None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "differences": self.differences.tolist(),
            "tolerances": self.tolerances.tolist(),
            "final_equality": self.final_equality,
            "verdict": self.verdict.value,
        }


def log_majorization(u, v, kind=MajorizationKind.LOG, *,
                     abs_tol: float = MAJORIZATION_ABS_TOL,
                     rel_tol: float = MAJORIZATION_REL_TOL) -> MajorizationReport:
    """Compare ``u`` against ``v`` for (log-/weak) majorization ``u < v``.

    Both vectors are sorted descending first. Slack at prefix k is
    ``abs_tol + rel_tol * (|L_k| + |R_k|)`` in the domain being compared.
    """
    kind = MajorizationKind(kind)
    u = np.sort(np.asarray(u, dtype=np.float64))[::-1]
    v = np.sort(np.asarray(v, dtype=np.float64))[::-1]
    if u.shape != v.shape or u.ndim != 1:
        raise LengthMismatchError(f"lengths differ: {u.shape} vs {v.shape}")
    if kind is MajorizationKind.WEAK:
        lp, rp = np.cumsum(u), np.cumsum(v)
    else:
        if np.any(u <= 0) or np.any(v <= 0):
            raise NonPositiveForLogError("log-majorization needs strictly positive entries")
        lp, rp = np.cumsum(np.log(u)), np.cumsum(np.log(v))
    diff = lp - rp
    tol = abs_tol + rel_tol * (np.abs(lp) + np.abs(rp))
    ok = diff <= tol
    final = None
    if kind is MajorizationKind.LOG:
        final = bool(abs(diff[-1]) <= tol[-1])
    return MajorizationReport(kind, u, v, lp, rp, diff, tol, ok, final)
