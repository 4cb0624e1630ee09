"""Dense Hermitian eigendecomposition and matrix functional calculus.

Everything downstream (means, spectral functionals, the verifier) goes through
:func:`hermitian_eigen`, a cyclic Jacobi solver for complex Hermitian matrices.
General (possibly non-Hermitian) matrices are plain ``complex128`` numpy arrays;
positive definite ones are wrapped in :class:`SpdMatrix`, which carries its
certified eigendecomposition so that repeated powers cost no extra solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    NoConvergenceError,
    NonHermitianError,
    NotPositiveDefiniteError,
)

GeneralMatrix = np.ndarray

HERMITIAN_TOL = 1e-12
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
SPD_FLOOR = 1e-13


def as_general(x) -> GeneralMatrix:
    """Coerce to a finite square complex matrix."""
    m = np.array(x, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatchError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


def hermitian_part(x) -> GeneralMatrix:
    m = np.asarray(x, dtype=np.complex128)
    return (m + m.conj().T) / 2


def asymmetry(m: GeneralMatrix) -> float:
    """max |M - M*| relative to max |M| (0 for the zero matrix)."""
    scale = np.max(np.abs(m))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)) / scale)


@numba.njit(cache=True)
def _jacobi_kernel(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j].real ** 2 + a[i, j].imag ** 2
    fro = math.sqrt(fro)
    sweeps = 0
    polish = 0
    rotated = -1
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        off = math.sqrt(off)
        if off <= tol * fro:
            # a few extra sweeps buy relative accuracy for tiny eigenvalues
            if rotated == 0 or polish >= 3:
                return v, sweeps, True
            polish += 1
        if sweeps >= max_sweeps:
            return v, sweeps, False
        sweeps += 1
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                if mag <= 1e-16 * math.sqrt(abs(app * aqq)):
                    continue
                rotated += 1
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    tt = 0.5 / theta
                else:
                    sgn = 1.0 if theta >= 0.0 else -1.0
                    tt = sgn / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(1.0 + tt * tt)
                s = tt * c
                ph = apq / mag
                phc = ph.conjugate()
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - tt * mag
                a[q, q] = aqq + tt * mag
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * phc * vkq
                    v[k, q] = s * vkp + c * phc * vkq


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending, unitary eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> GeneralMatrix:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def apply(self, fvalues) -> GeneralMatrix:
        return (self.vectors * fvalues) @ self.vectors.conj().T


def _sorted_decomposition(values, vectors, sweeps=0) -> EigenDecomposition:
    order = np.argsort(-values, kind="stable")
    vals = np.ascontiguousarray(values[order], dtype=np.float64)
    vecs = np.ascontiguousarray(vectors[:, order], dtype=np.complex128)
    vals.flags.writeable = False
    vecs.flags.writeable = False
    return EigenDecomposition(vals, vecs, sweeps)


def hermitian_eigen(h, *, tol: float = JACOBI_TOL,
                    max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    The input is checked against ``HERMITIAN_TOL`` and then symmetrized;
    sweeps stop once the off-diagonal Frobenius mass drops below
    ``tol * ||H||_F`` (plus at most three polishing sweeps).

    Raises:
        NonHermitianError: asymmetry beyond tolerance.
        NoConvergenceError: ``max_sweeps`` exhausted.
    """
    m = as_general(h)
    if asymmetry(m) > HERMITIAN_TOL:
        raise NonHermitianError(f"matrix is not Hermitian (relative asymmetry {asymmetry(m):.3e})")
    a = hermitian_part(m)
    v, sweeps, converged = _jacobi_kernel(a, tol, max_sweeps)
    if not converged:
        raise NoConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return _sorted_decomposition(np.diag(a).real.copy(), v, sweeps)


class SpdMatrix:
    """Hermitian positive definite matrix with a certified smallest eigenvalue.

    Construction runs the eigensolver and rejects any eigenvalue below
    ``SPD_FLOOR * lambda_max``. The decomposition is kept for reuse.
    """

    __slots__ = ("matrix", "eig", "min_eig")

    def __init__(self, matrix):
        eig = hermitian_eigen(matrix)
        top = eig.values[0]
        if not top > 0 or eig.values[-1] <= SPD_FLOOR * top:
            raise NotPositiveDefiniteError(
                f"smallest eigenvalue {eig.values[-1]:.3e} not positive (largest {top:.3e})")
        m = hermitian_part(as_general(matrix))
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eig", eig)
        object.__setattr__(self, "min_eig", float(eig.values[-1]))

    def __setattr__(self, name, value):
        raise AttributeError("SpdMatrix is immutable")

    @classmethod
    def from_eig(cls, values, vectors) -> "SpdMatrix":
        """Assemble from a known spectrum; values must be finite and positive."""
        values = np.asarray(values, dtype=np.float64)
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise NotPositiveDefiniteError("spectrum must be finite and strictly positive")
        eig = _sorted_decomposition(values, np.asarray(vectors, dtype=np.complex128))
        m = hermitian_part(eig.reconstruct())
        m.flags.writeable = False
        self = object.__new__(cls)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eig", eig)
        object.__setattr__(self, "min_eig", float(eig.values[-1]))
        return self

    @classmethod
    def identity(cls, n: int) -> "SpdMatrix":
        return cls.from_eig(np.ones(n), np.eye(n))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def max_eig(self) -> float:
        return float(self.eig.values[0])

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"SpdMatrix(n={self.n}, min_eig={self.min_eig:.6g}, max_eig={self.max_eig:.6g})"


def spd(x) -> SpdMatrix:
    """SpdMatrix from a computed product, dropping rounding-level asymmetry."""
    if isinstance(x, SpdMatrix):
        return x
    return SpdMatrix(hermitian_part(as_general(x)))


def matrix_function(a: SpdMatrix, f: Callable[[np.ndarray], np.ndarray]) -> GeneralMatrix:
    """V diag(f(lambda)) V* for a vectorized scalar map ``f``."""
    with np.errstate(all="ignore"):
        fv = np.asarray(f(a.eig.values))
    if fv.shape != a.eig.values.shape or not np.all(np.isfinite(fv)):
        raise DomainError("f is undefined at some eigenvalue")
    out = a.eig.apply(fv)
    if not np.iscomplexobj(fv):
        out = hermitian_part(out)
    return out


def real_power(a: SpdMatrix, t: float) -> SpdMatrix:
    t = float(t)
    if t == 1.0:
        return a
    return SpdMatrix.from_eig(a.eig.values ** t, a.eig.vectors)


def complex_power(a: SpdMatrix, z: complex) -> GeneralMatrix:
    # principal branch: the spectrum is positive, so log is real
    return a.eig.apply(np.exp(complex(z) * np.log(a.eig.values)))


def congruence(a, x) -> GeneralMatrix:
    """X* A X."""
    a = np.asarray(a, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or x.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[1] != x.shape[0]:
        raise DimensionMismatchError(f"cannot form X* A X for shapes {a.shape} and {x.shape}")
    return x.conj().T @ a @ x


def condition_number(a: SpdMatrix) -> float:
    return a.max_eig / a.min_eig


def check_same_dimension(*mats) -> int:
    dims = {np.shape(m)[0] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()
