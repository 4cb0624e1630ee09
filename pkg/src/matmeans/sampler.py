"""Seeded generation of positive definite test matrices.

Every draw comes from a Philox-4x64 counter-based stream whose key is the
64-bit seed, so a ``(seed, config)`` pair pins the matrices exactly and a
trial can be replayed from its seed alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConstructionFailedError, NotPositiveDefiniteError, ParameterRangeError
from .linalg import SpdMatrix, hermitian_part, real_power, spd

SEED_MASK = (1 << 64) - 1


class Structure(str, enum.Enum):
    GENERIC = "GENERIC"
    COMMUTING = "COMMUTING"
    FURUTA_PREMISE = "FURUTA_PREMISE"
    ILL_CONDITIONED = "ILL_CONDITIONED"


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    condition_target: float = 10.0
    seed: int = 0
    structure: Structure = Structure.GENERIC
    t: float | None = None  # FURUTA_PREMISE only

    def __post_init__(self):
        object.__setattr__(self, "structure", Structure(self.structure))
        object.__setattr__(self, "seed", int(self.seed) & SEED_MASK)
        if int(self.n) < 1:
            raise ValueError(f"n={self.n} must be positive")
        if not float(self.condition_target) >= 1:
            raise ValueError(f"condition_target={self.condition_target} must be >= 1")
        if self.structure is Structure.FURUTA_PREMISE:
            if self.t is None or not 0 < self.t < 1:
                raise ParameterRangeError("T_OUT_OF_RANGE", "FURUTA_PREMISE needs t in (0, 1)")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & SEED_MASK))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Orthonormalized complex Gaussian; each column's first nonzero entry real positive."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q = np.zeros_like(z)
    for j in range(n):
        v = z[:, j].copy()
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for i in range(j):
                v -= np.vdot(q[:, i], v) * q[:, i]
        q[:, j] = v / np.linalg.norm(v)
    for j in range(n):
        i = np.flatnonzero(np.abs(q[:, j]) > 0)[0]
        lead = q[i, j]
        q[:, j] *= np.conj(lead) / abs(lead)
        q[i, j] = abs(lead)
    return q


def log_uniform_spectrum(rng: np.random.Generator, n: int, kappa: float,
                         structure: Structure = Structure.GENERIC) -> np.ndarray:
    """Eigenvalues in [kappa^{-1/2}, kappa^{1/2}].

    For n >= 2 both endpoints are always present, so the achieved condition
    number equals the target. ILL_CONDITIONED piles the interior eigenvalues
    into the bottom tenth of the log-range.
    """
    half = 0.5 * np.log(kappa)
    u = rng.uniform(0.0, 1.0, n)
    if structure is Structure.ILL_CONDITIONED:
        u = 0.1 * u
    if n >= 2:
        u[0], u[1] = 1.0, 0.0
    return np.exp(-half + 2.0 * half * u)


def _assemble(q: np.ndarray, values: np.ndarray) -> SpdMatrix:
    return SpdMatrix(hermitian_part((q * values) @ q.conj().T))


def random_spd_list(config: SamplerConfig, m: int) -> list[SpdMatrix]:
    """``m`` matrices from one stream; COMMUTING shares a single eigenbasis."""
    rng = make_rng(config.seed)
    shared = random_unitary(rng, config.n) if config.structure is Structure.COMMUTING else None
    out = []
    for _ in range(m):
        q = shared if shared is not None else random_unitary(rng, config.n)
        out.append(_assemble(q, log_uniform_spectrum(rng, config.n, config.condition_target,
                                                     config.structure)))
    return out


def random_spd(config: SamplerConfig) -> SpdMatrix:
    return random_spd_list(config, 1)[0]


def random_pair(config: SamplerConfig) -> tuple[SpdMatrix, SpdMatrix]:
    a, b = random_spd_list(config, 2)
    return a, b


def random_commuting_pair(config: SamplerConfig) -> tuple[SpdMatrix, SpdMatrix]:
    return random_pair(replace(config, structure=Structure.COMMUTING))


def furuta_base_condition(kappa: float, t: float) -> float:
    """Condition of A giving B = (A^{t-2} - E)^{1/t} a condition of about ``kappa``."""
    return float(kappa) ** (t / (2.0 - t))


def random_furuta_pair(config: SamplerConfig, t: float, *, tight: bool = False,
                       commuting: bool = False, max_retries: int = 8
                       ) -> tuple[SpdMatrix, SpdMatrix]:
    """A and B = (A^{t-2} - E)^{1/t} with E PSD and lambda_max(E) < lambda_min(A^{t-2}).

    By Weyl's inequality the gap A^{t-2} - E is positive definite, so
    B^t <= A^{t-2} holds by construction. ``tight`` takes E = 0;
    ``commuting`` puts E in the eigenbasis of A. The condition target is
    applied to B (A is drawn at :func:`furuta_base_condition`).
    """
    t = float(t)
    if not 0 < t < 1:
        raise ParameterRangeError("T_OUT_OF_RANGE", f"t={t} not in (0, 1)")
    rng = make_rng(config.seed)
    n = config.n
    qa = random_unitary(rng, n)
    a = _assemble(qa, log_uniform_spectrum(rng, n, furuta_base_condition(config.condition_target, t)))
    top = real_power(a, t - 2.0)
    qe = qa if commuting else random_unitary(rng, n)
    e_spec = rng.uniform(0.0, 1.0, n)
    # (1 - theta)^{-1/t} <= 2 keeps cond(B) within twice the target
    theta = 0.0 if tight else rng.uniform(0.0, 1.0 - 2.0 ** (-t))
    floor = top.min_eig
    for _ in range(max_retries):
        e = (qe * (e_spec / max(e_spec.max(), 1e-300) * theta * floor)) @ qe.conj().T
        try:
            gap = spd(top.matrix - e)
        except NotPositiveDefiniteError:
            gap = None
        if gap is not None and gap.min_eig >= 1e-6 * floor:
            return a, real_power(gap, 1.0 / t)
        theta /= 2
    raise ConstructionFailedError("could not keep A^{t-2} - E positive definite")
