"""Numerical checks of trace, norm, majorization and determinant inequalities.

Each ``check_*`` function evaluates both sides of one inequality
``lhs <= rhs`` on concrete matrices and returns a :class:`CheckResult`.
Tolerances follow one policy:

* plain comparisons: ``(1e-9 + 1e-9 * (kappa(A) + kappa(B))) * max(|lhs|, |rhs|, 1)``
* determinant comparisons (log domain): ``1e-9 * n * (1 + |lhs| + |rhs|)``
* majorization: the plain base slack ``1e-9 * (1 + kappa(A) + kappa(B))`` used
  both as absolute and relative slack on log-prefix sums.

A result is VIOLATED when ``lhs > rhs + tol``, EQUALITY_WITHIN_TOL when
``|lhs - rhs| <= tol`` and HOLDS otherwise. Majorization checks also turn
VIOLATED when the full-product equality fails.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParameterRangeError, PremiseViolatedError
from .linalg import SpdMatrix, complex_power, condition_number, real_power, spd
from .means import (
    geometric_mean,
    geometric_mean_t,
    heron_naive,
    power_mean,
    q_mean,
    sharp,
)
from .spectral import (
    INF,
    MajorizationKind,
    MajorizationReport,
    Verdict,
    eigenvalues,
    log_det,
    log_majorization,
    parse_p,
    schatten_norm,
    singular_values,
    trace_product,
)

BASE_TOL = 1e-9
STRIP = (0.25, 0.75)


@dataclass(frozen=True)
class TrialSpec:
    """Parameters of one check execution. Unused fields stay ``None``."""

    n: int | None = None
    t: float | None = None
    s: float | None = None
    r: float | None = None
    p: float | None = None
    z: complex | None = None
    m: int | None = None
    seed: int | None = None
    condition_target: float | None = None
    structure: str | None = None

    def __post_init__(self):
        if self.z is not None:
            object.__setattr__(self, "z", complex(self.z))

    def to_dict(self) -> dict:
        d = asdict(self)
        z = d.pop("z")
        d["z_re"] = None if z is None else z.real
        d["z_im"] = None if z is None else z.imag
        if d["p"] == INF:
            d["p"] = "INF"
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrialSpec":
        d = dict(d)
        z_re, z_im = d.pop("z_re", None), d.pop("z_im", None)
        if z_re is not None:
            d["z"] = complex(z_re, z_im or 0.0)
        if d.get("p") == "INF":
            d["p"] = INF
        known = cls.__dataclass_fields__
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass
class CheckResult:
    check_id: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    verdict: Verdict
    spec: TrialSpec = field(default_factory=TrialSpec)
    gating: bool = True
    report: MajorizationReport | None = None
    detail: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.verdict is Verdict.VIOLATED


def classify(lhs: float, rhs: float, tol: float) -> Verdict:
    diff = lhs - rhs
    if abs(diff) <= tol:
        return Verdict.EQUALITY_WITHIN_TOL
    if diff > tol:
        return Verdict.VIOLATED
    return Verdict.HOLDS


def _kappa(*mats: SpdMatrix) -> float:
    return sum(condition_number(m) for m in mats)


def plain_tolerance(lhs: float, rhs: float, mats: Sequence[SpdMatrix], scale: float | None = None) -> float:
    if scale is None:
        scale = max(abs(lhs), abs(rhs), 1.0)
    return (BASE_TOL + BASE_TOL * _kappa(*mats)) * scale


def log_tolerance(lhs: float, rhs: float, n: int) -> float:
    return BASE_TOL * n * (1.0 + abs(lhs) + abs(rhs))


def _result(check_id, lhs, rhs, tol, spec, *, gating=True, detail=None) -> CheckResult:
    lhs, rhs = float(lhs), float(rhs)
    return CheckResult(check_id, lhs, rhs, rhs - lhs, float(tol), classify(lhs, rhs, tol),
                       spec or TrialSpec(), gating, None, detail or {})


def _plain(check_id, lhs, rhs, mats, spec, **kw) -> CheckResult:
    return _result(check_id, lhs, rhs, plain_tolerance(lhs, rhs, mats), spec, **kw)


def _spec(spec: TrialSpec | None, **given) -> TrialSpec:
    """Fill in any parameter the caller's spec leaves unset."""
    base = asdict(spec) if spec is not None else {}
    for key, value in given.items():
        if base.get(key) is None:
            base[key] = value
    return TrialSpec(**base)


def majorization_result(check_id: str, report: MajorizationReport, spec: TrialSpec | None,
                        *, gating: bool = True, detail: dict | None = None) -> CheckResult:
    """Collapse a prefix report into one lhs/rhs pair.

    The reported prefix is the worst violation if there is one, else the
    prefix with the largest gap; a failed full-product equality reports the
    last prefix and forces VIOLATED.
    """
    diffs, tols = report.differences, report.tolerances
    n = len(diffs)
    if report.kind is MajorizationKind.LOG and not report.final_equality:
        k = n - 1
    else:
        candidates = range(n - 1) if (report.kind is MajorizationKind.LOG and n > 1) else range(n)
        candidates = list(candidates)
        excess = [diffs[i] - tols[i] for i in candidates]
        if max(excess) > 0:
            k = candidates[int(np.argmax(excess))]
        else:
            k = candidates[int(np.argmax([abs(diffs[i]) for i in candidates]))]
    lhs, rhs = float(report.left_prefix[k]), float(report.right_prefix[k])
    info = {"prefix": k + 1, "majorization": report.to_dict()}
    info.update(detail or {})
    return CheckResult(check_id, lhs, rhs, rhs - lhs, float(tols[k]), report.verdict,
                       spec or TrialSpec(), gating, report, info)


def _maj_slack(*mats: SpdMatrix) -> float:
    return BASE_TOL * (1.0 + _kappa(*mats))


def _unit(t: float) -> float:
    t = float(t)
    if not 0 <= t <= 1:
        raise ParameterRangeError("T_OUT_OF_RANGE", f"t={t} not in [0, 1]")
    return t


# ---------------------------------------------------------------- norm checks

def check_pnorm_heron(a: SpdMatrix, b: SpdMatrix, t: float, r: float, p,
                      spec: TrialSpec | None = None) -> CheckResult:
    """||A+B+r(A#_tB + A#_{1-t}B)||_p <= ||A+B+r(A^tB^{1-t} + A^{1-t}B^t)||_p.

    Proved for p in {1, 2}; other p (notably inf) are reported with
    ``gating=False``.
    """
    t = _unit(t)
    r = float(r)
    if r < 0:
        raise ParameterRangeError("R_OUT_OF_RANGE", f"r={r} must be >= 0")
    p_value = parse_p(p)
    s = a.matrix + b.matrix
    left = s + r * (geometric_mean_t(a, b, t).matrix + geometric_mean_t(a, b, 1 - t).matrix)
    right = s + r * (real_power(a, t).matrix @ real_power(b, 1 - t).matrix
                     + real_power(a, 1 - t).matrix @ real_power(b, t).matrix)
    lhs, rhs = schatten_norm(left, p_value), schatten_norm(right, p_value)
    return _plain("pnorm_heron", lhs, rhs, (a, b),
                  _spec(spec, n=a.n, t=t, r=r, p=p_value), gating=p_value in (1.0, 2.0))


def check_heron_weighted(a: SpdMatrix, b: SpdMatrix, s: float, t: float, p,
                         spec: TrialSpec | None = None) -> CheckResult:
    """||(1-s)(A+B)/2 + s(A#_tB + A#_{1-t}B)/2||_p <= ||heron_naive(A, B, s, t)||_p.

    At t = 1/2 the left side is the Kubo-Ando Heron mean.
    """
    t = _unit(t)
    p_value = parse_p(p)
    left = ((1 - s) * (a.matrix + b.matrix) / 2
            + s * (geometric_mean_t(a, b, t).matrix + geometric_mean_t(a, b, 1 - t).matrix) / 2)
    lhs = schatten_norm(left, p_value)
    rhs = schatten_norm(heron_naive(a, b, s, t), p_value)
    return _plain("heron_weighted", lhs, rhs, (a, b),
                  _spec(spec, n=a.n, s=float(s), t=t, p=p_value), gating=p_value in (1.0, 2.0))


def check_qnorm_infinity(As: Sequence[SpdMatrix], t: float,
                         spec: TrialSpec | None = None) -> CheckResult:
    """||P_t(A_1..A_m)||_inf <= ||Q_t(A_1..A_m)||_inf."""
    pm = power_mean(list(As), t)
    qm = q_mean(list(As), t)
    return _plain("qnorm_infinity", pm.max_eig, qm.max_eig, As,
                  _spec(spec, n=As[0].n, t=float(t), m=len(As), p=INF))


# -------------------------------------------------------- majorization checks

def _log_maj_sides(a: SpdMatrix, b: SpdMatrix, t: float, right_power: float):
    root = real_power(a, 0.5).matrix
    left = eigenvalues(spd(root @ geometric_mean_t(a, b, t).matrix @ root))
    outer = real_power(a, right_power).matrix
    right = eigenvalues(spd(outer @ real_power(b, t).matrix @ outer))
    return left, right


def check_log_maj_proposition(a: SpdMatrix, b: SpdMatrix, t: float,
                              spec: TrialSpec | None = None) -> CheckResult:
    """lambda(A^{1/2}(A#_tB)A^{1/2}) log-majorized by lambda(A^{1-t/2} B^t A^{1-t/2})."""
    t = _unit(t)
    left, right = _log_maj_sides(a, b, t, 1 - t / 2)
    slack = _maj_slack(a, b)
    report = log_majorization(left, right, MajorizationKind.LOG, abs_tol=slack, rel_tol=slack)
    return majorization_result("log_maj_proposition", report, _spec(spec, n=a.n, t=t))


def check_log_maj_intro_variant(a: SpdMatrix, b: SpdMatrix, t: float,
                                spec: TrialSpec | None = None) -> CheckResult:
    """Same left side against A^{1-t} B^t A^{1-t}.

    The determinants of the two sides differ by det(A)^t, so the
    full-product leg fails whenever det(A) != 1 and t > 0.
    """
    t = _unit(t)
    left, right = _log_maj_sides(a, b, t, 1 - t)
    slack = _maj_slack(a, b)
    report = log_majorization(left, right, MajorizationKind.LOG, abs_tol=slack, rel_tol=slack)
    return majorization_result("log_maj_intro_variant", report, _spec(spec, n=a.n, t=t),
                               gating=False, detail={"det_a": math.exp(log_det(a))})


# --------------------------------------------------------------- trace checks

def check_trace_sharp(a: SpdMatrix, b: SpdMatrix, t: float,
                      spec: TrialSpec | None = None) -> CheckResult:
    """Tr(A (A#_tB)) <= Tr(A^{2-t} B^t)."""
    t = _unit(t)
    lhs = trace_product([a, geometric_mean_t(a, b, t)]).real
    rhs = trace_product([real_power(a, 2 - t), real_power(b, t)]).real
    return _plain("trace_sharp", lhs, rhs, (a, b), _spec(spec, n=a.n, t=t))


def check_strip_trace(x: SpdMatrix, y: SpdMatrix, z: complex,
                      spec: TrialSpec | None = None) -> CheckResult:
    """|Tr(X^{1/2} Y^z X^{1/2} Y^{1-z})| <= Tr(XY) for 1/4 <= Re z <= 3/4."""
    z = complex(z)
    if not STRIP[0] - 1e-12 <= z.real <= STRIP[1] + 1e-12:
        raise ParameterRangeError("Z_OUT_OF_STRIP", f"Re(z)={z.real} outside [1/4, 3/4]")
    root = real_power(x, 0.5).matrix
    tr = trace_product([root, complex_power(y, z), root, complex_power(y, 1 - z)])
    lhs = abs(tr.value)
    rhs = trace_product([x, y]).real
    return _plain("strip_trace", lhs, rhs, (x, y), _spec(spec, n=x.n, z=z))


def check_heinz_sharp_trace(a: SpdMatrix, b: SpdMatrix, t: float,
                            spec: TrialSpec | None = None) -> CheckResult:
    """Tr((A#_tB)(A#_{1-t}B)) <= Tr(AB)."""
    t = _unit(t)
    lhs = trace_product([geometric_mean_t(a, b, t), geometric_mean_t(a, b, 1 - t)]).real
    rhs = trace_product([a, b]).real
    return _plain("heinz_sharp_trace", lhs, rhs, (a, b), _spec(spec, n=a.n, t=t))


def check_sharp_square_traces(a: SpdMatrix, b: SpdMatrix, t: float,
                              spec: TrialSpec | None = None) -> CheckResult:
    """Tr((A#_tB)^2 + (A#_{1-t}B)^2) <= Tr(A^{2t}B^{2(1-t)} + B^{2t}A^{2(1-t)})."""
    t = _unit(t)
    g, h = geometric_mean_t(a, b, t), geometric_mean_t(a, b, 1 - t)
    lhs = trace_product([g, g]).real + trace_product([h, h]).real
    rhs = (trace_product([real_power(a, 2 * t), real_power(b, 2 - 2 * t)]).real
           + trace_product([real_power(b, 2 * t), real_power(a, 2 - 2 * t)]).real)
    return _plain("sharp_square_traces", lhs, rhs, (a, b), _spec(spec, n=a.n, t=t))


def check_cross_traces(a: SpdMatrix, b: SpdMatrix, t: float,
                       spec: TrialSpec | None = None) -> CheckResult:
    """Tr((A+B)(A#_tB + A#_{1-t}B)) <= Tr(A^{1+t}B^{1-t} + A^{2-t}B^t + A^tB^{2-t} + A^{1-t}B^{1+t})."""
    t = _unit(t)
    g = geometric_mean_t(a, b, t).matrix + geometric_mean_t(a, b, 1 - t).matrix
    lhs = trace_product([a.matrix + b.matrix, g]).real
    pa = lambda e: real_power(a, e)  # noqa: E731
    pb = lambda e: real_power(b, e)  # noqa: E731
    rhs = sum(trace_product(pair).real for pair in (
        (pa(1 + t), pb(1 - t)), (pa(2 - t), pb(t)), (pa(t), pb(2 - t)), (pa(1 - t), pb(1 + t))))
    return _plain("cross_traces", lhs, rhs, (a, b), _spec(spec, n=a.n, t=t))


def check_furuta_implication(a: SpdMatrix, b: SpdMatrix, t: float,
                             spec: TrialSpec | None = None) -> CheckResult:
    """B^t <= A^{t-2} implies (A^{-1/2} B A^{-1/2})^t <= A^{-2}.

    lhs is lambda_max((A^{-1/2}BA^{-1/2})^t - A^{-2}) and rhs is 0; the
    tolerance is scaled by ||A^{-2}||.

    Raises:
        PremiseViolatedError: the pair does not satisfy B^t <= A^{t-2}.
    """
    t = _unit(t)
    cap = real_power(a, t - 2.0)
    premise = float(eigenvalues(real_power(b, t).matrix - cap.matrix)[0])
    premise_tol = plain_tolerance(premise, 0.0, (a, b), scale=max(cap.max_eig, 1.0))
    if premise > premise_tol:
        raise PremiseViolatedError(f"B^t - A^(t-2) has eigenvalue {premise:.3e} > {premise_tol:.3e}")
    iroot = real_power(a, -0.5).matrix
    m = spd(iroot @ b.matrix @ iroot)
    inv_sq = real_power(a, -2.0)
    lhs = float(eigenvalues(real_power(m, t).matrix - inv_sq.matrix)[0])
    tol = plain_tolerance(lhs, 0.0, (a, b), scale=max(abs(lhs), inv_sq.max_eig, 1.0))
    return _result("furuta_implication", lhs, 0.0, tol, _spec(spec, n=a.n, t=t),
                   detail={"premise_max_eig": premise})


# ---------------------------------------------------------- determinant checks

def check_det_audenaert(a: SpdMatrix, b: SpdMatrix, t: float,
                        spec: TrialSpec | None = None) -> CheckResult:
    """log det(I + A#_tB) <= log det(I + A^{1-t}B^t).

    The right side is evaluated as det(I + B^{t/2} A^{1-t} B^{t/2}), which
    has the same characteristic polynomial and is Hermitian.
    """
    t = _unit(t)
    eye = np.eye(a.n)
    lhs = log_det(spd(eye + geometric_mean_t(a, b, t).matrix))
    half = real_power(b, t / 2).matrix
    rhs = log_det(spd(eye + half @ real_power(a, 1 - t).matrix @ half))
    return _result("det_audenaert", lhs, rhs, log_tolerance(lhs, rhs, a.n), _spec(spec, n=a.n, t=t))


def check_det_power_mean(a: SpdMatrix, b: SpdMatrix, t: float,
                         spec: TrialSpec | None = None) -> CheckResult:
    """log det P_t(A, B) <= log det Q_t(A, B).

    ``detail`` carries the intermediate comparison between
    lambda(I + (A^{-1/2}BA^{-1/2})^t) and lambda(I + A^{-t/2}B^tA^{-t/2})
    (prefix products only: the full products of I + X and I + Y need not
    agree), whether the reverse determinant inequality holds, and at t = 1/2
    the Heron form det(A+B+2A#B) vs det(A+B+A^{1/2}B^{1/2}+B^{1/2}A^{1/2}).
    """
    t = float(t)
    if not 0 < t <= 1:
        raise ParameterRangeError("T_OUT_OF_RANGE", f"t={t} not in (0, 1]")
    pm = power_mean([a, b], t)
    qm = q_mean([a, b], t)
    lhs, rhs = log_det(pm), log_det(qm)
    tol = log_tolerance(lhs, rhs, a.n)

    eye = np.eye(a.n)
    iroot = real_power(a, -0.5).matrix
    m = spd(iroot @ b.matrix @ iroot)
    ia = real_power(a, -t / 2).matrix
    inner = log_majorization(
        eigenvalues(spd(eye + real_power(m, t).matrix)),
        eigenvalues(spd(eye + ia @ real_power(b, t).matrix @ ia)),
        MajorizationKind.WEAK_LOG, abs_tol=_maj_slack(a, b), rel_tol=_maj_slack(a, b))
    detail = {
        "inner_weak_log_majorization": inner.to_dict(),
        "reverse_holds": bool(rhs <= lhs + tol),
    }
    if t == 0.5:
        ra, rb = real_power(a, 0.5).matrix, real_power(b, 0.5).matrix
        s = a.matrix + b.matrix
        detail["heron_log_det_lhs"] = log_det(spd(s + 2 * geometric_mean(a, b).matrix))
        detail["heron_log_det_rhs"] = log_det(spd(s + ra @ rb + rb @ ra))
    return _result("det_power_mean", lhs, rhs, tol, _spec(spec, n=a.n, t=t), detail=detail)


# ---------------------------------------------------- counterexample and open

COUNTEREXAMPLE_X = np.eye(2)
COUNTEREXAMPLE_Y = np.array([[0.0, 1.0], [1.0, 0.0]])
PRINTED_S_VALUES = {"left": (1.0, 2.0), "right": (math.sqrt(2.0), math.sqrt(2.0))}


def reproduce_counterexample(z_diag=(1.0, 4.0), tol: float = 1e-12) -> CheckResult:
    """Weak majorization s(Z^{1/2} X Z^{1/2}) < s(Z^{1/2} Y Z^{1/2}) with X = I, Y = swap.

    s(X) = s(Y), yet for Z = diag(1, 4) the conclusion fails at the first
    prefix (4 > 2). VIOLATED here means the conjectured implication is refuted.
    """
    z = np.diag(np.asarray(z_diag, dtype=float))
    zr = np.sqrt(z)
    left = singular_values(zr @ COUNTEREXAMPLE_X @ zr)
    right = singular_values(zr @ COUNTEREXAMPLE_Y @ zr)
    report = log_majorization(left, right, MajorizationKind.WEAK, abs_tol=tol, rel_tol=0.0)
    y_eigs = np.linalg.eigvalsh(COUNTEREXAMPLE_Y)[::-1]
    detail = {
        "z_diag": [float(v) for v in z_diag],
        "s_left": left.tolist(),
        "s_right": right.tolist(),
        "s_x": singular_values(COUNTEREXAMPLE_X).tolist(),
        "s_y": singular_values(COUNTEREXAMPLE_Y).tolist(),
        "printed_s_left": list(PRINTED_S_VALUES["left"]),
        "printed_s_right": list(PRINTED_S_VALUES["right"]),
        "y_eigenvalues": y_eigs.tolist(),
        "y_positive_semidefinite": bool(y_eigs[-1] >= 0),
        "x_le_z": bool(np.linalg.eigvalsh(z - COUNTEREXAMPLE_X)[0] >= -tol),
        "y_le_z": bool(np.linalg.eigvalsh(z - COUNTEREXAMPLE_Y)[0] >= -tol),
    }
    return majorization_result("counterexample", report, TrialSpec(n=2), gating=False, detail=detail)


def counterexample_readings() -> list[CheckResult]:
    """The printed Z = diag(1,4), the Z = diag(1,2) matching the printed values, and Z = I."""
    return [reproduce_counterexample(z) for z in ((1.0, 4.0), (1.0, 2.0), (1.0, 1.0))]


def _open_trace_sides(a: SpdMatrix, b: SpdMatrix, t: float):
    lhs = trace_product([geometric_mean_t(a, b, t), sharp(b, a, t)]).real
    rhs = trace_product([real_power(a, t), real_power(b, t),
                         real_power(a, 1 - t), real_power(b, 1 - t)]).real
    return lhs, rhs


def explore_open_th122(a: SpdMatrix, b: SpdMatrix, t: float,
                       spec: TrialSpec | None = None) -> CheckResult:
    """Tr((A#_tB)(B#_tA)) <= Re Tr(A^t B^t A^{1-t} B^{1-t}); truth unknown, never gating."""
    t = _unit(t)
    lhs, rhs = _open_trace_sides(a, b, t)
    trace_ab = trace_product([a, b]).real
    res = _plain("open_th122", lhs, rhs, (a, b), _spec(spec, n=a.n, t=t), gating=False)
    bound_tol = plain_tolerance(max(lhs, rhs), trace_ab, (a, b))
    res.detail.update({
        "trace_ab": trace_ab,
        "lhs_bounded": bool(lhs <= trace_ab + bound_tol),
        "rhs_bounded": bool(rhs <= trace_ab + bound_tol),
    })
    return res


def check_open_trace_bounds(a: SpdMatrix, b: SpdMatrix, t: float,
                       spec: TrialSpec | None = None) -> CheckResult:
    """Both sides of the open trace inequality are at most Tr(AB)."""
    t = _unit(t)
    lhs, rhs = _open_trace_sides(a, b, t)
    return _plain("open_trace_bounds", max(lhs, rhs), trace_product([a, b]).real, (a, b),
                  _spec(spec, n=a.n, t=t), detail={"open_lhs": lhs, "open_rhs": rhs})
