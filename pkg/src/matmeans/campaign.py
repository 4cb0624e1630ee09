"""Seeded campaigns over the check registry.

A campaign enumerates cells (check x dimension x condition target x
structure x the check's own parameter axes) and runs ``trials_per_cell``
trials in each. Trial ``k`` of cell ``c`` of check ``id`` draws its matrices
from a 64-bit seed derived from ``(master_seed, crc32(id), c, k)``, so any
record can be replayed from its seed and results do not depend on how many
workers ran the campaign.
"""

from __future__ import annotations

import itertools
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import verifier as V
from .errors import ConfigInvalidError, MatMeansError
from .linalg import SpdMatrix
from .matio import format_real, format_witness, read_witness
from .sampler import (
    SamplerConfig,
    Structure,
    random_furuta_pair,
    random_spd,
    random_spd_list,
)
from .spectral import INF, Verdict, parse_p

EQUAL = "EQUAL"
STRUCTURES = ("GENERIC", "COMMUTING", EQUAL, "ILL_CONDITIONED")

COUNTEREXAMPLE_Z = (1.0, 4.0)

DEFAULT_T_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
DEFAULT_Z_GRID = tuple(complex(round(0.25 + 0.05 * i, 2), im)
                       for i in range(11) for im in (0.0, 0.5, -0.5, 2.0, -2.0, 8.0, -8.0))

# ------------------------------------------------------------------ registry


@dataclass(frozen=True)
class CheckDef:
    check_id: str
    run: Callable[[Sequence[SpdMatrix], V.TrialSpec], V.CheckResult]
    axes: tuple[str, ...]
    proved: bool = True
    sampler: str = "pair"
    equality_structures: frozenset = frozenset({"COMMUTING", EQUAL})
    t_open_left: bool = False
    t_open_right: bool = False


def _pair_check(fn):
    return lambda mats, spec: fn(mats[0], mats[1], spec.t, spec=spec)


REGISTRY: dict[str, CheckDef] = {c.check_id: c for c in (
    CheckDef("pnorm_heron",
             lambda m, s: V.check_pnorm_heron(m[0], m[1], s.t, s.r, s.p, spec=s), ("t", "r", "p")),
    CheckDef("heron_weighted",
             lambda m, s: V.check_heron_weighted(m[0], m[1], s.s, s.t, s.p, spec=s), ("s", "t", "p")),
    CheckDef("log_maj_proposition", _pair_check(V.check_log_maj_proposition), ("t",)),
    CheckDef("trace_sharp", _pair_check(V.check_trace_sharp), ("t",)),
    CheckDef("strip_trace",
             lambda m, s: V.check_strip_trace(m[0], m[1], s.z, spec=s), ("z",)),
    CheckDef("heinz_sharp_trace", _pair_check(V.check_heinz_sharp_trace), ("t",)),
    CheckDef("sharp_square_traces", _pair_check(V.check_sharp_square_traces), ("t",)),
    CheckDef("cross_traces", _pair_check(V.check_cross_traces), ("t",)),
    CheckDef("furuta_implication", _pair_check(V.check_furuta_implication), ("t",),
             sampler="furuta", equality_structures=frozenset({EQUAL}),
             t_open_left=True, t_open_right=True),
    CheckDef("det_audenaert", _pair_check(V.check_det_audenaert), ("t",)),
    CheckDef("det_power_mean", _pair_check(V.check_det_power_mean), ("t",), t_open_left=True),
    CheckDef("qnorm_infinity",
             lambda m, s: V.check_qnorm_infinity(m, s.t, spec=s), ("t", "m"),
             sampler="list", t_open_left=True),
    CheckDef("open_trace_bounds", _pair_check(V.check_open_trace_bounds), ("t",)),
    CheckDef("open_th122", _pair_check(V.explore_open_th122), ("t",), proved=False),
    CheckDef("log_maj_intro_variant", _pair_check(V.check_log_maj_intro_variant), ("t",),
             proved=False, equality_structures=frozenset()),
    CheckDef("counterexample",
             lambda m, s: V.reproduce_counterexample(np.diag(m[0].matrix).real), (),
             proved=False, sampler="fixed", equality_structures=frozenset()),
)}

PROVED_CHECKS = tuple(c.check_id for c in REGISTRY.values() if c.proved)
OPEN_CHECKS = ("open_th122", "open_trace_bounds")


def draw_matrices(check: CheckDef, spec: V.TrialSpec) -> list[SpdMatrix]:
    """Matrices for one trial, fully determined by ``spec``."""
    if check.sampler == "fixed":
        return [SpdMatrix(np.diag(COUNTEREXAMPLE_Z))]
    structure = spec.structure or "GENERIC"
    base = Structure.ILL_CONDITIONED if structure == "ILL_CONDITIONED" else Structure.GENERIC
    cfg = SamplerConfig(spec.n, spec.condition_target or 10.0, spec.seed or 0, base)
    if check.sampler == "furuta":
        return list(random_furuta_pair(cfg, spec.t, tight=structure == EQUAL,
                                       commuting=structure == "COMMUTING"))
    count = spec.m if check.sampler == "list" else 2
    if structure == EQUAL:
        return [random_spd(cfg)] * count
    if structure == "COMMUTING":
        cfg = replace(cfg, structure=Structure.COMMUTING)
    return random_spd_list(cfg, count)


def matrix_names(check: CheckDef, count: int) -> list[str]:
    if check.sampler == "list":
        return [f"A{i + 1}" for i in range(count)]
    if check.sampler == "fixed":
        return ["Z"]
    return ["A", "B"]


# -------------------------------------------------------------------- config


@dataclass
class CampaignConfig:
    checks: list[str] = field(default_factory=lambda: list(PROVED_CHECKS))
    dims: list[int] = field(default_factory=lambda: [2, 3, 5, 8])
    t_grid: list[float] = field(default_factory=lambda: list(DEFAULT_T_GRID))
    r_grid: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0, 3.0])
    s_grid: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0])
    p_set: list[float] = field(default_factory=lambda: [1.0, 2.0, INF])
    z_grid: list[complex] = field(default_factory=lambda: list(DEFAULT_Z_GRID))
    m_set: list[int] = field(default_factory=lambda: [2, 3])
    structures: list[str] = field(default_factory=lambda: ["GENERIC", "COMMUTING", EQUAL])
    trials_per_cell: int = 5
    master_seed: int = 20160112
    condition_targets: list[float] = field(default_factory=lambda: [10.0, 1e3, 1e6])
    output_path: str | None = None
    workers: int = 1

    def validate(self) -> "CampaignConfig":
        for name in ("checks", "dims", "t_grid", "r_grid", "s_grid", "p_set", "z_grid",
                     "m_set", "structures", "condition_targets"):
            if not getattr(self, name):
                raise ConfigInvalidError(f"{name} must be non-empty")
        unknown = [c for c in self.checks if c not in REGISTRY]
        if unknown:
            raise ConfigInvalidError(f"unknown checks: {unknown}; known: {sorted(REGISTRY)}")
        bad = [s for s in self.structures if s not in STRUCTURES]
        if bad:
            raise ConfigInvalidError(f"unknown structures {bad}; choose from {STRUCTURES}")
        if any(int(n) < 1 or int(n) > 16 for n in self.dims):
            raise ConfigInvalidError("dims must lie in [1, 16]")
        if any(not 0 <= t <= 1 for t in self.t_grid):
            raise ConfigInvalidError("t_grid values must lie in [0, 1]")
        if any(not 0 <= s <= 1 for s in self.s_grid):
            raise ConfigInvalidError("s_grid values must lie in [0, 1]")
        if any(r < 0 for r in self.r_grid):
            raise ConfigInvalidError("r_grid values must be >= 0")
        try:
            self.p_set = [parse_p(p) for p in self.p_set]
        except MatMeansError as exc:
            raise ConfigInvalidError(str(exc)) from exc
        if any(not V.STRIP[0] <= complex(z).real <= V.STRIP[1] for z in self.z_grid):
            raise ConfigInvalidError("every z must satisfy 1/4 <= Re z <= 3/4")
        if any(int(m) < 2 for m in self.m_set):
            raise ConfigInvalidError("m_set values must be >= 2")
        if any(k < 1 for k in self.condition_targets):
            raise ConfigInvalidError("condition targets must be >= 1")
        if int(self.trials_per_cell) < 1:
            raise ConfigInvalidError("trials_per_cell must be >= 1")
        if int(self.workers) < 1:
            raise ConfigInvalidError("workers must be >= 1")
        self.master_seed = int(self.master_seed) & ((1 << 64) - 1)
        return self

    @classmethod
    def from_mapping(cls, data: dict) -> "CampaignConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigInvalidError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


# --------------------------------------------------------------------- cells


def _axis_values(check: CheckDef, axis: str, cfg: CampaignConfig) -> list:
    if axis == "t":
        ts = sorted(set(float(t) for t in cfg.t_grid))
        if check.t_open_left:
            ts = [t for t in ts if t > 0]
        if check.t_open_right:
            ts = [t for t in ts if t < 1]
        return ts
    return {
        "r": [float(r) for r in cfg.r_grid],
        "s": [float(s) for s in cfg.s_grid],
        "p": list(cfg.p_set),
        "z": [complex(z) for z in cfg.z_grid],
        "m": [int(m) for m in cfg.m_set],
    }[axis]


def enumerate_cells(check_id: str, cfg: CampaignConfig) -> list[V.TrialSpec]:
    """Cell specs (seed unset) in canonical order."""
    check = REGISTRY[check_id]
    if check.sampler == "fixed":
        return [V.TrialSpec(n=len(COUNTEREXAMPLE_Z), structure="FIXED")]
    axes = [_axis_values(check, a, cfg) for a in check.axes]
    cells = []
    for n, kappa, structure in itertools.product(cfg.dims, cfg.condition_targets, cfg.structures):
        for combo in itertools.product(*axes):
            params = dict(zip(check.axes, combo))
            cells.append(V.TrialSpec(n=int(n), condition_target=float(kappa),
                                     structure=structure, **params))
    return cells


def trial_seed(master_seed: int, check_id: str, cell: int, trial: int) -> int:
    seq = np.random.SeedSequence(int(master_seed),
                                 spawn_key=(zlib.crc32(check_id.encode()), int(cell), int(trial)))
    return int(seq.generate_state(1, np.uint64)[0])


# ------------------------------------------------------------------- records

RECORD_FIELDS = ("check_id", "cell", "trial", "structure", "n", "m", "condition_target",
                 "t", "s", "r", "p", "z_re", "z_im", "seed", "lhs", "rhs", "margin",
                 "tolerance", "verdict", "gating", "expect_equality", "error")


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        if v == INF:
            return '"INF"'
        return format_real(v)
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_record(rec: dict) -> str:
    """One JSON object per line, doubles printed with 17 significant digits."""
    keys = list(RECORD_FIELDS) + (["witness_path"] if rec.get("witness_path") else [])
    return "{" + ", ".join(f'"{k}": {_json_value(rec.get(k))}' for k in keys) + "}"


def run_trial(check_id: str, cell: int, trial: int, spec: V.TrialSpec) -> tuple[dict, dict | None]:
    """Execute one trial; also return its matrices when the outcome needs a witness."""
    check = REGISTRY[check_id]
    rec = {"check_id": check_id, "cell": cell, "trial": trial, **spec.to_dict(),
           "expect_equality": spec.structure in check.equality_structures,
           "gating": check.proved}
    for key in ("lhs", "rhs", "margin", "tolerance", "verdict", "error"):
        rec.setdefault(key, None)
    mats = None
    try:
        mats = draw_matrices(check, spec)
        res = check.run(mats, spec)
        rec.update(lhs=res.lhs, rhs=res.rhs, margin=res.margin, tolerance=res.tolerance,
                   verdict=res.verdict.value, gating=check.proved and res.gating)
    except MatMeansError as exc:
        rec.update(verdict="ERROR", error=f"{exc.code}: {exc}")
    witness = None
    if rec["verdict"] in (Verdict.VIOLATED.value, "ERROR") and mats is not None:
        names = matrix_names(check, len(mats))
        witness = {name: np.asarray(mat.matrix) for name, mat in zip(names, mats)}
    return rec, witness


def _run_cell(args):
    check_id, cell, spec, master_seed, trials = args
    out = []
    for k in range(trials):
        seeded = replace(spec, seed=trial_seed(master_seed, check_id, cell, k))
        out.append(run_trial(check_id, cell, k, seeded))
    return out


# ------------------------------------------------------------------- summary


@dataclass
class CheckSummary:
    check_id: str
    gating: bool
    trials: int = 0
    holds: int = 0
    equality: int = 0
    violated: int = 0
    errors: int = 0
    gating_violations: int = 0
    equality_misses: int = 0
    min_margin: float = float("inf")
    min_relative_margin: float = float("inf")

    def add(self, rec: dict) -> None:
        self.trials += 1
        verdict = rec["verdict"]
        if verdict == "ERROR":
            self.errors += 1
            if rec["gating"]:
                self.gating_violations += 1
            return
        if verdict == Verdict.HOLDS.value:
            self.holds += 1
        elif verdict == Verdict.EQUALITY_WITHIN_TOL.value:
            self.equality += 1
        else:
            self.violated += 1
            if rec["gating"]:
                self.gating_violations += 1
        if rec["expect_equality"] and verdict != Verdict.EQUALITY_WITHIN_TOL.value:
            self.equality_misses += 1
        self.min_margin = min(self.min_margin, rec["margin"])
        scale = max(abs(rec["lhs"]), abs(rec["rhs"]), 1.0)
        self.min_relative_margin = min(self.min_relative_margin, rec["margin"] / scale)


@dataclass
class CampaignSummary:
    checks: dict[str, CheckSummary]
    records: list[dict]
    wall_time: float
    output_path: str | None = None

    @property
    def gating_violations(self) -> int:
        return sum(c.gating_violations for c in self.checks.values())

    @property
    def exit_code(self) -> int:
        return 2 if self.gating_violations else 0

    def table(self) -> str:
        head = (f"{'check_id':<24}{'trials':>8}{'HOLDS':>8}{'EQUAL':>8}{'VIOL':>7}"
                f"{'ERR':>5}{'eq-miss':>8}{'min margin':>14}{'min rel':>12}{'gating':>8}")
        lines = [head, "-" * len(head)]
        for cid in sorted(self.checks):
            c = self.checks[cid]
            lines.append(
                f"{cid:<24}{c.trials:>8}{c.holds:>8}{c.equality:>8}{c.violated:>7}{c.errors:>5}"
                f"{c.equality_misses:>8}{c.min_margin:>14.4e}{c.min_relative_margin:>12.3e}"
                f"{'yes' if c.gating else 'no':>8}")
        lines.append("-" * len(head))
        lines.append(f"wall time {self.wall_time:.1f}s; gating violations: {self.gating_violations}")
        return "\n".join(lines)


def run_campaign(cfg: CampaignConfig) -> CampaignSummary:
    """Run every (check, cell, trial); write records if ``output_path`` is set."""
    cfg.validate()
    start = time.perf_counter()
    checks = sorted(set(cfg.checks))
    jobs = []
    for check_id in checks:
        for cell, spec in enumerate(enumerate_cells(check_id, cfg)):
            jobs.append((check_id, cell, spec, cfg.master_seed, int(cfg.trials_per_cell)))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=int(cfg.workers)) as pool:
            chunks = list(pool.map(_run_cell, jobs, chunksize=8))
    else:
        chunks = [_run_cell(job) for job in jobs]
    results = sorted((item for chunk in chunks for item in chunk),
                     key=lambda item: (item[0]["check_id"], item[0]["cell"], item[0]["trial"]))

    records = []
    witness_dir = None
    if cfg.output_path:
        out = Path(cfg.output_path)
        witness_dir = out.parent / f"{out.stem}_witnesses"
    for rec, mats in results:
        if mats is not None and witness_dir is not None:
            witness_dir.mkdir(parents=True, exist_ok=True)
            path = witness_dir / f"{rec['check_id']}_c{rec['cell']}_t{rec['trial']}.txt"
            write_witness(path, rec, mats)
            # relative to the record file so a result directory can be moved as a unit
            rec["witness_path"] = str(path.relative_to(out.parent))
        records.append(rec)

    summaries = {cid: CheckSummary(cid, REGISTRY[cid].proved) for cid in checks}
    for rec in records:
        summaries[rec["check_id"]].add(rec)
    if cfg.output_path:
        Path(cfg.output_path).parent.mkdir(parents=True, exist_ok=True)
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(format_record(rec) + "\n")
    return CampaignSummary(summaries, records, time.perf_counter() - start, cfg.output_path)


# ---------------------------------------------------------------- witnesses

_SPEC_KEYS = ("n", "t", "s", "r", "p", "z_re", "z_im", "m", "seed", "condition_target", "structure")


def write_witness(path, rec: dict, mats: dict) -> None:
    header = {
        "check_id": rec["check_id"],
        "spec": {k: rec.get(k) for k in _SPEC_KEYS},
        "recorded": {k: rec.get(k) for k in ("lhs", "rhs", "margin", "tolerance", "verdict")},
    }
    Path(path).write_text(format_witness(header, mats), encoding="utf-8")


def replay(path) -> tuple[V.CheckResult, dict]:
    """Re-run the check stored in a witness file on its exact matrices.

    Returns the fresh result and the header's recorded outcome (possibly empty).

    Raises:
        ParseError: unreadable or malformed witness.
    """
    header, mats = read_witness(path)
    from .errors import ParseError
    from .linalg import spd

    check_id = header["check_id"]
    if check_id not in REGISTRY:
        raise ParseError(f"unknown check_id {check_id!r} in witness")
    check = REGISTRY[check_id]
    spec = V.TrialSpec.from_dict(header.get("spec", {}))
    try:
        matrices = [spd(m) for m in mats.values()]
    except MatMeansError as exc:
        raise ParseError(f"witness matrix rejected: {exc}") from exc
    if spec.n is None:
        spec = replace(spec, n=matrices[0].n)
    if check.sampler == "list" and spec.m is None:
        spec = replace(spec, m=len(matrices))
    return check.run(matrices, spec), header.get("recorded", {})


def default_workers() -> int:
    return max(1, min(os.cpu_count() or 1, 8))
