"""Acceptance criteria. Each criterion records one PASS/FAIL line, printed at the end of the run."""

import math
import time

import numpy as np
import pytest

from matmeans import campaign as C
from matmeans import verifier as V
from matmeans.means import geometric_mean, power_mean_closed, power_mean_fixed_point
from matmeans.sampler import SamplerConfig, random_pair, random_spd
from matmeans.spectral import INF, Verdict, compound, eigenvalues

LINES: dict[str, str] = {}

SUITE = ["pnorm_heron", "log_maj_proposition", "trace_sharp", "strip_trace", "heinz_sharp_trace",
         "sharp_square_traces", "cross_traces", "furuta_implication", "det_audenaert",
         "det_power_mean", "qnorm_infinity"]


def record(key, ok, text):
    LINES[key] = f"{key}: {'PASS' if ok else 'FAIL'} - {text}"
    return ok


def rel(x, y):
    return np.linalg.norm(np.asarray(x) - np.asarray(y)) / np.linalg.norm(np.asarray(y))


@pytest.fixture(scope="module")
def full_campaign():
    start = time.perf_counter()
    summary = C.run_campaign(C.CampaignConfig())
    return summary, time.perf_counter() - start


@pytest.mark.parametrize("check_id", SUITE)
def test_criterion_1_proved_suite(full_campaign, check_id):
    summary, _ = full_campaign
    recs = [r for r in summary.records if r["check_id"] == check_id]
    if check_id == "pnorm_heron":
        recs = [r for r in recs if r["p"] != "INF" and r["p"] != INF]
    bad = [r for r in recs if r["verdict"] in ("VIOLATED", "ERROR")]
    worst = min(r["margin"] for r in recs if r["margin"] is not None)
    ok = len(recs) >= 500 and not bad
    record(f"criterion 1 [{check_id}]", ok,
           f"{len(bad)} VIOLATED/ERROR of {len(recs)} trials, min margin {worst:.3e}")
    assert len(recs) >= 500
    assert not bad, f"{len(bad)} violations, e.g. {bad[0]}"


def test_criterion_1_wall_time(full_campaign):
    summary, wall = full_campaign
    ok = wall < 600
    record("criterion 1 [wall time]", ok, f"full campaign {len(summary.records)} trials in {wall:.1f}s")
    assert ok


def test_criterion_2_counterexample():
    main, alt, _ = V.counterexample_readings()
    s_main_l, s_main_r = main.detail["s_left"], main.detail["s_right"]
    s_alt_l, s_alt_r = alt.detail["s_left"], alt.detail["s_right"]
    ok = (abs(s_main_l[0] - 4) <= 1e-12 and abs(s_main_r[0] - 2) <= 1e-12
          and main.verdict is Verdict.VIOLATED and main.detail["prefix"] == 1
          and abs(s_alt_l[0] - 2) <= 1e-12 and abs(s_alt_r[0] - math.sqrt(2)) <= 1e-12
          and alt.verdict is Verdict.VIOLATED)
    record("criterion 2", ok, f"Z=diag(1,4): {s_main_l[0]:.15g} > {s_main_r[0]:.15g}; "
                              f"Z=diag(1,2): {s_alt_l[0]:.15g} > {s_alt_r[0]:.15g}")
    assert ok


def test_criterion_3_equality_cases(full_campaign):
    summary, _ = full_campaign
    tagged = [r for r in summary.records if r["expect_equality"]]
    misses = [r for r in tagged if r["verdict"] != Verdict.EQUALITY_WITHIN_TOL.value]
    ok = bool(tagged) and not misses
    record("criterion 3", ok, f"{len(misses)} misses over {len(tagged)} equal/commuting trials")
    assert ok, misses[:3]


def test_criterion_4_mean_oracles():
    worst_fp = worst_half = 0.0
    for seed in range(200):
        cfg = SamplerConfig(2 + seed % 7, [10.0, 1e3, 1e6][seed % 3], 1000 + seed)
        a, b = random_pair(cfg)
        t = round(0.1 * (1 + seed % 9), 1)
        worst_fp = max(worst_fp, rel(power_mean_fixed_point([a, b], t).matrix,
                                     power_mean_closed(a, b, t).matrix))
        heron = (a.matrix + b.matrix + 2 * geometric_mean(a, b).matrix) / 4
        worst_half = max(worst_half, rel(power_mean_closed(a, b, 0.5).matrix, heron))
    ok = worst_fp <= 1e-9 and worst_half <= 1e-9
    record("criterion 4", ok, f"fixed point vs closed form {worst_fp:.2e}; "
                              f"P_1/2 vs (A+B+2A#B)/4 {worst_half:.2e}")
    assert ok


def test_criterion_5_compound_identities():
    rng = np.random.default_rng(5)
    worst_mul = worst_top = 0.0
    for n in range(1, 6):
        for seed in range(10):
            x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            a = random_spd(SamplerConfig(n, 1e3, 50 * n + seed))
            lam = eigenvalues(a)
            for k in range(1, n + 1):
                worst_mul = max(worst_mul, rel(compound(x @ y, k), compound(x, k) @ compound(y, k)))
                top = eigenvalues(compound(a.matrix, k))[0]
                worst_top = max(worst_top, abs(top - math.prod(lam[:k])) / math.prod(lam[:k]))
    ok = worst_mul <= 1e-9 and worst_top <= 1e-9
    record("criterion 5", ok, f"C_k(XY) vs C_k(X)C_k(Y) {worst_mul:.2e}; "
                              f"lambda_1(C_k) vs prefix product {worst_top:.2e}")
    assert ok


def test_criterion_6_proposition_form():
    used = variant_fail = prop_ok = 0
    seed = 0
    while used < 12:
        a, b = random_pair(SamplerConfig(3 + seed % 4, 100.0, 500 + seed))
        seed += 1
        if abs(math.exp(np.sum(np.log(a.eig.values))) - 1) <= 0.1:
            continue
        used += 1
        variant = V.check_log_maj_intro_variant(a, b, 0.5)
        variant_fail += (not variant.report.final_equality) and variant.violated
        prop_ok += not V.check_log_maj_proposition(a, b, 0.5).violated
    ok = variant_fail == used and prop_ok == used and used >= 10
    record("criterion 6", ok, f"variant fails final leg on {variant_fail}/{used}; "
                              f"proposition form holds on {prop_ok}/{used}")
    assert ok


def test_criterion_7_strip_boundaries():
    total = bad = 0
    for n in (2, 3, 5, 8):
        for kappa in (10.0, 1e3, 1e6):
            x, y = random_pair(SamplerConfig(n, kappa, 77 + n))
            for re in (0.25, 0.5, 0.75):
                for im in (0.0, 0.5, -0.5, 2.0, -2.0, 8.0, -8.0):
                    total += 1
                    bad += V.check_strip_trace(x, y, complex(re, im)).violated
    ok = bad == 0
    record("criterion 7", ok, f"{bad} violations over {total} strip evaluations")
    assert ok


def test_criterion_8_determinism(tmp_path):
    cfg = dict(checks=["pnorm_heron", "strip_trace", "qnorm_infinity", "det_power_mean"],
               dims=[2, 5], t_grid=[0.2, 0.8], r_grid=[0.0, 3.0], z_grid=[0.25, 0.5 + 8j],
               condition_targets=[10.0, 1e6], trials_per_cell=2, master_seed=99)
    streams = []
    for workers in (1, 2, 3):
        out = tmp_path / f"w{workers}" / "records.jsonl"
        C.run_campaign(C.CampaignConfig(**cfg, workers=workers, output_path=str(out)))
        streams.append(out.read_bytes())
    ok = streams[0] == streams[1] == streams[2] and len(streams[0]) > 0
    record("criterion 8", ok, f"workers 1/2/3 streams identical ({len(streams[0])} bytes)")
    assert ok
