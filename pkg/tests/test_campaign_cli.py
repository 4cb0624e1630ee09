import json

import pytest

from matmeans import campaign as C
from matmeans.cli import main
from matmeans.errors import ConfigInvalidError, ParseError
from matmeans.matio import format_witness
from matmeans.sampler import SamplerConfig, random_commuting_pair
from matmeans.spectral import Verdict


def small(**kw):
    base = dict(checks=["trace_sharp", "strip_trace", "det_power_mean", "counterexample"],
                dims=[2, 3], t_grid=[0.3, 0.7], z_grid=[0.25, 0.5 + 2j], condition_targets=[10.0],
                structures=["GENERIC", "EQUAL"], trials_per_cell=2, master_seed=7)
    base.update(kw)
    return C.CampaignConfig(**base)


@pytest.mark.parametrize("field", ["t_grid", "dims", "checks", "z_grid", "condition_targets"])
def test_empty_grid_is_invalid(field):
    with pytest.raises(ConfigInvalidError):
        C.run_campaign(small(**{field: []}))


@pytest.mark.parametrize("kw", [{"z_grid": [0.8]}, {"trials_per_cell": 0}, {"checks": ["nope"]},
                                {"p_set": [0.5]}, {"structures": ["ODD"]}])
def test_invalid_config(kw):
    with pytest.raises(ConfigInvalidError):
        C.CampaignConfig(**kw).validate()


def test_trial_seed_is_stable():
    assert C.trial_seed(7, "trace_sharp", 3, 1) == C.trial_seed(7, "trace_sharp", 3, 1)
    assert C.trial_seed(7, "trace_sharp", 3, 1) != C.trial_seed(7, "trace_sharp", 3, 2)
    assert 0 <= C.trial_seed(7, "x", 0, 0) < 2**64


def test_summary_conservation_and_counterexample(tmp_path):
    out = tmp_path / "r.jsonl"
    summary = C.run_campaign(small(output_path=str(out)))
    for cid, s in summary.checks.items():
        assert s.holds + s.equality + s.violated + s.errors == s.trials
        assert s.trials == sum(1 for r in summary.records if r["check_id"] == cid)
    assert summary.checks["counterexample"].violated == 2
    assert summary.checks["trace_sharp"].violated == 0
    assert summary.checks["strip_trace"].violated == 0
    assert summary.checks["counterexample"].gating_violations == 0
    # det_power_mean is gating and its generic trials come out VIOLATED
    assert summary.checks["det_power_mean"].gating_violations > 0
    assert summary.exit_code == 2
    lines = out.read_text().splitlines()
    assert len(lines) == len(summary.records)
    rec = json.loads(lines[0])
    for key in ("check_id", "n", "t", "s", "r", "p", "z_re", "z_im", "seed", "lhs", "rhs",
                "margin", "tolerance", "verdict"):
        assert key in rec


def test_exit_code_zero_when_proved_checks_hold():
    summary = C.run_campaign(small(checks=["trace_sharp", "counterexample"]))
    assert summary.exit_code == 0


def test_table_sorted_fixed_width():
    table = C.run_campaign(small()).table().splitlines()
    rows = [ln.split()[0] for ln in table[2:-2]]
    assert rows == sorted(rows)
    assert len({len(ln) for ln in table[2:-2]}) == 1
    assert "min margin" in table[0]


def test_numbers_have_17_digits(tmp_path):
    out = tmp_path / "r.jsonl"
    C.run_campaign(small(checks=["trace_sharp"], output_path=str(out)))
    rec = json.loads(out.read_text().splitlines()[0])
    raw = out.read_text().splitlines()[0]
    assert repr(rec["lhs"]) in raw or format(rec["lhs"], ".17g") in raw
    assert float(format(rec["lhs"], ".17g")) == rec["lhs"]


def test_byte_identical_across_workers(tmp_path):
    paths = []
    for workers in (1, 2):
        out = tmp_path / f"w{workers}.jsonl"
        C.run_campaign(small(checks=["trace_sharp", "qnorm_infinity"], workers=workers,
                             output_path=str(out)))
        paths.append(out.read_bytes())
    assert paths[0] == paths[1]


def test_witness_and_replay(tmp_path):
    out = tmp_path / "r.jsonl"
    summary = C.run_campaign(small(checks=["det_power_mean"], output_path=str(out)))
    violated = [r for r in summary.records if r["verdict"] == "VIOLATED"]
    assert violated and all(r.get("witness_path") for r in violated)
    rec = violated[0]
    res, recorded = C.replay(out.parent / rec["witness_path"])
    assert res.verdict.value == recorded["verdict"] == "VIOLATED"
    assert abs(res.lhs - rec["lhs"]) <= 1e-12 * max(1, abs(rec["lhs"]))
    assert abs(res.rhs - rec["rhs"]) <= 1e-12 * max(1, abs(rec["rhs"]))


def test_replay_counterexample_witness(tmp_path):
    summary = C.run_campaign(small(checks=["counterexample"], output_path=str(tmp_path / "r.jsonl")))
    res, _ = C.replay(tmp_path / summary.records[0]["witness_path"])
    assert res.lhs == pytest.approx(4.0, abs=1e-12) and res.rhs == pytest.approx(2.0, abs=1e-12)


def test_replay_hand_written_commuting_witness(tmp_path):
    a, b = random_commuting_pair(SamplerConfig(3, 10.0, 1))
    path = tmp_path / "w.txt"
    path.write_text(format_witness({"check_id": "trace_sharp", "spec": {"t": 0.4}},
                                   {"A": a.matrix, "B": b.matrix}))
    res, recorded = C.replay(path)
    assert res.verdict is Verdict.EQUALITY_WITHIN_TOL and recorded == {}


def test_replay_corrupted(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text('{"check_id": "trace_sharp"}\nmatrix A\n2\n1 0\n0 x\n')
    with pytest.raises(ParseError):
        C.replay(path)
    path.write_text('{"check_id": "trace_sharp"}\nmatrix A\n2\n1 0\n0 -1\nmatrix B\n1\n1\n')
    with pytest.raises(ParseError):
        C.replay(path)


# ------------------------------------------------------------------ cli

CLI_SMALL = ["--dims", "2", "--t-grid", "0.5", "--condition-targets", "10",
             "--structures", "GENERIC", "--trials-per-cell", "1"]


def test_cli_sweep_ok(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    code = main(["sweep", "--checks", "trace_sharp,heinz_sharp_trace", *CLI_SMALL,
                 "--output-path", str(out)])
    assert code == 0
    assert "trace_sharp" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 2


def test_cli_violation_exit_code():
    assert main(["sweep", "--checks", "det_power_mean", *CLI_SMALL, "--quiet"]) == 2


def test_cli_config_errors(tmp_path, capsys):
    assert main(["sweep", "--t-grid", "", "--quiet"]) == 1
    assert "CONFIG_INVALID" in capsys.readouterr().err
    assert main(["sweep", "--z-grid", "0.9", "--quiet"]) == 1
    assert main(["sweep", "--config", str(tmp_path / "missing.yaml")]) == 1
    assert main(["bogus"]) == 1


def test_cli_seed_precedence(tmp_path, monkeypatch):
    from matmeans.cli import build_config, make_parser
    cfg_file = tmp_path / "c.yaml"
    cfg_file.write_text("master-seed: 11\ntrials_per_cell: 3\nz_grid: ['0.5+2i', 0.25]\n")
    parse = make_parser().parse_args
    monkeypatch.delenv("MATMEANS_SEED", raising=False)
    cfg = build_config(parse(["sweep", "--config", str(cfg_file)]))
    assert cfg.master_seed == 11 and cfg.trials_per_cell == 3 and cfg.z_grid[0] == 0.5 + 2j
    monkeypatch.setenv("MATMEANS_SEED", "22")
    assert build_config(parse(["sweep", "--config", str(cfg_file)])).master_seed == 22
    assert build_config(parse(["sweep", "--config", str(cfg_file),
                               "--master-seed", "33"])).master_seed == 33


def test_cli_counterexample(capsys):
    assert main(["counterexample", "--no-search"]) == 0
    out = capsys.readouterr().out
    assert "VIOLATED" in out and "positive semidefinite: False" in out
    assert main(["counterexample", *CLI_SMALL]) == 0
    assert "open_th122" in capsys.readouterr().out


def test_cli_replay(tmp_path, capsys):
    summary = C.run_campaign(small(checks=["det_power_mean"], output_path=str(tmp_path / "r.jsonl")))
    path = next(r["witness_path"] for r in summary.records if r.get("witness_path"))
    assert main(["replay", str(tmp_path / path)]) == 2
    assert "recorded: verdict=VIOLATED" in capsys.readouterr().out
    bad = tmp_path / "bad.txt"
    bad.write_text("garbage")
    assert main(["replay", str(bad)]) == 1
