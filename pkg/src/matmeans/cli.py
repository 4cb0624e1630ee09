"""Command line front end: ``matmeans verify|sweep|counterexample|replay``.

Exit codes: 0 when every gating check holds, 2 when a gating check is
violated (or errors), 1 for usage, configuration or parse errors.

Seed precedence: built-in default < ``--config`` file < ``MATMEANS_SEED`` <
``--master-seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

import yaml

from . import campaign as C
from . import verifier as V
from .errors import ConfigInvalidError, MatMeansError
from .matio import parse_entry

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
SEED_ENV = "MATMEANS_SEED"


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _words(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _complexes(text: str) -> list[complex]:
    return [parse_entry(x) for x in text.split(",") if x.strip()]


def _seed(text: str) -> int:
    return int(text, 0)


_LIST_FLAGS = {
    "checks": _words, "dims": _ints, "t_grid": _floats, "r_grid": _floats,
    "s_grid": _floats, "p_set": _words, "z_grid": _complexes, "m_set": _ints,
    "structures": _words, "condition_targets": _floats,
}


def _add_campaign_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML or JSON file with CampaignConfig keys")
    for name, conv in _LIST_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), type=conv, default=None,
                       metavar="A,B,...")
    p.add_argument("--trials-per-cell", type=int, default=None)
    p.add_argument("--master-seed", type=_seed, default=None)
    p.add_argument("--output-path", default=None, help="JSONL result stream")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--quiet", action="store_true", help="suppress the summary table")


def _load_file(path: str) -> dict:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigInvalidError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigInvalidError(f"bad config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigInvalidError("config file must hold a mapping")
    out = {str(k).replace("-", "_"): v for k, v in data.items()}
    if "z_grid" in out:
        out["z_grid"] = [parse_entry(str(z)) if isinstance(z, str) else complex(z)
                         for z in out["z_grid"] or []]
    return out


def build_config(args: argparse.Namespace, base: dict | None = None) -> C.CampaignConfig:
    values = dict(base or {})
    if args.config:
        values.update(_load_file(args.config))
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            values["master_seed"] = _seed(env)
        except ValueError as exc:
            raise ConfigInvalidError(f"{SEED_ENV}={env!r} is not an integer") from exc
    for f in fields(C.CampaignConfig):
        given = getattr(args, f.name, None)
        if given is not None:
            values[f.name] = given
    return C.CampaignConfig.from_mapping(values).validate()


def _finish(summary: C.CampaignSummary, quiet: bool) -> int:
    if not quiet:
        print(summary.table())
        if summary.output_path:
            print(f"records written to {summary.output_path}")
    return summary.exit_code


def cmd_verify(args) -> int:
    cfg = build_config(args, {"checks": list(C.PROVED_CHECKS)})
    return _finish(C.run_campaign(cfg), args.quiet)


def cmd_sweep(args) -> int:
    return _finish(C.run_campaign(build_config(args)), args.quiet)


def _print_result(res: V.CheckResult) -> None:
    print(f"{res.check_id}: verdict={res.verdict.value} lhs={res.lhs:.17g} rhs={res.rhs:.17g} "
          f"margin={res.margin:.6g} tolerance={res.tolerance:.3g}")


def cmd_counterexample(args) -> int:
    for res in V.counterexample_readings():
        d = res.detail
        print(f"Z=diag{tuple(d['z_diag'])}: s(Z^1/2 X Z^1/2)={d['s_left']} "
              f"s(Z^1/2 Y Z^1/2)={d['s_right']} prefix {d['prefix']}: "
              f"{res.lhs:.12g} vs {res.rhs:.12g} -> {res.verdict.value}")
    first = V.counterexample_readings()[0].detail
    print(f"Y eigenvalues {first['y_eigenvalues']} (positive semidefinite: "
          f"{first['y_positive_semidefinite']}); X <= Z: {first['x_le_z']}, Y <= Z: {first['y_le_z']}")
    if args.no_search:
        return EXIT_OK
    cfg = build_config(args, {"checks": ["open_th122", "open_trace_bounds"],
                              "structures": ["GENERIC"]})
    summary = C.run_campaign(cfg)
    code = _finish(summary, args.quiet)
    worst = min((r for r in summary.records if r["check_id"] == "open_th122" and r["margin"] is not None),
                key=lambda r: r["margin"], default=None)
    if worst is not None and not args.quiet:
        print("open trace inequality, smallest margin: "
              + json.dumps({k: worst[k] for k in ("n", "t", "condition_target", "seed",
                                                  "lhs", "rhs", "margin", "verdict")}))
    return code


def cmd_replay(args) -> int:
    res, recorded = C.replay(args.witness)
    _print_result(res)
    if recorded:
        print(f"recorded: verdict={recorded.get('verdict')} lhs={recorded.get('lhs')} "
              f"rhs={recorded.get('rhs')}")
    return EXIT_VIOLATION if res.violated and res.gating else EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matmeans",
                                     description="Randomized checks of matrix mean inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the proved-inequality campaign")
    _add_campaign_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run a campaign over user-supplied grids")
    _add_campaign_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("counterexample",
                       help="reproduce the diagonal counterexample and search the open inequality")
    _add_campaign_flags(p)
    p.add_argument("--no-search", action="store_true", help="skip the randomized open search")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("replay", help="re-run the check stored in a witness file")
    p.add_argument("witness")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except MatMeansError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TypeError, ValueError) as exc:
        print(f"error [CONFIG_INVALID]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error [IO_ERROR]: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
