"""Command-line driver.

Subcommands: encode, plan, run-circuit, storage-experiment, verify.  Each
takes --config <path> (JSON) and --out <dir>; --seed overrides the config.
Exit status: 0 on success, 1 on property failure, 2 on configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import codes, feedback, gates, harness, states, verify


class ConfigError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigError("--config is required")
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_logical(payload: dict, n_logical: int) -> np.ndarray:
    raw = payload.get("logical")
    if raw is None:
        amps = np.zeros(2**n_logical, dtype=complex)
        amps[0] = 1.0
        return amps
    return np.array([complex(re, im) for re, im in raw])


def cmd_encode(args) -> int:
    payload = _load_config(args.config)
    try:
        scheme = codes.scheme_from_json(payload["scheme"])
        logical = _parse_logical(payload, scheme.n_logical)
        state = codes.encode(scheme, logical)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    report = codes.codeword_report(state, scheme)
    out = _out_dir(args)
    summary = {
        "scheme": json.loads(codes.scheme_to_json(scheme)),
        "n_ions": state.n_ions,
        "in_code_space": report.in_code_space,
        "excitation_weights": sorted(report.excitation_weights),
        "projection_deficit": report.projection_deficit,
    }
    harness.write_json(out / "encode_report.json", summary)
    if args.dump_state:
        (out / "state.json").write_text(states.state_to_json(state) + "\n")
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_plan(args) -> int:
    payload = _load_config(args.config)
    try:
        scheme = codes.scheme_from_json(payload["scheme"])
        decayed = int(payload["decayed_ion"])
        plan = feedback.plan_for(scheme, decayed)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    count = feedback.gate_count(plan)
    quoted = feedback.quoted_gate_count(scheme.kind, scheme.n_logical)
    doc = {
        "decayed_ion": decayed,
        "steps": json.loads(gates.steps_to_json(plan.steps)),
        "reset_steps": json.loads(gates.steps_to_json(plan.reset_steps)),
        "gate_count": {"rotations": count.rotations, "cnots": count.cnots},
        "quoted_formula": {"rotations": quoted.rotations, "cnots": quoted.cnots},
        "wall_time_s": harness.feedback_wall_time(plan, harness.TimingModel()),
    }
    harness.write_json(_out_dir(args) / "plan.json", doc)
    print(json.dumps(doc, sort_keys=True))
    return 0


def cmd_run_circuit(args) -> int:
    payload = _load_config(args.config)
    try:
        n_ions = int(payload["n_ions"])
        if "state" in payload:
            state = states.state_from_json(json.dumps(payload["state"]))
        else:
            state = states.basis_state(n_ions, int(payload.get("basis", 0)))
        steps = gates.steps_from_json(json.dumps(payload["circuit"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    final, count = gates.run_circuit(state, steps)
    out = _out_dir(args)
    (out / "final_state.json").write_text(states.state_to_json(final) + "\n")
    doc = {"rotations": count.rotations, "cnots": count.cnots}
    harness.write_json(out / "gate_count.json", doc)
    print(json.dumps(doc, sort_keys=True))
    return 0


def cmd_storage_experiment(args) -> int:
    payload = _load_config(args.config)
    try:
        config = harness.config_from_json(payload)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    summary = harness.storage_experiment(config, _out_dir(args))
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    suite = args.suite
    if suite is None:
        payload = _load_config(args.config)
        suite = payload.get("suite")
    if suite not in verify.SUITES:
        raise ConfigError(f"suite must be one of {sorted(verify.SUITES)}")
    seed = args.seed if args.seed is not None else 1234
    results = verify.run_suite(suite, seed)
    for res in results:
        print(json.dumps(
            {"check": res.name, "status": res.status, "detail": res.detail},
            sort_keys=True,
        ))
    n_fail = sum(1 for r in results if r.status == "FAIL")
    print(json.dumps(
        {"suite": suite, "checks": len(results), "failures": n_fail}, sort_keys=True
    ))
    if args.out:
        harness.write_json(
            Path(args.out) / f"verify_{suite}.json",
            {
                "suite": suite,
                "results": [
                    {"check": r.name, "status": r.status, "detail": r.detail}
                    for r in results
                ],
            },
        )
    return 1 if n_fail else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionqec",
        description="Spontaneous-emission error correction on trapped-ion registers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a JSON configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="override the config seed")

    p = sub.add_parser("encode", help="build a codeword and report on it")
    common(p)
    p.add_argument("--dump-state", action="store_true", help="write the state snapshot JSON")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("plan", help="print a feedback plan and its gate count")
    common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run-circuit", help="apply a serialized circuit to a state")
    common(p)
    p.set_defaults(func=cmd_run_circuit)

    p = sub.add_parser("storage-experiment", help="matched corrected/uncorrected ensembles")
    common(p)
    p.set_defaults(func=cmd_storage_experiment)

    p = sub.add_parser("verify", help="run a property suite")
    common(p)
    p.add_argument("--suite", choices=sorted(verify.SUITES), help="suite name")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
