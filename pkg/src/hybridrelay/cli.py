"""Command-line entry point: ``policy``, ``sweep``, ``simulate`` and ``verify``."""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .channel import region_probabilities, thresholds
from .config import PRESETS, ConfigError, load_config, params_from_values, preset_points
from .oracle import (
    CASE_ALPHA0,
    CERT_TOL,
    TYPOS,
    case_boundary_vectors,
    certify,
    inject_typo,
    oracle_vs_analytic,
    random_probabilities,
)
from .policy import classify_case, closed_form_throughput, link_rates, optimal_policy
from .simulator import SimConfig, run
from .sweep import policy_for, run_sweep, write_csv, write_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from a named figure preset")
    p.add_argument("--config", metavar="PATH", help="flat JSON object of config keys")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int)
    p.add_argument("--horizon", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridrelay", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("policy", help="print the optimal policy for one parameter point"))
    p = sub.add_parser("sweep", help="evaluate every point of a parameter sweep")
    _common(p)
    p.add_argument("--jobs", type=int, help="worker processes")
    _common(sub.add_parser("simulate", help="Monte Carlo run of one parameter point"))
    p = sub.add_parser("verify", help="check the closed form against the LP oracle")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, default=1000, help="random probability vectors (default 1000)")
    p.add_argument("--inject-typo", choices=TYPOS, help="negative control: reinstate a misprinted table entry")
    return parser


def _config(args):
    return load_config(
        preset=args.preset, path=args.config, overrides=args.overrides,
        out=args.out, format=args.format, seed=args.seed, horizon=args.horizon,
        jobs=getattr(args, "jobs", None),
    )


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_policy(args) -> int:
    cfg = _config(args)
    params = cfg.params
    rp = region_probabilities(params)
    case = classify_case(rp)
    report = closed_form_throughput(rp, params.r0)
    policy = optimal_policy(rp)
    doc = {
        "r0": params.r0,
        "gamma0": params.gamma0,
        "thresholds": vars(thresholds(params)),
        "region_probabilities": rp.p.tolist(),
        "case": case.label,
        "policy": policy.prob.tolist(),
        "flagged_regions": list(policy.flagged),
        "throughput": report.throughput,
        "arrival_rate": report.arrival_rate,
        "departure_rate": report.departure_rate,
    }
    if cfg.policy_kind != "optimal":
        bpol, bthr = policy_for(cfg.policy_kind, rp, params.r0)
        doc["baseline"] = {"kind": cfg.policy_kind, "policy": bpol.prob.tolist(), "throughput": bthr}
    if cfg.get("format") == "json":
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.get("out"))
        return EXIT_OK
    lines = [
        f"R0 = {params.r0:g} bits/slot, gamma0 = {params.gamma0:.6g}",
        "region probabilities: " + ", ".join(f"P_R{k}={v:.6f}" for k, v in enumerate(rp.p, start=1)),
        f"case: {case.label}",
        policy.format(),
        f"throughput: {report.throughput:.9f} bits/slot",
    ]
    if "baseline" in doc:
        lines += [f"baseline {cfg.policy_kind}:", bpol.format(), f"throughput: {bthr:.9f} bits/slot"]
    _emit("\n".join(lines) + "\n", cfg.get("out"))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    if cfg.get("sweep_var") is None:
        raise ConfigError("sweep needs sweep_var, sweep_start, sweep_stop and sweep_step")
    rows = run_sweep(cfg)
    if cfg.get("format", "csv") == "json":
        meta = {k: v for k, v in sorted(cfg.values.items()) if k not in ("out", "jobs")}
        text = write_json(rows, meta=meta)
    else:
        text = write_csv(rows)
    _emit(text, cfg.get("out"))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _config(args)
    params = cfg.params
    rp = region_probabilities(params)
    policy, analytic = policy_for(cfg.policy_kind, rp, params.r0)
    sim = SimConfig(params, policy, horizon=cfg.get("horizon"), seed=cfg.get("seed", 0),
                    buffer=cfg.get("buffer", "ideal"), warmup=cfg.get("warmup"))
    report = run(sim)
    doc = {
        "config": {k: v for k, v in sorted(cfg.values.items()) if k not in ("out", "jobs")},
        "policy_kind": cfg.policy_kind,
        "case": classify_case(rp).label,
        "region_probabilities": rp.p.tolist(),
        "analytic_throughput": analytic,
        "report": report.to_dict(),
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.get("out"))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.count < 1:
        print("verify: --count must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    rng = np.random.default_rng(args.seed or 0)
    vectors = random_probabilities(rng, args.count) + case_boundary_vectors(rng)
    vectors += [region_probabilities(params_from_values(v)) for _, v in preset_points()]
    max_gap = 0.0
    bad_balance = 0
    failures = []
    for rp in vectors:
        cmp = oracle_vs_analytic(rp)
        max_gap = max(max_gap, cmp.gap, cmp.policy_gap)
        policy = optimal_policy(rp)
        if args.inject_typo:
            policy = inject_typo(policy, args.inject_typo)
        arrival, departure = link_rates(policy, rp)
        if abs(arrival - departure) > CERT_TOL:
            bad_balance += 1
        cert = certify(policy, rp, CASE_ALPHA0[cmp.case])
        if not cert.certified:
            failures.append((rp, cmp.case, cert.violations))
    elapsed = time.perf_counter() - start
    ok = max_gap <= CERT_TOL and not failures and not bad_balance
    print(f"vectors: {len(vectors)} ({args.count} random, boundary and preset points)")
    print(f"max gap |LP - closed form|: {max_gap:.1e}")
    print(f"balance failures: {bad_balance}")
    print(f"certification failures: {len(failures)}")
    for rp, case, violations in failures[:5]:
        print(f"  {case.label} {np.round(rp.p, 6).tolist()} violations={violations}")
    print(f"elapsed: {elapsed:.2f}s")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"policy": cmd_policy, "sweep": cmd_sweep, "simulate": cmd_simulate, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"{parser.prog} {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
