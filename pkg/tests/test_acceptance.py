"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the lines
interleaved with the test names; they are printed either way).
"""
import itertools
import json
import math
import time

import numpy as np
import pytest

from hybridrelay.channel import (
    RsiFixed,
    SystemParams,
    classify_array,
    region_probabilities,
    sample_gains,
    thresholds,
)
from hybridrelay.cli import main as cli_main
from hybridrelay.config import PRESETS, load_config, params_from_values, preset_points
from hybridrelay.oracle import (
    CASE_ALPHA0,
    CERT_TOL,
    TYPOS,
    case_boundary_vectors,
    certify,
    inject_typo,
    oracle_vs_analytic,
    random_probabilities,
)
from hybridrelay.policy import (
    Policy,
    StatCase,
    classify_case,
    closed_form_throughput,
    hd_optimal_throughput,
    link_rates,
    optimal_policy,
)
from hybridrelay.simulator import SimConfig, queue_growth_probe, run
from hybridrelay.sweep import run_sweep, write_csv

# multipliers exactly as the acceptance criterion lists them
LITERAL_ALPHA0 = {
    StatCase.PSI1: 0.0,
    StatCase.PSI2: 0.0,
    StatCase.PSI3: 0.5,
    StatCase.PSI4: 1.0,
    StatCase.PSI5: 2.0,
}


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'}: {title} -- {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def oracle_vectors():
    rng = np.random.default_rng(20240501)
    return random_probabilities(rng, 1000), case_boundary_vectors(rng)


def test_criterion_1_oracle_equivalence(capsys, oracle_vectors):
    random_vecs, boundary_vecs = oracle_vectors
    start = time.perf_counter()
    cmps = [oracle_vs_analytic(rp) for rp in random_vecs + boundary_vecs]
    elapsed = time.perf_counter() - start
    gap = max(c.gap for c in cmps)
    policy_gap = max(c.policy_gap for c in cmps)
    ok = gap < 1e-9 and policy_gap < 1e-9 and elapsed < 10.0
    report(capsys, 1, "LP optimum vs closed form", ok,
           f"{len(random_vecs)} random + {len(boundary_vecs)} boundary vectors, "
           f"max |LP - closed form| = {gap:.1e}, max |LP - policy| = {policy_gap:.1e}, {elapsed:.2f}s")


def _typo_detected(rp, which, alpha0):
    clean = optimal_policy(rp)
    bad = inject_typo(clean, which)
    if bad == clean:
        return None
    arrival, departure = link_rates(bad, rp)
    return abs(arrival - departure) > CERT_TOL or not certify(bad, rp, alpha0[classify_case(rp)]).certified


def test_criterion_2_kkt_certification(capsys, oracle_vectors):
    random_vecs, _ = oracle_vectors
    failed = {case: 0 for case in StatCase}
    counts = {case: 0 for case in StatCase}
    for rp in random_vecs:
        case = classify_case(rp)
        counts[case] += 1
        if not certify(optimal_policy(rp), rp, LITERAL_ALPHA0[case]).certified:
            failed[case] += 1
    certified_ok = not any(failed.values())

    controls = {}
    for which in TYPOS:
        hits = [_typo_detected(rp, which, LITERAL_ALPHA0) for rp in random_vecs]
        relevant = [h for h in hits if h is not None]
        controls[which] = (sum(relevant), len(relevant))
    controls_ok = all(n > 0 and d == n for d, n in controls.values())

    alt = sum(certify(optimal_policy(rp), rp, CASE_ALPHA0[classify_case(rp)]).certified for rp in random_vecs)
    detail = (
        f"alpha0 = (0, 0, 1/2, 1, 2): uncertified per case "
        + ", ".join(f"{c.label} {failed[c]}/{counts[c]}" for c in StatCase)
        + "; negative controls detected "
        + ", ".join(f"{w} {d}/{n}" for w, (d, n) in controls.items())
        + f"; with alpha0 = 1 for Psi5 {alt}/{len(random_vecs)} certified"
    )
    report(capsys, 2, "KKT certificate with the listed multipliers", certified_ok and controls_ok, detail)


def _simulation_points():
    points = []
    fig4 = PRESETS["fig4"]
    for i_r, r0 in [(0.0, 2.0), (5.0, 4.0), (20.0, 1.0), (20.0, 6.5)]:
        points.append(("fig4", {**fig4, "i_r": i_r, "r0": r0}))
    for p1_db in (5.0, 15.0, 30.0, 50.0):
        points.append(("fig5", {**PRESETS["fig5"], "p1_db": p1_db}))
    for p2_db in (8.0, 18.0, 30.0, 50.0):
        points.append(("fig6", {**PRESETS["fig6"], "p2_db": p2_db}))
    return points


def test_criterion_3_simulation_vs_analysis(capsys):
    n = 10 ** 6
    start = time.perf_counter()
    lines, ok = [], True
    for i, (name, values) in enumerate(_simulation_points()):
        params = params_from_values(values)
        rp = region_probabilities(params)
        target = closed_form_throughput(rp, params.r0).throughput
        rep = run(SimConfig(params, optimal_policy(rp), horizon=n, seed=1000 + i, warmup=0))
        tol = max(0.01 * target, 3 * rep.throughput_stderr)
        balance_tol = 3 * params.r0 / math.sqrt(rep.slots)
        good = abs(rep.est_throughput - target) <= tol and abs(rep.est_r1 - rep.est_r2) < balance_tol
        ok &= good
        lines.append(f"{name}:{rep.est_throughput:.4f}/{target:.4f}{'' if good else '!'}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60.0
    report(capsys, 3, "Monte Carlo vs closed form at N = 1e6", ok,
           f"{len(lines)} points ({', '.join(lines)}), {elapsed:.1f}s")


def test_criterion_4_region_frequencies(capsys):
    rng = np.random.default_rng(77)
    n = 10 ** 6
    worst = 0.0
    for _ in range(10):
        params = SystemParams.from_db(
            rng.uniform(0, 40), rng.uniform(0, 40), rsi=RsiFixed(rng.uniform(0, 20)),
            omega1=rng.uniform(0.2, 2), omega2=rng.uniform(0.2, 2), r0=rng.uniform(0.5, 6),
        )
        g1, g2 = sample_gains(params, rng, n)
        freq = np.bincount(classify_array(thresholds(params), g1, g2), minlength=7)[1:] / n
        p = region_probabilities(params).p
        se = np.sqrt(p * (1 - p) / n)
        z = np.where(se > 0, np.abs(freq - p) / np.where(se > 0, se, 1), np.where(freq == p, 0.0, np.inf))
        worst = max(worst, float(z.max()))
    report(capsys, 4, "empirical region frequencies", worst <= 3.0,
           f"10 parameter sets x 1e6 slots, worst deviation {worst:.2f} standard errors")


def _cases(rows):
    return [k for k, _ in itertools.groupby(r.case for r in rows)]


def test_criterion_5a_fig5_case_sequence(capsys):
    rows = run_sweep(load_config("fig5"))
    seq = _cases(rows)
    high = {r.case for r in rows if 40.0 < r.axis_value < 60.0}
    ok = seq[:2] == ["Psi5", "Psi3"] and "Psi4" not in seq and seq.count("Psi5") == 1 and high == {"Psi3"}
    report(capsys, "5a", "Fig. 5 case sequence as P1 rises", ok,
           f"sequence {' -> '.join(seq)}; cases on (40, 60) dB: {sorted(high)}")


def test_criterion_5b_fig6_peak_and_plateau(capsys):
    rows = [r for r in run_sweep(load_config("fig6")) if r.series_value == 1.0]
    x = np.array([r.axis_value for r in rows])
    y = np.array([r.thr_optimal for r in rows])
    peak = x[int(np.argmax(y))]
    interior = 0 < int(np.argmax(y)) < len(y) - 1
    tail = y[x >= 40.0]
    spread = float(np.max(np.abs(tail - y[-1])) / y[-1])
    ok = interior and abs(peak - 18.0) <= 3.0 and spread < 0.01
    report(capsys, "5b", "Fig. 6 strong-RSI peak then plateau", ok,
           f"peak {y.max():.4f} at P2 = {peak:g} dB, final {y[-1]:.4f}, 40-60 dB spread {spread:.2e}")


def test_criterion_5c_fig4_high_rate_coincidence(capsys):
    rows = run_sweep(load_config("fig4"))
    by = {(r.series_value, r.axis_value): r for r in rows}
    diffs = []
    for (series, x), r in by.items():
        if series != 0.0:
            continue
        strong = by[(20.0, x)]
        if r.case in ("Psi1", "Psi2") and strong.case in ("Psi1", "Psi2"):
            diffs.append((x, abs(r.thr_optimal - strong.thr_optimal)))
    worst = max((d for _, d in diffs), default=float("inf"))
    ok = bool(diffs) and worst < 1e-12
    xs = [x for x, _ in diffs]
    report(capsys, "5c", "Fig. 4 non-RSI vs I_r = 20 at high R0", ok,
           f"{len(diffs)} shared Psi1/Psi2 points (R0 {min(xs, default=0):g}..{max(xs, default=0):g}), "
           f"max difference {worst:.1e}")


def test_criterion_6_dominance_and_gain(capsys):
    worst = math.inf
    best_ratio, where = 0.0, None
    count = 0
    for name, values in preset_points():
        params = params_from_values(values)
        rp = region_probabilities(params)
        hybrid = closed_form_throughput(rp, params.r0).throughput
        hd = hd_optimal_throughput(rp, params.r0)
        worst = min(worst, hybrid - hd)
        count += 1
        if hd > 1e-12 and hybrid / hd > best_ratio:
            best_ratio, where = hybrid / hd, (name, values.get("r0"), values.get("i_r"), values.get("k_r"))
    ok = worst >= -1e-12
    report(capsys, 6, "hybrid >= HD-optimal on every preset point", ok,
           f"{count} points, min(hybrid - HD) = {worst:.1e}, max hybrid/HD ratio {best_ratio:.4f} "
           f"at {where[0]} (r0={where[1]:g})")


def test_criterion_7_queue_growth(capsys):
    params = load_config("fig4", overrides=["r0=2"]).params
    rp = region_probabilities(params)
    start = time.perf_counter()
    balanced = queue_growth_probe(SimConfig(params, optimal_policy(rp), horizon=1, seed=7), seeds=100)
    biased = queue_growth_probe(SimConfig(params, Policy.deterministic([1, 1, 4, 1, 1, 4]), horizon=1, seed=8),
                                seeds=100)
    elapsed = time.perf_counter() - start
    ok = (
        balanced.exponent is not None and abs(balanced.exponent - 0.5) <= 0.1
        and biased.exponent is not None and abs(biased.exponent - 1.0) <= 0.05
        and elapsed < 120.0
    )
    report(capsys, 7, "queue growth exponent over 100 seeds", ok,
           f"balanced {balanced.exponent:.3f}, arrival-biased {biased.exponent:.3f}, {elapsed:.1f}s")


def test_criterion_8_determinism(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"sim{k}.json"
        code = cli_main(["simulate", "--preset", "fig4", "--horizon", "200000", "--seed", "11", "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    sim_same = outs[0] == outs[1]
    json.loads(outs[0])
    cfg = load_config("fig3c", overrides=["simulate=true", "horizon=20000", "sweep_stop=3"], seed=5)
    csvs = [write_csv(run_sweep(cfg, jobs=1)), write_csv(run_sweep(cfg, jobs=1)), write_csv(run_sweep(cfg, jobs=2))]
    csv_same = len(set(csvs)) == 1
    report(capsys, 8, "byte-identical reruns", sim_same and csv_same,
           f"simulate JSON identical: {sim_same}; sweep CSV identical (serial x2, parallel): {csv_same}")
