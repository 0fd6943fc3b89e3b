"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""

import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from qsts.adversary import intercept_resend_experiment, missing_controller_experiment
from qsts.ghz import PARITY_PLUS, VALUE_ZERO, ghz_code, ghz_family
from qsts.metrics import efficiency, transcript_audit
from qsts.protocol import AGENTS, Party, ProtocolConfig, run_branch, run_protocol, run_rng, secret_labels
from qsts.qstate import FIDELITY_ATOL, StateVector, label, random_pure_state

import oracles
from conftest import VERDICTS

RECEIVERS = (Party.CHARLIE, Party.BOB1, Party.BOB2, Party.BOB3)


def verdict(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    VERDICTS.append(line)
    assert ok, line


def within_3_sigma(rate, p, n):
    sigma = math.sqrt(p * (1 - p) / n)
    return abs(rate - p) <= 3 * sigma, sigma


@pytest.fixture(scope="module")
def sampled_runs():
    """1000 seeded runs at m=2 and at m=3, receivers in rotation, with wall times."""
    runs, seconds = {}, {}
    for m in (2, 3):
        start = time.perf_counter()
        out = []
        for i in range(1000):
            rng = run_rng(1000 + m, i)
            secret = random_pure_state(secret_labels(m), rng)
            config = ProtocolConfig(m, RECEIVERS[i % 4], decoys_per_sequence=2)
            out.append(run_protocol(config, secret, rng))
        seconds[m] = time.perf_counter() - start
        runs[m] = out
    return runs, seconds


def test_criterion_1_exhaustive_m1():
    rng = np.random.default_rng(2024)
    alpha, beta = random_pure_state(secret_labels(1), rng).amps
    secret = StateVector([label("x", 1)], [alpha, beta])
    start = time.perf_counter()
    worst, total_prob, oracle_worst = 1.0, 0.0, 1.0
    for k, signs in oracles.all_m1_branches():
        controllers = {Party.BOB1: [signs[0]], Party.BOB2: [signs[1]], Party.BOB3: [signs[2]]}
        branch = run_branch(secret, [k], controllers)
        o_prob, _, o_fid = oracles.branch_m1(alpha, beta, k, signs)
        assert branch.probability == pytest.approx(o_prob, abs=1e-12)
        worst = min(worst, branch.fidelity)
        oracle_worst = min(oracle_worst, o_fid)
        total_prob += branch.probability
    elapsed = time.perf_counter() - start
    ok = worst >= 1 - FIDELITY_ATOL and oracle_worst >= 1 - FIDELITY_ATOL and elapsed < 1.0
    ok = ok and abs(total_prob - 1) < 1e-10
    verdict(1, ok, f"64 branches, min fidelity {worst:.15f}, oracle min {oracle_worst:.15f}, {elapsed:.3f}s")


def test_criterion_2_sampled_m2_m3(sampled_runs):
    runs, seconds = sampled_runs
    worst = {m: min(t.fidelity for t in runs[m]) for m in runs}
    receivers = {t.config.receiver for t in runs[3]}
    ok = all(worst[m] >= 1 - FIDELITY_ATOL for m in runs) and seconds[3] < 120 and receivers == set(RECEIVERS)
    ok = ok and all(t.completed for m in runs for t in runs[m])
    verdict(
        2,
        ok,
        f"min fidelity m=2 {worst[2]:.12f} m=3 {worst[3]:.12f}, m=3 time {seconds[3]:.1f}s over 1000 runs",
    )


def test_criterion_3_outcome_uniformity():
    counts = np.zeros(8, dtype=int)
    config = ProtocolConfig(1)
    for i in range(80_000):
        rng = run_rng(3, i)
        secret = random_pure_state(secret_labels(1), rng)
        t = run_protocol(config, secret, rng)
        counts[t.alice_outcomes[0].index] += 1
    stat, p = chisquare(counts, np.full(8, 10_000))
    verdict(3, p > 0.001, f"histogram {counts.tolist()}, chi2 {stat:.2f}, p {p:.4f}")


def test_criterion_4_missing_controller():
    n, oks, parts = 10_000, [], []
    for m in (1, 2, 3):
        stats = missing_controller_experiment(m, Party.BOB1, n, seed=4)
        p = 0.5**m
        ok, sigma = within_3_sigma(stats.rate, p, n)
        oks.append(ok)
        parts.append(f"m={m} {stats.rate:.4f} vs {p} (+-{3 * sigma:.4f})")
    verdict(4, all(oks), f"{n} trials each, " + ", ".join(parts))


def test_criterion_5_decoy_detection():
    oks, parts = [], []
    for eve, key in (("none", "none"), ("intercept-resend-random", "random"), ("intercept-resend-z", "z")):
        stats = intercept_resend_experiment(100, eve, 100, seed=5)
        p = oracles.decoy_disturbance(key)
        if p == 0:
            ok, band = stats.mismatches == 0, "0"
        else:
            ok, sigma = within_3_sigma(stats.per_decoy_rate, p, stats.decoys)
            band = f"{p:.4f} (+-{3 * sigma:.4f})"
        oks.append(ok and stats.decoys == 10_000)
        parts.append(f"{eve} {stats.per_decoy_rate:.4f} vs {band}")
    verdict(5, all(oks), "10000 decoys each, " + ", ".join(parts))


def test_criterion_6_efficiency(sampled_runs):
    runs, _ = sampled_runs
    closed_form = all(
        (r.q_u, r.q_t, r.b_t, r.eta_t) == (4 * m, 4 * m, 5 * m, Fraction(4, 9))
        for m in range(1, 65)
        for r in [efficiency(m)]
    )
    extra = [run_protocol(ProtocolConfig(1, receiver, seed=s)) for receiver in AGENTS for s in range(25)]
    audited = [t for m in runs for t in runs[m]] + extra
    audits = [transcript_audit(t) for t in audited if t.completed]
    ok = closed_form and len(audits) == len(audited) and all(a.eta_t == Fraction(4, 9) for a in audits)
    verdict(6, ok, f"closed form for m in 1..64, {len(audits)} completed runs audited")


def test_criterion_7_basis_integrity():
    triple = [label("x", 1), label("A1", 1), label("A2", 1)]
    fam = ghz_family(triple)
    gram = np.array([[np.vdot(a.amps, b.amps) for b in fam] for a in fam])
    err = float(np.max(np.abs(gram - np.eye(8))))
    transcribed = max(float(np.max(np.abs(fam[k].amps - oracles.GHZ[k]))) for k in range(8))
    codes = all(
        ghz_code(k) == (0 if k in oracles.V_ZERO else 1, 1 if k in oracles.P_PLUS else -1) for k in range(8)
    )
    codes = codes and VALUE_ZERO == oracles.V_ZERO and PARITY_PLUS == oracles.P_PLUS
    verdict(7, err <= 1e-12 and transcribed == 0 and codes, f"max Gram deviation {err:.1e}, codes match")


CLI_CASES = [
    ["share", "--m", "1", "--receiver", "charlie", "--seed", "7", "--secret", "0.6,0.8"],
    ["share", "--m", "2", "--receiver", "bob1", "--seed", "3", "--decoys", "4"],
    ["share", "--m", "1", "--seed", "1", "--decoys", "32", "--eve", "random"],
    ["security", "--m", "2", "--missing", "bob2", "--trials", "300", "--seed", "1"],
    ["security", "--m", "1", "--trials", "200", "--format", "csv"],
    ["decoy", "--trials", "20", "--decoys", "16", "--seed", "9"],
    ["decoy", "--eve", "z", "--trials", "20", "--format", "csv"],
    ["efficiency", "--m", "3"],
    ["efficiency", "--m", "5", "--format", "csv"],
]


def test_criterion_8_cli_determinism():
    mismatched = []
    for argv in CLI_CASES:
        outs = [
            subprocess.run([sys.executable, "-m", "qsts", *argv], capture_output=True, check=False)
            for _ in range(2)
        ]
        same = outs[0].stdout == outs[1].stdout and outs[0].returncode == outs[1].returncode
        if not same or not outs[0].stdout:
            mismatched.append(" ".join(argv))
    verdict(8, not mismatched, f"{len(CLI_CASES)} commands run twice, mismatches: {mismatched or 'none'}")
