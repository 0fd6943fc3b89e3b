import math

import numpy as np
import pytest

from qsts.adversary import (
    DetectionStats,
    SuccessStats,
    eve_act,
    intercept_resend_experiment,
    missing_controller_experiment,
)
from qsts.decoys import DECOY_STATES, EveModel, Verdict, run_decoy_check
from qsts.protocol import Party, ProtocolError

import oracles


def test_exact_disturbance_oracle():
    assert oracles.decoy_disturbance("none") == 0
    assert oracles.decoy_disturbance("z") == pytest.approx(0.25)
    assert oracles.decoy_disturbance("random") == pytest.approx(0.25)


def test_eve_none_is_identity():
    rng = np.random.default_rng(0)
    for d in DECOY_STATES:
        assert eve_act(d, EveModel.NONE, rng)[0] == d


def test_eve_z_on_eigenstates_and_plus():
    rng = np.random.default_rng(0)
    assert all(eve_act("0", EveModel.INTERCEPT_RESEND_Z, rng)[0] == "0" for _ in range(50))
    assert all(eve_act("1", EveModel.INTERCEPT_RESEND_Z, rng)[0] == "1" for _ in range(50))
    n = 4000
    resent = [eve_act("+", EveModel.INTERCEPT_RESEND_Z, rng)[0] for _ in range(n)]
    assert set(resent) == {"0", "1"}
    assert abs(resent.count("0") / n - 0.5) < 3 * math.sqrt(0.25 / n)


def test_eve_rejects_unknown_state():
    with pytest.raises(ValueError):
        eve_act("i", EveModel.NONE, np.random.default_rng(0))


def test_decoy_check_without_eve():
    for n in (0, 1, 50):
        r = run_decoy_check(n, EveModel.NONE, np.random.default_rng(n), sequence_length=4)
        assert r.mismatches == 0 and r.verdict is Verdict.ACCEPT
        assert len(r.positions) == len(set(r.positions)) == n
        assert all(0 <= p < n + 4 for p in r.positions)


def test_decoy_threshold():
    r = run_decoy_check(200, EveModel.INTERCEPT_RESEND_Z, np.random.default_rng(1))
    assert r.mismatches > 0 and r.verdict is Verdict.ABORT
    r.threshold = r.mismatches
    assert r.verdict is Verdict.ACCEPT


@pytest.mark.parametrize("eve, name", [(m, m.value) for m in EveModel])
def test_detection_rates_match_oracle(eve, name):
    key = {"none": "none", "intercept-resend-z": "z", "intercept-resend-random": "random"}[name]
    p = oracles.decoy_disturbance(key)
    stats = intercept_resend_experiment(100, eve, 50, seed=12)
    assert stats.decoys == 5000 and stats.mismatches <= stats.decoys
    sigma = math.sqrt(p * (1 - p) / stats.decoys)
    assert abs(stats.per_decoy_rate - p) <= 3 * sigma


def test_missing_controller_control_arm():
    stats = missing_controller_experiment(2, (), 200, seed=3)
    assert stats.rate == 1.0


@pytest.mark.parametrize("m", [1, 2])
def test_missing_controller_rate(m):
    n = 3000
    stats = missing_controller_experiment(m, "bob1", n, seed=40 + m)
    p = 0.5**m
    assert abs(stats.rate - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_missing_controller_per_qubit_independence():
    n = 4000
    r1 = missing_controller_experiment(1, "bob3", n, seed=8).rate
    r2 = missing_controller_experiment(2, "bob3", n, seed=9).rate
    # delta method: sd of r1^2 is about 2 r1 sd(r1)
    sd = math.sqrt(0.25 * 0.75 / n + (2 * 0.5) ** 2 * 0.25 / n)
    assert abs(r2 - r1**2) <= 3 * sd


@pytest.mark.parametrize("m", [1, 2])
def test_two_missing_controllers_extrapolation(m):
    # two guessed signs multiply to one fair coin, so the rate stays 2^-m
    n = 3000
    stats = missing_controller_experiment(m, ["bob1", "bob2"], n, seed=5)
    p = 0.5**m
    assert abs(stats.rate - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_missing_controller_validation():
    with pytest.raises(ProtocolError):
        missing_controller_experiment(1, "charlie", 10)
    with pytest.raises(ProtocolError):
        missing_controller_experiment(1, "alice", 10)
    with pytest.raises(ProtocolError):
        missing_controller_experiment(1, "bob1", 0)
    with pytest.raises(ProtocolError):
        missing_controller_experiment(1, ["bob1", "bob1"], 10)


def test_stats_records():
    s = SuccessStats(100, 50, 1, Party.CHARLIE, (Party.BOB1,))
    assert s.rate == 0.5
    assert s.ci95_halfwidth == pytest.approx(1.96 * 0.05)
    assert s.to_dict()["missing"] == ["bob1"]
    d = DetectionStats(40, 10, EveModel.INTERCEPT_RESEND_Z)
    assert d.per_decoy_rate == 0.25
    assert d.to_dict()["eve"] == "intercept-resend-z"
