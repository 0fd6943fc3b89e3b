"""Security experiments: a withheld controller parity, and intercept-resend on decoys."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .decoys import EveModel, EveRecord, eve_act, run_decoy_check
from .protocol import (
    SCHEMA_VERSION,
    Party,
    ProtocolConfig,
    ProtocolError,
    alice_measure,
    attach_secret,
    controller_measure,
    is_success,
    recover,
    run_rng,
    secret_labels,
    setup_channel,
)
from .qstate import random_pure_state

__all__ = [
    "DetectionStats",
    "EveModel",
    "EveRecord",
    "SuccessStats",
    "eve_act",
    "intercept_resend_experiment",
    "missing_controller_experiment",
]


@dataclass(frozen=True)
class SuccessStats:
    trials: int
    successes: int
    m: int = 1
    receiver: Party = Party.CHARLIE
    missing: tuple[Party, ...] = ()

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def ci95_halfwidth(self) -> float:
        p = self.rate
        return 1.96 * math.sqrt(p * (1 - p) / self.trials)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "success_stats",
            "m": self.m,
            "receiver": self.receiver.value,
            "missing": [p.value for p in self.missing],
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
            "ci95_halfwidth": self.ci95_halfwidth,
        }


@dataclass(frozen=True)
class DetectionStats:
    decoys: int
    mismatches: int
    eve: EveModel = EveModel.NONE
    trials: int = 1
    aborted_runs: int = 0

    @property
    def per_decoy_rate(self) -> float:
        return self.mismatches / self.decoys if self.decoys else 0.0

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "detection_stats",
            "eve": self.eve.value,
            "trials": self.trials,
            "decoys": self.decoys,
            "mismatches": self.mismatches,
            "per_decoy_rate": self.per_decoy_rate,
            "aborted_runs": self.aborted_runs,
        }


def _parse_missing(missing, receiver: Party) -> tuple[Party, ...]:
    if missing is None:
        return ()
    if isinstance(missing, (str, Party)):
        missing = [missing]
    parties = tuple(Party.parse(p) for p in missing)
    for p in parties:
        if p is Party.ALICE or p is receiver:
            raise ProtocolError(f"{p.value} is not a controller and cannot withhold a parity")
    if len(set(parties)) != len(parties):
        raise ProtocolError("a controller is listed twice as missing")
    return parties


def missing_controller_experiment(
    m: int,
    missing: "Party | str | Iterable[Party | str] | None",
    trials: int,
    seed: int = 0,
    receiver: Party | str = Party.CHARLIE,
) -> SuccessStats:
    """Receiver reconstructs with a coin flip in place of each withheld parity.

    Withholding controllers still measure in the X basis; only their
    published signs are replaced. ``missing=()`` is the cooperative control
    arm. Trial ``t`` draws everything from ``run_rng(seed, t)``.
    """
    receiver = Party.parse(receiver)
    absent = _parse_missing(missing, receiver)
    if trials < 1:
        raise ProtocolError("trials must be >= 1")
    config = ProtocolConfig(m, receiver)
    successes = 0
    for t in range(trials):
        rng = run_rng(seed, t)
        secret = random_pure_state(secret_labels(m), rng)
        channel, _ = setup_channel(config, rng)
        joint = attach_secret(channel, secret)
        outcomes, joint, _ = alice_measure(joint, m, rng, receiver)
        signs = {}
        for c in config.controllers:
            signs[c], joint, _ = controller_measure(joint, c, m, rng, receiver)
        for c in absent:
            signs[c] = [1 if rng.random() < 0.5 else -1 for _ in range(m)]
        _, _, fid = recover(joint, secret, outcomes, signs, receiver)
        successes += is_success(fid)
    return SuccessStats(trials, successes, m, receiver, absent)


def intercept_resend_experiment(
    n_decoys: int, eve: EveModel | str, trials: int, seed: int = 0, threshold: int = 0
) -> DetectionStats:
    """Pool ``trials`` independent decoy checks of ``n_decoys`` decoys each."""
    if not isinstance(eve, EveModel):
        eve = EveModel.parse(eve)
    if n_decoys < 1 or trials < 1:
        raise ValueError("n_decoys and trials must be >= 1")
    mismatches = aborted = 0
    for t in range(trials):
        report = run_decoy_check(n_decoys, eve, run_rng(seed, t), threshold=threshold)
        mismatches += report.mismatches
        aborted += report.verdict.value == "abort"
    return DetectionStats(n_decoys * trials, mismatches, eve, trials, aborted)

