"""Decoy-photon channel check and the intercept-resend eavesdropper.

Decoys are simulated as standalone single-qubit trials. Alice prepares each
in one of |0>, |1>, |+x>, |-x>; after transmission she discloses positions and
preparation bases and the recipient measures each decoy in that basis.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .qstate import label, measure_basis, single_qubit

DECOY_STATES = ("0", "1", "+", "-")
DECOY_BASIS = {"0": "Z", "1": "Z", "+": "X", "-": "X"}
# bits disclosed per decoy: Alice's basis, the recipient's outcome
DISCLOSED_BITS_PER_DECOY = 2

_DECOY_LABEL = label("D")


class EveModel(enum.Enum):
    NONE = "none"
    INTERCEPT_RESEND_RANDOM = "intercept-resend-random"
    INTERCEPT_RESEND_Z = "intercept-resend-z"

    @classmethod
    def parse(cls, text: str) -> "EveModel":
        aliases = {"random": cls.INTERCEPT_RESEND_RANDOM, "z": cls.INTERCEPT_RESEND_Z}
        return aliases.get(text.lower()) or cls(text.lower())


class Verdict(enum.Enum):
    ACCEPT = "accept"
    ABORT = "abort"


def _state_name(basis: str, outcome: int) -> str:
    if basis == "Z":
        return str(outcome)
    return "+" if outcome > 0 else "-"


@dataclass(frozen=True)
class EveRecord:
    basis: str | None
    outcome: int | None


def eve_act(decoy: str, eve: EveModel, rng: np.random.Generator) -> tuple[str, EveRecord]:
    """Eve's action on one transiting decoy: the state she forwards and what she saw."""
    if decoy not in DECOY_STATES:
        raise ValueError(f"unknown decoy state {decoy!r}")
    if eve is EveModel.NONE:
        return decoy, EveRecord(None, None)
    if eve is EveModel.INTERCEPT_RESEND_RANDOM:
        basis = "Z" if rng.random() < 0.5 else "X"
    else:
        basis = "Z"
    outcome, _ = measure_basis(single_qubit(_DECOY_LABEL, decoy), _DECOY_LABEL, basis, rng.random())
    return _state_name(basis, outcome), EveRecord(basis, outcome)


@dataclass
class DecoyReport:
    positions: list[int]
    prepared: list[str]
    measured_ok: list[bool]
    threshold: int = 0
    eve_records: list[EveRecord] = field(default_factory=list, repr=False)

    @property
    def mismatches(self) -> int:
        return sum(not ok for ok in self.measured_ok)

    @property
    def verdict(self) -> Verdict:
        return Verdict.ABORT if self.mismatches > self.threshold else Verdict.ACCEPT

    @property
    def disclosed_bits(self) -> int:
        return DISCLOSED_BITS_PER_DECOY * len(self.prepared)

    def to_dict(self) -> dict:
        return {
            "positions": list(self.positions),
            "prepared": list(self.prepared),
            "measured_ok": list(self.measured_ok),
            "mismatches": self.mismatches,
            "threshold": self.threshold,
            "verdict": self.verdict.value,
        }


def run_decoy_check(
    n: int,
    eve: EveModel,
    rng: np.random.Generator,
    *,
    sequence_length: int = 0,
    threshold: int = 0,
) -> DecoyReport:
    """Insert ``n`` decoys into a sequence of ``sequence_length`` particles and check them."""
    if n < 0:
        raise ValueError("number of decoys must be nonnegative")
    positions = sorted(int(p) for p in rng.choice(sequence_length + n, size=n, replace=False)) if n else []
    prepared, ok, records = [], [], []
    for _ in range(n):
        decoy = DECOY_STATES[int(rng.integers(4))]
        resent, record = eve_act(decoy, eve, rng)
        basis = DECOY_BASIS[decoy]
        outcome, _ = measure_basis(single_qubit(_DECOY_LABEL, resent), _DECOY_LABEL, basis, rng.random())
        prepared.append(decoy)
        ok.append(_state_name(basis, outcome) == decoy)
        records.append(record)
    return DecoyReport(positions, prepared, ok, threshold, records)
