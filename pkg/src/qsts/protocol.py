"""Five-party sharing of an arbitrary m-qubit state over 2m GHZ triples.

Alice holds the secret qubits ``x_i`` and, for every ``i``, one GHZ triple
``(A1_i, B1_i, B2_i)`` shared with Bob1/Bob2 and one ``(A2_i, B3_i, C_i)``
shared with Bob3/Charlie. She measures ``(x_i, A1_i, A2_i)`` in the GHZ basis
and publishes the value bit and parity of each outcome; the three agents
other than the receiver measure in the X basis and publish their signs; the
receiver applies one Pauli correction per qubit.

Any agent may be the receiver. For Bob1 or Bob2 Alice orders her triple as
``(x_i, A2_i, A1_i)``, so that the value bit always compares the secret with
the receiver's own GHZ pair and the correction table is unchanged.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .decoys import DecoyReport, EveModel, Verdict, run_decoy_check
from .ghz import GhzOutcome, ghz_family, ghz_state, sign_symbol
from .qstate import (
    DEFAULT_MAX_QUBITS,
    FIDELITY_ATOL,
    Pauli,
    QStateError,
    QubitLabel,
    Register,
    StateVector,
    labels_for,
    random_pure_state,
)

SCHEMA_VERSION = 1


class Party(enum.Enum):
    ALICE = "alice"
    BOB1 = "bob1"
    BOB2 = "bob2"
    BOB3 = "bob3"
    CHARLIE = "charlie"

    @classmethod
    def parse(cls, text: "str | Party") -> "Party":
        if isinstance(text, Party):
            return text
        try:
            return cls(text.lower())
        except ValueError:
            raise ProtocolError(f"unknown party {text!r}") from None


AGENTS = (Party.BOB1, Party.BOB2, Party.BOB3, Party.CHARLIE)
AGENT_ROLE = {Party.BOB1: "B1", Party.BOB2: "B2", Party.BOB3: "B3", Party.CHARLIE: "C"}
# which of Alice's channel particles is entangled with each agent
AGENT_PAIR = {Party.BOB1: "A1", Party.BOB2: "A1", Party.BOB3: "A2", Party.CHARLIE: "A2"}
TRANSMITTED_ROLES = ("B1", "B2", "B3", "C")


class ProtocolError(ValueError):
    """Invalid protocol configuration or misuse of a protocol step."""


class ChannelAborted(Exception):
    """A decoy check failed; no channel was established."""

    def __init__(self, reports: Sequence[DecoyReport]):
        self.reports = list(reports)
        mism = [r.mismatches for r in self.reports]
        super().__init__(f"decoy check aborted the channel (mismatches {mism})")


@dataclass(frozen=True)
class ProtocolConfig:
    m: int
    receiver: Party = Party.CHARLIE
    seed: int = 0
    decoys_per_sequence: int = 0
    eve: EveModel = EveModel.NONE
    decoy_threshold: int = 0
    max_qubits: int = DEFAULT_MAX_QUBITS
    dense: bool = False

    def __post_init__(self):
        object.__setattr__(self, "receiver", Party.parse(self.receiver))
        if not isinstance(self.eve, EveModel):
            object.__setattr__(self, "eve", EveModel.parse(self.eve))
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ProtocolError(f"m must be a positive integer, got {self.m!r}")
        if 7 * self.m > self.max_qubits:
            raise ProtocolError(
                f"m={self.m} needs {7 * self.m} qubits, cap is {self.max_qubits}"
            )
        if self.receiver is Party.ALICE:
            raise ProtocolError("Alice is the dealer and cannot be the receiver")
        if self.decoys_per_sequence < 0:
            raise ProtocolError("decoys_per_sequence must be nonnegative")

    @property
    def controllers(self) -> tuple[Party, ...]:
        return tuple(p for p in AGENTS if p is not self.receiver)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "receiver": self.receiver.value,
            "seed": self.seed,
            "decoys_per_sequence": self.decoys_per_sequence,
            "eve": self.eve.value,
            "decoy_threshold": self.decoy_threshold,
        }


@dataclass(frozen=True)
class AliceOutcome:
    value: int
    parity: int
    bits = 2

    def to_dict(self) -> dict:
        return {"kind": "alice_outcome", "V": self.value, "P": sign_symbol(self.parity)}


@dataclass(frozen=True)
class ControllerParity:
    sign: int
    bits = 1

    def to_dict(self) -> dict:
        return {"kind": "controller_parity", "sign": sign_symbol(self.sign)}


@dataclass(frozen=True)
class ClassicalMessage:
    sender: Party
    qubit_index: int
    payload: AliceOutcome | ControllerParity

    @property
    def bits(self) -> int:
        return self.payload.bits

    def to_dict(self) -> dict:
        return {"sender": self.sender.value, "qubit": self.qubit_index, **self.payload.to_dict()}


@dataclass
class RunTranscript:
    config: ProtocolConfig
    decoy_reports: list[DecoyReport]
    alice_outcomes: list[GhzOutcome] = field(default_factory=list)
    controller_signs: dict[tuple[Party, int], int] = field(default_factory=dict)
    corrections: list[Pauli] = field(default_factory=list)
    messages: list[ClassicalMessage] = field(default_factory=list)
    fidelity: float | None = None
    transmitted: list[QubitLabel] = field(default_factory=list)

    @property
    def aborted(self) -> bool:
        return any(r.verdict is Verdict.ABORT for r in self.decoy_reports)

    @property
    def completed(self) -> bool:
        return not self.aborted and self.fidelity is not None

    @property
    def classical_bits_sent(self) -> int:
        return sum(msg.bits for msg in self.messages)

    @property
    def channel_qubits_sent(self) -> int:
        return len(self.transmitted)

    @property
    def decoy_count(self) -> int:
        return sum(len(r.prepared) for r in self.decoy_reports)

    @property
    def qubits_transmitted(self) -> int:
        return self.channel_qubits_sent + self.decoy_count

    @property
    def decoy_bits(self) -> int:
        return sum(r.disclosed_bits for r in self.decoy_reports)

    def to_dict(self) -> dict:
        signs: dict[str, list[str]] = {}
        for (party, i), s in sorted(self.controller_signs.items(), key=lambda kv: (kv[0][0].value, kv[0][1])):
            signs.setdefault(party.value, []).append(sign_symbol(s))
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "run_transcript",
            "config": self.config.to_dict(),
            "status": "aborted" if self.aborted else "completed",
            "decoy_reports": [r.to_dict() for r in self.decoy_reports],
            "alice_outcomes": [o.to_dict() for o in self.alice_outcomes],
            "controller_signs": signs,
            "corrections": [p.symbol for p in self.corrections],
            "messages": [msg.to_dict() for msg in self.messages],
            "fidelity": self.fidelity,
            "classical_bits_sent": self.classical_bits_sent,
            "qubits_transmitted": self.qubits_transmitted,
            "channel_qubits_sent": self.channel_qubits_sent,
            "decoy_bits": self.decoy_bits,
        }


def run_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for run ``index`` of a batch seeded with ``seed``."""
    return np.random.default_rng([seed, index])


def secret_labels(m: int) -> tuple[QubitLabel, ...]:
    return labels_for("x", m)


def receiver_labels(receiver: Party, m: int) -> tuple[QubitLabel, ...]:
    return labels_for(AGENT_ROLE[Party.parse(receiver)], m)


def alice_triple(i: int, receiver: Party = Party.CHARLIE) -> tuple[QubitLabel, ...]:
    own = AGENT_PAIR[Party.parse(receiver)]
    other = "A1" if own == "A2" else "A2"
    return QubitLabel("x", i), QubitLabel(other, i), QubitLabel(own, i)


def channel_blocks(m: int) -> list[StateVector]:
    blocks = []
    for i in range(1, m + 1):
        blocks.append(ghz_state(0, [QubitLabel(r, i) for r in ("A1", "B1", "B2")]))
        blocks.append(ghz_state(0, [QubitLabel(r, i) for r in ("A2", "B3", "C")]))
    return blocks


def transmitted_labels(m: int) -> list[QubitLabel]:
    """Channel particles Alice sends out, in sending order."""
    return [QubitLabel(r, i) for r in TRANSMITTED_ROLES for i in range(1, m + 1)]


def setup_channel(config: ProtocolConfig, rng: np.random.Generator) -> tuple[Register, list[DecoyReport]]:
    """2m copies of |Psi_0> plus one decoy check per transmitted GHZ sequence.

    Raises :class:`ChannelAborted` if either check fails.
    """
    reports = [
        run_decoy_check(
            config.decoys_per_sequence,
            config.eve,
            rng,
            sequence_length=2 * config.m,
            threshold=config.decoy_threshold,
        )
        for _ in range(2)
    ]
    if any(r.verdict is Verdict.ABORT for r in reports):
        raise ChannelAborted(reports)
    channel = Register(channel_blocks(config.m), max_qubits=config.max_qubits)
    if config.dense:
        channel = channel.fused()
    return channel, reports


def attach_secret(channel: Register, secret: StateVector) -> Register:
    m = secret.n
    if set(secret.labels) != set(secret_labels(m)):
        raise ProtocolError("secret must be defined on x_1..x_m")
    expected = {QubitLabel(r, i) for i in range(1, m + 1) for r in ("A1", "B1", "B2", "A2", "B3", "C")}
    if set(channel.labels) != expected:
        raise ProtocolError(f"channel does not match an {m}-qubit secret")
    secret = secret.reorder(secret_labels(m))
    joint = Register([secret], max_qubits=channel.max_qubits).extend(*channel.blocks)
    if not channel.factorize:
        joint = joint.fused()
    # keep the x qubits first, then the channel in its own order
    return Register(joint.blocks, secret.labels + channel.order, joint.max_qubits, joint.factorize)


def alice_measure(
    joint: Register, m: int, rng: np.random.Generator, receiver: Party = Party.CHARLIE
) -> tuple[list[GhzOutcome], Register, list[ClassicalMessage]]:
    outcomes, messages = [], []
    for i in range(1, m + 1):
        triple = alice_triple(i, receiver)
        k, joint = joint.project(triple, ghz_family(triple), rng.random())
        outcome = GhzOutcome.from_index(k)
        outcomes.append(outcome)
        messages.append(ClassicalMessage(Party.ALICE, i, AliceOutcome(outcome.value, outcome.parity)))
    return outcomes, joint, messages


def _check_controller(controller: Party, receiver: Party) -> None:
    if controller is Party.ALICE or controller is receiver:
        raise ProtocolError(f"{controller.value} is not a controller when {receiver.value} receives")


def controller_measure(
    joint: Register,
    controller: Party,
    m: int,
    rng: np.random.Generator,
    receiver: Party = Party.CHARLIE,
) -> tuple[list[int], Register, list[ClassicalMessage]]:
    controller, receiver = Party.parse(controller), Party.parse(receiver)
    _check_controller(controller, receiver)
    signs, messages = [], []
    for q in labels_for(AGENT_ROLE[controller], m):
        sign, joint = joint.measure(q, "X", rng.random())
        signs.append(sign)
        messages.append(ClassicalMessage(controller, q.index, ControllerParity(sign)))
    return signs, joint, messages


_CORRECTIONS = {(0, +1): Pauli.I, (0, -1): Pauli.Z, (1, +1): Pauli.X, (1, -1): Pauli.IY}


def correction(value: int, p_total: int) -> Pauli:
    try:
        return _CORRECTIONS[(value, p_total)]
    except KeyError:
        raise ProtocolError(f"no correction for V={value!r}, P={p_total!r}") from None


def p_total(alice_parity: int, controller_signs: Sequence[int]) -> int:
    if len(controller_signs) != 3:
        raise ProtocolError("P_total needs exactly three controller signs")
    out = alice_parity
    for s in controller_signs:
        out *= s
    return out


def recover(
    joint: Register,
    secret: StateVector,
    outcomes: Sequence[GhzOutcome],
    signs: Mapping[Party, Sequence[int]],
    receiver: Party = Party.CHARLIE,
) -> tuple[list[Pauli], Register, float]:
    """Apply the receiver's corrections from published data and score the result."""
    receiver = Party.parse(receiver)
    controllers = [p for p in AGENTS if p is not receiver]
    targets = receiver_labels(receiver, len(outcomes))
    corrections = []
    for i, (outcome, q) in enumerate(zip(outcomes, targets)):
        sign = p_total(outcome.parity, [signs[c][i] for c in controllers])
        op = correction(outcome.value, sign)
        joint = joint.apply_1q(q, op)
        corrections.append(op)
    fid = joint.reduced_fidelity(secret.reorder(secret_labels(secret.n)), targets)
    return corrections, joint, fid


def run_protocol(
    config: ProtocolConfig,
    secret: StateVector | None = None,
    rng: np.random.Generator | None = None,
) -> RunTranscript:
    """One full run. A Haar-random secret is drawn from ``rng`` when none is given."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    m = config.m
    if secret is None:
        secret = random_pure_state(secret_labels(m), rng)
    elif secret.n != m:
        raise ProtocolError(f"secret has {secret.n} qubits, config says m={m}")
    try:
        channel, reports = setup_channel(config, rng)
    except ChannelAborted as exc:
        return RunTranscript(config, exc.reports, transmitted=transmitted_labels(m))
    joint = attach_secret(channel, secret)
    outcomes, joint, messages = alice_measure(joint, m, rng, config.receiver)
    signs = {}
    for c in config.controllers:
        signs[c], joint, sent = controller_measure(joint, c, m, rng, config.receiver)
        messages.extend(sent)
    corrections, joint, fid = recover(joint, secret, outcomes, signs, config.receiver)
    return RunTranscript(
        config,
        reports,
        alice_outcomes=outcomes,
        controller_signs={(c, i + 1): s for c, ss in signs.items() for i, s in enumerate(ss)},
        corrections=corrections,
        messages=messages,
        fidelity=fid,
        transmitted=transmitted_labels(m),
    )


@dataclass(frozen=True)
class BranchResult:
    probability: float
    fidelity: float
    corrections: tuple[Pauli, ...]

    @property
    def success(self) -> bool:
        return self.fidelity >= 1 - FIDELITY_ATOL


def run_branch(
    secret: StateVector,
    alice_indices: Sequence[int],
    controller_signs: Mapping[Party, Sequence[int]],
    receiver: Party = Party.CHARLIE,
    *,
    dense: bool = False,
) -> BranchResult:
    """Force every measurement outcome instead of sampling it.

    ``probability`` is the Born weight of the forced branch.
    """
    receiver = Party.parse(receiver)
    m = secret.n
    channel = Register(channel_blocks(m))
    if dense:
        channel = channel.fused()
    joint = attach_secret(channel, secret)
    prob = 1.0
    outcomes = []
    for i, k in enumerate(alice_indices, start=1):
        triple = alice_triple(i, receiver)
        p, joint = joint.collapse(triple, ghz_family(triple), k)
        prob *= p
        outcomes.append(GhzOutcome.from_index(k))
    signs = {Party.parse(c): list(s) for c, s in controller_signs.items()}
    for c in (p for p in AGENTS if p is not receiver):
        for q, s in zip(labels_for(AGENT_ROLE[c], m), signs[c]):
            p, joint = joint.collapse_basis(q, "X", s)
            prob *= p
    corrections, _, fid = recover(joint, secret, outcomes, signs, receiver)
    return BranchResult(prob, fid, tuple(corrections))


def is_success(fidelity: float | None) -> bool:
    return fidelity is not None and fidelity >= 1 - FIDELITY_ATOL


__all__ = [
    "AGENTS",
    "AliceOutcome",
    "BranchResult",
    "ChannelAborted",
    "ClassicalMessage",
    "ControllerParity",
    "Party",
    "ProtocolConfig",
    "ProtocolError",
    "RunTranscript",
    "alice_measure",
    "alice_triple",
    "attach_secret",
    "controller_measure",
    "correction",
    "is_success",
    "p_total",
    "recover",
    "run_branch",
    "run_protocol",
    "run_rng",
    "setup_channel",
    "QStateError",
]
