"""Qubit and classical-bit accounting, kept in exact rationals."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .protocol import AGENTS, SCHEMA_VERSION, Party, RunTranscript

QUBITS_PER_SHARED_QUBIT = 4
BITS_PER_SHARED_QUBIT = 5


class AuditError(ValueError):
    """A transcript's observed counts disagree with the efficiency formulas."""


@dataclass(frozen=True)
class EfficiencyReport:
    m: int
    q_u: int
    q_t: int
    b_t: int
    decoys: int = 0

    @property
    def eta_q(self) -> Fraction:
        return Fraction(self.q_u, self.q_t)

    @property
    def eta_t(self) -> Fraction:
        return Fraction(self.q_u, self.q_t + self.b_t)

    def to_dict(self) -> dict:
        def rational(x: Fraction) -> dict:
            return {"num": x.numerator, "den": x.denominator, "decimal": float(x)}

        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "efficiency_report",
            "m": self.m,
            "q_u": self.q_u,
            "q_t": self.q_t,
            "b_t": self.b_t,
            "decoys": self.decoys,
            "eta_q": rational(self.eta_q),
            "eta_t": rational(self.eta_t),
        }


def efficiency(m: int) -> EfficiencyReport:
    """Every channel qubit is useful; Alice sends 2m bits and each controller m."""
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    q = QUBITS_PER_SHARED_QUBIT * m
    return EfficiencyReport(m, q, q, BITS_PER_SHARED_QUBIT * m)


def transcript_audit(t: RunTranscript) -> EfficiencyReport:
    """Recount a completed run's traffic and check it against :func:`efficiency`.

    Decoys are reported but left out of ``q_t``.
    """
    if not t.completed:
        raise AuditError("cannot audit an aborted or unfinished run")
    m = t.config.m
    per_sender: dict[Party, list[int]] = {}
    for msg in t.messages:
        per_sender.setdefault(msg.sender, []).append(msg.qubit_index)
    expected_senders = {Party.ALICE, *(p for p in AGENTS if p is not t.config.receiver)}
    if set(per_sender) != expected_senders:
        raise AuditError(f"unexpected senders {sorted(p.value for p in per_sender)}")
    for sender, indices in per_sender.items():
        if sorted(indices) != list(range(1, m + 1)):
            raise AuditError(f"{sender.value} did not send one message per qubit")
    observed = EfficiencyReport(
        m,
        q_u=len(t.transmitted),
        q_t=len(t.transmitted),
        b_t=t.classical_bits_sent,
        decoys=t.decoy_count,
    )
    expected = efficiency(m)
    if (observed.q_u, observed.q_t, observed.b_t) != (expected.q_u, expected.q_t, expected.b_t):
        raise AuditError(f"observed {observed} disagrees with {expected}")
    return observed
