"""Three-particle GHZ basis, its value/parity coding, and GHZ-basis measurement."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .qstate import Family, QStateError, QubitLabel, StateVector, project_family

# k -> (leading ket, relative sign): |Psi_k> = (|t> + sign |~t>) / sqrt(2)
GHZ_TERMS = (
    ("000", +1),
    ("000", -1),
    ("001", +1),
    ("001", -1),
    ("010", +1),
    ("010", -1),
    ("011", +1),
    ("011", -1),
)

VALUE_ZERO = frozenset({0, 1, 4, 5})
VALUE_ONE = frozenset({2, 3, 6, 7})
PARITY_PLUS = frozenset({0, 2, 4, 6})
PARITY_MINUS = frozenset({1, 3, 5, 7})


def _check_index(k: int) -> None:
    if not (isinstance(k, (int, np.integer)) and 0 <= k <= 7):
        raise QStateError(f"GHZ index must be in 0..7, got {k!r}")


def ghz_amplitudes(k: int) -> np.ndarray:
    _check_index(k)
    lead, sign = GHZ_TERMS[k]
    amps = np.zeros(8, dtype=complex)
    amps[int(lead, 2)] = 1 / np.sqrt(2)
    amps[7 - int(lead, 2)] = sign / np.sqrt(2)
    return amps


def ghz_state(k: int, labels: Sequence[QubitLabel]) -> StateVector:
    labels = tuple(labels)
    if len(labels) != 3:
        raise QStateError("a GHZ state lives on exactly three qubits")
    return StateVector(labels, ghz_amplitudes(k))


@lru_cache(maxsize=1024)
def _ghz_family(labels: tuple[QubitLabel, ...]) -> Family:
    return Family(ghz_state(k, labels) for k in range(8))


def ghz_family(labels: Sequence[QubitLabel]) -> Family:
    """The eight GHZ states on ``labels`` in index order."""
    return _ghz_family(tuple(labels))


def ghz_code(k: int) -> tuple[int, int]:
    """(value bit, parity sign) published for outcome ``|Psi_k>``."""
    _check_index(k)
    value = 0 if k in VALUE_ZERO else 1
    parity = +1 if k in PARITY_PLUS else -1
    return value, parity


@dataclass(frozen=True)
class GhzOutcome:
    index: int
    value: int
    parity: int

    @classmethod
    def from_index(cls, k: int) -> "GhzOutcome":
        value, parity = ghz_code(k)
        return cls(int(k), value, parity)

    def to_dict(self) -> dict:
        return {"index": self.index, "V": self.value, "P": sign_symbol(self.parity)}


def sign_symbol(sign: int) -> str:
    return "+" if sign > 0 else "-"


def parse_sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return +1
    if text in ("-", "-1", "−"):
        return -1
    raise QStateError(f"not a sign: {text!r}")


def measure_ghz(
    state: StateVector, triple: Sequence[QubitLabel], rand: float
) -> tuple[GhzOutcome, StateVector]:
    k, collapsed = project_family(state, triple, ghz_family(triple), rand)
    return GhzOutcome.from_index(k), collapsed
