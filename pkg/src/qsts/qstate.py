"""Dense state-vector engine over labelled qubit registers.

Amplitude index ``b`` of a :class:`StateVector` addresses the computational
basis ket whose ``j``-th label carries the ``j``-th bit of ``b``, counted from
the most significant end, so ``labels=[a, b]`` and index 2 mean ``|10>``.

:class:`Register` is a product of dense blocks. It is what the protocol runs
on: projective measurements onto a pure family member always leave the
measured qubits in a product with the rest, so those qubits are split off as
fixed blocks instead of inflating a single 2^(7m) vector. Materialising a
register with :meth:`Register.to_statevector` gives the plain dense state.
"""
from __future__ import annotations

import enum
import re
import warnings
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

NORM_ATOL = 1e-10
FIDELITY_ATOL = 1e-9
DEFAULT_MAX_QUBITS = 21

# "D" marks a standalone decoy photon
ROLES = ("x", "A1", "A2", "B1", "B2", "B3", "C", "D")

_SQRT1_2 = 1 / np.sqrt(2)


class QStateError(ValueError):
    """Invalid register, label or measurement input."""


class QubitLabel(NamedTuple):
    role: str
    index: int = 1

    def __str__(self):
        return f"{self.role}_{self.index}"

    @classmethod
    def parse(cls, text: str) -> "QubitLabel":
        match = re.fullmatch(r"([A-Za-z][A-Za-z0-9]*)_(\d+)", text)
        if match is None:
            return label(text)
        return label(match.group(1), int(match.group(2)))


def label(role: str, index: int = 1) -> QubitLabel:
    """Validated :class:`QubitLabel` constructor."""
    if role not in ROLES:
        raise QStateError(f"unknown qubit role {role!r}")
    if index < 1:
        raise QStateError(f"qubit index must be >= 1, got {index}")
    return QubitLabel(role, index)


def labels_for(role: str, m: int) -> tuple[QubitLabel, ...]:
    return tuple(label(role, i) for i in range(1, m + 1))


class Pauli(enum.Enum):
    """The four correction operators; ``IY`` is the real matrix i*sigma_y."""

    I = "I"
    Z = "Z"
    X = "X"
    IY = "iY"

    @property
    def matrix(self) -> np.ndarray:
        return _PAULI_MATRICES[self].copy()

    @property
    def symbol(self) -> str:
        return self.value

    @classmethod
    def from_symbol(cls, symbol: str) -> "Pauli":
        return cls(symbol)


_PAULI_MATRICES = {
    Pauli.I: np.array([[1, 0], [0, 1]], dtype=complex),
    Pauli.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    Pauli.X: np.array([[0, 1], [1, 0]], dtype=complex),
    # |0><1| - |1><0|
    Pauli.IY: np.array([[0, 1], [-1, 0]], dtype=complex),
}

# Rows are the basis kets; outcome 0 of X is |+x>.
BASES = {
    "Z": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2,
}


def check_register_size(n: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
    if n > max_qubits:
        raise QStateError(f"register of {n} qubits exceeds cap of {max_qubits}")
    if max_qubits > DEFAULT_MAX_QUBITS and n > DEFAULT_MAX_QUBITS:
        warnings.warn(
            f"{n}-qubit dense register needs {16 * 2**n / 2**20:.0f} MiB per copy",
            ResourceWarning,
            stacklevel=2,
        )


class StateVector:
    """Normalised pure state on an ordered tuple of :class:`QubitLabel`.

    Treated as immutable: every operation in this module returns a new
    instance and the amplitude array is flagged read-only.
    """

    __slots__ = ("labels", "amps", "_pos")

    def __init__(self, labels: Iterable[QubitLabel], amps, *, normalize: bool = False):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise QStateError(f"duplicate labels in {[str(q) for q in labels]}")
        amps = np.array(amps, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(labels):
            raise QStateError(
                f"{amps.size} amplitudes do not match {len(labels)} labels"
            )
        norm2 = np.vdot(amps, amps).real
        if not np.isfinite(norm2):
            raise QStateError("non-finite amplitude")
        if normalize:
            if norm2 == 0:
                raise QStateError("cannot normalise the zero vector")
            amps = amps / np.sqrt(norm2)
        elif abs(norm2 - 1) > NORM_ATOL:
            raise QStateError(f"state not normalised (|psi|^2 = {norm2!r})")
        amps.flags.writeable = False
        self.labels = labels
        self.amps = amps
        self._pos = {q: j for j, q in enumerate(labels)}

    @property
    def n(self) -> int:
        return len(self.labels)

    def index_of(self, label: QubitLabel) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise QStateError(f"label {label} not in register") from None

    def __contains__(self, label) -> bool:
        return label in self._pos

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n)

    def amplitude(self, bits: str) -> complex:
        return complex(self.amps[int(bits, 2)])

    def reorder(self, labels: Sequence[QubitLabel]) -> "StateVector":
        labels = tuple(labels)
        if labels == self.labels:
            return self
        if set(labels) != set(self.labels) or len(labels) != self.n:
            raise QStateError("reorder needs a permutation of the register labels")
        axes = [self.index_of(q) for q in labels]
        amps = np.transpose(self.tensor(), axes).reshape(-1)
        return StateVector(labels, amps)

    def relabel(self, mapping: Mapping[QubitLabel, QubitLabel]) -> "StateVector":
        return StateVector([mapping.get(q, q) for q in self.labels], self.amps)

    def __repr__(self):
        names = ",".join(str(q) for q in self.labels)
        return f"StateVector([{names}], norm={np.linalg.norm(self.amps):.12f})"


def basis_state(labels: Sequence[QubitLabel], bits: str) -> StateVector:
    labels = tuple(labels)
    if len(bits) != len(labels) or set(bits) - {"0", "1"}:
        raise QStateError(f"bit string {bits!r} does not match {len(labels)} labels")
    amps = np.zeros(2 ** len(labels), dtype=complex)
    amps[int(bits, 2) if bits else 0] = 1
    return StateVector(labels, amps)


def single_qubit(target: QubitLabel, name: str) -> StateVector:
    """One of ``"0"``, ``"1"``, ``"+"``, ``"-"`` on ``label``."""
    table = {
        "0": (1, 0),
        "1": (0, 1),
        "+": (_SQRT1_2, _SQRT1_2),
        "-": (_SQRT1_2, -_SQRT1_2),
    }
    if name not in table:
        raise QStateError(f"unknown single-qubit state {name!r}")
    return StateVector([target], table[name])


def tensor(*states: StateVector) -> StateVector:
    if not states:
        raise QStateError("tensor of nothing")
    labels: list[QubitLabel] = []
    amps = np.ones(1, dtype=complex)
    for s in states:
        labels.extend(s.labels)
        amps = np.kron(amps, s.amps)
    if len(set(labels)) != len(labels):
        raise QStateError("tensor factors share labels")
    return StateVector(labels, amps, normalize=True)


def _as_matrix(op) -> np.ndarray:
    if isinstance(op, Pauli):
        return _PAULI_MATRICES[op]
    u = np.asarray(op, dtype=complex)
    if u.shape != (2, 2):
        raise QStateError(f"single-qubit operator must be 2x2, got {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(2), rtol=0, atol=NORM_ATOL):
        raise QStateError("single-qubit operator is not unitary")
    return u


def apply_1q(state: StateVector, target: QubitLabel, op) -> StateVector:
    u = _as_matrix(op)
    q = state.index_of(target)
    v = state.amps.reshape(2**q, 2, -1)
    out = np.empty_like(v)
    out[:, 0, :] = u[0, 0] * v[:, 0, :] + u[0, 1] * v[:, 1, :]
    out[:, 1, :] = u[1, 0] * v[:, 0, :] + u[1, 1] * v[:, 1, :]
    return StateVector(state.labels, out.reshape(-1))


class Family(tuple):
    """Tuple of measurement states that remembers its validated matrix per target order."""

    def __new__(cls, members: Iterable[StateVector]):
        obj = super().__new__(cls, members)
        obj._matrices = {}
        return obj


def _family_matrix(targets: Sequence[QubitLabel], family: Sequence[StateVector]) -> np.ndarray:
    cache = getattr(family, "_matrices", None)
    if cache is not None and targets in cache:
        return cache[targets]
    f = _build_family_matrix(targets, family)
    if cache is not None:
        cache[targets] = f
    return f


def _build_family_matrix(targets, family) -> np.ndarray:
    k = len(targets)
    rows = []
    for member in family:
        if set(member.labels) != set(targets) or member.n != k:
            raise QStateError("family member is not defined on the target qubits")
        rows.append(member.reorder(targets).amps)
    f = np.array(rows)
    if f.shape[0] != 2**k:
        raise QStateError(f"family of {f.shape[0]} states cannot span {k} qubits")
    gram = f.conj() @ f.T
    if not np.allclose(gram, np.eye(2**k), rtol=0, atol=NORM_ATOL):
        raise QStateError("measurement family is not orthonormal")
    return f


def _split(state: StateVector, targets: Sequence[QubitLabel]) -> tuple[np.ndarray, list[int]]:
    """Amplitudes as a (2^k, rest) matrix with target axes leading."""
    axes = [state.index_of(q) for q in targets]
    if len(set(axes)) != len(axes):
        raise QStateError("repeated measurement target")
    rest = [j for j in range(state.n) if j not in axes]
    mat = np.transpose(state.tensor(), axes + rest).reshape(2 ** len(axes), -1)
    return mat, axes + rest


def _join(mat: np.ndarray, perm: list[int]) -> np.ndarray:
    n = len(perm)
    return np.transpose(mat.reshape((2,) * n), np.argsort(perm)).reshape(-1)


def _check_norm(state: StateVector) -> None:
    norm2 = float(np.vdot(state.amps, state.amps).real)
    if abs(norm2 - 1) > NORM_ATOL:
        raise QStateError(f"corrupted state: |psi|^2 = {norm2!r}")


def _branch_amplitudes(state, targets, family):
    f = _family_matrix(targets, family)
    mat, perm = _split(state, targets)
    branches = f.conj() @ mat
    probs = np.einsum("ij,ij->i", branches.conj(), branches).real
    if abs(probs.sum() - 1) > NORM_ATOL:
        raise QStateError(f"Born probabilities sum to {probs.sum()!r}")
    return f, branches, probs, perm


def outcome_probabilities(
    state: StateVector, targets: Sequence[QubitLabel], family: Sequence[StateVector]
) -> np.ndarray:
    _check_norm(state)
    return _branch_amplitudes(state, tuple(targets), family)[2]


def sample_index(probs: np.ndarray, rand: float) -> int:
    """Smallest k whose cumulative probability exceeds ``rand``."""
    if not 0.0 <= rand < 1.0:
        raise QStateError(f"rand must lie in [0, 1), got {rand!r}")
    cumulative = np.cumsum(probs)
    k = int(np.searchsorted(cumulative, rand, side="right"))
    nonzero = np.flatnonzero(probs > 0)
    # rounding can push the total just below rand
    return min(k, int(nonzero[-1]))


def _collapse(state, f, branches, probs, perm, k) -> StateVector:
    if probs[k] <= 0:
        raise QStateError(f"outcome {k} has zero probability")
    mat = np.outer(f[k], branches[k] / np.sqrt(probs[k]))
    return StateVector(state.labels, _join(mat, perm), normalize=True)


def project_family(
    state: StateVector,
    targets: Sequence[QubitLabel],
    family: Sequence[StateVector],
    rand: float,
) -> tuple[int, StateVector]:
    """Sample a projective measurement onto ``family`` and collapse.

    ``family`` must be an orthonormal basis of the targets' space; outcome
    ``k`` is the index of the member the targets are projected onto.
    """
    _check_norm(state)
    targets = tuple(targets)
    f, branches, probs, perm = _branch_amplitudes(state, targets, family)
    k = sample_index(probs, rand)
    return k, _collapse(state, f, branches, probs, perm, k)


def collapse_to(
    state: StateVector,
    targets: Sequence[QubitLabel],
    family: Sequence[StateVector],
    k: int,
) -> tuple[float, StateVector]:
    """Force outcome ``k``; returns its Born probability and the collapsed state."""
    _check_norm(state)
    targets = tuple(targets)
    f, branches, probs, perm = _branch_amplitudes(state, targets, family)
    return float(probs[k]), _collapse(state, f, branches, probs, perm, k)


@lru_cache(maxsize=1024)
def basis_family(target: QubitLabel, basis: str) -> Family:
    try:
        rows = BASES[basis]
    except KeyError:
        raise QStateError(f"unknown basis {basis!r}") from None
    return Family(StateVector([target], row) for row in rows)


def _outcome_value(basis: str, k: int) -> int:
    # Z outcomes are bits, X outcomes are signs
    return k if basis == "Z" else 1 - 2 * k


def _outcome_index(basis: str, outcome: int) -> int:
    if basis == "Z" and outcome in (0, 1):
        return outcome
    if basis == "X" and outcome in (1, -1):
        return (1 - outcome) // 2
    raise QStateError(f"{outcome!r} is not an outcome of the {basis} basis")


def measure_basis(
    state: StateVector, target: QubitLabel, basis: str, rand: float
) -> tuple[int, StateVector]:
    """Measure one qubit in ``"Z"`` (outcome 0/1) or ``"X"`` (outcome +1/-1)."""
    k, collapsed = project_family(state, [target], basis_family(target, basis), rand)
    return _outcome_value(basis, k), collapsed


def fidelity(a: StateVector, b: StateVector) -> float:
    if set(a.labels) != set(b.labels) or a.n != b.n:
        raise QStateError("fidelity between different registers")
    overlap = np.vdot(a.amps, b.reorder(a.labels).amps)
    return float(min(1.0, abs(overlap) ** 2))


def reduced_fidelity(state: StateVector, target: StateVector) -> float:
    """<target| rho |target> with rho the reduced state of ``state`` on target's labels."""
    mat, _ = _split(state, target.labels)
    contracted = target.amps.conj() @ mat
    return float(min(1.0, np.vdot(contracted, contracted).real))


def random_pure_state(labels: Sequence[QubitLabel], rng: np.random.Generator) -> StateVector:
    labels = tuple(labels)
    if not labels:
        raise QStateError("random state needs at least one qubit")
    dim = 2 ** len(labels)
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(labels, amps, normalize=True)


class Register:
    """Product of dense :class:`StateVector` blocks over disjoint labels.

    Operations return a new register; blocks are shared between registers
    because they are never mutated. ``order`` fixes the label order used when
    the register is materialised. With ``factorize=False`` measured qubits stay
    inside their block, which keeps a register built by :meth:`dense` a single
    dense vector for its whole life.
    """

    __slots__ = ("blocks", "order", "max_qubits", "factorize")

    def __init__(
        self,
        blocks: Sequence[StateVector],
        order=None,
        max_qubits: int = DEFAULT_MAX_QUBITS,
        factorize: bool = True,
    ):
        self.blocks = tuple(blocks)
        labels = [q for b in self.blocks for q in b.labels]
        if len(set(labels)) != len(labels):
            raise QStateError("register blocks share labels")
        self.order = tuple(order) if order is not None else tuple(labels)
        if set(self.order) != set(labels) or len(self.order) != len(labels):
            raise QStateError("register order does not cover the block labels")
        self.max_qubits = max_qubits
        self.factorize = factorize
        check_register_size(len(self.order), max_qubits)

    @classmethod
    def dense(cls, state: StateVector, max_qubits: int = DEFAULT_MAX_QUBITS) -> "Register":
        return cls([state], state.labels, max_qubits, factorize=False)

    @property
    def labels(self) -> tuple[QubitLabel, ...]:
        return self.order

    def __contains__(self, label) -> bool:
        return label in self.order

    def _locate(self, label) -> int:
        for j, b in enumerate(self.blocks):
            if label in b:
                return j
        raise QStateError(f"label {label} not in register")

    def _with(self, drop: Iterable[int], add: Sequence[StateVector], order=None) -> "Register":
        drop = set(drop)
        kept = [b for j, b in enumerate(self.blocks) if j not in drop]
        return Register(kept + list(add), order or self.order, self.max_qubits, self.factorize)

    def fused(self) -> "Register":
        """Same state held as a single dense block, no further factoring."""
        return Register.dense(self.to_statevector(), self.max_qubits)

    def merged(self, labels: Iterable[QubitLabel]) -> tuple["Register", int]:
        """Register with every block touching ``labels`` fused into one, and its position."""
        idx = sorted({self._locate(q) for q in labels})
        if len(idx) == 1:
            return self, idx[0]
        reg = self._with(idx, [tensor(*(self.blocks[j] for j in idx))])
        return reg, len(reg.blocks) - 1

    def extend(self, *states: StateVector) -> "Register":
        order = self.order + tuple(q for s in states for q in s.labels)
        reg = self._with([], states, order)
        return reg if reg.factorize else reg.fused()

    def _measure(self, targets, family, choose) -> tuple[int, float, "Register"]:
        targets = tuple(targets)
        reg, j = self.merged(targets)
        block = reg.blocks[j]
        _check_norm(block)
        f, branches, probs, perm = _branch_amplitudes(block, targets, family)
        k = choose(probs)
        if not self.factorize:
            return k, float(probs[k]), reg._with([j], [_collapse(block, f, branches, probs, perm, k)])
        if probs[k] <= 0:
            raise QStateError(f"outcome {k} has zero probability")
        # the projected targets factor out as the family member itself
        add = [StateVector(targets, f[k])]
        rest = [q for q in block.labels if q not in set(targets)]
        if rest:
            add.append(StateVector(rest, branches[k] / np.sqrt(probs[k]), normalize=True))
        return k, float(probs[k]), reg._with([j], add)

    def project(self, targets, family, rand) -> tuple[int, "Register"]:
        k, _, reg = self._measure(targets, family, lambda p: sample_index(p, rand))
        return k, reg

    def collapse(self, targets, family, k) -> tuple[float, "Register"]:
        _, p, reg = self._measure(targets, family, lambda _: k)
        return p, reg

    def measure(self, target, basis, rand) -> tuple[int, "Register"]:
        k, reg = self.project([target], basis_family(target, basis), rand)
        return _outcome_value(basis, k), reg

    def collapse_basis(self, target, basis, outcome) -> tuple[float, "Register"]:
        k = _outcome_index(basis, outcome)
        return self.collapse([target], basis_family(target, basis), k)

    def apply_1q(self, target, op) -> "Register":
        j = self._locate(target)
        return self._with([j], [apply_1q(self.blocks[j], target, op)])

    def block_of(self, labels: Iterable[QubitLabel]) -> StateVector:
        reg, j = self.merged(labels)
        return reg.blocks[j]

    def to_statevector(self) -> StateVector:
        return tensor(*self.blocks).reorder(self.order)

    def reduced_fidelity(self, target: StateVector, labels: Sequence[QubitLabel]) -> float:
        """Fidelity of the qubits ``labels`` with ``target``, matched by position."""
        labels = tuple(labels)
        if len(labels) != target.n:
            raise QStateError("target and label list differ in size")
        return reduced_fidelity(self.block_of(labels), StateVector(labels, target.amps))
