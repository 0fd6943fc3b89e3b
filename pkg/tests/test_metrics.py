from fractions import Fraction

import pytest

from qsts.metrics import AuditError, efficiency, transcript_audit
from qsts.protocol import AGENTS, ProtocolConfig, run_protocol, run_rng


def test_efficiency_m1():
    r = efficiency(1)
    assert (r.q_u, r.q_t, r.b_t) == (4, 4, 5)
    assert r.eta_q == 1 and r.eta_t == Fraction(4, 9)


def test_efficiency_m3():
    r = efficiency(3)
    assert (r.q_u, r.q_t, r.b_t, r.eta_q, r.eta_t) == (12, 12, 15, 1, Fraction(4, 9))


def test_eta_t_constant_in_m():
    assert all(efficiency(m).eta_t == Fraction(4, 9) for m in range(1, 65))


def test_efficiency_rejects_bad_m():
    with pytest.raises(ValueError):
        efficiency(0)


def test_efficiency_serialisation():
    d = efficiency(2).to_dict()
    assert d["eta_t"] == {"num": 4, "den": 9, "decimal": 4 / 9}
    assert d["eta_q"]["num"] == d["eta_q"]["den"] == 1


@pytest.mark.parametrize("m, bits, qubits", [(1, 5, 4), (2, 10, 8), (3, 15, 12)])
def test_audit_counts(m, bits, qubits):
    for receiver in AGENTS:
        t = run_protocol(ProtocolConfig(m, receiver, decoys_per_sequence=3), rng=run_rng(m, 0))
        r = transcript_audit(t)
        assert (r.b_t, r.q_t, r.decoys) == (bits, qubits, 6)
        assert r.eta_t == efficiency(m).eta_t


def test_audit_rejects_aborted_run():
    t = run_protocol(ProtocolConfig(1, decoys_per_sequence=40, eve="random", seed=2))
    assert t.aborted
    with pytest.raises(AuditError):
        transcript_audit(t)


def test_audit_detects_missing_message():
    t = run_protocol(ProtocolConfig(2, seed=1))
    t.messages.pop()
    with pytest.raises(AuditError):
        transcript_audit(t)
