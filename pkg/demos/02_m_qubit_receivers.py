"""Entangled multi-qubit secrets, every agent taking a turn as receiver."""
import numpy as np

from qsts import ProtocolConfig, run_protocol
from qsts.protocol import AGENTS, run_rng, secret_labels
from qsts.qstate import StateVector, random_pure_state

# %%
for m in (1, 2, 3):
    for receiver in AGENTS:
        fids = []
        for i in range(50):
            rng = run_rng(m, i)
            secret = random_pure_state(secret_labels(m), rng)
            fids.append(run_protocol(ProtocolConfig(m, receiver), secret, rng).fidelity)
        print(f"m={m} receiver={receiver.value:8s} worst fidelity {min(fids):.12f}")

# %% a Bell-pair secret survives intact, entanglement included
r = 2**-0.5
bell = np.array([r, 0, 0, r])
t = run_protocol(ProtocolConfig(2, "bob1", seed=3), StateVector(secret_labels(2), bell))
print("bell pair via bob1:", t.fidelity, [c.symbol for c in t.corrections])
