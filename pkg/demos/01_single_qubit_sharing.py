"""Share one qubit with Charlie and walk through every message."""
import numpy as np

from qsts import ProtocolConfig, run_protocol
from qsts.qstate import StateVector, label

# %% an arbitrary secret with a relative phase
secret = StateVector([label("x", 1)], [0.6, 0.8 * np.exp(0.7j)])
t = run_protocol(ProtocolConfig(m=1, receiver="charlie", seed=7), secret)

# %% Alice publishes two bits per shared qubit, each controller one bit
for msg in t.messages:
    print(msg.sender.value, msg.qubit_index, msg.payload.to_dict())

print("corrections:", [c.symbol for c in t.corrections])
print("fidelity:", t.fidelity)
print("classical bits:", t.classical_bits_sent, "qubits sent:", t.qubits_transmitted)
