"""Resource counting from the closed form and from live transcripts."""
from qsts import ProtocolConfig, run_protocol
from qsts.metrics import efficiency, transcript_audit

# %%
for m in (1, 2, 8, 64):
    r = efficiency(m)
    print(f"m={m:2d} q_u={r.q_u:3d} q_t={r.q_t:3d} b_t={r.b_t:3d} eta_t={r.eta_t}")

# %% the same numbers fall out of counting a real run; decoys are tallied apart
t = run_protocol(ProtocolConfig(3, "bob3", seed=5, decoys_per_sequence=4))
a = transcript_audit(t)
print("audited:", a.q_t, "qubits,", a.b_t, "bits, eta_t", a.eta_t, "| decoys", a.decoys, "decoy bits", t.decoy_bits)
