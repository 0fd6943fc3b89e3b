"""Decoy photons against an intercept-resend eavesdropper."""
from qsts import ProtocolConfig, run_protocol
from qsts.adversary import EveModel, intercept_resend_experiment

# %% per-decoy mismatch rate, pooled
for eve in EveModel:
    s = intercept_resend_experiment(50, eve, 100, seed=4)
    print(f"{eve.value:25s} mismatch rate {s.per_decoy_rate:.4f}, aborted {s.aborted_runs}/{s.trials}")

# %% with 16 decoys per sequence, Eve is caught before any secret is sent
t = run_protocol(ProtocolConfig(1, decoys_per_sequence=16, eve="intercept-resend-random", seed=2))
print("status:", "aborted" if t.aborted else "completed")
for r in t.decoy_reports:
    print(" mismatches", r.mismatches, "of", len(r.prepared))
