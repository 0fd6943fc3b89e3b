"""What the receiver gets when a controller keeps quiet."""
from qsts.adversary import missing_controller_experiment

# %% cooperative baseline
print("all controllers:", missing_controller_experiment(1, (), 2000, seed=1).rate)

# %% one silent controller costs a factor of two per shared qubit
for m in (1, 2, 3):
    s = missing_controller_experiment(m, "bob2", 4000, seed=m)
    print(f"m={m}: rate {s.rate:.4f} +- {s.ci95_halfwidth:.4f}, expected {0.5**m}")

# %% two silent controllers are no worse than one: only the sign product matters
s = missing_controller_experiment(1, ["bob1", "bob3"], 4000, seed=9)
print("two missing, m=1:", round(s.rate, 4))
