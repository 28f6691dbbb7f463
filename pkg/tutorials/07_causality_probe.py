"""
Moving a qubit down a Heisenberg chain
======================================

How strong must the couplings be to carry a state across L qubits in time pi/2?
"""
# %%
import math

import numpy as np

from holoqpv import causality_probe as cp

psi = np.array([1, 1j]) / math.sqrt(2)
for t in (0.0, math.pi / 4, math.pi / 2):
    print(f"t={t:.3f}", np.round(cp.swap_exact_evolution(psi, t), 4))

# %% Smallest coupling on a 1% grid with worst-case infidelity <= 0.9.
for L in range(2, 9):
    s = cp.min_coupling_search(L, 0.9)
    print(f"L={L}: tau*={s.tau:.3f}  infidelity={s.infidelity:.3f}")

# %% Exact infidelity versus the cos^n heuristic at tau = 1 and 4.
for L, tau, exact, heur in cp.transfer_scan(range(2, 9), [1.0, 4.0]):
    print(L, tau, round(exact, 4), round(heur, 4))
