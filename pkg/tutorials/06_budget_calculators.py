"""
Cost models in scaling units
============================

Every O(1) constant is 1, and large numbers stay in log form.
"""
# %%
import math

from holoqpv import budget_calculators as bc
from holoqpv.logscale import LogScaled

# %% Phase estimation on a 4^n-sparse target.
n, R, tau = 20, 4, 2.0
q = bc.qpe_runtime(bc.QPEParams(d=LogScaled.from_ln(n * math.log(4)), N=n * tau ** R, h_norm=1.0, eps_prime=1e-3))
print("ln T_PE =", round(q.T_PE.ln, 2))

# %% The heavy norm needed for given history-state targets.
J = bc.heavy_norm_for_targets(q.T_PE, 9.0, 1.0, 1e-3, eta=0.2, eps=2e-3, Delta=1.0)
eta, eps, Delta = bc.history_state_errors(bc.HistoryStateModel(J, q.T_PE, 9.0), 1.0, 1e-3)
print("ln J =", round(J.ln, 2), " eta =", round(eta.to_float(), 4), " eps =", eps.to_float())

e = bc.sparse_history_exponents()
print("a+2b =", e.a + 2 * e.b, " x+2y+z =", e.x + 2 * e.y + e.z)

# %% Worked k-local scenario.
rep = bc.scenario_report("k_local", n=10, R=3, tau=2.0, alpha=5.0, alpha_p=7.0)
print(rep.to_dict())

# %% Attack error stays O(1/n) along the swap chains; the central term does not.
for R in (1, 5, 10):
    b = bc.attack_error_budget(bc.canonical_attack_schedule(2.0, R, 8))
    print(f"R={R}: n*swap chain={8 * b.swap_chain:.3f}  n*central={8 * b.central:.1f}")
