"""
The subdivision gadget
======================

Split P_A x P_B into two interactions through a heavy mediator and watch the
second-order effective Hamiltonian converge as the gap grows.
"""
# %%
from fractions import Fraction

import numpy as np

from holoqpv import gadget_lab as gl

g = gl.build_subdivision_gadget("X", "Z", delta0=0.01, Delta=1e4, p=3)
print("second-order residual:", gl.second_order_residual(g))

# %% Exact diagonalisation of the full gadget over a gap sweep.
sweep = [1e3, 1e4, 1e5, 1e6, 1e7]
eps = [gl.verify_second_order(gl.build_subdivision_gadget("X", "Z", 0.01, D), 1e-3, 1e-2).certificate.eps
       for D in sweep]
for D, e in zip(sweep, eps):
    print(f"Delta={D:.0e}  eps={e:.3e}")
print("log-log slope:", round(float(np.polyfit(np.log(sweep), np.log(eps), 1)[0]), 3))

# %% Interaction strengths across recursion rounds.
print([str(gl.delta_sequence(x, Fraction(1))[0]) for x in range(6)])
rep = gl.recursion_report(gl.RecursionSchedule(delta0=1.0, r_max=4, tau=2.0, R=1, n=2, b=1.0))
print("log_tau ||H_sim|| after the recursion:", rep.h_sim.log_tau)
