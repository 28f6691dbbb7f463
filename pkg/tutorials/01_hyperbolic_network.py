"""
Building a holographic code on the {5,4} tiling
===============================================

Tile the hyperbolic disc with pentagons, hang a five-qubit perfect tensor on
every cell and contract the result into a boundary state.
"""
# %%
import numpy as np

from holoqpv import hyperbolic_network as hn

# %% Layers grow geometrically; the shell sizes obey N(x) = 3 N(x-1) - N(x-2).
net = hn.build_tessellation(hn.TessellationSpec(p=5, q=4, R=5))
print("tensors per layer:", net.layer_counts)
print("fitted growth rate:", round(hn.measure_growth_rate(net), 4))

# %% The six-leg tensor is an isometry across every bipartition.
rep = hn.check_perfect_isometry(hn.make_perfect_tensor(6, 2))
print("bipartitions checked:", len(rep.deviations), "worst deviation:", rep.max_deviation)

# %% A single cell maps one bulk qubit into five boundary qubits.
cell = hn.build_tessellation(hn.TessellationSpec(5, 4, 0))
M = hn.bulk_to_boundary_isometry(cell)
print("isometry shape:", M.shape, "max |M^dag M - I|:", np.abs(M.conj().T @ M - np.eye(M.shape[1])).max())

# %% One ring around the centre is still small enough to contract densely.
small = hn.build_tessellation(hn.TessellationSpec(5, 4, 1))

# %% Feeding |0> into every bulk leg gives a 20-qubit boundary state.
state = hn.contract_to_boundary_state(small)
print("boundary qubits:", state.qubits, "norm:", np.linalg.norm(state.amplitudes))
