"""
Time dilation and butterfly velocities
======================================

Scaling layer-x norms as tau^(x-R) makes boundary signals travel at a roughly
constant speed. Uniform norms make them speed up toward the centre.
"""
# %%
import numpy as np

from holoqpv import causal_geometry as cg
from holoqpv import hyperbolic_network as hn

# %% Through-the-bulk versus around-the-boundary transit times.
for R in range(2, 9):
    T1, T2, ratio = cg.transit_times(cg.DilationParams(tau=3.0, R=R, n=2, m=3))
    print(f"R={R}: T1={T1:.0f}  T2={T2:.0f}  T1/T2={ratio:.3f}")

# %% Butterfly profiles on an R=4 tiling.
net = hn.build_tessellation(hn.TessellationSpec(5, 4, 4), None)
tau = hn.measure_growth_rate(net)
canon = cg.butterfly_profile(net, cg.norm_schedule(cg.DilationParams(tau, 4)))
uni = cg.butterfly_profile(net, cg.uniform_schedule(4))
print("canonical velocities:", np.round(canon.velocities, 3))
print("uniform velocities:  ", np.round(uni.velocities, 3))
print("canonical coefficient of variation:", round(float(np.std(canon.velocities) / np.mean(canon.velocities)), 3))
