"""
Entropy from cuts
=================

Min cuts bound a boundary region's entropy from above, the greedy geodesic
from below. On small networks the exact entropy sits in between.
"""
# %%
import numpy as np

from holoqpv import entropy_bounds as eb
from holoqpv import hyperbolic_network as hn

net = hn.build_tessellation(hn.TessellationSpec(5, 4, 1))
state = hn.contract_to_boundary_state(net)
b = list(net.boundary_legs)

# %% Contiguous regions: the exact entropy sits between the two bounds.
for k in (2, 5, 8):
    region = b[:k]
    lo, hi = eb.entropy_bounds(net, region)
    print(f"{k} legs: greedy {lo}, exact {eb.exact_region_entropy(state, region):.3f}, min cut {hi}")

# %% Scattered regions can open a gap between greedy and min cut.
rng = np.random.default_rng(0)
for _ in range(4):
    region = sorted(rng.choice(b, size=7, replace=False).tolist())
    lo, hi = eb.entropy_bounds(net, region)
    print(region, lo, round(eb.exact_region_entropy(state, region), 3), hi)

# %% Mutual information between antipodal quarters of a larger network.
big = hn.build_tessellation(hn.TessellationSpec(5, 4, 2))
bb = big.boundary_legs
q = len(bb) // 4
mi = eb.mutual_info_budget(big, bb[:q], bb[2 * q:3 * q])
print("cuts |Gamma_V|, |Gamma_W|, overlap:", mi.gamma_v, mi.gamma_w, mi.overlap, "budget:", mi.upper_bits)
print("entanglement for an R=2, n=3 position-verification round:", eb.qpv_total_entanglement(2, 3))
