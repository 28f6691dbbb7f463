"""
Certifying a Hamiltonian simulation
===================================

Measure (Delta, eta, eps) for a simulator and check the spectral and dynamical
consequences on the low-energy block.
"""
# %%
import numpy as np
from scipy.stats import unitary_group

from holoqpv import sim_framework as sf

rng = np.random.default_rng(3)
d, D = 3, 16
A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
H = (A + A.conj().T) / 2
V = unitary_group.rvs(D, random_state=rng)[:, :d]

# %% Encode, push everything else to energy 40, then add a small perturbation.
B = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
H_sim = V @ H @ V.conj().T + 40 * (np.eye(D) - V @ V.conj().T) + 0.01 * (B + B.conj().T)
enc = sf.EncodingData(V, np.eye(1), np.zeros((1, 1)))
cert = sf.verify_simulation(H_sim, H, enc, 20.0)
print(cert.to_json())

# %%
rep = sf.physical_property_checks(H_sim, H, cert, enc, beta=1.0, t=5.0)
print("eigen pairing ok:", rep.eigen_ok, " dynamics deviation", rep.dynamics_dev, "<=", rep.dynamics_bound)

# %% Chaining two certificates.
c = sf.concat_certificates(sf.SimulationCertificate(100, 0.001, 0.01), sf.SimulationCertificate(10, 0.001, 0.01), 1.0)
print("chained:", c)
