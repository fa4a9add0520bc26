"""Covariance-matrix states and the quantum Chernoff bound.

Builds a TMSV, sends the signal arm through a thermal-loss channel, and
compares the return/idler state against a product of thermal states.

    python3 demos/gaussian_chernoff.py
"""

import numpy as np

import qranging as qr
from qranging import gaussian as gc

N_S, KAPPA, N_B = 0.01, 0.1, 1.0

state = qr.tmsv(N_S)
ret = qr.apply_thermal_loss(state, 0, KAPPA, N_B)
print("return/idler covariance:\n", np.round(ret.cov, 6))
print("symplectic eigenvalues:", qr.williamson_eigenvalues(ret))

# same marginals, no correlation
blank = gc.tensor(gc.thermal_state(qr.mean_photon(ret, 0)), gc.thermal_state(N_S))

for s in (0.25, 0.5, 0.75):
    print(f"Q_{s} = {qr.gaussian_overlap(ret, blank, s):.10f}")
res = qr.chernoff_exponent(ret, blank)
print(f"Chernoff: s* = {res.s_star:.4f}, Q* = {res.Q_star:.10f}, exponent {res.exponent:.3e}")
print(f"fidelity = {qr.gaussian_fidelity_zero_mean(ret, blank):.10f}")
