"""Entanglement-assisted PPM rate against the classical and EA capacities.

    python3 demos/ppm_comm.py
"""

import numpy as np

from qranging import comm

KAPPA, N_B, M = 0.1, 20.0, 1000
print(f"{'n_S':>8} {'m*':>8} {'R*':>11} {'C':>11} {'C_E':>11} {'R*/C':>7} {'C_E/C':>7}")
for ns in np.geomspace(1e-2, 1e-6, 5):
    p = comm.optimal_rate(M, ns, KAPPA, N_B)
    print(f"{ns:>8.0e} {p.m_star:>8} {p.R_star:>11.4e} {p.C:>11.4e} {p.C_E:>11.4e} "
          f"{p.R_star / p.C:>7.3f} {p.C_E / p.C:>7.3f}")
