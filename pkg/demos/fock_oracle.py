"""Cross-check Gaussian formulas against the truncated Fock-space oracle.

    python3 demos/fock_oracle.py
"""

import math

import numpy as np

from qranging import distinguish as dist
from qranging import fock, validation
from qranging.ranging import gus_helstrom

# one random centred two-mode pair, analytic vs Fock
rng = np.random.default_rng(1)
a, b, A, B = validation.random_gaussian_pair(rng, 2, zero_mean=True, cutoff=26, deficit_target=1e-11)
print(f"trace deficits {A.trace_deficit:.1e}, {B.trace_deficit:.1e}")
print(f"Q_1/2 analytic {dist.gaussian_overlap(a, b, 0.5):.12f}  Fock {fock.overlap_fock(A, B, 0.5):.12f}")
print(f"F     analytic {dist.gaussian_fidelity_zero_mean(a, b):.12f}  "
      f"Fock {fock.uhlmann_fidelity_fock(A, B):.12f}")

# the three-mode ranging pair
Fg, Ff, d = validation.three_mode_fidelity()
print(f"three-mode pair: F gaussian {Fg:.12f}, F fock {Ff:.12f}, deficit {d:.1e}")

# symmetric coherent states: PGM is optimal
for zeta in (0.1, 0.5, 0.9):
    kets, _ = fock.ppm_coherent_kets(3, math.sqrt(-math.log(zeta)), 24)
    print(f"zeta={zeta}: PGM {fock.pgm_error(kets):.12f}  closed form {gus_helstrom(3, zeta):.12f}")
