"""Optical-parametric-amplifier receiver and direct-detection Monte Carlo.

    python3 demos/receivers.py
"""

from qranging import receivers as rx
from qranging.ranging import RangingScenario, classical_dd

sc = RangingScenario(m=2, M=100_000, N_S=1e-3, N_B=3.0, kappa=0.01)
cfg = rx.OpaConfig.for_scenario(sc)
n0, n1 = rx.opa_means_m2(sc)
print(f"gain {cfg.G:.7f}, mean counts per mode {n0:.6f} / {n1:.6f}")
print(f"exact ML threshold error   {rx.opa_error_exact_m2(sc):.6f}")
print(f"Gaussian approximation     {rx.opa_error_gaussian_m2(sc):.6f}")
mc = rx.opa_monte_carlo_m2(sc, None, 10 ** 6, 42)
print(f"Monte Carlo (1e6 trials)   {mc.error:.6f} +- {mc.std_error:.1e}")
print("cascade gains for m = 4:", [round(g, 6) for g in rx.cascade_gains(cfg.G, 4)])

for m in (2, 3):
    s = RangingScenario(m=m, M=100_000, N_S=1e-3, N_B=0.3, kappa=0.01)
    mc = rx.dd_monte_carlo(s, 10 ** 6, 7)
    print(f"direct detection m={m}: closed form {classical_dd(s):.6f}, "
          f"MC {mc.error:.6f} +- {mc.std_error:.1e}")
