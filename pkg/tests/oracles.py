"""Reference evaluations shared by the test modules, written independently of the library."""

import mpmath


def dd_reference(m, x, nb, dps=100):
    """Direct-detection error sum at ``dps`` digits; ``x`` is M kappa N_S."""
    with mpmath.workdps(dps):
        v = mpmath.mpf(nb) / (nb + 1)
        tot = mpmath.mpf(0)
        for k in range(2, m + 1):
            tot += ((-1) ** k * mpmath.binomial(m, k)
                    * mpmath.exp(-(1 - v) * (1 - v ** (k - 1)) * x / (1 - v ** k)))
        return float(tot / m)
