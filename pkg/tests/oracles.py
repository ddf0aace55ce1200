"""Independent reference computations used only by the tests."""
import math

import mpmath
import numpy as np

N = 4096
N_CP = 288


def direct_dirichlet(length, f, grid=N):
    """Literal phasor sum in 30-digit arithmetic (float64 cancels near nulls)."""
    with mpmath.workdps(30):
        step = 2 * mpmath.pi * mpmath.mpf(float(f)) / grid
        acc = mpmath.fsum(mpmath.expj(step * l) for l in range(int(length)))
        return float(abs(acc) ** 2)


def brute_force_mse(mu_i, mu_u, f_int_bins, f_vic_bins):
    """Expected victim-bin power from one interferer tone, by enumeration.

    Walks every sample of every distinct victim window phase, attributes it to
    the interferer symbol it belongs to and accumulates that symbol's complex
    gain; with i.i.d. unit-power data the expectation is the sum of squared
    gains. No Dirichlet closed form and no segment bookkeeping.
    """
    n_i, cp_i = N >> mu_i, N_CP >> mu_i
    n_u, cp_u = N >> mu_u, N_CP >> mu_u
    ne_i, ne_u = n_i + cp_i, n_u + cp_u
    phases = ne_i // ne_u if ne_i > ne_u else 1
    total = 0.0
    for n in range(phases):
        k = np.arange(n_u)
        t = n * ne_u + cp_u + k
        sym = t // ne_i
        local = t - sym * ne_i
        gain = (np.exp(2j * np.pi * (local - cp_i) * f_int_bins / N)
                * np.exp(-2j * np.pi * k * f_vic_bins / N)) / math.sqrt(n_i * n_u)
        acc = np.zeros(sym.max() + 1, dtype=complex)
        np.add.at(acc, sym, gain)
        total += float(np.sum(np.abs(acc) ** 2))
    return total / phases
