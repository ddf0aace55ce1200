"""Squared magnitude of the partial Dirichlet-kernel sum on the base grid."""
from __future__ import annotations

import numpy as np

from .numerology import N_BASE

# below this |sin(pi f / N)| the sinc-ratio limit form is used
_SINGULAR_TOL = 1e-9


def _reduce(x, period):
    # symmetric reduction to [-period/2, period/2]; exact for integer inputs
    return x - period * np.round(x / period)


def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


def _reduced_product(a, b, period):
    """``a * b`` reduced modulo ``period`` without losing the product's rounding error."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return _reduce(_reduce(p, period) + err, period)


def dirichlet_power(length, freq_bins, grid: int = N_BASE):
    """Return ``|D_L(f)|**2`` where ``D_L(f) = sum_{l<L} exp(2j*pi*l*f/grid)``.

    Vectorised over ``length`` and ``freq_bins`` (numpy broadcasting). The
    closed form ``sin(pi L f / N)**2 / sin(pi f / N)**2`` is evaluated with both
    arguments reduced modulo the grid first, so integer nulls come out as exact
    zeros and ``f = 0 (mod N)`` yields ``L**2``.
    """
    L = np.asarray(length, dtype=float)
    f = np.asarray(freq_bins, dtype=float)
    if np.any(L < 0):
        raise ValueError("Dirichlet length must be >= 0")
    if grid < 1:
        raise ValueError("grid must be >= 1")

    fr = _reduce(f, grid)
    den = np.sin(np.pi * fr / grid)
    num = np.sin(np.pi * _reduced_product(L, fr, grid) / grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (num / den) ** 2
    singular = np.abs(den) < _SINGULAR_TOL
    if np.any(singular):
        u = fr / grid
        with np.errstate(divide="ignore", invalid="ignore"):
            limit = (L * np.sinc(L * u) / np.sinc(u)) ** 2
        out = np.where(singular, limit, out)
    if out.ndim == 0:
        return float(out)
    return out

