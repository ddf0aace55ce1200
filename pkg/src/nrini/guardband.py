"""Minimal guard band for a rejection target, found by scanning the MSE curve.

The multi-tone MSE oscillates with the guard band, so it cannot be inverted.
A guard band ``g`` is accepted only if the target holds at every grid point
from ``g`` out to the search horizon ("tail-safe"), which makes the result
monotone in both the target and the interferer width.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import InterferencePair, mse_multi_tone, rejection_db
from .numerology import N_BASE, FrequencyOffset, NumerologyError, as_bins

DEFAULT_HORIZON_BINS = 2048


class HorizonExceededError(RuntimeError):
    """No guard band up to the horizon meets the target."""

    def __init__(self, pair, n_int, target_db, horizon_bins, best_rejection_db, best_gb_bins):
        self.pair = pair
        self.n_int = n_int
        self.target_db = target_db
        self.horizon_bins = horizon_bins
        self.best_rejection_db = best_rejection_db
        self.best_gb_bins = best_gb_bins
        super().__init__(
            f"mu_i={pair.mu_i} -> mu_u={pair.mu_u}, n_int={n_int}: target {target_db} dB not met "
            f"up to {horizon_bins} bins (best {best_rejection_db:.2f} dB at {best_gb_bins} bins)"
        )


@dataclass(frozen=True)
class GuardBandRequirement:
    pair: InterferencePair
    n_int: int
    target_rejection_db: float
    min_gb: FrequencyOffset
    search_horizon: FrequencyOffset
    achieved_rejection_db: float

    @property
    def user_subcarriers(self) -> float:
        return self.min_gb.subcarriers(self.pair.mu_u)

    @property
    def user_rbs(self) -> float:
        return self.min_gb.rbs(self.pair.mu_u)


def effective_horizon(pair: InterferencePair, n_int: int, horizon_bins: float) -> float:
    """Clip the horizon so the nearest interferer tone stays the nearest one.

    On the circular grid the far edge of the block approaches the victim from
    the other side once ``2 g + span > N``.
    """
    span = (n_int - 1) << pair.mu_i
    return min(float(horizon_bins), (N_BASE - span) / 2)


def min_guard_band(pair: InterferencePair, n_int: int, target_rejection_db: float,
                   step=None, horizon=DEFAULT_HORIZON_BINS,
                   refine: bool = False) -> GuardBandRequirement:
    """Smallest tail-safe guard band on a grid of ``step`` bins.

    ``step`` defaults to one victim subcarrier. With ``refine`` the boundary
    inside the last grid cell is bisected on a continuous guard band.
    Raises HorizonExceededError if the target is not met at the horizon.
    """
    step = float(as_bins(step)) if step is not None else float(1 << pair.mu_u)
    if step <= 0 or step != int(step):
        raise NumerologyError(f"step must be a positive integer number of bins, got {step}")
    if n_int < 1:
        raise NumerologyError("interferer needs at least one tone")
    h = effective_horizon(pair, n_int, as_bins(horizon))
    if h < step:
        raise NumerologyError(f"horizon {h} bins is below the search step {step} bins")

    grid = step * np.arange(1, int(h // step) + 1)
    mse = mse_multi_tone(pair, n_int, grid)
    limit = 10.0 ** (-target_rejection_db / 10.0)
    ok = np.atleast_1d(mse <= limit)
    if not ok[-1]:
        best = int(np.argmin(mse))
        raise HorizonExceededError(pair, n_int, target_rejection_db, float(grid[-1]),
                                   float(rejection_db(mse[best])), float(grid[best]))
    bad = np.flatnonzero(~ok)
    first = 0 if bad.size == 0 else int(bad[-1]) + 1
    gb = float(grid[first])
    if refine and first > 0:
        lo, hi = float(grid[first - 1]), gb
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if mse_multi_tone(pair, n_int, mid) <= limit:
                hi = mid
            else:
                lo = mid
        gb = hi
    return GuardBandRequirement(
        pair=pair,
        n_int=int(n_int),
        target_rejection_db=float(target_rejection_db),
        min_gb=FrequencyOffset(gb),
        search_horizon=FrequencyOffset(float(grid[-1])),
        achieved_rejection_db=float(rejection_db(mse_multi_tone(pair, n_int, gb))),
    )


def guard_band_vs_interferer_curve(pair: InterferencePair, target_rejection_db: float,
                                   n_int_list, **kwargs) -> list[GuardBandRequirement]:
    n_int_list = list(n_int_list)
    if not n_int_list:
        raise NumerologyError("n_int_list must not be empty")
    if any(b < a for a, b in zip(n_int_list, n_int_list[1:])):
        raise NumerologyError("n_int_list must be ascending")
    return [min_guard_band(pair, n, target_rejection_db, **kwargs) for n in n_int_list]

