"""5G NR numerology parameters and frequency-unit conversions.

Every numerology shares the 61.44 MHz sampling clock, so all of them can be
placed on one base grid of ``N_BASE`` bins spaced 15 kHz apart. A subcarrier
of numerology ``mu`` spans ``2**mu`` base bins.
"""
from __future__ import annotations

from dataclasses import dataclass

SAMPLING_RATE_HZ = 61.44e6
N_BASE = 4096
N_CP_BASE = 288
BIN_KHZ = SAMPLING_RATE_HZ / N_BASE / 1e3  # 15 kHz
SUBCARRIERS_PER_RB = 12
MU_MIN, MU_MAX = 0, 5


class NumerologyError(ValueError):
    """Raised for out-of-range numerologies or allocations that do not fit."""


def check_mu(mu: int) -> int:
    if isinstance(mu, bool) or int(mu) != mu or not MU_MIN <= mu <= MU_MAX:
        raise NumerologyError(
            f"numerology index must be an integer in {MU_MIN}..{MU_MAX}, got {mu!r}"
        )
    return int(mu)


@dataclass(frozen=True)
class NumerologyParams:
    mu: int
    n_fft: int
    n_cp: int
    n_sym: int
    scs_khz: float
    rb_khz: float

    @property
    def bins_per_subcarrier(self) -> int:
        return 1 << self.mu


def numerology_params(mu: int) -> NumerologyParams:
    """Derived lengths (in samples at 61.44 MHz) and spacings for ``mu``.

    >>> numerology_params(1)
    NumerologyParams(mu=1, n_fft=2048, n_cp=144, n_sym=2192, scs_khz=30.0, rb_khz=360.0)
    """
    mu = check_mu(mu)
    n_fft = N_BASE >> mu
    n_cp = N_CP_BASE >> mu
    scs = BIN_KHZ * (1 << mu)
    return NumerologyParams(
        mu=mu,
        n_fft=n_fft,
        n_cp=n_cp,
        n_sym=n_fft + n_cp,
        scs_khz=scs,
        rb_khz=SUBCARRIERS_PER_RB * scs,
    )


@dataclass(frozen=True, order=True)
class FrequencyOffset:
    """A non-negative frequency offset measured in base-grid bins (15 kHz)."""

    bins: float

    def __post_init__(self):
        if not self.bins >= 0:
            raise NumerologyError(f"frequency offset must be >= 0 bins, got {self.bins!r}")

    @classmethod
    def from_subcarriers(cls, k: float, mu: int) -> FrequencyOffset:
        return offset_from_subcarriers(k, mu)

    @classmethod
    def from_rbs(cls, n_rb: float, mu: int) -> FrequencyOffset:
        return offset_from_subcarriers(n_rb * SUBCARRIERS_PER_RB, mu)

    @classmethod
    def from_khz(cls, khz: float) -> FrequencyOffset:
        return cls(khz / BIN_KHZ)

    @property
    def khz(self) -> float:
        return offset_to_khz(self)

    def subcarriers(self, mu: int) -> float:
        return self.bins / (1 << check_mu(mu))

    def rbs(self, mu: int) -> float:
        return self.subcarriers(mu) / SUBCARRIERS_PER_RB


def offset_from_subcarriers(k: float, mu: int) -> FrequencyOffset:
    if k < 0:
        raise NumerologyError(f"subcarrier count must be >= 0, got {k!r}")
    return FrequencyOffset(k * (1 << check_mu(mu)))


def offset_to_khz(off: FrequencyOffset) -> float:
    return off.bins * BIN_KHZ


def as_bins(gb):
    """Accept a FrequencyOffset, a number of bins, or an array of bins."""
    if isinstance(gb, FrequencyOffset):
        return gb.bins
    return gb
