"""Closed-form inter-numerology interference (INI) MSE.

All guard bands are in base-grid bins (15 kHz). MSE values are normalised to
unit constellation power, so ``rejection_db = -10 log10(mse)``.

Two single-tone evaluators are provided:

``literal``
    ``(|D_L(gb)|^2 + (ceil(Q) - 1) |D_Ne(gb)|^2) / (N_i N_u)`` with
    ``L = Ne_i - Ncp_u``. Only defined while ``L > 0``.
``exact``
    Splits the victim FFT window at interferer symbol boundaries and sums one
    Dirichlet term per segment, averaging over the distinct window phases.
    Agrees with ``literal`` whenever ``Q >= 1`` and ``L > 0``, and stays
    correct when the interferer symbols are longer than the victim's (Q < 1)
    or shorter than the victim's cyclic prefix (Q >= 16).
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .dirichlet import dirichlet_power
from .numerology import (
    N_BASE,
    SUBCARRIERS_PER_RB,
    FrequencyOffset,
    NumerologyError,
    NumerologyParams,
    as_bins,
    check_mu,
    numerology_params,
)

EVALUATORS = ("exact", "literal")


@dataclass(frozen=True)
class InterferencePair:
    """Interferer numerology ``mu_i`` leaking into victim numerology ``mu_u``."""

    mu_i: int
    mu_u: int

    def __post_init__(self):
        check_mu(self.mu_i)
        check_mu(self.mu_u)

    @property
    def interferer(self) -> NumerologyParams:
        return numerology_params(self.mu_i)

    @property
    def victim(self) -> NumerologyParams:
        return numerology_params(self.mu_u)

    @property
    def q_ratio(self) -> float:
        return 2.0 ** (self.mu_i - self.mu_u)

    @property
    def first_segment(self) -> int:
        """``Ne_i - Ncp_u``; non-positive for Q >= 16, where the literal form breaks."""
        return self.interferer.n_sym - self.victim.n_cp

    @property
    def norm(self) -> int:
        return self.interferer.n_fft * self.victim.n_fft

    def shifted(self, alpha: int) -> InterferencePair:
        return InterferencePair(self.mu_i + alpha, self.mu_u + alpha)

    @cached_property
    def segments(self) -> tuple[tuple[int, float], ...]:
        """(segment length, mean count per victim symbol) for the exact evaluator."""
        ne_i = self.interferer.n_sym
        ne_u, ncp_u, n_u = self.victim.n_sym, self.victim.n_cp, self.victim.n_fft
        phases = ne_i // ne_u if ne_i > ne_u else 1
        counts: Counter[int] = Counter()
        for n in range(phases):
            t = n * ne_u + ncp_u
            end = t + n_u
            while t < end:
                stop = min((t // ne_i + 1) * ne_i, end)
                counts[stop - t] += 1
                t = stop
        return tuple((length, c / phases) for length, c in sorted(counts.items()))


@dataclass(frozen=True)
class ToneAllocation:
    """Contiguous block of ``n_tones`` subcarriers of numerology ``mu``."""

    mu: int
    start_subcarrier: int
    n_tones: int

    def __post_init__(self):
        check_mu(self.mu)
        if self.n_tones < 1:
            raise NumerologyError(f"allocation needs at least one tone, got {self.n_tones}")
        size = N_BASE >> self.mu
        if self.start_subcarrier < 0 or self.start_subcarrier + self.n_tones > size:
            raise NumerologyError(
                f"allocation [{self.start_subcarrier}, {self.start_subcarrier + self.n_tones})"
                f" does not fit the {size}-subcarrier grid of mu={self.mu}"
            )

    @property
    def tones(self) -> np.ndarray:
        return np.arange(self.start_subcarrier, self.start_subcarrier + self.n_tones)

    @property
    def span_bins(self) -> int:
        """Base-bin distance between first and last tone."""
        return (self.n_tones - 1) << self.mu


@dataclass
class MseCurve:
    pair: InterferencePair
    guard_bands: np.ndarray
    mse: np.ndarray
    unit_note: str = "guard band in base-grid bins of 15 kHz; MSE relative to unit symbol power"
    evaluator: str = "exact"
    n_int: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.guard_bands = np.asarray(self.guard_bands, dtype=float)
        self.mse = np.asarray(self.mse, dtype=float)
        if self.guard_bands.shape != self.mse.shape:
            raise ValueError("guard_bands and mse must have the same shape")
        if np.any(np.diff(self.guard_bands) <= 0):
            raise ValueError("guard bands must be strictly increasing")
        if np.any(self.mse < 0):
            raise ValueError("MSE values must be non-negative")

    @property
    def points(self) -> list[tuple[FrequencyOffset, float]]:
        return [(FrequencyOffset(float(g)), float(m)) for g, m in zip(self.guard_bands, self.mse)]

    @property
    def rejection_db(self) -> np.ndarray:
        return rejection_db(self.mse)


def rejection_db(mse):
    with np.errstate(divide="ignore"):
        out = -10.0 * np.log10(np.asarray(mse, dtype=float))
    return float(out) if out.ndim == 0 else out


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _check_gb(gb):
    gb = np.asarray(as_bins(gb), dtype=float)
    if np.any(gb < 0):
        raise NumerologyError("guard band must be >= 0 bins")
    return gb


def mse_single_tone_literal(pair: InterferencePair, gb):
    """One interferer tone, one victim tone, using the two-term Dirichlet form."""
    gb = _check_gb(gb)
    L = pair.first_segment
    if L <= 0:
        raise NumerologyError(
            f"literal formula undefined for mu_i={pair.mu_i}, mu_u={pair.mu_u}: "
            f"first segment Ne_i - Ncp_u = {L} <= 0; use the exact evaluator"
        )
    extra = math.ceil(pair.q_ratio) - 1
    acc = dirichlet_power(L, gb)
    if extra:
        acc = acc + extra * dirichlet_power(pair.interferer.n_sym, gb)
    return _scalar(acc / pair.norm)


def mse_single_tone_exact(pair: InterferencePair, gb):
    """One interferer tone, one victim tone, by exact window segmentation."""
    gb = _check_gb(gb)
    acc = 0.0
    for length, weight in pair.segments:
        acc = acc + weight * dirichlet_power(length, gb)
    return _scalar(acc / pair.norm)


def mse_single_tone(pair: InterferencePair, gb, evaluator: str = "exact"):
    if evaluator == "exact":
        return mse_single_tone_exact(pair, gb)
    if evaluator == "literal":
        return mse_single_tone_literal(pair, gb)
    raise ValueError(f"evaluator must be one of {EVALUATORS}, got {evaluator!r}")


def _n_int(pair: InterferencePair, interferer) -> int:
    if isinstance(interferer, ToneAllocation):
        if interferer.mu != pair.mu_i:
            raise NumerologyError(
                f"interferer allocation is mu={interferer.mu}, pair expects mu_i={pair.mu_i}"
            )
        return interferer.n_tones
    n = int(interferer)
    if n < 1:
        raise NumerologyError("interferer needs at least one tone")
    return n


def mse_multi_tone(pair: InterferencePair, interferer, victim_tone_gb, evaluator: str = "exact"):
    """Sum of single-tone MSEs over an ``n_int``-tone interferer block.

    ``victim_tone_gb`` is the offset from the victim tone to the nearest
    interferer tone; the remaining tones sit one interferer subcarrier
    (``2**mu_i`` bins) further out each. ``interferer`` is a ToneAllocation or
    a tone count.
    """
    n_int = _n_int(pair, interferer)
    gb = _check_gb(victim_tone_gb)
    step = 1 << pair.mu_i
    if np.any(gb + (n_int - 1) * step >= N_BASE):
        raise NumerologyError(
            f"{n_int}-tone mu={pair.mu_i} interferer at guard band {float(np.max(gb))} bins "
            f"overflows the {N_BASE}-bin grid"
        )
    offsets = gb[..., None] + step * np.arange(n_int)
    return _scalar(np.sum(mse_single_tone(pair, offsets, evaluator), axis=-1))


def mse_rb_average(pair: InterferencePair, interferer, gb, evaluator: str = "exact"):
    """Mean multi-tone MSE over the 12 subcarriers of the victim RB nearest the interferer."""
    gb = _check_gb(gb)
    shifts = (1 << pair.mu_u) * np.arange(SUBCARRIERS_PER_RB)
    per_tone = mse_multi_tone(pair, interferer, gb[..., None] + shifts, evaluator)
    return _scalar(np.mean(per_tone, axis=-1))


def mse_curve(pair, n_int, guard_bands, evaluator="exact") -> MseCurve:
    g = np.asarray(guard_bands, dtype=float)
    return MseCurve(pair, g, np.atleast_1d(mse_multi_tone(pair, n_int, g, evaluator)),
                    evaluator=evaluator, n_int=int(n_int))


def _db_gap(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    both_zero = (a == 0) & (b == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = np.abs(10.0 * np.log10(a / b))
    return np.where(both_zero, 0.0, gap)


def scale_invariance_residual(pair: InterferencePair, n_int: int, alpha: int, gb_grid,
                              evaluator: str = "exact") -> float:
    """Max dB gap between ``MSE[pair + alpha](2**alpha g)`` and ``MSE[pair](g)``.

    ``gb_grid`` is in base bins for ``pair``. Curves that depend on Q alone
    (with the guard band counted in victim subcarriers) give 0.
    """
    g = _check_gb(gb_grid)
    shifted = pair.shifted(alpha)
    ref = mse_multi_tone(pair, n_int, g, evaluator)
    moved = mse_multi_tone(shifted, n_int, g * 2.0 ** alpha, evaluator)
    return float(np.max(_db_gap(moved, ref)))
