"""Time-domain CP-OFDM transmitter/receiver and Monte Carlo INI estimator.

Everything runs at the common 61.44 MHz rate. The estimator is a brute-force
check on the closed-form MSE: the victim transmits nothing, so whatever lands
in its demodulated bin is interference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytic import InterferencePair, ToneAllocation
from .numerology import N_BASE, NumerologyError, numerology_params

CONSTELLATIONS = ("qpsk", "gaussian")
MIN_SYMBOLS = 100
# cap on interferer samples materialised per Monte Carlo batch
_BATCH_SAMPLES = 1 << 21


def draw_symbols(rng: np.random.Generator, shape, constellation: str = "qpsk") -> np.ndarray:
    """I.i.d. zero-mean, unit-variance complex symbols."""
    shape = tuple(np.atleast_1d(shape))
    if constellation == "qpsk":
        bits = rng.integers(0, 2, size=(2, *shape))
        return ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1])) / math.sqrt(2)
    if constellation == "gaussian":
        z = rng.standard_normal((2, *shape))
        return (z[0] + 1j * z[1]) / math.sqrt(2)
    raise ValueError(f"constellation must be one of {CONSTELLATIONS}, got {constellation!r}")


def batch_rng(seed: int, batch: int) -> np.random.Generator:
    """Independent generator for one batch, mixed from the master seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), int(batch)]))


@dataclass(frozen=True)
class SymbolStream:
    mu: int
    allocation: ToneAllocation
    n_symbols: int
    seed: int = 0
    constellation: str = "qpsk"

    def __post_init__(self):
        if self.allocation.mu != self.mu:
            raise NumerologyError("allocation numerology does not match the stream")
        if self.n_symbols < 1:
            raise NumerologyError("stream needs at least one symbol")

    def symbols(self) -> np.ndarray:
        """The (n_symbols, n_tones) constellation matrix this stream carries."""
        return draw_symbols(batch_rng(self.seed, 0), (self.n_symbols, self.allocation.n_tones),
                            self.constellation)


@dataclass
class SampleBuffer:
    samples: np.ndarray

    @property
    def length(self) -> int:
        return int(self.samples.size)

    def to_bytes(self) -> bytes:
        """Header-less interleaved little-endian float64 (re, im) pairs."""
        out = np.empty(2 * self.length, dtype="<f8")
        out[0::2] = self.samples.real
        out[1::2] = self.samples.imag
        return out.tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> SampleBuffer:
        x = np.frombuffer(raw, dtype="<f8")
        if x.size % 2:
            raise ValueError("raw sample dump must hold an even number of float64 values")
        return cls(x[0::2] + 1j * x[1::2])

    def dump(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> SampleBuffer:
        return cls.from_bytes(Path(path).read_bytes())


def _tone_waveforms(mu: int, tones) -> np.ndarray:
    # one CP-OFDM symbol per tone, phase referenced to the end of the CP
    p = numerology_params(mu)
    l = np.arange(p.n_sym) - p.n_cp
    idx = np.mod(np.outer(np.asarray(tones, dtype=np.int64), l), p.n_fft)
    return np.exp(2j * np.pi * idx / p.n_fft) / math.sqrt(p.n_fft)


def _bin_kernel(mu: int, tones) -> np.ndarray:
    p = numerology_params(mu)
    k = np.arange(p.n_fft)
    idx = np.mod(np.outer(k, np.asarray(tones, dtype=np.int64)), p.n_fft)
    return np.exp(-2j * np.pi * idx / p.n_fft) / math.sqrt(p.n_fft)


def synthesize_symbols(mu: int, tones, symbols) -> np.ndarray:
    """Samples for a (n_symbols, n_tones) symbol matrix on the given tone indices."""
    tones = np.atleast_1d(tones)
    symbols = np.asarray(symbols).reshape(-1, tones.size)
    return (symbols @ _tone_waveforms(mu, tones)).reshape(-1)


def synthesize(stream: SymbolStream) -> SampleBuffer:
    return SampleBuffer(synthesize_symbols(stream.mu, stream.allocation.tones, stream.symbols()))


def demodulate(buf: SampleBuffer, mu_u: int, tone: int, n: int) -> complex:
    """Single-bin correlation of victim symbol ``n`` at subcarrier ``tone``."""
    p = numerology_params(mu_u)
    start = n * p.n_sym + p.n_cp
    if n < 0 or start + p.n_fft > buf.length:
        raise NumerologyError(
            f"symbol {n} of mu={mu_u} needs samples up to {start + p.n_fft}, buffer has {buf.length}"
        )
    window = buf.samples[start:start + p.n_fft]
    return complex(window @ _bin_kernel(mu_u, [tone])[:, 0])


def demodulate_all(samples: np.ndarray, mu_u: int, tones) -> np.ndarray:
    """Demodulate every complete victim symbol at several tones: (n_symbols, n_tones)."""
    p = numerology_params(mu_u)
    n = samples.size // p.n_sym
    frames = samples[: n * p.n_sym].reshape(n, p.n_sym)[:, p.n_cp:]
    return frames @ _bin_kernel(mu_u, np.atleast_1d(tones))


@dataclass
class MonteCarloResult:
    mse: np.ndarray
    stderr: np.ndarray
    n_symbols: int
    seed: int


def simulate_mse(pair: InterferencePair, interferer: ToneAllocation, victim_tones,
                 n_symbols: int = 10_000, seed: int = 0,
                 constellation: str = "qpsk") -> MonteCarloResult:
    """Empirical victim-bin power with the interferer as the only transmitter.

    Samples are generated in blocks of ``max(Ne_i, Ne_u)`` samples (one divides
    the other), so every victim window phase inside a long interferer symbol
    occurs equally often. The standard error is taken over block means, which
    are independent even when victim symbols within one block share data.
    ``victim_tones`` may be a scalar or a sequence of victim subcarrier indices.
    """
    if n_symbols < MIN_SYMBOLS:
        raise NumerologyError(f"need at least {MIN_SYMBOLS} victim symbols, got {n_symbols}")
    if interferer.mu != pair.mu_i:
        raise NumerologyError("interferer allocation numerology does not match the pair")
    scalar = np.ndim(victim_tones) == 0
    tones_u = np.atleast_1d(victim_tones)
    pi, pu = pair.interferer, pair.victim
    block = max(pi.n_sym, pu.n_sym)
    victims_per_block = block // pu.n_sym
    int_per_block = block // pi.n_sym
    n_blocks = -(-n_symbols // victims_per_block)
    blocks_per_batch = max(1, _BATCH_SAMPLES // block)

    waves = _tone_waveforms(pair.mu_i, interferer.tones)
    kernel = _bin_kernel(pair.mu_u, tones_u)
    block_means = np.empty((n_blocks, tones_u.size))
    done = 0
    batch = 0
    while done < n_blocks:
        nb = min(blocks_per_batch, n_blocks - done)
        a = draw_symbols(batch_rng(seed, batch), (nb * int_per_block, interferer.n_tones),
                         constellation)
        samples = (a @ waves).reshape(-1)
        frames = samples.reshape(nb * victims_per_block, pu.n_sym)[:, pu.n_cp:]
        power = np.abs(frames @ kernel) ** 2
        block_means[done:done + nb] = power.reshape(nb, victims_per_block, -1).mean(axis=1)
        done += nb
        batch += 1

    mse = block_means.mean(axis=0)
    se = block_means.std(axis=0, ddof=1) / math.sqrt(n_blocks)
    if scalar:
        mse, se = mse[0], se[0]
    return MonteCarloResult(mse, se, n_blocks * victims_per_block, seed)


def place_tones(pair: InterferencePair, gb_bins: int, n_int: int = 1) -> tuple[ToneAllocation, int]:
    """Interferer block and victim tone realising guard band ``gb_bins``.

    The interferer occupies ``n_int`` tones upward from its nearest tone; the
    victim sits ``gb_bins`` below it (wrapping around the grid if needed).
    """
    gb = int(gb_bins)
    if gb != gb_bins or gb < 0:
        raise NumerologyError(f"guard band must be a non-negative integer of bins, got {gb_bins}")
    step_i, step_u = 1 << pair.mu_i, 1 << pair.mu_u
    if gb % min(step_i, step_u):
        raise NumerologyError(
            f"{gb} bins is not realisable between mu={pair.mu_i} and mu={pair.mu_u} grids"
        )
    start = gb % step_u if step_i < step_u else 0
    alloc = ToneAllocation(pair.mu_i, start // step_i, n_int)
    victim = ((start - gb) % N_BASE) // step_u
    return alloc, victim


@dataclass
class SweepPoint:
    gb_bins: int
    mse: float
    stderr: float


def simulate_sweep(pair: InterferencePair, n_int: int, gb_bins, n_symbols: int = 10_000,
                   seed: int = 0, constellation: str = "qpsk") -> list[SweepPoint]:
    """Monte Carlo MSE at each guard band, sharing one interferer run per placement."""
    gbs = [int(g) for g in gb_bins]
    groups: dict[int, list[tuple[int, int]]] = {}
    allocs: dict[int, ToneAllocation] = {}
    for idx, g in enumerate(gbs):
        alloc, victim = place_tones(pair, g, n_int)
        groups.setdefault(alloc.start_subcarrier, []).append((idx, victim))
        allocs[alloc.start_subcarrier] = alloc
    out: list[SweepPoint | None] = [None] * len(gbs)
    for gi, start in enumerate(sorted(groups)):
        members = groups[start]
        res = simulate_mse(pair, allocs[start], [v for _, v in members], n_symbols,
                           seed=_group_seed(seed, gi), constellation=constellation)
        for (idx, _), m, s in zip(members, res.mse, res.stderr):
            out[idx] = SweepPoint(gbs[idx], float(m), float(s))
    return out


def _group_seed(seed: int, group: int) -> int:
    if group == 0:
        return seed
    return int(np.random.SeedSequence([seed, 1 << 32, group]).generate_state(1, np.uint64)[0])


def z_score(analytic: float, estimate: float, stderr: float,
            rel_floor: float = 1e-9, abs_floor: float = 1e-20) -> float:
    """Standardised MC deviation.

    When the estimator has (near) zero spread, e.g. a single unit-modulus
    QPSK segment, the deviation is measured against ``rel_floor`` relative
    precision instead; two values both below ``abs_floor`` count as equal.
    """
    diff = estimate - analytic
    if abs(diff) <= abs_floor and max(abs(estimate), abs(analytic)) <= abs_floor:
        return 0.0
    scale = max(stderr, rel_floor * abs(analytic), abs_floor)
    return diff / scale
