"""Multi-service band plans and their bandwidth-use efficiency.

Services are laid out in list order, ascending in frequency, each followed by
the guard band protecting it from the next one. For every boundary the guard
band is dimensioned at the edge subcarrier of the victim service against the
whole neighbouring allocation.

Two knobs pick the convention:

``direction``
    ``"both"`` protects both neighbours and keeps the larger guard band;
    ``"lower-victim"`` only protects the service with the smaller numerology.
``reduction``
    ``"normalized"`` dimensions each boundary on the equivalent pair shifted
    down to numerology 0 (the curves depend on Q alone when the guard band is
    counted in victim subcarriers) and rescales to the real victim spacing;
    ``"direct"`` evaluates the actual pair. Large high-numerology pairs can
    run into the periodicity of the sampled grid under ``"direct"``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .analytic import InterferencePair
from .guardband import DEFAULT_HORIZON_BINS, HorizonExceededError, min_guard_band
from .numerology import BIN_KHZ, SUBCARRIERS_PER_RB, NumerologyError, check_mu

DIRECTIONS = ("both", "lower-victim")
REDUCTIONS = ("normalized", "direct")


@dataclass(frozen=True)
class ServiceSpec:
    mu: int
    n_rb: int

    def __post_init__(self):
        check_mu(self.mu)
        if self.n_rb < 1:
            raise NumerologyError(f"a service needs at least one RB, got {self.n_rb}")

    @property
    def n_subcarriers(self) -> int:
        return self.n_rb * SUBCARRIERS_PER_RB

    @property
    def bandwidth_khz(self) -> float:
        return self.n_subcarriers * BIN_KHZ * (1 << self.mu)


@dataclass
class BoundaryGuard:
    lower: int
    upper: int
    upward_khz: float | None  # lower service interfering with the upper one
    downward_khz: float | None
    guard_khz: float


@dataclass
class ScenarioPlan:
    services: list[ServiceSpec]
    target_rejection_db: float
    guard_bands_khz: list[float]
    total_bandwidth_khz: float
    efficiency: float
    boundaries: list[BoundaryGuard] = field(default_factory=list)
    direction: str = "both"
    reduction: str = "normalized"

    @property
    def service_bandwidth_khz(self) -> float:
        return sum(s.bandwidth_khz for s in self.services)

    @property
    def guard_total_khz(self) -> float:
        return sum(self.guard_bands_khz)

    def to_dict(self) -> dict:
        r3 = lambda x: None if x is None else round(x, 3)  # noqa: E731
        return {
            "services": [asdict(s) for s in self.services],
            "target_rejection_db": self.target_rejection_db,
            "direction": self.direction,
            "reduction": self.reduction,
            "service_bandwidths_khz": [r3(s.bandwidth_khz) for s in self.services],
            "guard_bands_khz": [r3(g) for g in self.guard_bands_khz],
            "guard_bands_detail_khz": [
                {"lower_mu": b.lower, "upper_mu": b.upper,
                 "lower_to_upper": r3(b.upward_khz), "upper_to_lower": r3(b.downward_khz)}
                for b in self.boundaries
            ],
            "guard_total_khz": r3(self.guard_total_khz),
            "total_bandwidth_khz": r3(self.total_bandwidth_khz),
            "efficiency": round(self.efficiency, 6),
        }


class ScenarioHorizonError(RuntimeError):
    def __init__(self, lower: ServiceSpec, upper: ServiceSpec, cause: HorizonExceededError):
        self.lower, self.upper, self.cause = lower, upper, cause
        super().__init__(f"boundary between mu={lower.mu} and mu={upper.mu}: {cause}")


def guard_khz(interferer: ServiceSpec, victim: ServiceSpec, target_db: float,
              reduction: str = "normalized", horizon=DEFAULT_HORIZON_BINS) -> float:
    """Guard band in kHz protecting ``victim``'s edge subcarrier from ``interferer``."""
    if reduction not in REDUCTIONS:
        raise ValueError(f"reduction must be one of {REDUCTIONS}, got {reduction!r}")
    pair = InterferencePair(interferer.mu, victim.mu)
    if pair.mu_i == pair.mu_u:
        # orthogonal: adjacent subcarriers, whatever the allocation width
        return BIN_KHZ * (1 << victim.mu)
    if reduction == "normalized":
        shift = min(pair.mu_i, pair.mu_u)
        reduced = pair.shifted(-shift)
        req = min_guard_band(reduced, interferer.n_subcarriers, target_db, horizon=horizon)
        return req.user_subcarriers * BIN_KHZ * (1 << victim.mu)
    req = min_guard_band(pair, interferer.n_subcarriers, target_db, horizon=horizon)
    return req.min_gb.khz


def plan_scenario(services, target_rejection_db: float, direction: str = "both",
                  reduction: str = "normalized", horizon=DEFAULT_HORIZON_BINS) -> ScenarioPlan:
    services = [s if isinstance(s, ServiceSpec) else ServiceSpec(**s) for s in services]
    if not services:
        raise NumerologyError("a scenario needs at least one service")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")

    boundaries = []
    for lo, hi in zip(services, services[1:]):
        try:
            if direction == "both":
                up = guard_khz(lo, hi, target_rejection_db, reduction, horizon)
                down = guard_khz(hi, lo, target_rejection_db, reduction, horizon)
            elif lo.mu <= hi.mu:
                up, down = None, guard_khz(hi, lo, target_rejection_db, reduction, horizon)
            else:
                up, down = guard_khz(lo, hi, target_rejection_db, reduction, horizon), None
        except HorizonExceededError as exc:
            raise ScenarioHorizonError(lo, hi, exc) from exc
        guard = max(g for g in (up, down) if g is not None)
        boundaries.append(BoundaryGuard(lo.mu, hi.mu, up, down, guard))

    guards = [b.guard_khz for b in boundaries]
    used = sum(s.bandwidth_khz for s in services)
    total = used + sum(guards)
    return ScenarioPlan(services, float(target_rejection_db), guards, total, used / total,
                        boundaries, direction, reduction)


def load_scenario(path) -> tuple[list[ServiceSpec], float]:
    """Read ``{"services": [{"mu": .., "n_rb": ..}, ...], "target_db": ..}``."""
    with open(path) as fh:
        doc = json.load(fh)
    try:
        services = [ServiceSpec(int(s["mu"]), int(s["n_rb"])) for s in doc["services"]]
        target = float(doc["target_db"])
    except (KeyError, TypeError) as exc:
        raise NumerologyError(f"malformed scenario file {path}: {exc}") from exc
    return services, target
