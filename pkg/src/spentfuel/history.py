"""Assembly inputs and irradiation histories.

A history alternates burnup and cooling cycles, starting and ending with a
burnup cycle. New histories are produced by proportionally rescaling a base
history so that its totals hit the requested burnup, boron, and cooling time
while the cycle-to-cycle ratios and powers stay fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HistoryError

INPUT_NAMES = ("enrichment_pct", "burnup_MWdkgU", "fuel_temp_K", "boron_ppm", "cooling_days")


@dataclass(frozen=True)
class AssemblyInput:
    """The five sampled fresh-fuel / irradiation parameters."""

    enrichment: float  # % U-235 by mass
    burnup: float  # MWd/kgU
    fuel_temp: float  # K
    boron: float  # ppm, cycle average
    cooling_days: float  # total inter-cycle cooling

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if not value > 0.0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if self.enrichment >= 100.0:
            raise ValueError(f"enrichment must be < 100%, got {self.enrichment}")

    def as_dict(self) -> dict[str, float]:
        return {
            "enrichment": self.enrichment,
            "burnup": self.burnup,
            "fuel_temp": self.fuel_temp,
            "boron": self.boron,
            "cooling_days": self.cooling_days,
        }

    def as_vector(self) -> np.ndarray:
        return np.array(
            [self.enrichment, self.burnup, self.fuel_temp, self.boron, self.cooling_days]
        )

    @classmethod
    def from_vector(cls, vec) -> "AssemblyInput":
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.shape != (5,):
            raise ValueError(f"expected 5 input values, got {vec.shape}")
        return cls(*[float(v) for v in vec])


@dataclass(frozen=True)
class BurnupCycle:
    """One burnup cycle; duration follows from burnup and power."""

    burnup: float  # MWd/kgU
    power: float  # W/gU
    boron: float  # ppm

    def __post_init__(self):
        if self.burnup <= 0.0 or self.power <= 0.0 or self.boron <= 0.0:
            raise HistoryError("burnup cycle needs positive burnup, power, and boron")

    @property
    def duration_days(self) -> float:
        # MWd/kgU divided by W/gU leaves 1000 days.
        return 1000.0 * self.burnup / self.power


@dataclass(frozen=True)
class CoolingCycle:
    """One inter-cycle cooling period."""

    duration_days: float

    def __post_init__(self):
        if self.duration_days <= 0.0:
            raise HistoryError("cooling cycle needs a positive duration")


Cycle = BurnupCycle | CoolingCycle


@dataclass(frozen=True)
class IrradiationHistory:
    cycles: tuple[Cycle, ...]
    fuel_temp: float

    def __post_init__(self):
        if not self.cycles:
            raise HistoryError("history has no cycles")
        if self.fuel_temp <= 0.0:
            raise HistoryError("fuel temperature must be > 0")
        for i, cyc in enumerate(self.cycles):
            want_burnup = i % 2 == 0
            if want_burnup != isinstance(cyc, BurnupCycle):
                raise HistoryError("cycles must alternate burnup/cooling")
        if not isinstance(self.cycles[-1], BurnupCycle):
            raise HistoryError("history must end with a burnup cycle")

    @property
    def burnup_cycles(self) -> tuple[BurnupCycle, ...]:
        return tuple(c for c in self.cycles if isinstance(c, BurnupCycle))

    @property
    def cooling_cycles(self) -> tuple[CoolingCycle, ...]:
        return tuple(c for c in self.cycles if isinstance(c, CoolingCycle))

    @property
    def total_burnup(self) -> float:
        return sum(c.burnup for c in self.burnup_cycles)

    @property
    def total_cooling_days(self) -> float:
        return sum(c.duration_days for c in self.cooling_cycles)

    @property
    def mean_boron(self) -> float:
        cycles = self.burnup_cycles
        return sum(c.boron for c in cycles) / len(cycles)


def reference_history() -> IrradiationHistory:
    """The built-in reference history: a 15x15 PWR assembly burned over four
    cycles with three inter-cycle cooling periods."""
    return IrradiationHistory(
        cycles=(
            BurnupCycle(burnup=11.247, power=10.9, boron=143.0),
            CoolingCycle(duration_days=85.0),
            BurnupCycle(burnup=9.377, power=35.1, boron=459.0),
            CoolingCycle(duration_days=56.0),
            BurnupCycle(burnup=7.454, power=23.9, boron=342.0),
            CoolingCycle(duration_days=1927.0),
            BurnupCycle(burnup=7.642, power=28.7, boron=299.0),
        ),
        fuel_temp=887.0,
    )


def reference_input() -> AssemblyInput:
    """The reference history's own totals as an input vector."""
    hist = reference_history()
    return AssemblyInput(
        enrichment=3.095,
        burnup=hist.total_burnup,
        fuel_temp=hist.fuel_temp,
        boron=hist.mean_boron,
        cooling_days=hist.total_cooling_days,
    )


def build_history(base: IrradiationHistory, inp: AssemblyInput) -> IrradiationHistory:
    """Rescale a base history so its totals match the requested input.

    Per-cycle burnups scale by burnup/total, borons by boron/mean, cooling
    durations by cooling_days/total; powers are unchanged and the fuel
    temperature is replaced.
    """
    total_burnup = base.total_burnup
    total_cooling = base.total_cooling_days
    mean_boron = base.mean_boron
    if total_burnup <= 0.0 or total_cooling <= 0.0 or mean_boron <= 0.0:
        raise HistoryError("degenerate base history: zero burnup, cooling, or boron")
    f_burnup = inp.burnup / total_burnup
    f_boron = inp.boron / mean_boron
    f_cooling = inp.cooling_days / total_cooling
    cycles: list[Cycle] = []
    for cyc in base.cycles:
        if isinstance(cyc, BurnupCycle):
            cycles.append(
                BurnupCycle(
                    burnup=cyc.burnup * f_burnup,
                    power=cyc.power,
                    boron=cyc.boron * f_boron,
                )
            )
        else:
            cycles.append(CoolingCycle(duration_days=cyc.duration_days * f_cooling))
    return IrradiationHistory(cycles=tuple(cycles), fuel_temp=inp.fuel_temp)
