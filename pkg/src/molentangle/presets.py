# src/molentangle/presets.py

"""Published analysis-phase schedules and their per-point trial counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .protocols import QubitKind


@dataclass(frozen=True)
class PhasePreset:
    name: str
    qubit: QubitKind
    phi_a: tuple[float, ...]
    targets: tuple[int, ...]

    @property
    def total_trials(self) -> int:
        return sum(self.targets)


def _steps(divisor: int, count: int) -> tuple[float, ...]:
    return tuple(math.pi / divisor * k for k in range(count))


PRESETS: dict[str, PhasePreset] = {
    "low": PhasePreset(
        name="low",
        qubit=QubitKind.LOW,
        phi_a=_steps(6, 12),
        targets=(246, 39, 115, 106, 92, 83, 114, 62, 64, 67, 150, 50),
    ),
    "high": PhasePreset(
        name="high",
        qubit=QubitKind.HIGH,
        phi_a=_steps(5, 10),
        targets=(98, 37, 132, 74, 141, 63, 52, 35, 84, 71),
    ),
}

# population-only realizations quoted alongside each fringe
PRESET_POPULATION_TRIALS: dict[str, int] = {"low": 202, "high": 491}


def get_preset(name: str) -> PhasePreset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        msg = f"Unknown preset {name!r} (known: {known})"
        raise ValueError(msg) from None
