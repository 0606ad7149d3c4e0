# src/molentangle/pulses.py

"""Coherent pulses as unitaries on the composite state.

Rotation convention on a coupled pair {|a⟩, |b⟩} with |a⟩ the lower level::

    |a⟩ → cos(θₙ/2)|a⟩ − i e^{iφ} sin(θₙ/2)|b⟩
    |b⟩ → −i e^{−iφ} sin(θₙ/2)|a⟩ + cos(θₙ/2)|b⟩

Sideband kinds couple |lower⟩|n+1⟩ ↔ |upper⟩|n⟩ with
θₙ = θ·√(n+1)/√(calibration_n+1). Swapping the level pair gives the
opposite sideband, so only one sideband kind exists per transition.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache, reduce

import numpy as np
import numpy.typing as npt

from .constants import OVERFLOW_TOLERANCE
from .errors import TruncationError
from .hilbert import (
    ATOM_LEVELS,
    QUBIT_MOL_LEVELS,
    AtomLevel,
    BasisLabel,
    MolLevel,
    StateVector,
    basis_index,
)
from .logs import getAppLogger


IntArray = npt.NDArray[np.intp]
Level = AtomLevel | MolLevel


class TransitionKind(Enum):
    ATOM_CARRIER = "atom_carrier"
    ATOM_BSB = "atom_bsb"
    MOL_RAMAN_CARRIER = "mol_raman_carrier"
    MOL_RAMAN_BSB = "mol_raman_bsb"
    COMB_CARRIER = "comb_carrier"

    @property
    def is_sideband(self) -> bool:
        return self in (TransitionKind.ATOM_BSB, TransitionKind.MOL_RAMAN_BSB)

    @property
    def acts_on_atom(self) -> bool:
        return self in (TransitionKind.ATOM_CARRIER, TransitionKind.ATOM_BSB)


_ALLOWED_PAIRS: dict[TransitionKind, frozenset[Level]] = {
    TransitionKind.ATOM_CARRIER: frozenset({AtomLevel.S, AtomLevel.D}),
    TransitionKind.ATOM_BSB: frozenset({AtomLevel.S, AtomLevel.D}),
    TransitionKind.MOL_RAMAN_CARRIER: frozenset({MolLevel.MINUS32, MolLevel.MINUS52}),
    TransitionKind.MOL_RAMAN_BSB: frozenset({MolLevel.MINUS32, MolLevel.MINUS52}),
    TransitionKind.COMB_CARRIER: frozenset({MolLevel.MINUS32, MolLevel.J0}),
}


@dataclass(frozen=True)
class TransitionSelector:
    kind: TransitionKind
    lower: Level
    upper: Level

    def __post_init__(self) -> None:
        if self.lower == self.upper or frozenset(
            {self.lower, self.upper}
        ) != _ALLOWED_PAIRS[self.kind]:
            msg = (
                f"{self.kind.value} cannot couple "
                f"{self.lower.value} and {self.upper.value}"
            )
            raise ValueError(msg)

    @property
    def is_molecular(self) -> bool:
        return not self.kind.acts_on_atom


ATOM_CARRIER = TransitionSelector(TransitionKind.ATOM_CARRIER, AtomLevel.S, AtomLevel.D)
# |S⟩|n+1⟩ ↔ |D⟩|n⟩
ATOM_SIDEBAND = TransitionSelector(TransitionKind.ATOM_BSB, AtomLevel.S, AtomLevel.D)
# |D⟩|n+1⟩ ↔ |S⟩|n⟩
ATOM_SIDEBAND_REVERSED = TransitionSelector(
    TransitionKind.ATOM_BSB, AtomLevel.D, AtomLevel.S
)
MOL_CARRIER = TransitionSelector(
    TransitionKind.MOL_RAMAN_CARRIER, MolLevel.MINUS52, MolLevel.MINUS32
)
# |−5/2⟩|n+1⟩ ↔ |−3/2⟩|n⟩
MOL_SIDEBAND = TransitionSelector(
    TransitionKind.MOL_RAMAN_BSB, MolLevel.MINUS52, MolLevel.MINUS32
)
# |−3/2⟩|n+1⟩ ↔ |−5/2⟩|n⟩
MOL_SIDEBAND_REVERSED = TransitionSelector(
    TransitionKind.MOL_RAMAN_BSB, MolLevel.MINUS32, MolLevel.MINUS52
)
COMB_CARRIER = TransitionSelector(
    TransitionKind.COMB_CARRIER, MolLevel.J0, MolLevel.MINUS32
)

NAMED_SELECTORS: dict[str, TransitionSelector] = {
    "atom_carrier": ATOM_CARRIER,
    "atom_sideband": ATOM_SIDEBAND,
    "atom_sideband_reversed": ATOM_SIDEBAND_REVERSED,
    "mol_carrier": MOL_CARRIER,
    "mol_sideband": MOL_SIDEBAND,
    "mol_sideband_reversed": MOL_SIDEBAND_REVERSED,
    "comb_carrier": COMB_CARRIER,
}


@dataclass(frozen=True)
class PulseSpec:
    """One coherent operation.

    ``duration_us`` is metadata for the dephasing channels only; the unitary
    is fixed by the pulse area ``theta``. A sideband with ``rung`` set is
    resolved: it drives only the pair whose upper member has n = ``rung``.
    """

    selector: TransitionSelector
    theta: float
    phi: float = 0.0
    calibration_n: int = 0
    duration_us: float = 0.0
    label: str = ""
    rung: int | None = None

    def __post_init__(self) -> None:
        if self.theta < 0:
            msg = f"Pulse area must be non-negative, got {self.theta}"
            raise ValueError(msg)
        if self.calibration_n < 0:
            msg = f"calibration_n must be non-negative, got {self.calibration_n}"
            raise ValueError(msg)
        if self.duration_us < 0:
            msg = f"Pulse duration must be non-negative, got {self.duration_us}"
            raise ValueError(msg)
        if self.rung is not None and (
            self.rung < 0 or not self.selector.kind.is_sideband
        ):
            msg = f"rung must be a sideband Fock number >= 0, got {self.rung}"
            raise ValueError(msg)

    def with_phase(self, phi: float) -> PulseSpec:
        return replace(self, phi=phi)

    def inverse(self) -> PulseSpec:
        """R(θ, φ)⁻¹ = R(θ, φ + π)."""
        return replace(self, phi=self.phi + math.pi)


# --- coupling tables -----------------------------------------------------------


@dataclass(frozen=True)
class _Coupling:
    lower: IntArray
    upper: IntArray
    ladder: IntArray  # Fock number of the upper member
    overflow: IntArray  # upper-level states whose partner would need n = n_max


def _label(
    selector: TransitionSelector, level: Level, spectator: Level, n: int
) -> BasisLabel:
    if selector.kind.acts_on_atom:
        return BasisLabel(level, spectator, n)  # type: ignore[arg-type]
    return BasisLabel(spectator, level, n)  # type: ignore[arg-type]


@lru_cache(maxsize=128)
def _coupling(selector: TransitionSelector, n_max: int) -> _Coupling:
    spectators: Sequence[Level] = (
        QUBIT_MOL_LEVELS if selector.kind.acts_on_atom else ATOM_LEVELS
    )
    lower: list[int] = []
    upper: list[int] = []
    ladder: list[int] = []
    overflow: list[int] = []
    def index(level: Level, spectator: Level, n: int) -> int:
        return basis_index(_label(selector, level, spectator, n), n_max)

    # sidebands raise the lower level's Fock number by one
    shift = 1 if selector.kind.is_sideband else 0
    for spectator in spectators:
        for n in range(n_max - shift):
            lower.append(index(selector.lower, spectator, n + shift))
            upper.append(index(selector.upper, spectator, n))
            ladder.append(n)
        if shift:
            overflow.append(index(selector.upper, spectator, n_max - 1))
    return _Coupling(
        lower=np.asarray(lower, dtype=np.intp),
        upper=np.asarray(upper, dtype=np.intp),
        ladder=np.asarray(ladder, dtype=np.intp),
        overflow=np.asarray(overflow, dtype=np.intp),
    )


def pulse_angles(pulse: PulseSpec, n_max: int) -> npt.NDArray[np.float64]:
    """Rotation angle θₙ for every coupled pair of ``pulse``."""
    coupling = _coupling(pulse.selector, n_max)
    if not pulse.selector.kind.is_sideband:
        return np.full(coupling.lower.shape, pulse.theta, dtype=np.float64)
    scale = np.sqrt(coupling.ladder + 1.0) / math.sqrt(pulse.calibration_n + 1)
    if pulse.rung is not None:
        scale = np.where(coupling.ladder == pulse.rung, scale, 0.0)
    return pulse.theta * scale


# --- application -------------------------------------------------------------------


def apply_pulse(state: StateVector, pulse: PulseSpec) -> StateVector:
    """Apply one pulse; a leaked state passes through unchanged."""
    if state.leaked:
        getAppLogger().warning(
            "Skipping %s pulse on leaked state",
            pulse.label or pulse.selector.kind.value,
        )
        return state

    coupling = _coupling(pulse.selector, state.n_max)
    amps = state.amplitudes

    # a resolved sideband never reaches the top rung
    if pulse.selector.kind.is_sideband and pulse.theta > 0 and pulse.rung is None:
        stranded = float(np.sum(np.abs(amps[coupling.overflow]) ** 2))
        if stranded > OVERFLOW_TOLERANCE:
            msg = (
                f"{pulse.selector.kind.value} pulse would push population "
                f"{stranded:.3e} beyond n_max={state.n_max}"
            )
            raise TruncationError(msg)

    half = pulse_angles(pulse, state.n_max) / 2
    c = np.cos(half)
    s = np.sin(half)
    a = amps[coupling.lower]
    b = amps[coupling.upper]

    out = amps.copy()
    out[coupling.lower] = c * a - 1j * np.exp(-1j * pulse.phi) * s * b
    out[coupling.upper] = -1j * np.exp(1j * pulse.phi) * s * a + c * b
    return state.with_amplitudes(out)


def sequence(state: StateVector, pulses: Iterable[PulseSpec]) -> StateVector:
    """Left-to-right composition of apply_pulse."""
    return reduce(apply_pulse, pulses, state)


# --- text form -------------------------------------------------------------------


def parse_pulse(text: str) -> PulseSpec:
    """Parse ``"<selector> <theta/π> <phi rad> [duration µs]"``.

    >>> parse_pulse("mol_sideband 0.5 0 762.5").theta == math.pi / 2
    True
    """
    parts = text.split()
    if len(parts) not in (3, 4):
        msg = (
            f"Pulse {text!r} must read '<selector> <theta/pi> <phi> [duration_us]'"
        )
        raise ValueError(msg)
    name = parts[0]
    if name not in NAMED_SELECTORS:
        valid = ", ".join(sorted(NAMED_SELECTORS))
        msg = f"Unknown pulse selector {name!r}. Valid options: {valid}"
        raise ValueError(msg)
    try:
        theta = float(parts[1]) * math.pi
        phi = float(parts[2])
        duration = float(parts[3]) if len(parts) == 4 else 0.0  # noqa: PLR2004
    except ValueError as e:
        msg = f"Pulse {text!r} has a non-numeric field: {e}"
        raise ValueError(msg) from e
    return PulseSpec(
        NAMED_SELECTORS[name], theta, phi, duration_us=duration, label=name
    )


def format_pulse(pulse: PulseSpec) -> str:
    names = {selector: name for name, selector in NAMED_SELECTORS.items()}
    name = names.get(pulse.selector)
    if name is None:
        msg = f"Selector {pulse.selector} has no text name"
        raise ValueError(msg)
    return f"{name} {pulse.theta / math.pi:g} {pulse.phi:g} {pulse.duration_us:g}"
