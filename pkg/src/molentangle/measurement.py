# src/molentangle/measurement.py

"""Population estimates, parity and the molecular readout chain."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import InsufficientDataError, SubspaceMismatchError
from .hilbert import AtomLevel, StateVector
from .noise import NoiseConfig
from .protocols import (
    DEFAULT_DURATIONS,
    PulseDurations,
    QubitKind,
    make_pulse,
    qls_detect_minus32,
    qls_detect_minus52,
    run_with_leaks,
)
from .pulses import COMB_CARRIER
from .records import MolOutcome, TrialRecord


PopulationKey = tuple[AtomLevel, MolOutcome]

S, D = AtomLevel.S, AtomLevel.D

# parity sign of each member of a qubit's four-state subspace
_PARITY_SIGNS: dict[QubitKind, dict[PopulationKey, int]] = {
    QubitKind.LOW: {
        (S, MolOutcome.MINUS52): 1,
        (D, MolOutcome.MINUS32): 1,
        (S, MolOutcome.MINUS32): -1,
        (D, MolOutcome.MINUS52): -1,
    },
    QubitKind.HIGH: {
        (S, MolOutcome.J0): 1,
        (D, MolOutcome.MINUS32): 1,
        (S, MolOutcome.MINUS32): -1,
        (D, MolOutcome.J0): -1,
    },
}

# fidelity terms: the two populations the ideal state puts weight on
FIDELITY_KEYS: dict[QubitKind, tuple[PopulationKey, PopulationKey]] = {
    QubitKind.LOW: ((S, MolOutcome.MINUS32), (D, MolOutcome.MINUS52)),
    QubitKind.HIGH: ((S, MolOutcome.J0), (D, MolOutcome.MINUS32)),
}


def subspace_keys(qubit: QubitKind) -> tuple[PopulationKey, ...]:
    return tuple(_PARITY_SIGNS[qubit])


def format_key(key: PopulationKey) -> str:
    return f"{key[0].value},{key[1].value}"


@dataclass(frozen=True)
class PopulationEstimate:
    """Counts over a qubit's four-state subspace plus an "other" bucket.

    Probabilities are normalized over all trials, not post-selected, so
    "other" outcomes lower every P_ζ.
    """

    qubit: QubitKind
    counts: Mapping[PopulationKey, int]
    other: int = 0

    def __post_init__(self) -> None:
        keys = set(subspace_keys(self.qubit))
        if set(self.counts) != keys:
            msg = f"Counts must cover exactly the {self.qubit.value} subspace"
            raise SubspaceMismatchError(msg)

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.other

    def probability(self, key: PopulationKey) -> float:
        if self.total == 0:
            msg = "No trials to estimate populations from"
            raise InsufficientDataError(msg)
        return self.counts[key] / self.total

    def standard_error(self, key: PopulationKey) -> float:
        p = self.probability(key)
        return math.sqrt(p * (1 - p) / self.total)

    @property
    def other_probability(self) -> float:
        return self.other / self.total if self.total else 0.0

    def probabilities(self) -> dict[PopulationKey, float]:
        return {key: self.probability(key) for key in self.counts}


def _classify(record: TrialRecord, qubit: QubitKind) -> PopulationKey | None:
    key = (record.atom_outcome, record.mol_outcome)
    return key if key in _PARITY_SIGNS[qubit] else None


def estimate_populations(
    records: Iterable[TrialRecord], qubit: QubitKind
) -> PopulationEstimate:
    """Tally records into the subspace of ``qubit``.

    Rows without a readout are skipped. Invalid rows that were read out
    (leaked molecules) count as ``other``, so leakage lowers every P_ζ.
    """
    counts = dict.fromkeys(subspace_keys(qubit), 0)
    other = 0
    for record in records:
        if not record.has_readout:
            continue
        key = _classify(record, qubit) if record.valid else None
        if key is None:
            other += 1
        else:
            counts[key] += 1
    return PopulationEstimate(qubit, counts, other)


def parity(pop: PopulationEstimate, qubit: QubitKind) -> float:
    """Signed population sum over the qubit subspace.

    low: P_S,−5/2 + P_D,−3/2 − P_S,−3/2 − P_D,−5/2
    high: P_S,0 + P_D,−3/2 − P_S,−3/2 − P_D,0
    """
    if pop.qubit is not qubit:
        msg = (
            f"Populations were estimated for the {pop.qubit.value} qubit, "
            f"not {qubit.value}"
        )
        raise SubspaceMismatchError(msg)
    return float(
        sum(sign * pop.probability(key) for key, sign in _PARITY_SIGNS[qubit].items())
    )


def parity_values(
    records: Iterable[TrialRecord], qubit: QubitKind
) -> npt.NDArray[np.float64]:
    """Per-trial parity contributions in {−1, 0, +1} for valid records."""
    signs = _PARITY_SIGNS[qubit]
    return np.array(
        [
            signs.get((r.atom_outcome, r.mol_outcome), 0)
            for r in records
            if r.valid
        ],
        dtype=np.float64,
    )


def wilson_standard_error(successes: int, n: int, z: float = 1.0) -> float:
    """Half-width of the Wilson score interval; positive even at 0 or n hits."""
    if n <= 0:
        msg = "Wilson interval needs at least one trial"
        raise InsufficientDataError(msg)
    if not 0 <= successes <= n:
        msg = f"successes={successes} outside [0, {n}]"
        raise ValueError(msg)
    p = successes / n
    return z / (n + z**2) * math.sqrt(n * p * (1 - p) + z**2 / 4)


def parity_standard_error(values: npt.NDArray[np.float64]) -> float:
    """Standard error of the mean parity.

    Falls back to the Wilson form when the sample variance is zero, so
    extreme points keep a finite weight.
    """
    n = int(values.size)
    if n == 0:
        msg = "No trials at this phase"
        raise InsufficientDataError(msg)
    if n > 1 and not np.all(values == values[0]):
        return float(np.std(values, ddof=1) / math.sqrt(n))
    hits = int(np.count_nonzero(values > 0))
    return 2 * wilson_standard_error(hits, n)


# --- molecular readout ----------------------------------------------------------


def detect_molecule_after_atom(
    state: StateVector,
    qubit: QubitKind,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> tuple[MolOutcome, StateVector]:
    """Sequential QLS readout; the first positive identification wins.

    Low qubit: −3/2 readout, then −5/2 readout. High qubit: −3/2 readout,
    then a comb π-pulse maps |0⟩ onto −3/2 for a second −3/2 readout.
    """
    if state.leaked:
        return MolOutcome.OTHER, state

    first = qls_detect_minus32(state, cfg, rng, durations)
    if first.positive:
        return MolOutcome.MINUS32, first.state
    if qubit is QubitKind.LOW:
        second = qls_detect_minus52(first.state, cfg, rng, durations)
        outcome = MolOutcome.MINUS52 if second.positive else MolOutcome.OTHER
        return outcome, second.state

    comb = make_pulse(COMB_CARRIER, math.pi, durations=durations, label="comb_map")
    mapped = run_with_leaks(first.state, (comb,), cfg, rng)
    second = qls_detect_minus32(mapped, cfg, rng, durations)
    outcome = MolOutcome.J0 if second.positive else MolOutcome.OTHER
    return outcome, second.state
