# src/molentangle/detection.py

"""Atomic fluorescence detection and atom/motion re-preparation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TruncationError
from .hilbert import (
    ATOM_LEVELS,
    AtomLevel,
    BoolArray,
    StateVector,
    level_mask,
    masked_population,
)
from .noise import NoiseConfig


@dataclass(frozen=True)
class AtomDetection:
    outcome: AtomLevel  # thresholded report
    true_level: AtomLevel  # branch the state collapsed to
    photon_counts: int
    state: StateVector

    @property
    def bright(self) -> bool:
        return self.outcome is AtomLevel.S

    @property
    def misclassified(self) -> bool:
        return self.outcome is not self.true_level


def _project(state: StateVector, mask: BoolArray, weight: float) -> StateVector:
    amps = np.where(mask, state.amplitudes, 0.0) / np.sqrt(weight)
    return state.with_amplitudes(amps)


def detect_atom(
    state: StateVector, cfg: NoiseConfig, rng: np.random.Generator
) -> AtomDetection:
    """Born-rule projection onto S or D followed by a thresholded photon count.

    Counts are Poisson with ``detect_bright_mean`` on the S branch and
    ``detect_dark_mean`` on the D branch; the reported outcome is S iff the
    count reaches ``detect_threshold``. Exactly two draws per call.
    """
    bright_mask = level_mask(state.n_max, atom=AtomLevel.S)
    p_bright = min(1.0, max(0.0, masked_population(state, bright_mask)))
    true_level = AtomLevel.S if rng.random() < p_bright else AtomLevel.D

    if true_level is AtomLevel.S:
        collapsed = _project(state, bright_mask, p_bright)
        mean = cfg.detect_bright_mean
    else:
        collapsed = _project(state, ~bright_mask, 1.0 - p_bright)
        mean = cfg.detect_dark_mean

    counts = int(rng.poisson(mean))
    outcome = AtomLevel.S if counts >= cfg.detect_threshold else AtomLevel.D
    return AtomDetection(outcome, true_level, counts, collapsed)


def reset_atom_motion(
    state: StateVector,
    rng: np.random.Generator,
    atom: AtomLevel = AtomLevel.D,
    n: int = 0,
) -> StateVector:
    """Re-prepare the atom in ``atom`` and the mode in Fock state ``n``.

    The old (atom, n) pair is Born-sampled from its marginal and the
    molecular amplitudes conditioned on it carry over unchanged, so any
    atom/motion entanglement is projected out. One draw per call.
    """
    if not 0 <= n < state.n_max:
        msg = f"Cannot reset motion to n={n} with n_max={state.n_max}"
        raise TruncationError(msg)
    tensor = state.as_tensor()
    marginal = np.sum(np.abs(tensor) ** 2, axis=1)  # (atom, n)
    weights = marginal.reshape(-1) / marginal.sum()
    pick = int(rng.choice(weights.size, p=weights))
    old_atom, old_n = divmod(pick, state.n_max)

    mol_amps = tensor[old_atom, :, old_n]
    mol_amps = mol_amps / np.linalg.norm(mol_amps)

    out = np.zeros_like(tensor)
    out[ATOM_LEVELS.index(atom), :, n] = mol_amps
    return state.with_amplitudes(out.reshape(-1))
