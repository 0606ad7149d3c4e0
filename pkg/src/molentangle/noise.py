# src/molentangle/noise.py

"""Per-trial stochastic imperfection channels.

A ``NoiseConfig`` describes the imperfections of the apparatus; a
``TrialNoise`` is one realization of it, drawn from the trial's own random
stream in a fixed order so trials are reproducible in isolation.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Any

import numpy as np
import numpy.typing as npt

from .constants import (
    BOUNDARY_TOLERANCE,
    DEFAULT_ATOM_COHERENCE_US,
    DEFAULT_COMB_COHERENCE_US,
    DEFAULT_DETECT_BRIGHT_MEAN,
    DEFAULT_DETECT_DARK_MEAN,
    DEFAULT_DETECT_THRESHOLD,
    DEFAULT_HERALD_PRIOR,
    DEFAULT_LEAK_PER_PULSE,
    DEFAULT_LEAK_PER_TRIAL,
    DEFAULT_N_MAX,
    DEFAULT_NBAR_M,
    DEFAULT_PREP_ERROR,
    DEFAULT_SEED,
    INFINITE_COHERENCE,
    MAX_SEED,
    MOTION_HEADROOM,
)
from .errors import TruncationError
from .hilbert import BoolArray, MolLevel, Predicate, StateVector, basis_labels


# order of NoiseConfig.herald_prior entries
PRIOR_LEVELS: tuple[MolLevel, MolLevel, MolLevel] = (
    MolLevel.MINUS32,
    MolLevel.MINUS52,
    MolLevel.LEAKED,
)

_PROBABILITY_FIELDS = ("prep_error", "leak_per_pulse", "leak_per_trial")


@dataclass(frozen=True)
class NoiseConfig:
    nbar_m: float = DEFAULT_NBAR_M
    atom_coherence_us: float = DEFAULT_ATOM_COHERENCE_US
    comb_coherence_us: float = DEFAULT_COMB_COHERENCE_US
    prep_error: float = DEFAULT_PREP_ERROR
    leak_per_pulse: float = DEFAULT_LEAK_PER_PULSE
    leak_per_trial: float = DEFAULT_LEAK_PER_TRIAL
    detect_bright_mean: float = DEFAULT_DETECT_BRIGHT_MEAN
    detect_dark_mean: float = DEFAULT_DETECT_DARK_MEAN
    detect_threshold: int = DEFAULT_DETECT_THRESHOLD
    herald_prior: tuple[float, float, float] = DEFAULT_HERALD_PRIOR
    stark_phase_atom_rad: float = 0.0
    stark_phase_mol_rad: float = 0.0
    stark_phase_comb_rad: float = 0.0
    rng_seed: int = field(default=DEFAULT_SEED)

    def __post_init__(self) -> None:
        for name in _PROBABILITY_FIELDS:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                msg = f"{name} must be a probability in [0, 1], got {value}"
                raise ValueError(msg)
        for name in ("atom_coherence_us", "comb_coherence_us"):
            value = getattr(self, name)
            if not value > 0:
                msg = f"{name} must be positive, got {value}"
                raise ValueError(msg)
        if not self.nbar_m >= 0:
            msg = f"nbar_m must be non-negative, got {self.nbar_m}"
            raise ValueError(msg)
        if self.detect_bright_mean < 0 or self.detect_dark_mean < 0:
            msg = "Detection means must be non-negative"
            raise ValueError(msg)
        if self.detect_threshold < 1:
            msg = f"detect_threshold must be at least 1, got {self.detect_threshold}"
            raise ValueError(msg)
        prior = tuple(float(p) for p in self.herald_prior)
        if len(prior) != len(PRIOR_LEVELS) or any(p < 0 for p in prior):
            msg = f"herald_prior needs three non-negative entries, got {prior}"
            raise ValueError(msg)
        if not math.isclose(sum(prior), 1.0, abs_tol=1e-9):
            msg = f"herald_prior must sum to 1, got {sum(prior):.12g}"
            raise ValueError(msg)
        object.__setattr__(self, "herald_prior", prior)
        if not 0 <= self.rng_seed <= MAX_SEED:
            msg = f"rng_seed must fit in 64 unsigned bits, got {self.rng_seed}"
            raise ValueError(msg)

    @classmethod
    def ideal(cls, **overrides: Any) -> NoiseConfig:
        """Noiseless apparatus: ground-state motion, perfect coherence and readout."""
        base = cls(
            nbar_m=0.0,
            atom_coherence_us=INFINITE_COHERENCE,
            comb_coherence_us=INFINITE_COHERENCE,
            prep_error=0.0,
            leak_per_pulse=0.0,
            leak_per_trial=0.0,
            detect_dark_mean=0.0,
        )
        return replace(base, **overrides)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class TrialNoise:
    """One trial's realization of the noise channels.

    ``leak_events`` holds indices into the trial's pulse program after which
    the molecule leaves the qubit manifold.
    """

    initial_n: int = 0
    atom_phase_error: float = 0.0
    comb_phase_error: float = 0.0
    prep_flip: bool = False
    leaked_at_start: bool = False
    leak_events: tuple[int, ...] = ()

    @property
    def first_leak(self) -> int | None:
        return min(self.leak_events) if self.leak_events else None


# --- thermal motion ------------------------------------------------------------


def thermal_support(n_max: int) -> int:
    """Number of Fock levels a trial may start in."""
    return max(1, n_max - MOTION_HEADROOM)


@lru_cache(maxsize=64)
def thermal_distribution(
    nbar: float, n_max: int = DEFAULT_N_MAX
) -> npt.NDArray[np.float64]:
    """p(n) = n̄ⁿ/(n̄+1)ⁿ⁺¹ on the sampled support, renormalized."""
    size = thermal_support(n_max)
    if nbar == 0:
        probs = np.zeros(size)
        probs[0] = 1.0
    else:
        ratio = nbar / (nbar + 1)
        probs = ratio ** np.arange(size) / (nbar + 1)
        probs /= probs.sum()
    probs.setflags(write=False)
    return probs


def thermal_tail(nbar: float, n_max: int = DEFAULT_N_MAX) -> float:
    """Untruncated thermal probability beyond the sampled support."""
    if nbar == 0:
        return 0.0
    return (nbar / (nbar + 1)) ** thermal_support(n_max)


def check_thermal_truncation(
    cfg: NoiseConfig, n_max: int = DEFAULT_N_MAX, tolerance: float = BOUNDARY_TOLERANCE
) -> None:
    tail = thermal_tail(cfg.nbar_m, n_max)
    if tail > tolerance:
        msg = (
            f"Thermal occupation nbar={cfg.nbar_m} leaves {tail:.3e} population "
            f"beyond the n_max={n_max} truncation; increase n_max"
        )
        raise TruncationError(msg)


def sample_thermal(
    nbar: float, rng: np.random.Generator, n_max: int = DEFAULT_N_MAX, size: int = 1
) -> npt.NDArray[np.int64]:
    """Vectorized draws from the truncated thermal distribution."""
    if nbar == 0:
        return np.zeros(size, dtype=np.int64)
    probs = thermal_distribution(nbar, n_max)
    return rng.choice(probs.size, size=size, p=probs).astype(np.int64)


def sample_initial_motion(
    cfg: NoiseConfig, rng: np.random.Generator, n_max: int = DEFAULT_N_MAX
) -> int:
    return int(sample_thermal(cfg.nbar_m, rng, n_max)[0])


# --- dephasing -----------------------------------------------------------------


def sample_phase_error(
    coherence_us: float, elapsed_us: float, rng: np.random.Generator
) -> float:
    """Gaussian phase with σ = √(2·elapsed/T₂), E[cos] = exp(−elapsed/T₂)."""
    if not coherence_us > 0:
        msg = f"Coherence time must be positive, got {coherence_us}"
        raise ValueError(msg)
    if elapsed_us < 0:
        msg = f"Elapsed time must be non-negative, got {elapsed_us}"
        raise ValueError(msg)
    if elapsed_us == 0 or math.isinf(coherence_us):
        return 0.0
    return float(rng.normal(0.0, math.sqrt(2 * elapsed_us / coherence_us)))


def branch_mask(state: StateVector, branch: Predicate | BoolArray) -> BoolArray:
    if callable(branch):
        return np.fromiter(
            (branch(label) for label in basis_labels(state.n_max)),
            dtype=np.bool_,
            count=state.dim,
        )
    return branch


def apply_dephasing(
    state: StateVector, branch: Predicate | BoolArray, phase: float
) -> StateVector:
    """Multiply the amplitudes selected by ``branch`` by e^{i·phase}."""
    if phase == 0:
        return state
    mask = branch_mask(state, branch)
    amps = state.amplitudes.copy()
    amps[mask] *= np.exp(1j * phase)
    return state.with_amplitudes(amps)


# --- preparation and leakage ----------------------------------------------------


def sample_leak_events(
    probability: float, pulse_indices: Sequence[int], rng: np.random.Generator
) -> tuple[int, ...]:
    """Indices of molecular pulses after which the molecule leaks."""
    draws = rng.random(len(pulse_indices))
    return tuple(
        index
        for index, u in zip(pulse_indices, draws, strict=True)
        if u < probability
    )


def sample_molecular_prior(cfg: NoiseConfig, rng: np.random.Generator) -> MolLevel:
    """Molecular level before heralding, drawn from ``herald_prior``."""
    choice = int(rng.choice(len(PRIOR_LEVELS), p=cfg.herald_prior))
    return PRIOR_LEVELS[choice]


def sample_trial_noise(
    cfg: NoiseConfig,
    rng: np.random.Generator,
    *,
    n_max: int = DEFAULT_N_MAX,
    atom_window_us: float = 0.0,
    comb_window_us: float = 0.0,
    molecular_pulses: Sequence[int] = (),
) -> TrialNoise:
    """Draw one trial's noise.

    Draw order is initial motion, preparation flip, background leak, atom
    phase, comb phase, per-pulse leaks. Changing it changes every seeded run.
    """
    initial_n = sample_initial_motion(cfg, rng, n_max)
    prep_flip = bool(rng.random() < cfg.prep_error)
    leaked_at_start = bool(rng.random() < cfg.leak_per_trial)
    atom_phase = sample_phase_error(cfg.atom_coherence_us, atom_window_us, rng)
    comb_phase = sample_phase_error(cfg.comb_coherence_us, comb_window_us, rng)
    leak_events = sample_leak_events(cfg.leak_per_pulse, molecular_pulses, rng)
    return TrialNoise(
        initial_n=initial_n,
        atom_phase_error=atom_phase,
        comb_phase_error=comb_phase,
        prep_flip=prep_flip,
        leaked_at_start=leaked_at_start,
        leak_events=leak_events,
    )
