# src/molentangle/config/config_types.py

"""TypedDict schemas for experiment files.

Every section is optional; missing keys fall back to the defaults in
``molentangle.constants``.
"""

from typing import Literal, TypedDict


ProtocolName = Literal[
    "prepare",
    "psi_L",
    "psi_H",
    "parity_scan_L",
    "parity_scan_H",
    "population_L",
    "population_H",
    "custom",
]
QubitName = Literal["low", "high"]
PresetName = Literal["low", "high"]
HeraldTargetName = Literal["minus32", "minus52"]

Number = int | float
Frequency = int | float | str  # strings keep exact decimals ("854801477587.5")


class ExperimentConfigSection(TypedDict, total=False):
    """[experiment] section.

    Fields:
        protocol: Which protocol to run
        preset: Fill phi_a/targets (and trials) from a published schedule
        phi_a: Analysis phases in radians (parity scans)
        targets: Valid trials wanted at each phase, same length as phi_a
        trials: Independent realizations for non-scan protocols
        seed: Root seed of every random stream (0 to 2**64-1)
        n_max: Motional Fock truncation (>= 3)
        out_dir: Output directory for simulate
        budget: Global row budget (default 10x the planned trials)
        workers: Worker processes for independent trials and bootstrap
        bootstrap_resamples: Resamples for the fit uncertainty
        qubit: Molecular readout chain for the custom protocol
        sequence: Pulse strings for the custom protocol
        herald_max_attempts: Pump sequences before a herald round aborts
        herald_confirmations: Consecutive confirmations a herald needs
        herald_schedule: Cyclic pump targets
        atom_carrier_pi_us: Atomic carrier pi-pulse duration
        comb_pi_us: Comb carrier pi-pulse duration
    """

    protocol: ProtocolName
    preset: PresetName
    phi_a: list[Number]
    targets: list[int]
    trials: int
    seed: int
    n_max: int
    out_dir: str
    budget: int
    workers: int
    bootstrap_resamples: int
    qubit: QubitName
    sequence: list[str]
    herald_max_attempts: int
    herald_confirmations: int
    herald_schedule: list[HeraldTargetName]
    atom_carrier_pi_us: Number
    comb_pi_us: Number


class NoiseConfigSection(TypedDict, total=False):
    """[noise] section; field names match ``NoiseConfig``."""

    nbar_m: Number
    atom_coherence_us: Number
    comb_coherence_us: Number
    prep_error: Number
    leak_per_pulse: Number
    leak_per_trial: Number
    detect_bright_mean: Number
    detect_dark_mean: Number
    detect_threshold: int
    herald_prior: list[Number]
    stark_phase_atom_rad: Number
    stark_phase_mol_rad: Number
    stark_phase_comb_rad: Number
    rng_seed: int


class CombConfigSection(TypedDict, total=False):
    """[comb] section.

    Fields:
        f_rep_hz: Comb repetition rate
        f_aom_hz: AOM frequency
        n: Comb tooth number N
        sign: Sign of the AOM term in the Raman frequency (+1 or -1)
        delta_f_rep_hz: Repetition-rate step for tooth identification
        delta_f_aom_hz: Measured AOM shift for that step
        n_tolerance: Allowed distance of the tooth ratio from an integer
        rotational_constant_hz: Rigid-rotor constant B
        rotational_tolerance: Allowed relative deviation from 6B
        transition_hz: True transition frequency for simulated scans
        scan_shots: Shots per lineshape point
        scan_points: Points per lineshape scan
    """

    f_rep_hz: Frequency
    f_aom_hz: Frequency
    n: int
    sign: int
    delta_f_rep_hz: Frequency
    delta_f_aom_hz: Frequency
    n_tolerance: Number
    rotational_constant_hz: Frequency
    rotational_tolerance: Number
    transition_hz: Frequency
    scan_shots: int
    scan_points: int


class RootConfig(TypedDict, total=False):
    """Root of an experiment file."""

    experiment: ExperimentConfigSection
    noise: NoiseConfigSection
    comb: CombConfigSection
