# src/molentangle/__init__.py

"""Molentangle: simulate heralded atom-molecule entanglement experiments.

Full developer API
==================
This package re-exports the public symbols of its submodules for scripted
use. Anything prefixed with "_" is internal and may change.

Highlights:
    - run_campaign()          → heralded Monte Carlo campaign with outputs
    - run_population()        → four-state populations without analysis pulses
    - create_entangled_state() → one noisy realization of psi_L / psi_H
    - fit_fringe()            → weighted parity-fringe fit
    - fidelity()              → F = (P1 + P2 + C) / 2
    - raman_frequency()       → exact comb Raman frequency
    - load_and_validate_config() → load and validate an experiment file
"""

from .actions import get_metadata
from .analysis import (
    FidelityReport,
    FringeFit,
    FringePoint,
    bootstrap_uncertainty,
    fidelity,
    fidelity_from_populations,
    fit_fringe,
    fit_fringe_nonlinear,
    fringe_points,
)
from .campaign import (
    CampaignSummary,
    ExperimentConfig,
    Protocol,
    run_campaign,
    run_population,
)
from .comb import (
    CombParams,
    RotationalModel,
    check_rotational_consistency,
    determine_transition,
    raman_frequency,
    recover_n,
)
from .config import (
    find_config,
    load_and_validate_config,
    load_config,
    resolve_experiment,
)
from .detection import detect_atom
from .hilbert import (
    AtomLevel,
    BasisLabel,
    MolLevel,
    StateVector,
    new_basis_state,
    population,
    state_fidelity,
)
from .logs import getAppLogger
from .measurement import (
    PopulationEstimate,
    detect_molecule_after_atom,
    estimate_populations,
    parity,
)
from .meta import PROGRAM_DISPLAY, PROGRAM_PACKAGE, PROGRAM_SCRIPT, Metadata
from .noise import NoiseConfig
from .protocols import (
    QubitKind,
    create_entangled_state,
    create_psi_h,
    create_psi_l,
    herald_prepare_minus32,
    qls_detect_minus32,
)
from .pulses import PulseSpec, TransitionSelector, apply_pulse, sequence
from .records import TrialRecord, read_records, write_records


__all__ = [  # noqa: RUF022
    # actions
    "get_metadata",
    # analysis
    "FidelityReport",
    "FringeFit",
    "FringePoint",
    "bootstrap_uncertainty",
    "fidelity",
    "fidelity_from_populations",
    "fit_fringe",
    "fit_fringe_nonlinear",
    "fringe_points",
    # campaign
    "CampaignSummary",
    "ExperimentConfig",
    "Protocol",
    "run_campaign",
    "run_population",
    # comb
    "CombParams",
    "RotationalModel",
    "check_rotational_consistency",
    "determine_transition",
    "raman_frequency",
    "recover_n",
    # config
    "find_config",
    "load_and_validate_config",
    "load_config",
    "resolve_experiment",
    # detection
    "detect_atom",
    # hilbert
    "AtomLevel",
    "BasisLabel",
    "MolLevel",
    "StateVector",
    "new_basis_state",
    "population",
    "state_fidelity",
    # logs
    "getAppLogger",
    # measurement
    "PopulationEstimate",
    "detect_molecule_after_atom",
    "estimate_populations",
    "parity",
    # meta
    "Metadata",
    "PROGRAM_DISPLAY",
    "PROGRAM_PACKAGE",
    "PROGRAM_SCRIPT",
    # noise
    "NoiseConfig",
    # protocols
    "QubitKind",
    "create_entangled_state",
    "create_psi_h",
    "create_psi_l",
    "herald_prepare_minus32",
    "qls_detect_minus32",
    # pulses
    "PulseSpec",
    "TransitionSelector",
    "apply_pulse",
    "sequence",
    # records
    "TrialRecord",
    "read_records",
    "write_records",
]
