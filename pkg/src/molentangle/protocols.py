# src/molentangle/protocols.py

"""Named pulse programs: heralded preparation, QLS readout, state creation,
hide/unhide mapping and analysis pulses.

Programs are tuples of ``PulseSpec`` so they can be inspected (durations,
molecular pulse indices) before they are run.
"""

from __future__ import annotations

import math
from collections.abc import Collection, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np

from .constants import (
    ATOM_CARRIER_PI_US,
    ATOM_SIDEBAND_PI_US,
    COMB_CARRIER_PI_US,
    DEFAULT_HERALD_CONFIRMATIONS,
    DEFAULT_HERALD_SCHEDULE,
    DEFAULT_MAX_HERALD_ATTEMPTS,
    DEFAULT_N_MAX,
    MOL_RAMAN_PULSE_US,
)
from .detection import detect_atom, reset_atom_motion
from .hilbert import (
    QUBIT_MOL_LEVELS,
    AtomLevel,
    BasisLabel,
    MolLevel,
    StateVector,
    check_norm,
    check_truncation,
    level_mask,
    new_basis_state,
    superposition,
)
from .logs import getAppLogger
from .noise import (
    NoiseConfig,
    TrialNoise,
    apply_dephasing,
    sample_initial_motion,
    sample_leak_events,
    sample_molecular_prior,
    sample_trial_noise,
)
from .pulses import (
    ATOM_CARRIER,
    ATOM_SIDEBAND,
    ATOM_SIDEBAND_REVERSED,
    COMB_CARRIER,
    MOL_CARRIER,
    MOL_SIDEBAND,
    MOL_SIDEBAND_REVERSED,
    PulseSpec,
    TransitionKind,
    TransitionSelector,
    apply_pulse,
    sequence,
)


PI = math.pi
HALF_PI = math.pi / 2

Program = tuple[PulseSpec, ...]

FLAG_LEAKED = "leaked"
FLAG_HERALD_ABORTED = "herald_aborted"
FLAG_PREP_FLIP = "prep_flip"


class QubitKind(Enum):
    LOW = "low"  # |-3/2> / |-5/2>
    HIGH = "high"  # |-3/2> / |0>


class HeraldTarget(Enum):
    MINUS32 = "minus32"
    MINUS52 = "minus52"


@dataclass(frozen=True)
class PulseDurations:
    """Pulse durations in µs; atom and comb pulses scale with pulse area."""

    atom_sideband_pi_us: float = ATOM_SIDEBAND_PI_US
    atom_carrier_pi_us: float = ATOM_CARRIER_PI_US
    mol_raman_us: float = MOL_RAMAN_PULSE_US
    comb_pi_us: float = COMB_CARRIER_PI_US

    def __post_init__(self) -> None:
        for name in (
            "atom_sideband_pi_us",
            "atom_carrier_pi_us",
            "mol_raman_us",
            "comb_pi_us",
        ):
            if getattr(self, name) < 0:
                msg = f"{name} must be non-negative, got {getattr(self, name)}"
                raise ValueError(msg)

    def duration(self, selector: TransitionSelector, theta: float) -> float:
        kind = selector.kind
        if kind is TransitionKind.ATOM_BSB:
            return self.atom_sideband_pi_us * theta / PI
        if kind is TransitionKind.ATOM_CARRIER:
            return self.atom_carrier_pi_us * theta / PI
        if kind is TransitionKind.COMB_CARRIER:
            return self.comb_pi_us * theta / PI
        # 1051 nm pulses keep a fixed envelope; area is set by intensity
        return self.mol_raman_us


DEFAULT_DURATIONS = PulseDurations()


@dataclass(frozen=True)
class ProtocolResult:
    final_state: StateVector
    herald_outcomes: tuple[bool, ...] = ()
    flags: frozenset[str] = field(default_factory=frozenset)
    attempts: int = 0
    success: bool = True

    @property
    def valid(self) -> bool:
        return self.success and not self.final_state.leaked


@dataclass(frozen=True)
class QlsOutcome:
    positive: bool
    photon_counts: int
    state: StateVector


@dataclass(frozen=True)
class ManifoldCheck:
    restored: bool
    found_minus32: bool
    found_minus52: bool
    state: StateVector


# --- program builders --------------------------------------------------------------


def make_pulse(
    selector: TransitionSelector,
    theta: float,
    phi: float = 0.0,
    *,
    durations: PulseDurations = DEFAULT_DURATIONS,
    label: str = "",
    rung: int | None = None,
) -> PulseSpec:
    return PulseSpec(
        selector,
        theta,
        phi,
        duration_us=durations.duration(selector, theta),
        label=label,
        rung=rung,
    )


def psi_i_program(durations: PulseDurations = DEFAULT_DURATIONS) -> Program:
    return (
        make_pulse(MOL_SIDEBAND, HALF_PI, durations=durations, label="mol_sb_pi2"),
    )


def psi_l_program(durations: PulseDurations = DEFAULT_DURATIONS) -> Program:
    return (
        *psi_i_program(durations),
        make_pulse(ATOM_SIDEBAND, PI, durations=durations, label="atom_sb_map"),
    )


def _psi_h_mapping(durations: PulseDurations) -> Program:
    return (
        make_pulse(COMB_CARRIER, PI, durations=durations, label="comb_pi"),
        make_pulse(MOL_CARRIER, PI, durations=durations, label="mol_carrier_pi"),
        make_pulse(ATOM_SIDEBAND, PI, durations=durations, label="atom_sb_map"),
    )


def psi_h_program(durations: PulseDurations = DEFAULT_DURATIONS) -> Program:
    return (*psi_i_program(durations), *_psi_h_mapping(durations))


def creation_program(
    qubit: QubitKind, durations: PulseDurations = DEFAULT_DURATIONS
) -> Program:
    if qubit is QubitKind.LOW:
        return psi_l_program(durations)
    return psi_h_program(durations)


def hide_program(durations: PulseDurations = DEFAULT_DURATIONS) -> Program:
    """|D⟩|0⟩ → |S⟩|1⟩ so the atom sits in S during the comb pulse."""
    return (make_pulse(ATOM_SIDEBAND, PI, 0.0, durations=durations, label="hide"),)


def unhide_program(
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> Program:
    """Exact inverse of ``hide_program``."""
    return (make_pulse(ATOM_SIDEBAND, PI, PI, durations=durations, label="unhide"),)


def analysis_program(
    qubit: QubitKind,
    phi_a: float,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> Program:
    """Low: opposite phase steps on atom and molecule. High: equal steps."""
    atom = make_pulse(
        ATOM_CARRIER, HALF_PI, phi_a, durations=durations, label="atom_analysis"
    )
    if qubit is QubitKind.LOW:
        mol = make_pulse(
            MOL_CARRIER, HALF_PI, -phi_a, durations=durations, label="mol_analysis"
        )
        return (atom, mol)
    comb = make_pulse(
        COMB_CARRIER, HALF_PI, phi_a, durations=durations, label="comb_analysis"
    )
    return (
        *hide_program(durations),
        comb,
        *unhide_program(durations),
        atom,
    )


def qls_program(
    target: HeraldTarget, durations: PulseDurations = DEFAULT_DURATIONS
) -> Program:
    """Map the target molecular level onto |S⟩ starting from |D⟩|n⟩."""
    mol = MOL_SIDEBAND if target is HeraldTarget.MINUS32 else MOL_SIDEBAND_REVERSED
    return (
        make_pulse(mol, PI, durations=durations, label=f"qls_{target.value}"),
        make_pulse(ATOM_SIDEBAND_REVERSED, PI, durations=durations, label="qls_map"),
    )


def pump_program(
    target: HeraldTarget, durations: PulseDurations = DEFAULT_DURATIONS
) -> Program:
    """One herald pump towards ``target`` starting from |D⟩|0⟩.

    The molecular pulse is resolved on the n = 0 pair, so a molecule already
    in ``target`` sits out the pump and the atom returns to |D⟩.
    """
    mol = MOL_SIDEBAND if target is HeraldTarget.MINUS32 else MOL_SIDEBAND_REVERSED
    pump = make_pulse(
        mol, PI, durations=durations, label=f"pump_{target.value}", rung=0
    )
    return (
        make_pulse(ATOM_SIDEBAND, PI, durations=durations, label="pump_atom"),
        pump,
        make_pulse(ATOM_SIDEBAND, PI, durations=durations, label="pump_atom"),
    )


def molecular_indices(pulses: Sequence[PulseSpec]) -> tuple[int, ...]:
    return tuple(i for i, p in enumerate(pulses) if p.selector.is_molecular)


def dephasing_windows(
    qubit: QubitKind, durations: PulseDurations = DEFAULT_DURATIONS
) -> tuple[float, float]:
    """(atom, comb) accrual windows in µs.

    The atom accrues from the mapping sideband pulse that creates the D
    branch until the atomic analysis pulse; the comb from the creation comb
    pulse until the analysis comb pulse.
    """
    creation = creation_program(qubit, durations)
    pulses = (*creation, *analysis_program(qubit, 0.0, durations))
    mapping = len(creation) - 1
    carrier = next(
        i
        for i in range(len(creation), len(pulses))
        if pulses[i].selector == ATOM_CARRIER
    )
    atom_us = sum(p.duration_us for p in pulses[mapping:carrier])
    if qubit is QubitKind.LOW:
        return atom_us, 0.0
    first, second = (i for i, p in enumerate(pulses) if p.selector == COMB_CARRIER)
    comb_us = sum(p.duration_us for p in pulses[first:second])
    return atom_us, comb_us


# --- program execution ---------------------------------------------------------


def run_program(
    state: StateVector,
    pulses: Sequence[PulseSpec],
    *,
    leak_events: Collection[int] = (),
    offset: int = 0,
) -> StateVector:
    """Apply ``pulses`` in order; the molecule leaks after each pulse whose
    program index (``offset`` + position) is in ``leak_events``.

    A coherent result must stay normalized and off the truncation boundary,
    otherwise ``NormalizationError``/``TruncationError`` is raised.
    """
    for position, pulse in enumerate(pulses):
        if state.leaked:
            getAppLogger().trace(
                "[run_program] leaked, %d pulse(s) skipped", len(pulses) - position
            )
            break
        state = apply_pulse(state, pulse)
        if offset + position in leak_events:
            getAppLogger().trace("[run_program] leak after %s", pulse.label)
            state = state.mark_leaked()
    if not state.leaked:
        check_norm(state)
        check_truncation(state)
    return state


def run_with_leaks(
    state: StateVector,
    pulses: Sequence[PulseSpec],
    cfg: NoiseConfig,
    rng: np.random.Generator,
) -> StateVector:
    leaks = sample_leak_events(cfg.leak_per_pulse, molecular_indices(pulses), rng)
    return run_program(state, pulses, leak_events=leaks)


# --- states ------------------------------------------------------------------------


def initial_state(
    mol: MolLevel = MolLevel.MINUS32,
    n: int = 0,
    n_max: int = DEFAULT_N_MAX,
    atom: AtomLevel = AtomLevel.S,
) -> StateVector:
    """|atom⟩|mol⟩|n⟩; a leaked molecule keeps a placeholder amplitude."""
    if mol is MolLevel.LEAKED:
        placeholder = BasisLabel(atom, MolLevel.MINUS32, n)
        return new_basis_state(placeholder, n_max).mark_leaked()
    return new_basis_state(BasisLabel(atom, mol, n), n_max)


def psi_i_target(n_max: int = DEFAULT_N_MAX) -> StateVector:
    """(|S,−3/2,0⟩ − i|S,−5/2,1⟩)/√2."""
    r = 1 / math.sqrt(2)
    return superposition(
        {
            BasisLabel(AtomLevel.S, MolLevel.MINUS32, 0): r,
            BasisLabel(AtomLevel.S, MolLevel.MINUS52, 1): -1j * r,
        },
        n_max,
    )


def psi_l_target(n_max: int = DEFAULT_N_MAX) -> StateVector:
    """(|S,−3/2,0⟩ − |D,−5/2,0⟩)/√2."""
    r = 1 / math.sqrt(2)
    return superposition(
        {
            BasisLabel(AtomLevel.S, MolLevel.MINUS32, 0): r,
            BasisLabel(AtomLevel.D, MolLevel.MINUS52, 0): -r,
        },
        n_max,
    )


def psi_h_target(n_max: int = DEFAULT_N_MAX) -> StateVector:
    """−i(|S,0,0⟩ − |D,−3/2,0⟩)/√2."""
    r = 1 / math.sqrt(2)
    return superposition(
        {
            BasisLabel(AtomLevel.S, MolLevel.J0, 0): -1j * r,
            BasisLabel(AtomLevel.D, MolLevel.MINUS32, 0): 1j * r,
        },
        n_max,
    )


def target_state(qubit: QubitKind, n_max: int = DEFAULT_N_MAX) -> StateVector:
    return psi_l_target(n_max) if qubit is QubitKind.LOW else psi_h_target(n_max)


def with_molecule(state: StateVector, mol: MolLevel) -> StateVector:
    """Replace the molecular state by ``mol``, keeping the atom/motion marginal
    of a product state."""
    tensor = state.as_tensor()
    marginal = np.sqrt(np.sum(np.abs(tensor) ** 2, axis=1))
    out = np.zeros_like(tensor)
    out[:, QUBIT_MOL_LEVELS.index(mol), :] = marginal
    return state.with_amplitudes(out.reshape(-1))


# --- coherent operations -------------------------------------------------------------


def create_psi_i(
    psi0: StateVector, durations: PulseDurations = DEFAULT_DURATIONS
) -> StateVector:
    return sequence(psi0, psi_i_program(durations))


def create_psi_l(
    psi0: StateVector, durations: PulseDurations = DEFAULT_DURATIONS
) -> StateVector:
    """Molecular sideband π/2 then the atomic sideband mapping π-pulse."""
    return sequence(psi0, psi_l_program(durations))


def create_psi_h(
    psi_i: StateVector, durations: PulseDurations = DEFAULT_DURATIONS
) -> StateVector:
    """Comb carrier π, 1051 nm carrier π, atomic sideband π applied to Ψ_I."""
    return sequence(psi_i, _psi_h_mapping(durations))


def hide_unhide(
    state: StateVector,
    direction: Literal["hide", "unhide"],
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> StateVector:
    if direction == "hide":
        return sequence(state, hide_program(durations))
    if direction == "unhide":
        return sequence(state, unhide_program(durations))
    msg = f"direction must be 'hide' or 'unhide', got {direction!r}"
    raise ValueError(msg)


def analysis_pulses(
    state: StateVector,
    qubit: QubitKind,
    phi_a: float,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> StateVector:
    return sequence(state, analysis_program(qubit, phi_a, durations))


def apply_trial_dephasing(
    state: StateVector, qubit: QubitKind, noise: TrialNoise, cfg: NoiseConfig
) -> StateVector:
    """Imprint the trial's quasi-static phases onto the created state.

    Atom phase lands on the D branch, comb phase on the |0⟩ branch (high
    qubit); the 1051 nm Stark offset lands on the −5/2 branch (low qubit).
    """
    n_max = state.n_max
    state = apply_dephasing(
        state,
        level_mask(n_max, atom=AtomLevel.D),
        noise.atom_phase_error + cfg.stark_phase_atom_rad,
    )
    if qubit is QubitKind.HIGH:
        return apply_dephasing(
            state,
            level_mask(n_max, mol=MolLevel.J0),
            noise.comb_phase_error + cfg.stark_phase_comb_rad,
        )
    return apply_dephasing(
        state, level_mask(n_max, mol=MolLevel.MINUS52), cfg.stark_phase_mol_rad
    )


def create_entangled_state(
    molecule: StateVector,
    qubit: QubitKind,
    phi_a: float | None,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> tuple[ProtocolResult, TrialNoise]:
    """One noisy creation (plus analysis pulses when ``phi_a`` is set).

    ``molecule`` carries the heralded molecular state; atom and motion are
    re-prepared to |S⟩|n⟩ with n from the trial's thermal draw.
    """
    creation = creation_program(qubit, durations)
    analysis = () if phi_a is None else analysis_program(qubit, phi_a, durations)
    atom_window, comb_window = dephasing_windows(qubit, durations)
    noise = sample_trial_noise(
        cfg,
        rng,
        n_max=molecule.n_max,
        atom_window_us=atom_window,
        comb_window_us=comb_window,
        molecular_pulses=molecular_indices((*creation, *analysis)),
    )

    flags: set[str] = set()
    state = reset_atom_motion(molecule, rng, AtomLevel.S, noise.initial_n)
    if noise.prep_flip:
        state = with_molecule(state, MolLevel.MINUS52)
        flags.add(FLAG_PREP_FLIP)
    if noise.leaked_at_start:
        state = state.mark_leaked()

    state = run_program(state, creation, leak_events=noise.leak_events)
    state = apply_trial_dephasing(state, qubit, noise, cfg)
    state = run_program(
        state, analysis, leak_events=noise.leak_events, offset=len(creation)
    )
    if state.leaked:
        flags.add(FLAG_LEAKED)
    return ProtocolResult(state, flags=frozenset(flags)), noise


# --- QLS readout and heralding ---------------------------------------------------


def _qls(
    state: StateVector,
    target: HeraldTarget,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations,
) -> QlsOutcome:
    n = sample_initial_motion(cfg, rng, state.n_max)
    state = reset_atom_motion(state, rng, AtomLevel.D, n)
    state = run_with_leaks(state, qls_program(target, durations), cfg, rng)
    detection = detect_atom(state, cfg, rng)
    return QlsOutcome(detection.bright, detection.photon_counts, detection.state)


def qls_detect_minus32(
    state: StateVector,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> QlsOutcome:
    """Positive iff the molecule was in −3/2; a hit leaves it in −5/2."""
    return _qls(state, HeraldTarget.MINUS32, cfg, rng, durations)


def qls_detect_minus52(
    state: StateVector,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> QlsOutcome:
    """Mirror of ``qls_detect_minus32``: −5/2 is detected and moved to −3/2."""
    return _qls(state, HeraldTarget.MINUS52, cfg, rng, durations)


def verify_manifold(
    state: StateVector,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> ManifoldCheck:
    """Check the molecule is still in {−3/2, −5/2} and restore it to −3/2.

    The −3/2 readout moves −3/2 to −5/2, the −5/2 readout then moves it back,
    so the molecule ends in −3/2 exactly when the second readout is positive.
    """
    first = qls_detect_minus32(state, cfg, rng, durations)
    second = qls_detect_minus52(first.state, cfg, rng, durations)
    return ManifoldCheck(
        restored=second.positive,
        found_minus32=first.positive,
        found_minus52=second.positive,
        state=second.state,
    )


def _confirm(
    state: StateVector,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations,
    *,
    expect_minus32: bool,
) -> tuple[bool, StateVector]:
    check = verify_manifold(state, cfg, rng, durations)
    consistent = check.restored and (check.found_minus32 or not expect_minus32)
    return consistent, check.state


def herald_prepare_minus32(
    state: StateVector,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    *,
    max_attempts: int = DEFAULT_MAX_HERALD_ATTEMPTS,
    confirmations: int = DEFAULT_HERALD_CONFIRMATIONS,
    schedule: Sequence[str] = DEFAULT_HERALD_SCHEDULE,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> ProtocolResult:
    """Pump until a confirmed herald leaves the molecule in −3/2.

    Pumps follow ``schedule`` cyclically. A bright pump detection triggers a
    manifold check (−3/2 readout then −5/2 readout, which restores −3/2);
    success needs ``confirmations`` consistent checks in a row, where every
    check after the first must also find −3/2. ``attempts`` counts pumps.
    """
    logger = getAppLogger()
    if max_attempts < 1:
        msg = f"max_attempts must be at least 1, got {max_attempts}"
        raise ValueError(msg)
    if confirmations < 1:
        msg = f"confirmations must be at least 1, got {confirmations}"
        raise ValueError(msg)
    targets = tuple(HeraldTarget(name) for name in schedule)
    if not targets:
        msg = "Herald schedule must name at least one pump target"
        raise ValueError(msg)

    outcomes: list[bool] = []
    for attempt in range(1, max_attempts + 1):
        if state.leaked:
            outcomes.append(False)
            continue
        target = targets[(attempt - 1) % len(targets)]
        n = sample_initial_motion(cfg, rng, state.n_max)
        state = reset_atom_motion(state, rng, AtomLevel.D, n)
        state = run_with_leaks(state, pump_program(target, durations), cfg, rng)
        detection = detect_atom(state, cfg, rng)
        state = detection.state
        outcomes.append(detection.bright)
        if not detection.bright:
            continue

        streak = 0
        consistent, state = _confirm(state, cfg, rng, durations, expect_minus32=False)
        while consistent:
            streak += 1
            if streak >= confirmations:
                logger.trace(
                    "[herald] success after %d pump(s), last %s",
                    attempt,
                    target.value,
                )
                return ProtocolResult(
                    state, tuple(outcomes), frozenset(), attempts=attempt
                )
            consistent, state = _confirm(
                state, cfg, rng, durations, expect_minus32=True
            )

    flags = {FLAG_HERALD_ABORTED}
    if state.leaked:
        flags.add(FLAG_LEAKED)
    logger.debug("Herald aborted after %d attempts", max_attempts)
    return ProtocolResult(
        state,
        tuple(outcomes),
        frozenset(flags),
        attempts=max_attempts,
        success=False,
    )


def herald_round(
    cfg: NoiseConfig,
    rng: np.random.Generator,
    *,
    n_max: int = DEFAULT_N_MAX,
    max_attempts: int = DEFAULT_MAX_HERALD_ATTEMPTS,
    confirmations: int = DEFAULT_HERALD_CONFIRMATIONS,
    schedule: Sequence[str] = DEFAULT_HERALD_SCHEDULE,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> ProtocolResult:
    """Draw a fresh molecule from ``herald_prior`` and herald it."""
    mol = sample_molecular_prior(cfg, rng)
    start = initial_state(mol, 0, n_max, atom=AtomLevel.D)
    return herald_prepare_minus32(
        start,
        cfg,
        rng,
        max_attempts=max_attempts,
        confirmations=confirmations,
        schedule=schedule,
        durations=durations,
    )

