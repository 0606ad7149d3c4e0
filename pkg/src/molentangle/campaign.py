# src/molentangle/campaign.py

"""Heralded Monte Carlo runs of a configured protocol.

Parity scans follow the experiment's bookkeeping: herald a molecule, repeat
the protocol at one analysis phase while the molecule stays in the qubit
manifold, and on manifold loss re-herald at a freshly drawn phase. Other
protocols run independent herald-plus-trial realizations, which may be
spread over worker processes.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from pathlib import Path

import numpy as np

from .analysis import (
    bootstrap_uncertainty,
    fit_fringe,
    fit_report_lines,
    fringe_points,
    write_plot_csv,
)
from .constants import (
    DEFAULT_BOOTSTRAP_RESAMPLES,
    DEFAULT_BUDGET_FACTOR,
    DEFAULT_HERALD_CONFIRMATIONS,
    DEFAULT_HERALD_SCHEDULE,
    DEFAULT_MAX_HERALD_ATTEMPTS,
    DEFAULT_N_MAX,
    DEFAULT_OUT_DIR,
    DEFAULT_POPULATION_TRIALS,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    MAX_SEED,
    MIN_N_MAX,
)
from .detection import detect_atom, reset_atom_motion
from .errors import DegenerateFitError, InsufficientDataError
from .hilbert import AtomLevel, MolLevel, StateVector, dump_state, state_fidelity
from .logs import getAppLogger
from .measurement import (
    PopulationEstimate,
    detect_molecule_after_atom,
    estimate_populations,
    format_key,
    subspace_keys,
)
from .noise import (
    NoiseConfig,
    check_thermal_truncation,
    sample_initial_motion,
    sample_leak_events,
)
from .protocols import (
    DEFAULT_DURATIONS,
    FLAG_LEAKED,
    Program,
    ProtocolResult,
    PulseDurations,
    QubitKind,
    create_entangled_state,
    creation_program,
    herald_round,
    initial_state,
    molecular_indices,
    qls_detect_minus32,
    run_program,
    target_state,
    verify_manifold,
)
from .pulses import parse_pulse, sequence
from .records import MolOutcome, TrialRecord, write_records
from .utils import Stream, ordered_map, trial_rng


class Protocol(Enum):
    PREPARE = "prepare"
    PSI_L = "psi_L"
    PSI_H = "psi_H"
    PARITY_SCAN_L = "parity_scan_L"
    PARITY_SCAN_H = "parity_scan_H"
    POPULATION_L = "population_L"
    POPULATION_H = "population_H"
    CUSTOM = "custom"

    @property
    def qubit(self) -> QubitKind | None:
        if self.value.endswith("_L"):
            return QubitKind.LOW
        if self.value.endswith("_H"):
            return QubitKind.HIGH
        return None

    @property
    def is_scan(self) -> bool:
        return self in (Protocol.PARITY_SCAN_L, Protocol.PARITY_SCAN_H)

    @property
    def writes_state(self) -> bool:
        return self in (Protocol.PSI_L, Protocol.PSI_H, Protocol.CUSTOM)


PROTOCOL_NAMES: tuple[str, ...] = tuple(p.value for p in Protocol)


def qubit_of_records(records: Sequence[TrialRecord]) -> QubitKind | None:
    """The one qubit named by the rows' protocols, if they agree on one."""
    qubits = {
        Protocol(r.protocol).qubit for r in records if r.protocol in PROTOCOL_NAMES
    }
    qubits.discard(None)
    if len(qubits) == 1:
        return qubits.pop()
    return None


@dataclass(frozen=True)
class HeraldSettings:
    max_attempts: int = DEFAULT_MAX_HERALD_ATTEMPTS
    confirmations: int = DEFAULT_HERALD_CONFIRMATIONS
    schedule: tuple[str, ...] = DEFAULT_HERALD_SCHEDULE


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved, validated experiment.

    ``phi_a``/``targets`` drive parity scans; ``trials`` drives every other
    protocol. ``qubit`` picks the molecular readout chain for ``custom``.
    """

    protocol: Protocol
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    phi_a: tuple[float, ...] = ()
    targets: tuple[int, ...] = ()
    trials: int = DEFAULT_POPULATION_TRIALS
    seed: int = DEFAULT_SEED
    n_max: int = DEFAULT_N_MAX
    out_dir: Path = Path(DEFAULT_OUT_DIR)
    herald: HeraldSettings = field(default_factory=HeraldSettings)
    durations: PulseDurations = DEFAULT_DURATIONS
    budget: int | None = None
    sequence: tuple[str, ...] = ()
    qubit: QubitKind = QubitKind.LOW
    workers: int = DEFAULT_WORKERS
    bootstrap_resamples: int = DEFAULT_BOOTSTRAP_RESAMPLES

    def __post_init__(self) -> None:
        if len(self.phi_a) != len(self.targets):
            msg = (
                f"phi_a has {len(self.phi_a)} entries but targets has "
                f"{len(self.targets)}"
            )
            raise ValueError(msg)
        if len(set(self.phi_a)) != len(self.phi_a):
            msg = "phi_a values must be distinct"
            raise ValueError(msg)
        if any(t <= 0 for t in self.targets):
            msg = "Every target trial count must be positive"
            raise ValueError(msg)
        if self.protocol.is_scan and not self.phi_a:
            msg = f"Protocol {self.protocol.value} needs a non-empty phi_a list"
            raise ValueError(msg)
        if self.protocol is Protocol.CUSTOM and not self.sequence:
            msg = "Protocol custom needs a non-empty pulse sequence"
            raise ValueError(msg)
        self.custom_program()
        if self.trials < 1:
            msg = f"trials must be at least 1, got {self.trials}"
            raise ValueError(msg)
        if self.n_max < MIN_N_MAX:
            msg = f"n_max must be at least {MIN_N_MAX}, got {self.n_max}"
            raise ValueError(msg)
        if not 0 <= self.seed <= MAX_SEED:
            msg = f"seed must fit in 64 unsigned bits, got {self.seed}"
            raise ValueError(msg)
        if self.budget is not None and self.budget < 1:
            msg = f"budget must be positive, got {self.budget}"
            raise ValueError(msg)

    @property
    def measured_qubit(self) -> QubitKind:
        return self.protocol.qubit or self.qubit

    @property
    def trial_budget(self) -> int:
        if self.budget is not None:
            return self.budget
        planned = sum(self.targets) if self.protocol.is_scan else self.trials
        return DEFAULT_BUDGET_FACTOR * planned

    def custom_program(self) -> Program:
        return tuple(parse_pulse(text) for text in self.sequence)


@dataclass(frozen=True)
class TrialOutcome:
    atom_outcome: AtomLevel
    mol_outcome: MolOutcome
    photon_counts: int
    valid: bool
    state: StateVector
    flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class RunRecords:
    """Raw output of a run before anything is written."""

    records: tuple[TrialRecord, ...]
    herald_rounds: int
    herald_successes: int
    manifold_breaks: int = 0
    budget_exhausted: bool = False


@dataclass(frozen=True)
class CampaignSummary:
    protocol: Protocol
    seed: int
    counts: dict[float, int]  # valid trials per phi_a (scans only)
    targets: dict[float, int]
    valid_trials: int
    invalid_trials: int
    herald_rounds: int
    herald_successes: int
    herald_attempts: int
    manifold_breaks: int
    leaked_trials: int
    budget: int
    budget_exhausted: bool
    outputs: dict[str, Path] = field(default_factory=dict)

    @property
    def total_rows(self) -> int:
        return self.valid_trials + self.invalid_trials

    @property
    def herald_efficiency(self) -> float:
        """Successful herald rounds per pump sequence."""
        if self.herald_attempts == 0:
            return 0.0
        return self.herald_successes / self.herald_attempts

    def lines(self) -> list[str]:
        lines = [
            f"protocol = {self.protocol.value}",
            f"seed = {self.seed}",
            f"rows = {self.total_rows}",
            f"valid_trials = {self.valid_trials}",
            f"invalid_trials = {self.invalid_trials}",
            f"herald_rounds = {self.herald_rounds}",
            f"herald_successes = {self.herald_successes}",
            f"herald_attempts = {self.herald_attempts}",
            f"herald_efficiency = {self.herald_efficiency:.6f}",
            f"manifold_breaks = {self.manifold_breaks}",
            f"leaked_trials = {self.leaked_trials}",
            f"budget = {self.budget}",
            f"budget_exhausted = {str(self.budget_exhausted).lower()}",
        ]
        for phi, target in self.targets.items():
            lines.append(f"phi_a[{phi:.6f}] = {self.counts.get(phi, 0)}/{target}")
        lines += [f"output.{name} = {path.name}" for name, path in self.outputs.items()]
        return lines


# --- single trials ---------------------------------------------------------------


def run_trial(
    molecule: StateVector,
    qubit: QubitKind,
    phi_a: float | None,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> TrialOutcome:
    """Create the entangled state, then read out the atom and the molecule."""
    result, _ = create_entangled_state(molecule, qubit, phi_a, cfg, rng, durations)
    atom = detect_atom(result.final_state, cfg, rng)
    mol, state = detect_molecule_after_atom(atom.state, qubit, cfg, rng, durations)
    return TrialOutcome(
        atom.outcome,
        mol,
        atom.photon_counts,
        result.valid and not state.leaked,
        state,
        result.flags,
    )


def run_custom_trial(
    molecule: StateVector,
    program: Program,
    qubit: QubitKind,
    cfg: NoiseConfig,
    rng: np.random.Generator,
    durations: PulseDurations = DEFAULT_DURATIONS,
) -> TrialOutcome:
    """Apply a user pulse program to |S⟩|n⟩ and the heralded molecule."""
    n = sample_initial_motion(cfg, rng, molecule.n_max)
    state = reset_atom_motion(molecule, rng, AtomLevel.S, n)
    leaks = sample_leak_events(cfg.leak_per_pulse, molecular_indices(program), rng)
    state = run_program(state, program, leak_events=leaks)
    atom = detect_atom(state, cfg, rng)
    mol, state = detect_molecule_after_atom(atom.state, qubit, cfg, rng, durations)
    flags = frozenset({FLAG_LEAKED}) if state.leaked else frozenset()
    return TrialOutcome(
        atom.outcome, mol, atom.photon_counts, not state.leaked, state, flags
    )


def _herald(cfg: ExperimentConfig, index: int) -> ProtocolResult:
    settings = cfg.herald
    return herald_round(
        cfg.noise,
        trial_rng(cfg.seed, index, Stream.HERALD),
        n_max=cfg.n_max,
        max_attempts=settings.max_attempts,
        confirmations=settings.confirmations,
        schedule=settings.schedule,
        durations=cfg.durations,
    )


def _aborted_row(
    trial_id: int, protocol: Protocol, phi_a: float | None, attempts: int
) -> TrialRecord:
    return TrialRecord(
        trial_id,
        protocol.value,
        phi_a,
        AtomLevel.D,
        MolOutcome.NONE,
        0,
        herald_attempts=attempts,
        valid=False,
    )


def _independent_trial(
    index: int, *, cfg: ExperimentConfig
) -> tuple[TrialRecord, bool]:
    """One herald round plus one trial; picklable for worker processes.

    Returns the row and whether its herald succeeded.
    """
    herald = _herald(cfg, index)
    if not herald.success:
        return _aborted_row(index, cfg.protocol, None, herald.attempts), False

    rng = trial_rng(cfg.seed, index)
    if cfg.protocol is Protocol.PREPARE:
        readout = qls_detect_minus32(
            herald.final_state, cfg.noise, rng, cfg.durations
        )
        record = TrialRecord(
            index,
            cfg.protocol.value,
            None,
            AtomLevel.S if readout.positive else AtomLevel.D,
            MolOutcome.MINUS32 if readout.positive else MolOutcome.OTHER,
            readout.photon_counts,
            herald_attempts=herald.attempts,
            valid=not readout.state.leaked,
        )
        return record, True

    if cfg.protocol is Protocol.CUSTOM:
        outcome = run_custom_trial(
            herald.final_state,
            cfg.custom_program(),
            cfg.qubit,
            cfg.noise,
            rng,
            cfg.durations,
        )
    else:
        outcome = run_trial(
            herald.final_state,
            cfg.measured_qubit,
            None,
            cfg.noise,
            rng,
            cfg.durations,
        )
    record = TrialRecord(
        index,
        cfg.protocol.value,
        None,
        outcome.atom_outcome,
        outcome.mol_outcome,
        outcome.photon_counts,
        herald_attempts=herald.attempts,
        valid=outcome.valid,
    )
    return record, True


def independent_records(cfg: ExperimentConfig) -> RunRecords:
    """``cfg.trials`` realizations, each with its own herald round.

    Rows beyond the trial budget are not run.
    """
    count = min(cfg.trials, cfg.trial_budget)
    results = ordered_map(
        partial(_independent_trial, cfg=cfg), range(count), workers=cfg.workers
    )
    return RunRecords(
        tuple(record for record, _ in results),
        herald_rounds=count,
        herald_successes=sum(1 for _, heralded in results if heralded),
        budget_exhausted=count < cfg.trials,
    )


# --- parity scan campaign -----------------------------------------------------------


def _draw_phase(incomplete: Sequence[int], rng: np.random.Generator) -> int:
    return int(incomplete[int(rng.integers(len(incomplete)))])


def scan_records(cfg: ExperimentConfig) -> RunRecords:
    """Sequential campaign loop over the φ_a schedule.

    Each herald opens a block at one φ_a. The block repeats the protocol,
    checking manifold membership after every trial, until the point reaches
    its target or the molecule is lost. The next block's φ_a is drawn
    uniformly from the points still short of their target. Herald aborts
    are recorded as invalid rows; every row counts against the budget.
    """
    logger = getAppLogger()
    qubit = cfg.measured_qubit
    budget = cfg.trial_budget
    counts = [0] * len(cfg.phi_a)
    records: list[TrialRecord] = []
    phase_rng = trial_rng(cfg.seed, 0, Stream.CAMPAIGN)

    def incomplete() -> list[int]:
        pairs = zip(counts, cfg.targets, strict=True)
        return [i for i, (count, target) in enumerate(pairs) if count < target]

    rounds = successes = breaks = 0
    while incomplete() and len(records) < budget:
        point = _draw_phase(incomplete(), phase_rng)
        phi = cfg.phi_a[point]
        herald = _herald(cfg, rounds)
        rounds += 1
        if not herald.success:
            row = _aborted_row(len(records), cfg.protocol, phi, herald.attempts)
            records.append(row)
            continue
        successes += 1

        state = herald.final_state
        attempts = herald.attempts
        while counts[point] < cfg.targets[point] and len(records) < budget:
            index = len(records)
            rng = trial_rng(cfg.seed, index)
            outcome = run_trial(state, qubit, phi, cfg.noise, rng, cfg.durations)
            records.append(
                TrialRecord(
                    index,
                    cfg.protocol.value,
                    phi,
                    outcome.atom_outcome,
                    outcome.mol_outcome,
                    outcome.photon_counts,
                    herald_attempts=attempts,
                    valid=outcome.valid,
                )
            )
            attempts = 0
            if outcome.valid:
                counts[point] += 1
            check = verify_manifold(outcome.state, cfg.noise, rng, cfg.durations)
            if not check.restored:
                breaks += 1
                logger.trace("[scan] manifold lost at trial %d", index)
                break
            state = check.state

    exhausted = bool(incomplete())
    if exhausted:
        logger.warning(
            "Trial budget of %d rows exhausted with %d point(s) short of target",
            budget,
            len(incomplete()),
        )
    return RunRecords(tuple(records), rounds, successes, breaks, exhausted)


def simulate_records(cfg: ExperimentConfig) -> RunRecords:
    check_thermal_truncation(cfg.noise, cfg.n_max)
    if cfg.protocol.is_scan:
        return scan_records(cfg)
    return independent_records(cfg)


# --- outputs -----------------------------------------------------------------------


def _write_lines(path: Path, lines: Sequence[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def population_lines(pop: PopulationEstimate) -> list[str]:
    lines = [f"qubit = {pop.qubit.value}", f"trials = {pop.total}"]
    for key in subspace_keys(pop.qubit):
        name = f"P[{format_key(key)}]"
        lines.append(
            f"{name} = {pop.probability(key):.6f} +- {pop.standard_error(key):.6f}"
        )
    lines.append(f"P[other] = {pop.other_probability:.6f}")
    return lines


def noiseless_state(cfg: ExperimentConfig) -> StateVector:
    """Final state of the protocol's pulses from |S,−3/2,0⟩ without noise."""
    start = initial_state(MolLevel.MINUS32, 0, cfg.n_max)
    if cfg.protocol is Protocol.CUSTOM:
        return sequence(start, cfg.custom_program())
    return sequence(start, creation_program(cfg.measured_qubit, cfg.durations))


def state_lines(cfg: ExperimentConfig) -> list[str]:
    state = noiseless_state(cfg)
    lines = dump_state(state).splitlines()
    if cfg.protocol is not Protocol.CUSTOM:
        target = target_state(cfg.measured_qubit, cfg.n_max)
        lines.append(f"# fidelity_to_target = {state_fidelity(target, state):.12f}")
    return lines


def _write_fit(cfg: ExperimentConfig, valid: Sequence[TrialRecord]) -> dict[str, Path]:
    qubit = cfg.measured_qubit
    points = fringe_points(valid, qubit)
    fit = fit_fringe(points)
    try:
        bootstrap = bootstrap_uncertainty(
            valid,
            qubit,
            resamples=cfg.bootstrap_resamples,
            seed=cfg.seed,
            workers=cfg.workers,
        )
    except InsufficientDataError as e:
        getAppLogger().warning("Skipping bootstrap: %s", e)
        bootstrap = None

    fringe = cfg.out_dir / "fringe.csv"
    write_plot_csv(fringe, points, fit)
    lines = fit_report_lines(fit, qubit=qubit, bootstrap=bootstrap)
    return {"fit": _write_lines(cfg.out_dir / "fit.txt", lines), "fringe": fringe}


def write_outputs(cfg: ExperimentConfig, run: RunRecords) -> dict[str, Path]:
    """Write every artifact the protocol produces under ``cfg.out_dir``."""
    logger = getAppLogger()
    outputs = {"records": cfg.out_dir / "records.csv"}
    write_records(outputs["records"], run.records)

    valid = [r for r in run.records if r.valid]
    if cfg.protocol.is_scan:
        try:
            outputs.update(_write_fit(cfg, valid))
        except (DegenerateFitError, InsufficientDataError) as e:
            logger.warning("No fringe fit: %s", e)
    elif cfg.protocol is not Protocol.PREPARE:
        try:
            pop = estimate_populations(run.records, cfg.measured_qubit)
            outputs["populations"] = _write_lines(
                cfg.out_dir / "populations.txt", population_lines(pop)
            )
        except InsufficientDataError as e:
            logger.warning("No populations: %s", e)
    if cfg.protocol.writes_state:
        outputs["state"] = _write_lines(cfg.out_dir / "state.txt", state_lines(cfg))
    return outputs


def summarize(
    cfg: ExperimentConfig, run: RunRecords, outputs: dict[str, Path] | None = None
) -> CampaignSummary:
    """Reconcile the rows: every row is a valid trial, a failed trial or an
    aborted herald round."""
    counts: dict[float, int] = {}
    targets: dict[float, int] = {}
    if cfg.protocol.is_scan:
        targets = dict(zip(cfg.phi_a, cfg.targets, strict=True))
        counts = dict.fromkeys(cfg.phi_a, 0)
        for record in run.records:
            if record.valid and record.phi_a is not None:
                counts[record.phi_a] += 1
    valid = sum(1 for r in run.records if r.valid)
    invalid = len(run.records) - valid
    aborted = run.herald_rounds - run.herald_successes
    return CampaignSummary(
        protocol=cfg.protocol,
        seed=cfg.seed,
        counts=counts,
        targets=targets,
        valid_trials=valid,
        invalid_trials=invalid,
        herald_rounds=run.herald_rounds,
        herald_successes=run.herald_successes,
        herald_attempts=sum(r.herald_attempts for r in run.records),
        manifold_breaks=run.manifold_breaks,
        leaked_trials=invalid - aborted,
        budget=cfg.trial_budget,
        budget_exhausted=run.budget_exhausted,
        outputs=dict(outputs or {}),
    )


def run_campaign(cfg: ExperimentConfig) -> CampaignSummary:
    """Run the configured protocol and write records, reports and summary."""
    logger = getAppLogger()
    logger.debug(
        "Running %s (seed=%d, n_max=%d, workers=%d)",
        cfg.protocol.value,
        cfg.seed,
        cfg.n_max,
        cfg.workers,
    )
    run = simulate_records(cfg)
    outputs = write_outputs(cfg, run)
    outputs["summary"] = cfg.out_dir / "summary.txt"
    summary = summarize(cfg, run, outputs)
    _write_lines(outputs["summary"], summary.lines())
    return summary


def run_population(cfg: ExperimentConfig) -> PopulationEstimate:
    """Creation plus dual detection without analysis pulses."""
    if cfg.protocol.is_scan:
        msg = f"Protocol {cfg.protocol.value} is a parity scan, not a population run"
        raise ValueError(msg)
    run = simulate_records(cfg)
    return estimate_populations(run.records, cfg.measured_qubit)
