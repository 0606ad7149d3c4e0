# tests/50_core/test_campaign.py
"""Tests for heralded Monte Carlo campaigns and their bookkeeping."""

import math
from pathlib import Path

import apathetic_logging as alib_logging
import numpy as np
import pytest

import molentangle.analysis as mod_analysis
import molentangle.campaign as mod_campaign
import molentangle.noise as mod_noise
import molentangle.presets as mod_presets
import molentangle.protocols as mod_protocols
import molentangle.records as mod_records


Protocol = mod_campaign.Protocol
QUARTER_TURNS = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4)


def clean_noise(**overrides: object) -> mod_noise.NoiseConfig:
    return mod_noise.NoiseConfig.ideal(detect_bright_mean=100.0, **overrides)


def scan_config(out_dir: Path, **overrides: object) -> mod_campaign.ExperimentConfig:
    settings: dict[str, object] = {
        "protocol": Protocol.PARITY_SCAN_L,
        "noise": clean_noise(),
        "phi_a": QUARTER_TURNS,
        "targets": (12, 12, 12, 12),
        "seed": 7,
        "out_dir": out_dir,
    }
    settings.update(overrides)
    return mod_campaign.ExperimentConfig(**settings)  # type: ignore[arg-type]


# --- configuration ------------------------------------------------------------------


@pytest.mark.parametrize(
    ("overrides", "match"),
    [
        ({"targets": (1, 2)}, "targets has"),
        ({"phi_a": (0.0, 0.0, 1.0, 2.0)}, "distinct"),
        ({"targets": (1, 0, 1, 1)}, "positive"),
        ({"phi_a": (), "targets": ()}, "non-empty phi_a"),
        ({"n_max": 2}, "n_max"),
        ({"budget": 0}, "budget"),
        ({"seed": -1}, "seed"),
    ],
)
def test_experiment_config_validation(
    tmp_path: Path, overrides: dict[str, object], match: str
) -> None:
    with pytest.raises(ValueError, match=match):
        scan_config(tmp_path, **overrides)


def test_custom_protocol_needs_a_sequence() -> None:
    with pytest.raises(ValueError, match="pulse sequence"):
        mod_campaign.ExperimentConfig(Protocol.CUSTOM)


def test_default_budget_is_ten_times_the_plan(tmp_path: Path) -> None:
    assert scan_config(tmp_path).trial_budget == 480  # noqa: PLR2004
    cfg = mod_campaign.ExperimentConfig(Protocol.POPULATION_L, trials=30)
    assert cfg.trial_budget == 300  # noqa: PLR2004
    assert scan_config(tmp_path, budget=17).trial_budget == 17  # noqa: PLR2004


def test_protocol_qubits() -> None:
    assert Protocol.PARITY_SCAN_H.qubit is mod_protocols.QubitKind.HIGH
    assert Protocol.PSI_L.qubit is mod_protocols.QubitKind.LOW
    assert Protocol.PREPARE.qubit is None
    assert Protocol.PARITY_SCAN_L.is_scan
    assert not Protocol.POPULATION_L.is_scan


def test_qubit_of_records() -> None:
    def row(protocol: str) -> mod_records.TrialRecord:
        return mod_records.TrialRecord(
            0,
            protocol,
            None,
            mod_protocols.AtomLevel.S,
            mod_records.MolOutcome.MINUS32,
            0,
        )

    low = mod_protocols.QubitKind.LOW
    assert mod_campaign.qubit_of_records([row("population_L"), row("prepare")]) is low
    assert mod_campaign.qubit_of_records([row("synthetic")]) is None
    mixed = [row("population_L"), row("parity_scan_H")]
    assert mod_campaign.qubit_of_records(mixed) is None


# --- parity scans -------------------------------------------------------------------


def test_noiseless_scan_meets_every_target(tmp_path: Path) -> None:
    summary = mod_campaign.run_campaign(scan_config(tmp_path))
    assert summary.counts == dict.fromkeys(QUARTER_TURNS, 12)
    assert summary.valid_trials == 48  # noqa: PLR2004
    assert summary.invalid_trials == 0
    assert summary.manifold_breaks == 0
    assert summary.herald_successes == summary.herald_rounds
    assert not summary.budget_exhausted
    assert {"records", "fit", "fringe", "summary"} <= set(summary.outputs)


def test_noiseless_scan_has_full_contrast(tmp_path: Path) -> None:
    """At 2φ_a = 0 and π every trial lands on one parity sign."""
    mod_campaign.run_campaign(scan_config(tmp_path))
    records = mod_records.read_records(tmp_path / "records.csv")
    points = mod_analysis.fringe_points(records, mod_protocols.QubitKind.LOW)
    by_phase = {p.phi_a: p for p in points}
    assert abs(by_phase[0.0].parity) == 1.0
    assert by_phase[math.pi / 2].parity == -by_phase[0.0].parity
    fit = mod_analysis.fit_fringe(points)
    assert fit.contrast >= 1.0 - 1e-6  # noqa: PLR2004


def test_scan_is_reproducible(tmp_path: Path) -> None:
    noise = mod_noise.NoiseConfig(prep_error=0.05, leak_per_pulse=0.01)
    first = scan_config(tmp_path / "a", noise=noise, targets=(4, 4, 4, 4))
    second = scan_config(tmp_path / "b", noise=noise, targets=(4, 4, 4, 4))
    mod_campaign.run_campaign(first)
    mod_campaign.run_campaign(second)
    for name in ("records.csv", "summary.txt"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes()


def test_different_seeds_differ(tmp_path: Path) -> None:
    noise = mod_noise.NoiseConfig()
    mod_campaign.run_campaign(scan_config(tmp_path / "a", noise=noise, seed=1))
    mod_campaign.run_campaign(scan_config(tmp_path / "b", noise=noise, seed=2))
    a = (tmp_path / "a" / "records.csv").read_bytes()
    b = (tmp_path / "b" / "records.csv").read_bytes()
    assert a != b


def test_small_budget_is_reported_as_exhausted(tmp_path: Path) -> None:
    summary = mod_campaign.run_campaign(scan_config(tmp_path, budget=5))
    assert summary.budget_exhausted
    assert summary.total_rows <= 5  # noqa: PLR2004
    assert "budget_exhausted = true" in summary.lines()


def test_exhausted_budget_logs_a_warning(
    tmp_path: Path,
    module_logger: alib_logging.Logger,
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    warnings: list[str] = []

    def record(msg: str, *args: object, **_kwargs: object) -> None:
        warnings.append(msg % args)

    monkeypatch.setattr(module_logger, "warning", record)
    mod_campaign.run_campaign(scan_config(tmp_path, budget=5))
    assert any("budget of 5 rows exhausted" in w for w in warnings)


def test_rows_reconcile_with_herald_and_leak_counts(tmp_path: Path) -> None:
    noise = clean_noise(herald_prior=(0.4, 0.4, 0.2), leak_per_trial=0.2)
    cfg = scan_config(
        tmp_path,
        noise=noise,
        targets=(5, 5, 5, 5),
        herald=mod_campaign.HeraldSettings(max_attempts=3),
    )
    summary = mod_campaign.run_campaign(cfg)
    records = mod_records.read_records(tmp_path / "records.csv")
    aborted = summary.herald_rounds - summary.herald_successes
    assert summary.total_rows == len(records)
    assert summary.valid_trials == sum(r.valid for r in records)
    assert summary.leaked_trials == summary.invalid_trials - aborted
    assert sum(not r.has_readout for r in records) == aborted
    assert summary.herald_attempts == sum(r.herald_attempts for r in records)
    if not summary.budget_exhausted:
        assert summary.counts == summary.targets


@pytest.mark.slow
def test_trial_leakage_gives_geometric_blocks(tmp_path: Path) -> None:
    """At 5% leakage per trial a herald lasts about 20 trials on average.

    Blocks cut short by a met target are censored, so the mean run length
    is estimated as trials per manifold break.
    """
    preset = mod_presets.get_preset("low")
    noise = clean_noise(herald_prior=(1.0, 0.0, 0.0), leak_per_trial=0.05)
    trials = breaks = 0
    for seed in (1, 2, 3):
        cfg = scan_config(
            tmp_path,
            noise=noise,
            phi_a=preset.phi_a,
            targets=preset.targets,
            seed=seed,
        )
        run = mod_campaign.scan_records(cfg)
        assert not run.budget_exhausted
        starts = [i for i, r in enumerate(run.records) if r.herald_attempts > 0]
        ends = [i - 1 for i in starts[1:]] + [len(run.records) - 1]
        leaked = sum(not run.records[i].valid for i in ends)
        assert run.manifold_breaks == leaked
        trials += len(run.records)
        breaks += run.manifold_breaks
    assert trials / breaks == pytest.approx(20.0, abs=4.5)


@pytest.mark.slow
def test_noisy_scan_at_published_counts(tmp_path: Path) -> None:
    """Atom dephasing tuned to C = 0.78 over the low preset's trial counts."""
    preset = mod_presets.get_preset("low")
    window, _ = mod_protocols.dephasing_windows(mod_protocols.QubitKind.LOW)
    noise = mod_noise.NoiseConfig.ideal(
        atom_coherence_us=window / math.log(1 / 0.78),
        detect_bright_mean=20.0,
        detect_dark_mean=0.4,
    )
    cfg = scan_config(
        tmp_path, noise=noise, phi_a=preset.phi_a, targets=preset.targets, seed=11
    )
    run = mod_campaign.scan_records(cfg)
    valid = [r for r in run.records if r.valid]
    assert len(valid) == sum(preset.targets)
    points = mod_analysis.fringe_points(valid, mod_protocols.QubitKind.LOW)
    fit = mod_analysis.fit_fringe(points)
    assert fit.contrast == pytest.approx(0.78, abs=0.12)
    assert 0.02 <= fit.sigma_contrast <= 0.06  # noqa: PLR2004


# --- independent protocols ------------------------------------------------------------


def test_population_run_writes_populations(tmp_path: Path) -> None:
    cfg = mod_campaign.ExperimentConfig(
        Protocol.POPULATION_L, noise=clean_noise(), trials=20, out_dir=tmp_path
    )
    summary = mod_campaign.run_campaign(cfg)
    assert summary.valid_trials == 20  # noqa: PLR2004
    text = (tmp_path / "populations.txt").read_text(encoding="utf-8")
    assert "qubit = low" in text
    assert "P[other] = 0.000000" in text


def test_noiseless_population_stays_on_the_target_pair() -> None:
    cfg = mod_campaign.ExperimentConfig(
        Protocol.POPULATION_H, noise=clean_noise(), trials=40
    )
    pop = mod_campaign.run_population(cfg)
    probs = pop.probabilities()
    first, second = mod_analysis.FIDELITY_KEYS[mod_protocols.QubitKind.HIGH]
    assert probs[first] + probs[second] == pytest.approx(1.0)
    assert pop.other == 0


def test_leaked_trials_lower_every_population() -> None:
    cfg = mod_campaign.ExperimentConfig(
        Protocol.POPULATION_L,
        noise=clean_noise(leak_per_trial=0.5),
        trials=400,
        seed=5,
    )
    pop = mod_campaign.run_population(cfg)
    in_subspace = sum(pop.probabilities().values())
    assert in_subspace == pytest.approx(0.5, abs=0.1)
    assert pop.other_probability == pytest.approx(1 - in_subspace)


def test_run_population_rejects_a_scan(tmp_path: Path) -> None:
    with pytest.raises(ValueError, match="parity scan"):
        mod_campaign.run_population(scan_config(tmp_path))


@pytest.mark.slow
def test_worker_processes_do_not_change_results(tmp_path: Path) -> None:
    def run(workers: int, name: str) -> bytes:
        cfg = mod_campaign.ExperimentConfig(
            Protocol.POPULATION_L,
            trials=6,
            seed=3,
            workers=workers,
            out_dir=tmp_path / name,
        )
        mod_campaign.run_campaign(cfg)
        return (tmp_path / name / "records.csv").read_bytes()

    assert run(1, "serial") == run(2, "pool")


def test_state_protocol_writes_a_state_dump(tmp_path: Path) -> None:
    cfg = mod_campaign.ExperimentConfig(
        Protocol.PSI_L, noise=clean_noise(), trials=3, out_dir=tmp_path
    )
    summary = mod_campaign.run_campaign(cfg)
    assert "state" in summary.outputs
    text = (tmp_path / "state.txt").read_text(encoding="utf-8")
    (line,) = [x for x in text.splitlines() if x.startswith("# fidelity_to_target")]
    assert float(line.split("=")[1]) == pytest.approx(1.0)


def test_prepare_protocol_detects_minus32(tmp_path: Path) -> None:
    cfg = mod_campaign.ExperimentConfig(
        Protocol.PREPARE, noise=clean_noise(), trials=5, out_dir=tmp_path
    )
    mod_campaign.run_campaign(cfg)
    records = mod_records.read_records(tmp_path / "records.csv")
    assert all(r.mol_outcome is mod_records.MolOutcome.MINUS32 for r in records)
    assert not (tmp_path / "populations.txt").exists()


def test_custom_protocol_runs_a_pulse_program(tmp_path: Path) -> None:
    cfg = mod_campaign.ExperimentConfig(
        Protocol.CUSTOM,
        noise=clean_noise(),
        trials=4,
        sequence=("atom_carrier 1 0",),
        out_dir=tmp_path,
    )
    mod_campaign.run_campaign(cfg)
    records = mod_records.read_records(tmp_path / "records.csv")
    assert all(r.atom_outcome is mod_protocols.AtomLevel.D for r in records)
    assert all(r.mol_outcome is mod_records.MolOutcome.MINUS32 for r in records)


def test_bad_pulse_strings_fail_at_configuration() -> None:
    with pytest.raises(ValueError, match="Unknown pulse selector"):
        mod_campaign.ExperimentConfig(Protocol.CUSTOM, sequence=("spin_flip 1 0",))
