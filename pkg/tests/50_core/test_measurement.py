# tests/50_core/test_measurement.py
"""Tests for population estimates, parity and the molecular readout chain."""

import math

import numpy as np
import pytest

import molentangle.errors as mod_errors
import molentangle.hilbert as mod_hilbert
import molentangle.measurement as mod_measurement
import molentangle.noise as mod_noise
import molentangle.protocols as mod_protocols
import molentangle.records as mod_records


S = mod_hilbert.AtomLevel.S
D = mod_hilbert.AtomLevel.D
O32 = mod_records.MolOutcome.MINUS32
O52 = mod_records.MolOutcome.MINUS52
O0 = mod_records.MolOutcome.J0
OTHER = mod_records.MolOutcome.OTHER
NO_READOUT = mod_records.MolOutcome.NONE
LOW = mod_protocols.QubitKind.LOW
HIGH = mod_protocols.QubitKind.HIGH
N_MAX = 8


def rows(
    atom: mod_hilbert.AtomLevel,
    mol: mod_records.MolOutcome,
    count: int,
    *,
    valid: bool = True,
) -> list[mod_records.TrialRecord]:
    return [
        mod_records.TrialRecord(i, "population_L", None, atom, mol, 0, valid=valid)
        for i in range(count)
    ]


def low_sample(other: int = 0) -> list[mod_records.TrialRecord]:
    return [
        *rows(S, O52, 40),
        *rows(D, O32, 40),
        *rows(S, O32, 10),
        *rows(D, O52, 10),
        *rows(D, OTHER, other),
    ]


def test_estimate_populations_counts_the_subspace() -> None:
    pop = mod_measurement.estimate_populations(low_sample(), LOW)
    assert pop.total == 100  # noqa: PLR2004
    assert pop.probability((S, O52)) == pytest.approx(0.4)
    assert pop.standard_error((S, O52)) == pytest.approx(math.sqrt(0.4 * 0.6 / 100))
    assert pop.other_probability == 0.0


def test_other_outcomes_lower_every_probability() -> None:
    pop = mod_measurement.estimate_populations(low_sample(other=25), LOW)
    assert pop.other == 25  # noqa: PLR2004
    assert pop.probability((S, O52)) == pytest.approx(40 / 125)
    assert sum(pop.probabilities().values()) + pop.other_probability == pytest.approx(1)


def test_leaked_rows_count_as_other() -> None:
    records = [*low_sample(), *rows(S, O52, 25, valid=False)]
    pop = mod_measurement.estimate_populations(records, LOW)
    assert pop.total == 125  # noqa: PLR2004
    assert pop.other == 25  # noqa: PLR2004
    assert pop.probability((S, O52)) == pytest.approx(40 / 125)


def test_rows_without_readout_are_skipped() -> None:
    records = [*low_sample(), *rows(D, NO_READOUT, 30, valid=False)]
    pop = mod_measurement.estimate_populations(records, LOW)
    assert pop.total == 100  # noqa: PLR2004
    assert pop.other == 0


def test_high_qubit_treats_minus52_as_other() -> None:
    pop = mod_measurement.estimate_populations(low_sample(), HIGH)
    assert pop.other == 50  # noqa: PLR2004
    assert pop.counts[(D, O32)] == 40  # noqa: PLR2004


def test_population_estimate_requires_the_qubit_subspace() -> None:
    with pytest.raises(mod_errors.SubspaceMismatchError):
        mod_measurement.PopulationEstimate(LOW, {(S, O32): 1})


def test_empty_estimate_has_no_probability() -> None:
    pop = mod_measurement.estimate_populations([], LOW)
    with pytest.raises(mod_errors.InsufficientDataError):
        pop.probability((S, O32))


def test_parity_is_signed_population_sum() -> None:
    pop = mod_measurement.estimate_populations(low_sample(), LOW)
    assert mod_measurement.parity(pop, LOW) == pytest.approx(0.6)
    diluted = mod_measurement.estimate_populations(low_sample(other=25), LOW)
    assert mod_measurement.parity(diluted, LOW) == pytest.approx(60 / 125)


def test_parity_rejects_the_other_qubit() -> None:
    pop = mod_measurement.estimate_populations(low_sample(), LOW)
    with pytest.raises(mod_errors.SubspaceMismatchError):
        mod_measurement.parity(pop, HIGH)


def test_parity_values_per_trial() -> None:
    records = [*rows(S, O0, 2), *rows(D, O0, 1), *rows(S, O52, 1)]
    values = mod_measurement.parity_values(records, HIGH)
    np.testing.assert_array_equal(values, [1.0, 1.0, -1.0, 0.0])


def test_wilson_standard_error() -> None:
    assert mod_measurement.wilson_standard_error(0, 10) == pytest.approx(0.5 / 11)
    assert mod_measurement.wilson_standard_error(5, 10) == pytest.approx(
        math.sqrt(2.75) / 11
    )
    with pytest.raises(mod_errors.InsufficientDataError):
        mod_measurement.wilson_standard_error(0, 0)
    with pytest.raises(ValueError, match="outside"):
        mod_measurement.wilson_standard_error(11, 10)


def test_parity_standard_error_stays_positive_at_extremes() -> None:
    unanimous = np.ones(10)
    assert mod_measurement.parity_standard_error(unanimous) == pytest.approx(1 / 11)

    mixed = np.array([1.0, -1.0, 1.0, 1.0])
    expected = float(np.std(mixed, ddof=1)) / 2
    assert mod_measurement.parity_standard_error(mixed) == pytest.approx(expected)

    with pytest.raises(mod_errors.InsufficientDataError):
        mod_measurement.parity_standard_error(np.array([]))


def clean_noise() -> mod_noise.NoiseConfig:
    return mod_noise.NoiseConfig.ideal(detect_bright_mean=100.0)


@pytest.mark.parametrize(
    ("qubit", "mol", "expected"),
    [
        (LOW, mod_hilbert.MolLevel.MINUS32, O32),
        (LOW, mod_hilbert.MolLevel.MINUS52, O52),
        (LOW, mod_hilbert.MolLevel.J0, OTHER),
        (HIGH, mod_hilbert.MolLevel.MINUS32, O32),
        (HIGH, mod_hilbert.MolLevel.J0, O0),
        (HIGH, mod_hilbert.MolLevel.MINUS52, OTHER),
    ],
)
def test_molecule_readout_identifies_each_level(
    qubit: mod_protocols.QubitKind,
    mol: mod_hilbert.MolLevel,
    expected: mod_records.MolOutcome,
) -> None:
    state = mod_protocols.initial_state(mol, 0, N_MAX, atom=D)
    outcome, _ = mod_measurement.detect_molecule_after_atom(
        state, qubit, clean_noise(), np.random.default_rng(0)
    )
    assert outcome is expected


def test_leaked_molecule_reads_other() -> None:
    state = mod_protocols.initial_state(mod_hilbert.MolLevel.LEAKED, 0, N_MAX)
    rng = np.random.default_rng(0)
    outcome, after = mod_measurement.detect_molecule_after_atom(
        state, LOW, clean_noise(), rng
    )
    assert outcome is OTHER
    assert after is state


def test_comb_mapping_pulse_can_leak(monkeypatch: pytest.MonkeyPatch) -> None:
    """Only the comb π-pulse is left to leak once both readouts are stubbed."""
    seen: list[mod_hilbert.StateVector] = []

    def negative_readout(
        state: mod_hilbert.StateVector, *_args: object
    ) -> mod_protocols.QlsOutcome:
        seen.append(state)
        return mod_protocols.QlsOutcome(False, 0, state)

    monkeypatch.setattr(mod_measurement, "qls_detect_minus32", negative_readout)
    cfg = mod_noise.NoiseConfig.ideal(leak_per_pulse=1.0)
    state = mod_protocols.initial_state(mod_hilbert.MolLevel.J0, 0, N_MAX, atom=D)
    outcome, after = mod_measurement.detect_molecule_after_atom(
        state, HIGH, cfg, np.random.default_rng(0)
    )
    assert outcome is OTHER
    assert [s.leaked for s in seen] == [False, True]
    assert after.leaked
