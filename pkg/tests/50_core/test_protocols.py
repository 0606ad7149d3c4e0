# tests/50_core/test_protocols.py
"""Tests for state creation, QLS readout and heralded preparation."""

import math

import numpy as np
import pytest

import molentangle.constants as mod_constants
import molentangle.errors as mod_errors
import molentangle.hilbert as mod_hilbert
import molentangle.noise as mod_noise
import molentangle.protocols as mod_protocols
import molentangle.pulses as mod_pulses


S = mod_hilbert.AtomLevel.S
D = mod_hilbert.AtomLevel.D
M32 = mod_hilbert.MolLevel.MINUS32
M52 = mod_hilbert.MolLevel.MINUS52
J0 = mod_hilbert.MolLevel.J0
LOW = mod_protocols.QubitKind.LOW
HIGH = mod_protocols.QubitKind.HIGH
N_MAX = 8

# parity sign of each (atom, molecule) pair per qubit
PARITY_TERMS = {
    LOW: {(S, M52): 1, (D, M32): 1, (S, M32): -1, (D, M52): -1},
    HIGH: {(S, J0): 1, (D, M32): 1, (S, M32): -1, (D, J0): -1},
}


def clean_noise() -> mod_noise.NoiseConfig:
    """No noise and a bright level far above threshold, so reads are exact."""
    return mod_noise.NoiseConfig.ideal(detect_bright_mean=100.0)


def mol_population(state: mod_hilbert.StateVector, mol: mod_hilbert.MolLevel) -> float:
    return mod_hilbert.population(state, mod_hilbert.mol_is(mol))


def exact_parity(
    state: mod_hilbert.StateVector, qubit: mod_protocols.QubitKind
) -> float:
    total = 0.0
    for (atom, mol), sign in PARITY_TERMS[qubit].items():
        branch = mod_hilbert.all_of(mod_hilbert.atom_is(atom), mod_hilbert.mol_is(mol))
        total += sign * mod_hilbert.population(state, branch)
    return total


def test_psi_i_is_created_exactly() -> None:
    psi0 = mod_protocols.initial_state(M32, 0, N_MAX)
    out = mod_protocols.create_psi_i(psi0)
    target = mod_protocols.psi_i_target(N_MAX)
    assert mod_hilbert.state_fidelity(target, out) == pytest.approx(1.0, abs=1e-9)


def test_psi_l_is_created_exactly() -> None:
    psi0 = mod_protocols.initial_state(M32, 0, N_MAX)
    out = mod_protocols.create_psi_l(psi0)
    target = mod_protocols.psi_l_target(N_MAX)
    assert mod_hilbert.state_fidelity(target, out) == pytest.approx(1.0, abs=1e-9)


def test_psi_h_is_created_exactly() -> None:
    psi0 = mod_protocols.initial_state(M32, 0, N_MAX)
    out = mod_protocols.create_psi_h(mod_protocols.create_psi_i(psi0))
    target = mod_protocols.psi_h_target(N_MAX)
    assert mod_hilbert.state_fidelity(target, out) == pytest.approx(1.0, abs=1e-9)


def test_hide_moves_d_ground_into_s_one() -> None:
    state = mod_protocols.initial_state(M32, 0, N_MAX, atom=D)
    hidden = mod_protocols.hide_unhide(state, "hide")
    moved = hidden.amplitude(mod_hilbert.BasisLabel(S, M32, 1))
    assert abs(moved) == pytest.approx(1.0)


def test_unhide_undoes_hide() -> None:
    psi_h = mod_protocols.psi_h_target(N_MAX)
    round_trip = mod_protocols.hide_unhide(
        mod_protocols.hide_unhide(psi_h, "hide"), "unhide"
    )
    np.testing.assert_allclose(round_trip.amplitudes, psi_h.amplitudes, atol=1e-12)


def test_hide_unhide_rejects_unknown_direction() -> None:
    state = mod_protocols.initial_state(M32, 0, N_MAX)
    with pytest.raises(ValueError, match="direction"):
        mod_protocols.hide_unhide(state, "sideways")  # type: ignore[arg-type]


@pytest.mark.parametrize("qubit", [LOW, HIGH])
def test_noiseless_parity_fringe_has_full_contrast(
    qubit: mod_protocols.QubitKind,
) -> None:
    """Parity oscillates at 2·φ_a with unit amplitude."""
    created = mod_protocols.target_state(qubit, N_MAX)
    phases = np.linspace(0.0, math.pi, 64, endpoint=False)
    values = np.array(
        [
            exact_parity(mod_protocols.analysis_pulses(created, qubit, phi), qubit)
            for phi in phases
        ]
    )
    assert np.abs(values).max() > 0.99  # noqa: PLR2004
    shifted = np.array(
        [
            exact_parity(
                mod_protocols.analysis_pulses(created, qubit, phi + math.pi / 2), qubit
            )
            for phi in phases[:8]
        ]
    )
    np.testing.assert_allclose(shifted, -values[:8], atol=1e-9)


def test_dephasing_windows() -> None:
    atom_low, comb_low = mod_protocols.dephasing_windows(LOW)
    assert atom_low == pytest.approx(mod_constants.ATOM_SIDEBAND_PI_US)
    assert comb_low == 0.0
    atom_high, comb_high = mod_protocols.dephasing_windows(HIGH)
    assert atom_high > atom_low
    assert comb_high > 0


@pytest.mark.parametrize(("qubit", "decay"), [(LOW, 1.0), (HIGH, 2.0)])
def test_fringe_contrast_decays_over_the_dephasing_windows(
    qubit: mod_protocols.QubitKind, decay: float
) -> None:
    """With T₂ equal to each window the contrast is exp(−Σ window/T₂)."""
    atom_us, comb_us = mod_protocols.dephasing_windows(qubit)
    cfg = mod_noise.NoiseConfig.ideal(
        atom_coherence_us=atom_us,
        comb_coherence_us=comb_us or mod_constants.INFINITE_COHERENCE,
    )
    molecule = mod_protocols.initial_state(M32, 0, N_MAX, atom=D)
    rng = np.random.default_rng(17)
    trials = 2000

    def mean_parity(phi_a: float) -> float:
        total = 0.0
        for _ in range(trials):
            result, _ = mod_protocols.create_entangled_state(
                molecule, qubit, phi_a, cfg, rng
            )
            total += exact_parity(result.final_state, qubit)
        return total / trials

    # P(φ) = C·cos(2φ + φ₀), so C = |(P(0), P(π/4))|
    contrast = math.hypot(mean_parity(0.0), mean_parity(math.pi / 4))
    assert contrast == pytest.approx(math.exp(-decay), abs=0.05)


def test_qls_minus32_detects_and_moves_to_minus52() -> None:
    rng = np.random.default_rng(0)
    state = mod_protocols.initial_state(M32, 0, N_MAX, atom=D)
    outcome = mod_protocols.qls_detect_minus32(state, clean_noise(), rng)
    assert outcome.positive
    assert mol_population(outcome.state, M52) == pytest.approx(1.0)


def test_qls_minus32_is_dark_for_minus52() -> None:
    rng = np.random.default_rng(0)
    state = mod_protocols.initial_state(M52, 0, N_MAX, atom=D)
    outcome = mod_protocols.qls_detect_minus32(state, clean_noise(), rng)
    assert not outcome.positive
    assert mol_population(outcome.state, M52) == pytest.approx(1.0)


def test_verify_manifold_restores_minus32() -> None:
    rng = np.random.default_rng(0)
    state = mod_protocols.initial_state(M32, 0, N_MAX, atom=D)
    check = mod_protocols.verify_manifold(state, clean_noise(), rng)
    assert check.restored
    assert check.found_minus32
    assert check.found_minus52
    assert mol_population(check.state, M32) == pytest.approx(1.0)


@pytest.mark.parametrize(
    ("target", "mol", "bright", "final"),
    [
        (mod_protocols.HeraldTarget.MINUS32, M32, False, M32),
        (mod_protocols.HeraldTarget.MINUS32, M52, True, M32),
        (mod_protocols.HeraldTarget.MINUS52, M52, False, M52),
        (mod_protocols.HeraldTarget.MINUS52, M32, True, M52),
    ],
)
def test_pump_is_deterministic_from_ground_state(
    target: mod_protocols.HeraldTarget,
    mol: mod_hilbert.MolLevel,
    bright: bool,  # noqa: FBT001
    final: mod_hilbert.MolLevel,
) -> None:
    state = mod_protocols.initial_state(mol, 0, N_MAX, atom=D)
    out = mod_protocols.run_program(state, mod_protocols.pump_program(target))
    atom_s = mod_hilbert.population(out, mod_hilbert.atom_is(S))
    assert atom_s == pytest.approx(1.0 if bright else 0.0, abs=1e-12)
    assert mol_population(out, final) == pytest.approx(1.0, abs=1e-12)


def test_herald_from_minus32_succeeds_on_first_pump() -> None:
    rng = np.random.default_rng(0)
    state = mod_protocols.initial_state(M32, 0, N_MAX, atom=D)
    result = mod_protocols.herald_prepare_minus32(state, clean_noise(), rng)
    assert result.success
    assert result.attempts == 1
    assert result.herald_outcomes == (True,)
    assert mol_population(result.final_state, M32) == pytest.approx(1.0)


def test_herald_from_minus52_succeeds_on_second_pump() -> None:
    rng = np.random.default_rng(0)
    state = mod_protocols.initial_state(M52, 0, N_MAX, atom=D)
    result = mod_protocols.herald_prepare_minus32(state, clean_noise(), rng)
    assert result.success
    assert result.attempts == 2  # noqa: PLR2004
    assert result.herald_outcomes == (False, True)
    assert mol_population(result.final_state, M32) == pytest.approx(1.0)


def test_pure_minus32_prior_always_heralds_on_first_pump() -> None:
    cfg = mod_noise.NoiseConfig.ideal(
        detect_bright_mean=100.0, herald_prior=(1.0, 0.0, 0.0)
    )
    rng = np.random.default_rng(11)
    attempts = {
        mod_protocols.herald_round(cfg, rng, n_max=N_MAX).attempts for _ in range(200)
    }
    assert attempts == {1}


@pytest.mark.slow
def test_mixed_prior_heralds_every_pair_into_minus32() -> None:
    rounds = 10_000
    cfg = mod_noise.NoiseConfig.ideal(
        detect_bright_mean=100.0, herald_prior=(0.5, 0.5, 0.0)
    )
    rng = np.random.default_rng(2020)
    first = 0
    for _ in range(rounds):
        result = mod_protocols.herald_round(cfg, rng, n_max=N_MAX)
        assert result.success
        assert result.attempts <= 2  # noqa: PLR2004
        assert mol_population(result.final_state, M32) == pytest.approx(1.0)
        first += result.attempts == 1
    # the first pump heralds exactly the −3/2 half of the prior
    sigma = math.sqrt(0.25 / rounds)
    assert abs(first / rounds - 0.5) < 3 * sigma


@pytest.mark.parametrize("seed", range(5))
def test_herald_round_ends_in_minus32(seed: int) -> None:
    rng = np.random.default_rng(seed)
    result = mod_protocols.herald_round(clean_noise(), rng, n_max=N_MAX)
    assert result.success
    assert result.valid
    assert 1 <= result.attempts <= mod_constants.DEFAULT_MAX_HERALD_ATTEMPTS
    assert len(result.herald_outcomes) == result.attempts
    assert mol_population(result.final_state, M32) == pytest.approx(1.0)


def test_herald_aborts_on_a_leaked_molecule() -> None:
    cfg = mod_noise.NoiseConfig.ideal(herald_prior=(0.0, 0.0, 1.0))
    result = mod_protocols.herald_round(
        cfg, np.random.default_rng(0), n_max=N_MAX, max_attempts=5
    )
    assert not result.success
    assert result.attempts == 5  # noqa: PLR2004
    assert result.herald_outcomes == (False,) * 5
    assert mod_protocols.FLAG_HERALD_ABORTED in result.flags
    assert mod_protocols.FLAG_LEAKED in result.flags


@pytest.mark.parametrize(
    ("kwargs", "match"),
    [
        ({"max_attempts": 0}, "max_attempts"),
        ({"confirmations": 0}, "confirmations"),
        ({"schedule": ()}, "schedule"),
    ],
)
def test_herald_rejects_bad_settings(kwargs: dict[str, object], match: str) -> None:
    state = mod_protocols.initial_state(M32, 0, N_MAX, atom=D)
    with pytest.raises(ValueError, match=match):
        mod_protocols.herald_prepare_minus32(
            state,
            clean_noise(),
            np.random.default_rng(0),
            **kwargs,  # type: ignore[arg-type]
        )


@pytest.mark.parametrize("qubit", [LOW, HIGH])
def test_noiseless_entangled_state_matches_target(
    qubit: mod_protocols.QubitKind,
) -> None:
    molecule = mod_protocols.initial_state(M32, 0, N_MAX, atom=D)
    result, noise = mod_protocols.create_entangled_state(
        molecule, qubit, None, clean_noise(), np.random.default_rng(1)
    )
    assert noise == mod_noise.TrialNoise()
    assert result.valid
    assert not result.flags
    target = mod_protocols.target_state(qubit, N_MAX)
    assert mod_hilbert.state_fidelity(target, result.final_state) == pytest.approx(
        1.0, abs=1e-9
    )


def test_preparation_flip_and_background_leak_are_flagged() -> None:
    molecule = mod_protocols.initial_state(M32, 0, N_MAX, atom=D)
    cfg = mod_noise.NoiseConfig.ideal(prep_error=1.0, leak_per_trial=1.0)
    result, noise = mod_protocols.create_entangled_state(
        molecule, LOW, 0.0, cfg, np.random.default_rng(1)
    )
    assert noise.prep_flip
    assert noise.leaked_at_start
    assert mod_protocols.FLAG_PREP_FLIP in result.flags
    assert mod_protocols.FLAG_LEAKED in result.flags
    assert not result.valid


def test_pulse_durations_reject_negative_values() -> None:
    with pytest.raises(ValueError, match="comb_pi_us"):
        mod_protocols.PulseDurations(comb_pi_us=-1.0)


def test_run_program_rejects_population_on_the_truncation_boundary() -> None:
    # |D⟩|n_max−2⟩ sidebands onto the last kept rung n_max−1
    state = mod_protocols.initial_state(M32, N_MAX - 2, N_MAX, atom=D)
    pulse = mod_pulses.PulseSpec(mod_pulses.ATOM_SIDEBAND, math.pi)
    with pytest.raises(mod_errors.TruncationError, match="increase n_max"):
        mod_protocols.run_program(state, (pulse,))


def test_run_program_rejects_an_unnormalized_state() -> None:
    state = mod_protocols.initial_state(M32, 0, N_MAX)
    scaled = state.with_amplitudes(state.amplitudes * 1.1)
    with pytest.raises(mod_errors.NormalizationError):
        mod_protocols.run_program(scaled, ())


def test_run_program_skips_checks_on_a_leaked_state() -> None:
    state = mod_protocols.initial_state(M32, N_MAX - 1, N_MAX).mark_leaked()
    assert mod_protocols.run_program(state, ()) is state
