# tests/50_core/test_presets.py
"""Tests for the published phase schedules."""

import math

import pytest

import molentangle.presets as mod_presets
import molentangle.protocols as mod_protocols


def test_low_preset_uses_pi_over_six_steps() -> None:
    preset = mod_presets.get_preset("low")
    assert preset.qubit is mod_protocols.QubitKind.LOW
    assert len(preset.phi_a) == len(preset.targets) == 12  # noqa: PLR2004
    assert preset.phi_a[1] == pytest.approx(math.pi / 6)
    assert preset.total_trials == 1188  # noqa: PLR2004


def test_high_preset_uses_pi_over_five_steps() -> None:
    preset = mod_presets.get_preset("high")
    assert preset.qubit is mod_protocols.QubitKind.HIGH
    assert len(preset.phi_a) == len(preset.targets) == 10  # noqa: PLR2004
    assert preset.phi_a[-1] == pytest.approx(9 * math.pi / 5)
    assert preset.total_trials == 787  # noqa: PLR2004


def test_phases_stay_distinct() -> None:
    for preset in mod_presets.PRESETS.values():
        assert len(set(preset.phi_a)) == len(preset.phi_a)


def test_unknown_preset_lists_the_known_ones() -> None:
    with pytest.raises(ValueError, match="known: high, low"):
        mod_presets.get_preset("medium")
