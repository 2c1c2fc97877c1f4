"""Unit tests for initial-data presets and equation fluxes."""

import numpy as np
import pytest

from fracdg.app.experiments.presets import PRESETS, get_preset, physical_flux
from fracdg.app.exceptions import ConfigError


@pytest.mark.unit
def test_preset_values() -> None:
    """Test a few point values of the presets."""
    assert get_preset("sgn_hat")(np.array(0.1)) == pytest.approx(0.4)
    assert get_preset("sgn_hat")(np.array(-0.7)) == -1.0
    assert get_preset("hat")(np.array(0.0)) == 1.0
    assert get_preset("hat")(np.array(0.5)) == 0.0
    assert get_preset("sin2pi")(np.array(0.25)) == pytest.approx(1.0)
    assert get_preset("sgn")(np.array([-1.0, 1.0])).tolist() == [1.0, -1.0]
    assert get_preset("gaussian")(np.array(0.0)) == 1.0


@pytest.mark.unit
def test_breakpoints_and_decay_flags() -> None:
    """Test that non-smooth presets list their kinks and only compact data decay."""
    assert get_preset("sgn_hat").breakpoints == (-0.25, 0.25)
    assert get_preset("sgn").breakpoints == (0.0,)
    assert get_preset("gaussian").breakpoints == ()
    assert {name for name, p in PRESETS.items() if p.decays} == {"hat", "gaussian"}


@pytest.mark.unit
def test_presets_are_bounded_by_one() -> None:
    """Test that every preset maps [-1.5, 1.5] into [-1, 1]."""
    x = np.linspace(-1.5, 1.5, 3001)
    for preset in PRESETS.values():
        assert np.max(np.abs(preset(x))) <= 1.0


@pytest.mark.unit
def test_unknown_preset() -> None:
    """Test that unknown names raise ConfigError on field u0."""
    with pytest.raises(ConfigError) as info:
        get_preset("step")
    assert info.value.field == "u0"


@pytest.mark.unit
def test_physical_flux_per_equation() -> None:
    """Test the flux attached to each equation name."""
    assert physical_flux("pure_fractional").max_speed(1.0) == 0.0
    assert physical_flux("linear_transport").linear_speed == 1.0
    assert physical_flux("linear", advection_speed=-2.0).linear_speed == -2.0
    assert physical_flux("burgers").is_convex
    with pytest.raises(ConfigError):
        physical_flux("kdv")
