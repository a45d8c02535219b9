import math

import pytest
import yaml
from hypothesis import given, strategies as st
from scipy import constants

from deltakick.errors import ConfigurationError
from deltakick.units import (NATURAL, ExpansionProtocol, GaussianKick, HarmonicKick,
                             KickSequence, PhysicalScale, initial_widths, kinetic_temperature,
                             natural_to_si_temperature)

RB87 = 1.443e-25


def test_natural_scale_is_unity():
    assert NATURAL.is_natural
    assert (NATURAL.hbar, NATURAL.mass, NATURAL.omega0, NATURAL.boltzmann) == (1, 1, 1, 1)


@pytest.mark.parametrize("field", ["hbar", "mass", "omega0", "boltzmann",
                                   "atom_mass_kg", "trap_frequency"])
def test_scale_rejects_nonpositive(field):
    with pytest.raises(ConfigurationError):
        PhysicalScale(**{field: -1.0})


def test_initial_widths_natural():
    dx, dp = initial_widths(NATURAL)
    assert dx == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert dp == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert dx * dp == pytest.approx(0.5, rel=1e-15)


def test_initial_widths_scale_with_trap_frequency():
    scale = PhysicalScale(atom_mass_kg=RB87, trap_frequency=2 * math.pi * 50).si()
    doubled = PhysicalScale(atom_mass_kg=RB87, trap_frequency=2 * math.pi * 100).si()
    (dx1, dp1), (dx2, dp2) = initial_widths(scale), initial_widths(doubled)
    assert dx1 / dx2 == pytest.approx(math.sqrt(2), rel=1e-12)
    assert dp2 / dp1 == pytest.approx(math.sqrt(2), rel=1e-12)
    assert dx1 * dp1 == pytest.approx(constants.hbar / 2, rel=1e-12)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_initial_widths_minimum_uncertainty(hbar, mass, omega0):
    dx, dp = initial_widths(PhysicalScale(hbar=hbar, mass=mass, omega0=omega0))
    assert dx * dp == pytest.approx(hbar / 2, rel=1e-12)


def test_kinetic_temperature_rb87():
    # direct evaluation of m dv^2 / k_B
    assert kinetic_temperature(1e-3, RB87) == pytest.approx(1.443e-31 / 1.380649e-23, rel=1e-12)
    assert kinetic_temperature(1e-3, RB87) == pytest.approx(1.04516e-8, rel=1e-5)
    assert kinetic_temperature(0.0, RB87) == 0.0


def test_natural_to_si_temperature():
    scale = PhysicalScale(atom_mass_kg=RB87, trap_frequency=2 * math.pi * 100)
    # dv = 1 natural unit is sqrt(hbar omega0 / m), so T = hbar omega0 / k_B
    expected = constants.hbar * 2 * math.pi * 100 / constants.k
    assert natural_to_si_temperature(1.0, scale) == pytest.approx(expected, rel=1e-12)
    assert natural_to_si_temperature(0.0, scale) == 0.0
    assert natural_to_si_temperature(0.2, scale) / natural_to_si_temperature(0.1, scale) \
        == pytest.approx(4.0, rel=1e-14)


def test_natural_to_si_temperature_needs_overrides():
    with pytest.raises(ConfigurationError):
        natural_to_si_temperature(1.0, NATURAL)


def test_gaussian_kick_validation():
    with pytest.raises(ConfigurationError):
        GaussianKick(1.0, 0.0)
    with pytest.raises(ConfigurationError):
        GaussianKick(float("nan"), 1.0)
    with pytest.raises(ConfigurationError):
        KickSequence(())


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(finite, st.floats(min_value=1e-300, allow_nan=False, allow_infinity=False))
def test_gaussian_kick_yaml_round_trip(strength, width):
    kick = GaussianKick(strength, width)
    back = GaussianKick.from_dict(yaml.safe_load(yaml.safe_dump(kick.to_dict())))
    assert back == kick


def test_protocol_round_trip():
    seq = KickSequence.from_arrays([29.09, -22.07], [10.6, 9.9])
    proto = ExpansionProtocol(30.0, seq)
    data = yaml.safe_load(yaml.safe_dump(proto.to_dict()))
    assert set(data) == {"expansion_time", "kicks"}
    assert set(data["kicks"][0]) == {"strength", "width"}
    assert ExpansionProtocol.from_dict(data) == proto
    harmonic = ExpansionProtocol(1.5, HarmonicKick(6 / 13))
    assert ExpansionProtocol.from_dict(harmonic.to_dict()) == harmonic


def test_scale_round_trip():
    scale = PhysicalScale(atom_mass_kg=RB87, trap_frequency=600.0)
    data = yaml.safe_load(yaml.safe_dump(scale.to_dict()))
    assert "omega0" in data and "mass" in data
    assert PhysicalScale.from_dict(data) == scale


def test_protocol_rejects_negative_time():
    with pytest.raises(ConfigurationError):
        ExpansionProtocol(-1.0)
