"""Unit system, lens elements and expansion protocols.

Everything downstream works in natural units where hbar = m = omega0 = k_B = 1:
time is measured in 1/omega0, length in sqrt(hbar/m omega0) and kick
strengths in units of hbar. SI values only appear at the reporting boundary,
through the optional ``atom_mass_kg`` / ``trap_frequency`` overrides.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from scipy import constants

from .errors import ConfigurationError, PreconditionError


@dataclass(frozen=True)
class PhysicalScale:
    """Values of hbar, m, omega0 and k_B used by a calculation.

    The default instance is the natural unit system. ``atom_mass_kg`` and
    ``trap_frequency`` (rad/s) are only needed to report results in SI.
    """

    hbar: float = 1.0
    mass: float = 1.0
    omega0: float = 1.0
    boltzmann: float = 1.0
    atom_mass_kg: Optional[float] = None
    trap_frequency: Optional[float] = None

    def __post_init__(self):
        for name in ("hbar", "mass", "omega0", "boltzmann"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("atom_mass_kg", "trap_frequency"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be > 0 when given, got {value!r}")

    @property
    def is_natural(self) -> bool:
        return self.hbar == self.mass == self.omega0 == self.boltzmann == 1.0

    @property
    def has_si(self) -> bool:
        return self.atom_mass_kg is not None and self.trap_frequency is not None

    def si(self) -> "PhysicalScale":
        """Same physical system expressed with SI constants."""
        if not self.has_si:
            raise ConfigurationError(
                "SI conversion needs both atom_mass_kg and trap_frequency")
        return PhysicalScale(
            hbar=constants.hbar, mass=self.atom_mass_kg, omega0=self.trap_frequency,
            boltzmann=constants.k, atom_mass_kg=self.atom_mass_kg,
            trap_frequency=self.trap_frequency)

    # conversion factors from natural units to SI
    @property
    def length_unit(self) -> float:
        s = self.si()
        return math.sqrt(s.hbar / (s.mass * s.omega0))

    @property
    def velocity_unit(self) -> float:
        s = self.si()
        return math.sqrt(s.hbar * s.omega0 / s.mass)

    @property
    def time_unit(self) -> float:
        return 1.0 / self.si().omega0

    def to_dict(self) -> dict:
        out = {"hbar": self.hbar, "mass": self.mass, "omega0": self.omega0,
               "boltzmann": self.boltzmann}
        if self.atom_mass_kg is not None:
            out["atom_mass_kg"] = self.atom_mass_kg
        if self.trap_frequency is not None:
            out["trap_frequency"] = self.trap_frequency
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PhysicalScale":
        known = {"hbar", "mass", "omega0", "boltzmann", "atom_mass_kg", "trap_frequency"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown scale field(s): {sorted(unknown)}")
        return cls(**{k: (None if v is None else float(v)) for k, v in data.items()})


NATURAL = PhysicalScale()


def initial_widths(scale: PhysicalScale = NATURAL) -> tuple[float, float]:
    """RMS widths (dx_i, dp_i) of the harmonic-trap ground state."""
    dx = math.sqrt(scale.hbar / (2.0 * scale.mass * scale.omega0))
    dp = math.sqrt(scale.hbar * scale.mass * scale.omega0 / 2.0)
    return dx, dp


def kinetic_temperature(dv: float, mass: float, boltzmann: float = constants.k) -> float:
    """T = m dv^2 / k_B for a velocity width given in the same unit system."""
    if dv < 0:
        raise PreconditionError(f"velocity width must be >= 0, got {dv!r}")
    return mass * dv * dv / boltzmann


def natural_to_si_temperature(dv: float, scale: PhysicalScale) -> float:
    """Kinetic temperature in kelvin of a velocity width given in natural units."""
    if not scale.has_si:
        raise ConfigurationError(
            "temperature in kelvin needs atom_mass_kg and trap_frequency on the scale")
    return kinetic_temperature(dv * scale.velocity_unit, scale.atom_mass_kg)


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ConfigurationError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class GaussianKick:
    """Instantaneous kick by U(x) = (strength/dt) (1 - exp(-x^2 / 2 width^2)).

    ``strength`` is the time-integrated depth U*dt; positive values are
    attractive (converging) lenses, negative values repulsive ones.
    """

    strength: float
    width: float

    def __post_init__(self):
        object.__setattr__(self, "strength", float(self.strength))
        object.__setattr__(self, "width", _positive("width", self.width))
        if not math.isfinite(self.strength):
            raise ConfigurationError(f"strength must be finite, got {self.strength!r}")

    def to_dict(self) -> dict:
        return {"strength": self.strength, "width": self.width}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianKick":
        try:
            return cls(strength=data["strength"], width=data["width"])
        except KeyError as exc:
            raise ConfigurationError(f"kick is missing field {exc.args[0]!r}") from None


@dataclass(frozen=True)
class KickSequence:
    kicks: tuple[GaussianKick, ...]

    def __post_init__(self):
        kicks = tuple(self.kicks)
        if not kicks:
            raise ConfigurationError("a kick sequence needs at least one kick")
        if not all(isinstance(k, GaussianKick) for k in kicks):
            raise ConfigurationError("kick sequence entries must be GaussianKick")
        object.__setattr__(self, "kicks", kicks)

    @classmethod
    def from_arrays(cls, strengths: Iterable[float], widths: Iterable[float]) -> "KickSequence":
        strengths, widths = list(strengths), list(widths)
        if len(strengths) != len(widths):
            raise ConfigurationError(
                f"{len(strengths)} strengths given for {len(widths)} widths")
        return cls(tuple(GaussianKick(k, s) for k, s in zip(strengths, widths)))

    @property
    def strengths(self) -> tuple[float, ...]:
        return tuple(k.strength for k in self.kicks)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(k.width for k in self.kicks)

    def __len__(self):
        return len(self.kicks)

    def __iter__(self):
        return iter(self.kicks)

    def reversed(self) -> "KickSequence":
        return KickSequence(self.kicks[::-1])

    def to_dict(self) -> dict:
        return {"kicks": [k.to_dict() for k in self.kicks]}

    @classmethod
    def from_dict(cls, data: dict) -> "KickSequence":
        entries = data.get("kicks")
        if not isinstance(entries, list):
            raise ConfigurationError("'kicks' must be a list of {strength, width} entries")
        return cls(tuple(GaussianKick.from_dict(e) for e in entries))


@dataclass(frozen=True)
class HarmonicKick:
    """Kick by U(x) = m omega_k^2 x^2 / 2 held for dt; ``strength`` = omega_k^2 dt."""

    strength: float

    def __post_init__(self):
        value = float(self.strength)
        if not math.isfinite(value):
            raise ConfigurationError(f"strength must be finite, got {value!r}")
        object.__setattr__(self, "strength", value)

    def to_dict(self) -> dict:
        return {"harmonic_strength": self.strength}


KickSpec = Union[HarmonicKick, KickSequence]


@dataclass(frozen=True)
class ExpansionProtocol:
    """Release from the trap, expand freely for ``expansion_time``, then kick."""

    expansion_time: float
    kick_spec: KickSpec = field(default_factory=lambda: HarmonicKick(0.0))

    def __post_init__(self):
        t = float(self.expansion_time)
        if not (math.isfinite(t) and t >= 0):
            raise ConfigurationError(f"expansion_time must be >= 0, got {t!r}")
        object.__setattr__(self, "expansion_time", t)
        if not isinstance(self.kick_spec, (HarmonicKick, KickSequence)):
            raise ConfigurationError("kick_spec must be a HarmonicKick or KickSequence")

    def to_dict(self) -> dict:
        out = {"expansion_time": self.expansion_time}
        out.update(self.kick_spec.to_dict())
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExpansionProtocol":
        if "expansion_time" not in data:
            raise ConfigurationError("protocol is missing field 'expansion_time'")
        if "kicks" in data:
            spec = KickSequence.from_dict(data)
        else:
            spec = HarmonicKick(data.get("harmonic_strength", 0.0))
        return cls(data["expansion_time"], spec)
