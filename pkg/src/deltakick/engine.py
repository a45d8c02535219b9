"""Single-particle wavefunction on a uniform periodic grid.

Free flight is applied exactly as a quadratic phase in momentum space and
kicks as phases in position space, so a protocol made of free segments and
instantaneous kicks carries no splitting error. Operations return new states
and never touch their inputs. All quantities are in natural units
(hbar = m = omega0 = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridOverflowError, PreconditionError, ResourceError
from .units import (NATURAL, ExpansionProtocol, HarmonicKick, KickSequence,
                    PhysicalScale, initial_widths)

MAX_POINTS = 2 ** 22
# half_extent must exceed this many RMS widths of the state
OVERFLOW_FACTOR = 6.0
TAIL_LEVEL = 1e-12


@dataclass(frozen=True)
class SpatialGrid:
    """N points on [-L, L) with spacing 2L/N; periodic."""

    num_points: int
    half_extent: float

    def __post_init__(self):
        n = int(self.num_points)
        if n < 2 or n & (n - 1):
            raise PreconditionError(f"num_points must be a power of two >= 2, got {n}")
        if not (math.isfinite(self.half_extent) and self.half_extent > 0):
            raise PreconditionError(f"half_extent must be > 0, got {self.half_extent!r}")
        object.__setattr__(self, "num_points", n)
        object.__setattr__(self, "half_extent", float(self.half_extent))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_extent / self.num_points

    @property
    def momentum_spacing(self) -> float:
        return 2.0 * np.pi / (self.num_points * self.spacing)

    @property
    def momentum_extent(self) -> float:
        """Largest |p| representable on the grid, pi/dx."""
        return np.pi / self.spacing

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.half_extent + self.spacing * np.arange(self.num_points)
        x.flags.writeable = False
        return x

    @cached_property
    def p_fft(self) -> np.ndarray:
        """Momenta in numpy FFT order."""
        p = 2.0 * np.pi * np.fft.fftfreq(self.num_points, d=self.spacing)
        p.flags.writeable = False
        return p

    @cached_property
    def p(self) -> np.ndarray:
        """Momenta in increasing order, [-pi/dx, pi/dx)."""
        p = np.fft.fftshift(self.p_fft)
        p.flags.writeable = False
        return p


@dataclass(frozen=True, eq=False)
class WaveState:
    """Position-space amplitudes psi(x_j) normalised so that sum |psi|^2 dx = 1."""

    grid: SpatialGrid
    amplitudes: np.ndarray
    norm_tolerance: float = 1e-10

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=complex)
        if psi.shape != (self.grid.num_points,):
            raise PreconditionError(
                f"amplitudes shape {psi.shape} does not match grid of {self.grid.num_points}")
        psi.flags.writeable = False
        object.__setattr__(self, "amplitudes", psi)
        drift = abs(self.norm - 1.0)
        if not drift <= self.norm_tolerance:
            raise PreconditionError(
                f"state norm {self.norm!r} deviates from 1 by {drift:.3g} "
                f"(tolerance {self.norm_tolerance:.3g})")

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.spacing)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def _replace(self, amplitudes) -> "WaveState":
        return WaveState(self.grid, amplitudes, self.norm_tolerance)


def make_ground_state(grid: SpatialGrid, scale: PhysicalScale = NATURAL) -> WaveState:
    """Ground state of the initial harmonic trap sampled on ``grid``.

    Raises PreconditionError when the Gaussian density at the grid edge (or
    at the momentum cut-off) is above 1e-12 of its peak.
    """
    dx_i, dp_i = initial_widths(scale)
    # density ~ exp(-x^2 / 2 dx_i^2)
    edge = math.exp(-grid.half_extent ** 2 / (2 * dx_i ** 2))
    if edge > TAIL_LEVEL:
        raise PreconditionError(
            f"grid half-extent {grid.half_extent:g} too narrow for the ground state "
            f"(edge density {edge:.2e} of peak)")
    k_width = dp_i / scale.hbar
    edge_p = math.exp(-grid.momentum_extent ** 2 / (2 * k_width ** 2))
    if edge_p > TAIL_LEVEL:
        raise PreconditionError(
            f"grid spacing {grid.spacing:g} too coarse for the ground state "
            f"(momentum edge density {edge_p:.2e} of peak)")
    x = grid.x
    psi = (1.0 / (2 * np.pi * dx_i ** 2)) ** 0.25 * np.exp(-x ** 2 / (4 * dx_i ** 2))
    psi = psi / math.sqrt(np.sum(psi ** 2) * grid.spacing)
    return WaveState(grid, psi.astype(complex))


def momentum_amplitudes(state: WaveState) -> tuple[np.ndarray, np.ndarray]:
    """Momentum representation with the unitary continuum normalisation.

    Returns ``(p, phi)`` with p increasing; phi(p) = (2 pi)^-1/2 int psi(x) e^{-ipx} dx
    evaluated by the DFT, so that sum |phi|^2 dp = sum |psi|^2 dx.
    """
    g = state.grid
    phi = np.fft.fft(state.amplitudes) * (g.spacing / np.sqrt(2 * np.pi))
    phi *= np.exp(1j * g.p_fft * g.half_extent)
    return g.p, np.fft.fftshift(phi)


def position_amplitudes(grid: SpatialGrid, phi: np.ndarray) -> np.ndarray:
    """Inverse of :func:`momentum_amplitudes` (phi ordered with increasing p)."""
    phi = np.fft.ifftshift(np.asarray(phi, dtype=complex))
    phi = phi * np.exp(-1j * grid.p_fft * grid.half_extent)
    return np.fft.ifft(phi) * (np.sqrt(2 * np.pi) / grid.spacing)


def _moments(state: WaveState):
    """Variances of x and p and the symmetrised covariance <xp+px>/2 - <x><p>."""
    g = state.grid
    psi = state.amplitudes
    rho = np.abs(psi) ** 2 * g.spacing
    mx = np.sum(rho * g.x)
    var_x = np.sum(rho * (g.x - mx) ** 2)
    psi_k = np.fft.fft(psi)
    w = np.abs(psi_k) ** 2
    w /= w.sum()
    mp = np.sum(w * g.p_fft)
    var_p = np.sum(w * (g.p_fft - mp) ** 2)
    dpsi = np.fft.ifft(1j * g.p_fft * psi_k)
    # Re <psi| x p |psi> with p = -i d/dx
    cov = np.real(np.sum(np.conj(psi) * (g.x - mx) * (-1j) * dpsi) * g.spacing)
    return float(var_x), float(var_p), float(cov)


def predicted_width(state: WaveState, t: float) -> float:
    """RMS position width after free flight for time t (exact for free motion)."""
    var_x, var_p, cov = _moments(state)
    return math.sqrt(max(var_x + 2.0 * t * cov + t * t * var_p, 0.0))


def propagate_free(state: WaveState, t: float, check: bool = True) -> WaveState:
    """Free flight for time ``t`` >= 0.

    With ``check`` set, refuses (GridOverflowError) when the predicted RMS
    width at time t exceeds half_extent/6; aliasing would otherwise fold the
    tails back onto the cloud without any visible symptom.
    """
    if t < 0:
        raise PreconditionError(f"free-flight time must be >= 0, got {t!r}")
    g = state.grid
    if t == 0:
        return state._replace(state.amplitudes)
    if check:
        width = predicted_width(state, t)
        if width > g.half_extent / OVERFLOW_FACTOR:
            raise GridOverflowError(
                f"width after t={t:g} would be {width:.4g}, above half_extent/"
                f"{OVERFLOW_FACTOR:g} = {g.half_extent / OVERFLOW_FACTOR:.4g}")
    phase = np.exp(-0.5j * g.p_fft ** 2 * t)
    return state._replace(np.fft.ifft(np.fft.fft(state.amplitudes) * phase))


def kick_phases(seq: KickSequence, x: np.ndarray) -> list[np.ndarray]:
    """Phase factor exp(-i kappa_n (1 - exp(-x^2/2 sigma_n^2))) of each kick."""
    return [np.exp(-1j * k.strength * -np.expm1(-x ** 2 / (2 * k.width ** 2)))
            for k in seq]


def apply_gaussian_kicks(state: WaveState, seq: KickSequence) -> WaveState:
    """Imprint all kicks of ``seq`` at once (they commute in the instantaneous limit)."""
    psi = state.amplitudes.copy()
    for factor in kick_phases(seq, state.grid.x):
        psi *= factor
    return state._replace(psi)


def apply_harmonic_kick(state: WaveState, kick: HarmonicKick) -> WaveState:
    x = state.grid.x
    return state._replace(state.amplitudes * np.exp(-0.5j * kick.strength * x ** 2))


def apply_kick(state: WaveState, kick_spec) -> WaveState:
    if isinstance(kick_spec, HarmonicKick):
        return apply_harmonic_kick(state, kick_spec)
    return apply_gaussian_kicks(state, kick_spec)


def max_impulse(kick_spec, x_max: float, samples: int = 4001) -> float:
    """Largest |momentum change| the kick gives to atoms with |x| <= x_max."""
    if isinstance(kick_spec, HarmonicKick):
        return abs(kick_spec.strength) * x_max
    x = np.linspace(0.0, x_max, samples)
    total = np.zeros_like(x)
    for k in kick_spec:
        total -= k.strength / k.width ** 2 * x * np.exp(-x ** 2 / (2 * k.width ** 2))
    return float(np.max(np.abs(total)))


def auto_grid(protocol: ExpansionProtocol, scale: PhysicalScale = NATURAL,
              width_factor: float = 8.0, impulse_margin: float = 1.0) -> SpatialGrid:
    """Choose a grid that holds the protocol without aliasing.

    The half-extent is ``width_factor`` times the cloud width at kick time.
    The spacing resolves momenta up to width_factor*dp_i plus the largest
    kick impulse (scaled by ``impulse_margin``) and samples the narrowest
    Gaussian kick at >= 16 points per width.
    """
    dx_i, dp_i = initial_widths(scale)
    t = protocol.expansion_time
    cloud = dx_i * math.sqrt(1.0 + (scale.omega0 * t) ** 2)
    half_extent = width_factor * cloud
    p_needed = width_factor * dp_i + impulse_margin * max_impulse(
        protocol.kick_spec, width_factor * cloud)
    spacing = np.pi / p_needed
    if isinstance(protocol.kick_spec, KickSequence):
        spacing = min(spacing, min(protocol.kick_spec.widths) / 16.0)
    n = 2 ** max(1, math.ceil(math.log2(2.0 * half_extent / spacing)))
    if n > MAX_POINTS:
        raise ResourceError(f"protocol needs {n} grid points (limit {MAX_POINTS})")
    return SpatialGrid(n, half_extent)


def run_protocol(state: WaveState, protocol: ExpansionProtocol) -> tuple[WaveState, WaveState]:
    """Free flight followed by the kick; returns (state at kick time, final state)."""
    expanded = propagate_free(state, protocol.expansion_time)
    return expanded, apply_kick(expanded, protocol.kick_spec)
