"""Widths, distributions and phase-space maps of a simulated state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import WaveState, momentum_amplitudes
from .errors import DomainError, PreconditionError
from .units import NATURAL, PhysicalScale

HEISENBERG_SLACK = 1e-9


@dataclass(frozen=True)
class MomentSummary:
    """RMS widths of one state, measured about the empirical means."""

    dx: float
    dp: float
    dv: float
    uncertainty_product: float
    temperature_natural: float
    mean_x: float = 0.0
    mean_p: float = 0.0
    excess_kurtosis: float = 0.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _weighted_moments(axis, weights):
    w = weights / weights.sum()
    mean = float(np.sum(w * axis))
    centred = axis - mean
    var = float(np.sum(w * centred ** 2))
    m4 = float(np.sum(w * centred ** 4))
    kurt = m4 / var ** 2 - 3.0 if var > 0 else 0.0
    return mean, var, kurt


def momentum_distribution(state: WaveState) -> tuple[np.ndarray, np.ndarray]:
    """(p, |phi(p)|^2) on the grid momenta, p increasing, unit integral."""
    p, phi = momentum_amplitudes(state)
    density = np.abs(phi) ** 2
    density /= np.sum(density) * state.grid.momentum_spacing
    return p, density


def excess_kurtosis(axis: np.ndarray, density: np.ndarray) -> float:
    """Excess kurtosis of a sampled distribution; 0 for a Gaussian."""
    return _weighted_moments(np.asarray(axis), np.asarray(density))[2]


def summarize(state: WaveState, scale: PhysicalScale = NATURAL) -> MomentSummary:
    g = state.grid
    mean_x, var_x, _ = _weighted_moments(g.x, state.density)
    p, density = momentum_distribution(state)
    mean_p, var_p, kurt = _weighted_moments(p, density)
    dx, dp = math.sqrt(var_x), math.sqrt(var_p)
    product = dx * dp
    if product < scale.hbar / 2 - HEISENBERG_SLACK:
        # only reachable through a corrupted (aliased) state
        raise PreconditionError(f"uncertainty product {product!r} below hbar/2")
    dv = dp / scale.mass
    return MomentSummary(
        dx=dx, dp=dp, dv=dv, uncertainty_product=product,
        temperature_natural=scale.mass * dv * dv / scale.boltzmann,
        mean_x=mean_x, mean_p=mean_p, excess_kurtosis=kurt)


def cooling_ratio(initial: MomentSummary, final: MomentSummary) -> float:
    """T_f / T_i = (dv_f / dv_i)^2."""
    if not initial.dv > 0:
        raise DomainError("initial velocity width must be > 0")
    return (final.dv / initial.dv) ** 2


@dataclass(frozen=True, eq=False)
class WignerMap:
    """W(x, p) sampled on a rectangular grid; ``values[i, j]`` is at (x_axis[i], p_axis[j])."""

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    @property
    def dx(self) -> float:
        return float(self.x_axis[1] - self.x_axis[0])

    @property
    def dp(self) -> float:
        return float(self.p_axis[1] - self.p_axis[0])

    def normalization(self) -> float:
        return float(np.sum(self.values) * self.dx * self.dp)

    def position_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.dp

    def momentum_marginal(self) -> np.ndarray:
        return self.values.sum(axis=0) * self.dx

    def covariance(self) -> float:
        """Symmetrised <xp> - <x><p> of the quasi-distribution."""
        w = self.values * self.dx * self.dp
        total = w.sum()
        mx = np.sum(w.sum(axis=1) * self.x_axis) / total
        mp = np.sum(w.sum(axis=0) * self.p_axis) / total
        return float(np.sum(w * np.outer(self.x_axis - mx, self.p_axis - mp)) / total)

    def crop(self, x_max: float, p_max: float) -> "WignerMap":
        ix = np.abs(self.x_axis) <= x_max
        ip = np.abs(self.p_axis) <= p_max
        return WignerMap(self.x_axis[ix], self.p_axis[ip], self.values[np.ix_(ix, ip)])


def _fourier_upsample2(psi: np.ndarray) -> np.ndarray:
    """Band-limited interpolation onto a grid with half the spacing."""
    n = psi.size
    spec = np.fft.fft(psi)
    padded = np.zeros(2 * n, dtype=complex)
    half = n // 2
    padded[:half] = spec[:half]
    padded[-half + 1:] = spec[-half + 1:]
    # split the Nyquist bin so the interpolant stays real for real input
    padded[half] = 0.5 * spec[half]
    padded[-half] = 0.5 * spec[half]
    return np.fft.ifft(padded) * 2.0


def wigner(state: WaveState, downsample: int = 1, chunk: int = 256) -> WignerMap:
    """Wigner function W(x,p) = (1/2pi) int ds psi*(x + s/2) psi(x - s/2) e^{ips}.

    Rows are computed one x at a time by an FFT over the separation s; the
    half-grid samples psi(x_j +- s/2) come from Fourier interpolation, so
    the p axis coincides with the grid momenta. ``downsample`` keeps every
    n-th sample along both axes.
    """
    g = state.grid
    n = g.num_points
    downsample = int(downsample)
    if downsample < 1 or n % downsample:
        raise PreconditionError(f"downsample {downsample} must divide grid size {n}")
    fine = _fourier_upsample2(state.amplitudes)
    conj_fine = np.conj(fine)
    k = np.fft.fftfreq(n, d=1.0 / n).astype(int)          # separation index, FFT order
    rows = np.arange(0, n, downsample)
    p_keep = np.arange(0, n, downsample)
    values = np.empty((rows.size, p_keep.size))
    for start in range(0, rows.size, chunk):
        j = rows[start:start + chunk, None]
        corr = conj_fine[(2 * j + k) % (2 * n)] * fine[(2 * j - k) % (2 * n)]
        corr[:, n // 2] = 0.0                              # unpaired -n/2 separation
        spectrum = np.fft.ifft(corr, axis=1) * n           # sum_k corr_k e^{+i p_m s_k}
        spectrum = np.fft.fftshift(spectrum, axes=1)
        values[start:start + chunk] = spectrum.real[:, p_keep] * g.spacing / (2 * np.pi)
    return WignerMap(g.x[rows].copy(), g.p[p_keep].copy(), values)
