"""Numerical tuning of kick strengths, focal-time sweeps and sensitivity maps.

The objective throughout is the RMS width of the full final momentum
distribution, tails included; side peaks left by an anharmonic lens
therefore count against a design even when the central peak is narrow.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import minimize, minimize_scalar

from .design import DesignResult, design, harmonic_kick_strength
from .engine import (SpatialGrid, WaveState, auto_grid, make_ground_state, max_impulse,
                     propagate_free)
from .errors import DeltaKickError, OptimizationError, PreconditionError
from .observables import summarize
from .units import (NATURAL, ExpansionProtocol, HarmonicKick, KickSequence, PhysicalScale,
                    initial_widths)

log = logging.getLogger(__name__)

# grids for optimisation leave room for strengths this many times the seed
SEARCH_MARGIN = 4.0
SIMPLEX_STEP = 0.05
MULTISTART_SPREAD = 0.2


class MomentumWidthObjective:
    """Final RMS momentum width as a function of the kick strengths.

    The freely expanded state is computed once; each call only imprints the
    kick phases and takes one FFT. ``widths=None`` means a single harmonic
    kick whose strength is the only parameter.
    """

    def __init__(self, widths: Optional[Sequence[float]], t_f: float,
                 grid: SpatialGrid, scale: PhysicalScale = NATURAL):
        self.widths = None if widths is None else tuple(float(s) for s in widths)
        self.t_f = float(t_f)
        self.grid = grid
        self.scale = scale
        self.initial = make_ground_state(grid, scale)
        self.expanded = propagate_free(self.initial, self.t_f)
        self.before = summarize(self.expanded, scale)
        x = grid.x
        if self.widths is None:
            self._profiles = [0.5 * x ** 2]
        else:
            self._profiles = [-np.expm1(-x ** 2 / (2 * s ** 2)) for s in self.widths]
        self._psi = self.expanded.amplitudes
        _, dp_i = initial_widths(scale)
        # momentum the grid can still carry after the spread of the cloud itself
        self._impulse_capacity = grid.momentum_extent - 8.0 * dp_i
        self._cloud_extent = 8.0 * self.before.dx
        self.evaluations = 0

    def kick_spec(self, strengths):
        if self.widths is None:
            return HarmonicKick(float(strengths[0]))
        return KickSequence.from_arrays(strengths, self.widths)

    def final_state(self, strengths) -> WaveState:
        phase = sum(k * prof for k, prof in zip(strengths, self._profiles))
        return self.expanded._replace(self._psi * np.exp(-1j * phase))

    def __call__(self, strengths) -> float:
        strengths = np.asarray(strengths, dtype=float)
        self.evaluations += 1
        if not np.all(np.isfinite(strengths)):
            raise OptimizationError("non-finite kick strength", strengths)
        impulse = max_impulse(self.kick_spec(strengths), self._cloud_extent, samples=512)
        if impulse > self._impulse_capacity:
            raise OptimizationError(
                f"kick impulse {impulse:.4g} exceeds grid momentum capacity "
                f"{self._impulse_capacity:.4g}", strengths)
        phase = sum(k * prof for k, prof in zip(strengths, self._profiles))
        w = np.abs(np.fft.fft(self._psi * np.exp(-1j * phase))) ** 2
        w /= w.sum()
        p = self.grid.p_fft
        mean = np.dot(w, p)
        return float(math.sqrt(np.dot(w, (p - mean) ** 2)))


@dataclass(frozen=True)
class OptimizationReport:
    best_strengths: tuple[float, ...]
    best_dp: float
    objective_evaluations: int
    converged: bool
    initial_guess: tuple[float, ...]
    initial_dp: float = math.nan
    widths: Optional[tuple[float, ...]] = None
    expansion_time: float = math.nan

    def kick_spec(self):
        if self.widths is None:
            return HarmonicKick(self.best_strengths[0])
        return KickSequence.from_arrays(self.best_strengths, self.widths)


def search_grid(widths, t_f, seed_strengths, scale=NATURAL) -> SpatialGrid:
    """Grid that stays valid for strengths up to SEARCH_MARGIN times the seed."""
    if widths is None:
        spec = HarmonicKick(max(abs(seed_strengths[0]), 1.0 / max(t_f, 1.0)))
    else:
        spec = KickSequence.from_arrays(seed_strengths, widths)
    return auto_grid(ExpansionProtocol(t_f, spec), scale, impulse_margin=SEARCH_MARGIN)


def _nelder_mead(objective, seed, budget):
    """Deterministic Nelder-Mead in coordinates relative to the seed."""
    seed = np.asarray(seed, dtype=float)
    scale = np.where(seed != 0, seed, 1.0)
    n = seed.size
    simplex = np.ones((n + 1, n)) * (seed / scale)
    for i in range(n):
        simplex[i + 1, i] *= 1.0 + SIMPLEX_STEP
        if seed[i] == 0:
            simplex[i + 1, i] = SIMPLEX_STEP
    result = minimize(lambda z: objective(z * scale), seed / scale, method="Nelder-Mead",
                      options={"initial_simplex": simplex, "maxfev": budget,
                               "xatol": 1e-6, "fatol": 1e-15})
    return result.x * scale, float(result.fun), bool(result.success), int(result.nfev)


def optimize_strengths(widths: Optional[Sequence[float]], t_f: float,
                       seed: Optional[DesignResult | Sequence[float]] = None,
                       budget: Optional[int] = None, *, grid: Optional[SpatialGrid] = None,
                       multistart: bool = False, drive: str = "classical",
                       scale: PhysicalScale = NATURAL) -> OptimizationReport:
    """Minimise the final RMS momentum width over the kick strengths.

    Starts from ``seed`` (default: the classical design, or the ideal
    harmonic strength when ``widths`` is None). Simplex vertices are placed
    5% from the seed along each axis and convergence means a simplex
    diameter below 1e-6 relative to the seed. With ``multistart`` the search
    is repeated from every +-20% corner around the seed and the best kept.

    Raises OptimizationError when a trial point would need more momentum
    range than the simulation grid provides.
    """
    if widths is None:
        seed_k = [harmonic_kick_strength(t_f, scale).strength] if seed is None else list(
            getattr(seed, "strengths", seed))
        n = 1
    else:
        widths = tuple(float(s) for s in widths)
        n = len(widths)
        if seed is None:
            seed = design(widths, t_f, drive=drive, scale=scale)
        seed_k = list(getattr(seed, "strengths", seed))
        if len(seed_k) != n:
            raise PreconditionError(f"seed has {len(seed_k)} strengths for {n} widths")
    budget = 500 * n if budget is None else int(budget)
    if budget < 50 * n:
        raise PreconditionError(f"budget {budget} below the minimum of {50 * n}")
    if grid is None:
        grid = search_grid(widths, t_f, seed_k, scale)
    objective = MomentumWidthObjective(widths, t_f, grid, scale)
    seed_dp = objective(seed_k)
    starts = [np.asarray(seed_k, dtype=float)]
    if multistart:
        for signs in itertools.product((1.0, -1.0), repeat=n):
            starts.append(starts[0] * (1.0 + MULTISTART_SPREAD * np.array(signs)))
    best = (np.asarray(seed_k, dtype=float), seed_dp, False)
    for start in starts:
        x, fx, ok, _ = _nelder_mead(objective, start, budget)
        if fx <= best[1]:
            best = (x, fx, ok)
    return OptimizationReport(
        best_strengths=tuple(float(k) for k in best[0]), best_dp=best[1],
        objective_evaluations=objective.evaluations, converged=best[2],
        initial_guess=tuple(float(k) for k in seed_k), initial_dp=seed_dp,
        widths=None if widths is None else tuple(widths), expansion_time=float(t_f))


@dataclass(frozen=True)
class SweepPoint:
    t_f: float
    dx_ratio: float
    dv_ratio: float
    strengths: tuple[float, ...]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class FocalTime:
    """Refined argmin of a sweep."""

    t_f: float
    dv_ratio: float
    dx_ratio: float
    strengths: tuple[float, ...]
    interior: bool


@dataclass(frozen=True)
class SweepCurve:
    points: tuple[SweepPoint, ...]
    widths: Optional[tuple[float, ...]]
    mode: str
    drive: str = "classical"
    best: Optional[FocalTime] = None

    def valid(self) -> list[SweepPoint]:
        return [p for p in self.points if p.ok]

    def argmin(self) -> SweepPoint:
        good = self.valid()
        if not good:
            raise DeltaKickError("sweep has no successful points")
        return min(good, key=lambda p: p.dv_ratio)

    def arrays(self):
        good = self.valid()
        return (np.array([p.t_f for p in good]), np.array([p.dx_ratio for p in good]),
                np.array([p.dv_ratio for p in good]))


MODES = ("classical", "optimized", "harmonic")


def evaluate_point(widths: Optional[Sequence[float]], t_f: float, mode: str = "classical",
                   drive: str = "classical", budget: Optional[int] = None,
                   scale: PhysicalScale = NATURAL) -> SweepPoint:
    """Design (and optionally optimise) the kicks at one focal time and simulate."""
    if mode not in MODES:
        raise PreconditionError(f"unknown sweep mode {mode!r}; choose from {MODES}")
    try:
        if mode == "harmonic" or widths is None:
            seed = [harmonic_kick_strength(t_f, scale).strength]
            widths = None
        else:
            seed = list(design(widths, t_f, drive=drive, scale=scale).strengths)
        if mode == "optimized":
            strengths = optimize_strengths(widths, t_f, seed, budget, drive=drive,
                                           scale=scale).best_strengths
        else:
            strengths = tuple(seed)
        objective = MomentumWidthObjective(
            widths, t_f, search_grid(widths, t_f, strengths, scale), scale)
        after = summarize(objective.final_state(strengths), scale)
        before = objective.before
        start = summarize(objective.initial, scale)
        return SweepPoint(float(t_f), before.dx / start.dx, after.dv / start.dv,
                          tuple(float(k) for k in strengths))
    except DeltaKickError as exc:
        log.warning("sweep point t_f=%g failed: %s", t_f, exc)
        return SweepPoint(float(t_f), math.nan, math.nan, (), f"{exc.code}: {exc}")


def refine_focal_time(widths, curve: SweepCurve, budget=None, tol: float = 0.01,
                      scale: PhysicalScale = NATURAL) -> FocalTime:
    """Golden-section search around the coarse argmin of ``curve`` (relative tol in t_f)."""
    good = curve.valid()
    ts = [p.t_f for p in good]
    i = int(np.argmin([p.dv_ratio for p in good]))
    best = good[i]
    if i == 0 or i == len(good) - 1:
        return FocalTime(best.t_f, best.dv_ratio, best.dx_ratio, best.strengths, False)
    cache = {}

    def f(t):
        if t not in cache:
            cache[t] = evaluate_point(widths, t, curve.mode, curve.drive, budget, scale)
        pt = cache[t]
        return pt.dv_ratio if pt.ok else math.inf

    res = minimize_scalar(f, bracket=(ts[i - 1], ts[i], ts[i + 1]), method="golden",
                          tol=tol / 2)
    t_best = float(res.x)
    pt = cache.get(t_best) or evaluate_point(widths, t_best, curve.mode, curve.drive,
                                             budget, scale)
    if pt.dv_ratio > best.dv_ratio:
        pt = best
    return FocalTime(pt.t_f, pt.dv_ratio, pt.dx_ratio, pt.strengths, True)


def sweep_expansion(widths: Optional[Sequence[float]], t_values: Sequence[float],
                    mode: str = "classical", drive: str = "classical",
                    budget: Optional[int] = None, refine: bool = True, n_jobs: Optional[int] = None,
                    scale: PhysicalScale = NATURAL) -> SweepCurve:
    """Cooling performance against focal time.

    Each point designs the kicks at that t_f (``mode`` classical, optimized
    or harmonic), simulates the protocol and records dx_ratio (width at
    kick time over dx_i) and dv_ratio (final over initial velocity width).
    Failed points are kept with their error text. With ``refine`` the coarse
    argmin is polished by golden-section search to 1% in t_f.
    """
    t_values = [float(t) for t in t_values]
    if any(t <= 0 for t in t_values) or t_values != sorted(t_values):
        raise PreconditionError("t_values must be positive and sorted")
    widths = None if widths is None else tuple(float(s) for s in widths)
    points = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(evaluate_point)(widths, t, mode, drive, budget, scale) for t in t_values)
    curve = SweepCurve(tuple(points), widths, mode, drive)
    if refine and curve.valid():
        best = refine_focal_time(widths, curve, budget, scale=scale)
        curve = SweepCurve(curve.points, widths, mode, drive, best)
    return curve


@dataclass(frozen=True, eq=False)
class SensitivityMap:
    """dp_i/dp_f with kappa_1 = scales1[i] kappa_1cl and kappa_2 = scales2[j] kappa_2cl."""

    scales1: np.ndarray
    scales2: np.ndarray
    values: np.ndarray
    classical: DesignResult
    t_f: float

    def at(self, s1: float, s2: float) -> float:
        i = int(np.argmin(np.abs(self.scales1 - s1)))
        j = int(np.argmin(np.abs(self.scales2 - s2)))
        return float(self.values[i, j])

    def best(self) -> tuple[float, float, float]:
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return float(self.scales1[i]), float(self.scales2[j]), float(self.values[i, j])


def sensitivity_map(sigma1: float, sigma2: float, t_f: float,
                    scales1: Optional[Sequence[float]] = None,
                    scales2: Optional[Sequence[float]] = None,
                    drive: str = "classical", n_jobs: Optional[int] = None,
                    scale: PhysicalScale = NATURAL) -> SensitivityMap:
    """Doublet performance dp_i/dp_f around the classical strengths.

    Default axes are 41 points on [0.9, 1.1] for both scale factors.
    """
    s1 = np.linspace(0.9, 1.1, 41) if scales1 is None else np.asarray(scales1, dtype=float)
    s2 = np.linspace(0.9, 1.1, 41) if scales2 is None else np.asarray(scales2, dtype=float)
    for axis in (s1, s2):
        if np.any(axis <= 0) or np.any(axis > 2):
            raise PreconditionError("scale factors must lie in (0, 2]")
    cl = design((sigma1, sigma2), t_f, drive=drive, scale=scale)
    grid = auto_grid(ExpansionProtocol(t_f, cl.scaled((max(s1), max(s2)))), scale,
                     impulse_margin=2.0)
    objective = MomentumWidthObjective(cl.widths, t_f, grid, scale)
    dp_i = summarize(objective.initial, scale).dp
    k1, k2 = cl.strengths

    def row(a):
        return [dp_i / objective((a * k1, b * k2)) for b in s2]

    values = np.array(Parallel(n_jobs=n_jobs, prefer="threads")(delayed(row)(a) for a in s1))
    return SensitivityMap(s1, s2, values, cl, float(t_f))
