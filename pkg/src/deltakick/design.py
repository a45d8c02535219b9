"""Analytic kick-strength design.

The final momentum of an atom at x after free flight and N Gaussian kicks is

    p_f(x) = drive * x - sum_n (kappa_n / sigma_n^2) x exp(-x^2 / 2 sigma_n^2)

with drive = m/t_f (classical picture) or m bdot/b (scaling solution).
Requiring the x, x^3, ..., x^(2N-1) Maclaurin coefficients to vanish gives a
linear system for the kappa_n whose matrix has entries 1/sigma_j^(2i).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import linalg
from scipy.interpolate import CubicHermiteSpline

from .errors import DegenerateLensError, PreconditionError, SingularityError
from .units import NATURAL, HarmonicKick, KickSequence, PhysicalScale

MAX_KICKS = 6
DEGENERACY_TOL = 1e-6
MAX_CONDITION = 1e12
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class DesignResult:
    """Designed strengths for a set of kick widths.

    ``rhs_value`` is the drive (m/t_f or m bdot/b) the kicks were matched
    to; ``condition_estimate`` is the 2-norm condition number of the
    row-equilibrated system that was solved.
    """

    strengths: tuple[float, ...]
    widths: tuple[float, ...]
    rhs_value: float
    condition_estimate: float = 1.0

    def to_sequence(self) -> KickSequence:
        return KickSequence.from_arrays(self.strengths, self.widths)

    def scaled(self, factors: Sequence[float]) -> KickSequence:
        return KickSequence.from_arrays(
            [k * f for k, f in zip(self.strengths, factors)], self.widths)

    def to_dict(self) -> dict:
        out = self.to_sequence().to_dict()
        out["drive"] = self.rhs_value
        out["condition_estimate"] = self.condition_estimate
        return out


@dataclass(frozen=True, eq=False)
class ScalingSolution:
    """Scale factor b(t) of the cloud width and its derivative."""

    b: Callable[[float], float]
    b_dot: Callable[[float], float]
    analytic: bool
    t_span: tuple[float, float] = (0.0, math.inf)

    def drive(self, t: float, mass: float = 1.0) -> float:
        return mass * float(self.b_dot(t)) / float(self.b(t))


def free_expansion_scaling(scale: PhysicalScale = NATURAL) -> ScalingSolution:
    """b(t) = sqrt(1 + omega0^2 t^2) for release into free space."""
    w0 = scale.omega0

    def b(t):
        return np.sqrt(1.0 + (w0 * np.asarray(t, dtype=float)) ** 2)

    def b_dot(t):
        t = np.asarray(t, dtype=float)
        return w0 ** 2 * t / np.sqrt(1.0 + (w0 * t) ** 2)

    return ScalingSolution(b, b_dot, analytic=True)


def harmonic_kick_strength(t_f: float, scale: PhysicalScale = NATURAL) -> HarmonicKick:
    """omega_k^2 dt = omega0^2 t_f / (1 + omega0^2 t_f^2); returns the cloud to a trap eigenstate."""
    if t_f < 0:
        raise PreconditionError(f"t_f must be >= 0, got {t_f!r}")
    w0 = scale.omega0
    return HarmonicKick(w0 ** 2 * t_f / (1.0 + (w0 * t_f) ** 2))


def generalized_drive(t_f: float, scaling: Optional[ScalingSolution] = None,
                      scale: PhysicalScale = NATURAL) -> float:
    """m bdot(t_f)/b(t_f); free expansion when no scaling solution is given."""
    if t_f < 0:
        raise PreconditionError(f"t_f must be >= 0, got {t_f!r}")
    if scaling is None:
        scaling = free_expansion_scaling(scale)
    return scaling.drive(t_f, scale.mass)


def classical_drive(t_f: float, scale: PhysicalScale = NATURAL) -> float:
    if not t_f > 0:
        raise PreconditionError(f"t_f must be > 0 for the m/t_f drive, got {t_f!r}")
    return scale.mass / t_f


def _check_widths(sigmas):
    sig = np.asarray(sigmas, dtype=float)
    if sig.ndim != 1 or sig.size == 0:
        raise PreconditionError("need a non-empty list of kick widths")
    if np.any(~np.isfinite(sig)) or np.any(sig <= 0):
        raise PreconditionError(f"kick widths must be > 0, got {sig.tolist()}")
    sq = sig ** 2
    tol = DEGENERACY_TOL * sq.max()
    for i in range(sig.size):
        for j in range(i + 1, sig.size):
            if abs(sq[i] - sq[j]) < tol:
                raise DegenerateLensError(
                    f"kick widths {sig[i]:g} and {sig[j]:g} are equal within tolerance; "
                    "equal-width Gaussians cannot form a compound lens")
    return sig


def classical_doublet(sigma1: float, sigma2: float, t_f: float,
                      scale: PhysicalScale = NATURAL) -> DesignResult:
    """Closed-form doublet strengths for drive m/t_f.

    kappa_1 = m sigma_1^4 / (t_f (sigma_1^2 - sigma_2^2)),
    kappa_2 = -m sigma_2^4 / (t_f (sigma_1^2 - sigma_2^2)).
    """
    if not t_f > 0:
        raise PreconditionError(f"t_f must be > 0, got {t_f!r}")
    s1, s2 = _check_widths([sigma1, sigma2])
    diff = s1 ** 2 - s2 ** 2
    m = scale.mass
    return DesignResult((m * s1 ** 4 / (t_f * diff), -m * s2 ** 4 / (t_f * diff)),
                        (float(s1), float(s2)), m / t_f)


def cancellation_matrix(sigmas: Sequence[float]) -> np.ndarray:
    """A[i, j] = 1 / sigma_j^(2(i+1)), i, j = 0..N-1."""
    u = 1.0 / np.asarray(sigmas, dtype=float) ** 2
    return np.vstack([u ** (i + 1) for i in range(u.size)])


def classical_n_kick(sigmas: Sequence[float], drive: float) -> DesignResult:
    """Strengths cancelling the first N odd Maclaurin terms of the final momentum.

    The system is solved in u_j = 1/sigma_j^2, scaled by a reference u0 so
    the Vandermonde-like matrix has O(1) entries, with a partial-pivoted
    LU factorisation and one round of iterative refinement.
    """
    sig = _check_widths(sigmas)
    n = sig.size
    if n > MAX_KICKS:
        raise PreconditionError(f"at most {MAX_KICKS} kicks are supported, got {n}")
    if not (math.isfinite(drive) and drive > 0):
        raise PreconditionError(f"drive must be > 0, got {drive!r}")
    u = 1.0 / sig ** 2
    u0 = math.exp(np.mean(np.log(u)))
    w = u / u0
    # row i of the original system divided by u0^(i+1)
    scaled = np.vstack([w ** (i + 1) for i in range(n)])
    rhs = np.zeros(n)
    rhs[0] = drive / u0
    cond = float(np.linalg.cond(scaled))
    if not (math.isfinite(cond) and cond <= MAX_CONDITION):
        raise DegenerateLensError(
            f"kick widths {sig.tolist()} give a near-singular design system "
            f"(condition {cond:.3g})")
    lu = linalg.lu_factor(scaled)
    kappa = linalg.lu_solve(lu, rhs)
    kappa = kappa + linalg.lu_solve(lu, rhs - scaled @ kappa)
    residual = np.linalg.norm(scaled @ kappa - rhs) / np.linalg.norm(rhs)
    if residual > RESIDUAL_TOL:
        raise DegenerateLensError(f"design system residual {residual:.3g} too large")
    return DesignResult(tuple(float(k) for k in kappa), tuple(float(s) for s in sig),
                        float(drive), cond)


def impulse_profile(seq: KickSequence, x) -> np.ndarray:
    """Momentum change -sum_n (kappa_n/sigma_n^2) x exp(-x^2/2 sigma_n^2) at positions x."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for k in seq:
        out -= k.strength / k.width ** 2 * x * np.exp(-x ** 2 / (2 * k.width ** 2))
    return out


def taylor_coefficients(seq: KickSequence, drive: float, orders: int):
    """Maclaurin coefficients of drive*x + impulse_profile(x).

    Returns ``(coeffs, scales)``: coeffs[k] multiplies x^(2k+1), and
    scales[k] is the sum of the magnitudes of the terms that enter it, so
    |coeffs[k]| / scales[k] is the relative cancellation error.
    """
    coeffs = np.zeros(orders)
    scales = np.zeros(orders)
    for k in range(orders):
        factor = (-1) ** k / (2.0 ** k * math.factorial(k))
        terms = np.array([-factor * kick.strength / kick.width ** (2 * k + 2) for kick in seq])
        if k == 0:
            terms = np.append(terms, drive)
        coeffs[k] = math.fsum(terms)
        scales[k] = np.sum(np.abs(terms))
    return coeffs, scales


OmegaSpec = Union[Callable[[float], float], tuple]


def _omega_function(omega_of_t: OmegaSpec) -> Callable[[float], float]:
    if callable(omega_of_t):
        return omega_of_t
    times, values = (np.asarray(a, dtype=float) for a in omega_of_t)
    if times.shape != values.shape or times.ndim != 1 or times.size < 2:
        raise PreconditionError("sampled omega(t) needs matching 1-D time and value arrays")
    return lambda t: float(np.interp(t, times, values))


def ermakov_integrate(omega_of_t: OmegaSpec, t_span: tuple[float, float],
                      steps: int = 10_000, scale: PhysicalScale = NATURAL) -> ScalingSolution:
    """Integrate b'' + omega(t)^2 b = omega0^2 / b^3 from b=1, b'=0 by fixed-step RK4.

    ``omega_of_t`` is a callable or a ``(times, values)`` pair, linearly
    interpolated. The returned b and b_dot interpolate the nodes with cubic
    Hermite polynomials, which keeps the fourth-order accuracy.
    """
    if steps < 100:
        raise PreconditionError(f"need at least 100 steps, got {steps}")
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise PreconditionError(f"empty time span {t_span!r}")
    omega = _omega_function(omega_of_t)
    w0sq = scale.omega0 ** 2

    def rhs(t, y):
        b, v = y
        if not (b > 1e-8 and math.isfinite(b)):
            raise SingularityError(f"scale factor collapsed to {b!r} at t={t:g}")
        return np.array([v, w0sq / b ** 3 - omega(t) ** 2 * b])

    h = (t1 - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    ys = np.empty((steps + 1, 2))
    ys[0] = (1.0, 0.0)
    for i in range(steps):
        t, y = ts[i], ys[i]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        ys[i + 1] = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not (ys[i + 1, 0] > 1e-8 and np.all(np.isfinite(ys[i + 1]))):
            raise SingularityError(
                f"scale factor collapsed to {ys[i + 1, 0]!r} at t={ts[i + 1]:g}")
    accel = np.array([rhs(t, y)[1] for t, y in zip(ts, ys)])
    b = CubicHermiteSpline(ts, ys[:, 0], ys[:, 1])
    b_dot = CubicHermiteSpline(ts, ys[:, 1], accel)
    return ScalingSolution(lambda t: float(b(t)), lambda t: float(b_dot(t)),
                           analytic=False, t_span=(t0, t1))


def design(widths: Sequence[float], t_f: float, drive: str = "classical",
           scaling: Optional[ScalingSolution] = None,
           scale: PhysicalScale = NATURAL) -> DesignResult:
    """Classical-scheme strengths with the m/t_f (``"classical"``) or m bdot/b
    (``"generalized"``) drive."""
    if drive == "classical":
        value = classical_drive(t_f, scale)
    elif drive == "generalized":
        value = generalized_drive(t_f, scaling, scale)
    else:
        raise PreconditionError(f"unknown drive {drive!r}; use 'classical' or 'generalized'")
    return classical_n_kick(widths, value)
