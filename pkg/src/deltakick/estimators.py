"""Scikit-learn style front end.

``DeltaKickCooler`` follows the estimator conventions: hyper-parameters are
set in ``__init__`` and exposed through ``get_params``/``set_params``,
``fit`` designs the kick strengths (storing fitted attributes with a
trailing underscore) and ``transform`` runs the protocol on a batch of
initial wavefunctions given as rows of a complex array.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .design import design, harmonic_kick_strength
from .engine import WaveState, apply_kick, auto_grid, make_ground_state, propagate_free
from .errors import PreconditionError
from .observables import summarize
from .optimize import optimize_strengths, search_grid
from .units import NATURAL, ExpansionProtocol, HarmonicKick, KickSequence, initial_widths
from .validation import check_scalar, check_wavefunctions, check_widths

DESIGNS = ("classical", "generalized", "optimized", "harmonic")


class DeltaKickCooler(TransformerMixin, BaseEstimator):
    """Free expansion followed by a (compound) delta-kick lens.

    Parameters
    ----------
    widths : sequence of float
        RMS widths of the Gaussian kicks, in units of the initial cloud
        width unless ``length_unit="natural"``. Ignored for ``design="harmonic"``.
    expansion_time : float
        Free-flight time before the kick, in units of 1/omega0.
    design : {"classical", "generalized", "optimized", "harmonic"}
        How strengths are chosen: Taylor cancellation against m/t_f or
        m bdot/b, numerical minimisation of the final momentum width seeded
        at the classical design, or the ideal harmonic kick.
    budget : int, optional
        Objective evaluations per optimiser start (``design="optimized"``).
    multistart : bool
        Also restart the optimiser from +-20% corners around the seed.

    Attributes
    ----------
    strengths_ : ndarray
        Designed kick strengths (units of hbar; omega_k^2 dt for harmonic).
    kick_spec_ : KickSequence or HarmonicKick
    grid_ : SpatialGrid
        Grid on which ``transform`` expects its input rows.
    design_info_ : dict
    """

    def __init__(self, widths=(15.0,), expansion_time=5.0, design="classical",
                 length_unit="initial_width", budget=None, multistart=False):
        self.widths = widths
        self.expansion_time = expansion_time
        self.design = design
        self.length_unit = length_unit
        self.budget = budget
        self.multistart = multistart

    def _natural_widths(self):
        widths = check_widths(self.widths)
        if self.length_unit == "initial_width":
            dx_i = initial_widths(NATURAL)[0]
            return tuple(w * dx_i for w in widths)
        if self.length_unit != "natural":
            raise PreconditionError(
                f"length_unit must be 'initial_width' or 'natural', got {self.length_unit!r}")
        return widths

    def fit(self, X=None, y=None):
        """Design the kick strengths. ``X`` and ``y`` are accepted for API symmetry."""
        t_f = check_scalar(self.expansion_time, "expansion_time", 0.0)
        if self.design not in DESIGNS:
            raise PreconditionError(f"design must be one of {DESIGNS}, got {self.design!r}")
        info = {"design": self.design}
        if self.design == "harmonic":
            strengths = (harmonic_kick_strength(t_f).strength,)
            self.kick_spec_ = HarmonicKick(strengths[0])
            self.grid_ = auto_grid(ExpansionProtocol(t_f, self.kick_spec_))
        else:
            widths = self._natural_widths()
            drive = "generalized" if self.design == "generalized" else "classical"
            result = design(widths, t_f, drive=drive)
            strengths = result.strengths
            info.update(drive=result.rhs_value, condition_estimate=result.condition_estimate)
            if self.design == "optimized":
                report = optimize_strengths(widths, t_f, result, self.budget,
                                            multistart=self.multistart)
                strengths = report.best_strengths
                info.update(seed=report.initial_guess, seed_dp=report.initial_dp,
                            best_dp=report.best_dp, converged=report.converged,
                            objective_evaluations=report.objective_evaluations)
            self.kick_spec_ = KickSequence.from_arrays(strengths, widths)
            self.grid_ = search_grid(widths, t_f, strengths)
        self.strengths_ = np.asarray(strengths, dtype=float)
        self.design_info_ = info
        return self

    def initial_states(self, n_states=1):
        """Rows holding the trap ground state on ``grid_``."""
        check_is_fitted(self, "grid_")
        psi = make_ground_state(self.grid_).amplitudes
        return np.tile(psi, (n_states, 1))

    def _run(self, X):
        check_is_fitted(self, "kick_spec_")
        X = check_wavefunctions(X, self.grid_)
        t_f = float(self.expansion_time)
        for row in X:
            expanded = propagate_free(WaveState(self.grid_, row), t_f)
            yield expanded, apply_kick(expanded, self.kick_spec_)

    def transform(self, X):
        """Final wavefunctions (rows) after free flight and the kick."""
        return np.array([final.amplitudes for _, final in self._run(X)])

    def score(self, X=None, y=None):
        """Mean cooling factor dv_initial / dv_final over the rows of X.

        Defaults to the trap ground state. Larger is better.
        """
        if X is None:
            X = self.initial_states()
        X = check_wavefunctions(X, self.grid_)
        before = [summarize(WaveState(self.grid_, row)).dv for row in X]
        after = [summarize(final).dv for _, final in self._run(X)]
        return float(np.mean(np.array(before) / np.array(after)))
