"""Delta-kick cooling of a 1D non-interacting cloud with compound Gaussian lenses."""

__version__ = "0.1.0"

from .design import (DesignResult, ScalingSolution, classical_doublet, classical_n_kick,
                     ermakov_integrate, free_expansion_scaling, generalized_drive,
                     harmonic_kick_strength, impulse_profile, taylor_coefficients)
from .engine import (SpatialGrid, WaveState, apply_gaussian_kicks, apply_harmonic_kick,
                     auto_grid, make_ground_state, momentum_amplitudes, propagate_free)
from .errors import (ConfigurationError, DegenerateLensError, DeltaKickError,
                     GridOverflowError, OptimizationError)
from .estimators import DeltaKickCooler
from .observables import (MomentSummary, WignerMap, cooling_ratio, momentum_distribution,
                          summarize, wigner)
from .optimize import (OptimizationReport, SweepCurve, optimize_strengths, sensitivity_map,
                       sweep_expansion)
from .units import (ExpansionProtocol, GaussianKick, HarmonicKick, KickSequence,
                    PhysicalScale, initial_widths, natural_to_si_temperature)

__all__ = [name for name in dir() if not name.startswith("_")]
