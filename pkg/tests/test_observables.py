import math

import numpy as np
import pytest

from deltakick.engine import (SpatialGrid, WaveState, apply_harmonic_kick, make_ground_state,
                              propagate_free)
from deltakick.errors import DomainError, PreconditionError
from deltakick.observables import (MomentSummary, WignerMap, cooling_ratio, excess_kurtosis,
                                   momentum_distribution, summarize, wigner)
from deltakick.units import HarmonicKick

from conftest import random_state


def test_ground_state_summary(ground):
    s = summarize(ground)
    assert s.dx == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert s.dp == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert s.uncertainty_product == pytest.approx(0.5, rel=1e-12)
    assert s.temperature_natural == pytest.approx(0.5, rel=1e-12)
    assert abs(s.excess_kurtosis) < 1e-10


def test_momentum_distribution_unit_integral(ground):
    p, rho = momentum_distribution(ground)
    assert np.sum(rho) * ground.grid.momentum_spacing == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(rho - np.exp(-p ** 2) / math.sqrt(math.pi))) < 1e-12


def test_excess_kurtosis_reference_shapes():
    x = np.linspace(-40, 40, 40001)
    assert excess_kurtosis(x, np.exp(-x ** 2 / 2)) == pytest.approx(0.0, abs=1e-9)
    flat = (np.abs(x) <= 1).astype(float)
    assert excess_kurtosis(x, flat) == pytest.approx(-1.2, abs=1e-3)
    assert excess_kurtosis(x, np.exp(-np.abs(x))) == pytest.approx(3.0, abs=1e-3)


def test_cooling_ratio():
    a = MomentSummary(1.0, 1.0, 1.0, 1.0, 1.0)
    b = MomentSummary(1.0, 0.5, 0.5, 0.5, 0.25)
    assert cooling_ratio(a, b) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        cooling_ratio(MomentSummary(1.0, 0.0, 0.0, 0.0, 0.0), b)


def test_summarize_rejects_sub_heisenberg_state():
    # a state narrower than a grid cell aliases and breaks the bound
    g = SpatialGrid(64, 10.0)
    psi = np.zeros(64, dtype=complex)
    psi[32] = 1.0 / math.sqrt(g.spacing)
    with pytest.raises(PreconditionError):
        summarize(WaveState(g, psi))


def test_wigner_of_ground_state():
    g = SpatialGrid(512, 12.0)
    w = wigner(make_ground_state(g))
    xs, ps = np.meshgrid(w.x_axis, w.p_axis, indexing="ij")
    exact = np.exp(-xs ** 2 - ps ** 2) / math.pi
    assert np.max(np.abs(w.values - exact)) < 1e-10
    i0 = np.argmin(np.abs(w.x_axis))
    j0 = np.argmin(np.abs(w.p_axis))
    assert w.values[i0, j0] == pytest.approx(1 / math.pi, rel=1e-12)


def test_wigner_of_expanded_state_is_sheared():
    g = SpatialGrid(1024, 30.0)
    t = 1.5
    w = wigner(propagate_free(make_ground_state(g), t))
    xs, ps = np.meshgrid(w.x_axis, w.p_axis, indexing="ij")
    exact = np.exp(-(xs - ps * t) ** 2 - ps ** 2) / math.pi
    assert np.max(np.abs(w.values - exact)) < 1e-9
    assert w.covariance() == pytest.approx(t / 2, rel=1e-6)


def test_wigner_marginals_of_random_state():
    g = SpatialGrid(512, 16.0)
    state = WaveState(g, random_state(g, np.random.default_rng(7), chirp=0.2, kick=1.0))
    w = wigner(state)
    p, rho_p = momentum_distribution(state)
    assert w.normalization() == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(w.position_marginal() - state.density)) < 1e-10
    assert np.max(np.abs(w.momentum_marginal() - rho_p)) < 1e-10


def test_wigner_downsample_and_crop():
    g = SpatialGrid(512, 12.0)
    full = wigner(make_ground_state(g))
    coarse = wigner(make_ground_state(g), downsample=4)
    assert coarse.values.shape == (128, 128)
    assert np.allclose(coarse.values, full.values[::4, ::4])
    cropped = full.crop(3.0, 2.0)
    assert np.all(np.abs(cropped.x_axis) <= 3.0) and np.all(np.abs(cropped.p_axis) <= 2.0)
    with pytest.raises(PreconditionError):
        wigner(make_ground_state(g), downsample=3)


def test_harmonic_kick_squeezes_wigner():
    g = SpatialGrid(1024, 30.0)
    t = 1.5
    state = apply_harmonic_kick(propagate_free(make_ground_state(g), t), HarmonicKick(t / (1 + t * t)))
    w = wigner(state)
    # the kicked cloud is a trap eigenstate of frequency 1/(1+t^2): no x-p correlation
    assert abs(w.covariance()) < 1e-8
    assert isinstance(w, WignerMap)
