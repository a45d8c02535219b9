import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deltakick.design import harmonic_kick_strength, impulse_profile
from deltakick.engine import (MAX_POINTS, SpatialGrid, WaveState, apply_gaussian_kicks,
                              apply_harmonic_kick, apply_kick, auto_grid, make_ground_state,
                              momentum_amplitudes, position_amplitudes, predicted_width,
                              propagate_free, run_protocol)
from deltakick.errors import (GridOverflowError, PreconditionError, ResourceError)
from deltakick.observables import summarize
from deltakick.units import ExpansionProtocol, HarmonicKick, KickSequence

from conftest import random_state


def test_grid_validation():
    with pytest.raises(PreconditionError):
        SpatialGrid(1000, 10.0)
    with pytest.raises(PreconditionError):
        SpatialGrid(1024, -1.0)
    g = SpatialGrid(256, 8.0)
    assert g.x[0] == -8.0 and g.x.size == 256
    assert g.spacing == pytest.approx(16 / 256)
    assert g.momentum_spacing == pytest.approx(2 * math.pi / 16)
    assert np.all(np.diff(g.p) > 0)


def test_ground_state_matches_analytic(ground):
    x = ground.grid.x
    exact = math.pi ** -0.25 * np.exp(-x ** 2 / 2)
    assert np.max(np.abs(ground.amplitudes - exact)) < 1e-12
    assert ground.norm == pytest.approx(1.0, abs=1e-14)


def test_ground_state_rejects_narrow_grid():
    # density exp(-L^2) at the edge: L = 5 gives 1.4e-11 > 1e-12
    with pytest.raises(PreconditionError):
        make_ground_state(SpatialGrid(512, 5.0))
    make_ground_state(SpatialGrid(512, 5.3))


def test_ground_state_rejects_coarse_grid():
    with pytest.raises(PreconditionError):
        make_ground_state(SpatialGrid(16, 10.0))


def test_wavestate_norm_check(grid):
    with pytest.raises(PreconditionError):
        WaveState(grid, np.ones(grid.num_points, dtype=complex))
    with pytest.raises(PreconditionError):
        WaveState(grid, np.ones(10, dtype=complex))


def test_momentum_amplitudes_of_ground_state(ground):
    p, phi = momentum_amplitudes(ground)
    exact = math.pi ** -0.25 * np.exp(-p ** 2 / 2)
    assert np.max(np.abs(phi - exact)) < 1e-12


def test_momentum_round_trip(grid):
    psi = random_state(grid, np.random.default_rng(1))
    _, phi = momentum_amplitudes(WaveState(grid, psi))
    assert np.max(np.abs(position_amplitudes(grid, phi) - psi)) < 1e-12


@pytest.mark.parametrize("t", [0.0, 0.5, 1.5, 5.0])
def test_free_expansion_width_oracle(t):
    g = SpatialGrid(4096, 60.0)
    state = propagate_free(make_ground_state(g), t)
    s = summarize(state)
    assert s.dx == pytest.approx(math.sqrt((1 + t * t) / 2), rel=1e-6)
    assert s.dp == pytest.approx(1 / math.sqrt(2), rel=1e-6)


def test_free_expansion_amplitude_oracle():
    g = SpatialGrid(2048, 40.0)
    t = 2.0
    out = propagate_free(make_ground_state(g), t).amplitudes
    x = g.x
    exact = math.pi ** -0.25 / np.sqrt(1 + 1j * t) * np.exp(-x ** 2 / (2 * (1 + 1j * t)))
    assert np.max(np.abs(out - exact)) < 1e-10


def test_propagation_composes(grid):
    psi = WaveState(grid, random_state(grid, np.random.default_rng(2)))
    a = propagate_free(propagate_free(psi, 0.7), 0.4)
    b = propagate_free(psi, 1.1)
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 3.0), st.integers(0, 10_000))
def test_propagation_unitary(t, seed):
    g = SpatialGrid(1024, 20.0)
    state = WaveState(g, random_state(g, np.random.default_rng(seed)))
    assert abs(propagate_free(state, t).norm - 1.0) < 1e-10


def test_propagation_rejects_negative_time(ground):
    with pytest.raises(PreconditionError):
        propagate_free(ground, -0.1)


def test_grid_overflow_is_refused(ground):
    # L = 20 holds widths up to 20/6; the cloud reaches that near t ~ 4.6
    propagate_free(ground, 4.0)
    with pytest.raises(GridOverflowError):
        propagate_free(ground, 6.0)


def test_predicted_width_exact_for_chirped_state(grid):
    state = WaveState(grid, random_state(grid, np.random.default_rng(3), kick=0.0))
    t = 1.3
    assert predicted_width(state, t) == pytest.approx(summarize(propagate_free(state, t)).dx,
                                                      rel=1e-8)


def test_harmonic_kick_phase(ground):
    kicked = apply_harmonic_kick(ground, HarmonicKick(0.3))
    x = ground.grid.x
    assert np.allclose(kicked.amplitudes, ground.amplitudes * np.exp(-0.15j * x ** 2), atol=1e-15)


def test_gaussian_kick_phase(ground):
    seq = KickSequence.from_arrays([2.0], [3.0])
    kicked = apply_gaussian_kicks(ground, seq)
    x = ground.grid.x
    expected = ground.amplitudes * np.exp(-2.0j * (1 - np.exp(-x ** 2 / 18)))
    assert np.max(np.abs(kicked.amplitudes - expected)) < 1e-14


@pytest.mark.parametrize("spec", [KickSequence.from_arrays([5.0, -3.0, 1.0], [4.0, 3.0, 2.0]),
                                  HarmonicKick(0.7)])
def test_kicks_preserve_norm(ground, spec):
    assert abs(apply_kick(ground, spec).norm - 1.0) < 1e-13


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.floats(-30, 30), st.floats(0.5, 10)), min_size=2, max_size=4),
       st.integers(0, 10_000))
def test_kick_order_is_irrelevant(pairs, seed):
    g = SpatialGrid(1024, 20.0)
    state = WaveState(g, random_state(g, np.random.default_rng(seed)))
    kicks = [KickSequence.from_arrays([k], [s]) for k, s in pairs]
    results = []
    for order in itertools.permutations(range(len(kicks))):
        out = state
        for i in order:
            out = apply_gaussian_kicks(out, kicks[i])
        results.append(out.amplitudes)
    for r in results[1:]:
        assert np.max(np.abs(r - results[0])) < 1e-13


def test_kick_impulse_matches_profile():
    # a narrow packet at x0 picks up the local momentum change of the lens
    g = SpatialGrid(8192, 40.0)
    seq = KickSequence.from_arrays([8.0, -4.0], [5.0, 3.0])
    for x0 in (-4.0, 1.5, 6.0):
        psi = np.exp(-(g.x - x0) ** 2 / (4 * 0.05 ** 2))
        psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * g.spacing)
        out = summarize(apply_gaussian_kicks(WaveState(g, psi.astype(complex)), seq))
        assert out.mean_p == pytest.approx(float(impulse_profile(seq, x0)), abs=2e-3)


def test_auto_grid_holds_protocol():
    t = 5.0
    proto = ExpansionProtocol(t, harmonic_kick_strength(t))
    g = auto_grid(proto)
    assert g.half_extent == pytest.approx(8 / math.sqrt(2) * math.sqrt(1 + t * t))
    expanded, final = run_protocol(make_ground_state(g), proto)
    assert summarize(final).dp == pytest.approx(1 / math.sqrt(2 * (1 + t * t)), rel=1e-6)


def test_auto_grid_resource_limit():
    proto = ExpansionProtocol(1e4, KickSequence.from_arrays([1.0], [1e-3]))
    with pytest.raises(ResourceError):
        auto_grid(proto)
    assert MAX_POINTS == 2 ** 22
