import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import poisson

from oscilab.coherent import (
    CoherentLabel,
    annihilation_residual,
    auto_n_max,
    coherent_coefficients,
    dynamical_coherent_state,
    evolve_label,
    occupation_probability,
    truncation_tail,
)
from oscilab.fock import DimensionMismatchError, OscillatorParams, make_ladder

PARAMS = OscillatorParams()


def poisson_tail_direct(lam: float, n_max: int, terms: int = 400) -> float:
    """Independent tail oracle: log-space term-by-term summation."""
    return sum(
        math.exp(-lam + n * math.log(lam) - math.lgamma(n + 1))
        for n in range(n_max + 1, n_max + 1 + terms)
    )


def test_vacuum_label_is_ground_state():
    state = coherent_coefficients(CoherentLabel(0), 5)
    np.testing.assert_array_equal(state.coeffs, [1, 0, 0, 0, 0, 0])
    assert state.time == 0.0


def test_single_level_amplitude():
    state = coherent_coefficients(CoherentLabel(1), 0)
    assert state.coeffs[0] == pytest.approx(0.6065306597126334, rel=1e-15)


def test_norm_is_one_minus_tail():
    label = CoherentLabel(1)
    state = coherent_coefficients(label, 64)
    assert state.norm() ** 2 == pytest.approx(1.0, abs=1e-12)
    # cross-check against the direct tail sum at a leakier truncation
    leaky = coherent_coefficients(CoherentLabel(2.3 + 0.4j), 12)
    lam = abs(2.3 + 0.4j) ** 2
    assert leaky.norm() ** 2 == pytest.approx(
        1.0 - poisson_tail_direct(lam, 12), abs=1e-13
    )


@pytest.mark.parametrize("chi", [0.5, 1 + 1j, 2j, -2.5, 3.9])
def test_amplitudes_squared_are_poisson(chi):
    label = CoherentLabel(chi)
    state = coherent_coefficients(label, 48)
    probs = np.abs(state.coeffs) ** 2
    for n in range(49):
        expected = occupation_probability(label, n)
        if expected > 1e-300:
            assert probs[n] == pytest.approx(expected, rel=1e-12)


def test_occupation_probability_against_scipy():
    for chi in (0.7, 1.5j, 2 - 1j):
        label = CoherentLabel(chi)
        lam = label.nbar
        for n in (0, 1, 5, 20, 300):
            assert occupation_probability(label, n) == pytest.approx(
                float(poisson.pmf(n, lam)), rel=1e-10, abs=1e-300
            )


def test_occupation_probability_values():
    assert occupation_probability(CoherentLabel(1), 0) == pytest.approx(
        0.36787944117144233, rel=1e-15
    )
    assert occupation_probability(CoherentLabel(0), 0) == 1.0
    assert occupation_probability(CoherentLabel(0), 3) == 0.0
    # |chi|^2 = 4 puts the distribution mode at a 3-4 tie
    label = CoherentLabel(2)
    assert occupation_probability(label, 4) == pytest.approx(
        occupation_probability(label, 3), rel=1e-13
    )
    probs = [occupation_probability(label, n) for n in range(30)]
    assert {int(np.argmax(probs))} <= {3, 4}


def test_truncation_tail_values():
    assert truncation_tail(CoherentLabel(0), 0) == 0.0
    assert truncation_tail(CoherentLabel(0), 17) == 0.0
    assert truncation_tail(CoherentLabel(1), 0) == pytest.approx(
        0.6321205588285577, rel=1e-14
    )


def test_truncation_tail_matches_direct_sum():
    for chi, n_max in ((1.6, 10), (3j, 12), (0.4 - 0.2j, 3)):
        label = CoherentLabel(chi)
        assert truncation_tail(label, n_max) == pytest.approx(
            poisson_tail_direct(label.nbar, n_max), rel=1e-10
        )


def test_truncation_tail_monotone_nonincreasing():
    label = CoherentLabel(1.7 + 0.3j)
    tails = [truncation_tail(label, n) for n in range(40)]
    assert all(t2 <= t1 for t1, t2 in zip(tails, tails[1:]))


@pytest.mark.parametrize("chi", [0.3, 1 + 1j, -2.2 + 0.1j])
@pytest.mark.parametrize("n_max", [8, 32])
def test_norm_plus_tail_partition_of_unity(chi, n_max):
    label = CoherentLabel(chi)
    norm2 = coherent_coefficients(label, n_max).norm() ** 2
    assert norm2 + truncation_tail(label, n_max) == pytest.approx(1.0, abs=1e-12)


def test_evolve_label_identity_and_half_turn():
    label = CoherentLabel(1)
    assert evolve_label(label, 0.0, PARAMS).chi == label.chi
    assert evolve_label(label, math.pi, PARAMS).chi == pytest.approx(-1.0, abs=1e-15)


@settings(deadline=None)
@given(
    re=st.floats(-4, 4),
    im=st.floats(-4, 4),
    t=st.floats(-50, 50),
)
def test_evolve_label_preserves_modulus(re, im, t):
    label = CoherentLabel(complex(re, im))
    evolved = evolve_label(label, t, PARAMS)
    assert abs(evolved.chi) == pytest.approx(abs(label.chi), abs=1e-12)


def test_dynamical_state_at_zero_time():
    label = CoherentLabel(0.8 - 0.6j)
    np.testing.assert_array_equal(
        dynamical_coherent_state(label, 0.0, PARAMS, 20).coeffs,
        coherent_coefficients(label, 20).coeffs,
    )


def test_dynamical_state_populations_frozen():
    label = CoherentLabel(1.3j)
    base = np.abs(coherent_coefficients(label, 24).coeffs) ** 2
    for t in (0.1, 1.7, 12.0):
        now = np.abs(dynamical_coherent_state(label, t, PARAMS, 24).coeffs) ** 2
        assert abs(np.sum(now) - np.sum(base)) < 1e-14
        np.testing.assert_allclose(now, base, atol=1e-15)


def test_dynamical_state_full_period_global_phase():
    # at omega t = 2 pi every level phase is exp(-i 2 pi (n + 1/2)) = -1
    label = CoherentLabel(1)
    t0 = coherent_coefficients(label, 32).coeffs
    evolved = dynamical_coherent_state(label, 2 * math.pi, PARAMS, 32).coeffs
    np.testing.assert_allclose(evolved, -t0, atol=1e-12)


@pytest.mark.parametrize("chi", [0.5, 1 + 1j, 2j])
@pytest.mark.parametrize("t", [0.0, 0.4, 3.9])
def test_dynamical_state_is_evolved_label_times_global_phase(chi, t):
    label = CoherentLabel(chi)
    dcs = dynamical_coherent_state(label, t, PARAMS, 40).coeffs
    rotated = coherent_coefficients(evolve_label(label, t, PARAMS), 40).coeffs
    global_phase = np.exp(-0.5j * PARAMS.omega * t)
    np.testing.assert_allclose(dcs, global_phase * rotated, atol=1e-12)


def test_annihilation_residual_vacuum_exact_zero():
    a, _ = make_ladder(6)
    label = CoherentLabel(0)
    assert annihilation_residual(coherent_coefficients(label, 6), label, a) == 0.0


def test_annihilation_residual_well_truncated():
    label = CoherentLabel(1)
    state = coherent_coefficients(label, 64)
    a, _ = make_ladder(64)
    residual = annihilation_residual(state, label, a)
    bound = abs(state.coeffs[-1]) * math.sqrt(65)
    assert residual < 1e-10
    # the analytic bound binds only above the matrix-product rounding floor
    assert residual <= bound + 1e-14


def test_annihilation_residual_under_truncated():
    label = CoherentLabel(3)
    a, _ = make_ladder(12)
    assert annihilation_residual(coherent_coefficients(label, 12), label, a) > 0.01


@pytest.mark.parametrize("chi", [1, 2j, 1 + 1j])
def test_annihilation_residual_decays_at_tail_bound_rate(chi):
    noise_floor = 1e-13  # rounding of the matrix product; decay saturates here
    label = CoherentLabel(chi)
    residuals = []
    for n_max in (16, 32, 64):
        state = coherent_coefficients(label, n_max)
        a, _ = make_ladder(n_max)
        residual = annihilation_residual(state, label, a)
        bound = abs(state.coeffs[-1]) * math.sqrt(n_max + 1)
        assert residual <= max(bound * (1 + 1e-9), noise_floor)
        residuals.append(residual)
    for r1, r2 in zip(residuals, residuals[1:]):
        assert r2 <= max(r1, noise_floor)


def test_annihilation_residual_dimension_mismatch():
    a, _ = make_ladder(5)
    label = CoherentLabel(1)
    with pytest.raises(DimensionMismatchError):
        annihilation_residual(coherent_coefficients(label, 8), label, a)


def test_auto_n_max_minimality():
    label = CoherentLabel(1.3 - 0.7j)
    n = auto_n_max(label)
    assert truncation_tail(label, n) < 1e-12
    assert truncation_tail(label, n - 1) >= 1e-12


def test_auto_n_max_edge_cases():
    assert auto_n_max(CoherentLabel(0)) == 0
    assert auto_n_max(CoherentLabel(40)) == 1024  # capped
    assert auto_n_max(CoherentLabel(1), tol=1e-18) > auto_n_max(CoherentLabel(1))


def test_label_requires_finite_value():
    with pytest.raises(ValueError):
        CoherentLabel(complex(float("nan"), 0))
