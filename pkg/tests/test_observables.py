import math

import numpy as np
import pytest

from oscilab.coherent import (
    CoherentLabel,
    auto_n_max,
    coherent_coefficients,
    dynamical_coherent_state,
    evolve_label,
)
from oscilab.fock import (
    NormalizationError,
    OscillatorParams,
    StateVector,
    TruncationWarning,
    fock_state,
    random_state,
)
from oscilab.observables import (
    RECORD_COLUMNS,
    _variance,
    averages_bruteforce,
    averages_closedform,
    record_object,
    record_row,
    uncertainty_fock,
)

PARAMS = OscillatorParams()


def test_fock_state_record():
    rec = averages_bruteforce(fock_state(3, 12), PARAMS)
    assert rec.mean_x == 0.0
    assert rec.mean_p == 0.0
    assert rec.uncertainty == pytest.approx(3.5, abs=1e-10)
    assert rec.n_avg == pytest.approx(3.0, abs=1e-12)
    assert rec.energy == pytest.approx(3.5, abs=1e-12)
    assert rec.a_avg == 0
    assert rec.a2_avg == 0


def test_ground_state_reaches_uncertainty_floor():
    rec = averages_bruteforce(fock_state(0, 8), PARAMS)
    assert rec.uncertainty == pytest.approx(0.5, abs=1e-12)


def test_coherent_occupation_matches_label():
    rec = averages_bruteforce(coherent_coefficients(CoherentLabel(2), 64), PARAMS)
    assert rec.n_avg == pytest.approx(4.0, abs=1e-10)


def test_closedform_values_at_zero_time():
    rec = averages_closedform(CoherentLabel(1), 0.0, PARAMS)
    assert rec.mean_x == pytest.approx(math.sqrt(2), rel=1e-15)
    assert rec.mean_p == 0.0
    assert rec.uncertainty == 0.5
    assert rec.a_avg == 1 + 0j


def test_closedform_energy():
    for t in (0.0, 0.9, 17.3):
        rec = averages_closedform(CoherentLabel(1 + 1j), t, PARAMS)
        assert rec.energy == pytest.approx(2.5, rel=1e-15)
        assert rec.uncertainty == 0.5


@pytest.mark.parametrize("chi", [0.5, 1, 2j, 1 + 1j, -1.5])
@pytest.mark.parametrize("t", [0.0, 0.3, 1.7, 2 * math.pi])
def test_closed_and_brute_force_agree_fieldwise(chi, t):
    label = CoherentLabel(chi)
    n_max = auto_n_max(label, tol=1e-14) + 2
    state = dynamical_coherent_state(label, t, PARAMS, n_max)
    brute = record_row(averages_bruteforce(state, PARAMS))
    closed = record_row(averages_closedform(label, t, PARAMS))
    np.testing.assert_allclose(brute, closed, atol=1e-9, rtol=0)


def test_bruteforce_energy_time_independent():
    from oscilab.dynamics import propagate_fock

    label = CoherentLabel(1.5j)
    base = coherent_coefficients(label, auto_n_max(label) + 2)
    energies = [
        averages_bruteforce(propagate_fock(base, t, PARAMS), PARAMS).energy
        for t in np.linspace(0.0, 4 * math.pi, 100)
    ]
    assert max(energies) - min(energies) < 1e-10


@pytest.mark.parametrize(
    "params", [OscillatorParams(), OscillatorParams(2.0, 0.5, 3.0)]
)
def test_energy_partition_between_kinetic_and_potential(params):
    label = CoherentLabel(1 - 0.8j)
    for t in (0.0, 0.6):
        rec = averages_closedform(label, t, params)
        split = rec.mean_p2 / (2 * params.mass) + (
            0.5 * params.mass * params.omega**2
        ) * rec.mean_x2
        assert rec.energy == pytest.approx(split, abs=1e-10)
        n_max = auto_n_max(label) + 2
        brute = averages_bruteforce(
            dynamical_coherent_state(label, t, params, n_max), params
        )
        split_brute = brute.mean_p2 / (2 * params.mass) + (
            0.5 * params.mass * params.omega**2
        ) * brute.mean_x2
        assert brute.energy == pytest.approx(split_brute, abs=1e-10)


@pytest.mark.filterwarnings("ignore::oscilab.fock.TruncationWarning")
def test_uncertainty_floor_for_random_states():
    # random states legitimately occupy the top levels; the edge warning is expected
    rng = np.random.default_rng(42)
    for _ in range(200):
        rec = averages_bruteforce(random_state(20, rng), PARAMS)
        assert rec.uncertainty >= 0.5 - 1e-9
        assert rec.mean_x2 >= rec.mean_x**2 - 1e-12
        assert rec.mean_p2 >= rec.mean_p**2 - 1e-12


def test_pair_average_is_square_of_single_for_coherent_only():
    label = CoherentLabel(1.2 + 0.5j)
    rec = averages_bruteforce(coherent_coefficients(label, 40), PARAMS)
    assert abs(rec.a2_avg - rec.a_avg**2) < 1e-10
    # a generic superposition does not factorize
    mixed = StateVector(np.array([1, 1, 0, 0], dtype=complex) / math.sqrt(2))
    rec = averages_bruteforce(mixed, PARAMS)
    assert abs(rec.a2_avg - rec.a_avg**2) > 0.1


def test_unnormalized_state_rejected_with_measured_norm():
    doubled = StateVector(2.0 * fock_state(1, 6).coeffs)
    with pytest.raises(NormalizationError) as excinfo:
        averages_bruteforce(doubled, PARAMS)
    assert excinfo.value.norm == pytest.approx(2.0, rel=1e-12)


def test_top_heavy_state_warns_about_truncation():
    with pytest.warns(TruncationWarning):
        averages_bruteforce(fock_state(12, 12), PARAMS)


def test_uncertainty_fock_formula():
    assert uncertainty_fock(0, PARAMS) == 0.5
    assert uncertainty_fock(3, PARAMS) == 3.5
    assert uncertainty_fock(3, OscillatorParams(hbar=3.0)) == 10.5
    with pytest.raises(ValueError):
        uncertainty_fock(-1, PARAMS)


@pytest.mark.parametrize("n", range(11))
def test_uncertainty_fock_matches_bruteforce(n):
    rec = averages_bruteforce(fock_state(n, 13), PARAMS)
    assert rec.uncertainty == pytest.approx(uncertainty_fock(n, PARAMS), abs=1e-10)


def test_variance_clipping_policy():
    assert _variance(1.0, 1.0) == 0.0
    assert _variance(4.0, 2.0 + 1e-13) == 0.0  # rounding-level negativity clips
    with pytest.raises(ValueError):
        _variance(4.0, 2.0 + 1e-5)  # real negativity is an error


def test_record_serialization_schema():
    rec = averages_closedform(CoherentLabel(1j), 0.25, PARAMS)
    obj = record_object(rec)
    assert tuple(obj) == RECORD_COLUMNS
    row = record_row(rec)
    assert row[RECORD_COLUMNS.index("a_avg_re")] == rec.a_avg.real
    assert row[RECORD_COLUMNS.index("a_avg_im")] == rec.a_avg.imag


def test_closedform_anomalous_averages_track_label():
    label = CoherentLabel(0.7 - 1.1j)
    for t in (0.0, 2.1):
        rec = averages_closedform(label, t, PARAMS)
        chit = evolve_label(label, t, PARAMS).chi
        assert rec.a_avg == pytest.approx(chit, abs=1e-15)
        assert rec.a2_avg == pytest.approx(chit * chit, abs=1e-15)
        assert rec.n_avg == pytest.approx(label.nbar, abs=1e-15)
