import numpy as np
import pytest

from otocqsp.echo import qsp_otoc
from otocqsp.errors import BadPhaseCount, ConfigError, SynthesisFailed
from otocqsp.linalg import haar_unitary, stream_rng
from otocqsp.propagator import singular_spectrum, truncated_propagator
from otocqsp.qsp import (
    FilterSpec,
    PhaseSequence,
    cosine_harmonics,
    evaluate_cosine_series,
    filter_target_coeffs,
    fit_phases_to_cosine_series,
    qsp_response,
    response_batch,
    response_cheb_coeffs,
    smoothed_filter_target,
    synthesize_phases,
)

THETAS = np.linspace(0.0, np.pi, 100)


def otoc_sequence(k):
    """Interior pi/2 phases with zero front phase at depth d = 2k."""
    d = 2 * k
    return np.array([np.pi / 2] * (2 * d) + [0.0])


# --- response evaluation ----------------------------------------------------------


def test_zero_phases_give_unit_response():
    assert np.abs(response_batch(THETAS, np.zeros(7)) - 1.0).max() < 1e-14


def test_otoc_one_sequence_is_cos_two_theta():
    vals = response_batch(THETAS, otoc_sequence(1))
    assert np.abs(vals.real - np.cos(2 * THETAS)).max() < 1e-12
    assert np.abs(vals.imag).max() < 1e-12


def test_all_half_pi_closed_form():
    for d in range(1, 7):
        phases = np.array([np.pi / 2] * (2 * d) + [0.0])
        vals = response_batch(THETAS, phases).real
        expected = (-1.0) ** d * np.cos(d * THETAS)
        assert np.abs(vals - expected).max() < 1e-12


def test_response_bounded_by_one():
    rng = stream_rng(17)
    for d in (1, 3, 6):
        phases = rng.uniform(-np.pi, np.pi, 2 * d + 1)
        assert np.abs(response_batch(THETAS, phases)).max() <= 1.0 + 1e-12


def test_weighted_response_matches_full_circuit():
    u = haar_unitary(8, stream_rng(18))
    spec = singular_spectrum(truncated_propagator(u, 0, 2), "reference")
    rng = stream_rng(19)
    for d in (2, 3):
        phases = rng.uniform(-np.pi, np.pi, 2 * d + 1)
        spectral = complex(np.sum(spec.weights * response_batch(spec.thetas, phases)))
        circuit = qsp_otoc(u, 0, 2, phases)
        assert abs(spectral - circuit) < 1e-10


def test_scalar_wrapper_and_validation():
    assert abs(qsp_response(0.3, np.zeros(5)) - 1.0) < 1e-14
    with pytest.raises(BadPhaseCount):
        qsp_response(0.3, np.zeros(4))
    with pytest.raises(BadPhaseCount):
        PhaseSequence(np.array([0.1, np.nan, 0.2]))


# --- coefficient extraction --------------------------------------------------------


def test_cheb_coeffs_zero_phases():
    poly = response_cheb_coeffs(np.zeros(9))
    assert abs(poly.cheb_coefficients[0] - 1.0) < 1e-12
    assert np.abs(poly.cheb_coefficients[1:]).max() < 1e-12


def test_cheb_coeffs_otoc_one_sequence():
    poly = response_cheb_coeffs(otoc_sequence(1))
    coeffs = poly.cheb_coefficients
    assert coeffs.shape[0] == 5  # depth 2 covers T_0..T_4
    assert abs(coeffs[4] - 1.0) < 1e-12  # cos(2 theta) = T_4(lambda)
    mask = np.ones(5, dtype=bool)
    mask[4] = False
    assert np.abs(coeffs[mask]).max() < 1e-12


def test_cheb_coeffs_reconstruct_response():
    rng = stream_rng(23)
    phases = rng.uniform(-np.pi, np.pi, 11)
    harmonics = cosine_harmonics(phases, 5)
    dense = np.linspace(0.0, np.pi, 1000)
    recon = evaluate_cosine_series(harmonics, dense)
    assert np.abs(recon - response_batch(dense, phases).real).max() < 1e-9


def test_harmonics_above_depth_vanish():
    rng = stream_rng(29)
    for d in (2, 4):
        phases = rng.uniform(-np.pi, np.pi, 2 * d + 1)
        tail = cosine_harmonics(phases, 2 * d)[d + 1 :]
        assert np.abs(tail).max() < 1e-10


def test_response_polynomial_bounded():
    rng = stream_rng(37)
    poly = response_cheb_coeffs(rng.uniform(-np.pi, np.pi, 13))
    assert poly.max_abs_on_domain <= 1.0 + 1e-8


# --- filter targets -----------------------------------------------------------------


def test_filter_spec_validation():
    with pytest.raises(ConfigError):
        FilterSpec("bandstop", (0.5, 1.0), 0.1, 4)
    with pytest.raises(ConfigError):
        FilterSpec("bandpass", (1.0, 0.5), 0.1, 4)
    with pytest.raises(ConfigError):
        FilterSpec("lowpass", (0.5, 1.0), 0.1, 4)
    with pytest.raises(ConfigError):
        FilterSpec("bandpass", (0.5, 1.0), -0.1, 4)
    with pytest.raises(ConfigError):
        FilterSpec("bandpass", (0.5, 1.0), 0.1, 1)


def test_smoothed_target_shape():
    spec = FilterSpec("bandpass", (np.pi / 3, 2 * np.pi / 3), 0.15 * np.pi, 12)
    th = np.linspace(0.0, np.pi, 501)
    f = smoothed_filter_target(spec, th)
    assert f[0] == 0.0 and f[-1] == 0.0
    assert abs(f[250] - 1.0) < 1e-12  # center of the passband
    assert np.all(f >= 0.0) and np.all(f <= 1.0)


def test_truncated_target_is_capped():
    spec = FilterSpec("bandpass", (np.pi / 3, 2 * np.pi / 3), 0.15 * np.pi, 12)
    coeffs = filter_target_coeffs(spec)
    assert coeffs.shape[0] == 13
    dense = np.linspace(0.0, np.pi, 4001)
    assert np.abs(evaluate_cosine_series(coeffs, dense)).max() <= 0.99 + 1e-12


# --- synthesis ----------------------------------------------------------------------


def test_synthesize_all_pass_is_trivial():
    spec = FilterSpec("lowpass", (0.0, np.pi), 0.3, 3)
    phases, report = synthesize_phases(spec, seed=0)
    assert report.max_residual < 1e-10
    target = evaluate_cosine_series(filter_target_coeffs(spec), THETAS)
    assert np.abs(response_batch(THETAS, phases).real - target).max() < 1e-10


def test_synthesis_recovers_cos_two_theta():
    phases, report = fit_phases_to_cosine_series([0.0, 0.0, 1.0], 2, seed=0)
    dense = np.linspace(0.0, np.pi, 500)
    assert np.abs(response_batch(dense, phases).real - np.cos(2 * dense)).max() < 1e-8


def test_synthesis_bandpass_meets_threshold():
    spec = FilterSpec("bandpass", (np.pi / 3, 2 * np.pi / 3), 0.15 * np.pi, 12)
    phases, report = synthesize_phases(spec, seed=0)
    assert report.max_residual <= 1e-2
    assert phases.depth == 12


def test_synthesis_is_deterministic():
    spec = FilterSpec("lowpass", (0.0, np.pi / 2), 0.2 * np.pi, 6)
    a, ra = synthesize_phases(spec, seed=5)
    b, rb = synthesize_phases(spec, seed=5)
    assert np.array_equal(a.phases, b.phases)
    assert ra.max_residual == rb.max_residual


def test_synthesis_rejects_overdeep_target():
    with pytest.raises(ConfigError):
        fit_phases_to_cosine_series(np.ones(6), 3, seed=0)


def test_synthesis_failure_raises():
    spec = FilterSpec("bandpass", (np.pi / 3, 2 * np.pi / 3), 0.15 * np.pi, 4)
    with pytest.raises(SynthesisFailed):
        synthesize_phases(spec, seed=0, restarts=1, threshold=1e-16)


def test_report_serializes():
    spec = FilterSpec("lowpass", (0.0, np.pi), 0.3, 3)
    _, report = synthesize_phases(spec, seed=0)
    d = report.to_dict()
    assert d["kind"] == "lowpass"
    assert len(d["phases"]) == 7
    assert d["maxResidual"] == report.max_residual
