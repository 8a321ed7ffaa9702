import numpy as np
import pytest

from otocqsp.echo import EchoConfig, echo_operator, otoc_k, qsp_otoc
from otocqsp.errors import BadPhaseCount, InvalidOrder, NotUnitary
from otocqsp.hamiltonians import pauli_on_site
from otocqsp.linalg import haar_unitary, stream_rng
from otocqsp.propagator import chebyshev_moment, singular_spectrum, truncated_propagator


def test_echo_operator_identity_same_site():
    c = echo_operator(np.eye(4, dtype=complex), EchoConfig(1, 1))
    assert np.abs(c - np.eye(4)).max() < 1e-14


def test_echo_operator_identity_distinct_sites():
    c = echo_operator(np.eye(4, dtype=complex), EchoConfig(0, 1))
    expected = pauli_on_site("Z", 0, 2) @ pauli_on_site("Z", 1, 2)
    assert np.abs(c - expected).max() < 1e-14


def test_echo_operator_is_unitary():
    u = haar_unitary(16, stream_rng(2))
    c = echo_operator(u, EchoConfig(0, 3))
    assert np.abs(c.conj().T @ c - np.eye(16)).max() < 1e-10


def test_echo_operator_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        echo_operator(np.ones((4, 4), dtype=complex), EchoConfig(0, 1))


def test_echo_config_validates_labels():
    with pytest.raises(ValueError):
        EchoConfig(0, 1, b_operator="Q")


# --- otoc_k ---------------------------------------------------------------------


def test_otoc_identity_same_site_is_one():
    u = np.eye(8, dtype=complex)
    for k in (0.5, 1, 2, 3):
        assert abs(otoc_k(u, EchoConfig(1, 1), k) - 1.0) < 1e-14


def test_toc_identity_distinct_sites_is_one():
    u = np.eye(8, dtype=complex)
    assert abs(otoc_k(u, EchoConfig(0, 2), 0.5) - 1.0) < 1e-14


def test_otoc_matches_spectral_transform():
    # Independent oracle: the spectral side uses SVD phases and reference
    # weights, the direct side only matrix-vector products.
    u = haar_unitary(16, stream_rng(41))
    cfg = EchoConfig(0, 3)
    spec = singular_spectrum(truncated_propagator(u, 0, 3), "reference")
    for k in (1, 2, 3):
        direct = otoc_k(u, cfg, k)
        spectral = chebyshev_moment(spec, 4 * k)
        assert abs(direct - spectral) < 1e-10


def test_otoc_half_integer_matches_first_harmonic():
    u = haar_unitary(16, stream_rng(43))
    spec = singular_spectrum(truncated_propagator(u, 1, 2), "reference")
    direct = otoc_k(u, EchoConfig(1, 2), 0.5)
    assert abs(direct - chebyshev_moment(spec, 2)) < 1e-10


def test_otoc_bounded_and_real_for_zz():
    for seed in range(4):
        u = haar_unitary(16, stream_rng(60, seed))
        val = otoc_k(u, EchoConfig(0, 2), 2)
        assert abs(val) <= 1.0 + 1e-12
        assert abs(val.imag) < 1e-10


def test_otoc_rejects_invalid_order():
    u = np.eye(4, dtype=complex)
    for bad in (0, -1, 0.3, 0.75):
        with pytest.raises(InvalidOrder):
            otoc_k(u, EchoConfig(0, 1), bad)


def test_state_vector_path_matches_matrix_power():
    for n in range(2, 7):
        u = haar_unitary(2 ** n, stream_rng(80, n))
        cfg = EchoConfig(0, n - 1)
        c = echo_operator(u, cfg)
        psi = np.zeros(2 ** n, dtype=complex)
        psi[0] = 1.0
        for k in (1, 2):
            via_matrix = (np.linalg.matrix_power(c, 2 * k) @ psi)[0]
            assert abs(otoc_k(u, cfg, k) - via_matrix) < 1e-11


def test_non_pauli_bases_still_agree_with_matrix_path():
    u = haar_unitary(8, stream_rng(82))
    cfg = EchoConfig(0, 2, b_operator="X", m_operator="Y")
    c = echo_operator(u, cfg)
    psi = np.zeros(8, dtype=complex)
    psi[0] = 1.0
    expected = (np.linalg.matrix_power(c, 2) @ psi)[0]
    assert abs(otoc_k(u, cfg, 1) - expected) < 1e-11


# --- qsp_otoc ---------------------------------------------------------------------


def test_qsp_otoc_zero_phases_is_one():
    u = haar_unitary(8, stream_rng(90))
    for d in (1, 2, 4):
        phases = np.zeros(2 * d + 1)
        assert abs(qsp_otoc(u, 0, 2, phases) - 1.0) < 1e-12


def test_qsp_otoc_special_phases_reduce_to_otoc():
    u = haar_unitary(8, stream_rng(91))
    cfg = EchoConfig(0, 2)
    for k in (1, 2, 3):
        d = 2 * k
        phases = np.array([np.pi / 2] * (2 * d) + [0.0])
        assert abs(qsp_otoc(u, 0, 2, phases) - otoc_k(u, cfg, k)) < 1e-10


def test_qsp_otoc_matrix_product_oracle():
    # Full dense operator product with explicit Z-rotation matrices.
    n = 3
    u = haar_unitary(2 ** n, stream_rng(92))
    rng = stream_rng(93)
    phases = rng.uniform(-np.pi, np.pi, 7)
    i, j = 0, 2
    zi = pauli_on_site("Z", i, n)
    zj = pauli_on_site("Z", j, n)

    def rot(op, phi):
        return np.cos(phi) * np.eye(2 ** n) - 1j * np.sin(phi) * op

    total = np.eye(2 ** n, dtype=complex)
    for r in range(3):
        layer = u.conj().T @ rot(zi, phases[2 * r + 1]) @ u @ rot(zj, phases[2 * r])
        total = layer @ total
    total = rot(zi, phases[6]) @ total
    assert abs(qsp_otoc(u, i, j, phases) - total[0, 0]) < 1e-11


def test_qsp_otoc_bounded_and_periodic():
    u = haar_unitary(8, stream_rng(94))
    rng = stream_rng(95)
    phases = rng.uniform(-np.pi, np.pi, 9)
    base = qsp_otoc(u, 1, 2, phases)
    assert abs(base) <= 1.0 + 1e-12
    for idx in (0, 3, 8):
        shifted = phases.copy()
        shifted[idx] += 2 * np.pi
        assert abs(qsp_otoc(u, 1, 2, shifted) - base) < 1e-12


def test_qsp_otoc_rejects_even_phase_count():
    u = np.eye(4, dtype=complex)
    with pytest.raises(BadPhaseCount):
        qsp_otoc(u, 0, 1, np.zeros(6))
    with pytest.raises(BadPhaseCount):
        qsp_otoc(u, 0, 1, np.zeros(1))
