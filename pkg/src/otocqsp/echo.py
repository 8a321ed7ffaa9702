"""Direct circuit-level echo evaluation.

Ground truth for everything spectral: the echo operator C = U^dag B_i U M_j
is applied to the |0^N> state vector explicitly, with no reference to
singular values.  Cost is one dense matrix-vector product per U or U^dag
application, so high orders stay cheap; the full matrix-power route exists
only for small-N cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadPhaseCount, InvalidOrder, NotUnitary, SiteOutOfRange
from .linalg import TOL
from .hamiltonians import pauli_on_site


@dataclass(frozen=True)
class EchoConfig:
    """Probe site i, measurement site j, and the two single-qubit Paulis."""

    probe_site: int
    measure_site: int
    b_operator: str = "Z"
    m_operator: str = "Z"

    def __post_init__(self):
        for label in (self.b_operator, self.m_operator):
            if label not in ("X", "Y", "Z"):
                raise ValueError(f"operator labels must be X, Y or Z, got {label!r}")
        if self.probe_site < 0 or self.measure_site < 0:
            raise SiteOutOfRange("site indices must be nonnegative")


def _check_sites(n: int, *sites: int) -> None:
    for s in sites:
        if not 0 <= s < n:
            raise SiteOutOfRange(f"site {s} outside [0, {n})")


def _check_unitary(u: np.ndarray) -> None:
    defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if defect > TOL.unitarity:
        raise NotUnitary(f"max |U^dag U - I| = {defect:.3e} exceeds {TOL.unitarity:.0e}")


def _apply_pauli(psi: np.ndarray, label: str, site: int) -> np.ndarray:
    m = psi.reshape(-1, 2, 1 << site)
    if label == "X":
        out = m[:, ::-1, :]
    elif label == "Y":
        out = np.stack((-1j * m[:, 1, :], 1j * m[:, 0, :]), axis=1)
    else:
        out = np.stack((m[:, 0, :], -m[:, 1, :]), axis=1)
    return np.ascontiguousarray(out).reshape(psi.shape)


def _apply_z_rotation(psi: np.ndarray, phi: float, site: int) -> np.ndarray:
    """exp(-i phi Z_site) applied to a state vector."""
    m = psi.reshape(-1, 2, 1 << site)
    out = np.stack((np.exp(-1j * phi) * m[:, 0, :], np.exp(1j * phi) * m[:, 1, :]), axis=1)
    return np.ascontiguousarray(out).reshape(psi.shape)


def _num_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2 ** n != dim:
        raise ValueError(f"matrix dimension {dim} is not a power of two")
    return n


def echo_operator(u: np.ndarray, cfg: EchoConfig, *, validate: bool = True) -> np.ndarray:
    """Explicit matrix U^dag B_i U M_j."""
    u = np.asarray(u)
    n = _num_qubits(u.shape[0])
    _check_sites(n, cfg.probe_site, cfg.measure_site)
    if validate:
        _check_unitary(u)
    b = pauli_on_site(cfg.b_operator, cfg.probe_site, n)
    m = pauli_on_site(cfg.m_operator, cfg.measure_site, n)
    return u.conj().T @ b @ u @ m


def otoc_k(u: np.ndarray, cfg: EchoConfig, k, *, validate: bool = True) -> complex:
    """<0^N| C^{2k} |0^N> by repeated application of C to the state vector.

    k is a half-integer with 2k a positive integer; k = 1/2 is the
    time-ordered correlator.
    """
    two_k_float = 2.0 * float(k)
    two_k = int(round(two_k_float))
    if abs(two_k_float - two_k) > 1e-9 or two_k < 1:
        raise InvalidOrder(f"2k must be a positive integer, got k = {k}")
    u = np.asarray(u)
    n = _num_qubits(u.shape[0])
    _check_sites(n, cfg.probe_site, cfg.measure_site)
    if validate:
        _check_unitary(u)
    u_dag = u.conj().T
    psi = np.zeros(u.shape[0], dtype=complex)
    psi[0] = 1.0
    for _ in range(two_k):
        psi = _apply_pauli(psi, cfg.m_operator, cfg.measure_site)
        psi = u @ psi
        psi = _apply_pauli(psi, cfg.b_operator, cfg.probe_site)
        psi = u_dag @ psi
    return complex(psi[0])


def qsp_otoc(u: np.ndarray, i: int, j: int, phases, *, validate: bool = True) -> complex:
    """Generalized echo with tunable Z-rotations in place of Pauli flips.

    phases has odd length 2d + 1; layer r = 0..d-1 applies
    U^dag e^{-i phi_{2r+1} Z_i} U e^{-i phi_{2r} Z_j} (rightmost factor
    first), and the front rotation e^{-i phi_{2d} Z_i} closes the sequence.
    """
    phi = np.asarray(getattr(phases, "phases", phases), dtype=float)
    if phi.ndim != 1 or phi.shape[0] < 3 or phi.shape[0] % 2 == 0:
        raise BadPhaseCount(f"phase sequence must have odd length >= 3, got {phi.shape}")
    u = np.asarray(u)
    n = _num_qubits(u.shape[0])
    _check_sites(n, i, j)
    if validate:
        _check_unitary(u)
    depth = (phi.shape[0] - 1) // 2
    u_dag = u.conj().T
    psi = np.zeros(u.shape[0], dtype=complex)
    psi[0] = 1.0
    for r in range(depth):
        psi = _apply_z_rotation(psi, phi[2 * r], j)
        psi = u @ psi
        psi = _apply_z_rotation(psi, phi[2 * r + 1], i)
        psi = u_dag @ psi
    psi = _apply_z_rotation(psi, phi[2 * depth], i)
    return complex(psi[0])
