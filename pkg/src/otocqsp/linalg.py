"""Dense complex linear-algebra core.

Everything downstream runs on four primitives: Hermitian eigendecomposition,
eigenbasis time evolution, singular value decomposition, and seedable Haar
sampling.  All functions are pure and outputs are safe to share across
threads; parallelism happens in the caller.

Conventions fixed here and shared by every module:
  * qubit 0 is the least-significant bit of a basis-state index,
  * matrices are complex128, row-major,
  * randomness flows through counter-based Philox streams so that runs are
    reproducible and parallel-safe.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianInput, NumericalFailure


@dataclass(frozen=True)
class Tolerances:
    """Central tolerance budget used by validation checks across modules."""

    hermiticity: float = 1e-12
    unitarity: float = 1e-10
    reconstruction: float = 1e-9
    singular_clamp: float = 1e-10
    weight_sum: float = 1e-10


TOL = Tolerances()

_COUNT_LOCK = threading.Lock()
_CALL_COUNTS = {"eigh": 0}


def eigh_call_count() -> int:
    """Number of Hermitian eigendecompositions since the last reset (test instrumentation)."""
    with _COUNT_LOCK:
        return _CALL_COUNTS["eigh"]


def reset_call_counts() -> None:
    with _COUNT_LOCK:
        for key in _CALL_COUNTS:
            _CALL_COUNTS[key] = 0


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent, reproducible random stream derived from (seed, stream).

    Built on Philox so distinct streams never overlap and draws are
    bit-identical across runs and platforms for the same arguments.
    """
    bitgen = np.random.Philox(key=int(seed))
    if stream:
        bitgen = bitgen.jumped(int(stream))
    return np.random.Generator(bitgen)


def as_generator(rng: int | np.random.Generator) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return stream_rng(int(rng))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""

    energies: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.shape[0]


@dataclass(frozen=True)
class SVDResult:
    """A = left @ diag(singular_values) @ right_adjoint with descending values."""

    left: np.ndarray
    singular_values: np.ndarray
    right_adjoint: np.ndarray


def hermiticity_defect(h: np.ndarray) -> float:
    """Largest entrywise deviation |H - H^dagger|."""
    return float(np.abs(h - h.conj().T).max())


def hermitian_eigendecompose(h: np.ndarray) -> SpectralDecomposition:
    """Diagonalize a Hermitian matrix; energies ascending, vector columns orthonormal."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > TOL.hermiticity:
        raise NonHermitianInput(f"max |H - H^dagger| = {defect:.3e} exceeds {TOL.hermiticity:.0e}")
    try:
        energies, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    with _COUNT_LOCK:
        _CALL_COUNTS["eigh"] += 1
    return SpectralDecomposition(energies=energies, vectors=vectors.astype(complex))


def evolve(spec: SpectralDecomposition, t: float) -> np.ndarray:
    """Unitary exp(-i H t) from a precomputed decomposition of H.

    One diagonalization serves an entire time grid; each call is two dense
    matrix products.
    """
    phases = np.exp(-1j * spec.energies * float(t))
    return (spec.vectors * phases) @ spec.vectors.conj().T


def svd(a: np.ndarray) -> SVDResult:
    """Full SVD with descending, nonnegative singular values."""
    a = np.asarray(a, dtype=complex)
    try:
        left, sigma, right_adjoint = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    return SVDResult(left=left, singular_values=sigma, right_adjoint=right_adjoint)


def haar_unitary(dim: int, rng: int | np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary of the given dimension.

    Ginibre matrix, QR factorization, then the R-diagonal phase correction;
    without the correction the QR output is not Haar.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    gen = as_generator(rng)
    ginibre = (gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(ginibre)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the left factor acts on the higher-order bits."""
    return np.kron(a, b)
