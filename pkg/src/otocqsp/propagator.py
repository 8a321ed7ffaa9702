"""Spatially resolved truncated propagator and its singular/phase spectrum.

The block A[r, c] = <0_i, r| U |0_j, c> maps the register of non-j qubits to
the register of non-i qubits.  Row index r enumerates the non-i qubits and
column index c the non-j qubits, each keeping the qubits in increasing bit
order.  The same block can be read off as the <0_i| . |0_i> corner of
U S_{j<->i}; that corner agrees with this one up to a relabeling of the
column register (singular values and left vectors are identical).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotUnitary, OddOrder, SiteOutOfRange
from .linalg import TOL, svd


def insert_zero_bit(index, position: int):
    """Embed reduced register indices by inserting a 0 bit at `position`."""
    index = np.asarray(index)
    low = index & ((1 << position) - 1)
    high = index >> position
    return (high << (position + 1)) | low


def _num_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2 ** n != dim:
        raise ValueError(f"matrix dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class TruncatedPropagator:
    """The 2^(N-1) x 2^(N-1) block of a unitary with sites i (sink) and j (source) fixed to |0>."""

    block: np.ndarray
    sink_site: int
    source_site: int
    time: float = 0.0
    model_tag: str = ""


@dataclass(frozen=True)
class SingularSpectrum:
    """Singular values, their phases theta = 2 arccos(lambda), and spectral weights."""

    lambdas: np.ndarray
    thetas: np.ndarray
    weights: np.ndarray
    weight_kind: str


@dataclass(frozen=True)
class PhaseHistogram:
    """Weighted histogram of theta on uniform bins over [0, pi]; densities integrate to 1."""

    bin_edges: np.ndarray
    densities: np.ndarray


def truncated_propagator(
    u: np.ndarray,
    i: int,
    j: int,
    *,
    time: float = 0.0,
    model_tag: str = "",
    validate: bool = True,
) -> TruncatedPropagator:
    """Extract A_{i,j} = <0_i| U |0_j> from a 2^N x 2^N unitary.

    i = j is allowed (self block).  `validate=False` skips the O(D^3)
    unitarity check for callers that construct U by eigenbasis evolution.
    """
    u = np.asarray(u)
    n = _num_qubits(u.shape[0])
    if u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    if not (0 <= i < n and 0 <= j < n):
        raise SiteOutOfRange(f"sites ({i}, {j}) outside [0, {n})")
    if validate:
        defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
        if defect > TOL.unitarity:
            raise NotUnitary(f"max |U^dag U - I| = {defect:.3e} exceeds {TOL.unitarity:.0e}")
    half = np.arange(2 ** (n - 1))
    rows = insert_zero_bit(half, i)
    cols = insert_zero_bit(half, j)
    block = u[np.ix_(rows, cols)].copy()
    return TruncatedPropagator(block=block, sink_site=i, source_site=j, time=time, model_tag=model_tag)


def singular_spectrum(prop: TruncatedPropagator, weighting: str = "uniform") -> SingularSpectrum:
    """Singular values of the block with phases and weights.

    weighting="uniform" gives 1/D per value (the intrinsic distribution);
    weighting="reference" weights each value by the |0...0> component of its
    input-side (right) singular vector, which is what the echo-circuit
    expectation in the |0^N> reference state actually averages over.
    """
    if weighting not in ("uniform", "reference"):
        raise ValueError(f"weighting must be 'uniform' or 'reference', got {weighting!r}")
    result = svd(prop.block)
    sigma = result.singular_values
    overshoot = sigma.max(initial=0.0) - 1.0
    if overshoot > TOL.singular_clamp:
        raise NotUnitary(
            f"singular value exceeds 1 by {overshoot:.3e}; the source matrix is not unitary"
        )
    lambdas = np.clip(sigma, 0.0, 1.0)
    thetas = 2.0 * np.arccos(lambdas)
    if weighting == "uniform":
        weights = np.full(lambdas.shape[0], 1.0 / lambdas.shape[0])
    else:
        weights = np.abs(result.right_adjoint[:, 0]) ** 2
    return SingularSpectrum(lambdas=lambdas, thetas=thetas, weights=weights, weight_kind=weighting)


def phase_histogram(spectrum: SingularSpectrum, nbins: int = 64) -> PhaseHistogram:
    """Weighted histogram of theta over [0, pi]; endpoints land in the first/last bin."""
    if nbins < 2:
        raise ValueError(f"nbins must be >= 2, got {nbins}")
    masses, edges = np.histogram(
        spectrum.thetas, bins=nbins, range=(0.0, np.pi), weights=spectrum.weights
    )
    width = np.pi / nbins
    return PhaseHistogram(bin_edges=edges, densities=masses / width)


def chebyshev_moment(spectrum: SingularSpectrum, order: int) -> float:
    """Weighted Chebyshev moment sum_l w_l T_order(lambda_l).

    Evaluated in trigonometric form sum_l w_l cos((order/2) theta_l), which
    is exact because T_m(cos x) = cos(m x) and avoids high-degree polynomial
    roundoff.  order = 2 with reference weights is the TOC; order = 4k is
    the k-th out-of-time-order correlator.
    """
    if not isinstance(order, (int, np.integer)) or order < 2 or order % 2 != 0:
        raise OddOrder(f"order must be a positive even integer >= 2, got {order}")
    return float(np.sum(spectrum.weights * np.cos((order / 2) * spectrum.thetas)))
