"""Analytic free-fermion limit of the truncated-propagator spectrum.

For quadratic hopping the many-body block A_{i,j}(t) has exactly two distinct
singular values, 1 and |G_ji(t)| with G(t) = exp(-i h t), each with
multiplicity 2^(N-2).  This module is the cheap oracle the many-body pipeline
is validated against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EqualSites, SiteOutOfRange
from .linalg import evolve, hermitian_eigendecompose
from .propagator import SingularSpectrum


@dataclass(frozen=True)
class SingleParticlePropagator:
    """G(t) = exp(-i h t) for an N x N hopping matrix h."""

    matrix: np.ndarray
    time: float


def single_particle_propagator(hopping: np.ndarray, t: float) -> SingleParticlePropagator:
    spec = hermitian_eigendecompose(np.asarray(hopping, dtype=complex))
    return SingleParticlePropagator(matrix=evolve(spec, t), time=float(t))


def analytic_truncated_spectrum(
    g: SingleParticlePropagator, i: int, j: int, num_sites: int
) -> SingularSpectrum:
    """Closed-form singular spectrum {1, |G_ji|} with multiplicities 2^(N-2)."""
    n = g.matrix.shape[0]
    if num_sites != n:
        raise ValueError(f"num_sites {num_sites} does not match propagator dimension {n}")
    if not (0 <= i < n and 0 <= j < n):
        raise SiteOutOfRange(f"sites ({i}, {j}) outside [0, {n})")
    if i == j:
        raise EqualSites("the closed form applies to distinct sites")
    amp = min(abs(g.matrix[j, i]), 1.0)
    mult = 2 ** (num_sites - 2)
    lambdas = np.concatenate([np.ones(mult), np.full(mult, amp)])
    thetas = 2.0 * np.arccos(lambdas)
    weights = np.full(2 * mult, 1.0 / (2 * mult))
    return SingularSpectrum(lambdas=lambdas, thetas=thetas, weights=weights, weight_kind="uniform")


def overlay_series(hopping: np.ndarray, i: int, j: int, times) -> tuple:
    """(t, |G_ji|, theta) arrays for the oscillation trace of the (i, j) pair."""
    n = np.asarray(hopping).shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise SiteOutOfRange(f"sites ({i}, {j}) outside [0, {n})")
    if i == j:
        raise EqualSites("overlay series is defined for distinct sites")
    spec = hermitian_eigendecompose(np.asarray(hopping, dtype=complex))
    times = np.asarray(times, dtype=float)
    amps = np.empty_like(times)
    for idx, t in enumerate(times):
        amps[idx] = min(abs(evolve(spec, t)[j, i]), 1.0)
    return times, amps, 2.0 * np.arccos(amps)
