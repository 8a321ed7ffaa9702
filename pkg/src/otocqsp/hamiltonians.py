"""Benchmark spin-chain Hamiltonians and single-site/bond operators.

All chains are open: bond sums run over i = 0..N-2, field sums over every
site.  Basis convention: qubit 0 is the least-significant bit of the basis
index, |0> is the Z = +1 state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    EqualSites,
    MissingDisorder,
    SiteOutOfRange,
    UnknownFamily,
    WrongFamily,
)
from .linalg import kron, stream_rng

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

FAMILIES = ("ChaoticXYZ", "XXZ", "MBLHeisenberg", "FreeFermionXX")

COUPLING_FIELDS = {
    "ChaoticXYZ": ("Jx", "Jy", "Jz", "h"),
    "XXZ": ("J", "Delta", "h"),
    "MBLHeisenberg": ("J", "h"),
    "FreeFermionXX": ("J",),
}

# The XX spin bond J(XX + YY) maps under Jordan-Wigner to 2J(c^dag_i c_{i+1} + h.c.);
# the factor is pinned by the single-excitation test, not assumed.
SPIN_TO_HOPPING = 2.0


@dataclass(frozen=True)
class ModelSpec:
    """One of the four benchmark families with its couplings.

    MBLHeisenberg interprets couplings["h"] as the disorder bound; the
    on-site fields themselves live in a DisorderRealization.
    """

    family: str
    couplings: dict
    num_sites: int
    boundary: str = "open"
    disorder_seed: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnknownFamily(f"unknown model family {self.family!r}; expected one of {FAMILIES}")
        if self.num_sites < 2:
            raise ConfigError(f"num_sites must be >= 2, got {self.num_sites}")
        if self.boundary != "open":
            raise ConfigError(f"only open boundary chains are supported, got {self.boundary!r}")
        missing = [k for k in COUPLING_FIELDS[self.family] if k not in self.couplings]
        if missing:
            raise ConfigError(f"{self.family} is missing couplings {missing}")
        if self.family == "MBLHeisenberg" and self.couplings["h"] < 0:
            raise ConfigError("disorder bound h must be >= 0")

    @property
    def tag(self) -> str:
        return self.family


@dataclass(frozen=True)
class DisorderRealization:
    """On-site fields h_i drawn uniformly from [-h, h]."""

    fields: np.ndarray
    seed: int

    @classmethod
    def draw(cls, bound: float, num_sites: int, seed: int, stream: int = 0) -> "DisorderRealization":
        rng = stream_rng(seed, stream)
        fields = rng.uniform(-bound, bound, size=num_sites)
        return cls(fields=fields, seed=int(seed))


def pauli_on_site(label: str, site: int, num_sites: int) -> np.ndarray:
    """Single-site Pauli embedded in the N-qubit register."""
    if label not in ("X", "Y", "Z"):
        raise ValueError(f"expected Pauli label X, Y or Z, got {label!r}")
    if not 0 <= site < num_sites:
        raise SiteOutOfRange(f"site {site} outside [0, {num_sites})")
    high = np.eye(2 ** (num_sites - 1 - site), dtype=complex)
    low = np.eye(2 ** site, dtype=complex)
    return kron(high, kron(PAULI[label], low))


def _bond(label: str, site: int, num_sites: int) -> np.ndarray:
    """p_site p_{site+1} for a nearest-neighbor bond (same Pauli on both ends)."""
    p = PAULI[label]
    high = np.eye(2 ** (num_sites - 2 - site), dtype=complex)
    low = np.eye(2 ** site, dtype=complex)
    return kron(high, kron(kron(p, p), low))


def swap_gate(i: int, j: int, num_sites: int) -> np.ndarray:
    """Permutation matrix exchanging bits i and j of the basis index."""
    if not (0 <= i < num_sites and 0 <= j < num_sites):
        raise SiteOutOfRange(f"sites ({i}, {j}) outside [0, {num_sites})")
    if i == j:
        raise EqualSites("swap requires two distinct sites")
    dim = 2 ** num_sites
    idx = np.arange(dim)
    bit_i = (idx >> i) & 1
    bit_j = (idx >> j) & 1
    swapped = (idx & ~((1 << i) | (1 << j))) | (bit_j << i) | (bit_i << j)
    gate = np.zeros((dim, dim), dtype=complex)
    gate[swapped, idx] = 1.0
    return gate


def build_hamiltonian(spec: ModelSpec, realization: DisorderRealization | None = None) -> np.ndarray:
    """Assemble the dense 2^N x 2^N Hamiltonian for a model spec."""
    needs_disorder = spec.family == "MBLHeisenberg"
    if needs_disorder and realization is None:
        raise MissingDisorder("MBLHeisenberg requires a DisorderRealization")
    if not needs_disorder and realization is not None:
        raise ConfigError(f"{spec.family} does not take a disorder realization")
    if realization is not None and realization.fields.shape[0] != spec.num_sites:
        raise ConfigError(
            f"realization has {realization.fields.shape[0]} fields for {spec.num_sites} sites"
        )

    n = spec.num_sites
    c = spec.couplings
    dim = 2 ** n
    ham = np.zeros((dim, dim), dtype=complex)

    if spec.family == "ChaoticXYZ":
        bonds = {"X": c["Jx"], "Y": c["Jy"], "Z": c["Jz"]}
        fields = np.full(n, c["h"], dtype=float)
    elif spec.family == "XXZ":
        bonds = {"X": c["J"], "Y": c["J"], "Z": c["J"] * c["Delta"]}
        fields = np.full(n, c["h"], dtype=float)
    elif spec.family == "MBLHeisenberg":
        bonds = {"X": c["J"], "Y": c["J"], "Z": c["J"]}
        fields = realization.fields
    else:  # FreeFermionXX
        bonds = {"X": c["J"], "Y": c["J"], "Z": 0.0}
        fields = np.zeros(n)

    for site in range(n - 1):
        for label, coupling in bonds.items():
            if coupling != 0.0:
                ham += coupling * _bond(label, site, n)
    for site in range(n):
        if fields[site] != 0.0:
            ham += fields[site] * pauli_on_site("Z", site, n)
    return ham


def build_hopping_matrix(spec: ModelSpec) -> np.ndarray:
    """N x N single-particle hopping matrix for the FreeFermionXX chain."""
    if spec.family != "FreeFermionXX":
        raise WrongFamily(f"hopping matrix is defined for FreeFermionXX, not {spec.family}")
    n = spec.num_sites
    hop = np.zeros((n, n))
    amp = SPIN_TO_HOPPING * spec.couplings["J"]
    for a in range(n - 1):
        hop[a, a + 1] = amp
        hop[a + 1, a] = amp
    return hop
