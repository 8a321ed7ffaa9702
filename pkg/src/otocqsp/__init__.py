"""Out-of-time-order correlators as Chebyshev/QSP transforms of the singular
values of spatially resolved truncated propagators, with exact-diagonalization
experiments over benchmark spin chains."""

from .errors import (
    BadPhaseCount,
    ConfigError,
    EqualSites,
    InvalidOrder,
    MissingDisorder,
    NonHermitianInput,
    NotUnitary,
    NumericalFailure,
    OddOrder,
    OtocQspError,
    SiteOutOfRange,
    SynthesisFailed,
    UnknownFamily,
    WrongFamily,
)
from .linalg import (
    TOL,
    SpectralDecomposition,
    SVDResult,
    Tolerances,
    evolve,
    haar_unitary,
    hermitian_eigendecompose,
    kron,
    stream_rng,
    svd,
)
from .hamiltonians import (
    DisorderRealization,
    ModelSpec,
    build_hamiltonian,
    build_hopping_matrix,
    pauli_on_site,
    swap_gate,
)
from .propagator import (
    PhaseHistogram,
    SingularSpectrum,
    TruncatedPropagator,
    chebyshev_moment,
    phase_histogram,
    singular_spectrum,
    truncated_propagator,
)
from .echo import EchoConfig, echo_operator, otoc_k, qsp_otoc
from .qsp import (
    FilterSpec,
    PhaseSequence,
    ResponsePolynomial,
    SynthesisReport,
    qsp_response,
    response_batch,
    response_cheb_coeffs,
    synthesize_phases,
)
from .freefermion import (
    SingleParticlePropagator,
    analytic_truncated_spectrum,
    overlay_series,
    single_particle_propagator,
)
from .experiments import (
    ExperimentConfig,
    MomentSeries,
    PhaseMapResult,
    TimeGrid,
    run_filter_demo,
    run_haar_baseline,
    run_moment_sweep,
    run_phase_map,
    run_theorem_check,
)

__version__ = "0.1.0"
