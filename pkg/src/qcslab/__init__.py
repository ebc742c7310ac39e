"""qcslab: numerical laboratory for the two-copy interferometric measurement
of the quadrature coherence scale (QCS) of bosonic states."""

from .errors import (
    CutoffError,
    DegenerateDenominatorError,
    GridError,
    HeadroomError,
    MemoryGuardError,
    QcslabError,
    RoundoffBudgetError,
    ValidationError,
)
from .estimators import (
    QcsEstimate,
    QuasiProbability,
    overlap_gaussian,
    purity_from_pn,
    purity_gaussian,
    qcs_classical_mixture,
    qcs_direct,
    qcs_gaussian,
    qcs_multimode,
    qcs_pure_shortcut,
    qcs_two_copy,
    quasi_probability,
)
from .fock import (
    DensityOperator,
    annihilation,
    creation,
    number_operator,
    parity_operator,
    partial_trace,
    purity_direct,
    quadratures,
    swap_operator,
    tensor,
)
from .interferometer import (
    PhotonDistribution,
    beam_splitter_unitary,
    hom_photon_distribution,
    multimode_two_copy_output,
    photon_distribution,
    photon_distribution_phase_invariant,
    thermal_photon_distribution,
    two_copy_output,
)
from .phase_space import (
    WignerGrid,
    overlap_wigner,
    qcs_wigner_gradient,
    qcs_wigner_laplacian,
    wigner_eval,
    wigner_origin,
)
from .sampling import SampledEstimate, ShotRecord, estimate_qcs, sample_counts
from .states import (
    ClassicalMixture,
    CovarianceMatrix,
    StateSpec,
    build_state,
    classical_mixture,
    coherent,
    displace,
    fock,
    gaussian_covariance,
    phase_rotate,
    rho_2m,
    rho_even_m,
    squeezed_vacuum,
    thermal,
)

__version__ = "0.1.0"
