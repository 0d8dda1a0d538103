"""Entanglement-assisted phase estimation with spin-s probes.

Simulates protocols that prepare the optimal probe state only after the
rotation axis is revealed, by measuring an entangled ancilla with
postselection; provides closed-form and brute-force success
probabilities, Fisher-information machinery, and Monte Carlo
verification of the Cramer-Rao bound.
"""

from .entangle import (
    AncillaDecomposition,
    BipartiteState,
    SchmidtForm,
    ancilla_decomposition,
    bipartite_state,
    maximally_entangled,
    max_prob_state,
    schmidt,
)
from .estimator import EstimationConfig, EstimationResult, likelihood, mle, run_estimation
from .fisher import (
    FisherReport,
    OptimalBasis,
    cfi,
    crb,
    fisher_report,
    measurement_prob_model,
    measurement_statistics,
    optimal_basis,
    optimal_states,
    probe_measurement_probs,
    qfi_pure,
)
from .protocol import (
    MeasurementVector,
    ProtocolReport,
    ShotSampler,
    Spin1Probabilities,
    appendix_special_cases,
    measurement_vector,
    nonorthogonal_protocol,
    orthogonal_protocol,
    run_protocol,
    sample_shot,
    shot_sampler,
    spin1_closed_forms,
)
from .spin import (
    AxisSpec,
    HamiltonianSpectrum,
    SpinSystem,
    evolve,
    evolution_operator,
    hamiltonian,
    make_spin_system,
    spectrum,
)

__version__ = "0.1.0"
