"""Conditional variances under quantum control and entanglement resolution lines.

A dense-matrix toolkit for small multi-qudit systems: projective
measurement with the Lueders update, outcome-conditioned and expected
conditional variances, the control-assisted uncertainty relation, and the
resolution-line spectrum whose split count classifies the separability of
multiparticle entangled pure states.
"""

from .linalg import (
    Register,
    embed,
    hermitian_eig_grouped,
    is_hermitian,
    kron,
    partial_trace,
)
from .states import (
    Observable,
    OutcomeBranch,
    QuantumState,
    expectation,
    haar_random_pure,
    measure_branches,
    random_hermitian,
    random_mixed,
    robertson_check,
    variance,
)
from .conditional import (
    ControlChain,
    cond_variance_given_outcome,
    control_relation_residual,
    enumerate_sequences,
    expected_cond_variance,
    nested_correction_term,
    sequential_expected_cond_variance,
    variance_of_cond_expectation,
)
from .spectrum import (
    ConsistencyError,
    MerlScenario,
    MerlSpectrum,
    ObservablePair,
    SeparabilityVerdict,
    best_order_search,
    classify,
    merl_spectrum,
    traditional_bound,
)
from .scenarios import (
    OAM_MAPS_M_VALUE,
    OAM_MAPS_POSITIONAL,
    OamGhzParams,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SPIN1_X,
    SPIN1_Y,
    SPIN1_Z,
    basis_state,
    four_qubit_scenarios,
    ghz,
    oam_ghz,
    oam_photon_scenario,
    pauli_set,
    separable_composite,
    singlet,
    spin1_set,
    w_state,
)
from .scenario_io import (
    ScenarioFormatError,
    load_scenario,
    parse_scenario_document,
    parse_scenario_text,
    save_scenario,
    scenario_to_document,
)
from .audit import AuditReport, run_audit

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "ConsistencyError",
    "ControlChain",
    "MerlScenario",
    "MerlSpectrum",
    "OAM_MAPS_M_VALUE",
    "OAM_MAPS_POSITIONAL",
    "OamGhzParams",
    "Observable",
    "ObservablePair",
    "OutcomeBranch",
    "QuantumState",
    "Register",
    "ScenarioFormatError",
    "SeparabilityVerdict",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SPIN1_X",
    "SPIN1_Y",
    "SPIN1_Z",
    "basis_state",
    "best_order_search",
    "classify",
    "cond_variance_given_outcome",
    "control_relation_residual",
    "embed",
    "enumerate_sequences",
    "expectation",
    "expected_cond_variance",
    "four_qubit_scenarios",
    "ghz",
    "haar_random_pure",
    "hermitian_eig_grouped",
    "is_hermitian",
    "kron",
    "load_scenario",
    "measure_branches",
    "merl_spectrum",
    "nested_correction_term",
    "oam_ghz",
    "oam_photon_scenario",
    "parse_scenario_document",
    "parse_scenario_text",
    "partial_trace",
    "pauli_set",
    "random_hermitian",
    "random_mixed",
    "robertson_check",
    "run_audit",
    "save_scenario",
    "scenario_to_document",
    "separable_composite",
    "sequential_expected_cond_variance",
    "singlet",
    "spin1_set",
    "traditional_bound",
    "variance",
    "variance_of_cond_expectation",
    "w_state",
]
