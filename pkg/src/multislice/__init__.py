"""Exact harmonic analysis on multislices."""
from .core import (
    BudgetExceeded,
    HistogramMismatch,
    InvariantViolation,
    Multislice,
    MultisliceError,
    apply_transposition,
    domain_size,
    enumerate_elements,
    rank,
    sample_uniform,
    unrank,
)
from .fkn import (
    DictatorFn,
    FknReport,
    best_dictator_hamming,
    best_dictator_l2,
    dist_to_boolean_sq,
    fkn_experiment,
    round_to_boolean,
)
from .harmonic import (
    Degree1Form,
    FunctionTable,
    LevelDecomposition,
    degree1_projection,
    evaluate_form,
    fit_degree1_form,
    high_degree_mass,
    indicator_x,
    influence,
    is_degree_one,
    junta_degree_one_span,
    normal_form,
    transposition_average,
)
from .spectral import (
    SpectrumReport,
    SubsetFamily,
    dictator_set,
    exhaustive_min_expansion,
    expansion_exact,
    expansion_spectral,
    frobenius_eigenvalue,
    hoffman_bound,
    monte_carlo_expansion,
    partitions_majorizing,
    spectrum,
    stability_report,
)

__version__ = "0.1.0"
