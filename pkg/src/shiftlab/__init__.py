"""shiftlab: invariants of topological Markov chains.

Validated primitive adjacency data, admissible-word combinatorics, the
canonical measures, exact finite blocks of the nonlocal Laplacian and the
Hamiltonian with their closed-form spectra, classical and constraint-based
quantum symmetry analysis, and finite-dimensional magic-unitary models.
"""

from .core import (
    AdjacencySpec,
    MeasureValue,
    PerronFrobeniusData,
    Word,
    CONFORMAL,
    PARRY,
    ahlfors_profile,
    ball_kernel_integral,
    cylinder_measure,
    conformal_measure,
    count_words,
    enumerate_words,
    is_admissible,
    kms_value,
    parry_measure,
    perron_frobenius,
    validate_primitive,
)
from .groupoid import (
    BisectionIndex,
    bisections_up_to,
    bisections_with_length,
    count_bisections,
    enumerate_bisections,
    is_bisection_index,
    support_decomposition,
)
from .spectral import (
    LevelBasis,
    OperatorBlock,
    WaveletVector,
    delta_matrix,
    dirac_block,
    eigenvalue_formula,
    level_basis,
    spectrum,
    spectrum_dense,
    wavelet_basis,
)
from .symmetry import (
    ClassicalIsometry,
    FixedPointReport,
    GraphAutomorphism,
    automorphism_group,
    classical_fixed_points,
    commutation_residual,
    isometry_unitary,
)
from .quantum import (
    ConstraintSystem,
    ErgodicityVerdict,
    PatternMatrix,
    SupportPattern,
    TAReport,
    build_constraints,
    classical_witness,
    collapse_report,
    ergodicity_verdict,
    propagate,
    t_a_analysis,
    word_support,
)
from .models import (
    MagicUnitaryModel,
    RelationReport,
    WordOperator,
    halmos_lemma_check,
    normality_element_norm,
    qls_magic,
    relation_check,
    two_projection_magic,
    word_op_adjoint,
    word_op_mul,
    word_op_norm,
)

__version__ = "0.1.0"
