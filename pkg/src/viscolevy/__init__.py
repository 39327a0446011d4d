"""Linear viscoelastic materials as Bernstein functions and Levy processes."""

from .bernstein import (
    Analytic,
    BernsteinRep,
    Composed,
    LevyMeasure,
    Material,
    ParallelCombination,
    SeriesCombination,
    Stable,
    bernstein_check,
    canonicalize,
    compose,
    eval_derivative,
    eval_impulse,
    laplace_fprime,
)
from .conjugation import (
    RelaxationRep,
    StieltjesRep,
    conjugate,
    conjugate_exact,
    conjugate_stable,
    instantaneous_modulus,
    interlaces,
    matrix_relaxation_numeric,
    relaxation_curve_numeric,
    relaxation_rep,
    stieltjes_of,
    verify_conjugation,
)
from .errors import *  # noqa: F403
from .levy_sim import (
    MCResult,
    PaisCharacteristics,
    Path,
    SubordinatorSpec,
    estimate_material_from_paths,
    laplace_exponent,
    material_from_characteristics,
    material_from_subordinator,
    mc_laplace_check,
    mean_and_stderr,
    path_rng,
    sample_increment,
    sample_one_sided_stable,
    sample_pais_path,
    sample_path,
    simulate_pais_paths,
    subordinator_from_material,
)
from .materials import (
    LoadHistory,
    RelaxationResponse,
    dashpot,
    kelvin_voigt,
    maxwell,
    parallel,
    prony,
    respond_creep,
    respond_relaxation,
    series,
    spring,
    stable_material,
)
from .network import (
    EigenResult,
    MatrixMaterial,
    QuadraticFormPair,
    generalized_eigen,
    material_from_quadratic_forms,
    respond_creep_matrix,
    verify_evolution,
)
from .numerics import TimeGrid, convolve_grid, inverse_laplace, isolate_real_roots, numeric_laplace
