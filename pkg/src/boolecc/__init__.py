"""Local correction and list correction of low-degree multilinear polynomials
over {0,1}^n with coefficients in an Abelian group."""
from .correct import (
    CorrectorParams,
    base_reduce,
    correct_small_error,
    reduced_oracle,
    subcube_reduce,
    unique_correct,
    unique_correct_budget,
)
from .cube import SpannedSubcube, SubcubeEmbedding, embed, random_embedding, restrict_pair, span_with
from .decode import BudgetExceededError, brute_force_list, list_decode, unique_decode
from .gadget import BalancedMatrix, GadgetSample, ReductionGadget, build_balanced_matrix, gadget_queries, reduction_gadget
from .groups import INFINITE, Cyclic, GroupValue, Integers, Product, Rationals, element_order, scalar_multiply
from .harness import ExperimentReport, run_experiment, sampling_check
from .listcorrect import ApproxOracle, build_approx_oracles, local_list_correct, psi_eval
from .oracle import CorruptedOracle, QueryOracle, maj_instance, make_oracle
from .poly import (
    DegreeExceededError,
    MultilinearPoly,
    Table,
    ball_interpolation_coeffs,
    evaluate,
    exact_distance,
    interpolate,
    restrict,
    tabulate,
)

__version__ = "0.1.0"

__all__ = [
    "ball_interpolation_coeffs",
    "base_reduce",
    "correct_small_error",
    "CorrectorParams",
    "DegreeExceededError",
    "evaluate",
    "exact_distance",
    "interpolate",
    "MultilinearPoly",
    "reduced_oracle",
    "restrict",
    "subcube_reduce",
    "Table",
    "tabulate",
    "unique_correct",
    "unique_correct_budget",
]

__all__ = [
    "CorrectorParams",
    "base_reduce",
    "correct_small_error",
    "reduced_oracle",
    "subcube_reduce",
    "unique_correct",
    "unique_correct_budget",
    "SpannedSubcube",
    "SubcubeEmbedding",
    "embed",
    "random_embedding",
    "restrict_pair",
    "span_with",
    "BudgetExceededError",
    "brute_force_list",
    "list_decode",
    "unique_decode",
    "BalancedMatrix",
    "GadgetSample",
    "ReductionGadget",
    "build_balanced_matrix",
    "gadget_queries",
    "reduction_gadget",
    "INFINITE",
    "Cyclic",
    "GroupValue",
    "Integers",
    "Product",
    "Rationals",
    "element_order",
    "scalar_multiply",
    "ExperimentReport",
    "run_experiment",
    "sampling_check",
    "ApproxOracle",
    "build_approx_oracles",
    "local_list_correct",
    "psi_eval",
    "CorruptedOracle",
    "QueryOracle",
    "maj_instance",
    "make_oracle",
    "DegreeExceededError",
    "MultilinearPoly",
    "Table",
    "ball_interpolation_coeffs",
    "evaluate",
    "exact_distance",
    "interpolate",
    "restrict",
    "tabulate",
]
