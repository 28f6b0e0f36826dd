"""Moment relaxations of polynomial and measure-valued optimization problems.

The pipeline: polynomials and graded-lex monomial indexing
(`polynomials`), moment vectors and matrix stencils (`moments`), relaxation
assembly for polynomial minimization (`relaxation`) and generalized moment
problems with transport constraints (`gmp`), a dense primal-dual
interior-point conic solver (`sdp`), rank certificates with atom extraction
(`extraction`), pencil utilities and shadow sampling (`spectra`), built-in
benchmark problems (`casestudies`), one text format for problem files
(`problemfile`) and a command-line front end (`cli`).
"""

from .extraction import (
    Certificate,
    ExtractionError,
    certify,
    extract_atoms,
    flat_check,
    numerical_rank,
)
from .gmp import (
    DynamicsProblem,
    DynamicsSpec,
    GMPProblem,
    GMPResult,
    MeasureDecl,
    MomentConstraint,
    build_dynamics_gmp,
    build_gmp_relaxation,
    liouville_constraints,
    piecewise_liouville,
    resolve_minimal_time,
    solve_gmp,
)
from .moments import (
    MatrixStencil,
    MomentVector,
    evaluate_stencil,
    localizing_matrix_stencil,
    moment_matrix_stencil,
    riesz_apply,
)
from .polynomials import (
    Polynomial,
    VarSpace,
    grlex_exponent,
    grlex_index,
    monomial_count,
    parse_polynomial,
)
from .problemfile import ParsedProblem, ProblemFileError, load_problem, parse_problem_text
from .relaxation import (
    POPProblem,
    SemialgebraicSet,
    bound_and_moments,
    build_relaxation,
    half_degree,
)
from .sdp import (
    Block,
    ConicProgram,
    SDPSolution,
    SolveOptions,
    duality_report,
    psd_project_check,
    solve,
)
from .spectra import Pencil, defining_polynomials, membership, shadow_support_points

__version__ = "0.1.0"

__all__ = [
    "Block",
    "Certificate",
    "ConicProgram",
    "DynamicsProblem",
    "DynamicsSpec",
    "ExtractionError",
    "GMPProblem",
    "GMPResult",
    "MatrixStencil",
    "MeasureDecl",
    "MomentConstraint",
    "MomentVector",
    "POPProblem",
    "ParsedProblem",
    "Pencil",
    "Polynomial",
    "ProblemFileError",
    "SDPSolution",
    "SemialgebraicSet",
    "SolveOptions",
    "VarSpace",
    "bound_and_moments",
    "build_dynamics_gmp",
    "build_gmp_relaxation",
    "build_relaxation",
    "certify",
    "defining_polynomials",
    "duality_report",
    "evaluate_stencil",
    "extract_atoms",
    "flat_check",
    "grlex_exponent",
    "grlex_index",
    "half_degree",
    "liouville_constraints",
    "load_problem",
    "localizing_matrix_stencil",
    "membership",
    "moment_matrix_stencil",
    "monomial_count",
    "numerical_rank",
    "parse_polynomial",
    "parse_problem_text",
    "piecewise_liouville",
    "psd_project_check",
    "resolve_minimal_time",
    "riesz_apply",
    "shadow_support_points",
    "solve",
    "solve_gmp",
]
