"""Moment relaxations of polynomial optimization problems.

`build_relaxation` turns ``min p0(x) s.t. p_k(x) >= 0 / = 0`` into a conic
program over the truncated moments y (grlex order, degree up to 2r): one PSD
block for the order-r moment matrix, one PSD block per inequality for its
localizing matrix of order r - ceil(deg/2), one equality row per product of
an equality constraint with a monomial that fits the truncation, and the
normalization row y_0 = 1.  The moments are the dual vector of the conic
program, so the solver's dual objective is the relaxation bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .moments import (
    MatrixStencil,
    MomentVector,
    localizing_matrix_stencil,
    moment_matrix_stencil,
)
from .polynomials import (
    Coeff,
    Exponent,
    Polynomial,
    VarSpace,
    exponents_up_to,
    grlex_index,
    monomial_count,
)
from .sdp import Block, ConicProgram, SDPSolution, SolveOptions, solve


def half_degree(p: Polynomial) -> int:
    """Smallest integer at or above half the total degree (0 for constants)."""
    return ceil(p.degree / 2)


@dataclass
class SemialgebraicSet:
    """Basic closed set {x : inequalities >= 0, equalities = 0}.

    When `ball_radius` is set, the constraint R - sum x_i^2 >= 0 is appended
    at assembly time to certify compactness.
    """

    space: VarSpace
    inequalities: list[Polynomial] = field(default_factory=list)
    equalities: list[Polynomial] = field(default_factory=list)
    ball_radius: Optional[Fraction | float | int] = None

    def __post_init__(self) -> None:
        for p in list(self.inequalities) + list(self.equalities):
            if p.nvars != self.space.n:
                raise ValueError("constraint polynomial does not match the variable space")
        if self.ball_radius is not None and not self.ball_radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def nvars(self) -> int:
        return self.space.n

    def ball_polynomial(self) -> Optional[Polynomial]:
        if self.ball_radius is None:
            return None
        n = self.space.n
        p = Polynomial.constant(n, self.ball_radius)
        for i in range(n):
            p = p - Polynomial.variable(n, i) ** 2
        return p

    def effective_inequalities(self) -> list[Polynomial]:
        out = list(self.inequalities)
        ball = self.ball_polynomial()
        if ball is not None:
            out.append(ball)
        return out

    def certifies_compactness(self) -> bool:
        """True when some inequality's top form is a negative definite quadratic.

        That covers R - |x|^2 and affine perturbations of it; anything subtler
        is the caller's responsibility and is merely flagged, not rejected.
        """
        if self.ball_radius is not None:
            return True
        n = self.space.n
        for q in self.inequalities:
            if q.degree != 2:
                continue
            top = q.top_form()
            H = np.zeros((n, n))
            for exp, c in top.terms.items():
                idx = [i for i, e in enumerate(exp) if e]
                if len(idx) == 1:
                    H[idx[0], idx[0]] = float(c)
                else:
                    H[idx[0], idx[1]] += float(c) / 2.0
                    H[idx[1], idx[0]] += float(c) / 2.0
            if np.linalg.eigvalsh(H)[-1] < 0:
                return True
        return False

    def contains(self, point: Sequence[float], tol: float = 1e-9) -> bool:
        for q in self.effective_inequalities():
            if float(q.evaluate(point)) < -tol:
                return False
        for q in self.equalities:
            if abs(float(q.evaluate(point))) > tol:
                return False
        return True


@dataclass
class POPProblem:
    """Minimize a polynomial over a basic closed semialgebraic set."""

    objective: Polynomial
    feasible_set: SemialgebraicSet

    def __post_init__(self) -> None:
        if self.objective.nvars != self.feasible_set.space.n:
            raise ValueError("objective does not match the variable space")

    def minimal_order(self) -> int:
        r = max(1, half_degree(self.objective))
        for q in self.feasible_set.effective_inequalities():
            r = max(r, half_degree(q))
        for q in self.feasible_set.equalities:
            r = max(r, half_degree(q))
        return r


@dataclass
class RelaxationInfo:
    order: int
    r_k: list[int]
    r_x: int
    block_sizes: list[int]
    moment_dim: int
    compactness_certified: bool


class OrderTooSmallError(ValueError):
    def __init__(self, r: int, r_x: int):
        super().__init__(f"relaxation order {r} is below the minimal order {r_x}")
        self.minimal_order = r_x


# -- linear rows over the moment vector --------------------------------------


@dataclass
class LinearRow:
    """Exact row sum_k coeffs[k] * y_k  REL  rhs over global moment indices."""

    coeffs: dict[int, Fraction]
    rhs: Fraction
    relation: str  # "eq", "ge"  (le rows are stored negated as ge)

    def normalized_key(self) -> Optional[tuple]:
        items = sorted((k, c) for k, c in self.coeffs.items() if c != 0)
        if not items:
            return None
        lead = items[0][1]
        return tuple((k, c / lead) for k, c in items), self.relation

    def normalized_rhs(self) -> Fraction:
        items = sorted((k, c) for k, c in self.coeffs.items() if c != 0)
        lead = items[0][1]
        return self.rhs / lead


def dedupe_rows(rows: list[LinearRow]) -> list[LinearRow]:
    """Drop exact duplicates (rows proportional with proportional rhs)."""
    seen: dict[tuple, Fraction] = {}
    out: list[LinearRow] = []
    for row in rows:
        key = row.normalized_key()
        if key is None:
            if row.rhs != 0:
                out.append(row)  # infeasible 0 = c row: keep, solver will report
            continue
        rhs = row.normalized_rhs()
        if key in seen and seen[key] == rhs:
            continue
        seen[key] = rhs
        out.append(row)
    return out


def prune_dependent_rows(rows: list[LinearRow], n_cols: int, rel_tol: float = 1e-11) -> list[LinearRow]:
    """Keep a maximal independent subset of equality rows.

    Equality families built from products of one polynomial carry many exact
    linear dependencies; leaving them in makes the Newton systems singular.
    Rank analysis runs on the augmented [coefficients | rhs] matrix, so a row
    that is inconsistent with the others stays (and the solve reports
    infeasibility) while a redundant consistent row is dropped.  Rows enter
    with unit infinity-norm, so the cutoff is scale-free.
    """
    if len(rows) <= 1:
        return rows
    A = np.zeros((len(rows), n_cols + 1))
    for ri, row in enumerate(rows):
        for k, c in row.coeffs.items():
            A[ri, k] = float(c)
        A[ri, n_cols] = float(row.rhs)
        norm = np.abs(A[ri]).max()
        if norm > 0:
            A[ri] /= norm
    _, R, piv = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0:
        return []
    rank = int(np.sum(diag > rel_tol * diag[0]))
    keep = sorted(piv[:rank])
    return [rows[i] for i in keep]


# -- assembly -----------------------------------------------------------------


@dataclass
class MeasurePlan:
    """PSD stencils and equality rows contributed by one measure's support."""

    nvars: int
    order: int
    psd_stencils: list[MatrixStencil]
    equality_rows: list[tuple[dict[Exponent, Coeff], Fraction]]  # lhs terms, rhs
    r_k: list[int]
    r_x: int
    compactness_certified: bool


def measure_plan(supp: SemialgebraicSet, r: int) -> MeasurePlan:
    """Moment-matrix and localizer structure of one measure at order r."""
    n = supp.space.n
    ineqs = supp.effective_inequalities()
    r_k = [half_degree(q) for q in ineqs] + [half_degree(q) for q in supp.equalities]
    r_x = max([1] + r_k)
    if r < r_x:
        raise OrderTooSmallError(r, r_x)
    stencils = [moment_matrix_stencil(n, r)]
    for q in ineqs:
        stencils.append(localizing_matrix_stencil(q, r - half_degree(q)))
    # Equality constraints pin every product q * x^alpha that the truncation
    # can express: l(q x^alpha) = 0 for |alpha| <= 2r - deg q.  This covers
    # every cell of the order r - ceil(deg/2) localizing matrix and, for odd
    # degrees, the top-degree products that the matrix misses; dropping those
    # demonstrably loses tightness (and rank-one certificates) at the minimal
    # order.
    rows: list[tuple[dict[Exponent, Coeff], Fraction]] = []
    for q in supp.equalities:
        for alpha in exponents_up_to(n, 2 * r - q.degree):
            lhs: dict[Exponent, Coeff] = {}
            for exp, c in q.terms.items():
                s = tuple(a + b for a, b in zip(exp, alpha))
                lhs[s] = lhs.get(s, Fraction(0)) + c
            rows.append(({e: c for e, c in lhs.items() if c != 0}, Fraction(0)))
    return MeasurePlan(
        nvars=n,
        order=r,
        psd_stencils=stencils,
        equality_rows=rows,
        r_k=r_k,
        r_x=r_x,
        compactness_certified=supp.certifies_compactness(),
    )


@dataclass
class AssembledProgram:
    """A conic program plus the bookkeeping to read moments back out of it."""

    program: ConicProgram
    objective: np.ndarray  # cost c over the moment vector: bound = c'y (+ constant)
    objective_constant: float
    sense: str  # "min" or "max"
    measure_offsets: dict[str, int]
    measure_exponents: dict[str, list[Exponent]]
    measure_orders: dict[str, int]

    @property
    def num_moments(self) -> int:
        return self.program.m

    def moments_of(self, name: str, y: np.ndarray) -> MomentVector:
        off = self.measure_offsets[name]
        exps = self.measure_exponents[name]
        nvars = len(exps[0])
        return MomentVector(nvars, 2 * self.measure_orders[name], y[off : off + len(exps)])

    def bound_from(self, sol: SDPSolution) -> float:
        value = float(self.objective @ sol.y) + self.objective_constant
        return value


def assemble(
    plans: dict[str, MeasurePlan],
    objective_terms: dict[str, Polynomial],
    objective_constant: float,
    sense: str,
    extra_eq_rows: list[LinearRow],
    extra_ge_rows: list[LinearRow],
    order: dict[str, int] | None = None,
    measure_order: list[str] | None = None,
) -> AssembledProgram:
    """Stack per-measure blocks and global rows into one conic program.

    Orientation: the moments y are the conic dual vector.  For sense "min"
    the solver maximizes b'y with b = -c so that the relaxation bound is
    c'y* = -max b'y; for "max", b = +c.
    """
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    names = measure_order if measure_order is not None else list(plans)
    offsets: dict[str, int] = {}
    exps: dict[str, list[Exponent]] = {}
    orders: dict[str, int] = {}
    total = 0
    for name in names:
        plan = plans[name]
        offsets[name] = total
        exps[name] = exponents_up_to(plan.nvars, 2 * plan.order)
        orders[name] = plan.order
        total += len(exps[name])

    blocks: list[Block] = []
    block_sources: list[tuple[str, MatrixStencil]] = []
    for name in names:
        for st in plans[name].psd_stencils:
            blocks.append(Block("psd", st.side))
            block_sources.append((name, st))

    # localizer equality rows, in declaration order after the explicit rows
    eq_rows: list[LinearRow] = list(extra_eq_rows)
    for name in names:
        off = offsets[name]
        for lhs, rhs in plans[name].equality_rows:
            coeffs = {off + grlex_index(e): Fraction(c) for e, c in lhs.items()}
            eq_rows.append(LinearRow(coeffs, Fraction(rhs), "eq"))
    eq_rows = prune_dependent_rows(dedupe_rows(eq_rows), total)
    ge_rows = dedupe_rows(list(extra_ge_rows))

    if ge_rows:
        blocks.append(Block("nonneg", len(ge_rows)))
    if eq_rows:
        blocks.append(Block("zero", len(eq_rows)))

    m = total
    A: list[np.ndarray] = []
    C: list[np.ndarray] = []
    for blk in blocks:
        if blk.kind == "psd":
            A.append(np.zeros((m, blk.size, blk.size)))
            C.append(np.zeros((blk.size, blk.size)))
        else:
            A.append(np.zeros((m, blk.size)))
            C.append(np.zeros(blk.size))

    # PSD blocks: Z_block = sum_k y_k S_k, i.e. C = 0 and A_k = -S_k
    for bi, (name, st) in enumerate(block_sources):
        off = offsets[name]
        for (i, j), pairs in st.cells.items():
            for exp, c in pairs:
                k = off + grlex_index(exp)
                A[bi][k, i, j] -= float(c)
                if i != j:
                    A[bi][k, j, i] -= float(c)

    def _fill_rows(bi: int, rows: list[LinearRow]) -> None:
        # rows are rescaled to unit maximum coefficient: mixed scales (constant
        # terms like 1/1575 against unit leading coefficients) otherwise drag
        # the Newton system's conditioning down
        for ri, row in enumerate(rows):
            scale = max((abs(c) for c in row.coeffs.values()), default=Fraction(1))
            if scale == 0:
                scale = Fraction(1)
            C[bi][ri] = -float(row.rhs / scale)
            for k, c in row.coeffs.items():
                A[bi][k, ri] -= float(c / scale)

    nb = len(block_sources)
    if ge_rows:
        _fill_rows(nb, ge_rows)
        nb += 1
    if eq_rows:
        _fill_rows(nb, eq_rows)

    c_obj = np.zeros(m)
    for name, pol in objective_terms.items():
        if name not in offsets:
            raise KeyError(f"objective references unknown measure {name!r}")
        off = offsets[name]
        for exp, c in pol.terms.items():
            if sum(exp) > 2 * orders[name]:
                raise ValueError(
                    f"objective degree {sum(exp)} exceeds 2r = {2 * orders[name]} for measure {name!r}"
                )
            c_obj[off + grlex_index(exp)] += float(c)

    b = -c_obj if sense == "min" else c_obj.copy()
    prog = ConicProgram(blocks=blocks, A=A, b=b, C=C)
    return AssembledProgram(
        program=prog,
        objective=c_obj,
        objective_constant=objective_constant,
        sense=sense,
        measure_offsets=offsets,
        measure_exponents=exps,
        measure_orders=orders,
    )


_POP_MEASURE = "mu"


def build_relaxation(pop: POPProblem, r: int) -> tuple[AssembledProgram, RelaxationInfo]:
    """Order-r moment relaxation of a polynomial minimization problem."""
    plan = measure_plan(pop.feasible_set, r)
    if half_degree(pop.objective) > r:
        raise OrderTooSmallError(r, half_degree(pop.objective))
    n = pop.feasible_set.space.n
    mass_row = LinearRow({0: Fraction(1)}, Fraction(1), "eq")  # y_0 = 1
    asm = assemble(
        plans={_POP_MEASURE: plan},
        objective_terms={_POP_MEASURE: pop.objective},
        objective_constant=0.0,
        sense="min",
        extra_eq_rows=[mass_row],
        extra_ge_rows=[],
        measure_order=[_POP_MEASURE],
    )
    info = RelaxationInfo(
        order=r,
        r_k=plan.r_k,
        r_x=plan.r_x,
        block_sizes=[st.side for st in plan.psd_stencils],
        moment_dim=monomial_count(n, 2 * r),
        compactness_certified=plan.compactness_certified,
    )
    return asm, info


@dataclass
class POPResult:
    bound: float
    moments: MomentVector
    solution: SDPSolution
    info: RelaxationInfo
    assembled: AssembledProgram


def bound_and_moments(
    pop: POPProblem, r: int, options: SolveOptions | None = None
) -> POPResult:
    """Solve the order-r relaxation: lower bound and optimal truncated moments.

    Solver failure statuses pass through in `result.solution.status`.
    """
    asm, info = build_relaxation(pop, r)
    sol = solve(asm.program, options)
    y = asm.moments_of(_POP_MEASURE, sol.y)
    return POPResult(bound=asm.bound_from(sol), moments=y, solution=sol, info=info, assembled=asm)


def moment_vector_of_point(point: Sequence[float], degree: int) -> MomentVector:
    """Truncated moments of the unit point mass at `point`."""
    return MomentVector.from_atoms([list(point)], [1.0], degree)
