from fractions import Fraction

import numpy as np
import pytest

from momentsdp.casestudies import build_polyopt, build_unit_disk
from momentsdp.moments import evaluate_stencil, moment_matrix_stencil
from momentsdp.polynomials import Polynomial, VarSpace, monomial_count, parse_polynomial
from momentsdp.relaxation import (
    OrderTooSmallError,
    POPProblem,
    SemialgebraicSet,
    bound_and_moments,
    build_relaxation,
    half_degree,
    measure_plan,
    moment_vector_of_point,
)
from momentsdp.sdp import SolveOptions

HI = SolveOptions(gap_tol=1e-8, feas_tol=1e-8)
PHI_BOUND = -(1 + np.sqrt(5.0)) / 2


class TestHalfDegree:
    @pytest.mark.parametrize(
        "text,expected",
        [("x1^3", 2), ("x1^2 + x2", 1), ("5", 0), ("x1*x2^2 + x1^4", 2)],
    )
    def test_examples(self, text, expected):
        p = parse_polynomial(text, VarSpace.of("x1", "x2"))
        assert half_degree(p) == expected

    def test_zero(self):
        assert half_degree(Polynomial.zero(2)) == 0


class TestStructure:
    def test_polyopt_order_one(self):
        asm, info = build_relaxation(build_polyopt(), 1)
        assert info.block_sizes == [3, 1, 1, 1]
        assert info.moment_dim == 6
        assert asm.num_moments == 6
        assert info.r_x == 1 and info.r_k == [1, 1, 1]
        assert [b.kind for b in asm.program.blocks] == ["psd"] * 4 + ["zero"]

    def test_polyopt_order_two(self):
        asm, info = build_relaxation(build_polyopt(), 2)
        assert info.block_sizes == [6, 3, 3, 3]
        assert info.moment_dim == 15
        assert asm.num_moments == monomial_count(2, 4)

    def test_moment_dim_general(self):
        pop = build_polyopt()
        for r in (1, 2, 3):
            asm, info = build_relaxation(pop, r)
            assert asm.num_moments == monomial_count(2, 2 * r)

    def test_order_below_minimum_reports_it(self):
        sp = VarSpace.of("x1")
        pop = POPProblem(
            parse_polynomial("x1", sp),
            SemialgebraicSet(sp, inequalities=[parse_polynomial("1 - x1^4", sp)]),
        )
        with pytest.raises(OrderTooSmallError) as ei:
            build_relaxation(pop, 1)
        assert ei.value.minimal_order == 2

    def test_compactness_flag(self):
        sp = VarSpace.of("x1", "x2")
        no_ball = SemialgebraicSet(sp, inequalities=[parse_polynomial("x1", sp)])
        assert not no_ball.certifies_compactness()
        asm, info = build_relaxation(POPProblem(parse_polynomial("x1", sp), no_ball), 1)
        assert not info.compactness_certified
        assert build_polyopt().feasible_set.certifies_compactness()
        with_ball = SemialgebraicSet(sp, ball_radius=Fraction(4))
        assert with_ball.certifies_compactness()

    def test_ball_constraint_appended(self):
        sp = VarSpace.of("x1")
        feas = SemialgebraicSet(sp, ball_radius=Fraction(4))
        pop = POPProblem(parse_polynomial("x1^2", sp), feas)
        asm, info = build_relaxation(pop, 1)
        # moment block 2x2 plus the 1x1 ball localizer l(4 - x^2) >= 0
        assert info.block_sizes == [2, 1]
        res = bound_and_moments(pop, 1, HI)
        assert res.solution.status == "optimal"
        assert res.bound == pytest.approx(0.0, abs=1e-8)


class TestBounds:
    def test_polyopt_bounds(self):
        pop = build_polyopt()
        r1 = bound_and_moments(pop, 1, HI)
        r2 = bound_and_moments(pop, 2, HI)
        assert r1.solution.status == "optimal"
        assert r2.solution.status == "optimal"
        assert r1.bound == pytest.approx(-2.0, abs=1e-8)
        assert r2.bound == pytest.approx(PHI_BOUND, abs=1e-8)

    def test_monotone_in_order(self):
        pop = build_polyopt()
        b1 = bound_and_moments(pop, 1, HI).bound
        b2 = bound_and_moments(pop, 2, HI).bound
        assert b1 <= b2 + 1e-6

    def test_positive_orthant_corner(self):
        sp = VarSpace.of("x1", "x2")
        feas = SemialgebraicSet(
            sp,
            inequalities=[parse_polynomial("x1", sp), parse_polynomial("x2", sp)],
            ball_radius=Fraction(1),
        )
        pop = POPProblem(parse_polynomial("x1 + x2", sp), feas)
        res = bound_and_moments(pop, 1, HI)
        assert res.solution.status == "optimal"
        assert res.bound == pytest.approx(0.0, abs=1e-7)

    def test_bound_below_sampled_feasible_values(self):
        pop = build_polyopt()
        res = bound_and_moments(pop, 2, HI)
        rng = np.random.default_rng(2)
        found = 0
        while found < 50:
            x = rng.uniform([-3, -3], [3, 3])
            if pop.feasible_set.contains(x):
                found += 1
                assert res.bound <= float(pop.objective.evaluate(list(x))) + 1e-6

    def test_dirac_moments_of_feasible_points_satisfy_blocks(self):
        pop = build_polyopt()
        plan = measure_plan(pop.feasible_set, 2)
        rng = np.random.default_rng(8)
        found = 0
        while found < 25:
            x = rng.uniform([-3, -3], [3, 3])
            if not pop.feasible_set.contains(x):
                continue
            found += 1
            y = moment_vector_of_point(x, 4)
            for st in plan.psd_stencils:
                M = evaluate_stencil(st, y)
                assert np.linalg.eigvalsh(M)[0] >= -1e-9


class TestEqualityHandling:
    def test_equality_rows_pin_products(self):
        # x1^2 = x2 on the segment: moments must satisfy every product row
        sp = VarSpace.of("x1", "x2")
        feas = SemialgebraicSet(
            sp,
            equalities=[parse_polynomial("x1^2 - x2", sp)],
            ball_radius=Fraction(4),
        )
        pop = POPProblem(parse_polynomial("x2 - x1", sp), feas)
        # equality constraints leave no strictly feasible moment matrix, so
        # the objective gap floors around 1e-6; ask only for what is there
        res = bound_and_moments(pop, 2, SolveOptions(gap_tol=1e-5, feas_tol=1e-8))
        assert res.solution.status == "optimal"
        y = res.moments
        # l((x1^2 - x2) * x^alpha) = 0 for every alpha with |alpha| <= 2
        for alpha_idx, alpha in enumerate(y.exponents()):
            if sum(alpha) > 2:
                continue
            v = y.value((alpha[0] + 2, alpha[1])) - y.value((alpha[0], alpha[1] + 1))
            assert abs(v) < 1e-7
        # minimum of x^2 - x on the parabola is -1/4 at x = 1/2
        assert res.bound == pytest.approx(-0.25, abs=1e-4)

    def test_moment_matrix_of_solution_is_psd(self):
        res = bound_and_moments(build_polyopt(), 2, HI)
        M = evaluate_stencil(moment_matrix_stencil(2, 2), res.moments)
        assert np.linalg.eigvalsh(M)[0] >= -1e-8


class TestUnitDisk:
    def test_linear_objective_exact_at_order_one(self):
        disk = build_unit_disk()
        pop = POPProblem(parse_polynomial("x1 + x2", disk.space), disk)
        res = bound_and_moments(pop, 1, HI)
        assert res.solution.status == "optimal"
        assert res.bound == pytest.approx(-np.sqrt(2.0), abs=1e-7)
