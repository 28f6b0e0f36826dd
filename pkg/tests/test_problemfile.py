import glob
import os
from fractions import Fraction

import pytest

from momentsdp.casestudies import (
    build_bolza,
    build_eig_assign,
    build_lqr,
    build_occtraj,
    build_polyopt,
    build_saturation_cells,
)
from momentsdp.problemfile import (
    ProblemFileError,
    load_problem,
    parse_problem_text,
    problem_to_text,
)

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def fixture_paths():
    return sorted(glob.glob(os.path.join(FIXTURES, "*")))


class TestFixtures:
    def test_all_fixtures_parse(self):
        kinds = {}
        for path in fixture_paths():
            parsed = load_problem(path)
            kinds[os.path.basename(path)] = parsed.kind
        assert kinds["planar_nonconvex.pop"] == "pop"
        assert kinds["sqrt2.sdp"] == "sdp"
        assert kinds["pillow.pencil"] == "pencil"
        assert kinds["bolza.gmp"] == "gmp"
        assert len(kinds) >= 13

    @pytest.mark.parametrize("path", fixture_paths(), ids=os.path.basename)
    def test_parse_print_parse_is_identity(self, path):
        p1 = load_problem(path)
        text = problem_to_text(p1)
        p2 = parse_problem_text(text)
        assert p1.kind == p2.kind
        if p1.kind == "pop":
            assert p1.pop == p2.pop
        elif p1.kind == "pencil":
            assert p1.pencil == p2.pencil
        elif p1.kind == "gmp":
            assert p1.gmp.measures == p2.gmp.measures
            assert p1.gmp.constraints == p2.gmp.constraints
            assert p1.gmp.objective == p2.gmp.objective
            assert p1.gmp.sense == p2.gmp.sense
            d1, d2 = p1.gmp.dynamics, p2.gmp.dynamics
            assert (d1 is None) == (d2 is None)
            if d1 is not None:
                assert d1.spec == d2.spec
                assert d1.cells == d2.cells
                assert d1.initial == d2.initial and d1.terminal == d2.terminal
        else:
            import numpy as np

            assert [(b.kind, b.size) for b in p1.sdp.blocks] == [
                (b.kind, b.size) for b in p2.sdp.blocks
            ]
            assert np.array_equal(p1.sdp.b, p2.sdp.b)
            for bi in range(len(p1.sdp.blocks)):
                assert np.array_equal(p1.sdp.A[bi], p2.sdp.A[bi])
                assert np.array_equal(p1.sdp.C[bi], p2.sdp.C[bi])

    def test_gmp_fixtures_match_builders(self):
        cases = [
            ("decay_energy.gmp", build_occtraj),
            ("lqr_scalar.gmp", build_lqr),
            ("bolza.gmp", build_bolza),
            ("saturation3.gmp", build_saturation_cells),
        ]
        for fname, builder in cases:
            parsed = load_problem(os.path.join(FIXTURES, fname))
            g, dp = parsed.gmp.instantiate(2)
            assert g == builder(2).gmp, fname

    def test_pop_fixtures_match_builders(self):
        parsed = load_problem(os.path.join(FIXTURES, "planar_nonconvex.pop"))
        assert parsed.pop == build_polyopt()
        for n in (2, 3, 4):
            parsed = load_problem(os.path.join(FIXTURES, f"eigassign{n}.pop"))
            assert parsed.pop == build_eig_assign(n)


class TestParseErrors:
    def test_missing_kind(self):
        with pytest.raises(ProblemFileError) as ei:
            parse_problem_text("variables: x1\n")
        assert "kind" in str(ei.value)

    def test_unknown_kind(self):
        with pytest.raises(ProblemFileError):
            parse_problem_text("kind: lp\n")

    def test_error_reports_line(self):
        text = "kind: pop\nvariables: x1\n\n[objective]\nmin x1\n\n[constraints]\nx1 >= oops\n"
        with pytest.raises(ProblemFileError) as ei:
            parse_problem_text(text)
        assert ei.value.line == 8
        assert "column" in str(ei.value)

    def test_polynomial_error_carries_column(self):
        text = "kind: pop\nvariables: x1\n\n[objective]\nmin x1 + + *\n"
        with pytest.raises(ProblemFileError) as ei:
            parse_problem_text(text)
        assert ei.value.line == 5 and ei.value.column is not None

    def test_pop_requires_objective(self):
        with pytest.raises(ProblemFileError):
            parse_problem_text("kind: pop\nvariables: x1\n\n[constraints]\nx1 >= 0\n")

    def test_unknown_measure_in_constraint(self):
        text = (
            "kind: gmp\n\n[measures]\nmu: x1\n\n[constraints]\nmass(nu) == 1\n"
            "\n[objective]\nmin <x1, mu>\n"
        )
        with pytest.raises(ProblemFileError) as ei:
            parse_problem_text(text)
        assert "nu" in str(ei.value)

    def test_measures_and_dynamics_exclusive(self):
        text = (
            "kind: gmp\n\n[measures]\nmu: x1\n\n[dynamics]\nhorizon: free\nstate: x1\n"
            "initial: point 0\nterminal: point 1\ncell: mu\nf1: 1\n"
        )
        with pytest.raises(ProblemFileError):
            parse_problem_text(text)

    def test_dynamics_needs_all_fields(self):
        text = "kind: gmp\n\n[dynamics]\nhorizon: free\nstate: x1\n"
        with pytest.raises(ProblemFileError):
            parse_problem_text(text)

    def test_missing_cell_dynamics(self):
        text = (
            "kind: gmp\n\n[dynamics]\nhorizon: free\nstate: x1 x2\n"
            "initial: point 0 0\nterminal: point 1 1\ncell: occ\nf1: x2\n"
        )
        with pytest.raises(ProblemFileError) as ei:
            parse_problem_text(text)
        assert "f2" in str(ei.value)

    def test_support_for_unknown_measure(self):
        text = (
            "kind: gmp\n\n[measures]\nmu: x1\n\n[support nu]\nx1 >= 0\n"
            "\n[objective]\nmin <x1, mu>\n"
        )
        with pytest.raises(ProblemFileError):
            parse_problem_text(text)


class TestGMPSemantics:
    def test_plain_gmp_instantiates_without_order_sensitivity(self):
        text = (
            "kind: gmp\n\n[measures]\nmu: x1\n\n[support mu]\n1 - x1^2 >= 0\n"
            "\n[constraints]\nmass(mu) == 1\n\n[objective]\nmin <x1, mu>\n"
        )
        data = parse_problem_text(text).gmp
        g1, dp1 = data.instantiate(1)
        g2, dp2 = data.instantiate(3)
        assert dp1 is None and dp2 is None
        assert g1 == g2

    def test_moment_sum_with_coefficients_folds_into_polynomials(self):
        text = (
            "kind: gmp\n\n[measures]\nmu: x1\nnu: x1\n\n[constraints]\n"
            "<2*x1, mu> - <x1^2, nu> == 1/3\n\n[objective]\nmax <x1, mu> + <x1, nu>\n"
        )
        data = parse_problem_text(text).gmp
        con = data.constraints[0]
        assert con.rhs == Fraction(1, 3)
        assert con.terms[0][1].coeff((1,)) == 2
        assert con.terms[1][1].coeff((2,)) == -1
        assert data.sense == "max"

    def test_gmp_without_objective_or_dynamics_fails_at_instantiation(self):
        text = "kind: gmp\n\n[measures]\nmu: x1\n\n[constraints]\nmass(mu) == 1\n"
        data = parse_problem_text(text).gmp
        with pytest.raises(ValueError):
            data.instantiate(1)


class TestDynamicsSerialization:
    def test_builders_serialize_and_reload(self):
        from momentsdp.problemfile import dynamics_to_file_data, gmp_to_text

        for builder in (build_occtraj, build_lqr, build_bolza, build_saturation_cells):
            dp = builder(2)
            data = dynamics_to_file_data(dp)
            text = gmp_to_text(data)
            back = parse_problem_text(text)
            g, dp2 = back.gmp.instantiate(2)
            assert g == dp.gmp, builder.__name__
