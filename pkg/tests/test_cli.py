import os
import re

import numpy as np
import pytest

from momentsdp.cli import main

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def fx(name: str) -> str:
    return os.path.join(FIXTURES, name)


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report_values(out: str) -> dict:
    vals = {}
    for line in out.splitlines():
        m = re.match(r"^([A-Za-z_ ]+) = (.*)$", line)
        if m:
            vals[m.group(1).strip()] = m.group(2).strip()
    return vals


class TestSolve:
    def test_sqrt2_sdp(self, capsys):
        code, out, _ = run(capsys, "solve", fx("sqrt2.sdp"), "--tol", "1e-12")
        assert code == 0
        vals = report_values(out)
        assert vals["status"] == "optimal"
        assert float(vals["objective"]) == pytest.approx(np.sqrt(2.0), abs=1e-6)

    def test_planar_benchmark_with_extraction(self, capsys):
        code, out, _ = run(
            capsys,
            "solve",
            fx("planar_nonconvex.pop"),
            "--order",
            "2",
            "--tol",
            "1e-9",
            "--extract",
        )
        assert code == 0
        vals = report_values(out)
        assert float(vals["bound"]) == pytest.approx(-(1 + np.sqrt(5.0)) / 2, abs=1e-5)
        assert "flat = true" in out
        m = re.search(r"atom 1: weight = ([\d.eE+-]+) point = ([\d.eE+-]+) ([\d.eE+-]+)", out)
        assert m
        assert float(m.group(2)) == pytest.approx((1 - np.sqrt(5.0)) / 2, abs=1e-4)
        assert float(m.group(3)) == pytest.approx((1 + np.sqrt(5.0)) / 2, abs=1e-4)

    def test_default_order_is_minimal(self, capsys):
        code, out, _ = run(capsys, "solve", fx("planar_nonconvex.pop"))
        assert code == 0
        assert report_values(out)["order"] == "1"

    def test_empty_objective_pop(self, tmp_path, capsys):
        path = tmp_path / "zero.pop"
        path.write_text(
            "kind: pop\nvariables: x1\nball: 4\n\n[objective]\nmin 0\n\n[constraints]\n"
        )
        code, out, _ = run(capsys, "solve", str(path))
        assert code == 0
        assert float(report_values(out)["bound"]) == pytest.approx(0.0, abs=1e-7)

    def test_pencil_solve_lists_defining_polynomials(self, capsys):
        code, out, _ = run(capsys, "solve", fx("pillow.pencil"))
        assert code == 0
        assert "f3 = " in out and "2*x1*x2*x3" in out

    def test_gmp_solve(self, capsys):
        code, out, _ = run(capsys, "solve", fx("bolza.gmp"), "--order", "2")
        assert code == 0
        vals = report_values(out)
        assert -1e-6 <= float(vals["bound"]) <= 1e-3

    def test_missing_file(self, capsys):
        code, out, err = run(capsys, "solve", fx("nonexistent.pop"))
        assert code == 1
        assert "error" in err

    def test_parse_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.pop"
        path.write_text("kind: pop\nvariables: x1\n\n[objective]\nmin ++*\n")
        code, out, err = run(capsys, "solve", str(path))
        assert code == 1
        assert "line" in err

    def test_order_below_minimum_exits_one(self, capsys):
        code, out, err = run(capsys, "solve", fx("eigassign3.pop"), "--order", "1")
        assert code == 1
        assert "2" in err  # names the minimal order

    def test_out_file_deterministic(self, tmp_path, capsys):
        out1 = tmp_path / "a.txt"
        out2 = tmp_path / "b.txt"
        for out in (out1, out2):
            code, _, _ = run(
                capsys, "solve", fx("planar_nonconvex.pop"), "--order", "2",
                "--extract", "--out", str(out),
            )
            assert code == 0
        assert out1.read_text() == out2.read_text()
        assert "runtime" not in out1.read_text()

    def test_twelve_significant_digits(self, capsys):
        code, out, _ = run(capsys, "solve", fx("sqrt2.sdp"), "--tol", "1e-12")
        vals = report_values(out)
        assert re.fullmatch(r"1\.\d{11}", vals["objective"])

    def test_nonconverged_exit_two(self, capsys):
        code, out, _ = run(capsys, "solve", fx("sqrt2.sdp"), "--max-iter", "2")
        assert code == 2
        assert report_values(out)["status"] == "max_iter"


class TestShadow:
    def test_unit_disk_four_directions(self, capsys):
        code, out, _ = run(
            capsys, "shadow", fx("unit_disk.pop"), "--order", "1", "--directions", "4"
        )
        assert code == 0
        rows = [l.split() for l in out.strip().splitlines() if not l.startswith("#")]
        assert len(rows) == 4
        pts = sorted((round(float(r[2]), 6), round(float(r[3]), 6)) for r in rows)
        assert pts == [(-1.0, -0.0), (-0.0, -1.0), (0.0, 1.0), (1.0, 0.0)] or all(
            abs(abs(p[0]) + abs(p[1]) - 1.0) < 1e-5 for p in pts
        )

    def test_planar_benchmark_max_support_value(self, capsys):
        code, out, _ = run(
            capsys, "shadow", fx("planar_nonconvex.pop"), "--order", "1",
            "--directions", "64",
        )
        assert code == 0
        values = {}
        for line in out.strip().splitlines():
            if line.startswith("#"):
                continue
            cx, cy, sx, sy, val = map(float, line.split())
            values[(round(cx, 9), round(cy, 9))] = (sy, val)
        sy, val = values[(0.0, 1.0)]
        assert val == pytest.approx(2.0, abs=1e-5)
        best_sy = max(v[0] for v in values.values())
        assert best_sy == pytest.approx(2.0, abs=1e-4)

    def test_order_below_minimum(self, capsys):
        code, out, err = run(capsys, "shadow", fx("eigassign3.pop"), "--order", "1")
        assert code == 1
        assert "2" in err

    def test_wrong_kind(self, capsys):
        code, out, err = run(capsys, "shadow", fx("sqrt2.sdp"))
        assert code == 1


class TestLiouville:
    def test_decay_rows(self, capsys):
        code, out, _ = run(capsys, "liouville", fx("decay_energy.gmp"), "--order", "2")
        assert code == 0
        vals = report_values(out)
        assert vals["rows"] == "5"
        assert "v = x1: <-x1, occ> + <-x1, term> + <x1, init> == 0" in out
        for alpha in (2, 3, 4):
            assert f"<-{alpha}*x1^{alpha}, occ>" in out

    def test_lqr_rows(self, capsys):
        code, out, _ = run(capsys, "liouville", fx("lqr_scalar.gmp"), "--order", "1")
        assert code == 0
        assert "v = x1: <u1, occ> == -1" in out
        assert "v = x1^2: <2*x1*u1, occ> == -1" in out

    def test_requires_dynamics(self, capsys):
        code, out, err = run(capsys, "liouville", fx("planar_nonconvex.pop"))
        assert code == 1
        assert "dynamics" in err


FIXTURE_SOLVES = [
    ("bolza.gmp", []),
    ("decay_energy.gmp", []),
    ("eigassign2.pop", []),
    ("eigassign3.pop", []),
    ("eigassign4.pop", ["--order", "3", "--tol", "2e-5"]),
    ("lqr_scalar.gmp", []),
    ("pillow.pencil", []),
    ("planar_nonconvex.pop", []),
    ("power_chain.pencil", []),
    ("saturation3.gmp", []),
    ("sqrt2.sdp", []),
    ("sqrt2_point.sdp", []),
    ("unit_disk.pop", []),
]


class TestEveryFixture:
    @pytest.mark.parametrize("name,extra", FIXTURE_SOLVES, ids=[n for n, _ in FIXTURE_SOLVES])
    def test_parses_solves_and_reserializes(self, capsys, name, extra):
        from momentsdp.problemfile import load_problem, parse_problem_text, problem_to_text

        path = fx(name)
        code, out, _ = run(capsys, "solve", path, *extra)
        assert code == 0, out
        p1 = load_problem(path)
        p2 = parse_problem_text(problem_to_text(p1))
        assert p1.kind == p2.kind
