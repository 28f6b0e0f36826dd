"""One structured-text format family for the four problem kinds.

Every file starts with ``kind: pop | gmp | sdp | pencil`` and continues in
named ``[section]`` blocks; ``#`` starts a comment anywhere.  Polynomials use
the expression syntax of the parser (rational coefficients, ``*``, ``^``,
parentheses); all rational data round-trips exactly.

pop:    variables: x1 x2        [objective] min <poly>
        ball: R (optional)      [constraints] <poly> >= 0 | <poly> == 0

gmp:    [measures]  name: v1 v2 ...        (omit when [dynamics] is present)
        [support <name>]  constraint lines, plus optional `ball: R`
        [dynamics]  horizon: free | fixed T, state:, control:, initial:,
                    terminal: (point c1 c2 ... | measure name),
                    lagrangian:, terminal_cost:, then one or more
                    `cell: <name>` groups each followed by f1:, f2:, ...
        [constraints]  sums of <poly, measure> terms (or mass(name))
                       compared with ==, <=, >=
        [objective]  min|max  sum of <poly, measure> terms

sdp:    [blocks], [b], [C], [A k] sparse triplets (see the solver module)

pencil: variables:, side:, then [F0] and [F k] with `i j value` entries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .gmp import (
    DynamicsProblem,
    DynamicsSpec,
    EndpointSpec,
    GMPProblem,
    MeasureDecl,
    MomentConstraint,
    TIME_VAR,
    build_dynamics_gmp,
)
from .polynomials import (
    Polynomial,
    PolynomialParseError,
    VarSpace,
    parse_polynomial,
)
from .relaxation import POPProblem, SemialgebraicSet
from .sdp import ConicProgram, ProgramFormatError, parse_program_text, program_to_text
from .spectra import Pencil


class ProblemFileError(ValueError):
    """Malformed problem file; carries line (and column when known)."""

    def __init__(self, message: str, line: int, column: Optional[int] = None):
        loc = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{message} ({loc})")
        self.line = line
        self.column = column


@dataclass
class DynamicsData:
    spec: DynamicsSpec
    cells: list[tuple[str, list[Polynomial]]]
    initial: EndpointSpec
    terminal: EndpointSpec


@dataclass
class GMPFileData:
    """A GMP file as written: declared measures, explicit rows, dynamics."""

    measures: list[MeasureDecl] = field(default_factory=list)
    constraints: list[MomentConstraint] = field(default_factory=list)
    objective: Optional[list[tuple[str, Polynomial]]] = None
    sense: str = "min"
    dynamics: Optional[DynamicsData] = None

    def measure(self, name: str) -> MeasureDecl:
        for m in self.measures:
            if m.name == name:
                return m
        raise KeyError(f"unknown measure {name!r}")

    def instantiate(self, r: int) -> tuple[GMPProblem, Optional[DynamicsProblem]]:
        """Expand into a solvable problem; dynamics files need the order r."""
        if self.dynamics is None:
            if self.objective is None:
                raise ValueError("a gmp file without dynamics needs an [objective]")
            return (
                GMPProblem(
                    measures=self.measures,
                    constraints=self.constraints,
                    objective=self.objective,
                    sense=self.sense,
                ),
                None,
            )
        supports = {m.name: m.support for m in self.measures}
        dp = build_dynamics_gmp(
            self.dynamics.spec,
            r,
            self.dynamics.cells,
            self.dynamics.initial,
            self.dynamics.terminal,
            supports,
            extra_constraints=self.constraints,
            objective=self.objective,
            sense=self.sense,
        )
        return dp.gmp, dp


@dataclass
class ParsedProblem:
    kind: str
    pop: Optional[POPProblem] = None
    gmp: Optional[GMPFileData] = None
    sdp: Optional[ConicProgram] = None
    pencil: Optional[Pencil] = None


# -- low-level line/section scanning ------------------------------------------


@dataclass
class _Line:
    no: int
    text: str


def _scan(text: str) -> tuple[dict[str, str], list[tuple[str, list[_Line]]], int]:
    """Split into leading `key: value` headers and [section] groups."""
    headers: dict[str, str] = {}
    sections: list[tuple[str, list[_Line]]] = []
    current: Optional[list[_Line]] = None
    kind_line = 0
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ProblemFileError("unterminated section header", no)
            current = []
            sections.append((stripped[1:-1].strip(), current))
            continue
        if current is None:
            if ":" not in stripped:
                raise ProblemFileError("expected `key: value` before the first section", no)
            key, value = stripped.split(":", 1)
            key = key.strip().lower()
            if key in headers:
                raise ProblemFileError(f"duplicate header {key!r}", no)
            headers[key] = value.strip()
            if key == "kind":
                kind_line = no
        else:
            current.append(_Line(no, stripped))
    if "kind" not in headers:
        raise ProblemFileError("missing `kind:` header", kind_line or 1)
    return headers, sections, kind_line


def _poly(text: str, space: VarSpace, line: int) -> Polynomial:
    try:
        return parse_polynomial(text, space)
    except PolynomialParseError as e:
        raise ProblemFileError(str(e), line, e.column + 1)


_REL = re.compile(r"(==|>=|<=)")


def _constraint_poly(line: _Line, space: VarSpace) -> tuple[Polynomial, str]:
    """Parse `p >= 0`-style set constraints into (poly >= 0) or (poly == 0)."""
    parts = _REL.split(line.text)
    if len(parts) != 3:
        raise ProblemFileError("constraint needs exactly one of ==, >=, <=", line.no)
    lhs, rel, rhs = parts
    pl = _poly(lhs, space, line.no)
    pr = _poly(rhs, space, line.no)
    if rel == ">=":
        return pl - pr, "ineq"
    if rel == "<=":
        return pr - pl, "ineq"
    return pl - pr, "eq"


def _parse_support(lines: list[_Line], space: VarSpace) -> SemialgebraicSet:
    ineqs: list[Polynomial] = []
    eqs: list[Polynomial] = []
    ball: Optional[Fraction] = None
    for line in lines:
        if line.text.lower().startswith("ball:"):
            try:
                ball = Fraction(line.text.split(":", 1)[1].strip())
            except ValueError:
                raise ProblemFileError("ball radius must be a rational number", line.no)
            continue
        poly, kind = _constraint_poly(line, space)
        (ineqs if kind == "ineq" else eqs).append(poly)
    return SemialgebraicSet(space, inequalities=ineqs, equalities=eqs, ball_radius=ball)


# -- pop ----------------------------------------------------------------------


def _parse_pop(headers: dict[str, str], sections) -> POPProblem:
    if "variables" not in headers:
        raise ProblemFileError("pop files need a `variables:` header", 1)
    space = VarSpace(tuple(headers["variables"].split()))
    objective: Optional[Polynomial] = None
    ineqs: list[Polynomial] = []
    eqs: list[Polynomial] = []
    ball: Optional[Fraction] = None
    if "ball" in headers:
        ball = Fraction(headers["ball"])
    for name, lines in sections:
        if name == "objective":
            for line in lines:
                body = line.text
                if not body.lower().startswith("min"):
                    raise ProblemFileError("pop objectives are minimized: write `min <poly>`", line.no)
                objective = _poly(body[3:], space, line.no)
        elif name == "constraints":
            for line in lines:
                poly, kind = _constraint_poly(line, space)
                (ineqs if kind == "ineq" else eqs).append(poly)
        else:
            raise ProblemFileError(f"unknown section [{name}] in a pop file", lines[0].no if lines else 1)
    if objective is None:
        raise ProblemFileError("pop files need an [objective] section", 1)
    feasible = SemialgebraicSet(space, inequalities=ineqs, equalities=eqs, ball_radius=ball)
    return POPProblem(objective=objective, feasible_set=feasible)


def pop_to_text(pop: POPProblem) -> str:
    sp = pop.feasible_set.space
    out = ["kind: pop", f"variables: {' '.join(sp.names)}"]
    if pop.feasible_set.ball_radius is not None:
        out.append(f"ball: {pop.feasible_set.ball_radius}")
    out += ["", "[objective]", f"min {pop.objective.to_string(sp)}"]
    out += ["", "[constraints]"]
    for q in pop.feasible_set.inequalities:
        out.append(f"{q.to_string(sp)} >= 0")
    for q in pop.feasible_set.equalities:
        out.append(f"{q.to_string(sp)} == 0")
    return "\n".join(out) + "\n"


# -- gmp ------------------------------------------------------------------------

_TERM = re.compile(r"^<(?P<poly>[^,]+),\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*>$")


def _parse_moment_sum(
    text: str, line_no: int, spaces: dict[str, VarSpace]
) -> list[tuple[str, Polynomial]]:
    """Sum of `<poly, measure>` terms (or mass(name)), with +/- separators."""
    terms: list[tuple[str, Polynomial]] = []
    # split on +/- at depth zero of <...> and (...)
    chunks: list[tuple[int, str]] = []
    depth = 0
    cur = ""
    sign = 1
    for ch in text:
        if ch in "<(":
            depth += 1
        elif ch in ">)":
            depth -= 1
        if depth == 0 and ch in "+-" and cur.strip():
            chunks.append((sign, cur.strip()))
            sign = 1 if ch == "+" else -1
            cur = ""
        elif depth == 0 and ch in "+-" and not cur.strip():
            sign *= 1 if ch == "+" else -1
        else:
            cur += ch
    if cur.strip():
        chunks.append((sign, cur.strip()))
    for sgn, chunk in chunks:
        m = re.match(r"^mass\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*\)$", chunk)
        if m:
            name = m.group(1)
            if name not in spaces:
                raise ProblemFileError(f"unknown measure {name!r}", line_no)
            terms.append((name, Polynomial.constant(spaces[name].n, sgn)))
            continue
        m = _TERM.match(chunk)
        if m is None:
            raise ProblemFileError(
                f"expected `<poly, measure>` or `mass(name)`, got {chunk!r}", line_no
            )
        name = m.group("name")
        if name not in spaces:
            raise ProblemFileError(f"unknown measure {name!r}", line_no)
        poly = _poly(m.group("poly"), spaces[name], line_no)
        terms.append((name, poly * sgn))
    if not terms:
        raise ProblemFileError("empty moment expression", line_no)
    return terms


def _parse_gmp(headers: dict[str, str], sections) -> GMPFileData:
    section_names = [n for n, _ in sections]
    has_dynamics = "dynamics" in section_names
    declared: dict[str, VarSpace] = {}
    support_lines: dict[str, list[_Line]] = {}
    dyn: Optional[DynamicsData] = None

    for name, lines in sections:
        if name == "measures":
            if has_dynamics:
                raise ProblemFileError(
                    "[measures] and [dynamics] are mutually exclusive; dynamics implies its measures",
                    lines[0].no if lines else 1,
                )
            for line in lines:
                if ":" not in line.text:
                    raise ProblemFileError("measure lines look like `name: v1 v2`", line.no)
                mname, vars_ = line.text.split(":", 1)
                mname = mname.strip()
                names = tuple(vars_.split())
                if not names:
                    raise ProblemFileError("measure needs at least one variable", line.no)
                declared[mname] = VarSpace(names)
        elif name.startswith("support"):
            parts = name.split()
            if len(parts) != 2:
                raise ProblemFileError("support sections are [support <measure>]", lines[0].no if lines else 1)
            support_lines[parts[1]] = lines

    if has_dynamics:
        dyn_lines = next(lines for n, lines in sections if n == "dynamics")
        dyn, implied = _parse_dynamics(dyn_lines)
        declared.update(implied)

    spaces = dict(declared)
    measures = []
    for mname, space in declared.items():
        if mname in support_lines:
            supp = _parse_support(support_lines[mname], space)
        else:
            supp = SemialgebraicSet(space)
        measures.append(MeasureDecl(mname, supp))
    for sname in support_lines:
        if sname not in declared:
            raise ProblemFileError(f"support given for undeclared measure {sname!r}", 1)

    constraints: list[MomentConstraint] = []
    objective: Optional[list[tuple[str, Polynomial]]] = None
    sense = "min"
    for name, lines in sections:
        if name == "constraints":
            for line in lines:
                parts = _REL.split(line.text)
                if len(parts) != 3:
                    raise ProblemFileError("constraint needs one of ==, >=, <=", line.no)
                lhs, rel, rhs = parts
                terms = _parse_moment_sum(lhs.strip(), line.no, spaces)
                try:
                    rval = Fraction(rhs.strip())
                except ValueError:
                    raise ProblemFileError("right-hand side must be a rational number", line.no)
                relation = {"==": "eq", ">=": "ge", "<=": "le"}[rel]
                constraints.append(MomentConstraint(terms, rval, relation))
        elif name == "objective":
            for line in lines:
                body = line.text
                low = body.lower()
                if low.startswith("min"):
                    sense, body = "min", body[3:]
                elif low.startswith("max"):
                    sense, body = "max", body[3:]
                else:
                    raise ProblemFileError("objective lines start with min or max", line.no)
                objective = _parse_moment_sum(body.strip(), line.no, spaces)

    return GMPFileData(
        measures=measures,
        constraints=constraints,
        objective=objective,
        sense=sense,
        dynamics=dyn,
    )


def _parse_dynamics(lines: list[_Line]) -> tuple[DynamicsData, dict[str, VarSpace]]:
    horizon: Optional[Fraction] = None
    horizon_seen = False
    states: tuple[str, ...] = ()
    controls: tuple[str, ...] = ()
    lagrangian_text: Optional[tuple[str, int]] = None
    terminal_cost_text: Optional[tuple[str, int]] = None
    initial: Optional[EndpointSpec] = None
    terminal: Optional[EndpointSpec] = None
    cells: list[tuple[str, dict[int, tuple[str, int]]]] = []

    def _endpoint(value: str, no: int) -> EndpointSpec:
        parts = value.split()
        if parts and parts[0] == "point":
            try:
                return tuple(Fraction(v) for v in parts[1:])
            except ValueError:
                raise ProblemFileError("endpoint point coordinates must be rational", no)
        if len(parts) == 2 and parts[0] == "measure":
            return parts[1]
        raise ProblemFileError("endpoints are `point c1 c2 ...` or `measure name`", no)

    for line in lines:
        if ":" not in line.text:
            raise ProblemFileError("dynamics lines look like `key: value`", line.no)
        key, value = line.text.split(":", 1)
        key = key.strip().lower()
        value = value.strip()
        if key == "horizon":
            horizon_seen = True
            if value == "free":
                horizon = None
            else:
                parts = value.split()
                if len(parts) != 2 or parts[0] != "fixed":
                    raise ProblemFileError("horizon is `free` or `fixed T`", line.no)
                horizon = Fraction(parts[1])
        elif key == "state":
            states = tuple(value.split())
        elif key == "control":
            controls = tuple(value.split())
        elif key == "lagrangian":
            lagrangian_text = (value, line.no)
        elif key == "terminal_cost":
            terminal_cost_text = (value, line.no)
        elif key == "initial":
            initial = _endpoint(value, line.no)
        elif key == "terminal":
            terminal = _endpoint(value, line.no)
        elif key == "cell" or key == "occupation":
            cells.append((value, {}))
        elif re.fullmatch(r"f\d+", key):
            if not cells:
                raise ProblemFileError("f<i> lines belong to a `cell:` group", line.no)
            cells[-1][1][int(key[1:])] = (value, line.no)
        else:
            raise ProblemFileError(f"unknown dynamics key {key!r}", line.no)

    first = lines[0].no if lines else 1
    if not states:
        raise ProblemFileError("dynamics needs `state:` variables", first)
    if not horizon_seen:
        raise ProblemFileError("dynamics needs `horizon: free` or `horizon: fixed T`", first)
    if initial is None or terminal is None:
        raise ProblemFileError("dynamics needs `initial:` and `terminal:`", first)
    if not cells:
        raise ProblemFileError("dynamics needs at least one `cell:` with f<i> lines", first)

    dspace = VarSpace((TIME_VAR,) + states + controls)
    lagrangian = (
        _poly(lagrangian_text[0], dspace, lagrangian_text[1])
        if lagrangian_text
        else Polynomial.zero(dspace.n)
    )
    state_space = VarSpace(states)
    terminal_cost = (
        _poly(terminal_cost_text[0], state_space, terminal_cost_text[1])
        if terminal_cost_text
        else None
    )
    parsed_cells: list[tuple[str, list[Polynomial]]] = []
    for cname, fmap in cells:
        fs: list[Polynomial] = []
        for i in range(1, len(states) + 1):
            if i not in fmap:
                raise ProblemFileError(f"cell {cname!r} is missing f{i}", first)
            fs.append(_poly(fmap[i][0], dspace, fmap[i][1]))
        parsed_cells.append((cname, fs))

    spec = DynamicsSpec(
        states=states,
        controls=controls,
        f=parsed_cells[0][1],
        lagrangian=lagrangian,
        terminal_cost=terminal_cost,
        horizon=horizon,
    )
    occ_names = spec.occupation_names()
    implied: dict[str, VarSpace] = {c: VarSpace(occ_names) for c, _ in parsed_cells}
    for endpoint in (initial, terminal):
        if isinstance(endpoint, str):
            implied[endpoint] = state_space
    data = DynamicsData(
        spec=spec, cells=parsed_cells, initial=initial, terminal=terminal
    )
    return data, implied


def gmp_to_text(data: GMPFileData) -> str:
    out = ["kind: gmp"]
    dyn = data.dynamics
    implied: set[str] = set()
    if dyn is not None:
        implied = {c for c, _ in dyn.cells}
        for e in (dyn.initial, dyn.terminal):
            if isinstance(e, str):
                implied.add(e)
    else:
        out += ["", "[measures]"]
        for m in data.measures:
            out.append(f"{m.name}: {' '.join(m.variables)}")
    for m in data.measures:
        supp = m.support
        if not (supp.inequalities or supp.equalities or supp.ball_radius is not None):
            continue
        out += ["", f"[support {m.name}]"]
        for q in supp.inequalities:
            out.append(f"{q.to_string(supp.space)} >= 0")
        for q in supp.equalities:
            out.append(f"{q.to_string(supp.space)} == 0")
        if supp.ball_radius is not None:
            out.append(f"ball: {supp.ball_radius}")
    if dyn is not None:
        spec = dyn.spec
        out += ["", "[dynamics]"]
        out.append(
            "horizon: free" if spec.autonomous else f"horizon: fixed {spec.horizon}"
        )
        out.append(f"state: {' '.join(spec.states)}")
        if spec.controls:
            out.append(f"control: {' '.join(spec.controls)}")
        dspace = spec.dynamics_space()

        def _endpoint_text(e: EndpointSpec) -> str:
            if isinstance(e, str):
                return f"measure {e}"
            return "point " + " ".join(str(v) for v in e)

        out.append(f"initial: {_endpoint_text(dyn.initial)}")
        out.append(f"terminal: {_endpoint_text(dyn.terminal)}")
        if not spec.lagrangian.is_zero():
            out.append(f"lagrangian: {spec.lagrangian.to_string(dspace)}")
        if spec.terminal_cost is not None and not spec.terminal_cost.is_zero():
            out.append(
                f"terminal_cost: {spec.terminal_cost.to_string(VarSpace(spec.states))}"
            )
        for cname, fs in dyn.cells:
            out.append(f"cell: {cname}")
            for i, f in enumerate(fs, start=1):
                out.append(f"f{i}: {f.to_string(dspace)}")

    spaces = {m.name: m.support.space for m in data.measures}

    def _sum_text(terms: Sequence[tuple[str, Polynomial]]) -> str:
        parts = []
        for name, poly in terms:
            parts.append(f"<{poly.to_string(spaces[name])}, {name}>")
        return " + ".join(parts)

    if data.constraints:
        out += ["", "[constraints]"]
        rel_text = {"eq": "==", "ge": ">=", "le": "<="}
        for con in data.constraints:
            out.append(f"{_sum_text(con.terms)} {rel_text[con.relation]} {con.rhs}")
    if data.objective is not None:
        out += ["", "[objective]", f"{data.sense} {_sum_text(data.objective)}"]
    return "\n".join(out) + "\n"


def dynamics_to_file_data(dp: DynamicsProblem) -> GMPFileData:
    """Fold an expanded dynamics problem back into its file form.

    Inverse of `GMPFileData.instantiate` up to the relaxation order: the
    generated transport rows, auto-added time boxes and default mass caps are
    stripped so the result serializes like a hand-written file.
    """
    spec = dp.dynamics
    n_li = len(dp.liouville_rows)
    user_constraints = list(dp.gmp.constraints[n_li:])
    measures: list[MeasureDecl] = []
    occ_names = {name for name, _ in dp.cells}
    for m in dp.gmp.measures:
        supp = m.support
        if m.name in occ_names and not spec.autonomous:
            nv = len(m.variables)
            tvar = Polynomial.variable(nv, 0)
            timebox = tvar * (Polynomial.constant(nv, 1) - tvar)
            ineqs = [q for q in supp.inequalities if q != timebox]
            supp = SemialgebraicSet(
                supp.space,
                inequalities=ineqs,
                equalities=list(supp.equalities),
                ball_radius=supp.ball_radius,
            )
        measures.append(MeasureDecl(m.name, supp))
    return GMPFileData(
        measures=measures,
        constraints=user_constraints,
        objective=list(dp.gmp.objective),
        sense=dp.gmp.sense,
        dynamics=DynamicsData(
            spec=spec, cells=dp.cells, initial=dp.initial, terminal=dp.terminal
        ),
    )


# -- pencil ---------------------------------------------------------------------


def _parse_pencil(headers: dict[str, str], sections) -> Pencil:
    if "variables" not in headers or "side" not in headers:
        raise ProblemFileError("pencil files need `variables:` and `side:` headers", 1)
    names = tuple(headers["variables"].split())
    side = int(headers["side"])
    n = len(names)
    mats: list[list[list[Fraction]]] = [
        [[Fraction(0)] * side for _ in range(side)] for _ in range(n + 1)
    ]
    for name, lines in sections:
        if name == "F0":
            k = 0
        else:
            parts = name.split()
            if len(parts) != 2 or parts[0] != "F":
                raise ProblemFileError(f"unknown section [{name}] in a pencil file", lines[0].no if lines else 1)
            k = int(parts[1])
            if not 1 <= k <= n:
                raise ProblemFileError(f"pencil matrix index {k} out of range", lines[0].no if lines else 1)
        for line in lines:
            parts = line.text.split()
            if len(parts) != 3:
                raise ProblemFileError("pencil entries are `i j value`", line.no)
            try:
                i, j, v = int(parts[0]), int(parts[1]), Fraction(parts[2])
            except ValueError:
                raise ProblemFileError("bad pencil entry", line.no)
            if not (1 <= i <= side and 1 <= j <= side):
                raise ProblemFileError(f"entry ({i},{j}) outside the {side}x{side} matrix", line.no)
            mats[k][i - 1][j - 1] = v
            mats[k][j - 1][i - 1] = v
    return Pencil(
        nvars=n, side=side, coefficients=[tuple(tuple(row) for row in M) for M in mats]
    )


def pencil_to_text(pencil: Pencil, variable_names: Optional[Sequence[str]] = None) -> str:
    names = list(variable_names or (f"x{i+1}" for i in range(pencil.nvars)))
    out = ["kind: pencil", f"variables: {' '.join(names)}", f"side: {pencil.side}"]
    for k, M in enumerate(pencil.coefficients):
        header = "F0" if k == 0 else f"F {k}"
        entries = []
        for i in range(pencil.side):
            for j in range(i, pencil.side):
                if M[i][j] != 0:
                    entries.append(f"{i + 1} {j + 1} {M[i][j]}")
        if entries or k == 0:
            out += ["", f"[{header}]"] + entries
    return "\n".join(out) + "\n"


# -- entry points ----------------------------------------------------------------


def parse_problem_text(text: str) -> ParsedProblem:
    headers, sections, kind_line = _scan(text)
    kind = headers["kind"].lower()
    if kind == "pop":
        return ParsedProblem(kind="pop", pop=_parse_pop(headers, sections))
    if kind == "gmp":
        return ParsedProblem(kind="gmp", gmp=_parse_gmp(headers, sections))
    if kind == "sdp":
        try:
            return ParsedProblem(kind="sdp", sdp=parse_program_text(text))
        except ProgramFormatError as e:
            raise ProblemFileError(str(e), e.line)
    if kind == "pencil":
        return ParsedProblem(kind="pencil", pencil=_parse_pencil(headers, sections))
    raise ProblemFileError(f"unknown kind {headers['kind']!r}", kind_line)


def load_problem(path: str) -> ParsedProblem:
    with open(path, "r") as f:
        return parse_problem_text(f.read())


def problem_to_text(p: ParsedProblem) -> str:
    if p.kind == "pop":
        return pop_to_text(p.pop)
    if p.kind == "gmp":
        return gmp_to_text(p.gmp)
    if p.kind == "sdp":
        return program_to_text(p.sdp)
    if p.kind == "pencil":
        return pencil_to_text(p.pencil)
    raise ValueError(f"unknown kind {p.kind!r}")
