"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a mapping from exponent tuples to coefficients.  Coefficients
stay `Fraction` as long as the inputs are rational; they degrade to binary
floats only when float data enters an operation.  The module also fixes the
one monomial order used everywhere else: graded lexicographic (grade first,
then lexicographic with x1 > x2 > ...), so that moment vectors, moment
matrices and solver variables all share a single indexing convention.

Exponent tuples have one entry per variable of a `VarSpace`.  The zero
polynomial has degree 0 by convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence, Union

Exponent = tuple[int, ...]
Coeff = Union[Fraction, float]


@dataclass(frozen=True)
class VarSpace:
    """An ordered, immutable list of variable names."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names: {self.names}")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r} (have {', '.join(self.names)})")

    def __contains__(self, name: str) -> bool:
        return name in self.names

    @staticmethod
    def of(*names: str) -> "VarSpace":
        return VarSpace(tuple(names))


def monomial_count(n: int, d: int) -> int:
    """Number of monomials in `n` variables of total degree at most `d`.

    Equals binomial(n + d, n); computed exactly on arbitrary-size integers,
    so it cannot silently wrap around.
    """
    if n < 0 or d < 0:
        raise ValueError("monomial_count needs n >= 0 and d >= 0")
    return comb(n + d, n)


def _count_exact(nvars: int, deg: int) -> int:
    # monomials of exactly `deg` in `nvars` variables
    if nvars == 0:
        return 1 if deg == 0 else 0
    return comb(deg + nvars - 1, nvars - 1)


def grlex_index(exponent: Exponent) -> int:
    """Rank of an exponent in the graded lexicographic order, starting at 0."""
    n = len(exponent)
    if n == 0:
        return 0
    d = 0
    for e in exponent:
        if e < 0:
            raise ValueError(f"negative exponent in {exponent}")
        d += e
    idx = monomial_count(n, d - 1) if d > 0 else 0
    rem = d
    for i in range(n - 1):
        ei = exponent[i]
        # exponents whose i-th entry exceeds ei precede this one
        for a in range(rem, ei, -1):
            idx += _count_exact(n - i - 1, rem - a)
        rem -= ei
    return idx


def grlex_exponent(n: int, k: int) -> Exponent:
    """Inverse of `grlex_index`: the k-th exponent of n variables."""
    if n <= 0:
        raise ValueError("need at least one variable")
    if k < 0:
        raise ValueError("index must be nonnegative")
    d = 0
    while monomial_count(n, d) <= k:
        d += 1
    rem_k = k - (monomial_count(n, d - 1) if d > 0 else 0)
    rem_d = d
    out: list[int] = []
    for i in range(n - 1):
        for a in range(rem_d, -1, -1):
            c = _count_exact(n - i - 1, rem_d - a)
            if rem_k < c:
                out.append(a)
                rem_d -= a
                break
            rem_k -= c
    out.append(rem_d)
    return tuple(out)


def exponents_up_to(n: int, d: int) -> list[Exponent]:
    """All exponents of n variables with total degree <= d, in grlex order."""
    return [grlex_exponent(n, k) for k in range(monomial_count(n, d))]


def _add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def _as_coeff(value: Union[int, Fraction, float]) -> Coeff:
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (Fraction, float)):
        return value
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


class Polynomial:
    """Immutable sparse polynomial: a dict from exponent tuple to coefficient.

    Zero coefficients are never stored.  All exponents have length `nvars`.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Union[int, Fraction, float]] = ()):
        clean: dict[Exponent, Coeff] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exp, coeff in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} has length {len(exp)}, expected {nvars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = _as_coeff(coeff)
            if c != 0:
                acc = clean.get(exp)
                clean[exp] = c if acc is None else acc + c
                if clean[exp] == 0:
                    del clean[exp]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):  # pragma: no cover - immutability guard
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars, {})

    @staticmethod
    def constant(nvars: int, value: Union[int, Fraction, float]) -> "Polynomial":
        return Polynomial(nvars, {(0,) * nvars: value})

    @staticmethod
    def variable(nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for nvars={nvars}")
        exp = [0] * nvars
        exp[index] = 1
        return Polynomial(nvars, {tuple(exp): 1})

    @staticmethod
    def monomial(exponent: Exponent, coeff: Union[int, Fraction, float] = 1) -> "Polynomial":
        return Polynomial(len(exponent), {tuple(exponent): coeff})

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, exponent: Exponent) -> Coeff:
        return self.terms.get(tuple(exponent), Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- arithmetic --------------------------------------------------------

    def _check_same_space(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: Union["Polynomial", int, Fraction, float]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        self._check_same_space(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            acc = out.get(exp)
            out[exp] = c if acc is None else acc + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Union["Polynomial", int, Fraction, float]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other: Union[int, Fraction, float]) -> "Polynomial":
        return Polynomial.constant(self.nvars, other) - self

    def __mul__(self, other: Union["Polynomial", int, Fraction, float]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = _as_coeff(other)
            if c == 0:
                return Polynomial.zero(self.nvars)
            return Polynomial(self.nvars, {e: v * c for e, v in self.terms.items()})
        self._check_same_space(other)
        out: dict[Exponent, Coeff] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = _add_exponents(ea, eb)
                c = ca * cb
                acc = out.get(e)
                out[e] = c if acc is None else acc + c
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "Polynomial":
        if not isinstance(power, int) or power < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        p = power
        while p:
            if p & 1:
                result = result * base
            base = base * base
            p >>= 1
        return result

    def scale(self, factor: Union[int, Fraction, float]) -> "Polynomial":
        return self * factor

    def partial(self, index: int) -> "Polynomial":
        """Partial derivative with respect to variable `index`."""
        if not 0 <= index < self.nvars:
            raise ValueError(f"variable index {index} out of range")
        out: dict[Exponent, Coeff] = {}
        for exp, c in self.terms.items():
            k = exp[index]
            if k == 0:
                continue
            e = list(exp)
            e[index] = k - 1
            out[tuple(e)] = c * k
        return Polynomial(self.nvars, out)

    # -- evaluation and substitution ----------------------------------------

    def __call__(self, point: Sequence[Union[int, Fraction, float]]):
        return self.evaluate(point)

    def evaluate(self, point: Sequence[Union[int, Fraction, float]]):
        """Evaluate at a point; exact if coefficients and point are rational."""
        if len(point) != self.nvars:
            raise ValueError(f"point has dimension {len(point)}, expected {self.nvars}")
        total = 0
        for exp, c in self.terms.items():
            v = c
            for x, e in zip(point, exp):
                if e:
                    v = v * x**e
            total = total + v
        return total

    def substitute(self, index: int, value: Union[int, Fraction, float]) -> "Polynomial":
        """Fix variable `index` to `value`; the result no longer uses it."""
        if not 0 <= index < self.nvars:
            raise ValueError(f"variable index {index} out of range")
        value = _as_coeff(value)
        out: dict[Exponent, Coeff] = {}
        for exp, c in self.terms.items():
            k = exp[index]
            e = list(exp)
            e[index] = 0
            e = tuple(e)
            v = c * value**k if k else c
            acc = out.get(e)
            out[e] = v if acc is None else acc + v
        return Polynomial(self.nvars, out)

    def map_variables(self, new_nvars: int, mapping: Sequence[int]) -> "Polynomial":
        """Re-index variables: old variable i becomes new variable mapping[i]."""
        if len(mapping) != self.nvars:
            raise ValueError("mapping must cover every variable")
        out: dict[Exponent, Coeff] = {}
        for exp, c in self.terms.items():
            e = [0] * new_nvars
            for old_i, k in enumerate(exp):
                if k:
                    e[mapping[old_i]] += k
            e = tuple(e)
            acc = out.get(e)
            out[e] = c if acc is None else acc + c
        return Polynomial(new_nvars, out)

    def used_variables(self) -> set[int]:
        used: set[int] = set()
        for exp in self.terms:
            for i, k in enumerate(exp):
                if k:
                    used.add(i)
        return used

    def top_form(self) -> "Polynomial":
        """Homogeneous part of highest total degree."""
        d = self.degree
        return Polynomial(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def coefficient_vector(self, degree: int) -> list[Coeff]:
        """Coefficients in grlex order, padded with zeros up to `degree`."""
        if self.degree > degree:
            raise ValueError(f"polynomial degree {self.degree} exceeds requested degree {degree}")
        vec: list[Coeff] = [Fraction(0)] * monomial_count(self.nvars, degree)
        for exp, c in self.terms.items():
            vec[grlex_index(exp)] = c
        return vec

    # -- printing -----------------------------------------------------------

    def to_string(self, space: VarSpace | None = None) -> str:
        if space is not None and space.n != self.nvars:
            raise ValueError("variable space does not match polynomial")
        names = space.names if space is not None else tuple(f"x{i+1}" for i in range(self.nvars))
        if not self.terms:
            return "0"
        parts: list[str] = []
        for exp in sorted(self.terms, key=grlex_index):
            c = self.terms[exp]
            factors = []
            for name, e in zip(names, exp):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            if isinstance(c, Fraction) and c.denominator == 1:
                cs = str(c.numerator)
            else:
                cs = str(c)
            if mono:
                body = mono if cs == "1" else (f"-{mono}" if cs == "-1" else f"{cs}*{mono}")
            else:
                body = cs
            if parts and not body.startswith("-"):
                parts.append("+ " + body)
            elif parts:
                parts.append("- " + body[1:])
            else:
                parts.append(body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_string()})"


# -- parsing ----------------------------------------------------------------


class PolynomialParseError(ValueError):
    """Raised on malformed polynomial text; carries the offending column."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column + 1})")
        self.column = column


_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise PolynomialParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "number":
            tokens.append(("number", m.group("number"), m.start("number")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, space: VarSpace):
        self.tokens = _tokenize(text)
        self.space = space
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, val, col = self.peek()
        if kind != "end":
            raise PolynomialParseError(f"unexpected token {val!r}", col)
        return p

    def expr(self) -> Polynomial:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.next()
            p = self.term()
            if val == "-":
                p = -p
        else:
            p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self) -> Polynomial:
        p = self.factor()
        while True:
            kind, val, col = self.peek()
            if kind == "op" and val == "*":
                self.next()
                p = p * self.factor()
            elif kind == "op" and val == "/":
                self.next()
                q = self.factor()
                if q.degree != 0 or q.is_zero():
                    raise PolynomialParseError("division only by nonzero constants", col)
                c = q.coeff((0,) * q.nvars)
                if isinstance(c, Fraction):
                    p = p * (Fraction(1) / c)
                else:
                    p = p * (1.0 / c)
            else:
                return p

    def factor(self) -> Polynomial:
        kind, val, col = self.peek()
        if kind == "op" and val in "+-":
            self.next()
            p = self.factor()
            return -p if val == "-" else p
        p = self.atom()
        kind, val, col = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, val, col = self.next()
            if kind != "number" or "." in val:
                raise PolynomialParseError("exponent must be a nonnegative integer", col)
            p = p ** int(val)
        return p

    def atom(self) -> Polynomial:
        kind, val, col = self.next()
        if kind == "number":
            return Polynomial.constant(self.space.n, Fraction(val))
        if kind == "name":
            if val not in self.space:
                raise PolynomialParseError(
                    f"unknown variable {val!r} (have {', '.join(self.space.names)})", col
                )
            return Polynomial.variable(self.space.n, self.space.index(val))
        if kind == "op" and val == "(":
            p = self.expr()
            kind, val, col = self.next()
            if not (kind == "op" and val == ")"):
                raise PolynomialParseError("expected ')'", col)
            return p
        raise PolynomialParseError(f"unexpected token {val!r}" if val else "unexpected end of input", col)


def parse_polynomial(text: str, space: VarSpace) -> Polynomial:
    """Parse text like ``3/4*x1 + x2 - 2/5`` over the given variables.

    Whitespace-insensitive.  Accepts integers, decimals and a/b rationals
    (all kept exact), ``*`` products, ``^`` integer powers and parentheses.
    """
    return _Parser(text, space).parse()
