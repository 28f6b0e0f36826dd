"""Truncated moment vectors, the Riesz functional, and matrix stencils.

A moment vector holds the values y_alpha for all exponents alpha up to a
degree bound, laid out in grlex order.  A stencil describes, symbolically,
which linear combination of moments occupies each cell of a moment matrix
(entry (i,j) reads y_{e_i+e_j}) or of a localizing matrix (entry (i,j) reads
sum_gamma q_gamma y_{e_i+e_j+gamma} for a fixed polynomial q).  Stencils are
built once and reused: the relaxation assembler evaluates the same stencil
both to place solver coefficients and to reconstruct matrices from solved
moments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .polynomials import (
    Coeff,
    Exponent,
    Polynomial,
    exponents_up_to,
    grlex_index,
    monomial_count,
)


class MissingMomentError(KeyError):
    """A required moment lies beyond the truncation degree."""

    def __init__(self, exponent: Exponent, degree: int):
        super().__init__(f"moment y_{exponent} is not available at truncation degree {degree}")
        self.exponent = exponent


@dataclass
class MomentVector:
    """Moments (y_alpha), |alpha| <= degree, indexed by grlex rank."""

    nvars: int
    degree: int
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = monomial_count(self.nvars, self.degree)
        self.values = np.asarray(self.values)
        if self.values.shape != (expected,):
            raise ValueError(
                f"moment vector needs {expected} entries for nvars={self.nvars}, "
                f"degree={self.degree}; got shape {self.values.shape}"
            )

    @property
    def mass(self):
        return self.values[0]

    def value(self, exponent: Exponent):
        exponent = tuple(exponent)
        if sum(exponent) > self.degree:
            raise MissingMomentError(exponent, self.degree)
        return self.values[grlex_index(exponent)]

    def exponents(self) -> list[Exponent]:
        return exponents_up_to(self.nvars, self.degree)

    def truncated(self, degree: int) -> "MomentVector":
        if degree > self.degree:
            raise ValueError("cannot extend a moment vector by truncation")
        return MomentVector(self.nvars, degree, self.values[: monomial_count(self.nvars, degree)])

    @staticmethod
    def from_atoms(
        points: Sequence[Sequence[Union[int, float, Fraction]]],
        weights: Sequence[Union[int, float, Fraction]],
        degree: int,
        exact: bool = False,
    ) -> "MomentVector":
        """Moments of the atomic measure sum_i weights[i] * delta_{points[i]}.

        With ``exact=True`` and rational data the result holds Fractions.
        """
        if len(points) != len(weights):
            raise ValueError("need one weight per point")
        if len(points) == 0:
            raise ValueError("need at least one atom")
        nvars = len(points[0])
        exps = exponents_up_to(nvars, degree)
        if exact:
            vals = np.empty(len(exps), dtype=object)
            for k, e in enumerate(exps):
                total = Fraction(0)
                for p, w in zip(points, weights):
                    m = Fraction(w)
                    for x, a in zip(p, e):
                        m *= Fraction(x) ** a
                    total += m
                vals[k] = total
            return MomentVector(nvars, degree, vals)
        pts = np.asarray(points, dtype=float)
        ws = np.asarray(weights, dtype=float)
        vals = np.empty(len(exps))
        for k, e in enumerate(exps):
            vals[k] = float(np.sum(ws * np.prod(pts ** np.asarray(e, dtype=float), axis=1)))
        return MomentVector(nvars, degree, vals)


def riesz_apply(p: Polynomial, y: MomentVector):
    """Apply the linear functional of `y` to `p`: sum_alpha p_alpha y_alpha."""
    if p.nvars != y.nvars:
        raise ValueError(f"variable count mismatch: polynomial has {p.nvars}, moments have {y.nvars}")
    total = 0
    for exp, c in p.terms.items():
        if sum(exp) > y.degree:
            raise MissingMomentError(exp, y.degree)
        total = total + c * y.values[grlex_index(exp)]
    return total


@dataclass
class MatrixStencil:
    """Symbolic symmetric matrix whose cells are linear functionals of y.

    ``cells[(i, j)]`` for i <= j lists (exponent, coefficient) pairs; the cell
    value at a moment vector y is sum of coeff * y_exponent.  ``row_exponents``
    are the grlex monomials indexing rows and columns.
    """

    nvars: int
    order: int
    cells: dict[tuple[int, int], list[tuple[Exponent, Coeff]]]
    row_exponents: list[Exponent] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.row_exponents:
            self.row_exponents = exponents_up_to(self.nvars, self.order)

    @property
    def side(self) -> int:
        return len(self.row_exponents)

    def max_total_degree(self) -> int:
        return max(
            (sum(exp) for pairs in self.cells.values() for exp, _ in pairs),
            default=0,
        )

    def cell(self, i: int, j: int) -> list[tuple[Exponent, Coeff]]:
        if i > j:
            i, j = j, i
        return self.cells[(i, j)]


def moment_matrix_stencil(nvars: int, order: int) -> MatrixStencil:
    """Stencil of the order-d moment matrix: cell (i,j) reads y_{e_i+e_j}."""
    rows = exponents_up_to(nvars, order)
    cells: dict[tuple[int, int], list[tuple[Exponent, Coeff]]] = {}
    for i, ei in enumerate(rows):
        for j in range(i, len(rows)):
            s = tuple(a + b for a, b in zip(ei, rows[j]))
            cells[(i, j)] = [(s, Fraction(1))]
    return MatrixStencil(nvars, order, cells, rows)


def localizing_matrix_stencil(q: Polynomial, order: int) -> MatrixStencil:
    """Stencil of the order-d localizing matrix of q.

    Cell (i,j) reads sum_gamma q_gamma y_{e_i+e_j+gamma}; with q = 1 this is
    exactly the moment matrix stencil.
    """
    rows = exponents_up_to(q.nvars, order)
    cells: dict[tuple[int, int], list[tuple[Exponent, Coeff]]] = {}
    for i, ei in enumerate(rows):
        for j in range(i, len(rows)):
            base = tuple(a + b for a, b in zip(ei, rows[j]))
            pairs: list[tuple[Exponent, Coeff]] = []
            for gamma, c in q.terms.items():
                pairs.append((tuple(a + b for a, b in zip(base, gamma)), c))
            pairs.sort(key=lambda pc: grlex_index(pc[0]))
            cells[(i, j)] = pairs
    return MatrixStencil(q.nvars, order, cells, rows)


def evaluate_stencil(stencil: MatrixStencil, y: MomentVector) -> np.ndarray:
    """Numeric symmetric matrix of a stencil at a moment vector.

    Symmetry is structural: only the upper triangle is computed and the
    result is mirrored.
    """
    if stencil.nvars != y.nvars:
        raise ValueError("stencil and moment vector use different variable counts")
    n = stencil.side
    out = np.zeros((n, n))
    for (i, j), pairs in stencil.cells.items():
        v = 0.0
        for exp, c in pairs:
            if sum(exp) > y.degree:
                raise MissingMomentError(exp, y.degree)
            v += float(c) * float(y.values[grlex_index(exp)])
        out[i, j] = v
        out[j, i] = v
    return out


def lebesgue_moments_01(degree: int) -> MomentVector:
    """Moments of the uniform measure on [0, 1]: y_a = 1/(a+1).  Test helper."""
    vals = np.array([1.0 / (a + 1) for a in range(degree + 1)])
    return MomentVector(1, degree, vals)
