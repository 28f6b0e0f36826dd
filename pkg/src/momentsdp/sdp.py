"""Dense primal-dual interior-point solver for block conic programs.

Standard form.  The primal is

    min  <C, X>   s.t.  <A_k, X> = b_k  (k = 1..m),   X in K,

where K is a product of blocks of three kinds: ``psd`` (symmetric positive
semidefinite), ``nonneg`` (entrywise nonnegative vector) and ``zero`` (free
vector entries whose dual slack is pinned to zero).  The dual is

    max  b'y      s.t.  Z = C - sum_k y_k A_k,   Z in K',

with K' matching K blockwise (psd and nonneg are self-dual; the dual of a
free block is the zero block, i.e. equality constraints on y).  Moment
relaxations arrive in the dual picture: the moments are the vector y, PSD
blocks carry the moment and localizing matrices, and zero blocks carry
normalization and equality rows.

The algorithm is infeasible-start path following on X Z = mu I with the
HKM-style direction (linearize using Z^{-1} and symmetrize the X step) and a
Mehrotra predictor-corrector.  Free entries enter the Newton system directly:
eliminating the cone part leaves a saddle system in (dy, dx_free) which is
solved by two Cholesky factorizations.  Step lengths use a
fraction-to-boundary rule, locating the cone boundary with Cholesky-based
bisection.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

BlockKind = Literal["psd", "nonneg", "zero"]

_REG = 1e-12  # diagonal regularization applied once on Cholesky failure


@dataclass(frozen=True)
class Block:
    kind: BlockKind
    size: int

    def __post_init__(self) -> None:
        if self.kind not in ("psd", "nonneg", "zero"):
            raise ValueError(f"unknown block kind {self.kind!r}")
        if self.size <= 0:
            raise ValueError("block size must be positive")


@dataclass
class ConicProgram:
    """Block conic program data.

    ``A[bi]`` stacks the k-th constraint's block ``bi`` along axis 0: shape
    (m, s, s) for psd blocks and (m, s) for vector blocks.  ``C[bi]`` is
    (s, s) or (s,) accordingly.  PSD data must be symmetric.
    """

    blocks: list[Block]
    A: list[np.ndarray]
    b: np.ndarray
    C: list[np.ndarray]

    def __post_init__(self) -> None:
        self.b = np.asarray(self.b, dtype=float)
        m = len(self.b)
        if len(self.A) != len(self.blocks) or len(self.C) != len(self.blocks):
            raise ValueError("A and C must have one entry per block")
        for bi, blk in enumerate(self.blocks):
            self.A[bi] = np.asarray(self.A[bi], dtype=float)
            self.C[bi] = np.asarray(self.C[bi], dtype=float)
            if blk.kind == "psd":
                if self.A[bi].shape != (m, blk.size, blk.size):
                    raise ValueError(f"block {bi}: A has shape {self.A[bi].shape}")
                if self.C[bi].shape != (blk.size, blk.size):
                    raise ValueError(f"block {bi}: C has shape {self.C[bi].shape}")
            else:
                if self.A[bi].shape != (m, blk.size):
                    raise ValueError(f"block {bi}: A has shape {self.A[bi].shape}")
                if self.C[bi].shape != (blk.size,):
                    raise ValueError(f"block {bi}: C has shape {self.C[bi].shape}")
        if not np.all(np.isfinite(self.b)):
            raise ValueError("b must be finite")
        for bi in range(len(self.blocks)):
            if not (np.all(np.isfinite(self.A[bi])) and np.all(np.isfinite(self.C[bi]))):
                raise ValueError(f"block {bi}: nonfinite data")

    @property
    def m(self) -> int:
        return len(self.b)

    def constraint_matrix(self, k: int) -> list[np.ndarray]:
        """Blocks of A_k, in block order (copy)."""
        return [self.A[bi][k].copy() for bi in range(len(self.blocks))]


@dataclass
class SolveOptions:
    gap_tol: float = 1e-9
    feas_tol: float = 1e-9
    max_iter: int = 200
    step_fraction: float = 0.98
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.gap_tol <= 0 or self.feas_tol <= 0 or self.max_iter <= 0:
            raise ValueError("tolerances and iteration budget must be positive")
        if not 0.0 < self.step_fraction < 1.0:
            raise ValueError("step_fraction must lie in (0, 1)")


Status = Literal["optimal", "infeasible", "unbounded", "max_iter", "numerical_failure"]


@dataclass
class SDPSolution:
    status: Status
    X: list[np.ndarray]
    y: np.ndarray
    Z: list[np.ndarray]
    primal_obj: float
    dual_obj: float
    gap: float  # <X, Z> over the cone blocks
    primal_residual: float
    dual_residual: float
    iterations: int
    mu_final: float
    blocks: list[Block] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)

    @property
    def objective_gap(self) -> float:
        return self.primal_obj - self.dual_obj


def psd_project_check(M: np.ndarray, tol: float = 1e-9) -> tuple[float, bool]:
    """Minimum eigenvalue of a symmetric matrix and whether it clears -tol."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("square matrix required")
    if not np.allclose(M, M.T, atol=1e-12 * max(1.0, float(np.abs(M).max(initial=0.0)))):
        raise ValueError("matrix is not symmetric")
    min_eig = float(np.linalg.eigvalsh(M)[0])
    return min_eig, min_eig >= -tol


def _chol_ok(M: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(M)
        return True
    except np.linalg.LinAlgError:
        return False


def _max_step_psd(X: np.ndarray, D: np.ndarray) -> float:
    """Largest step t <= 1 keeping X + t D positive definite (bisection)."""
    if _chol_ok(X + D):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if _chol_ok(X + mid * D):
            lo = mid
        else:
            hi = mid
    return lo


def _max_step_nonneg(x: np.ndarray, d: np.ndarray) -> float:
    neg = d < 0
    if not np.any(neg):
        return 1.0
    return float(min(1.0, np.min(-x[neg] / d[neg])))


class _Factorization:
    """Cholesky of the Schur complement, with the free-variable bordering."""

    def __init__(self, M: np.ndarray, F: Optional[np.ndarray]):
        self.cho_M = self._factor(M)
        self.F = F
        if F is not None and F.shape[1] > 0:
            W = cho_solve(self.cho_M, F)  # M^{-1} F
            self.W = W
            self.cho_S = self._factor(F.T @ W)
        else:
            self.W = None
            self.cho_S = None

    @staticmethod
    def _factor(M: np.ndarray):
        try:
            return cho_factor(M, lower=True)
        except np.linalg.LinAlgError:
            pass
        scale = max(1.0, float(np.max(np.abs(np.diag(M)), initial=0.0)))
        Mreg = M + (_REG * scale) * np.eye(M.shape[0])
        return cho_factor(Mreg, lower=True)  # second failure propagates

    def _solve_once(self, h: np.ndarray, rf: Optional[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        if self.F is None or self.F.shape[1] == 0:
            return cho_solve(self.cho_M, h), np.zeros(0)
        u = cho_solve(self.cho_M, h)
        dxf = cho_solve(self.cho_S, self.F.T @ u - rf)
        dy = u - self.W @ dxf
        return dy, dxf

    def solve(
        self, h: np.ndarray, rf: Optional[np.ndarray], M: Optional[np.ndarray] = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Solve [[M, F], [F', 0]] [dy, dxf] = [h, rf], with one refinement pass."""
        dy, dxf = self._solve_once(h, rf)
        if M is not None:
            r1 = h - M @ dy
            if self.F is not None and self.F.shape[1] > 0:
                r1 -= self.F @ dxf
                r2 = rf - self.F.T @ dy
            else:
                r2 = None
            e1, e2 = self._solve_once(r1, r2)
            dy = dy + e1
            if self.F is not None and self.F.shape[1] > 0:
                dxf = dxf + e2
        return dy, dxf


def solve(prog: ConicProgram, options: SolveOptions | None = None) -> SDPSolution:
    """Run the interior-point iteration on a conic program."""
    opt = options or SolveOptions()
    m = prog.m
    cone = [bi for bi, blk in enumerate(prog.blocks) if blk.kind != "zero"]
    free = [bi for bi, blk in enumerate(prog.blocks) if blk.kind == "zero"]
    if not cone:
        raise ValueError("program has no cone blocks")
    nu = sum(prog.blocks[bi].size for bi in cone)

    # stacked free-variable data: F (m, p), c_f (p,)
    if free:
        F = np.hstack([prog.A[bi] for bi in free])
        c_f = np.concatenate([prog.C[bi] for bi in free])
        p = F.shape[1]
    else:
        F, c_f, p = None, np.zeros(0), 0

    scale = max(
        1.0,
        float(np.max(np.abs(prog.b), initial=0.0)),
        max(float(np.max(np.abs(prog.C[bi]), initial=0.0)) for bi in range(len(prog.blocks))),
    )
    X: dict[int, np.ndarray] = {}
    Z: dict[int, np.ndarray] = {}
    for bi in cone:
        s = prog.blocks[bi].size
        if prog.blocks[bi].kind == "psd":
            X[bi] = scale * np.eye(s)
            Z[bi] = scale * np.eye(s)
        else:
            X[bi] = scale * np.ones(s)
            Z[bi] = scale * np.ones(s)
    xf = np.zeros(p)
    y = np.zeros(m)

    bnorm = 1.0 + float(np.linalg.norm(prog.b))
    cnorm = 1.0 + float(
        np.sqrt(sum(np.sum(prog.C[bi] ** 2) for bi in range(len(prog.blocks))))
    )

    status: Status = "max_iter"
    trace: list[dict] = []
    it = 0
    mu = float("nan")
    pres = dres = float("inf")
    pobj = dobj = float("nan")
    gap = float("nan")
    last_steps = (0.0, 0.0)
    best_merit = float("inf")
    best_point = None
    regressions = 0

    def _stats():
        rp = prog.b.copy()
        for bi in cone:
            if prog.blocks[bi].kind == "psd":
                rp -= np.einsum("kij,ij->k", prog.A[bi], X[bi])
            else:
                rp -= prog.A[bi] @ X[bi]
        if p:
            rp -= F @ xf
        Rd: dict[int, np.ndarray] = {}
        dnorm2 = 0.0
        for bi in cone:
            At = (
                np.einsum("kij,k->ij", prog.A[bi], y)
                if prog.blocks[bi].kind == "psd"
                else prog.A[bi].T @ y
            )
            Rd[bi] = prog.C[bi] - At - Z[bi]
            dnorm2 += float(np.sum(Rd[bi] ** 2))
        rf = (c_f - F.T @ y) if p else np.zeros(0)
        dnorm2 += float(np.sum(rf**2))
        g = 0.0
        for bi in cone:
            g += float(np.sum(X[bi] * Z[bi]))
        po = float(sum(np.sum(prog.C[bi] * X[bi]) for bi in cone))
        if p:
            po += float(c_f @ xf)
        do = float(prog.b @ y)
        return rp, Rd, rf, g, po, do, float(np.linalg.norm(rp)) / bnorm, float(np.sqrt(dnorm2)) / cnorm

    for it in range(opt.max_iter + 1):
        r_p, Rd, r_f, gap, pobj, dobj, pres, dres = _stats()
        mu = gap / nu

        trace.append(
            {
                "iter": it,
                "mu": mu,
                "gap": gap,
                "pobj": pobj,
                "dobj": dobj,
                "pres": pres,
                "dres": dres,
                "step_p": last_steps[0],
                "step_d": last_steps[1],
            }
        )
        if opt.verbose:
            print(
                f"  it {it:3d}  mu {mu:9.2e}  gap {pobj - dobj:10.3e}  "
                f"pres {pres:8.2e}  dres {dres:8.2e}"
            )

        if not (np.isfinite(mu) and np.isfinite(pobj) and np.isfinite(dobj)):
            status = "numerical_failure"
            break
        merit = max(pres, dres, abs(pobj - dobj) / (1.0 + abs(dobj)))
        if merit < best_merit:
            best_merit = merit
            best_point = (
                {bi: X[bi].copy() for bi in cone},
                {bi: Z[bi].copy() for bi in cone},
                xf.copy(),
                y.copy(),
            )
            regressions = 0
        elif merit > 5.0 * best_merit and mu < 1e-8 * (1.0 + abs(dobj)):
            # endgame degradation; keep the best point seen instead of
            # grinding the Newton system into the floating-point floor
            regressions += 1
            if regressions >= 3:
                status = "max_iter"
                break
        if (
            abs(pobj - dobj) <= opt.gap_tol * (1.0 + abs(dobj))
            and pres <= opt.feas_tol
            and dres <= opt.feas_tol
        ):
            status = "optimal"
            break
        # divergence heuristics: residual stalls while an objective blows up
        if dobj > 1e10 * scale and dres <= 1e-6:
            status = "infeasible"
            break
        if pobj < -1e10 * scale and pres <= 1e-6:
            status = "unbounded"
            break
        if it == opt.max_iter:
            status = "max_iter"
            break
        # at the floating-point floor of the barrier there is nothing left to
        # gain; stop with the current iterate rather than breaking the Newton
        # system (max_iter flags that the requested tolerances were not met)
        if mu < 1e-16 * (1.0 + abs(dobj)):
            status = "max_iter"
            break

        # Schur complement M_kl = sum_blocks tr(A_k Z^{-1} A_l X)
        M = np.zeros((m, m))
        Zinv: dict[int, np.ndarray] = {}
        T: dict[int, np.ndarray] = {}
        try:
            for bi in cone:
                if prog.blocks[bi].kind == "psd":
                    cz = cho_factor(Z[bi], lower=True)
                    s = prog.blocks[bi].size
                    Zinv[bi] = cho_solve(cz, np.eye(s))
                    AX = np.matmul(prog.A[bi], X[bi])  # (m,s,s)
                    T[bi] = np.matmul(Zinv[bi], AX)
                    A2 = prog.A[bi].reshape(m, s * s)
                    T2 = T[bi].transpose(0, 2, 1).reshape(m, s * s)
                    M += A2 @ T2.T
                else:
                    w = X[bi] / Z[bi]
                    M += (prog.A[bi] * w) @ prog.A[bi].T
            M = 0.5 * (M + M.T)
            fact = _Factorization(M, F)
        except np.linalg.LinAlgError:
            status = "numerical_failure"
            break

        def _direction(sigma_mu: float, E: dict[int, np.ndarray]):
            h = r_p.copy()
            G: dict[int, np.ndarray] = {}
            for bi in cone:
                if prog.blocks[bi].kind == "psd":
                    g = sigma_mu * Zinv[bi] - X[bi] - Zinv[bi] @ (Rd[bi] @ X[bi])
                    if bi in E:
                        g = g - Zinv[bi] @ E[bi]
                    G[bi] = g
                    h -= np.einsum("kij,ij->k", prog.A[bi], g)
                else:
                    g = sigma_mu / Z[bi] - X[bi] - Rd[bi] * X[bi] / Z[bi]
                    if bi in E:
                        g = g - E[bi] / Z[bi]
                    G[bi] = g
                    h -= prog.A[bi] @ g
            dy, dxf = fact.solve(h, r_f if p else None, M)
            dX: dict[int, np.ndarray] = {}
            dZ: dict[int, np.ndarray] = {}
            for bi in cone:
                if prog.blocks[bi].kind == "psd":
                    Aty = np.einsum("kij,k->ij", prog.A[bi], dy)
                    dZ[bi] = Rd[bi] - Aty
                    dxb = G[bi] + Zinv[bi] @ (Aty @ X[bi])
                    dX[bi] = 0.5 * (dxb + dxb.T)
                else:
                    Aty = prog.A[bi].T @ dy
                    dZ[bi] = Rd[bi] - Aty
                    dX[bi] = G[bi] + Aty * X[bi] / Z[bi]
            return dX, dy, dZ, dxf

        def _steps(dX, dZ) -> tuple[float, float]:
            ap = ad = 1.0
            for bi in cone:
                if prog.blocks[bi].kind == "psd":
                    ap = min(ap, _max_step_psd(X[bi], dX[bi]))
                    ad = min(ad, _max_step_psd(Z[bi], dZ[bi]))
                else:
                    ap = min(ap, _max_step_nonneg(X[bi], dX[bi]))
                    ad = min(ad, _max_step_nonneg(Z[bi], dZ[bi]))
            return ap, ad

        try:
            # predictor (affine scaling)
            dXa, dya, dZa, dxfa = _direction(0.0, {})
            apa, ada = _steps(dXa, dZa)
            gap_aff = 0.0
            for bi in cone:
                gap_aff += float(np.sum((X[bi] + apa * dXa[bi]) * (Z[bi] + ada * dZa[bi])))
            sigma = min(1.0, max(1e-8, (gap_aff / gap) ** 3)) if gap > 0 else 0.1

            # corrector with second-order term dZ_aff dX_aff
            E = {}
            for bi in cone:
                if prog.blocks[bi].kind == "psd":
                    E[bi] = dZa[bi] @ dXa[bi]
                else:
                    E[bi] = dZa[bi] * dXa[bi]
            dX, dy, dZ, dxf = _direction(sigma * mu, E)
        except np.linalg.LinAlgError:
            status = "numerical_failure"
            break

        ap, ad = _steps(dX, dZ)
        ap = min(1.0, opt.step_fraction * ap)
        ad = min(1.0, opt.step_fraction * ad)
        if max(ap, ad) < 1e-10:
            status = "max_iter"  # step collapse: no further progress possible
            break
        last_steps = (ap, ad)
        for bi in cone:
            X[bi] = X[bi] + ap * dX[bi]
            Z[bi] = Z[bi] + ad * dZ[bi]
            if prog.blocks[bi].kind == "psd":
                X[bi] = 0.5 * (X[bi] + X[bi].T)
                Z[bi] = 0.5 * (Z[bi] + Z[bi].T)
        xf = xf + ap * dxf
        y = y + ad * dy

    if status in ("max_iter", "numerical_failure") and best_point is not None:
        cur_merit = max(pres, dres, abs(pobj - dobj) / (1.0 + abs(dobj)))
        if not np.isfinite(cur_merit) or best_merit < cur_merit:
            Xb, Zb, xf, y = best_point
            for bi in cone:
                X[bi] = Xb[bi]
                Z[bi] = Zb[bi]
            _, _, _, gap, pobj, dobj, pres, dres = _stats()
            mu = gap / nu

    # assemble block solutions in declared order
    Xout: list[np.ndarray] = []
    Zout: list[np.ndarray] = []
    fpos = 0
    for bi, blk in enumerate(prog.blocks):
        if blk.kind == "zero":
            Xout.append(xf[fpos : fpos + blk.size].copy())
            Zout.append(np.zeros(blk.size))
            fpos += blk.size
        else:
            Xout.append(np.asarray(X[bi]).copy())
            Zout.append(np.asarray(Z[bi]).copy())

    return SDPSolution(
        status=status,
        X=Xout,
        y=y.copy(),
        Z=Zout,
        primal_obj=pobj,
        dual_obj=dobj,
        gap=gap,
        primal_residual=pres,
        dual_residual=dres,
        iterations=it,
        mu_final=mu,
        blocks=list(prog.blocks),
        trace=trace,
    )


@dataclass
class DualityReport:
    inner_gap: float  # <X, Z>
    objective_gap: float  # <C,X> - b'y
    complementarity: float  # ||XZ + ZX||_F over psd blocks (plus |xz| on nonneg)
    primal_residual: float
    dual_residual: float
    converged: bool

    def lines(self) -> list[str]:
        return [
            f"inner_gap = {self.inner_gap:.12g}",
            f"objective_gap = {self.objective_gap:.12g}",
            f"complementarity = {self.complementarity:.12g}",
            f"primal_residual = {self.primal_residual:.12g}",
            f"dual_residual = {self.dual_residual:.12g}",
            f"converged = {str(self.converged).lower()}",
        ]


def duality_report(sol: SDPSolution) -> DualityReport:
    """Inner-product gap and complementarity diagnostics of a solve."""
    if sol.status not in ("optimal", "max_iter"):
        raise ValueError(f"duality report needs an optimal or max_iter solve, got {sol.status}")
    inner = 0.0
    comp2 = 0.0
    for blk, Xb, Zb in zip(sol.blocks, sol.X, sol.Z):
        if blk.kind == "zero":
            continue
        inner += float(np.sum(Xb * Zb))
        if blk.kind == "psd":
            S = Xb @ Zb + Zb @ Xb
            comp2 += float(np.sum(S**2))
        else:
            comp2 += float(np.sum((2.0 * Xb * Zb) ** 2))
    if inner < -1e-8:
        raise RuntimeError(f"weak duality violated: <X,Z> = {inner:.3e} < -1e-8")
    return DualityReport(
        inner_gap=inner,
        objective_gap=sol.primal_obj - sol.dual_obj,
        complementarity=float(np.sqrt(comp2)),
        primal_residual=sol.primal_residual,
        dual_residual=sol.dual_residual,
        converged=sol.status == "optimal",
    )


# -- plain-text interchange format -------------------------------------------
#
# Sections, one entry per line; `#` starts a comment.  Indices are 1-based and
# only the upper triangle of symmetric entries is stored:
#
#   [blocks]          kind size            (one block per line)
#   [b]               whitespace-separated values (may span lines)
#   [C]               block i j value
#   [A k]             block i j value      (one section per constraint k)
#
# Values may be rationals like 3/4; they are parsed exactly and then stored
# as binary floats.


def _parse_value(tok: str) -> float:
    if "/" in tok:
        return float(Fraction(tok))
    return float(tok)


def write_program_text(prog: ConicProgram, f) -> None:
    close = False
    if isinstance(f, str):
        f = open(f, "w")
        close = True
    try:
        f.write("kind: sdp\n\n[blocks]\n")
        for blk in prog.blocks:
            f.write(f"{blk.kind} {blk.size}\n")
        f.write("\n[b]\n")
        f.write(" ".join(repr(float(v)) for v in prog.b) + "\n")

        def _entries(tag: str, mats: list[np.ndarray]) -> None:
            f.write(f"\n[{tag}]\n")
            for bi, mat in enumerate(mats):
                if prog.blocks[bi].kind == "psd":
                    s = mat.shape[0]
                    for i in range(s):
                        for j in range(i, s):
                            if mat[i, j] != 0.0:
                                f.write(f"{bi + 1} {i + 1} {j + 1} {repr(float(mat[i, j]))}\n")
                else:
                    for i, v in enumerate(mat):
                        if v != 0.0:
                            f.write(f"{bi + 1} {i + 1} {i + 1} {repr(float(v))}\n")

        _entries("C", prog.C)
        for k in range(prog.m):
            _entries(f"A {k + 1}", [prog.A[bi][k] for bi in range(len(prog.blocks))])
    finally:
        if close:
            f.close()


class ProgramFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


def read_program_text(f) -> ConicProgram:
    close = False
    if isinstance(f, str):
        f = open(f, "r")
        close = True
    try:
        text = f.read()
    finally:
        if close:
            f.close()
    return parse_program_text(text)


def parse_program_text(text: str) -> ConicProgram:
    blocks: list[Block] = []
    bvals: list[float] = []
    centries: list[tuple[int, int, int, float]] = []
    aentries: dict[int, list[tuple[int, int, int, float]]] = {}
    section: Optional[str] = None
    section_k = 0
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("kind:"):
            if line.split(":", 1)[1].strip() != "sdp":
                raise ProgramFormatError("expected kind: sdp", ln)
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ProgramFormatError("unterminated section header", ln)
            head = line[1:-1].split()
            if head[0] == "blocks" or head[0] == "b" or head[0] == "C":
                section = head[0]
            elif head[0] == "A" and len(head) == 2:
                section = "A"
                try:
                    section_k = int(head[1])
                except ValueError:
                    raise ProgramFormatError("constraint index must be an integer", ln)
                aentries.setdefault(section_k, [])
            else:
                raise ProgramFormatError(f"unknown section {line!r}", ln)
            continue
        if section == "blocks":
            parts = line.split()
            if len(parts) != 2:
                raise ProgramFormatError("block line must be 'kind size'", ln)
            try:
                blocks.append(Block(parts[0], int(parts[1])))  # type: ignore[arg-type]
            except ValueError as e:
                raise ProgramFormatError(str(e), ln)
        elif section == "b":
            try:
                bvals.extend(_parse_value(t) for t in line.split())
            except ValueError:
                raise ProgramFormatError("bad value in b", ln)
        elif section in ("C", "A"):
            parts = line.split()
            if len(parts) != 4:
                raise ProgramFormatError("entry must be 'block i j value'", ln)
            try:
                bi, i, j = int(parts[0]), int(parts[1]), int(parts[2])
                v = _parse_value(parts[3])
            except ValueError:
                raise ProgramFormatError("bad entry", ln)
            if section == "C":
                centries.append((bi, i, j, v))
            else:
                aentries[section_k].append((bi, i, j, v))
        else:
            raise ProgramFormatError("entry outside of any section", ln)

    if not blocks:
        raise ProgramFormatError("no [blocks] section", 0)
    m = len(bvals)
    for k in aentries:
        if not 1 <= k <= m:
            raise ProgramFormatError(f"constraint index {k} out of range (m = {m})", 0)

    def _alloc() -> list[np.ndarray]:
        return [
            np.zeros((blk.size, blk.size)) if blk.kind == "psd" else np.zeros(blk.size)
            for blk in blocks
        ]

    def _fill(target: list[np.ndarray], entries) -> None:
        for bi, i, j, v in entries:
            if not 1 <= bi <= len(blocks):
                raise ProgramFormatError(f"block index {bi} out of range", 0)
            blk = blocks[bi - 1]
            if not (1 <= i <= blk.size and 1 <= j <= blk.size):
                raise ProgramFormatError(f"entry ({i},{j}) outside block {bi}", 0)
            if blk.kind == "psd":
                target[bi - 1][i - 1, j - 1] = v
                target[bi - 1][j - 1, i - 1] = v
            else:
                if i != j:
                    raise ProgramFormatError("vector blocks take diagonal entries only", 0)
                target[bi - 1][i - 1] = v

    C = _alloc()
    _fill(C, centries)
    A = [
        np.zeros((m, blk.size, blk.size)) if blk.kind == "psd" else np.zeros((m, blk.size))
        for blk in blocks
    ]
    for k, entries in aentries.items():
        tmp = _alloc()
        _fill(tmp, entries)
        for bi in range(len(blocks)):
            A[bi][k - 1] = tmp[bi]
    return ConicProgram(blocks=blocks, A=A, b=np.asarray(bvals), C=C)


def program_to_text(prog: ConicProgram) -> str:
    buf = io.StringIO()
    write_program_text(prog, buf)
    return buf.getvalue()
