"""Declarative semidefinite programs over Hermitian matrix variables,
real symmetric matrix variables and real vector variables.

The model is deliberately small: affine matrix expressions may enter
PSD-cone or equality constraints, and batches of affine scalar rows may
enter equality/inequality constraints or the objective.  Problems with
complex Hermitian variables are never handed to a solver directly;
`solve` first rewrites them with `embed_complex` into the standard
real-symmetric doubling [[A, -B], [B, A]] and maps the solution back.

Solving is delegated to cvxpy (CLARABEL by default).  The reported
numbers do not take the solver's word for anything: the primal value is
re-evaluated from the returned matrices, feasibility is re-checked
against every constraint of the *original* problem, and the dual value
is recomputed from the constraint multipliers via the Lagrangian, so
the duality gap in the outcome is certified arithmetic, not solver
bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .phase_space import HermitianOperator

__all__ = [
    "LinearRows",
    "MatrixEqConstraint",
    "MatrixExpr",
    "MatrixVar",
    "Objective",
    "PsdConstraint",
    "RowEqConstraint",
    "RowIneqConstraint",
    "SdpOutcome",
    "SdpProblem",
    "SolveSettings",
    "SolverFailure",
    "VectorVar",
    "embed_complex",
    "high_accuracy_settings",
    "linear_rows",
    "matrix_expr",
    "problem_to_json",
    "solve",
    "tightened",
]

# Real scalar unknowns across all variables; keeps accidental blow-ups out.
MAX_REAL_SCALARS = 20_000


class SolverFailure(RuntimeError):
    """The underlying conic solver crashed or returned nothing usable."""


@dataclass(frozen=True)
class MatrixVar:
    """Square matrix variable: complex Hermitian, or real symmetric."""

    name: str
    dim: int
    hermitian: bool = True

    @property
    def real_scalars(self) -> int:
        if self.hermitian:
            return self.dim * self.dim
        return self.dim * (self.dim + 1) // 2


@dataclass(frozen=True)
class VectorVar:
    """Real vector variable, optionally constrained entrywise nonnegative."""

    name: str
    size: int
    nonneg: bool = True

    @property
    def real_scalars(self) -> int:
        return self.size


Var = Union[MatrixVar, VectorVar]


def _stack(arr, shape_tail) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    if out.shape[-len(shape_tail):] != shape_tail:
        raise ValueError(f"coefficient shape {out.shape} does not end in {shape_tail}")
    return out


@dataclass(frozen=True)
class MatrixExpr:
    """offset + sum_j coeff_j X_j + sum_v sum_i v_i G_{v,i}.

    `mat_terms` maps a matrix variable to a real scalar coefficient;
    `vec_terms` maps a vector variable to a stack of fixed Hermitian
    matrices contracted against it.
    """

    dim: int
    offset: np.ndarray
    mat_terms: dict[str, float]
    vec_terms: dict[str, np.ndarray]


def matrix_expr(dim, offset=None, mats=None, vecs=None) -> MatrixExpr:
    off = np.zeros((dim, dim), dtype=complex) if offset is None else np.array(offset, dtype=complex)
    if off.shape != (dim, dim):
        raise ValueError(f"offset shape {off.shape} != ({dim}, {dim})")
    mats = {k: float(v) for k, v in (mats or {}).items()}
    vecs = {k: _stack(v, (dim, dim)) for k, v in (vecs or {}).items()}
    return MatrixExpr(dim=dim, offset=off, mat_terms=mats, vec_terms=vecs)


@dataclass(frozen=True)
class LinearRows:
    """Batch of real affine scalar forms over the declared variables.

    Row b evaluates to offsets[b] + sum_X tr(C_X[b] X) + sum_v V_v[b] . v
    with Hermitian coefficient stacks C (so the trace is real).
    """

    offsets: np.ndarray
    mat_terms: dict[str, np.ndarray]
    vec_terms: dict[str, np.ndarray]

    @property
    def nrows(self) -> int:
        return self.offsets.shape[0]


def linear_rows(offsets, mats=None, vecs=None) -> LinearRows:
    off = np.atleast_1d(np.array(offsets, dtype=float))
    b = off.shape[0]
    mat_terms = {}
    for name, stack in (mats or {}).items():
        arr = np.array(stack, dtype=complex)
        if arr.ndim == 2:
            arr = arr[None, :, :]
        if arr.shape[0] != b:
            raise ValueError(f"{name}: {arr.shape[0]} coefficient rows for {b} offsets")
        mat_terms[name] = arr
    vec_terms = {}
    for name, stack in (vecs or {}).items():
        arr = np.array(stack, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.shape[0] != b:
            raise ValueError(f"{name}: {arr.shape[0]} coefficient rows for {b} offsets")
        vec_terms[name] = arr
    return LinearRows(offsets=off, mat_terms=mat_terms, vec_terms=vec_terms)


@dataclass(frozen=True)
class PsdConstraint:
    expr: MatrixExpr
    label: str = ""


@dataclass(frozen=True)
class MatrixEqConstraint:
    expr: MatrixExpr
    label: str = ""


@dataclass(frozen=True)
class RowEqConstraint:
    rows: LinearRows
    label: str = ""


@dataclass(frozen=True)
class RowIneqConstraint:
    """rows(x) >= 0, entrywise."""

    rows: LinearRows
    label: str = ""


Constraint = Union[PsdConstraint, MatrixEqConstraint, RowEqConstraint, RowIneqConstraint]


@dataclass(frozen=True)
class Objective:
    sense: str
    rows: LinearRows

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError('sense must be "min" or "max"')
        if self.rows.nrows != 1:
            raise ValueError("objective must be a single row")


@dataclass(frozen=True)
class SdpProblem:
    variables: tuple[Var, ...]
    objective: Objective
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        total = sum(v.real_scalars for v in self.variables)
        if total > MAX_REAL_SCALARS:
            raise ValueError(
                f"problem has {total} real unknowns, guard is {MAX_REAL_SCALARS}"
            )
        by_name = {v.name: v for v in self.variables}
        for rows in self._all_rows():
            for name, stack in rows.mat_terms.items():
                var = by_name.get(name)
                if not isinstance(var, MatrixVar) or stack.shape[1] != var.dim:
                    raise ValueError(f"row coefficient for unknown/mismatched matrix {name!r}")
            for name, stack in rows.vec_terms.items():
                var = by_name.get(name)
                if not isinstance(var, VectorVar) or stack.shape[1] != var.size:
                    raise ValueError(f"row coefficient for unknown/mismatched vector {name!r}")
        for expr in self._all_matrix_exprs():
            for name in expr.mat_terms:
                var = by_name.get(name)
                if not isinstance(var, MatrixVar) or var.dim != expr.dim:
                    raise ValueError(f"matrix term for unknown/mismatched variable {name!r}")
            for name, stack in expr.vec_terms.items():
                var = by_name.get(name)
                if not isinstance(var, VectorVar) or stack.shape[0] != var.size:
                    raise ValueError(f"vector term for unknown/mismatched variable {name!r}")

    def _all_rows(self):
        yield self.objective.rows
        for c in self.constraints:
            if isinstance(c, (RowEqConstraint, RowIneqConstraint)):
                yield c.rows

    def _all_matrix_exprs(self):
        for c in self.constraints:
            if isinstance(c, (PsdConstraint, MatrixEqConstraint)):
                yield c.expr

    @property
    def matrix_vars(self) -> list[MatrixVar]:
        return [v for v in self.variables if isinstance(v, MatrixVar)]

    @property
    def vector_vars(self) -> list[VectorVar]:
        return [v for v in self.variables if isinstance(v, VectorVar)]


@dataclass(frozen=True)
class SolveSettings:
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iter: int | None = None
    solver: str = "CLARABEL"
    verbose: bool = False
    solver_opts: dict = field(default_factory=dict)


def high_accuracy_settings() -> SolveSettings:
    """Settings for the handful of checks pinned at 1e-9: pushes the
    interior-point targets to 1e-11 on problems small enough to take it."""
    return SolveSettings(
        gap_tol=1e-9,
        feas_tol=1e-9,
        solver_opts={"tol_gap_abs": 1e-11, "tol_gap_rel": 1e-11, "tol_feas": 1e-11},
    )


def tightened(settings: SolveSettings) -> SolveSettings:
    """Same certification thresholds, but push the solver's own targets
    well past them.  CLARABEL otherwise accepts 'almost solved' iterates
    that sit just outside our certificate on awkward instances."""
    from dataclasses import replace

    opts = dict(settings.solver_opts)
    opts.setdefault("tol_feas", 1e-11)
    opts.setdefault("tol_gap_abs", 1e-10)
    opts.setdefault("tol_gap_rel", 1e-10)
    return replace(settings, solver_opts=opts)


@dataclass(frozen=True)
class SdpOutcome:
    """Certified result of one solve.

    status "optimal" means the solver claimed optimality *and* the
    re-checked feasibility and duality-gap bounds held; anything the
    solver claimed but the checks reject is downgraded to "inaccurate".
    """

    status: str
    primal_value: float
    dual_value: float
    gap: float
    solutions: dict[str, HermitianOperator]
    vectors: dict[str, np.ndarray]
    reason: str | None = None
    residuals: dict[str, float] = field(default_factory=dict)

    def require_optimal(self) -> "SdpOutcome":
        if self.status != "optimal":
            raise SolverFailure(
                f"solve ended with status {self.status!r}: {self.reason or 'no detail'}"
            )
        return self


# ---------------------------------------------------------------------------
# evaluation of expressions at a concrete assignment


def _rows_value(rows: LinearRows, mats: dict, vecs: dict) -> np.ndarray:
    out = rows.offsets.astype(float).copy()
    for name, stack in rows.mat_terms.items():
        vals = np.einsum("bij,ji->b", stack, mats[name])
        out += vals.real
    for name, stack in rows.vec_terms.items():
        out += stack @ vecs[name]
    return out


def _matrix_value(expr: MatrixExpr, mats: dict, vecs: dict) -> np.ndarray:
    out = expr.offset.copy()
    for name, coeff in expr.mat_terms.items():
        out = out + coeff * mats[name]
    for name, stack in expr.vec_terms.items():
        out = out + np.tensordot(vecs[name], stack, axes=1)
    return out


def constraint_residuals(problem: SdpProblem, mats: dict, vecs: dict) -> dict[str, float]:
    """Worst violation of each constraint at the given assignment."""
    out = {}
    for i, con in enumerate(problem.constraints):
        label = con.label or f"c{i}"
        if isinstance(con, PsdConstraint):
            m = _matrix_value(con.expr, mats, vecs)
            m = (m + m.conj().T) / 2
            viol = max(0.0, -float(np.linalg.eigvalsh(m).min()))
        elif isinstance(con, MatrixEqConstraint):
            viol = float(np.abs(_matrix_value(con.expr, mats, vecs)).max())
        elif isinstance(con, RowEqConstraint):
            viol = float(np.abs(_rows_value(con.rows, mats, vecs)).max())
        else:
            vals = _rows_value(con.rows, mats, vecs)
            viol = max(0.0, -float(vals.min()))
        out[label] = viol
    for var in problem.vector_vars:
        if var.nonneg:
            out[f"nonneg({var.name})"] = max(0.0, -float(vecs[var.name].min()))
    return out


def objective_value(problem: SdpProblem, mats: dict, vecs: dict) -> float:
    return float(_rows_value(problem.objective.rows, mats, vecs)[0])


# ---------------------------------------------------------------------------
# complex -> real embedding


def _embed_matrix(c: np.ndarray) -> np.ndarray:
    a, b = c.real, c.imag
    return np.block([[a, -b], [b, a]])


def _embed_stack(stack: np.ndarray) -> np.ndarray:
    nb, n = stack.shape[0], stack.shape[1]
    out = np.zeros((nb, 2 * n, 2 * n))
    out[:, :n, :n] = stack.real
    out[:, :n, n:] = -stack.imag
    out[:, n:, :n] = stack.imag
    out[:, n:, n:] = stack.real
    return out


def embed_complex(problem: SdpProblem) -> SdpProblem:
    """Rewrite a problem with Hermitian variables over real symmetric ones.

    Every Hermitian d x d variable H = A + iB becomes a 2d x 2d real
    symmetric variable with the block form [[A, -B], [B, A]]; constant
    matrices embed the same way, and scalar-row coefficients pick up a
    factor 1/2 because tr(embed(C) embed(X)) = 2 tr(C X).
    """
    if not problem.matrix_vars:
        raise ValueError("problem has no matrix variables to embed")
    if not all(v.hermitian for v in problem.matrix_vars):
        raise ValueError("embedding expects every matrix variable to be Hermitian")

    new_vars = []
    for v in problem.variables:
        if isinstance(v, MatrixVar):
            new_vars.append(MatrixVar(v.name, 2 * v.dim, hermitian=False))
        else:
            new_vars.append(v)

    def embed_rows(rows: LinearRows) -> LinearRows:
        return LinearRows(
            offsets=rows.offsets.copy(),
            mat_terms={k: _embed_stack(v) / 2.0 for k, v in rows.mat_terms.items()},
            vec_terms={k: v.copy() for k, v in rows.vec_terms.items()},
        )

    def embed_expr(expr: MatrixExpr) -> MatrixExpr:
        return MatrixExpr(
            dim=2 * expr.dim,
            offset=_embed_matrix(expr.offset).astype(complex),
            mat_terms=dict(expr.mat_terms),
            vec_terms={k: _embed_stack(v).astype(complex) for k, v in expr.vec_terms.items()},
        )

    new_cons: list[Constraint] = []
    for con in problem.constraints:
        if isinstance(con, PsdConstraint):
            new_cons.append(PsdConstraint(embed_expr(con.expr), con.label))
        elif isinstance(con, MatrixEqConstraint):
            new_cons.append(MatrixEqConstraint(embed_expr(con.expr), con.label))
        elif isinstance(con, RowEqConstraint):
            new_cons.append(RowEqConstraint(embed_rows(con.rows), con.label))
        else:
            new_cons.append(RowIneqConstraint(embed_rows(con.rows), con.label))

    objective = Objective(problem.objective.sense, embed_rows(problem.objective.rows))
    return SdpProblem(tuple(new_vars), objective, tuple(new_cons))


def split_embedded(mat: np.ndarray) -> tuple[np.ndarray, float]:
    """Recover the Hermitian matrix from an embedded symmetric solution.

    Returns the averaged A + iB together with the residual measuring how
    far the solver's solution sat from the structured block form (the
    part the averaging discards).
    """
    n2 = mat.shape[0]
    n = n2 // 2
    p = mat[:n, :n]
    s = mat[n:, n:]
    q = mat[:n, n:]
    r = mat[n:, :n]
    herm = (p + s) / 2 + 1j * (r - q) / 2
    residual = max(float(np.abs(p - s).max()), float(np.abs(q + q.T).max()))
    return herm, residual


# ---------------------------------------------------------------------------
# solving


_STATUS_MAP = {
    "optimal": "optimal",
    "optimal_inaccurate": "inaccurate",
    "infeasible": "infeasible",
    "infeasible_inaccurate": "infeasible",
    "unbounded": "unbounded",
    "unbounded_inaccurate": "unbounded",
}


def _real_coeff(arr: np.ndarray, what: str) -> np.ndarray:
    if np.abs(arr.imag).max() > 1e-12:
        raise ValueError(f"{what} must be real for a real-symmetric problem")
    return np.ascontiguousarray(arr.real)


def _lower_and_solve(problem: SdpProblem, settings: SolveSettings):
    """Solve a real-symmetric problem with cvxpy; returns value dicts,
    the raw status and the Lagrangian-dual ingredients."""
    import cvxpy as cp

    cvars: dict = {}
    for v in problem.variables:
        if isinstance(v, MatrixVar):
            cvars[v.name] = cp.Variable((v.dim, v.dim), symmetric=True, name=v.name)
        else:
            cvars[v.name] = cp.Variable(v.size, name=v.name)

    def rows_expr(rows: LinearRows):
        expr = cp.Constant(rows.offsets.copy())
        for name, stack in rows.mat_terms.items():
            x = cvars[name]
            n = x.shape[0]
            flat = _real_coeff(stack, f"coefficients of {name}").reshape(rows.nrows, n * n)
            expr = expr + flat @ cp.reshape(x, (n * n,), order="C")
        for name, stack in rows.vec_terms.items():
            expr = expr + stack @ cvars[name]
        return expr

    def mat_exprs(expr: MatrixExpr):
        out = cp.Constant(_real_coeff(expr.offset, "matrix offset"))
        for name, coeff in expr.mat_terms.items():
            out = out + coeff * cvars[name]
        for name, stack in expr.vec_terms.items():
            n = expr.dim
            flat = _real_coeff(stack, f"coefficients of {name}").reshape(stack.shape[0], n * n)
            out = out + cp.reshape(flat.T @ cvars[name], (n, n), order="C")
        return out

    sign = 1.0 if problem.objective.sense == "min" else -1.0
    obj_rows = problem.objective.rows
    obj_expr = sign * rows_expr(obj_rows)[0]

    cons = []
    handles = []  # (kind, spec_constraint_or_var, cvxpy constraint)
    for con in problem.constraints:
        if isinstance(con, PsdConstraint):
            c = mat_exprs(con.expr) >> 0
            handles.append(("psd", con, c))
        elif isinstance(con, MatrixEqConstraint):
            c = mat_exprs(con.expr) == 0
            handles.append(("mateq", con, c))
        elif isinstance(con, RowEqConstraint):
            c = rows_expr(con.rows) == 0
            handles.append(("roweq", con, c))
        else:
            c = rows_expr(con.rows) >= 0
            handles.append(("rowineq", con, c))
        cons.append(c)
    for v in problem.vector_vars:
        if v.nonneg:
            c = cvars[v.name] >= 0
            handles.append(("varnonneg", v, c))
            cons.append(c)

    opts = dict(settings.solver_opts)
    if settings.max_iter is not None:
        key = {"CLARABEL": "max_iter", "SCS": "max_iters"}.get(settings.solver, "max_iter")
        opts.setdefault(key, settings.max_iter)

    prob = cp.Problem(cp.Minimize(obj_expr), cons)
    try:
        import warnings

        with warnings.catch_warnings():
            # the outcome is re-certified below; cvxpy's inaccuracy
            # warning would just be noise on retried rungs
            warnings.filterwarnings("ignore", message="Solution may be inaccurate")
            prob.solve(solver=getattr(cp, settings.solver), verbose=settings.verbose, **opts)
    except cp.error.SolverError as exc:
        raise SolverFailure(f"{settings.solver} failed: {exc}") from exc

    raw_status = prob.status or "unknown"
    mats = {}
    vecs = {}
    if all(cvars[v.name].value is not None for v in problem.variables):
        for v in problem.variables:
            val = np.array(cvars[v.name].value)
            if isinstance(v, MatrixVar):
                mats[v.name] = (val + val.T) / 2
            else:
                vecs[v.name] = val.reshape(-1)

    duals = []
    for kind, ref, c in handles:
        duals.append((kind, ref, None if c.dual_value is None else np.array(c.dual_value)))
    return raw_status, mats, vecs, duals, sign


def _dual_value_and_stationarity(problem: SdpProblem, duals, sign: float):
    """Lagrangian dual value of the (internally minimised) problem.

    Conventions calibrated against cvxpy: with constraints written as
    ineq(x) >= 0, eq(x) == 0 and psd(x) >> 0,
        L = f - sum lam.ineq - sum <Y, psd> + sum nu.eq + sum <Lam, mateq>
    so the dual function value is the offset part of L and stationarity
    is the vanishing of its gradient.  Also reports the worst violation
    of the dual cone conditions lam >= 0, Y >= 0.
    """
    grads_mat = {v.name: np.zeros((v.dim, v.dim)) for v in problem.matrix_vars}
    grads_vec = {v.name: np.zeros(v.size) for v in problem.vector_vars}

    def add_rows(rows: LinearRows, weights: np.ndarray, scale: float):
        for name, stack in rows.mat_terms.items():
            grads_mat[name] += scale * np.tensordot(weights, stack.real, axes=1)
        for name, stack in rows.vec_terms.items():
            grads_vec[name] += scale * (weights @ stack)

    obj = problem.objective.rows
    value = sign * float(obj.offsets[0])
    add_rows(obj, np.array([sign]), 1.0)

    incomplete = False
    cone_violation = 0.0
    for kind, ref, dual in duals:
        if dual is None:
            incomplete = True
            continue
        if kind == "rowineq":
            cone_violation = max(cone_violation, -float(dual.min()))
            value -= float(dual @ ref.rows.offsets)
            add_rows(ref.rows, dual, -1.0)
        elif kind == "roweq":
            value += float(dual @ ref.rows.offsets)
            add_rows(ref.rows, dual, 1.0)
        elif kind == "psd":
            dual = (dual + dual.T) / 2
            cone_violation = max(
                cone_violation, -float(np.linalg.eigvalsh(dual).min())
            )
            value -= float(np.sum(dual * ref.expr.offset.real))
            for name, coeff in ref.expr.mat_terms.items():
                grads_mat[name] -= coeff * dual
            for name, stack in ref.expr.vec_terms.items():
                grads_vec[name] -= np.einsum("ij,kij->k", dual, stack.real)
        elif kind == "mateq":
            value += float(np.sum(dual * ref.expr.offset.real))
            for name, coeff in ref.expr.mat_terms.items():
                grads_mat[name] += coeff * dual
            for name, stack in ref.expr.vec_terms.items():
                grads_vec[name] += np.einsum("ij,kij->k", dual, stack.real)
        else:  # varnonneg: L gains -lam.v
            cone_violation = max(cone_violation, -float(dual.min()))
            grads_vec[ref.name] -= dual

    stat = 0.0
    for g in grads_mat.values():
        stat = max(stat, float(np.abs(g).max()))
    for g in grads_vec.values():
        stat = max(stat, float(np.abs(g).max()) if g.size else 0.0)
    return value, stat, cone_violation, incomplete


def solve(problem: SdpProblem, settings: SolveSettings | None = None) -> SdpOutcome:
    """Solve the problem and return a certified outcome.

    Hermitian-variable problems are embedded first; the embedded
    solution is averaged back onto the structured block form and the
    distance discarded by that averaging is reported under
    residuals["embedding_structure"].
    """
    settings = settings or SolveSettings()
    needs_embedding = any(v.hermitian for v in problem.matrix_vars)
    lowered = embed_complex(problem) if needs_embedding else problem

    raw_status, mats_low, vecs_low, duals, sign = _lower_and_solve(lowered, settings)
    status = _STATUS_MAP.get(raw_status, "inaccurate")
    reason = None if status == "optimal" else f"solver status {raw_status!r}"

    if not mats_low and not vecs_low:
        return SdpOutcome(
            status=status if status in ("infeasible", "unbounded") else "inaccurate",
            primal_value=float("nan"),
            dual_value=float("nan"),
            gap=float("nan"),
            solutions={},
            vectors={},
            reason=reason or f"no solution returned (status {raw_status!r})",
        )

    structure_residual = 0.0
    solutions: dict[str, HermitianOperator] = {}
    mats_orig: dict[str, np.ndarray] = {}
    if needs_embedding:
        for v in problem.matrix_vars:
            herm, resid = split_embedded(mats_low[v.name])
            structure_residual = max(structure_residual, resid)
            op = HermitianOperator((herm + herm.conj().T) / 2)
            solutions[v.name] = op
            mats_orig[v.name] = op.mat
    else:
        for v in problem.matrix_vars:
            op = HermitianOperator(mats_low[v.name])
            solutions[v.name] = op
            mats_orig[v.name] = op.mat
    vectors = {k: v.copy() for k, v in vecs_low.items()}

    primal = objective_value(problem, mats_orig, vectors)
    dual_min, stationarity, cone_violation, incomplete = _dual_value_and_stationarity(
        lowered, duals, sign
    )
    dual = sign * dual_min
    gap = abs(primal - dual) if not incomplete else float("nan")

    feas = constraint_residuals(problem, mats_orig, vectors)
    worst_feas = max(feas.values()) if feas else 0.0

    residuals = {
        "feasibility": worst_feas,
        "stationarity": stationarity,
        "dual_cone": cone_violation,
        "embedding_structure": structure_residual,
    }

    # The outcome's own certificate decides optimality: a feasible primal
    # point plus valid multipliers bounding the value within gap_tol.  A
    # solver that stalled just short of its internal targets can still
    # certify; one that "converged" without certifying cannot.
    certified = (
        worst_feas <= settings.feas_tol
        and np.isfinite(gap)
        and gap <= settings.gap_tol
        and stationarity <= max(1e-6, 10 * settings.feas_tol)
        and cone_violation <= max(1e-9, settings.feas_tol)
    )
    if status in ("optimal", "inaccurate") and raw_status in (
        "optimal",
        "optimal_inaccurate",
    ):
        if certified:
            if status != "optimal":
                reason = f"certified despite solver status {raw_status!r}"
            status = "optimal"
        elif worst_feas > settings.feas_tol:
            status = "inaccurate"
            reason = f"feasibility residual {worst_feas:.3e} exceeds {settings.feas_tol:.1e}"
        elif not np.isfinite(gap) or gap > settings.gap_tol:
            status = "inaccurate"
            reason = f"duality gap {gap:.3e} exceeds {settings.gap_tol:.1e}"
        else:
            status = "inaccurate"
            reason = (
                f"dual certificate rejected (stationarity {stationarity:.3e}, "
                f"cone violation {cone_violation:.3e})"
            )

    return SdpOutcome(
        status=status,
        primal_value=primal,
        dual_value=dual,
        gap=gap,
        solutions=solutions,
        vectors=vectors,
        reason=reason,
        residuals=residuals,
    )


# ---------------------------------------------------------------------------
# debug dump


def _matrix_json(arr: np.ndarray):
    if np.iscomplexobj(arr) and np.abs(arr.imag).max() > 0:
        return {"re": arr.real.tolist(), "im": arr.imag.tolist()}
    return np.asarray(arr.real, dtype=float).tolist()


def problem_to_json(problem: SdpProblem) -> dict:
    """Nested-array dump of the full problem, for eyeballing."""
    doc: dict = {"schema": 1, "variables": [], "objective": {}, "constraints": []}
    for v in problem.variables:
        if isinstance(v, MatrixVar):
            doc["variables"].append(
                {"name": v.name, "kind": "matrix", "dim": v.dim, "hermitian": v.hermitian}
            )
        else:
            doc["variables"].append(
                {"name": v.name, "kind": "vector", "size": v.size, "nonneg": v.nonneg}
            )

    def rows_doc(rows: LinearRows) -> dict:
        return {
            "offsets": rows.offsets.tolist(),
            "matrix_coefficients": {k: _matrix_json(v) for k, v in rows.mat_terms.items()},
            "vector_coefficients": {k: v.tolist() for k, v in rows.vec_terms.items()},
        }

    def expr_doc(expr: MatrixExpr) -> dict:
        return {
            "dim": expr.dim,
            "offset": _matrix_json(expr.offset),
            "matrix_terms": expr.mat_terms,
            "vector_terms": {k: _matrix_json(v) for k, v in expr.vec_terms.items()},
        }

    doc["objective"] = {"sense": problem.objective.sense, **rows_doc(problem.objective.rows)}
    for con in problem.constraints:
        if isinstance(con, PsdConstraint):
            doc["constraints"].append({"kind": "psd", "label": con.label, **expr_doc(con.expr)})
        elif isinstance(con, MatrixEqConstraint):
            doc["constraints"].append({"kind": "matrix_eq", "label": con.label, **expr_doc(con.expr)})
        elif isinstance(con, RowEqConstraint):
            doc["constraints"].append({"kind": "rows_eq", "label": con.label, **rows_doc(con.rows)})
        else:
            doc["constraints"].append({"kind": "rows_geq0", "label": con.label, **rows_doc(con.rows)})
    return doc
