"""Discrete Wigner representations of states and measurement effects.

A state rho gets W(u) = tr(A_u rho)/D and an effect E gets
W(E|u) = tr(A_u E), where A_u are the phase-space point operators and D
the total dimension.  The two normalisations differ by the factor D, so
the role is a mandatory tag: nothing here ever guesses it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .phase_space import (
    HermitianOperator,
    PhasePoint,
    QuditDims,
    _as_dims,
    phase_point_operators,
    phase_points,
)
from .states import DensityOperator, PureState

__all__ = [
    "PWF_TOL",
    "NegativityReport",
    "WignerRepresentation",
    "is_pwf",
    "negativity_report",
    "outcome_probability",
    "wigner_of",
    "write_wigner_csv",
]

PWF_TOL = 1e-9
IMAG_TOL = 1e-10

ROLES = ("state", "effect")


@dataclass(frozen=True, eq=False)
class WignerRepresentation:
    """Real phase-space vector of an operator, indexed in enumeration order."""

    role: str
    values: np.ndarray
    dims: QuditDims

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        vals = np.array(self.values, dtype=float).reshape(-1)
        dims = _as_dims(self.dims)
        if vals.shape[0] != dims.num_points:
            raise ValueError(
                f"got {vals.shape[0]} values for {dims.num_points} phase points"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "dims", dims)

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    @property
    def argmin_point(self) -> PhasePoint:
        return phase_points(self.dims)[int(self.values.argmin())]

    def value_at(self, point: PhasePoint) -> float:
        return float(self.values[point.index(self.dims)])


def _coerce_operator(op, dims):
    if isinstance(op, DensityOperator):
        return op.mat, op.dims
    if isinstance(op, PureState):
        return op.density().mat, op.dims
    if isinstance(op, HermitianOperator):
        mat = op.mat
    else:
        mat = HermitianOperator(op).mat
    if dims is None:
        raise ValueError("dims is required for bare matrix input")
    dims = _as_dims(dims)
    if mat.shape[0] != dims.total_dim:
        raise ValueError(f"operator dim {mat.shape[0]} does not match {dims}")
    return mat, dims


def wigner_of(op, role: str, dims=None) -> WignerRepresentation:
    """Wigner vector of a Hermitian operator under the given role."""
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")
    mat, dims = _coerce_operator(op, dims)
    ops = phase_point_operators(dims)
    traces = np.einsum("uij,ji->u", ops, mat)
    worst_imag = float(np.abs(traces.imag).max())
    if worst_imag > IMAG_TOL:
        raise ValueError(
            f"phase-space traces have imaginary residue {worst_imag:.3e}"
        )
    vals = traces.real
    if role == "state":
        vals = vals / dims.total_dim
    return WignerRepresentation(role=role, values=vals, dims=dims)


def is_pwf(op, role: str, dims=None, tol: float = PWF_TOL) -> bool:
    """Whether every Wigner value of the operator is >= -tol."""
    return wigner_of(op, role, dims).min_value >= -tol


@dataclass(frozen=True)
class NegativityReport:
    """Negativity summary of a state's Wigner vector."""

    sum_negativity: float
    max_negativity: float
    mana: float
    min_value: float
    argmin_point: PhasePoint
    log_base: str

    def as_dict(self) -> dict:
        return {
            "sum_negativity": self.sum_negativity,
            "max_negativity": self.max_negativity,
            "mana": self.mana,
            "min_value": self.min_value,
            "argmin_point": list(self.argmin_point.coords),
            "log_base": self.log_base,
        }


def negativity_report(rho: DensityOperator, log_base: str = "e") -> NegativityReport:
    """Sum negativity, max negativity and mana of a state.

    mana = log(2 sn + 1); natural log by default, base 2 via
    log_base="2".
    """
    if log_base not in ("e", "2"):
        raise ValueError('log_base must be "e" or "2"')
    if isinstance(rho, PureState):
        rho = rho.density()
    w = wigner_of(rho, "state")
    negs = w.values[w.values < 0]
    sn = float(-negs.sum()) if negs.size else 0.0
    mana = float(np.log(2 * sn + 1))
    if log_base == "2":
        mana /= np.log(2.0)
    return NegativityReport(
        sum_negativity=sn,
        max_negativity=max(0.0, -w.min_value),
        mana=mana,
        min_value=w.min_value,
        argmin_point=w.argmin_point,
        log_base=log_base,
    )


POVM_TOL = 1e-9


def outcome_probability(rho: DensityOperator, effects) -> np.ndarray:
    """Outcome distribution of a POVM computed in phase space.

    Contracts the state's Wigner vector with each effect's, i.e.
    P(j) = sum_u W_rho(u) W(E_j|u), after validating that the effects
    are PSD and sum to the identity.
    """
    if isinstance(rho, PureState):
        rho = rho.density()
    dims = rho.dims
    total = dims.total_dim
    mats = []
    for e in effects:
        mat = e.mat if isinstance(e, HermitianOperator) else HermitianOperator(e).mat
        if mat.shape[0] != total:
            raise ValueError("effect dimension mismatch")
        if np.linalg.eigvalsh(mat).min() < -POVM_TOL:
            raise ValueError("effect is not positive semidefinite")
        mats.append(mat)
    closure = np.abs(sum(mats) - np.eye(total)).max()
    if closure > POVM_TOL:
        raise ValueError(f"effects do not sum to the identity (residual {closure:.3e})")
    w_state = wigner_of(rho, "state")
    probs = np.array(
        [w_state.values @ wigner_of(m, "effect", dims).values for m in mats]
    )
    return probs


def _point_header(dims: QuditDims) -> list[str]:
    cols = []
    for i in range(len(dims)):
        cols.extend([f"a1_{i + 1}", f"a2_{i + 1}"])
    cols.append("value")
    return cols


def write_wigner_csv(w: WignerRepresentation, path) -> None:
    """CSV export: one row per phase point, coordinates then value."""
    points = phase_points(w.dims)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_point_header(w.dims))
        for pt, val in zip(points, w.values):
            row = [c for pair in pt.coords for c in pair]
            row.append(f"{val:.12g}")
            writer.writerow(row)
