"""Discrete phase space of odd-prime-dimensional qudit registers.

Builds the boost/shift pair, the Heisenberg-Weyl displacement operators
and the phase-space point operators, for a single qudit or a tensor
product of qudits with (possibly different) odd prime dimensions, and
verifies the algebraic identities the point-operator family satisfies.

Indexing convention used by every phase-point-indexed vector in this
package: the phase space of one d-level system is Z_d x Z_d, enumerated
row-major with the first coordinate outermost; composite systems run
subsystems left to right, leftmost slowest.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

__all__ = [
    "HERMITICITY_TOL",
    "AlgebraReport",
    "HermitianOperator",
    "PhasePoint",
    "QuditDims",
    "boost_shift",
    "is_odd_prime",
    "phase_point_operator",
    "phase_point_operators",
    "phase_points",
    "point_spectrum_multiplicities",
    "verify_phase_point_algebra",
    "weyl_operator",
]

HERMITICITY_TOL = 1e-10

# Exhaustive sweeps touch all prod(d_i^2) points; refuse anything that
# would not stay desk-scale.
MAX_PHASE_POINTS = 4096


def is_odd_prime(n: int) -> bool:
    if n < 3 or n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _require_odd_prime(d: int) -> None:
    if not is_odd_prime(d):
        raise ValueError(f"dimension must be an odd prime >= 3, got {d}")


@dataclass(frozen=True)
class QuditDims:
    """Ordered odd-prime local dimensions of a qudit register."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("at least one subsystem required")
        for d in dims:
            _require_odd_prime(d)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def of(cls, *dims: int) -> "QuditDims":
        return cls(tuple(dims))

    @property
    def total_dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    @property
    def num_points(self) -> int:
        out = 1
        for d in self.dims:
            out *= d * d
        return out

    def replicated(self, n: int) -> "QuditDims":
        if n < 1:
            raise ValueError("replication count must be positive")
        return QuditDims(self.dims * n)

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)


@dataclass(frozen=True)
class PhasePoint:
    """A point of the composite phase space: one (a1, a2) pair per subsystem."""

    coords: tuple[tuple[int, int], ...]

    def __post_init__(self):
        coords = tuple((int(a), int(b)) for a, b in self.coords)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def single(cls, a1: int, a2: int) -> "PhasePoint":
        return cls(((a1, a2),))

    @property
    def is_origin(self) -> bool:
        return all(a == 0 and b == 0 for a, b in self.coords)

    def reduced(self, dims: QuditDims) -> "PhasePoint":
        if len(self.coords) != len(dims):
            raise ValueError(
                f"point has {len(self.coords)} subsystems, dims has {len(dims)}"
            )
        return PhasePoint(
            tuple((a % d, b % d) for (a, b), d in zip(self.coords, dims))
        )

    def index(self, dims: QuditDims) -> int:
        """Position of this point in the enumeration order of `dims`."""
        pt = self.reduced(dims)
        idx = 0
        for (a, b), d in zip(pt.coords, dims):
            idx = idx * d * d + a * d + b
        return idx

    @classmethod
    def from_index(cls, dims: QuditDims, index: int) -> "PhasePoint":
        if not 0 <= index < dims.num_points:
            raise ValueError(f"index {index} out of range for {dims}")
        coords = []
        for d in reversed(dims.dims):
            index, rem = divmod(index, d * d)
            coords.append(divmod(rem, d))
        return cls(tuple(reversed(coords)))


class HermitianOperator:
    """Dense complex square matrix kept exactly Hermitian.

    Construction rejects input further than HERMITICITY_TOL from its own
    adjoint and then stores the symmetrised (M + M^dag)/2, so chained
    products cannot drift.  The stored array is read-only.
    """

    __slots__ = ("mat",)

    def __init__(self, mat):
        m = np.array(mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        dev = np.abs(m - m.conj().T).max()
        if dev > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        m = (m + m.conj().T) / 2
        m.flags.writeable = False
        self.mat = m

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def _as_dims(dims) -> QuditDims:
    if isinstance(dims, QuditDims):
        return dims
    if isinstance(dims, int):
        return QuditDims.of(dims)
    return QuditDims(tuple(dims))


def boost_shift(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Shift X and boost Z of a single d-level system, d an odd prime.

    X|j> = |j+1 mod d> and Z|j> = w^j |j> with w = exp(2 pi i / d).
    """
    _require_odd_prime(d)
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    boost = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return shift, boost


def _single_coords(point) -> tuple[int, int]:
    if isinstance(point, PhasePoint):
        if len(point.coords) != 1:
            raise ValueError("expected a single-subsystem phase point")
        return point.coords[0]
    a1, a2 = point
    return int(a1), int(a2)


def weyl_operator(point, d: int) -> np.ndarray:
    """Displacement operator tau^(-a1 a2) Z^a1 X^a2 at a single-system point.

    tau = exp(i pi (d+1)/d) is the canonical square root of w with
    tau^d = 1 for odd d.
    """
    _require_odd_prime(d)
    a1, a2 = _single_coords(point)
    a1 %= d
    a2 %= d
    shift, boost = boost_shift(d)
    tau = np.exp(1j * np.pi * (d + 1) / d)
    op = np.linalg.matrix_power(boost, a1) @ np.linalg.matrix_power(shift, a2)
    return tau ** (-a1 * a2) * op


@lru_cache(maxsize=None)
def _single_system_point_ops(d: int) -> np.ndarray:
    """All d^2 point operators of one d-level system, enumeration order."""
    disp = np.stack(
        [weyl_operator((a1, a2), d) for a1 in range(d) for a2 in range(d)]
    )
    origin = disp.sum(axis=0) / d
    ops = np.einsum("uij,jk,ulk->uil", disp, origin, disp.conj())
    # products of unitaries leave ~1e-16 skew; store exactly Hermitian
    ops = (ops + ops.conj().transpose(0, 2, 1)) / 2
    ops.flags.writeable = False
    return ops


@lru_cache(maxsize=None)
def phase_point_operators(dims: QuditDims) -> np.ndarray:
    """Read-only stack of all point operators of `dims`, enumeration order.

    Composite registers get the tensor products of the single-system
    operators, ordered to match `phase_points`.
    """
    dims = _as_dims(dims)
    if dims.num_points > MAX_PHASE_POINTS:
        raise ValueError(
            f"{dims.num_points} phase points exceeds the enumeration guard"
        )
    out = None
    for d in dims:
        single = _single_system_point_ops(d)
        if out is None:
            out = single
        else:
            n_a, m = out.shape[0], out.shape[1]
            n_b, k = single.shape[0], single.shape[1]
            out = np.einsum("aij,bkl->abikjl", out, single).reshape(
                n_a * n_b, m * k, m * k
            )
    out = np.ascontiguousarray(out)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def phase_points(dims: QuditDims) -> tuple[PhasePoint, ...]:
    """All phase points of `dims` in enumeration order."""
    dims = _as_dims(dims)
    if dims.num_points > MAX_PHASE_POINTS:
        raise ValueError(
            f"{dims.num_points} phase points exceeds the enumeration guard"
        )
    grids = [
        [(a1, a2) for a1 in range(d) for a2 in range(d)] for d in dims
    ]
    return tuple(PhasePoint(c) for c in product(*grids))


def phase_point_operator(point: PhasePoint, dims) -> HermitianOperator:
    """The point operator at `point` for the register `dims`."""
    dims = _as_dims(dims)
    idx = point.index(dims)
    return HermitianOperator(phase_point_operators(dims)[idx])


ALGEBRA_CHECKS = (
    "hermitian",
    "resolution_of_identity",
    "orthogonality",
    "unit_trace",
    "reconstruction",
    "transpose_closure",
)


@dataclass(frozen=True)
class AlgebraReport:
    """Max residual of each point-operator identity over a full register."""

    dims: QuditDims
    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    def failures(self) -> list[str]:
        return [k for k, r in self.residuals.items() if r > self.tol]

    def lines(self) -> list[str]:
        out = []
        for name in ALGEBRA_CHECKS:
            r = self.residuals[name]
            flag = "pass" if r <= self.tol else "FAIL"
            out.append(f"{name:<24} {r:12.3e}  {flag}")
        return out


def verify_phase_point_algebra(dims, seed: int = 0, tol: float = 1e-10) -> AlgebraReport:
    """Check the six defining identities of the point-operator family.

    Hermiticity, resolution of the identity, pairwise trace
    orthogonality, unit trace, reconstruction of a random Hermitian
    operator from its phase-space coefficients, and closure of the
    family under transposition.  Residuals are max norms; the report
    carries them all rather than raising.
    """
    dims = _as_dims(dims)
    ops = phase_point_operators(dims)
    n_points, total = ops.shape[0], ops.shape[1]
    eye = np.eye(total)

    res: dict[str, float] = {}
    res["hermitian"] = float(np.abs(ops - ops.conj().transpose(0, 2, 1)).max())
    res["resolution_of_identity"] = float(
        np.abs(ops.sum(axis=0) / total - eye).max()
    )
    gram = np.einsum("uij,vji->uv", ops, ops)
    res["orthogonality"] = float(np.abs(gram - total * np.eye(n_points)).max())
    res["unit_trace"] = float(
        np.abs(np.trace(ops, axis1=1, axis2=2) - 1.0).max()
    )

    rng = np.random.default_rng(seed)
    h = rng.normal(size=(total, total)) + 1j * rng.normal(size=(total, total))
    h = (h + h.conj().T) / 2
    coeff = np.einsum("uij,ji->u", ops, h) / total
    recon = np.tensordot(coeff.real, ops, axes=1)
    res["reconstruction"] = float(np.abs(recon - h).max())

    transposed = ops.transpose(0, 2, 1)
    worst = 0.0
    for u in range(n_points):
        best = np.abs(ops - transposed[u]).max(axis=(1, 2)).min()
        worst = max(worst, float(best))
    res["transpose_closure"] = worst

    return AlgebraReport(dims=dims, residuals=res, tol=tol)


def point_spectrum_multiplicities(d: int, tol: float = 1e-9) -> tuple[int, int, float]:
    """Eigenvalue structure shared by every point operator of one qudit.

    Returns (multiplicity of +1, multiplicity of -1, max deviation of
    any eigenvalue from +-1 over all d^2 operators).  Raises if the
    multiplicity pattern is not identical across the family.
    """
    _require_odd_prime(d)
    ops = phase_point_operators(QuditDims.of(d))
    counts = None
    worst = 0.0
    for u in range(ops.shape[0]):
        vals = np.linalg.eigvalsh(ops[u])
        dev = float(np.minimum(np.abs(vals - 1.0), np.abs(vals + 1.0)).max())
        worst = max(worst, dev)
        if dev > tol:
            raise ValueError(
                f"point operator {u} has an eigenvalue off +-1 by {dev:.3e}"
            )
        plus = int((vals > 0).sum())
        minus = d - plus
        if counts is None:
            counts = (plus, minus)
        elif counts != (plus, minus):
            raise ValueError("point operators disagree on eigenvalue multiplicities")
    return counts[0], counts[1], worst
