"""States used throughout: named qutrit states, stabilizer-state
enumeration for prime dimension, eigenbases of the origin point
operator, the five-vector d=5 construction, and seeded random states.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .phase_space import (
    HermitianOperator,
    QuditDims,
    _as_dims,
    _require_odd_prime,
)

__all__ = [
    "DensityOperator",
    "PureState",
    "enumerate_stabilizer_states",
    "example_d5_pair",
    "example_d5_vectors",
    "k_state",
    "mub_bases",
    "norell_state",
    "origin_eigenbasis",
    "orthogonal_complement",
    "random_density_operator",
    "random_pure_state",
    "state_from_json",
    "state_to_json",
    "strange_state",
    "tensor_power",
    "tensor_product",
    "uniform_mixture",
]

NORM_TOL = 1e-12
DENSITY_TOL = 1e-10
PURITY_TOL = 1e-8

# Tensor powers are materialised eagerly; keep them desk-sized.
TENSOR_DIM_GUARD = 243


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector of a qudit register."""

    amplitudes: np.ndarray
    dims: QuditDims

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dims = _as_dims(self.dims)
        if amp.shape[0] != dims.total_dim:
            raise ValueError(
                f"amplitude vector has length {amp.shape[0]}, expected {dims.total_dim}"
            )
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector is not normalised (norm {norm!r})")
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    def density(self) -> "DensityOperator":
        mat = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(HermitianOperator(mat), self.dims)

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semidefinite, unit-trace operator on a qudit register."""

    op: HermitianOperator
    dims: QuditDims

    def __post_init__(self):
        op = self.op if isinstance(self.op, HermitianOperator) else HermitianOperator(self.op)
        dims = _as_dims(self.dims)
        if op.dim != dims.total_dim:
            raise ValueError(f"operator dim {op.dim} does not match {dims}")
        evals = op.eigvals()
        if evals.min() < -DENSITY_TOL:
            raise ValueError(f"operator is not PSD (min eigenvalue {evals.min():.3e})")
        if abs(evals.sum() - 1.0) > DENSITY_TOL:
            raise ValueError(f"operator trace {evals.sum()!r} is not 1")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_matrix(cls, mat, dims) -> "DensityOperator":
        return cls(HermitianOperator(mat), _as_dims(dims))

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)

    def is_pure(self, tol: float = PURITY_TOL) -> bool:
        return abs(self.purity() - 1.0) <= tol


def _qutrit_vector(c0, c1, c2) -> PureState:
    return PureState(np.array([c0, c1, c2], dtype=complex), QuditDims.of(3))


def strange_state() -> PureState:
    """(|1> - |2>)/sqrt(2), the canonical maximally negative qutrit state."""
    return _qutrit_vector(0.0, 1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0))


def norell_state() -> PureState:
    """(-|0> + 2|1> - |2>)/sqrt(6)."""
    return _qutrit_vector(
        -1.0 / np.sqrt(6.0), 2.0 / np.sqrt(6.0), -1.0 / np.sqrt(6.0)
    )


def k_state() -> PureState:
    """(|1> + |2>)/sqrt(2), orthogonal partner of the strange state."""
    return _qutrit_vector(0.0, 1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0))


def orthogonal_complement(rho0) -> DensityOperator:
    """Maximally mixed state on the complement of a pure state's support.

    For pure rho0 on a d-dimensional space this is (1 - rho0)/(d - 1).
    """
    if isinstance(rho0, PureState):
        rho0 = rho0.density()
    if not isinstance(rho0, DensityOperator):
        raise TypeError("expected a PureState or DensityOperator")
    if not rho0.is_pure():
        raise ValueError(
            f"orthogonal complement requires a pure state (purity {rho0.purity():.6f})"
        )
    d = rho0.dims.total_dim
    if d < 2:
        raise ValueError("need total dimension >= 2")
    mat = (np.eye(d) - rho0.mat) / (d - 1)
    return DensityOperator.from_matrix(mat, rho0.dims)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero amplitude is real positive."""
    idx = np.flatnonzero(np.abs(vec) > 1e-12)
    if idx.size == 0:
        return vec
    lead = vec[idx[0]]
    return vec * (abs(lead) / lead)


def mub_bases(d: int) -> list[list[PureState]]:
    """The d+1 mutually unbiased bases of a prime-dimensional qudit.

    The computational basis followed by the eigenbases of X Z^a for
    a = 0..d-1.  Basis a, vector beta has amplitudes
    w^(a*inv2*j^2 + beta*j)/sqrt(d) with inv2 = (d+1)/2 the inverse of
    2 mod d, which diagonalises X Z^a directly.
    """
    _require_odd_prime(d)
    dims = QuditDims.of(d)
    comp = []
    for k in range(d):
        amp = np.zeros(d, dtype=complex)
        amp[k] = 1.0
        comp.append(PureState(amp, dims))
    bases = [comp]
    inv2 = (d + 1) // 2
    j = np.arange(d)
    for a in range(d):
        basis = []
        for beta in range(d):
            expo = (a * inv2 * j * j + beta * j) % d
            amp = np.exp(2j * np.pi * expo / d) / np.sqrt(d)
            basis.append(PureState(_fix_phase(amp), dims))
        bases.append(basis)
    return bases


def enumerate_stabilizer_states(d: int) -> list[PureState]:
    """All d(d+1) pure stabilizer states of one prime-dimensional qudit."""
    return [state for basis in mub_bases(d) for state in basis]


def origin_eigenbasis(d: int, sign: int):
    """Orthonormal eigenbasis of the origin point operator for one sign.

    The origin operator acts as |k> -> |-k>, so the +1 space is spanned
    by |0> and the symmetric pair combinations (dimension (d+1)/2) and
    the -1 space by the antisymmetric ones (dimension (d-1)/2).
    Returns a Subspace.
    """
    from .subspaces import Subspace

    _require_odd_prime(d)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    dims = QuditDims.of(d)
    cols = []
    if sign == 1:
        e0 = np.zeros(d, dtype=complex)
        e0[0] = 1.0
        cols.append(e0)
    for k in range(1, (d - 1) // 2 + 1):
        v = np.zeros(d, dtype=complex)
        v[k] = 1.0 / np.sqrt(2.0)
        v[d - k] = sign / np.sqrt(2.0)
        cols.append(v)
    # deterministic re-orthonormalisation in index order
    basis_mat = np.stack(cols, axis=1)
    q, r = np.linalg.qr(basis_mat)
    phases = np.diag(r) / np.abs(np.diag(r))
    q = q * phases.conj()
    states = [PureState(_fix_phase(q[:, i]), dims) for i in range(q.shape[1])]
    return Subspace(tuple(states), dims)


def example_d5_vectors() -> list[PureState]:
    """The five orthonormal d=5 vectors splitting H_5 into a positive
    3-dimensional part and a 2-dimensional all-magic part."""
    dims = QuditDims.of(5)
    rows = [
        [1, 0, 0, 0, 0],
        [0, 1, 1, 1, 1],
        [0, -1, 1, 1, -1],
        [0, 1, -1, 1, -1],
        [0, 1, 1, -1, -1],
    ]
    out = []
    for row in rows:
        v = np.array(row, dtype=complex)
        out.append(PureState(v / np.linalg.norm(v), dims))
    return out


def example_d5_pair() -> tuple[DensityOperator, DensityOperator]:
    """Uniform mixtures over the two halves of the d=5 construction."""
    v = example_d5_vectors()
    dims = QuditDims.of(5)
    proj = [np.outer(s.amplitudes, s.amplitudes.conj()) for s in v]
    rho0 = DensityOperator.from_matrix((proj[0] + proj[1] + proj[2]) / 3, dims)
    rho1 = DensityOperator.from_matrix((proj[3] + proj[4]) / 2, dims)
    return rho0, rho1


def random_pure_state(d, seed) -> PureState:
    """Haar-random pure state, deterministic for a given seed."""
    dims = _as_dims(d)
    rng = np.random.default_rng(seed)
    n = dims.total_dim
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState(v / np.linalg.norm(v), dims)


def random_density_operator(d, seed, rank: int | None = None) -> DensityOperator:
    """Seeded random mixed state (Ginibre), full rank unless `rank` given."""
    dims = _as_dims(d)
    n = dims.total_dim
    rank = n if rank is None else rank
    if not 1 <= rank <= n:
        raise ValueError(f"rank must be in 1..{n}")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    mat = g @ g.conj().T
    return DensityOperator.from_matrix(mat / np.trace(mat).real, dims)


def tensor_product(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    dims = QuditDims(a.dims.dims + b.dims.dims)
    if dims.total_dim > TENSOR_DIM_GUARD:
        raise ValueError(
            f"tensor product dimension {dims.total_dim} exceeds guard {TENSOR_DIM_GUARD}"
        )
    return DensityOperator.from_matrix(np.kron(a.mat, b.mat), dims)


def tensor_power(rho: DensityOperator, n: int) -> DensityOperator:
    """rho^(x n) with the register dimensions replicated."""
    if n < 1:
        raise ValueError("tensor power needs n >= 1")
    if rho.dims.total_dim ** n > TENSOR_DIM_GUARD:
        raise ValueError(
            f"tensor power dimension {rho.dims.total_dim ** n} exceeds guard {TENSOR_DIM_GUARD}"
        )
    out = rho
    for _ in range(n - 1):
        out = tensor_product(out, rho)
    return out


def state_to_json(rho: DensityOperator) -> dict:
    """JSON document for a density operator: dims plus the matrix as a
    row-major flat list of [re, im] pairs."""
    flat = rho.mat.reshape(-1)
    return {
        "dims": list(rho.dims.dims),
        "matrix": [[float(z.real), float(z.imag)] for z in flat],
    }


def state_from_json(doc) -> DensityOperator:
    if isinstance(doc, str):
        doc = json.loads(doc)
    dims = QuditDims(tuple(doc["dims"]))
    n = dims.total_dim
    entries = doc["matrix"]
    if len(entries) != n * n:
        raise ValueError(f"matrix has {len(entries)} entries, expected {n * n}")
    flat = np.array([complex(re, im) for re, im in entries])
    return DensityOperator.from_matrix(flat.reshape(n, n), dims)


def uniform_mixture(states: list[PureState]) -> DensityOperator:
    """Equal-weight mixture of a list of pure states on one register."""
    if not states:
        raise ValueError("need at least one state")
    dims = states[0].dims
    mat = sum(
        np.outer(s.amplitudes, s.amplitudes.conj()) for s in states
    ) / len(states)
    return DensityOperator.from_matrix(mat, dims)
