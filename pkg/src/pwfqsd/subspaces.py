"""Subspace structure of the phase-space positivity cone.

Decides whether a subspace admits a positively-represented state in its
orthogonal complement (extendibility), certifies the strong variant via
a full-support positive witness inside the subspace, and implements the
shortcut for subspaces spanned by stabilizer states, whose complement
projector has 0/1 effect-Wigner values.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .phase_space import HermitianOperator, QuditDims, _as_dims, phase_point_operators
from .sdp import (
    MatrixVar,
    PsdConstraint,
    RowEqConstraint,
    RowIneqConstraint,
    Objective,
    SdpProblem,
    SolveSettings,
    VectorVar,
    linear_rows,
    matrix_expr,
    solve,
)
from .states import DensityOperator, PureState, state_to_json
from .wigner import wigner_of

__all__ = [
    "ExtendibilityCertificate",
    "InconclusiveVerdict",
    "Subspace",
    "certificate_to_json",
    "certify_strong_unextendibility",
    "is_pwf_unextendible",
    "max_min_wigner_over",
    "stabilizer_basis_extendibility",
]

GRAM_TOL = 1e-10
MARGIN_DEADBAND = 1e-7
SUPPORT_THRESHOLD = 1e-7
WITNESS_RECHECK_TOL = 1e-8


class InconclusiveVerdict(RuntimeError):
    """The margin landed inside the numerical deadband and no exact
    witness could be recovered; refusing to guess."""

    def __init__(self, message: str, margin: float):
        super().__init__(message)
        self.margin = margin


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis of a subspace, with its projector derived."""

    basis: tuple[PureState, ...]
    dims: QuditDims

    def __post_init__(self):
        dims = _as_dims(self.dims)
        basis = tuple(self.basis)
        if not basis:
            raise ValueError("subspace needs at least one basis vector")
        for s in basis:
            if s.dims != dims:
                raise ValueError("basis state dims mismatch")
        mat = self.basis_matrix_of(basis)
        gram = mat.conj().T @ mat
        dev = np.abs(gram - np.eye(len(basis))).max()
        if dev > GRAM_TOL:
            raise ValueError(f"basis is not orthonormal (Gram deviation {dev:.3e})")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "dims", dims)

    @staticmethod
    def basis_matrix_of(basis) -> np.ndarray:
        return np.stack([s.amplitudes for s in basis], axis=1)

    @classmethod
    def from_vectors(cls, vectors, dims) -> "Subspace":
        dims = _as_dims(dims)
        states = [
            v if isinstance(v, PureState) else PureState(np.asarray(v, dtype=complex), dims)
            for v in vectors
        ]
        return cls(tuple(states), dims)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def basis_matrix(self) -> np.ndarray:
        return self.basis_matrix_of(self.basis)

    @property
    def projector(self) -> HermitianOperator:
        b = self.basis_matrix
        return HermitianOperator(b @ b.conj().T)

    def complement(self) -> "Subspace":
        """Orthonormal basis of the orthogonal complement."""
        total = self.dims.total_dim
        if self.dimension >= total:
            raise ValueError("complement of the full space is empty")
        u, _, _ = np.linalg.svd(self.basis_matrix, full_matrices=True)
        cols = []
        for i in range(self.dimension, total):
            v = u[:, i]
            lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
            cols.append(v * (abs(lead) / lead))
        return Subspace.from_vectors(cols, self.dims)


@dataclass(frozen=True)
class ExtendibilityCertificate:
    """Outcome of an extendibility question about a subspace.

    margin is the best achievable minimum Wigner value over states
    supported in the complement; a strictly negative margin certifies
    unextendibility, a positively-represented witness certifies
    extendibility.  strong is True only when a full-support positive
    witness inside the subspace was found and re-verified (sufficient,
    not necessary, so False never appears: the unknown case is None).
    """

    verdict: str
    margin: float
    witness: DensityOperator | None = None
    strong: bool | None = None
    support_margin: float | None = None
    detail: str = ""
    settings: SolveSettings | None = None


def _round_to_density(mat: np.ndarray, dims: QuditDims) -> DensityOperator:
    """Clip solver-level negative eigenvalues and renormalise."""
    sym = (mat + mat.conj().T) / 2
    vals, vecs = np.linalg.eigh(sym)
    vals = np.clip(vals, 0.0, None)
    if vals.sum() <= 0:
        raise ValueError("cannot normalise a zero matrix into a state")
    rho = (vecs * vals) @ vecs.conj().T / vals.sum()
    return DensityOperator.from_matrix(rho, dims)


def max_min_wigner_over(space: Subspace, settings: SolveSettings | None = None):
    """max over states supported in `space` of the minimum Wigner value.

    Solves max t s.t. sigma >= 0, tr sigma = 1, W(B sigma B^dag)(u) >= t
    for all u, with B an orthonormal basis map of the subspace, and
    returns (optimum, attaining state).
    """
    settings = settings or SolveSettings()
    dims = space.dims
    total = dims.total_dim
    b = space.basis_matrix
    k = space.dimension
    ops = phase_point_operators(dims)
    compressed = np.einsum("ia,uij,jb->uab", b.conj(), ops, b) / total
    n_points = compressed.shape[0]

    problem = SdpProblem(
        variables=(MatrixVar("sigma", k), VectorVar("t", 1, nonneg=False)),
        objective=Objective("max", linear_rows([0.0], vecs={"t": [[1.0]]})),
        constraints=(
            PsdConstraint(matrix_expr(k, mats={"sigma": 1.0}), "sigma_psd"),
            RowEqConstraint(
                linear_rows([-1.0], mats={"sigma": np.eye(k)[None]}), "unit_trace"
            ),
            RowIneqConstraint(
                linear_rows(
                    np.zeros(n_points),
                    mats={"sigma": compressed},
                    vecs={"t": -np.ones((n_points, 1))},
                ),
                "wigner_floor",
            ),
        ),
    )
    outcome = solve(problem, settings).require_optimal()
    sigma = outcome.solutions["sigma"].mat
    witness = _round_to_density(b @ sigma @ b.conj().T, dims)
    return outcome.primal_value, witness


def is_pwf_unextendible(
    space: Subspace,
    settings: SolveSettings | None = None,
    deadband: float = MARGIN_DEADBAND,
) -> ExtendibilityCertificate:
    """Decide extendibility of `space` via the complement's max-min Wigner value.

    Margins beyond +-deadband decide the verdict outright.  Inside the
    deadband the solver's state is rounded and re-evaluated: an exact
    positively-represented state in the complement still certifies
    extendibility (this covers complements whose best states sit on the
    positivity boundary, e.g. stabilizer states); otherwise the call
    refuses to guess and raises InconclusiveVerdict.
    """
    settings = settings or SolveSettings()
    total = space.dims.total_dim
    if not 0 < space.dimension < total:
        raise ValueError("extendibility question needs a proper nonzero subspace")
    margin, candidate = max_min_wigner_over(space.complement(), settings)

    if margin < -deadband:
        return ExtendibilityCertificate(
            verdict="unextendible",
            margin=margin,
            detail="no state in the complement clears a nonnegative Wigner floor",
            settings=settings,
        )

    witness_min = wigner_of(candidate, "state").min_value
    if margin > deadband or witness_min >= -1e-9:
        if witness_min < -1e-9:
            raise InconclusiveVerdict(
                f"margin {margin:.3e} suggests extendible but the rounded witness "
                f"re-evaluates to min Wigner {witness_min:.3e}",
                margin,
            )
        return ExtendibilityCertificate(
            verdict="extendible",
            margin=margin,
            witness=candidate,
            detail=f"witness re-evaluated with min Wigner value {witness_min:.3e}",
            settings=settings,
        )
    raise InconclusiveVerdict(
        f"margin {margin:.3e} is inside the +-{deadband:.0e} deadband and no "
        "exact witness was recovered",
        margin,
    )


def certify_strong_unextendibility(
    space: Subspace,
    settings: SolveSettings | None = None,
    support_threshold: float = SUPPORT_THRESHOLD,
) -> ExtendibilityCertificate:
    """Certify strong unextendibility via a full-support positive witness.

    Requires the subspace to be unextendible, then maximises t subject
    to sigma >= t I on the subspace with all Wigner values nonnegative.
    A witness with t beyond the support threshold (re-verified
    independently) upgrades the certificate to strong=True; otherwise
    strong stays None, since the criterion is sufficient only.
    """
    settings = settings or SolveSettings()
    base = is_pwf_unextendible(space, settings)
    if base.verdict != "unextendible":
        raise ValueError("subspace is PWF extendible; strong certification does not apply")

    dims = space.dims
    total = dims.total_dim
    b = space.basis_matrix
    k = space.dimension
    ops = phase_point_operators(dims)
    compressed = np.einsum("ia,uij,jb->uab", b.conj(), ops, b) / total
    n_points = compressed.shape[0]

    problem = SdpProblem(
        variables=(MatrixVar("sigma", k), VectorVar("t", 1, nonneg=False)),
        objective=Objective("max", linear_rows([0.0], vecs={"t": [[1.0]]})),
        constraints=(
            PsdConstraint(matrix_expr(k, mats={"sigma": 1.0}), "sigma_psd"),
            PsdConstraint(
                matrix_expr(k, mats={"sigma": 1.0}, vecs={"t": -np.eye(k)[None]}),
                "full_support",
            ),
            RowEqConstraint(
                linear_rows([-1.0], mats={"sigma": np.eye(k)[None]}), "unit_trace"
            ),
            RowIneqConstraint(
                linear_rows(np.zeros(n_points), mats={"sigma": compressed}),
                "wigner_nonneg",
            ),
        ),
    )
    outcome = solve(problem, settings)
    if outcome.status == "infeasible":
        return ExtendibilityCertificate(
            verdict="unextendible",
            margin=base.margin,
            strong=None,
            detail="no positively-represented state is supported in the subspace",
            settings=settings,
        )
    outcome.require_optimal()
    t_star = outcome.primal_value
    if t_star <= support_threshold:
        return ExtendibilityCertificate(
            verdict="unextendible",
            margin=base.margin,
            strong=None,
            support_margin=t_star,
            detail=(
                f"best full-support floor {t_star:.3e} is below the threshold; "
                "the sufficient criterion does not apply"
            ),
            settings=settings,
        )

    sigma = outcome.solutions["sigma"].mat
    witness = _round_to_density(b @ sigma @ b.conj().T, dims)
    w_min = wigner_of(witness, "state").min_value
    support_eig = float(
        np.linalg.eigvalsh(b.conj().T @ witness.mat @ b).min()
    )
    if w_min < -WITNESS_RECHECK_TOL or support_eig < t_star / 2:
        return ExtendibilityCertificate(
            verdict="unextendible",
            margin=base.margin,
            strong=None,
            support_margin=t_star,
            detail=(
                f"witness re-verification failed (min Wigner {w_min:.3e}, "
                f"support floor {support_eig:.3e})"
            ),
            settings=settings,
        )
    return ExtendibilityCertificate(
        verdict="unextendible",
        margin=base.margin,
        witness=witness,
        strong=True,
        support_margin=t_star,
        detail=(
            f"full-support witness re-verified: min Wigner {w_min:.3e}, "
            f"support floor {support_eig:.3e}"
        ),
        settings=settings,
    )


def stabilizer_basis_extendibility(
    states, orth_tol: float = 1e-9, value_tol: float = 1e-8
) -> ExtendibilityCertificate:
    """Extendibility of the span of orthonormal stabilizer states.

    The complement projector of such a span always has effect-Wigner
    values 0 or 1; this is checked explicitly and its normalisation is
    returned as the witness.  Non-orthogonal or negatively-represented
    inputs are rejected.
    """
    states = list(states)
    if not states:
        raise ValueError("need at least one state")
    dims = states[0].dims
    total = dims.total_dim
    if len(states) >= total:
        raise ValueError("need fewer states than the total dimension")
    mat = np.stack([s.amplitudes for s in states], axis=1)
    gram = mat.conj().T @ mat
    dev = np.abs(gram - np.eye(len(states))).max()
    if dev > orth_tol:
        raise ValueError(f"states are not pairwise orthonormal (deviation {dev:.3e})")
    for i, s in enumerate(states):
        w_min = wigner_of(s, "state").min_value
        if w_min < -1e-9:
            raise ValueError(
                f"state {i} has a negative Wigner value ({w_min:.3e}); "
                "not a stabilizer state"
            )

    projector_perp = np.eye(total) - mat @ mat.conj().T
    w = wigner_of(projector_perp, "effect", dims)
    off = float(np.minimum(np.abs(w.values), np.abs(w.values - 1.0)).max())
    if off > value_tol:
        raise ValueError(
            f"complement projector Wigner values stray from {{0, 1}} by {off:.3e}"
        )
    witness = DensityOperator.from_matrix(
        projector_perp / np.trace(projector_perp).real, dims
    )
    margin = wigner_of(witness, "state").min_value
    return ExtendibilityCertificate(
        verdict="extendible",
        margin=margin,
        witness=witness,
        detail=(
            f"complement projector Wigner values are 0/1 within {off:.3e}; "
            "its normalisation is a positively-represented witness"
        ),
    )


def certificate_to_json(cert: ExtendibilityCertificate) -> dict:
    return {
        "schema": 1,
        "verdict": cert.verdict,
        "margin": cert.margin,
        "strong": cert.strong,
        "support_margin": cert.support_margin,
        "witness": None if cert.witness is None else state_to_json(cert.witness),
        "detail": cert.detail,
        "solver_settings": None if cert.settings is None else _settings_doc(cert.settings),
    }


def _settings_doc(settings: SolveSettings) -> dict:
    doc = asdict(settings)
    doc["solver_opts"] = {k: repr(v) for k, v in doc["solver_opts"].items()}
    return doc
