import json

import numpy as np
import pytest

from pwfqsd.sdp import (
    MatrixEqConstraint,
    MatrixVar,
    Objective,
    PsdConstraint,
    RowEqConstraint,
    RowIneqConstraint,
    SdpProblem,
    SolveSettings,
    SolverFailure,
    VectorVar,
    embed_complex,
    linear_rows,
    matrix_expr,
    problem_to_json,
    solve,
)


def _random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def _box_problem(c, sense="min", extra=()):
    """min/max tr(C E) over 0 <= E <= 1."""
    n = c.shape[0]
    return SdpProblem(
        variables=(MatrixVar("E", n),),
        objective=Objective(sense, linear_rows([0.0], mats={"E": c[None]})),
        constraints=(
            PsdConstraint(matrix_expr(n, mats={"E": 1.0}), "psd"),
            PsdConstraint(matrix_expr(n, offset=np.eye(n), mats={"E": -1.0}), "box"),
        )
        + tuple(extra),
    )


def test_min_trace_over_box_is_zero():
    out = solve(_box_problem(np.eye(3, dtype=complex)))
    assert out.status == "optimal"
    assert abs(out.primal_value) < 1e-8
    assert abs(out.dual_value) < 1e-8


def test_max_trace_over_box_is_dimension():
    out = solve(_box_problem(np.eye(3, dtype=complex), sense="max"))
    assert out.status == "optimal"
    assert abs(out.primal_value - 3.0) < 1e-7


def test_known_eigenvalue_answer():
    # min tr(C E) with tr E = 1 picks out the smallest eigenvalue of C
    rng = np.random.default_rng(0)
    c = _random_hermitian(rng, 4)
    trace_row = RowEqConstraint(
        linear_rows([-1.0], mats={"E": np.eye(4, dtype=complex)[None]}), "trace"
    )
    out = solve(_box_problem(c, extra=(trace_row,)))
    assert out.status == "optimal"
    assert abs(out.primal_value - np.linalg.eigvalsh(c).min()) < 1e-7


@pytest.mark.parametrize("seed", range(5))
def test_weak_duality_and_certificates(seed):
    rng = np.random.default_rng(seed)
    c = _random_hermitian(rng, 3)
    g = _random_hermitian(rng, 3)
    floor_row = RowIneqConstraint(
        linear_rows([-0.3], mats={"E": g[None]}), "floor"
    )
    out = solve(_box_problem(c, extra=(floor_row,)))
    if out.status != "optimal":
        pytest.skip("random instance infeasible")
    # dual value is a lower bound for a min problem, up to the gap
    assert out.primal_value >= out.dual_value - 1e-7
    assert out.gap <= 1e-7
    assert out.residuals["feasibility"] <= 1e-8
    assert out.residuals["stationarity"] <= 1e-6
    assert out.residuals["dual_cone"] <= 1e-8
    # solutions satisfy the constraints they were solved under
    e = out.solutions["E"].mat
    assert np.linalg.eigvalsh(e).min() >= -1e-8
    assert np.linalg.eigvalsh(np.eye(3) - e).min() >= -1e-8
    assert np.trace(g @ e).real >= 0.3 - 1e-7


def test_solution_is_hermitian_and_value_reevaluated():
    rng = np.random.default_rng(3)
    c = _random_hermitian(rng, 3)
    out = solve(_box_problem(c))
    e = out.solutions["E"]
    assert np.abs(e.mat - e.mat.conj().T).max() == 0.0
    assert abs(np.trace(c @ e.mat).real - out.primal_value) < 1e-12


# -- embedding ---------------------------------------------------------------


def test_embed_identity_offset_doubles():
    p = _box_problem(np.eye(3, dtype=complex))
    pe = embed_complex(p)
    (var,) = pe.matrix_vars
    assert var.dim == 6 and not var.hermitian
    # the box constraint offset embeds to the doubled identity
    box = [c for c in pe.constraints if c.label == "box"][0]
    assert np.abs(box.expr.offset - np.eye(6)).max() == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_psd_iff_embedded_psd(seed):
    rng = np.random.default_rng(seed)
    h = _random_hermitian(rng, 4)
    from pwfqsd.sdp import _embed_matrix

    he = _embed_matrix(h)
    assert np.abs(he - he.T).max() < 1e-14
    ev = np.linalg.eigvalsh(h)
    eve = np.linalg.eigvalsh(he)
    assert (ev.min() >= 0) == (eve.min() >= 0)
    # embedded spectrum doubles every eigenvalue's multiplicity
    assert np.abs(np.sort(np.concatenate([ev, ev])) - eve).max() < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_objective_preserved_under_embedding(seed):
    rng = np.random.default_rng([7, seed])
    c = _random_hermitian(rng, 3)
    g = _random_hermitian(rng, 3)
    rows = RowIneqConstraint(linear_rows([0.2], mats={"E": -g[None]}), "cap")
    p = _box_problem(c, extra=(rows,))
    out_complex = solve(p)  # embeds internally
    out_real = solve(embed_complex(p))  # already real; solved as-is
    assert out_complex.status == "optimal" and out_real.status == "optimal"
    assert abs(out_complex.primal_value - out_real.primal_value) < 1e-7
    assert out_complex.residuals["embedding_structure"] <= 1e-9


def test_embedding_requires_hermitian_vars():
    p = _box_problem(np.eye(2, dtype=complex))
    pe = embed_complex(p)
    with pytest.raises(ValueError):
        embed_complex(pe)  # already real symmetric


# -- vector variables and equality handling ----------------------------------


def test_vector_lp():
    # min v0 s.t. v >= 0, v0 + v1 = 1  ->  0
    p = SdpProblem(
        variables=(VectorVar("v", 2),),
        objective=Objective("min", linear_rows([0.0], vecs={"v": [[1.0, 0.0]]})),
        constraints=(
            RowEqConstraint(linear_rows([-1.0], vecs={"v": [[1.0, 1.0]]}), "sum"),
        ),
    )
    out = solve(p)
    assert out.status == "optimal"
    assert abs(out.primal_value) < 1e-8
    assert abs(out.vectors["v"].sum() - 1.0) < 1e-8
    assert out.vectors["v"].min() >= -1e-9


def test_matrix_equality_with_scalar_budget():
    # min r s.t. N0, N1 >= 0, N0 + N1 = r I, tr(G N0) >= 1
    rng = np.random.default_rng(1)
    g = _random_hermitian(rng, 3)
    p = SdpProblem(
        variables=(MatrixVar("N0", 3), MatrixVar("N1", 3), VectorVar("r", 1)),
        objective=Objective("min", linear_rows([0.0], vecs={"r": [[1.0]]})),
        constraints=(
            PsdConstraint(matrix_expr(3, mats={"N0": 1.0}), "n0"),
            PsdConstraint(matrix_expr(3, mats={"N1": 1.0}), "n1"),
            MatrixEqConstraint(
                matrix_expr(
                    3, mats={"N0": 1.0, "N1": 1.0}, vecs={"r": -np.eye(3)[None]}
                ),
                "budget",
            ),
            RowIneqConstraint(linear_rows([-1.0], mats={"N0": g[None]}), "gain"),
        ),
    )
    out = solve(p)
    assert out.status == "optimal"
    assert out.gap <= 1e-7
    # 0 <= N0 <= r I caps the gain at r times the positive part of G,
    # so the optimum is 1 over the sum of G's positive eigenvalues
    positive_part = np.clip(np.linalg.eigvalsh(g), 0.0, None).sum()
    assert abs(out.primal_value - 1 / positive_part) < 1e-6


# -- statuses ----------------------------------------------------------------


def test_infeasible_reports_reason():
    p = SdpProblem(
        variables=(MatrixVar("E", 2),),
        objective=Objective("min", linear_rows([0.0], mats={"E": np.eye(2, dtype=complex)[None]})),
        constraints=(
            PsdConstraint(matrix_expr(2, mats={"E": 1.0}), "psd"),
            RowEqConstraint(
                linear_rows([1.0], mats={"E": np.eye(2, dtype=complex)[None]}), "trace"
            ),  # tr E = -1, impossible
        ),
    )
    out = solve(p)
    assert out.status == "infeasible"
    assert out.reason
    with pytest.raises(SolverFailure):
        out.require_optimal()


def test_iteration_limit_never_silently_optimal():
    rng = np.random.default_rng(5)
    c = _random_hermitian(rng, 6)
    p = _box_problem(c)
    out = solve(p, SolveSettings(max_iter=1))
    # either the solver could not certify (inaccurate) or the single
    # iterate genuinely certifies; it must not claim without the receipt
    if out.status == "optimal":
        assert out.residuals["feasibility"] <= 1e-8
        assert out.gap <= 1e-8
    else:
        assert out.status in ("inaccurate", "infeasible", "unbounded")
        with pytest.raises(SolverFailure):
            out.require_optimal()


# -- validation and dump -----------------------------------------------------


def test_problem_validation():
    with pytest.raises(ValueError):  # unknown variable in a row
        SdpProblem(
            variables=(MatrixVar("E", 2),),
            objective=Objective("min", linear_rows([0.0], mats={"X": np.eye(2)[None]})),
            constraints=(),
        )
    with pytest.raises(ValueError):  # duplicate names
        SdpProblem(
            variables=(MatrixVar("E", 2), VectorVar("E", 3)),
            objective=Objective("min", linear_rows([0.0])),
            constraints=(),
        )
    with pytest.raises(ValueError):  # size guard
        SdpProblem(
            variables=(MatrixVar("E", 200),),
            objective=Objective("min", linear_rows([0.0])),
            constraints=(),
        )


def test_problem_to_json_dump():
    p = _box_problem(np.eye(2, dtype=complex))
    doc = problem_to_json(p)
    text = json.dumps(doc)
    back = json.loads(text)
    assert back["schema"] == 1
    assert back["variables"][0]["name"] == "E"
    assert len(back["constraints"]) == 2
