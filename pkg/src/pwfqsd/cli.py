"""Command-line front end.

Subcommands: `algebra` (point-operator identity sweep), `wigner`
(phase-space vector of a state), `discriminate` (minimum-error solve),
`certify` (subspace extendibility certificates), `reproduce` (the
headline quantitative claims) and `experiment-robustness` (the seeded
robustness/data-hiding sweep).

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error,
3 solver failure.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass

import click
import numpy as np

from .discrimination import (
    DiscriminationInstance,
    data_hiding_ratio,
    magic_assisted_min_error,
    min_error_dual_pwf,
    min_error_pwf,
    min_error_record,
    robustness_experiment,
    strange_pair_analytic_optimum,
    strange_pair_instance,
    unambiguous_pwf_feasible,
)
from .phase_space import (
    QuditDims,
    phase_points,
    point_spectrum_multiplicities,
    verify_phase_point_algebra,
)
from .sdp import SolverFailure, high_accuracy_settings
from .states import (
    DensityOperator,
    enumerate_stabilizer_states,
    example_d5_pair,
    example_d5_vectors,
    k_state,
    mub_bases,
    norell_state,
    origin_eigenbasis,
    orthogonal_complement,
    state_from_json,
    strange_state,
    tensor_power,
)
from .subspaces import (
    Subspace,
    certificate_to_json,
    certify_strong_unextendibility,
    is_pwf_unextendible,
    max_min_wigner_over,
    stabilizer_basis_extendibility,
)
from .wigner import negativity_report, wigner_of

EXIT_CHECK_FAILED = 1
EXIT_SOLVER_FAILURE = 3


def _fmt12(x) -> str:
    return f"{float(x):.12g}"


def _json_ready(obj):
    """Round floats to 12 significant digits for stable output."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def _write_text(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@dataclass
class CheckRow:
    claim: str
    quantity: str
    expected: float | str
    computed: float
    delta: float | None
    passed: bool


def _rows_table(rows: list[CheckRow]) -> str:
    head = f"{'claim':<14} {'quantity':<38} {'expected':>14} {'computed':>16} {'|delta|':>10}  ok"
    lines = [head, "-" * len(head)]
    for r in rows:
        exp = r.expected if isinstance(r.expected, str) else _fmt12(r.expected)
        delta = "-" if r.delta is None else f"{r.delta:.3e}"
        lines.append(
            f"{r.claim:<14} {r.quantity:<38} {exp:>14} {_fmt12(r.computed):>16} "
            f"{delta:>10}  {'pass' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines) + "\n"


def _emit_rows(rows: list[CheckRow], fmt: str, out: str | None):
    if fmt == "pretty":
        _write_text(_rows_table(rows), out)
    elif fmt == "json":
        doc = {"schema": 1, "rows": [_json_ready(vars(r)) for r in rows]}
        _write_text(json.dumps(doc, indent=2) + "\n", out)
    else:
        lines = ["claim,quantity,expected,computed,delta,pass"]
        for r in rows:
            exp = r.expected if isinstance(r.expected, str) else _fmt12(r.expected)
            delta = "" if r.delta is None else f"{r.delta:.6e}"
            lines.append(
                f"{r.claim},{r.quantity},{exp},{_fmt12(r.computed)},{delta},"
                f"{'pass' if r.passed else 'fail'}"
            )
        _write_text("\n".join(lines) + "\n", out)


def _value_row(claim, quantity, expected, computed, tol) -> CheckRow:
    delta = abs(computed - expected)
    return CheckRow(claim, quantity, expected, computed, delta, delta <= tol)


def _bound_row(claim, quantity, bound, computed, above=True) -> CheckRow:
    ok = computed > bound if above else computed < bound
    sign = ">" if above else "<"
    return CheckRow(claim, quantity, f"{sign} {bound:g}", computed, None, ok)


@click.group()
def main():
    """Phase-space positivity and its limits in qudit state discrimination."""


def _parse_dims(text: str) -> QuditDims:
    try:
        return QuditDims(tuple(int(x) for x in text.split(",")))
    except ValueError as exc:
        raise click.UsageError(str(exc))


@main.command()
@click.option("--dims", default="3", show_default=True, help="Comma-separated odd primes.")
@click.option("--seed", default=0, show_default=True, type=int,
              help="Seed for the random reconstruction check.")
@click.option("--tol", default=1e-10, show_default=True, type=float)
@click.option("--format", "fmt", type=click.Choice(["pretty", "json", "csv"]), default="pretty")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def algebra(dims, seed, tol, fmt, out):
    """Verify the point-operator identities and spectra."""
    qd = _parse_dims(dims)
    report = verify_phase_point_algebra(qd, seed=seed, tol=tol)
    spectra = {d: point_spectrum_multiplicities(d) for d in sorted(set(qd.dims))}

    if fmt == "pretty":
        lines = [f"point-operator algebra on dims={list(qd.dims)}"]
        lines += report.lines()
        for d, (plus, minus, dev) in spectra.items():
            lines.append(
                f"spectrum d={d}: +1 x{plus}, -1 x{minus} (max deviation {dev:.3e})"
            )
        n_ok = sum(1 for r in report.residuals.values() if r <= tol)
        lines.append(f"{n_ok}/{len(report.residuals)} checks passed")
        _write_text("\n".join(lines) + "\n", out)
    elif fmt == "json":
        doc = {
            "schema": 1,
            "dims": list(qd.dims),
            "residuals": report.residuals,
            "tol": tol,
            "spectra": {
                str(d): {"plus": p, "minus": m, "deviation": dev}
                for d, (p, m, dev) in spectra.items()
            },
            "passed": report.passed,
        }
        _write_text(json.dumps(_json_ready(doc), indent=2) + "\n", out)
    else:
        lines = ["check,residual,pass"]
        for name, r in report.residuals.items():
            lines.append(f"{name},{r:.6e},{'pass' if r <= tol else 'fail'}")
        _write_text("\n".join(lines) + "\n", out)

    if not report.passed:
        sys.exit(EXIT_CHECK_FAILED)


_NAMED_STATES = {
    "strange": lambda: strange_state().density(),
    "norell": lambda: norell_state().density(),
    "k": lambda: k_state().density(),
    "strange-complement": lambda: orthogonal_complement(strange_state()),
    "mixed": lambda: DensityOperator.from_matrix(np.eye(3) / 3, QuditDims.of(3)),
}


@main.command()
@click.option("--named", type=click.Choice(sorted(_NAMED_STATES)), default=None)
@click.option("--state", "state_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file with {dims, matrix} as written by the library.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV destination (stdout if omitted).")
def wigner(named, state_path, out):
    """Phase-space vector of a state, as CSV, plus a negativity summary."""
    if (named is None) == (state_path is None):
        raise click.UsageError("provide exactly one of --named / --state")
    if named:
        rho = _NAMED_STATES[named]()
    else:
        with open(state_path) as fh:
            rho = state_from_json(json.load(fh))
    w = wigner_of(rho, "state")
    header = []
    for i in range(len(rho.dims)):
        header += [f"a1_{i + 1}", f"a2_{i + 1}"]
    header.append("value")
    buf = [",".join(header)]
    for pt, val in zip(phase_points(rho.dims), w.values):
        cells = [str(c) for pair in pt.coords for c in pair]
        cells.append(_fmt12(val))
        buf.append(",".join(cells))
    _write_text("\n".join(buf) + "\n", out)
    rep = negativity_report(rho)
    click.echo(
        f"# sum_negativity={_fmt12(rep.sum_negativity)} "
        f"max_negativity={_fmt12(rep.max_negativity)} mana={_fmt12(rep.mana)}",
        err=True,
    )


@main.command()
@click.option("--pair", type=click.Choice(["strange", "norell"]), default="strange", show_default=True)
@click.option("--copies", default=1, show_default=True, type=int)
@click.option("--prior", default=0.5, show_default=True, type=float)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def discriminate(pair, copies, prior, out):
    """Minimum-error solve (primal and dual) for a named pair, as JSON."""
    base = strange_state() if pair == "strange" else norell_state()
    rho0 = base.density()
    inst = DiscriminationInstance(rho0, orthogonal_complement(rho0), prior, copies)
    try:
        record = min_error_record(inst)
    except SolverFailure as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_SOLVER_FAILURE)
    _write_text(json.dumps(_json_ready(record), indent=2) + "\n", out)


_SUBSPACES = {
    "origin-plus": lambda d: origin_eigenbasis(d, +1),
    "origin-minus": lambda d: origin_eigenbasis(d, -1),
}


@main.command()
@click.option("--subspace", type=click.Choice(sorted(_SUBSPACES) + ["example-s0", "example-s1"]),
              required=True)
@click.option("--d", "dim", default=3, show_default=True, type=int)
@click.option("--strong/--no-strong", default=True, show_default=True,
              help="Also attempt the full-support certificate when unextendible.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def certify(subspace, dim, strong, out):
    """Extendibility certificate for a named subspace, as JSON."""
    try:
        if subspace.startswith("example-"):
            rho0, _ = example_d5_pair()
            vecs = example_d5_vectors()
            chosen = vecs[:3] if subspace == "example-s0" else vecs[3:]
            space = Subspace(tuple(chosen), rho0.dims)
        else:
            space = _SUBSPACES[subspace](dim)
        if strong:
            try:
                cert = certify_strong_unextendibility(space)
            except ValueError:
                cert = is_pwf_unextendible(space)
        else:
            cert = is_pwf_unextendible(space)
    except SolverFailure as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_SOLVER_FAILURE)
    _write_text(json.dumps(_json_ready(certificate_to_json(cert)), indent=2) + "\n", out)


CLAIMS = ("strange-pair", "example-d5", "stab-basis", "magic-ancilla", "data-hiding", "all")


def _claim_strange_pair() -> list[CheckRow]:
    rows = []
    for n in (1, 2):
        inst = strange_pair_instance(n)
        primal, _ = min_error_pwf(inst)
        dual, _ = min_error_dual_pwf(inst)
        rows.append(_value_row("strange-pair", f"min error, {n} copies (SDP)", 0.5 ** (n + 1), primal, 1e-6))
        rows.append(_value_row("strange-pair", f"dual value, {n} copies (SDP)", 0.5 ** (n + 1), dual, 1e-6))
        rows.append(_value_row("strange-pair", f"primal-dual gap, {n} copies", 0.0, abs(primal - dual), 1e-6))
    for n in (1, 2, 3):
        _, pair, cert = strange_pair_analytic_optimum(n)
        inst = strange_pair_instance(n)
        rho0, rho1 = inst.tensored()
        achieved = 0.5 + 0.5 * float(np.trace(pair.e0.mat @ (rho1.mat - rho0.mat)).real)
        rows.append(_value_row("strange-pair", f"analytic POVM error, {n} copies", 0.5 ** (n + 1), achieved, 1e-8))
        res = cert.residuals(inst)
        rows.append(_value_row("strange-pair", f"analytic dual value, {n} copies", 0.5 ** (n + 1), cert.value, 1e-8))
        rows.append(
            _bound_row("strange-pair", f"dual slack min eig, {n} copies",
                       -1e-7, res["operator_slack_min_eig"])
        )
    for n in (1, 2):
        value, _ = unambiguous_pwf_feasible(strange_pair_instance(n), target=0)
        rows.append(_bound_row("strange-pair", f"unambiguous id of the magic state, {n} copies",
                               1e-7, value, above=False))
    return rows


def _claim_example_d5() -> list[CheckRow]:
    rows = []
    rho0, _ = example_d5_pair()
    vecs = example_d5_vectors()
    s1 = Subspace(tuple(vecs[3:]), rho0.dims)
    margin, _ = max_min_wigner_over(s1)
    rows.append(_value_row("example-d5", "best min Wigner value on the magic half", -0.2, margin, 1e-7))
    s0 = Subspace(tuple(vecs[:3]), rho0.dims)
    cert = certify_strong_unextendibility(s0)
    rows.append(CheckRow("example-d5", "positive half strongly unextendible", "True",
                         1.0 if cert.strong else 0.0, None, cert.strong is True))
    rows.append(_bound_row("example-d5", "mixture on the positive half is PWF",
                           -1e-9, wigner_of(rho0, "state").min_value))
    return rows


def _claim_stab_basis() -> list[CheckRow]:
    from itertools import combinations

    rows = []
    for d in (3, 5):
        checked = 0
        ok = 0
        for basis in mub_bases(d):
            for size in range(1, d):
                for subset in combinations(basis, size):
                    cert = stabilizer_basis_extendibility(subset)
                    checked += 1
                    ok += int(cert.verdict == "extendible")
        rows.append(_value_row("stab-basis", f"extendible fraction over d={d} subsets",
                               1.0, ok / checked, 0.0))
    return rows


def _claim_magic_ancilla(deep: bool) -> list[CheckRow]:
    rows = []
    strange = strange_state().density()
    rep = negativity_report(strange)
    rows.append(_value_row("magic-ancilla", "sum negativity of the strange state", 1 / 3, rep.sum_negativity, 1e-9))
    rows.append(_value_row("magic-ancilla", "d x max negativity of the strange state", 1.0, 3 * rep.max_negativity, 1e-9))
    rep2 = negativity_report(tensor_power(strange, 2))
    rows.append(_value_row("magic-ancilla", "sum negativity of two strange copies", 8 / 9, rep2.sum_negativity, 1e-9))
    inst = strange_pair_instance(1)
    err1 = magic_assisted_min_error(inst, strange, k=1)
    rows.append(_bound_row("magic-ancilla", "assisted error, one strange ancilla", 1e-4, err1))
    if deep:
        err2 = magic_assisted_min_error(inst, strange, k=2)
        rows.append(_bound_row("magic-ancilla", "assisted error, two strange ancillas", 1e-4, err2))
    return rows


def _claim_data_hiding() -> list[CheckRow]:
    rows = []
    strange = strange_state().density()
    comp = orthogonal_complement(strange)
    rows.append(_value_row("data-hiding", "ratio, 1 copy", 2.0,
                           data_hiding_ratio(strange, comp), 1e-6))
    rows.append(_value_row("data-hiding", "ratio, 2 copies", 4 / 3,
                           data_hiding_ratio(tensor_power(strange, 2), tensor_power(comp, 2)), 1e-6))
    basis = enumerate_stabilizer_states(3)
    ratio = data_hiding_ratio(basis[0].density(), basis[1].density(),
                              settings=high_accuracy_settings())
    rows.append(_value_row("data-hiding", "ratio, orthogonal stabilizer pair", 1.0, ratio, 1e-9))
    return rows


@main.command()
@click.option("--claim", type=click.Choice(CLAIMS), default="all", show_default=True)
@click.option("--deep", is_flag=True, help="Include the slow two-ancilla solve.")
@click.option("--format", "fmt", type=click.Choice(["pretty", "json", "csv"]), default="pretty")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def reproduce(claim, deep, fmt, out):
    """Recompute the headline quantitative claims and compare."""
    builders = {
        "strange-pair": _claim_strange_pair,
        "example-d5": _claim_example_d5,
        "stab-basis": _claim_stab_basis,
        "magic-ancilla": lambda: _claim_magic_ancilla(deep),
        "data-hiding": _claim_data_hiding,
    }
    names = CLAIMS[:-1] if claim == "all" else (claim,)
    rows: list[CheckRow] = []
    try:
        for name in names:
            rows.extend(builders[name]())
    except SolverFailure as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_SOLVER_FAILURE)
    _emit_rows(rows, fmt, out)
    if not all(r.passed for r in rows):
        sys.exit(EXIT_CHECK_FAILED)


@main.command("experiment-robustness")
@click.option("--pairs", default=100, show_default=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--jobs", default=1, show_default=True, type=int)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV destination (stdout if omitted).")
def experiment_robustness(pairs, seed, jobs, out):
    """Robustness vs data-hiding ratio over seeded random qutrit pairs."""
    if pairs < 1:
        raise click.UsageError("--pairs must be at least 1")
    rows = robustness_experiment(pairs, seed, jobs=jobs)
    lines = ["seed,sn,robustness,dh_ratio,status"]
    for row in rows:
        rob = "" if row["robustness"] is None else _fmt12(row["robustness"])
        ratio = "" if row["dh_ratio"] is None else _fmt12(row["dh_ratio"])
        lines.append(f"{row['seed']},{_fmt12(row['sn'])},{rob},{ratio},{row['status']}")
    _write_text("\n".join(lines) + "\n", out)


if __name__ == "__main__":
    main()
