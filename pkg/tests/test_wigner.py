import numpy as np
import pytest

from pwfqsd.phase_space import PhasePoint, QuditDims, phase_points
from pwfqsd.states import (
    DensityOperator,
    enumerate_stabilizer_states,
    k_state,
    norell_state,
    orthogonal_complement,
    random_density_operator,
    random_pure_state,
    strange_state,
    tensor_power,
    tensor_product,
)
from pwfqsd.wigner import (
    WignerRepresentation,
    is_pwf,
    negativity_report,
    outcome_probability,
    wigner_of,
    write_wigner_csv,
)


def oracle_wigner_state(rho_mat, d):
    """Per-point trace loop against the parity-form point operators."""
    from tests.test_phase_space import oracle_point_operator

    vals = []
    for a1 in range(d):
        for a2 in range(d):
            vals.append(np.trace(oracle_point_operator(a1, a2, d) @ rho_mat).real / d)
    return np.array(vals)


def test_maximally_mixed_is_flat():
    rho = DensityOperator.from_matrix(np.eye(3) / 3, QuditDims.of(3))
    w = wigner_of(rho, "state")
    assert np.abs(w.values - 1 / 9).max() < 1e-14


def test_strange_state_at_origin():
    w = wigner_of(strange_state().density(), "state")
    assert abs(w.value_at(PhasePoint.single(0, 0)) + 1 / 3) < 1e-12
    assert w.argmin_point == PhasePoint.single(0, 0)


def test_basis_state_matches_trace_oracle():
    e0 = np.zeros((3, 3), dtype=complex)
    e0[0, 0] = 1.0
    rho = DensityOperator.from_matrix(e0, QuditDims.of(3))
    got = wigner_of(rho, "state").values
    assert np.abs(got - oracle_wigner_state(e0, 3)).max() < 1e-12
    # support sits on the a2 = 0 line
    for idx, pt in enumerate(phase_points(QuditDims.of(3))):
        expected = 1 / 3 if pt.coords[0][1] == 0 else 0.0
        assert abs(got[idx] - expected) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_random_state_matches_trace_oracle(seed):
    rho = random_density_operator(3, seed)
    got = wigner_of(rho, "state").values
    assert np.abs(got - oracle_wigner_state(rho.mat, 3)).max() < 1e-12


def test_role_normalisation():
    rho = strange_state().density()
    as_state = wigner_of(rho, "state").values
    as_effect = wigner_of(rho.mat, "effect", rho.dims).values
    assert np.abs(as_effect - 3 * as_state).max() < 1e-12
    with pytest.raises(ValueError):
        wigner_of(rho, "density")  # unknown role
    with pytest.raises(ValueError):
        WignerRepresentation("state", np.zeros(8), QuditDims.of(3))


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        wigner_of(np.array([[0, 1], [0, 0]], dtype=complex), "state", QuditDims.of(3))


@pytest.mark.parametrize("d", [3, 5])
def test_wigner_bounds_random_states(d):
    for seed in range(50):
        rho = random_density_operator(d, seed)
        w = wigner_of(rho, "state")
        assert w.values.min() >= -1 / d - 1e-12
        assert w.values.max() <= 1 / d + 1e-12
        assert abs(w.values.sum() - 1.0) < 1e-9


def test_factorisation_under_tensor():
    a = random_density_operator(3, 1)
    b = random_density_operator(3, 2)
    wa = wigner_of(a, "state").values
    wb = wigner_of(b, "state").values
    wab = wigner_of(tensor_product(a, b), "state").values
    assert np.abs(wab - np.outer(wa, wb).reshape(-1)).max() < 1e-10


@pytest.mark.parametrize("d,n_samples", [(3, 1000), (5, 1000)])
def test_hudson_both_directions(d, n_samples):
    # Haar-random pure states are never positively represented, while
    # every enumerated stabilizer state is.
    for state in enumerate_stabilizer_states(d):
        assert is_pwf(state.density(), "state")
    hits = 0
    for seed in range(n_samples):
        psi = random_pure_state(d, [2024, d, seed])
        if is_pwf(psi.density(), "state"):
            hits += 1
    assert hits == 0


def test_strange_and_norell_fail_pwf():
    assert not is_pwf(strange_state().density(), "state")
    assert not is_pwf(norell_state().density(), "state")
    assert wigner_of(norell_state().density(), "state").min_value <= -1e-6


def test_negativity_strange():
    rep = negativity_report(strange_state().density())
    assert abs(rep.sum_negativity - 1 / 3) < 1e-12
    assert abs(rep.max_negativity - 1 / 3) < 1e-12
    assert abs(rep.min_value + 1 / 3) < 1e-12
    assert rep.argmin_point == PhasePoint.single(0, 0)
    assert abs(rep.mana - np.log(5 / 3)) < 1e-12
    rep2 = negativity_report(strange_state().density(), log_base="2")
    assert abs(rep2.mana - np.log2(5 / 3)) < 1e-12


def test_negativity_clamped_for_positive_states():
    rep = negativity_report(DensityOperator.from_matrix(np.eye(3) / 3, QuditDims.of(3)))
    assert rep.sum_negativity == 0.0
    assert rep.max_negativity == 0.0  # min value 1/9 clamps to zero
    assert rep.mana == 0.0


def test_negativity_two_strange_copies():
    rep = negativity_report(tensor_power(strange_state().density(), 2))
    assert abs(rep.sum_negativity - 8 / 9) < 1e-12


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sum_negativity_composition_law(k, seed):
    tau = random_density_operator(3, seed)
    sn1 = negativity_report(tau).sum_negativity
    snk = negativity_report(tensor_power(tau, k)).sum_negativity
    assert abs(snk - ((2 * sn1 + 1) ** k - 1) / 2) < 1e-9


def test_outcome_probability_computational_basis():
    rho = DensityOperator.from_matrix(np.diag([1.0, 0, 0]), QuditDims.of(3))
    effects = [np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0]), np.diag([0, 0, 1.0])]
    probs = outcome_probability(rho, effects)
    assert np.abs(probs - np.array([1.0, 0, 0])).max() < 1e-12


def test_outcome_probability_ks_effect():
    s = strange_state().amplitudes
    k = k_state().amplitudes
    effect = np.outer(k, k.conj()) + np.outer(s, s.conj())
    rho1 = orthogonal_complement(strange_state())
    probs = outcome_probability(rho1, [effect, np.eye(3) - effect])
    assert np.abs(probs - 0.5).max() < 1e-12


def _random_povm(d, seed, outcomes=3):
    rng = np.random.default_rng(seed)
    gs = []
    for _ in range(outcomes):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        gs.append(g @ g.conj().T)
    total = sum(gs)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return [inv_sqrt @ g @ inv_sqrt for g in gs]


@pytest.mark.parametrize("seed", range(10))
def test_outcome_probability_matches_traces(seed):
    rho = random_density_operator(3, [9, seed])
    effects = _random_povm(3, [10, seed])
    probs = outcome_probability(rho, effects)
    direct = np.array([np.trace(e @ rho.mat).real for e in effects])
    assert np.abs(probs - direct).max() < 1e-9
    assert abs(probs.sum() - 1.0) < 1e-9


def test_outcome_probability_rejects_non_povm():
    rho = DensityOperator.from_matrix(np.eye(3) / 3, QuditDims.of(3))
    with pytest.raises(ValueError):
        outcome_probability(rho, [np.eye(3), np.eye(3)])  # sums to 2
    with pytest.raises(ValueError):
        outcome_probability(rho, [np.diag([2.0, 1, 1]), np.diag([-1.0, 0, 0])])


@pytest.mark.parametrize("seed", range(5))
def test_two_outcome_effects_are_pointwise_complete(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    g = g @ g.conj().T
    e0 = g / (np.linalg.eigvalsh(g).max() + 0.1)
    e1 = np.eye(3) - e0
    w0 = wigner_of(e0, "effect", QuditDims.of(3)).values
    w1 = wigner_of(e1, "effect", QuditDims.of(3)).values
    assert np.abs(w0 + w1 - 1.0).max() < 1e-10


def test_csv_export(tmp_path):
    w = wigner_of(strange_state().density(), "state")
    out = tmp_path / "w.csv"
    write_wigner_csv(w, out)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "a1_1,a2_1,value"
    assert len(lines) == 10
    assert lines[1] == "0,0,-0.333333333333"
    # byte-identical on rewrite
    again = tmp_path / "w2.csv"
    write_wigner_csv(w, again)
    assert out.read_bytes() == again.read_bytes()


def test_csv_export_composite_header(tmp_path):
    rho = tensor_power(strange_state().density(), 2)
    out = tmp_path / "w.csv"
    write_wigner_csv(wigner_of(rho, "state"), out)
    header = out.read_text().split("\n", 1)[0]
    assert header == "a1_1,a2_1,a1_2,a2_2,value"
