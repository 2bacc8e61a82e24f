import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlgame import games, linalg, strategies
from nlgame.errors import (
    DimensionMismatch,
    HypothesisViolated,
    InvalidWeight,
    BadN,
    NotAFunction,
    NotFullSchmidtRank,
    NotPerfect,
    NotWeaklyProjective,
    ShapeMismatch,
    UnsupportedGameShape,
)
from nlgame.games import ALICE, BOB
from nlgame.strategies import label_key

from conftest import commuting_instance, rand_povm, rand_unit


def naive_win(G, St):
    """Oracle: explicit Kronecker products for every (s, t, a, b)."""
    total = 0.0
    for (i, s), (j, t) in itertools.product(enumerate(G.S), enumerate(G.T)):
        E, F = St.alice[label_key(s)], St.bob[label_key(t)]
        for k, m in itertools.product(range(len(G.A)), range(len(G.B))):
            if G.V[i, j, k, m]:
                total += G.pi[i, j] * (St.psi.conj() @ np.kron(E[k], F[m]) @ St.psi).real
    return total


def random_strategy(G, rng, d_a, d_b):
    alice = {label_key(s): rand_povm(rng, d_a, len(G.A)) for s in G.S}
    bob = {label_key(t): rand_povm(rng, d_b, len(G.B)) for t in G.T}
    return strategies.QuantumStrategy(d_a, d_b, rand_unit(rng, d_a * d_b), alice, bob)


# -- construction and evaluation -----------------------------------------------


def test_strategy_validation():
    with pytest.raises(ShapeMismatch):
        strategies.QuantumStrategy(1, 1, [1.0], {"0": [[[0.5]]]}, {"0": [[[1.0]]]})
    with pytest.raises(DimensionMismatch):
        strategies.QuantumStrategy(2, 2, [1.0, 0, 0], {}, {})


def test_chsh_quantum_value():
    G, St = games.make_chsh_game(), strategies.chsh_strategy()
    expected = np.cos(np.pi / 8) ** 2
    assert abs(strategies.winning_probability(G, St) - expected) <= 1e-12
    assert abs(naive_win(G, St) - expected) <= 1e-12
    chk = strategies.is_perfect(G, St)
    assert not chk and abs(chk.total_loss - (1 - expected)) <= 1e-12


def test_trivial_game_any_strategy_wins(rng):
    G = games.make_trivial_game(2, 3)
    St = random_strategy(G, rng, 2, 3)
    assert abs(strategies.winning_probability(G, St) - 1) <= 1e-12
    assert strategies.is_perfect(G, St)


def test_embedded_classical_strategy_matches_payoff():
    G = games.make_chsh_game()
    res = games.classical_value(G)
    St = strategies.embed_classical_strategy(G, res.alice, res.bob)
    assert abs(strategies.winning_probability(G, St) - 0.75) <= 1e-15


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        strategies.winning_probability(games.make_magic_square_game(), strategies.chsh_strategy())


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_winning_probability_matches_naive(d_a, d_b, seed):
    rng = np.random.default_rng(seed)
    G = games.make_chsh_game()
    St = random_strategy(G, rng, d_a, d_b)
    assert abs(strategies.winning_probability(G, St) - naive_win(G, St)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_gauge_invariance(seed):
    rng = np.random.default_rng(seed)
    G = games.make_chsh_game()
    St = random_strategy(G, rng, 2, 3)
    rotated = strategies.apply_local_unitaries(St, strategies.random_unitary(2, rng), strategies.random_unitary(3, rng))
    assert abs(strategies.winning_probability(G, St) - strategies.winning_probability(G, rotated)) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 0.99), st.integers(0, 2**31 - 1))
def test_block_sum_preserves_value(p, seed):
    rng = np.random.default_rng(seed)
    G = games.make_chsh_game()
    St = random_strategy(G, rng, 2, 2)
    Sp = strategies.block_direct_sum_strategy(St, p)
    assert (Sp.d_a, Sp.d_b) == (4, 4)
    assert abs(strategies.winning_probability(G, St) - strategies.winning_probability(G, Sp)) <= 1e-10


@pytest.mark.parametrize("p", [0.0, 1.0, -0.5, 2.0])
def test_block_sum_invalid_weight(fourier4, p):
    with pytest.raises(InvalidWeight):
        strategies.block_direct_sum_strategy(fourier4, p)


def test_swap_parties_preserves_value(rng):
    G = games.make_chsh_game()
    St = random_strategy(G, rng, 2, 3)
    assert abs(
        strategies.winning_probability(G, St) - strategies.winning_probability(G.swap_parties(), St.swap_parties())
    ) <= 1e-12


# -- zero patterns, projectivity, coarse-graining --------------------------------


def test_commuting_zero_pattern():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        E, F, psi, Psi = commuting_instance(rng)
        for e, f in itertools.product(E, F):
            z_psi = abs(linalg.bipartite_expectation(e, f, psi)) <= 1e-9
            z_Psi = abs(linalg.bipartite_expectation(e, f, Psi)) <= 1e-9
            assert z_psi == z_Psi


def test_correlated_basis_measurement():
    d = 3
    E = np.array([np.diag(np.eye(d)[i]) for i in range(d)])
    rep = strategies.verify_lemma2(E, E, linalg.maximally_entangled_state(d), 1e-12)
    assert rep.max_projectivity <= 1e-12 and rep.max_commutator <= 1e-12
    assert len(rep.rows) == 2 * d


def test_correlated_nonuniform_state():
    psi = np.array([np.sqrt(0.7), 0, 0, np.sqrt(0.3)])
    E = np.array([np.diag([1.0, 0]), np.diag([0, 1.0])])
    rep = strategies.verify_lemma2(E, E, psi, 1e-12)
    assert rep.max_residual <= 1e-12
    assert rep.schmidt_classes == [[0], [1]]


def test_correlation_hypothesis_violated():
    E = np.array([0.5 * np.eye(2), 0.5 * np.eye(2)])
    with pytest.raises(HypothesisViolated):
        strategies.verify_lemma2(E, E, linalg.maximally_entangled_state(2), 1e-9)


def test_correlation_needs_full_rank():
    E = np.array([np.diag([1.0, 0]), np.diag([0, 1.0])])
    with pytest.raises(NotFullSchmidtRank):
        strategies.verify_lemma2(E, E, [1, 0, 0, 0], 1e-9)


def test_correlation_conclusion_on_random_instances():
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(40):
        E, F, psi, _ = commuting_instance(rng)
        # pair outcomes consistently: F built on the same assignment as E
        d = E.shape[-1]
        sd = linalg.schmidt_decompose(psi, d, d)
        B = sd.right_basis
        A = sd.left_basis
        # perfect correlation: F_i = conj of E_i transported to Bob's Schmidt frame
        F = np.array([B @ (A.conj().T @ e @ A).conj() @ B.conj().T for e in E])
        try:
            rep = strategies.verify_lemma2(E, F, psi, 1e-12)
        except HypothesisViolated:
            continue
        checked += 1
        assert rep.max_projectivity <= 1e-8 and rep.max_commutator <= 1e-8
    assert checked >= 30


def test_corollary_grouping():
    d = 4
    E = np.array([np.diag(np.eye(d)[i]) for i in range(d)])
    F = np.array([np.diag([1.0, 1, 0, 0]), np.diag([0, 0, 1.0, 1])])
    rep = strategies.verify_corollary1(E, F, [0, 0, 1, 1], linalg.maximally_entangled_state(d), 1e-12)
    assert rep.max_residual <= 1e-12
    with pytest.raises(HypothesisViolated):
        strategies.verify_corollary1(E, F, [0, 1, 0, 1], linalg.maximally_entangled_state(d), 1e-9)


def test_group_outcomes_rejects_non_function():
    E = np.array([np.eye(2) / 2, np.eye(2) / 2])
    with pytest.raises(NotAFunction):
        strategies.group_outcomes(E, [0], 2)
    with pytest.raises(NotAFunction):
        strategies.group_outcomes(E, [0, 2], 2)


# -- fixtures ------------------------------------------------------------------


@pytest.mark.parametrize("n", [4, 8])
def test_fourier_vectors_orthonormal_bases(n):
    labels, U = strategies.fourier_vectors(n)
    for u in U:
        np.testing.assert_allclose(u.conj() @ u.T, np.eye(n), atol=1e-12)


def test_fourier_adjacent_vertices_never_agree(h4):
    labels, U = strategies.fourier_vectors(4)
    pos = {v: i for i, v in enumerate(labels)}
    for s, t in h4.edges:
        overlaps = np.abs(U[pos[s]].conj() @ U[pos[t]].T) ** 2
        assert np.max(np.abs(np.diag(overlaps))) <= 1e-12


def test_fourier_bad_n():
    for n in (2, 6, 5):
        with pytest.raises(BadN):
            strategies.fourier_strategy_hadamard(n)


def test_fourier_g4_perfect(g4, fourier4):
    assert strategies.is_perfect(g4, fourier4, 1e-9)
    assert abs(strategies.winning_probability(g4, fourier4) - 1) <= 1e-9


def test_magic_square_perfect(magic):
    St = strategies.magic_square_strategy()
    assert (St.d_a, St.d_b) == (4, 4)
    assert strategies.is_perfect(magic, St, 1e-9)


def test_magic_square_observables():
    obs = strategies.MAGIC_SQUARE_OBSERVABLES
    for c in games.magic_square_constraints():
        x, y, z = (obs[v] for v in c.variables)
        np.testing.assert_allclose(x @ y, y @ x, atol=1e-12)
        np.testing.assert_allclose(x @ y @ z, (-1) ** c.parity * np.eye(4), atol=1e-12)


# -- structure and substitution ------------------------------------------------


def test_block_sum_structure(g4, blocksum4):
    assert strategies.is_perfect(g4, blocksum4, 1e-9)
    sd = blocksum4.schmidt()
    np.testing.assert_allclose(np.sort(sd.coefficients**2 * 4), [0.3] * 4 + [0.7] * 4, atol=1e-12)
    rep = strategies.structure_report(g4, blocksum4, 1e-9)
    assert sorted(len(c) for c in rep.schmidt_classes) == [4, 4]
    assert rep.perfect
    assert rep.max_off_block <= 1e-9
    assert rep.max_projectivity <= 1e-9 and rep.max_commutator <= 1e-9


def test_structure_report_max_entangled(g4, fourier4):
    rep = strategies.structure_report(g4, fourier4, 1e-9)
    assert len(rep.schmidt_classes) == 1
    assert rep.max_off_block == 0


def test_structure_report_perturbed(g4, blocksum4):
    t = g4.T[3]
    St = strategies.perturb_measurement(blocksum4, BOB, t, 0.2, seed=1)
    rep = strategies.structure_report(g4, St, 1e-9)
    assert rep.perfect is False
    assert rep.max_off_block > 1e-3
    assert not strategies.is_perfect(g4, St, 1e-9)


def test_structure_report_not_weakly_projective(rng):
    G = games.make_game((0,), (0,), (0, 1), (0, 1), lambda s, t, a, b: a == 0 or b == 1)
    St = random_strategy(G, rng, 2, 2)
    with pytest.raises(NotWeaklyProjective):
        strategies.structure_report(G, St)


def test_substitute_gives_uniform_state(g4, blocksum4):
    out = strategies.substitute_max_entangled(g4, blocksum4, 1e-9)
    np.testing.assert_allclose(out.schmidt().coefficients, np.full(8, 1 / np.sqrt(8)), atol=1e-12)
    assert strategies.is_perfect(g4, out, 1e-8)
    for t in g4.T:
        for F in out.bob[label_key(t)]:
            assert linalg.projector_residual(F) <= 1e-8
    # measurements are untouched
    assert all(np.array_equal(out.alice[k], blocksum4.alice[k]) for k in out.alice)


def test_substitute_errors(g4, fourier4, rng):
    with pytest.raises(NotWeaklyProjective):
        G = games.make_game((0,), (0,), (0, 1), (0, 1), lambda s, t, a, b: a == 0 or b == 1)
        strategies.substitute_max_entangled(G, random_strategy(G, rng, 2, 2))
    imperfect = strategies.perturb_measurement(fourier4, BOB, g4.T[0], 0.3, seed=0)
    with pytest.raises(NotPerfect):
        strategies.substitute_max_entangled(g4, imperfect)


def test_substitute_rank_deficient():
    # perfect classical strategy embedded with a product state in dimension 2
    G = games.make_coloring_game(games.complete_graph(2), 2)
    P = np.array([np.diag([1.0, 0]), np.diag([0, 1.0])])
    Q = np.array([np.diag([0, 1.0]), np.diag([1.0, 0])])
    ops = {label_key(0): P, label_key(1): Q}
    St = strategies.QuantumStrategy(2, 2, [1, 0, 0, 0], ops, ops)
    assert strategies.is_perfect(G, St)
    with pytest.raises(NotFullSchmidtRank):
        strategies.substitute_max_entangled(G, St)
    out = strategies.substitute_max_entangled(G, St, restrict_support=True)
    assert (out.d_a, out.d_b) == (1, 1)
    assert strategies.is_perfect(G, out)


def test_substitute_property_random_rotations(g4, blocksum4):
    rng = np.random.default_rng(5)
    for _ in range(5):
        St = strategies.apply_local_unitaries(
            blocksum4, strategies.random_unitary(8, rng), strategies.random_unitary(8, rng)
        )
        assert strategies.is_perfect(g4, St, 1e-9)
        out = strategies.substitute_max_entangled(g4, St, 1e-9)
        assert strategies.is_perfect(g4, out, 1e-8)


# -- tilde lifts -----------------------------------------------------------------


@pytest.mark.parametrize("party", [BOB, ALICE])
def test_tilde_lift_and_restrict_g4(g4, fourier4, party):
    Gt = games.tilde_transform(g4, party)
    lifted = strategies.lift_strategy_tilde(g4, fourier4, party)
    assert strategies.is_perfect(Gt, lifted, 1e-9)
    back = strategies.restrict_tilde_strategy(g4, lifted, party)
    assert strategies.is_perfect(g4, back, 1e-9)


def test_tilde_lift_magic_square_then_substitute(magic):
    St = strategies.magic_square_strategy()
    Gt = games.tilde_transform(magic, BOB)
    lifted = strategies.lift_strategy_tilde(magic, St, BOB)
    assert strategies.is_perfect(Gt, lifted, 1e-9)
    out = strategies.substitute_max_entangled(Gt, lifted, 1e-9)
    assert strategies.is_perfect(Gt, out, 1e-9)
    assert strategies.is_perfect(magic, strategies.restrict_tilde_strategy(magic, lifted), 1e-9)


def test_tilde_lift_requires_perfect(g4, fourier4):
    imperfect = strategies.perturb_measurement(fourier4, ALICE, g4.S[0], 0.3, seed=0)
    with pytest.raises(NotPerfect):
        strategies.lift_strategy_tilde(g4, imperfect)


def test_tilde_lift_unsupported(rng):
    G = games.make_game((0,), (0,), (0, 1), (0, 1), lambda s, t, a, b: a == 0 or b == 1)
    with pytest.raises(UnsupportedGameShape):
        strategies.lift_strategy_tilde(G, random_strategy(G, rng, 1, 1))


def test_perturbation_keeps_projectivity(fourier4, g4):
    St = strategies.perturb_measurement(fourier4, BOB, g4.T[0], 0.5, seed=3)
    for F in St.bob[label_key(g4.T[0])]:
        assert linalg.projector_residual(F) <= 1e-12
