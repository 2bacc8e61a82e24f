"""Entangled strategies: evaluation, structure checks and constructions.

A :class:`QuantumStrategy` holds a shared state and one POVM per question
for each player. POVMs are stacked arrays of shape ``(num_answers, d, d)``
ordered like the game's answer labels and stored under
:func:`label_key` of the question label.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    HypothesisViolated,
    InvalidWeight,
    BadN,
    NotAFunction,
    NotFullSchmidtRank,
    NotPerfect,
    NotUnitVector,
    NotWeaklyProjective,
    ShapeMismatch,
    UnsupportedGameShape,
)
from .games import (
    ALICE,
    BOB,
    NonlocalGame,
    _bit_rows,
    check_party,
    magic_square_constraints,
    tilde_transform,
    weak_projection_witness,
)
from .linalg import EPS


def label_key(label) -> str:
    """String key for a question label; non-strings use compact JSON."""
    if isinstance(label, str):
        return label

    def plain(x):
        if isinstance(x, tuple):
            return [plain(y) for y in x]
        if isinstance(x, np.integer):
            return int(x)
        return x

    return json.dumps(plain(label), separators=(",", ":"))


def _povm_stack(ops, d: int) -> np.ndarray:
    arr = np.array(ops, dtype=np.complex128)
    if arr.ndim != 3 or arr.shape[1:] != (d, d):
        raise DimensionMismatch(f"POVM of shape {arr.shape} does not act on dimension {d}")
    return arr


def povm_residuals(ops) -> tuple[float, float]:
    """(completeness ||sum - I||_F, most negative eigenvalue clipped at 0)."""
    ops = np.asarray(ops)
    d = ops.shape[-1]
    completeness = float(np.linalg.norm(ops.sum(axis=0) - np.eye(d)))
    herm = float(np.max(np.linalg.norm(ops - ops.conj().transpose(0, 2, 1), axis=(1, 2)), initial=0.0))
    eigs = np.linalg.eigvalsh((ops + ops.conj().transpose(0, 2, 1)) / 2)
    return completeness + herm, float(max(0.0, -eigs.min(initial=0.0)))


@dataclass(frozen=True, eq=False)
class QuantumStrategy:
    d_a: int
    d_b: int
    psi: np.ndarray
    alice: dict
    bob: dict
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        psi = linalg.as_vector(self.psi).copy()
        if psi.size != self.d_a * self.d_b:
            raise DimensionMismatch(f"state of length {psi.size} is not {self.d_a}x{self.d_b}")
        alice = {k: _povm_stack(v, self.d_a) for k, v in self.alice.items()}
        bob = {k: _povm_stack(v, self.d_b) for k, v in self.bob.items()}
        for arr in (psi, *alice.values(), *bob.values()):
            arr.flags.writeable = False
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)
        if self.check:
            self.validate()

    def validate(self, eps: float = 1e-8) -> None:
        if not linalg.is_unit_vector(self.psi, eps):
            raise NotUnitVector("shared state is not normalized")
        for who, povms in (("alice", self.alice), ("bob", self.bob)):
            for q, ops in povms.items():
                comp, neg = povm_residuals(ops)
                if comp > eps or neg > eps:
                    raise ShapeMismatch(f"{who}'s measurement for {q!r} is not a POVM")

    def __eq__(self, other):
        if not isinstance(other, QuantumStrategy):
            return NotImplemented
        return (
            (self.d_a, self.d_b) == (other.d_a, other.d_b)
            and np.array_equal(self.psi, other.psi)
            and self.alice.keys() == other.alice.keys()
            and self.bob.keys() == other.bob.keys()
            and all(np.array_equal(v, other.alice[k]) for k, v in self.alice.items())
            and all(np.array_equal(v, other.bob[k]) for k, v in self.bob.items())
        )

    @property
    def coefficient_matrix(self) -> np.ndarray:
        return self.psi.reshape(self.d_a, self.d_b)

    def measurement(self, party: str, question) -> np.ndarray:
        table = self.alice if check_party(party) == ALICE else self.bob
        return table[label_key(question)]

    def schmidt(self, eps: float = EPS) -> linalg.SchmidtDecomposition:
        return linalg.schmidt_decompose(self.psi, self.d_a, self.d_b, eps)

    def swap_parties(self) -> "QuantumStrategy":
        psi = self.coefficient_matrix.T.reshape(-1)
        return QuantumStrategy(self.d_b, self.d_a, psi, self.bob, self.alice, check=False)

    def with_state(self, psi) -> "QuantumStrategy":
        return replace(self, psi=psi, check=False)


# -- evaluation ---------------------------------------------------------------


def check_shape(G: NonlocalGame, St: QuantumStrategy) -> None:
    want_a = {label_key(s) for s in G.S}
    want_b = {label_key(t) for t in G.T}
    if set(St.alice) != want_a or set(St.bob) != want_b:
        raise ShapeMismatch("strategy questions do not match the game")
    for k, v in St.alice.items():
        if v.shape[0] != len(G.A):
            raise ShapeMismatch(f"Alice's measurement for {k!r} has {v.shape[0]} outcomes, game has {len(G.A)}")
    for k, v in St.bob.items():
        if v.shape[0] != len(G.B):
            raise ShapeMismatch(f"Bob's measurement for {k!r} has {v.shape[0]} outcomes, game has {len(G.B)}")


def _sandwich(psi_mat: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """D^dagger E D for a stack of Alice operators E."""
    return np.einsum("ji,...jk,kl->...il", psi_mat.conj(), ops, psi_mat, optimize=True)


def pairing_table(E: np.ndarray, F: np.ndarray, psi, d_a: int, d_b: int) -> np.ndarray:
    """Matrix of <psi| E_i (x) F_j |psi> over two stacks of operators."""
    mat = linalg.as_vector(psi).reshape(d_a, d_b)
    M = _sandwich(mat, np.asarray(E)).reshape(len(E), -1)
    return M @ np.asarray(F).reshape(len(F), -1).T


def outcome_table(G: NonlocalGame, St: QuantumStrategy) -> np.ndarray:
    """Joint outcome probabilities ``P[s, t, a, b]`` (complex; imaginary parts ~ 0)."""
    check_shape(G, St)
    E = np.stack([St.alice[label_key(s)] for s in G.S])
    F = np.stack([St.bob[label_key(t)] for t in G.T])
    nS, nA = E.shape[:2]
    nT, nB = F.shape[:2]
    M = _sandwich(St.coefficient_matrix, E).reshape(nS * nA, -1)
    P = M @ F.reshape(nT * nB, -1).T
    return P.reshape(nS, nA, nT, nB).transpose(0, 2, 1, 3)


def winning_probability(G: NonlocalGame, St: QuantumStrategy) -> float:
    """sum_{s,t} pi(s,t) sum_{V=1} <psi|E^s_a (x) F^t_b|psi>, unclipped."""
    P = outcome_table(G, St).real
    return float(np.sum(G.pi[:, :, None, None] * G.V * P))


@dataclass
class PerfectionCheck:
    perfect: bool
    eps: float
    violations: list  # (s, t, a, b, probability), largest first
    total_loss: float
    winning_probability: float

    def __bool__(self):
        return self.perfect

    @property
    def max_violation(self) -> float:
        return self.violations[0][-1] if self.violations else 0.0


def is_perfect(G: NonlocalGame, St: QuantumStrategy, eps: float = EPS) -> PerfectionCheck:
    """Every rejected answer pair on a supported question pair has probability <= eps."""
    P = outcome_table(G, St).real
    reject = (~G.V) & (G.pi > 0)[:, :, None, None]
    bad = np.argwhere(reject & (P > eps))
    violations = sorted(
        ((G.S[i], G.T[j], G.A[k], G.B[m], float(P[i, j, k, m])) for i, j, k, m in bad),
        key=lambda r: -r[-1],
    )
    loss = float(np.sum(G.pi[:, :, None, None] * reject * P))
    win = float(np.sum(G.pi[:, :, None, None] * G.V * P))
    return PerfectionCheck(not violations, eps, violations, loss, win)


# -- structure of perfectly correlated measurements ---------------------------


@dataclass
class StructureReport:
    """Residuals of projectivity, commutation with the state root, and block structure.

    Each row describes one operator: ``party``, ``question`` (None for bare
    measurement pairs), ``outcome``, ``projectivity`` = ||X^2 - X||_F,
    ``commutator`` = ||[D, X]||_F with D the party's reduced-state root, and
    ``off_block`` = Frobenius mass of X, written in the Schmidt basis, between
    distinct Schmidt-coefficient classes.
    """

    schmidt_coefficients: list
    schmidt_classes: list
    rows: list = field(default_factory=list)
    perfect: bool | None = None

    def _max(self, key: str) -> float:
        return max((r[key] for r in self.rows), default=0.0)

    @property
    def max_projectivity(self) -> float:
        return self._max("projectivity")

    @property
    def max_commutator(self) -> float:
        return self._max("commutator")

    @property
    def max_off_block(self) -> float:
        return self._max("off_block")

    @property
    def max_residual(self) -> float:
        return max(self.max_projectivity, self.max_commutator, self.max_off_block)

    def to_dict(self) -> dict:
        return {
            "schmidt_coefficients": [float(x) for x in self.schmidt_coefficients],
            "schmidt_classes": self.schmidt_classes,
            "perfect": self.perfect,
            "max_projectivity": self.max_projectivity,
            "max_commutator": self.max_commutator,
            "max_off_block": self.max_off_block,
            "rows": self.rows,
        }


class _Frame:
    """Schmidt data of a full-rank state used to measure operator structure."""

    def __init__(self, psi, d_a: int, d_b: int, eps: float):
        sd = linalg.schmidt_decompose(psi, d_a, d_b, eps)
        if not sd.full_schmidt_rank:
            raise NotFullSchmidtRank(f"Schmidt rank {sd.rank} with local dimensions {d_a}, {d_b}")
        self.sd = sd
        self.classes = sd.classes(eps)
        label = np.empty(d_a, dtype=int)
        for c, idx in enumerate(self.classes):
            label[idx] = c
        self.off_mask = label[:, None] != label[None, :]
        rho_a, rho_b = linalg.reduced_states(psi, d_a, d_b)
        self.root = {ALICE: linalg.psd_sqrt(rho_a), BOB: linalg.psd_sqrt(rho_b)}
        self.basis = {ALICE: sd.left_basis, BOB: sd.right_basis}

    def row(self, party: str, question, outcome, op: np.ndarray) -> dict:
        basis = self.basis[party]
        local = basis.conj().T @ op @ basis
        return {
            "party": party,
            "question": question,
            "outcome": outcome,
            "projectivity": linalg.projector_residual(op),
            "commutator": linalg.commutator_norm(self.root[party], op),
            "off_block": float(np.linalg.norm(local[self.off_mask])),
        }

    def report(self) -> StructureReport:
        return StructureReport(
            schmidt_coefficients=list(self.sd.coefficients),
            schmidt_classes=self.classes,
        )


def verify_lemma2(E, F, psi, eps: float = EPS) -> StructureReport:
    """Measure projectivity and commutation for two equally sized measurements.

    Hypothesis: ``|<psi|E_i (x) F_j|psi>| <= eps`` for all i != j, on a state of
    full Schmidt rank. Under it, every E_i and F_i must be a projector that
    commutes with the reduced-state root; the report measures how far each
    operator is from that, and the caller decides what is small enough.
    """
    E = np.asarray(E, dtype=np.complex128)
    F = np.asarray(F, dtype=np.complex128)
    if len(E) != len(F):
        raise DimensionMismatch("both measurements need the same number of outcomes")
    d_a, d_b = E.shape[-1], F.shape[-1]
    frame = _Frame(psi, d_a, d_b, eps)
    table = pairing_table(E, F, psi, d_a, d_b)
    off = np.abs(table[~np.eye(len(E), dtype=bool)])
    if off.size and off.max() > eps:
        raise HypothesisViolated(f"cross-outcome probability {off.max():.3g} exceeds {eps:g}")
    rep = frame.report()
    rep.rows += [frame.row(ALICE, None, i, op) for i, op in enumerate(E)]
    rep.rows += [frame.row(BOB, None, i, op) for i, op in enumerate(F)]
    return rep


def group_outcomes(E, f, m: int) -> np.ndarray:
    """E'_j = sum over i with f(i) = j of E_i."""
    E = np.asarray(E, dtype=np.complex128)
    if len(f) != len(E) or any(not (0 <= int(j) < m) for j in f):
        raise NotAFunction(f"f must map each of the {len(E)} outcomes into range({m})")
    out = np.zeros((m,) + E.shape[1:], dtype=np.complex128)
    for i, j in enumerate(f):
        out[int(j)] += E[i]
    return out


def verify_corollary1(E, F, f, psi, eps: float = EPS) -> StructureReport:
    """Coarse-grain ``E`` along ``f`` and run :func:`verify_lemma2` on the result.

    Hypothesis: ``|<psi|E_i (x) F_j|psi>| <= eps`` whenever j != f(i).
    """
    E = np.asarray(E, dtype=np.complex128)
    F = np.asarray(F, dtype=np.complex128)
    f = [int(j) for j in f]
    grouped = group_outcomes(E, f, len(F))
    table = pairing_table(E, F, psi, E.shape[-1], F.shape[-1])
    mask = np.ones(table.shape, dtype=bool)
    mask[np.arange(len(E)), f] = False
    if mask.any() and np.abs(table[mask]).max() > eps:
        raise HypothesisViolated(f"probability {np.abs(table[mask]).max():.3g} off the graph of f")
    fan_in = max(np.bincount(f, minlength=len(F)).max(), 1)
    return verify_lemma2(grouped, F, psi, eps * fan_in)


def _index_map(G: NonlocalGame, f: dict) -> list[int]:
    pos = {b: j for j, b in enumerate(G.B)}
    return [pos[f[a]] for a in G.A]


def _projective_witness(G: NonlocalGame):
    for party in (BOB, ALICE):
        w = weak_projection_witness(G, party, strict=True)
        if w is not None:
            return w
    return None


def structure_report(G: NonlocalGame, St: QuantumStrategy, eps: float = EPS) -> StructureReport:
    """Block structure of a strategy for a weak projection game.

    For each question t of the projective party this measures the operators
    F^t_b and the coarse-grained partner operators E'_j built from the
    witness question s(t). For a perfect strategy every residual vanishes.
    The strategy need not be perfect; ``perfect`` records whether it is.
    """
    check_shape(G, St)
    w = _projective_witness(G)
    if w is None:
        raise NotWeaklyProjective("no weak-projection witness on the support of pi")
    perfect = is_perfect(G, St, eps).perfect
    game, strat = (G, St) if w.party == BOB else (G.swap_parties(), St.swap_parties())
    frame = _Frame(strat.psi, strat.d_a, strat.d_b, eps)
    partner = ALICE if w.party == BOB else BOB
    rep = frame.report()
    rep.perfect = perfect
    for t, (s, f) in w.assignment.items():
        F = strat.bob[label_key(t)]
        grouped = group_outcomes(strat.alice[label_key(s)], _index_map(game, f), len(game.B))
        for j, b in enumerate(game.B):
            rep.rows.append(frame.row(BOB, t, b, F[j]) | {"party": w.party})
            rep.rows.append(frame.row(ALICE, s, b, grouped[j]) | {"party": partner})
    return rep


# -- state substitution and direct sums ----------------------------------------


def restrict_to_schmidt_support(St: QuantumStrategy, eps: float = EPS) -> QuantumStrategy:
    """Compress both local spaces onto the Schmidt support of the state."""
    sd = St.schmidt(eps)
    r = sd.rank
    L, R = sd.left_basis[:, :r], sd.right_basis[:, :r]
    psi = np.diag(sd.coefficients[:r]).astype(np.complex128).reshape(-1)
    alice = {k: L.conj().T @ v @ L for k, v in St.alice.items()}
    bob = {k: R.conj().T @ v @ R for k, v in St.bob.items()}
    return QuantumStrategy(r, r, psi, alice, bob)


def substitute_max_entangled(
    G: NonlocalGame, St: QuantumStrategy, eps: float = EPS, restrict_support: bool = False
) -> QuantumStrategy:
    """Swap the shared state for the uniform superposition of its Schmidt basis.

    Requires a weak projection game (witness questions asked with positive
    probability), a perfect strategy and a state of full Schmidt rank; the
    measurements are kept as they are.
    """
    check_shape(G, St)
    if _projective_witness(G) is None:
        raise NotWeaklyProjective("game is not weakly projective on the support of pi")
    chk = is_perfect(G, St, eps)
    if not chk:
        raise NotPerfect(f"strategy loses with probability {chk.total_loss:.3g}")
    if restrict_support:
        St = restrict_to_schmidt_support(St, eps)
    sd = St.schmidt(eps)
    if not sd.full_schmidt_rank:
        raise NotFullSchmidtRank(f"Schmidt rank {sd.rank} with local dimensions {St.d_a}, {St.d_b}")
    return St.with_state(sd.uniform_state())


def _block_diag(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n, m = x.shape[-1], y.shape[-1]
    out = np.zeros(x.shape[:-2] + (x.shape[-2] + y.shape[-2], n + m), dtype=np.complex128)
    out[..., : x.shape[-2], :n] = x
    out[..., x.shape[-2] :, n:] = y
    return out


def block_direct_sum_strategy(St: QuantumStrategy, p: float) -> QuantumStrategy:
    """Two weighted copies of a strategy: sqrt(p) psi (+) sqrt(1-p) psi, E (+) E."""
    if not 0 < p < 1:
        raise InvalidWeight(f"weight must lie strictly between 0 and 1, got {p}")
    D = St.coefficient_matrix
    psi = _block_diag(np.sqrt(p) * D, np.sqrt(1 - p) * D).reshape(-1)
    alice = {k: _block_diag(v, v) for k, v in St.alice.items()}
    bob = {k: _block_diag(v, v) for k, v in St.bob.items()}
    return QuantumStrategy(2 * St.d_a, 2 * St.d_b, psi, alice, bob)


def apply_local_unitaries(St: QuantumStrategy, u_a, u_b) -> QuantumStrategy:
    """Rotate the state by U_A (x) U_B and conjugate every measurement to match."""
    u_a, u_b = np.asarray(u_a), np.asarray(u_b)
    psi = (u_a @ St.coefficient_matrix @ u_b.T).reshape(-1)
    alice = {k: u_a @ v @ u_a.conj().T for k, v in St.alice.items()}
    bob = {k: u_b @ v @ u_b.conj().T for k, v in St.bob.items()}
    return QuantumStrategy(St.d_a, St.d_b, psi, alice, bob)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def perturb_measurement(
    St: QuantumStrategy, party: str, question, strength: float, seed: int = 0
) -> QuantumStrategy:
    """Conjugate one POVM by exp(i * strength * H) for a random unit-Frobenius Hermitian H.

    The result is still a valid POVM, and still projective if it was.
    """
    rng = np.random.default_rng(seed)
    party = check_party(party)
    d = St.d_a if party == ALICE else St.d_b
    h = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (h + h.conj().T) / 2
    h /= np.linalg.norm(h)
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(1j * strength * w)) @ v.conj().T
    key = label_key(question)
    table = dict(St.alice if party == ALICE else St.bob)
    table[key] = u @ table[key] @ u.conj().T
    if party == ALICE:
        return QuantumStrategy(St.d_a, St.d_b, St.psi, table, St.bob)
    return QuantumStrategy(St.d_a, St.d_b, St.psi, St.alice, table)


# -- consistency-check lifts --------------------------------------------------


def lift_strategy_tilde(G: NonlocalGame, St: QuantumStrategy, party: str = BOB, eps: float = EPS) -> QuantumStrategy:
    """Extend a perfect strategy for ``G`` to ``tilde_transform(G, party)``.

    On a consistency question for t the partner measures the witness
    question s(t) and reports f(a), the answer the projective party is
    forced to give. Homomorphism games use s(t) = t with f the identity;
    constraint system games use the first constraint containing the
    variable and read off its value.
    """
    party = check_party(party)
    if party == ALICE:
        return lift_strategy_tilde(G.swap_parties(), St.swap_parties(), BOB, eps).swap_parties()
    check_shape(G, St)
    w = weak_projection_witness(G, BOB, strict=True)
    if w is None:
        raise UnsupportedGameShape("no partner question forces Bob's answer for every t")
    chk = is_perfect(G, St, eps)
    if not chk:
        raise NotPerfect(f"strategy loses with probability {chk.total_loss:.3g}")
    nA, nB = len(G.A), len(G.B)
    alice = {}
    for s in G.S:
        E = np.zeros((nA + nB, St.d_a, St.d_a), dtype=np.complex128)
        E[:nA] = St.alice[label_key(s)]
        alice[label_key((s, 0))] = E
    for t, (s, f) in w.assignment.items():
        E = np.zeros((nA + nB, St.d_a, St.d_a), dtype=np.complex128)
        E[nA:] = group_outcomes(St.alice[label_key(s)], _index_map(G, f), nB)
        alice[label_key((t, 1))] = E
    return QuantumStrategy(St.d_a, St.d_b, St.psi, alice, St.bob)


def restrict_tilde_strategy(G: NonlocalGame, St: QuantumStrategy, party: str = BOB) -> QuantumStrategy:
    """Drop the consistency questions of a strategy for the tilde game of ``G``.

    Outcomes that are not original answers are folded into the first answer;
    a perfect tilde strategy never produces them on a supported question.
    """
    party = check_party(party)
    if party == ALICE:
        return restrict_tilde_strategy(G.swap_parties(), St.swap_parties(), BOB).swap_parties()
    nA = len(G.A)
    alice = {}
    for s in G.S:
        E = St.alice[label_key((s, 0))]
        out = E[:nA].copy()
        out[0] += E[nA:].sum(axis=0)
        alice[label_key(s)] = out
    return QuantumStrategy(St.d_a, St.d_b, St.psi, alice, St.bob)


# -- fixtures -----------------------------------------------------------------


def embed_classical_strategy(G: NonlocalGame, alice: dict, bob: dict) -> QuantumStrategy:
    """A deterministic strategy as one-dimensional 0/1 POVMs on the state [1]."""
    a_pos = {a: i for i, a in enumerate(G.A)}
    b_pos = {b: i for i, b in enumerate(G.B)}
    E = {}
    for s in G.S:
        ops = np.zeros((len(G.A), 1, 1))
        ops[a_pos[alice[s]]] = 1.0
        E[label_key(s)] = ops
    F = {}
    for t in G.T:
        ops = np.zeros((len(G.B), 1, 1))
        ops[b_pos[bob[t]]] = 1.0
        F[label_key(t)] = ops
    return QuantumStrategy(1, 1, [1.0], E, F)


def _basis_projectors(vectors: np.ndarray) -> np.ndarray:
    """Rank-one projectors onto the rows of ``vectors`` (last axis = components)."""
    return np.einsum("...i,...j->...ij", vectors, vectors.conj())


def chsh_strategy() -> QuantumStrategy:
    """Optimal CHSH strategy on one ebit; wins with probability cos^2(pi/8)."""

    def basis(theta):
        return np.array([[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]])

    alice = {label_key(s): _basis_projectors(basis(th)) for s, th in ((0, 0.0), (1, np.pi / 4))}
    bob = {label_key(t): _basis_projectors(basis(th)) for t, th in ((0, np.pi / 8), (1, -np.pi / 8))}
    return QuantumStrategy(2, 2, linalg.maximally_entangled_state(2), alice, bob)


def fourier_vectors(n: int) -> tuple[list[str], np.ndarray]:
    """Vertex labels of H_n and vectors u[s, a, i] = (-1)^{s_i} w^{a i} / sqrt(n)."""
    bits = _bit_rows(n)
    labels = ["".join(map(str, row)) for row in bits]
    i = np.arange(n)
    omega = np.exp(2j * np.pi * np.outer(i, i) / n)  # [a, i]
    signs = (-1.0) ** bits  # [s, i]
    return labels, signs[:, None, :] * omega[None, :, :] / np.sqrt(n)


def fourier_strategy_hadamard(n: int) -> QuantumStrategy:
    """Perfect strategy for n-coloring H_n on |Psi_n>, for 4 | n.

    Alice projects onto u_{s,a}; Bob uses the entrywise conjugate projectors.
    """
    if n < 4 or n % 4:
        raise BadN(f"need n divisible by 4, got {n}")
    labels, u = fourier_vectors(n)
    P = _basis_projectors(u)
    alice = dict(zip(labels, P))
    bob = dict(zip(labels, P.conj()))
    return QuantumStrategy(n, n, linalg.maximally_entangled_state(n), alice, bob)


_I2 = np.eye(2)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0]).astype(np.complex128)

MAGIC_SQUARE_OBSERVABLES = {
    "x0": np.kron(_X, _I2),
    "x1": np.kron(_I2, _X),
    "x2": np.kron(_X, _X),
    "x3": np.kron(_I2, _Z),
    "x4": np.kron(_Z, _I2),
    "x5": np.kron(_Z, _Z),
    "x6": -np.kron(_X, _Z),
    "x7": -np.kron(_Z, _X),
    "x8": np.kron(_Y, _Y),
}


def magic_square_strategy() -> QuantumStrategy:
    """Two-ebit strategy for the magic square constraint game.

    Bit value 0 stands for observable eigenvalue +1. Every row of
    observables multiplies to +I and every column to -I, matching the
    row parity 0 and column parity 1 constraints.
    """
    eye = np.eye(4)

    def eigenprojector(obs, bit):
        return (eye + (-1) ** int(bit) * obs) / 2

    answers = ["".join(b) for b in itertools.product("01", repeat=3)]
    alice = {}
    for i, c in enumerate(magic_square_constraints()):
        ops = []
        for a in answers:
            P = eye.astype(np.complex128)
            for x, bit in zip(c.variables, a):
                P = P @ eigenprojector(MAGIC_SQUARE_OBSERVABLES[x], bit)
            ops.append(P)
        alice[f"c{i}"] = np.array(ops)
    bob = {x: np.array([eigenprojector(o, b).conj() for b in "01"]) for x, o in MAGIC_SQUARE_OBSERVABLES.items()}
    return QuantumStrategy(4, 4, linalg.maximally_entangled_state(4), alice, bob)
