"""Two-party one-round nonlocal games.

A game is stored as dense tables: ``V[s, t, a, b]`` (bool, True = accept)
and ``pi[s, t]`` (question distribution), indexed by the positions of the
labels in ``S``, ``T``, ``A`` and ``B``. Labels are arbitrary hashable JSON
values (strings, ints, or tuples of these).

Answers are one global label set per party. Games whose valid answers
depend on the question (binary constraint system games) mark the invalid
ones by rejecting them everywhere; such answers are called *dead* for that
question and are ignored by the weak-projection check and the classical
search.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Sequence

import numpy as np

from .errors import BudgetExceeded, EmptyConstraintSystem, NonlocalGameError, OddN

ALICE = "alice"
BOB = "bob"

DEFAULT_BUDGET = 10**8
_CHUNK = 1 << 16


def check_party(party: str) -> str:
    p = party.lower()
    if p not in (ALICE, BOB):
        raise NonlocalGameError(f"party must be 'alice' or 'bob', not {party!r}")
    return p


# -- graphs -------------------------------------------------------------------


class Graph:
    """Simple undirected graph backed by a boolean adjacency matrix."""

    def __init__(self, vertices: Sequence[Hashable], edges=(), adjacency=None):
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise NonlocalGameError("duplicate vertex labels")
        n = len(self.vertices)
        if adjacency is None:
            adjacency = np.zeros((n, n), dtype=bool)
            for u, v in edges:
                if u not in self.index or v not in self.index:
                    raise NonlocalGameError(f"edge {(u, v)} has an unknown endpoint")
                if u == v:
                    raise NonlocalGameError(f"loop at vertex {u!r}")
                i, j = self.index[u], self.index[v]
                adjacency[i, j] = adjacency[j, i] = True
        else:
            adjacency = np.array(adjacency, dtype=bool)
            if adjacency.shape != (n, n) or np.any(adjacency != adjacency.T):
                raise NonlocalGameError("adjacency must be a symmetric n x n matrix")
            if np.any(np.diag(adjacency)):
                raise NonlocalGameError("graph has a loop")
        adjacency.flags.writeable = False
        self.adjacency = adjacency

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.vertices == other.vertices
            and np.array_equal(self.adjacency, other.adjacency)
        )

    def __repr__(self):
        return f"Graph({len(self.vertices)} vertices, {self.num_edges} edges)"

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency)))

    @property
    def edges(self) -> list[tuple]:
        i, j = np.nonzero(np.triu(self.adjacency))
        return [(self.vertices[a], self.vertices[b]) for a, b in zip(i, j)]

    def adjacent(self, u, v) -> bool:
        return bool(self.adjacency[self.index[u], self.index[v]])

    def neighbors(self, v) -> list:
        return [self.vertices[j] for j in np.flatnonzero(self.adjacency[self.index[v]])]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def components(self) -> list[list]:
        seen = np.zeros(len(self), dtype=bool)
        comps = []
        for start in range(len(self)):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                i = stack.pop()
                comp.append(i)
                for j in np.flatnonzero(self.adjacency[i] & ~seen):
                    seen[j] = True
                    stack.append(j)
            comps.append([self.vertices[i] for i in sorted(comp)])
        return comps


def complete_graph(n: int) -> Graph:
    adj = ~np.eye(n, dtype=bool)
    return Graph(range(n), adjacency=adj)


def cycle_graph(n: int) -> Graph:
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def _bit_rows(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)


def hadamard_graph(n: int) -> Graph:
    """H_n: n-bit strings, adjacent iff their Hamming distance is n/2."""
    if n < 1:
        raise OddN("n must be a positive even integer")
    if n % 2:
        raise OddN(f"H_{n} has no edges for odd n")
    bits = _bit_rows(n).astype(np.int16)
    dist = bits @ (1 - bits).T + (1 - bits) @ bits.T
    labels = ["".join(map(str, row)) for row in bits]
    return Graph(labels, adjacency=dist == n // 2)


# -- games --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NonlocalGame:
    S: tuple
    T: tuple
    A: tuple
    B: tuple
    V: np.ndarray
    pi: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for attr in ("S", "T", "A", "B"):
            labels = tuple(getattr(self, attr))
            if not labels:
                raise NonlocalGameError(f"{attr} must be nonempty")
            if len(set(labels)) != len(labels):
                raise NonlocalGameError(f"duplicate labels in {attr}")
            object.__setattr__(self, attr, labels)
        shape = (len(self.S), len(self.T), len(self.A), len(self.B))
        V = np.array(self.V, dtype=bool)
        pi = np.array(self.pi, dtype=float)
        if V.shape != shape:
            raise NonlocalGameError(f"V has shape {V.shape}, expected {shape}")
        if pi.shape != shape[:2]:
            raise NonlocalGameError(f"pi has shape {pi.shape}, expected {shape[:2]}")
        if np.any(pi < 0) or abs(pi.sum() - 1.0) > 1e-9:
            raise NonlocalGameError("pi must be a probability distribution")
        V.flags.writeable = False
        pi.flags.writeable = False
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "pi", pi)

    def __eq__(self, other):
        return (
            isinstance(other, NonlocalGame)
            and (self.S, self.T, self.A, self.B) == (other.S, other.T, other.A, other.B)
            and np.array_equal(self.V, other.V)
            and np.array_equal(self.pi, other.pi)
        )

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.V.shape

    @cached_property
    def _s_pos(self) -> dict:
        return {s: i for i, s in enumerate(self.S)}

    @cached_property
    def _t_pos(self) -> dict:
        return {t: i for i, t in enumerate(self.T)}

    def s_index(self, s) -> int:
        return self._s_pos[s]

    def t_index(self, t) -> int:
        return self._t_pos[t]

    def support(self) -> list[tuple[int, int]]:
        return [tuple(x) for x in np.argwhere(self.pi > 0)]

    def swap_parties(self) -> "NonlocalGame":
        """The same game with the roles of Alice and Bob exchanged."""
        return NonlocalGame(
            self.T,
            self.S,
            self.B,
            self.A,
            self.V.transpose(1, 0, 3, 2),
            self.pi.T,
            name=self.name,
        )

    def live_answers(self, use_support: bool = False) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Per-question boolean masks of answers that are accepted somewhere.

        With ``use_support`` only question pairs of positive probability count.
        """
        V = self.V
        if use_support:
            V = V & (self.pi > 0)[:, :, None, None]
        alice = V.any(axis=(1, 3))
        bob = V.any(axis=(0, 2))
        return list(alice), list(bob)

    def classical_payoff(self, alice: np.ndarray, bob: np.ndarray) -> float:
        """Winning probability of the deterministic strategy given by answer indices."""
        si, ti = np.meshgrid(np.arange(len(self.S)), np.arange(len(self.T)), indexing="ij")
        win = self.V[si, ti, np.asarray(alice)[si], np.asarray(bob)[ti]]
        return float(np.sum(self.pi * win))


def make_game(S, T, A, B, predicate, pi=None, name="") -> NonlocalGame:
    """Build a game from ``predicate(s, t, a, b) -> bool``; ``pi`` defaults to uniform."""
    S, T, A, B = tuple(S), tuple(T), tuple(A), tuple(B)
    V = np.zeros((len(S), len(T), len(A), len(B)), dtype=bool)
    for (i, s), (j, t), (k, a), (m, b) in itertools.product(
        enumerate(S), enumerate(T), enumerate(A), enumerate(B)
    ):
        V[i, j, k, m] = bool(predicate(s, t, a, b))
    if pi is None:
        pi = np.full((len(S), len(T)), 1.0 / (len(S) * len(T)))
    return NonlocalGame(S, T, A, B, V, pi, name=name)


def make_chsh_game() -> NonlocalGame:
    return make_game((0, 1), (0, 1), (0, 1), (0, 1), lambda s, t, a, b: (a ^ b) == (s & t), name="chsh")


def make_trivial_game(n_questions: int = 2, n_answers: int = 2) -> NonlocalGame:
    """Every answer pair wins."""
    r = range(n_questions)
    c = range(n_answers)
    return make_game(r, r, c, c, lambda *_: True, name="trivial")


def _promise_pi(adjacency: np.ndarray) -> np.ndarray:
    mask = adjacency | np.eye(len(adjacency), dtype=bool)
    return mask / mask.sum()


def make_homomorphism_game(X: Graph, Y: Graph, name: str = "") -> NonlocalGame:
    """X -> Y homomorphism game: equal questions need equal answers, edges need edges."""
    nx_, ny = len(X), len(Y)
    eq_q = np.eye(nx_, dtype=bool)[:, :, None, None]
    adj_q = X.adjacency[:, :, None, None]
    eq_a = np.eye(ny, dtype=bool)[None, None]
    adj_a = Y.adjacency[None, None]
    V = (~eq_q | eq_a) & (~adj_q | adj_a)
    V = np.broadcast_to(V, (nx_, nx_, ny, ny))
    return NonlocalGame(X.vertices, X.vertices, Y.vertices, Y.vertices, V, _promise_pi(X.adjacency), name=name)


def make_coloring_game(X: Graph, c: int) -> NonlocalGame:
    if c < 1:
        raise NonlocalGameError("number of colors must be positive")
    return make_homomorphism_game(X, complete_graph(c), name=f"{c}-coloring")


@dataclass(frozen=True)
class ParityConstraint:
    """sum of ``variables`` = ``parity`` (mod 2)."""

    variables: tuple
    parity: int


def magic_square_constraints() -> list[ParityConstraint]:
    """Variables x0..x8 in a 3x3 grid; rows sum to 0, columns to 1 (mod 2)."""
    grid = [[f"x{3 * r + c}" for c in range(3)] for r in range(3)]
    rows = [ParityConstraint(tuple(grid[r]), 0) for r in range(3)]
    cols = [ParityConstraint(tuple(grid[r][c] for r in range(3)), 1) for c in range(3)]
    return rows + cols


def make_bcs_game(constraints: Sequence, variables: Sequence | None = None) -> NonlocalGame:
    """Binary constraint system game over parity constraints.

    Alice's answer to constraint ``c`` is a bit string holding one value per
    variable of ``c`` in order; strings of the wrong length are dead answers.
    """
    cons = [c if isinstance(c, ParityConstraint) else ParityConstraint(tuple(c[0]), int(c[1])) for c in constraints]
    if not cons or any(not c.variables for c in cons):
        raise EmptyConstraintSystem("need at least one constraint, each on at least one variable")
    seen: list = []
    for c in cons:
        for x in c.variables:
            if x not in seen:
                seen.append(x)
    if variables is None:
        variables = seen
    variables = tuple(variables)
    unused = [x for x in variables if x not in seen]
    if unused:
        raise EmptyConstraintSystem(f"variables {unused} occur in no constraint")
    lengths = sorted({len(c.variables) for c in cons})
    A = tuple("".join(bits) for k in lengths for bits in itertools.product("01", repeat=k))
    B = ("0", "1")
    S = tuple(f"c{i}" for i in range(len(cons)))

    pi = np.zeros((len(S), len(variables)))
    V = np.zeros((len(S), len(variables), len(A), 2), dtype=bool)
    for i, c in enumerate(cons):
        for j, x in enumerate(variables):
            if x not in c.variables:
                continue
            pi[i, j] = 1.0
            pos = c.variables.index(x)
            for k, a in enumerate(A):
                if len(a) == len(c.variables) and sum(map(int, a)) % 2 == c.parity % 2:
                    V[i, j, k, int(a[pos])] = True
    pi /= pi.sum()
    return NonlocalGame(S, variables, A, B, V, pi, name="bcs")


def make_magic_square_game() -> NonlocalGame:
    return make_bcs_game(magic_square_constraints())


# -- classical value ----------------------------------------------------------


@dataclass
class ClassicalResult:
    value: float
    alice: dict
    bob: dict
    evaluated: int


def _search_chunk(W, choices, start, stop):
    """Best response of the second party for strategies ``start..stop`` of the first.

    Strategy ``k`` is decoded mixed-radix from ``choices`` (most significant
    digit first), so enumeration order is lexicographic.
    """
    S = W.shape[0]
    k = np.arange(start, stop, dtype=np.int64)
    radices = [len(c) for c in choices]
    digits = np.empty((len(k), S), dtype=np.int64)
    rem = k.copy()
    for s in range(S - 1, -1, -1):
        digits[:, s] = choices[s][rem % radices[s]]
        rem //= radices[s]
    acc = np.zeros((len(k), W.shape[1], W.shape[3]))
    for s in range(S):
        acc += W[s][:, digits[:, s], :].transpose(1, 0, 2)
    vals = acc.max(axis=2).sum(axis=1)
    best = int(np.argmax(vals))
    return float(vals[best]), digits[best], acc[best].argmax(axis=1)


def classical_value(G: NonlocalGame, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> ClassicalResult:
    """Exact best deterministic winning probability by exhaustive search.

    Answers that never win on a supported question pair are dropped first
    (replacing them cannot lower the payoff). The search then enumerates
    the party with fewer remaining strategies and lets the other party
    best-respond question by question, which is exact over all pairs.
    Ties resolve to the lexicographically first strategy.
    """
    live_a, live_b = G.live_answers(use_support=True)
    ch_a = [np.flatnonzero(m) if m.any() else np.array([0]) for m in live_a]
    ch_b = [np.flatnonzero(m) if m.any() else np.array([0]) for m in live_b]
    n_a = math.prod(len(c) for c in ch_a)
    n_b = math.prod(len(c) for c in ch_b)
    if n_a * n_b > budget:
        raise BudgetExceeded(f"{n_a} x {n_b} deterministic strategy pairs exceed budget {budget}")

    W = G.pi[:, :, None, None] * G.V
    swapped = n_b < n_a
    if swapped:
        W = W.transpose(1, 0, 3, 2)
        choices, total = ch_b, n_b
    else:
        choices, total = ch_a, n_a

    bounds = [(i, min(i + _CHUNK, total)) for i in range(0, total, _CHUNK)]
    if jobs > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_search_chunk, *zip(*[(W, choices, a, b) for a, b in bounds])))
    else:
        results = [_search_chunk(W, choices, a, b) for a, b in bounds]
    # first chunk wins ties, matching the serial order
    best = max(range(len(results)), key=lambda i: (results[i][0], -i))
    value, first, second = results[best]
    if swapped:
        first, second = second, first
    return ClassicalResult(
        value=value,
        alice={s: G.A[int(a)] for s, a in zip(G.S, first)},
        bob={t: G.B[int(b)] for t, b in zip(G.T, second)},
        evaluated=total,
    )


# -- weak projection ----------------------------------------------------------


@dataclass
class WeakProjectionWitness:
    """For each question t of the projective party, a partner question and map.

    ``assignment[t] = (s, f)`` where ``f`` maps every partner answer to the
    unique accepted answer of the projective party. Partner answers that are
    dead for ``s`` map to the first answer label.
    """

    party: str
    assignment: dict


def _function_on(G: NonlocalGame, i: int, j: int, live: np.ndarray) -> dict | None:
    block = G.V[i, j]
    f = {}
    for k in range(len(G.A)):
        if not live[k]:
            f[G.A[k]] = G.B[0]
            continue
        hits = np.flatnonzero(block[k])
        if len(hits) != 1:
            return None
        f[G.A[k]] = G.B[hits[0]]
    return f


def _bob_witness(G: NonlocalGame, strict: bool) -> WeakProjectionWitness | None:
    live_a, _ = G.live_answers(use_support=False)
    assignment = {}
    for j, t in enumerate(G.T):
        order = [s for s in (t, (t, 1)) if s in G._s_pos] + list(G.S)
        for s in order:
            i = G.s_index(s)
            if strict and G.pi[i, j] <= 0:
                continue
            f = _function_on(G, i, j, live_a[i])
            if f is not None:
                assignment[t] = (s, f)
                break
        else:
            return None
    return WeakProjectionWitness(BOB, assignment)


def weak_projection_witness(G: NonlocalGame, party: str = BOB, strict: bool = False):
    """Witness that ``G`` is weakly projective for ``party``, or None."""
    if check_party(party) == BOB:
        return _bob_witness(G, strict)
    w = _bob_witness(G.swap_parties(), strict)
    return None if w is None else WeakProjectionWitness(ALICE, w.assignment)


def detect_weak_projection(G: NonlocalGame, strict: bool = False) -> list[WeakProjectionWitness]:
    """Witnesses for Bob and/or Alice.

    By default the question distribution is ignored; ``strict`` only allows
    partner questions asked with positive probability.
    """
    out = []
    for party in (BOB, ALICE):
        w = weak_projection_witness(G, party, strict)
        if w is not None:
            out.append(w)
    return out


def is_projection_game(G: NonlocalGame) -> bool:
    """Every question pair forces Bob's answer as a function of Alice's."""
    live_a, _ = G.live_answers(use_support=False)
    return all(
        _function_on(G, i, j, live_a[i]) is not None for i in range(len(G.S)) for j in range(len(G.T))
    )


def projection_map(G: NonlocalGame, s, t) -> dict | None:
    i, j = G.s_index(s), G.t_index(t)
    live_a, _ = G.live_answers(use_support=False)
    return _function_on(G, i, j, live_a[i])


# -- consistency-check transform ----------------------------------------------


def tilde_transform(G: NonlocalGame, party: str = BOB) -> NonlocalGame:
    """Add consistency-check questions for ``party``'s partner.

    For ``party='bob'`` Alice's questions become ``(s, 0)`` for s in S and
    ``(t, 1)`` for t in T; her answers become ``(a, 0)`` for a in A and
    ``(b, 1)`` for b in B. On ``(s, 0)`` the original predicate applies to
    ``(a, 0)`` answers; on ``(t', 1)`` Alice wins iff she answers ``(b, 1)``
    with b equal to Bob's answer. The distribution asks an original pair
    ``((s, 0), t)`` with probability pi(s, t) / 2 and a check pair
    ``((t, 1), t)`` with probability pi_T(t) / 2.
    """
    if check_party(party) == ALICE:
        return tilde_transform(G.swap_parties(), BOB).swap_parties()
    nS, nT, nA, nB = G.shape
    S2 = tuple((s, 0) for s in G.S) + tuple((t, 1) for t in G.T)
    A2 = tuple((a, 0) for a in G.A) + tuple((b, 1) for b in G.B)
    V = np.zeros((nS + nT, nT, nA + nB, nB), dtype=bool)
    V[:nS, :, :nA, :] = G.V
    V[nS:, :, nA:, :] = np.eye(nB, dtype=bool)[None, None]
    pi = np.zeros((nS + nT, nT))
    pi[:nS] = G.pi / 2
    pi[nS:][np.arange(nT), np.arange(nT)] = G.pi.sum(axis=0) / 2
    return NonlocalGame(S2, G.T, A2, G.B, V, pi, name=f"tilde_{party}({G.name})")
