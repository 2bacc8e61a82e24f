"""One-way communication protocols for promise equality on a graph.

Inputs are vertices s, t of a graph X with the promise that s = t or s ~ t;
Bob must announce which. A perfect strategy for the coloring game on X
gives an exact protocol: Alice measures her half of the shared state,
sends the outcome a and the other half, and Bob says "equal" iff his own
outcome equals a. A proper coloring gives the classical protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadN, BudgetExceeded, ImproperColoring, NondeterministicAnswer, NotPerfect
from .games import Graph, _bit_rows, make_coloring_game
from .linalg import EPS
from .strategies import QuantumStrategy, is_perfect, label_key


def _bits(k: int) -> int:
    return math.ceil(math.log2(k)) if k > 1 else 0


def promise_pairs(X: Graph) -> list[tuple]:
    """Ordered (s, t) with s = t or s adjacent to t."""
    mask = X.adjacency | np.eye(len(X), dtype=bool)
    return [(X.vertices[i], X.vertices[j]) for i, j in np.argwhere(mask)]


@dataclass
class CostReport:
    classical_bits: int
    qubits: int
    deterministic_bits: int | None = None


@dataclass
class ProtocolTranscript:
    s: object
    t: object
    message: object  # Alice's classical message
    probability: float  # of that message
    dimension: int  # of the quantum message, 0 if none
    says_equal: bool
    correct: bool
    deviation: float  # probability that Bob's answer comes out wrong


@dataclass
class SimulationSummary:
    transcripts: list
    pairs_checked: int
    correct: int
    max_deviation: float
    cost: CostReport

    def to_dict(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "correct": self.correct,
            "max_deviation": self.max_deviation,
            "classical_bits": self.cost.classical_bits,
            "qubits": self.cost.qubits,
        }


@dataclass
class QuantumProtocol:
    """Protocol built from an entangled strategy for the coloring game on ``graph``."""

    graph: Graph
    strategy: QuantumStrategy
    colors: int

    @property
    def cost(self) -> CostReport:
        return CostReport(classical_bits=_bits(self.colors), qubits=_bits(self.strategy.d_b))

    def messages(self, s, eps: float = EPS) -> list[tuple[int, float, np.ndarray]]:
        """Alice's possible messages on input s: (outcome, probability, Bob's state).

        Bob's register after Alice sees outcome a is
        tr_A[(E_a (x) I)|psi><psi|] / p(a) = D^T E_a^T conj(D) / p(a).
        """
        D = self.strategy.coefficient_matrix
        out = []
        for a, E in enumerate(self.strategy.alice[label_key(s)]):
            rho = D.T @ E.T @ D.conj()
            p = float(np.trace(rho).real)
            if p > eps:
                out.append((a, p, rho / p))
        return out

    def bob_distribution(self, t, rho: np.ndarray) -> np.ndarray:
        F = self.strategy.bob[label_key(t)]
        return np.einsum("bij,ji->b", F, rho).real


def strategy_to_protocol(X: Graph, St: QuantumStrategy, eps: float = EPS, check: bool = True) -> QuantumProtocol:
    """Protocol from a perfect strategy for coloring ``X`` with as many colors as Alice has outcomes."""
    colors = len(next(iter(St.alice.values())))
    if check:
        chk = is_perfect(make_coloring_game(X, colors), St, eps)
        if not chk:
            raise NotPerfect(f"strategy loses the coloring game with probability {chk.total_loss:.3g}")
    return QuantumProtocol(X, St, colors)


def simulate_protocol(P: QuantumProtocol, X: Graph | None = None, eps: float = EPS, strict: bool = True) -> SimulationSummary:
    """Run the protocol exactly on every promise pair and every likely message.

    With ``strict`` a wrong answer of probability above ``eps`` raises
    :class:`NondeterministicAnswer`; otherwise it is recorded.
    """
    X = P.graph if X is None else X
    transcripts = []
    wrong_pairs = set()
    worst = 0.0
    cache = {}
    for s, t in promise_pairs(X):
        if s not in cache:
            cache[s] = P.messages(s, eps)
        equal = s == t
        for a, p, rho in cache[s]:
            dist = P.bob_distribution(t, rho)
            p_same = float(dist[a])
            deviation = 1.0 - p_same if equal else p_same
            deviation = max(deviation, 0.0)
            if deviation > eps:
                if strict:
                    raise NondeterministicAnswer(
                        f"on ({s!r}, {t!r}) after message {a} Bob errs with probability {deviation:.3g}"
                    )
                wrong_pairs.add((s, t))
            worst = max(worst, deviation)
            says_equal = p_same >= 0.5
            transcripts.append(
                ProtocolTranscript(s, t, a, p, P.strategy.d_b, says_equal, says_equal == equal, deviation)
            )
    n_pairs = len({(tr.s, tr.t) for tr in transcripts})
    return SimulationSummary(transcripts, n_pairs, n_pairs - len(wrong_pairs), worst, P.cost)


@dataclass
class ColoringProtocol:
    """Alice sends the color of s; Bob says "equal" iff it is the color of t."""

    graph: Graph
    coloring: dict
    cost: CostReport = field(init=False)

    def __post_init__(self):
        k = len(set(self.coloring.values()))
        self.cost = CostReport(classical_bits=_bits(k), qubits=0, deterministic_bits=_bits(k))

    def message(self, s):
        return self.coloring[s]

    def answer(self, t, message) -> bool:
        return self.coloring[t] == message

    def simulate(self) -> SimulationSummary:
        transcripts = []
        for s, t in promise_pairs(self.graph):
            m = self.message(s)
            eq = self.answer(t, m)
            ok = eq == (s == t)
            transcripts.append(ProtocolTranscript(s, t, m, 1.0, 0, eq, ok, 0.0 if ok else 1.0))
        correct = sum(tr.correct for tr in transcripts)
        worst = max((tr.deviation for tr in transcripts), default=0.0)
        return SimulationSummary(transcripts, len(transcripts), correct, worst, self.cost)


def is_proper_coloring(X: Graph, coloring: dict) -> bool:
    if set(coloring) != set(X.vertices):
        return False
    return all(coloring[u] != coloring[v] for u, v in X.edges)


def coloring_protocol(X: Graph, coloring: dict) -> tuple[CostReport, ColoringProtocol]:
    if not is_proper_coloring(X, coloring):
        raise ImproperColoring("coloring misses a vertex or gives adjacent vertices the same color")
    proto = ColoringProtocol(X, dict(coloring))
    return proto.cost, proto


# -- chromatic number ---------------------------------------------------------


def _greedy_clique(adj: np.ndarray) -> list[int]:
    best: list[int] = []
    order = np.argsort(-adj.sum(axis=1), kind="stable")
    for start in order:
        clique = [int(start)]
        cand = adj[start].copy()
        while cand.any():
            idx = np.flatnonzero(cand)
            v = int(idx[np.argmax(adj[np.ix_(idx, idx)].sum(axis=1))])
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return best


def chromatic_number(X: Graph, budget: int = 64) -> tuple[int, dict]:
    """Exact chromatic number with a witness coloring.

    DSATUR branch and bound: vertices are colored in order of saturation
    (ties by degree), the search never opens more colors than the best
    known coloring minus one, and stops once a greedy clique bound is met.
    """
    n = len(X)
    if n > budget:
        raise BudgetExceeded(f"{n} vertices exceed the search budget of {budget}")
    if n == 0:
        return 0, {}
    adj = X.adjacency
    nbrs = [np.flatnonzero(adj[i]) for i in range(n)]
    degree = adj.sum(axis=1)
    clique = _greedy_clique(adj)
    lower = len(clique)

    colors = np.full(n, -1)
    best = {"k": n + 1, "colors": None}

    def pick() -> int:
        sat = -1
        pick_v = -1
        for v in range(n):
            if colors[v] >= 0:
                continue
            used = {int(colors[u]) for u in nbrs[v] if colors[u] >= 0}
            key = (len(used), degree[v])
            if pick_v < 0 or key > sat:
                sat, pick_v = key, v
        return pick_v

    def search(done: int, used: int) -> bool:
        if used >= best["k"]:
            return False
        if done == n:
            best["k"], best["colors"] = used, colors.copy()
            return used == lower
        v = pick()
        taken = {int(colors[u]) for u in nbrs[v] if colors[u] >= 0}
        for c in range(used):
            if c not in taken:
                colors[v] = c
                if search(done + 1, used):
                    return True
        if used + 1 < best["k"]:
            colors[v] = used
            if search(done + 1, used + 1):
                return True
        colors[v] = -1
        return False

    # seed the clique with distinct colors to break symmetry
    for c, v in enumerate(clique):
        colors[v] = c
    search(len(clique), len(clique))
    coloring = {X.vertices[i]: int(c) for i, c in enumerate(best["colors"])}
    return best["k"], coloring


# -- Hadamard graphs ----------------------------------------------------------


def orthogonal_representation_hadamard(n: int) -> dict:
    """v_s = n^{-1/2} sum_i (-1)^{s_i} |i> for every n-bit string s."""
    if n < 4 or n % 4:
        raise BadN(f"need n divisible by 4, got {n}")
    bits = _bit_rows(n)
    vecs = (-1.0) ** bits / np.sqrt(n)
    return {"".join(map(str, row)): v for row, v in zip(bits, vecs)}


def orthogonality_residual(vectors: dict, X: Graph) -> tuple[float, float]:
    """(max |<v_s|v_t>| over edges, max | ||v_s|| - 1 |)."""
    V = np.array([vectors[v] for v in X.vertices])
    gram = V.conj() @ V.T
    edge = float(np.abs(gram[X.adjacency]).max(initial=0.0))
    unit = float(np.abs(np.sqrt(np.abs(np.diag(gram))) - 1).max())
    return edge, unit


# -- cost arithmetic ----------------------------------------------------------


@dataclass
class CostBounds:
    n: int
    d: int
    per_part_chromatic_bound: float  # (1 + 2 sqrt 2)^(2d)
    simplified_bound: float  # 14^d
    exceeds_simplified: bool
    composed_deterministic_cost: float  # log2 n + 3d
    composed_cost_exact_constant: float  # log2 n + 2d log2(1 + 2 sqrt 2)
    quantum_floor: float  # log2 n
    classical_bits: int
    qubits: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def cost_bounds(n: int, d: int) -> CostBounds:
    """Fixed-size arithmetic behind the entanglement dimension bound for H_n."""
    per_part = (1 + 2 * math.sqrt(2)) ** (2 * d)
    simplified = 14.0**d
    return CostBounds(
        n=n,
        d=d,
        per_part_chromatic_bound=per_part,
        simplified_bound=simplified,
        exceeds_simplified=per_part > simplified,
        composed_deterministic_cost=math.log2(n) + 3 * d,
        composed_cost_exact_constant=math.log2(n) + 2 * d * math.log2(1 + 2 * math.sqrt(2)),
        quantum_floor=math.log2(n),
        classical_bits=_bits(n),
        qubits=_bits(d),
    )
