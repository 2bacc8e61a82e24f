"""JSON formats for matrices, graphs, games and strategies.

Output is byte-stable: object keys are sorted, floats are written with 17
significant digits, and complex numbers are ``[re, im]`` pairs. JSON lists
read back as tuples wherever they appear as labels.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .games import Graph, NonlocalGame
from .strategies import QuantumStrategy


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize {x}")
    text = format(x, ".17g")
    if not any(ch in text for ch in ".e"):
        text += ".0"
    return text


def dumps(obj) -> str:
    """Deterministic compact JSON text for plain Python/numpy data."""
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{dumps(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_label(x):
    """JSON value -> hashable label (lists become tuples)."""
    if isinstance(x, list):
        return tuple(to_label(y) for y in x)
    return x


def from_label(x):
    if isinstance(x, tuple):
        return [from_label(y) for y in x]
    if isinstance(x, np.integer):
        return int(x)
    return x


# -- matrices -----------------------------------------------------------------


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise ValueError(f"{len(entries)} entries for a {rows}x{cols} matrix")
    arr = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    return arr.reshape(rows, cols)


# -- graphs and games ---------------------------------------------------------


def graph_to_json(X: Graph) -> dict:
    return {
        "vertices": [from_label(v) for v in X.vertices],
        "edges": [[from_label(u), from_label(v)] for u, v in X.edges],
    }


def graph_from_json(obj: dict) -> Graph:
    vertices = [to_label(v) for v in obj["vertices"]]
    edges = [(to_label(u), to_label(v)) for u, v in obj["edges"]]
    return Graph(vertices, edges)


def game_to_json(G: NonlocalGame) -> dict:
    S = [from_label(x) for x in G.S]
    T = [from_label(x) for x in G.T]
    A = [from_label(x) for x in G.A]
    B = [from_label(x) for x in G.B]
    pi = [[S[i], T[j], float(G.pi[i, j])] for i, j in np.argwhere(G.pi > 0)]
    V = [[S[i], T[j], A[k], B[m]] for i, j, k, m in np.argwhere(G.V)]
    return {"S": S, "T": T, "A": A, "B": B, "pi": pi, "V": V}


def game_from_json(obj: dict) -> NonlocalGame:
    S, T, A, B = ([to_label(x) for x in obj[k]] for k in ("S", "T", "A", "B"))
    pos = [{x: i for i, x in enumerate(L)} for L in (S, T, A, B)]
    pi = np.zeros((len(S), len(T)))
    for s, t, p in obj["pi"]:
        pi[pos[0][to_label(s)], pos[1][to_label(t)]] += float(p)
    V = np.zeros((len(S), len(T), len(A), len(B)), dtype=bool)
    for s, t, a, b in obj["V"]:
        V[pos[0][to_label(s)], pos[1][to_label(t)], pos[2][to_label(a)], pos[3][to_label(b)]] = True
    return NonlocalGame(S, T, A, B, V, pi)


# -- strategies ---------------------------------------------------------------


def strategy_to_json(St: QuantumStrategy) -> dict:
    return {
        "dA": St.d_a,
        "dB": St.d_b,
        "psi": matrix_to_json(St.psi),
        "alice": {k: [matrix_to_json(m) for m in v] for k, v in St.alice.items()},
        "bob": {k: [matrix_to_json(m) for m in v] for k, v in St.bob.items()},
    }


def strategy_from_json(obj: dict) -> QuantumStrategy:
    def povms(table):
        return {k: np.array([matrix_from_json(m) for m in v]) for k, v in table.items()}

    psi = matrix_from_json(obj["psi"]).reshape(-1)
    return QuantumStrategy(int(obj["dA"]), int(obj["dB"]), psi, povms(obj["alice"]), povms(obj["bob"]))


def save(obj: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load(path) -> dict:
    with open(path) as fh:
        return json.load(fh)

