"""Command line front end.

Exit codes: 0 success, 1 a verification came out negative, 2 malformed
input or a violated precondition.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

from . import commsim, games, serialize, strategies
from .errors import NonlocalGameError
from .linalg import EPS

log = logging.getLogger("nlgame")

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    out: str | None
    eps: float
    budget: int | None
    jobs: int
    seed: int
    strict_support: bool

    def __post_init__(self):
        if self.eps <= 0:
            raise NonlocalGameError("--eps must be positive")
        if self.budget is not None and self.budget <= 0:
            raise NonlocalGameError("--budget must be positive")
        if self.jobs < 1:
            raise NonlocalGameError("--jobs must be at least 1")


def fmt_eps(eps: float) -> str:
    """1e-09 -> '1e-9'."""
    mant, _, exp = f"{eps:g}".partition("e")
    return f"{mant}e{int(exp)}" if exp else mant


def _emit(cfg: RunConfig, obj: dict, always_stdout: bool = False) -> None:
    text = serialize.dumps(obj)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    elif always_stdout:
        print(text)


def _read_game(path):
    return serialize.game_from_json(serialize.load(path))


def _read_graph(path):
    return serialize.graph_from_json(serialize.load(path))


def _read_strategy(path):
    return serialize.strategy_from_json(serialize.load(path))


# -- gen ----------------------------------------------------------------------


def gen_hadamard_graph(args, cfg):
    _emit(cfg, serialize.graph_to_json(games.hadamard_graph(args.n)), always_stdout=True)


def _graph_arg(args):
    if args.hadamard is not None:
        return games.hadamard_graph(args.hadamard)
    if args.graph is None:
        raise NonlocalGameError("give --graph PATH or --hadamard N")
    return _read_graph(args.graph)


def gen_coloring_game(args, cfg):
    G = games.make_coloring_game(_graph_arg(args), args.colors)
    _emit(cfg, serialize.game_to_json(G), always_stdout=True)


def gen_homomorphism_game(args, cfg):
    G = games.make_homomorphism_game(_read_graph(args.graph), _read_graph(args.target))
    _emit(cfg, serialize.game_to_json(G), always_stdout=True)


def gen_bcs_game(args, cfg):
    if args.magic_square:
        cons = games.magic_square_constraints()
    elif args.constraints:
        raw = serialize.load(args.constraints)
        cons = [games.ParityConstraint(tuple(c["variables"]), int(c["parity"])) for c in raw]
    else:
        raise NonlocalGameError("give --constraints PATH or --magic-square")
    _emit(cfg, serialize.game_to_json(games.make_bcs_game(cons)), always_stdout=True)


def gen_chsh_game(args, cfg):
    _emit(cfg, serialize.game_to_json(games.make_chsh_game()), always_stdout=True)


def gen_chsh_strategy(args, cfg):
    _emit(cfg, serialize.strategy_to_json(strategies.chsh_strategy()), always_stdout=True)


def gen_fourier_strategy(args, cfg):
    _emit(cfg, serialize.strategy_to_json(strategies.fourier_strategy_hadamard(args.n)), always_stdout=True)


def gen_magic_square_strategy(args, cfg):
    _emit(cfg, serialize.strategy_to_json(strategies.magic_square_strategy()), always_stdout=True)


def gen_blocksum_strategy(args, cfg):
    St = strategies.block_direct_sum_strategy(_read_strategy(args.strategy), args.p)
    _emit(cfg, serialize.strategy_to_json(St), always_stdout=True)


# -- game ---------------------------------------------------------------------


def game_classical_value(args, cfg):
    G = _read_game(args.game)
    res = games.classical_value(G, budget=cfg.budget or games.DEFAULT_BUDGET, jobs=cfg.jobs)
    print(f"{res.value:.15g}")
    _emit(
        cfg,
        {
            "value": res.value,
            "alice": {strategies.label_key(s): serialize.from_label(a) for s, a in res.alice.items()},
            "bob": {strategies.label_key(t): serialize.from_label(b) for t, b in res.bob.items()},
        },
    )


def _witness_json(w: games.WeakProjectionWitness) -> dict:
    return {
        "party": w.party,
        "assignment": [
            {
                "question": serialize.from_label(t),
                "partner": serialize.from_label(s),
                "map": [[serialize.from_label(a), serialize.from_label(b)] for a, b in f.items()],
            }
            for t, (s, f) in w.assignment.items()
        ],
    }


def game_detect_projection(args, cfg):
    G = _read_game(args.game)
    found = games.detect_weak_projection(G, strict=cfg.strict_support)
    projection = games.is_projection_game(G)
    for party in (games.BOB, games.ALICE):
        ok = any(w.party == party for w in found)
        print(f"weakly projective for {party}: {'yes' if ok else 'no'}")
    print(f"projection game: {'yes' if projection else 'no'}")
    _emit(cfg, {"projection_game": projection, "witnesses": [_witness_json(w) for w in found]})


def game_tilde(args, cfg):
    G = games.tilde_transform(_read_game(args.game), args.party)
    _emit(cfg, serialize.game_to_json(G), always_stdout=True)


# -- strategy -----------------------------------------------------------------


def strategy_verify(args, cfg):
    G, St = _read_game(args.game), _read_strategy(args.strategy)
    chk = strategies.is_perfect(G, St, cfg.eps)
    if chk.perfect:
        print(f"perfect within {fmt_eps(cfg.eps)}")
    else:
        print(f"not perfect: losing probability {chk.total_loss:.6g}, {len(chk.violations)} violating tuples")
    _emit(
        cfg,
        {
            "perfect": chk.perfect,
            "eps": cfg.eps,
            "winning_probability": min(max(chk.winning_probability, 0.0), 1.0),
            "raw_winning_probability": chk.winning_probability,
            "total_loss": chk.total_loss,
            "violations": [[*map(serialize.from_label, v[:4]), v[4]] for v in chk.violations],
        },
    )
    return EXIT_OK if chk.perfect else EXIT_FAIL


def strategy_substitute_me(args, cfg):
    G, St = _read_game(args.game), _read_strategy(args.strategy)
    new = strategies.substitute_max_entangled(G, St, cfg.eps, restrict_support=args.restrict_support)
    chk = strategies.is_perfect(G, new, 10 * cfg.eps)
    log.info("substituted state; perfect at %s: %s", fmt_eps(10 * cfg.eps), chk.perfect)
    _emit(cfg, serialize.strategy_to_json(new), always_stdout=True)
    return EXIT_OK if chk.perfect else EXIT_FAIL


def strategy_structure_report(args, cfg):
    G, St = _read_game(args.game), _read_strategy(args.strategy)
    if args.perturb_question is not None:
        labels = G.S if args.perturb_party == games.ALICE else G.T
        matches = [q for q in labels if strategies.label_key(q) == args.perturb_question]
        if not matches:
            raise NonlocalGameError(f"no question {args.perturb_question!r} for {args.perturb_party}")
        q = matches[0]
        St = strategies.perturb_measurement(St, args.perturb_party, q, args.perturb_strength, cfg.seed)
    rep = strategies.structure_report(G, St, cfg.eps)
    tol = 10 * cfg.eps
    print(f"Schmidt classes: {[len(c) for c in rep.schmidt_classes]}")
    print(f"perfect: {rep.perfect}")
    print(f"max projectivity residual: {rep.max_projectivity:.3g}")
    print(f"max commutator residual: {rep.max_commutator:.3g}")
    print(f"max off-block mass: {rep.max_off_block:.3g}")
    body = rep.to_dict()
    body["rows"] = [r | {"question": serialize.from_label(r["question"]), "outcome": serialize.from_label(r["outcome"])} for r in body["rows"]]
    _emit(cfg, body)
    return EXIT_OK if rep.perfect and rep.max_residual <= tol else EXIT_FAIL


def strategy_lift_tilde(args, cfg):
    G, St = _read_game(args.game), _read_strategy(args.strategy)
    lifted = strategies.lift_strategy_tilde(G, St, args.party, cfg.eps)
    _emit(cfg, serialize.strategy_to_json(lifted), always_stdout=True)


# -- comm ---------------------------------------------------------------------


def comm_from_strategy(args, cfg):
    X, St = _read_graph(args.graph), _read_strategy(args.strategy)
    proto = commsim.strategy_to_protocol(X, St, cfg.eps)
    cost = proto.cost
    print(f"{cost.classical_bits} classical bits + {cost.qubits} qubits")
    _emit(cfg, {"classical_bits": cost.classical_bits, "qubits": cost.qubits, "colors": proto.colors})


def comm_simulate(args, cfg):
    X, St = _read_graph(args.graph), _read_strategy(args.strategy)
    proto = commsim.strategy_to_protocol(X, St, cfg.eps, check=not args.no_check)
    summary = commsim.simulate_protocol(proto, X, cfg.eps, strict=False)
    ok = summary.correct == summary.pairs_checked
    print(f"{summary.correct}/{summary.pairs_checked} promise pairs correct, max deviation {summary.max_deviation:.3g}")
    _emit(cfg, summary.to_dict())
    return EXIT_OK if ok else EXIT_FAIL


def comm_coloring_protocol(args, cfg):
    X = _read_graph(args.graph)
    if args.coloring:
        raw = serialize.load(args.coloring)
        keyed = {strategies.label_key(v): v for v in X.vertices}
        coloring = {keyed[k]: c for k, c in raw.items() if k in keyed}
    else:
        _, coloring = commsim.chromatic_number(X, budget=cfg.budget or 64)
    cost, proto = commsim.coloring_protocol(X, coloring)
    summary = proto.simulate()
    print(f"{cost.classical_bits} bits, {summary.correct}/{summary.pairs_checked} promise pairs correct")
    _emit(cfg, summary.to_dict() | {"deterministic_bits": cost.deterministic_bits})
    return EXIT_OK if summary.correct == summary.pairs_checked else EXIT_FAIL


def comm_chromatic(args, cfg):
    X = _read_graph(args.graph)
    k, coloring = commsim.chromatic_number(X, budget=cfg.budget or 64)
    print(k)
    _emit(cfg, {"chromatic_number": k, "coloring": {strategies.label_key(v): c for v, c in coloring.items()}})


def comm_bounds(args, cfg):
    b = commsim.cost_bounds(args.n, args.d)
    print(f"(1+2*sqrt2)^(2d) = {b.per_part_chromatic_bound:.6g}, 14^d = {b.simplified_bound:.6g}")
    if b.exceeds_simplified:
        print("note: (1+2*sqrt2)^(2d) exceeds 14^d at this d")
    print(f"composed deterministic cost log2 n + 3d = {b.composed_deterministic_cost:.6g}")
    print(f"quantum floor log2 n = {b.quantum_floor:.6g}")
    _emit(cfg, b.to_dict())


# -- parser -------------------------------------------------------------------


COMMANDS = {
    "gen": {
        "hadamard-graph": gen_hadamard_graph,
        "coloring-game": gen_coloring_game,
        "homomorphism-game": gen_homomorphism_game,
        "bcs-game": gen_bcs_game,
        "chsh-game": gen_chsh_game,
        "chsh-strategy": gen_chsh_strategy,
        "fourier-strategy": gen_fourier_strategy,
        "magic-square-strategy": gen_magic_square_strategy,
        "blocksum-strategy": gen_blocksum_strategy,
    },
    "game": {
        "classical-value": game_classical_value,
        "detect-projection": game_detect_projection,
        "tilde": game_tilde,
    },
    "strategy": {
        "verify": strategy_verify,
        "substitute-me": strategy_substitute_me,
        "structure-report": strategy_structure_report,
        "lift-tilde": strategy_lift_tilde,
    },
    "comm": {
        "from-strategy": comm_from_strategy,
        "simulate": comm_simulate,
        "coloring-protocol": comm_coloring_protocol,
        "chromatic": comm_chromatic,
        "bounds": comm_bounds,
    },
}


def _add_args(group: str, verb: str, p: argparse.ArgumentParser) -> None:
    key = f"{group} {verb}"
    if key in ("gen hadamard-graph", "gen fourier-strategy"):
        p.add_argument("--n", type=int, required=True)
    elif key == "gen coloring-game":
        p.add_argument("--graph")
        p.add_argument("--hadamard", type=int, metavar="N")
        p.add_argument("--colors", type=int, required=True)
    elif key == "gen homomorphism-game":
        p.add_argument("--graph", required=True)
        p.add_argument("--target", required=True)
    elif key == "gen bcs-game":
        p.add_argument("--constraints", help="JSON list of {variables, parity}")
        p.add_argument("--magic-square", action="store_true")
    elif key == "gen blocksum-strategy":
        p.add_argument("--strategy", required=True)
        p.add_argument("--p", type=float, required=True)
    elif group == "game":
        p.add_argument("game")
        if verb == "tilde":
            p.add_argument("--party", default="bob", choices=["alice", "bob"])
    elif group == "strategy":
        p.add_argument("--game", required=True)
        p.add_argument("--strategy", required=True)
        if verb == "lift-tilde":
            p.add_argument("--party", default="bob", choices=["alice", "bob"])
        if verb == "substitute-me":
            p.add_argument("--restrict-support", action="store_true", help="compress onto the Schmidt support first")
        if verb == "structure-report":
            p.add_argument("--perturb-party", default="bob", choices=["alice", "bob"])
            p.add_argument("--perturb-question")
            p.add_argument("--perturb-strength", type=float, default=1e-3)
    elif group == "comm":
        if verb == "bounds":
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--d", type=int, required=True)
        else:
            p.add_argument("--graph", required=True)
        if verb in ("from-strategy", "simulate"):
            p.add_argument("--strategy", required=True)
        if verb == "simulate":
            p.add_argument("--no-check", action="store_true", help="skip the perfection check")
        if verb == "coloring-protocol":
            p.add_argument("--coloring", help="JSON object vertex -> color (default: optimal)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", type=float, default=EPS)
    common.add_argument("--budget", type=int)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--strict-support", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nlgame", description="Nonlocal game analysis toolkit")
    groups = parser.add_subparsers(dest="group", required=True)
    for group, verbs in COMMANDS.items():
        gp = groups.add_parser(group)
        sub = gp.add_subparsers(dest="verb", required=True)
        for verb, func in verbs.items():
            p = sub.add_parser(verb, parents=[common])
            _add_args(group, verb, p)
            p.set_defaults(func=func)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = RunConfig(
            subcommand=f"{args.group} {args.verb}",
            out=args.out,
            eps=args.eps,
            budget=args.budget,
            jobs=args.jobs,
            seed=args.seed,
            strict_support=args.strict_support,
        )
        code = args.func(args, cfg)
    except NonlocalGameError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (OSError, KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK if code is None else code


def main() -> None:
    sys.exit(run())
