"""Command-line front end: ``dagassoc {dsep,associahedron,sp,check,matroid}``.

Nodes are 1-based on the command line and in every file format.  Exit codes:
0 success, 2 input error, 3 size bound exceeded, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import __version__
from ._sets import SizeBoundError, mask_of, members
from .causal import (
    DSepOracle,
    ExplicitOracle,
    FisherZOracle,
    GaussianExactOracle,
    MSepOracle,
    exhaustive_sp,
    greedy_sp_covered,
    greedy_sp_permutohedron,
    minimal_imap,
)
from .ci import CIParseError, find_violation, parse_ci_text
from .gaussian import FaithfulnessError, faithful_gaussian, gaussian_setfunction, matrix_from_json
from .graphs import (
    MixedGraph,
    find_bayes_ball_path,
    graph_from_json,
    separated,
    simplify_path,
)
from .matroid import matroid_from_path, matroid_to_json, msmp_associahedron
from .setfunction import (
    LOG,
    NotSubmodularError,
    SetFunction,
    class_poset,
    facet_incidence,
    h_representation,
    permutation_classes,
    semigraphoid_of,
)

EXIT_OK, EXIT_INPUT, EXIT_SIZE, EXIT_INTERNAL = 0, 2, 3, 4
ENV_PREFIX = "DAGASSOC_"


class InputError(ValueError):
    pass


@dataclass
class Report:
    """Output of one subcommand in all three formats."""

    data: dict
    text: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.data, indent=2) + "\n"
        if fmt == "tsv":
            return "".join("\t".join(str(c) for c in row) + "\n" for row in self.rows)
        return "".join(line + "\n" for line in self.text)


# -- helpers -------------------------------------------------------------------

def _env(name: str, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise InputError(f"bad value for {ENV_PREFIX}{name}: {raw!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_graph(path: str) -> MixedGraph:
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a graph object with 'n' and 'edges'")
    return graph_from_json(obj)


def _node(g_n: int, v: int) -> int:
    if not 1 <= v <= g_n:
        raise InputError(f"node {v} out of range 1..{g_n}")
    return v - 1


def _perm(pi) -> str:
    return "(" + "|".join(str(v + 1) for v in pi) + ")"


def _edges(g: MixedGraph) -> list[str]:
    return [f"{e.a + 1}{e.symbol(e.a)}{e.b + 1}" for e in g.edges]


def _exact(w: SetFunction, value: Fraction) -> dict:
    if w.kind == LOG:
        return {"det": str(value), "approx_log": round(math.log(value), 12), "approximate": True}
    return {"value": str(value)}


def _exact_text(w: SetFunction, value: Fraction) -> str:
    if w.kind == LOG:
        return f"log({value}) ~ {math.log(value):.6f}"
    return str(value)


def _set(mask: int) -> list[int]:
    return [v + 1 for v in members(mask)]


# -- subcommands ---------------------------------------------------------------

def cmd_dsep(args) -> Report:
    g = load_graph(args.graph)
    i, j = _node(g.n, args.i), _node(g.n, args.j)
    K = mask_of(_node(g.n, v) for v in args.given)
    if i == j or K >> i & 1 or K >> j & 1:
        raise InputError("need distinct endpoints outside the conditioning set")
    indep = separated(g, i, j, K)
    data = {"i": args.i, "j": args.j, "given": sorted(args.given),
            "separated": indep, "verdict": "independent" if indep else "dependent"}
    given = " | " + " ".join(map(str, sorted(args.given))) if args.given else ""
    text = [f"{args.i} _||_ {args.j}{given}: " + ("independent" if indep else "dependent")]
    rows = [["verdict", data["verdict"]]]
    if not indep:
        p = find_bayes_ball_path(g, i, j, K)
        d = simplify_path(g, p)
        data["path"] = [v + 1 for v in p.nodes]
        data["path_drawn"] = p.render()
        data["simple_path"] = [v + 1 for v in d.path.nodes]
        data["blocks"] = [{"kind": kind, "nodes": [v + 1 for v in nodes]} for kind, nodes in d.blocks]
        text.append("witness: " + " ".join(str(v) for v in data["path"]))
        text.append("drawn:   " + p.render())
        text.append("simple:  " + d.render() + "   ([trek] <canyon>)")
        rows.append(["witness", " ".join(str(v) for v in data["path"])])
        rows.append(["simple", d.render()])
    return Report(data, text, rows)


def _associahedron_function(args, g: MixedGraph) -> tuple[SetFunction, dict]:
    if args.method == "msmp":
        return msmp_associahedron(g), {"method": "msmp"}
    if not g.is_dag():
        raise InputError("--method gaussian needs a DAG")
    fg = faithful_gaussian(g, seed=args.seed)
    meta = {"method": "gaussian", "attempts": fg.attempts,
            "weights": {f"{a + 1}->{b + 1}": w for (a, b), w in sorted(fg.weights.items())}}
    return gaussian_setfunction(fg.sigma), meta


def cmd_associahedron(args) -> Report:
    g = load_graph(args.graph)
    w, meta = _associahedron_function(args, g)
    data = dict(meta, n=g.n, kind=w.kind, emit=args.emit)
    text = [f"# {meta['method']} realisation, n={g.n}, value kind {w.kind}"]
    rows = []
    if args.emit == "ci":
        rels = [r.to_text() for r in semigraphoid_of(w)]
        data["relations"] = rels
        text += rels
        rows = [[r] for r in rels]
    elif args.emit == "hrep":
        ineqs, (top, bound) = h_representation(w)
        data["inequalities"] = [dict(set=_set(I), **_exact(w, b)) for I, b in ineqs]
        data["equality"] = dict(set=_set(top), **_exact(w, bound))
        for I, b in ineqs:
            lhs = " + ".join(f"x{v}" for v in _set(I))
            text.append(f"{lhs} <= {_exact_text(w, b)}")
            rows.append([",".join(map(str, _set(I))), "<=", str(b)])
        text.append(" + ".join(f"x{v}" for v in _set(top)) + f" = {_exact_text(w, bound)}")
        rows.append([",".join(map(str, _set(top))), "=", str(bound)])
    elif args.emit == "classes":
        summary = permutation_classes(w)
        oracle = ExplicitOracle(summary.removed_walls)
        out = []
        for k, (cls, x) in enumerate(zip(summary.classes, summary.class_vertex)):
            dag = minimal_imap(oracle, cls[0])
            poset = sorted(class_poset(cls, g.n))
            out.append({
                "permutations": [_perm(p) for p in cls],
                "vertex": [str(c) for c in x],
                "dag": _edges(dag),
                "poset": [f"{a + 1}>{b + 1}" for a, b in poset],
            })
            text.append(f"[{k + 1}] {' '.join(_perm(p) for p in cls)}  dag: {', '.join(_edges(dag)) or '-'}"
                        f"  poset: {', '.join(out[-1]['poset']) or '-'}")
            rows.append([k + 1, " ".join(_perm(p) for p in cls), ",".join(_edges(dag)),
                         ",".join(out[-1]["poset"])])
        data["n_classes"] = len(out)
        data["classes"] = out
        text.insert(1, f"{len(out)} vertex classes, {sum(len(c) > 1 for c in summary.classes)} with several permutations")
        if w.kind == LOG:
            data["vertex_note"] = "log-kind coordinates are ratios r with x_i = log r"
    else:
        inc = facet_incidence(w)
        data.update({"vertices": inc.f_vector[0], "facets": inc.f_vector[1], "dim": inc.dim,
                     "is_simple": inc.is_simple, "degrees": list(inc.degrees), "exact": inc.exact})
        text.append(f"f-vector (vertices, facets): {inc.f_vector}  dim {inc.dim}")
        text.append(f"simple: {inc.is_simple}  degree counts: "
                    + ", ".join(f"{d}:{inc.degrees.count(d)}" for d in sorted(set(inc.degrees))))
        rows = [["vertices", inc.f_vector[0]], ["facets", inc.f_vector[1]], ["dim", inc.dim],
                ["is_simple", inc.is_simple]]
        if not inc.exact:
            text.append("(incidence from the rounded floating-point heuristic)")
        if args.emit == "incidence":
            data["facet_sets"] = [_set(I) for I in inc.facets]
            data["matrix"] = [list(r) for r in inc.matrix]
            text.append("facets: " + " ".join("{" + ",".join(map(str, _set(I))) + "}" for I in inc.facets))
            text += ["".join(str(c) for c in r) for r in inc.matrix]
            rows = [["".join(str(c) for c in r)] for r in inc.matrix]
    return Report(data, text, rows)


def _load_oracle(args):
    raw = _read(args.input)
    stripped = raw.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.input}: invalid JSON ({exc.msg})") from None
        g = graph_from_json(obj)
        return (DSepOracle(g) if g.is_dag() else MSepOracle(g)), "graph"
    if stripped.startswith("["):
        try:
            return GaussianExactOracle(matrix_from_json(json.loads(stripped))), "covariance"
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.input}: invalid JSON ({exc.msg})") from None
    if "_||_" in raw or not stripped or all(line.strip().startswith("#") for line in stripped.splitlines()):
        return ExplicitOracle(parse_ci_text(raw, args.n)), "ci"
    bad = InputError(f"{args.input}: not a graph, matrix, CI list or numeric CSV")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        try:
            data = np.loadtxt(io.StringIO(raw), delimiter=",", ndmin=2)
        except ValueError:
            try:
                data = np.loadtxt(io.StringIO(raw), delimiter=",", ndmin=2, skiprows=1)
            except ValueError:
                raise bad from None
    if data.size == 0:
        raise bad
    return FisherZOracle(data, alpha=args.alpha), "data"


def cmd_sp(args) -> Report:
    oracle, source = _load_oracle(args)
    data = {"algo": args.algo, "source": source, "backend": oracle.backend, "n": oracle.n}
    if args.algo == "exhaustive":
        res = exhaustive_sp(oracle)
        data.update(min_edges=res.min_edges, n_optimal_permutations=len(res.permutations),
                    essential_graphs=[_edges(e) for e in res.essential_graphs])
        text = [f"minimum edge count {res.min_edges} over {len(res.permutations)} permutations"]
        for e in res.essential_graphs:
            text.append("essential graph: " + (", ".join(_edges(e)) or "(no edges)"))
        rows = [["min_edges", res.min_edges]] + [["essential", ",".join(_edges(e))] for e in res.essential_graphs]
        return Report(data, text, rows)
    search = greedy_sp_covered if args.algo == "covered" else greedy_sp_permutohedron
    res = search(oracle, max_steps=args.max_steps, plateau_budget=args.plateau,
                 seed=args.seed, restarts=args.restarts)
    data.update(edges=res.n_edges, permutation=_perm(res.pi), dag=_edges(res.dag),
                essential_graph=_edges(res.essential), seed=args.seed, restarts=args.restarts,
                log=res.log)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(res.log_lines())
    text = [f"{res.n_edges} edges, permutation {_perm(res.pi)}",
            "dag: " + (", ".join(_edges(res.dag)) or "(no edges)"),
            "essential graph: " + (", ".join(_edges(res.essential)) or "(no edges)"),
            f"{len(res.log)} log entries" + (f" written to {args.log}" if args.log else "")]
    rows = [["edges", res.n_edges], ["permutation", _perm(res.pi)],
            ["essential", ",".join(_edges(res.essential))]]
    return Report(data, text, rows)


def cmd_check(args) -> Report:
    c = parse_ci_text(_read(args.ci_file), args.n)
    if args.axioms == "submodular-mss-monotone":
        witness = find_violation(c, "semigraphoid") or find_violation(c, "mss-monotone")
    else:
        witness = find_violation(c, args.axioms)
    ok = witness is None
    data = {"axioms": args.axioms, "n": c.n, "relations": len(c), "pass": ok, "violation": witness}
    text = [f"{args.axioms}: {'pass' if ok else 'fail'}"] + ([f"violation: {witness}"] if witness else [])
    rows = [["pass", ok]] + ([["violation", witness]] if witness else [])
    return Report(data, text, rows)


def cmd_matroid(args) -> Report:
    g = load_graph(args.graph)
    i, j = _node(g.n, args.i), _node(g.n, args.j)
    K = mask_of(_node(g.n, v) for v in args.given)
    if i == j or K >> i & 1 or K >> j & 1:
        raise InputError("need distinct endpoints outside the conditioning set")
    p = find_bayes_ball_path(g, i, j, K)
    if p is None:
        raise InputError("the nodes are separated; there is no Bayes-ball path")
    d = simplify_path(g, p)
    m = matroid_from_path(d, g.n)
    data = matroid_to_json(m)
    data["path"] = [v + 1 for v in d.path.nodes]
    text = [f"path {d.render()}", f"rank {data['rank']}, loops {data['loops']}",
            "parallel classes: " + " ".join("{" + ",".join(map(str, c)) + "}" for c in data["parallel_classes"])]
    text += ["realization:"] + ["  " + " ".join(row) for row in data["realization"]]
    rows = [[" ".join(row)] for row in data["realization"]]
    return Report(data, text, rows)


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "tsv", "text"), default=_env("FORMAT", "text"))

    p = argparse.ArgumentParser(prog="dagassoc", description="DAG associahedra, path matroids and sparsest-permutation search.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dsep", parents=[common], help="separation query with a witness path")
    s.add_argument("graph")
    s.add_argument("i", type=int)
    s.add_argument("j", type=int)
    s.add_argument("--given", type=int, nargs="*", default=[])
    s.set_defaults(func=cmd_dsep)

    s = sub.add_parser("associahedron", parents=[common], help="realise the associahedron of a graph")
    s.add_argument("graph")
    s.add_argument("--method", choices=("msmp", "gaussian"), default="msmp")
    s.add_argument("--emit", choices=("ci", "hrep", "classes", "fvector", "incidence"), default="classes")
    s.add_argument("--seed", type=int, default=_env("SEED", 0, int))
    s.set_defaults(func=cmd_associahedron)

    s = sub.add_parser("sp", parents=[common], help="sparsest-permutation search")
    s.add_argument("input", help="graph JSON, covariance JSON, CI text or CSV data")
    s.add_argument("--algo", choices=("perm", "covered", "exhaustive"), default="covered")
    s.add_argument("--restarts", type=int, default=_env("RESTARTS", 1, int))
    s.add_argument("--seed", type=int, default=_env("SEED", 0, int))
    s.add_argument("--max-steps", type=int, default=_env("MAX_STEPS", 1000, int))
    s.add_argument("--plateau", type=int, default=_env("PLATEAU", 50, int))
    s.add_argument("--alpha", type=float, default=_env("ALPHA", 0.01, float))
    s.add_argument("--n", type=int, default=None, help="ground set size for CI text input")
    s.add_argument("--log", default=None, help="write the run log as JSON lines")
    s.set_defaults(func=cmd_sp)

    s = sub.add_parser("check", parents=[common], help="check CI axioms")
    s.add_argument("ci_file")
    s.add_argument("--axioms", choices=("semigraphoid", "graphoid", "gaussoid", "submodular-mss-monotone"),
                   default="semigraphoid")
    s.add_argument("--n", type=int, default=None)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("matroid", parents=[common], help="path matroid of a dependence, as JSON")
    s.add_argument("graph")
    s.add_argument("i", type=int)
    s.add_argument("j", type=int)
    s.add_argument("--given", type=int, nargs="*", default=[])
    s.set_defaults(func=cmd_matroid)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
    except InputError as exc:
        print(f"dagassoc: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        report = args.func(args)
    except SizeBoundError as exc:
        print(f"dagassoc: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (AssertionError, FaithfulnessError, NotSubmodularError) as exc:
        print(f"dagassoc: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, CIParseError, ValueError, TypeError) as exc:
        print(f"dagassoc: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(report.render(args.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
