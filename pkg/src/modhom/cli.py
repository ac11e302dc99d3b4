"""Command-line entry point: ``modhom <command> [flags]``.

Every command prints one JSON object on stdout. Exit status is 0 on
success, 2 for invalid input, 3 when a bounded search gives up and 4 when
a verification fails.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dichotomy import (
    ZDecomposition,
    build_bis_reduction,
    classify,
    count_tractable,
    find_gadgets,
    find_thick_z,
    make_decomposition,
    verify_reduction,
    zbis_value,
)
from .exceptions import SearchExhausted, SortError, VerificationFailed
from .graph import Graph, PinnedGraph, graph_from_json, graph_to_json
from .hom import TableCSP, count_hom, count_hom_mod, count_inj
from .mobius import DEFAULT_MAX_BELL, aut_order, indistinguishable, inj_via_inversion
from .products import (
    cartesian_prime_factorization,
    cartesian_product,
    cartesian_skeleton,
    boolean_square,
    diamond_prime_factorization,
    diamond_product,
    direct_product,
)
from .reduction import constants_reduce, mpp_eval, p_reduce, strictify

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_EXHAUSTED = 3
EXIT_VERIFY = 4

DEFAULT_MAX_N = 16


class InputError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not a prime")
    return p


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})")


def _pinned_or_plain(path: str, args):
    obj = graph_from_json(_load(path))
    g = obj.graph if isinstance(obj, PinnedGraph) else obj
    if args.max_n is not None and g.n > args.max_n:
        raise InputError(f"{path}: {g.n} vertices exceeds --max-n {args.max_n}")
    return obj


def _graph(path: str, args, pinned: bool = False):
    """Load a graph; pins are required with ``pinned`` and dropped otherwise."""
    obj = _pinned_or_plain(path, args)
    if pinned:
        if not isinstance(obj, PinnedGraph):
            raise InputError(f"{path}: a 'pins' field is required")
        return obj
    return obj.graph if isinstance(obj, PinnedGraph) else obj


def _sets(*parts):
    return [sorted(s) for s in parts]


def decomposition_to_json(z: ZDecomposition) -> dict:
    return {
        "A": sorted(z.a),
        "B": sorted(z.b),
        "C": sorted(z.c),
        "D": sorted(z.d),
        "gadget_L": graph_to_json(z.gadget_l),
        "gadget_R": graph_to_json(z.gadget_r),
        "alpha1": z.alpha1,
        "alpha2": z.alpha2,
        "beta1": z.beta1,
        "beta2": z.beta2,
        "p": z.p,
    }


def _decomposition(h: Graph, args) -> ZDecomposition:
    """Thick Z-subgraph plus gadgets, from ``--z`` if given or by search."""
    if args.z:
        obj = _load(args.z)
        try:
            parts = [obj[k] for k in "ABCD"]
        except (KeyError, TypeError):
            raise InputError("decomposition JSON needs fields A, B, C, D")
        if "gadget_L" in obj and "gadget_R" in obj:
            gl, gr = graph_from_json(obj["gadget_L"]), graph_from_json(obj["gadget_R"])
            if not isinstance(gl, PinnedGraph) or not isinstance(gr, PinnedGraph):
                raise InputError("gadgets need a 'pins' field")
            return make_decomposition(h, parts, gl, gr, args.p)
    else:
        parts = find_thick_z(h)
        if parts is None:
            raise InputError("target is complete bipartite: no thick Z-subgraph")
    z = find_gadgets(h, parts, args.p, args.bound)
    if z is None:
        raise SearchExhausted(f"no gadgets with at most {args.bound} vertices")
    return z


# ---------------------------------------------------------------------------
# commands; each returns (payload, summary)


def cmd_count(args):
    n = count_hom(_graph(args.g, args), _graph(args.h, args))
    return {"count": n}, f"hom = {n}"


def cmd_count_mod(args):
    r = count_hom_mod(_graph(args.g, args), _graph(args.h, args), args.p)
    return {"residue": r, "p": args.p}, f"hom = {r} (mod {args.p})"


def cmd_inj(args):
    n = count_inj(_pinned_or_plain(args.g, args), _pinned_or_plain(args.h, args))
    return {"count": n}, f"inj = {n}"


def cmd_aut(args):
    n = aut_order(_graph(args.h, args), max_n=args.max_bell)
    return {"order": n}, f"|Aut| = {n}"


def cmd_preduce(args):
    red = p_reduce(_graph(args.h, args), args.p, choose=args.choose)
    return graph_to_json(red), f"reduced form has {red.n} vertices"


def cmd_classify(args):
    v = classify(_graph(args.h, args), args.p)
    wit = [{"vertices": sorted(s), "class": c} for s, c in v.witness]
    out = {"verdict": v.verdict, "reduced_target": graph_to_json(v.reduced_target), "witness": wit}
    return out, f"{v.verdict} ({len(wit)} component(s) reported)"


def cmd_count_tractable(args):
    n = count_tractable(_graph(args.g, args), _graph(args.h, args))
    return {"count": n}, f"hom = {n}"


def cmd_mobius_inj(args):
    n = inj_via_inversion(_pinned_or_plain(args.g, args), _pinned_or_plain(args.h, args), max_n=args.max_bell)
    return {"count": n}, f"inj = {n} via inversion"


def cmd_indist(args):
    res = indistinguishable(_graph(args.h, args), args.a, args.b, search_bound=args.bound)
    out = {
        "kind": res.kind,
        "automorphism": list(res.automorphism) if res.automorphism is not None else None,
        "witness": graph_to_json(res.witness) if res.witness is not None else None,
        "counts": list(res.counts) if res.counts is not None else None,
    }
    return out, res.kind


_PRODUCTS = {"direct": direct_product, "cartesian": cartesian_product, "diamond": diamond_product}


def cmd_products(args):
    g = _PRODUCTS[args.kind](_graph(args.a, args), _graph(args.b, args))
    return graph_to_json(g), f"{args.kind} product: {g.n} vertices, {len(g.edges)} edges"


def cmd_square(args):
    g = boolean_square(_graph(args.g, args))
    return graph_to_json(g), f"{len(g.edges)} edges"


def cmd_skeleton(args):
    g = cartesian_skeleton(_graph(args.g, args))
    return graph_to_json(g), f"{len(g.edges)} edges"


def cmd_factor(args):
    g = _graph(args.g, args)
    fac = cartesian_prime_factorization(g) if args.kind == "cartesian" else diamond_prime_factorization(g)
    out = {"kind": fac.kind, "factors": [graph_to_json(f) for f in fac.factors], "witness": list(fac.witness)}
    return out, f"{len(fac.factors)} prime factor(s)"


def cmd_zgraph(args):
    parts = find_thick_z(_graph(args.h, args))
    if parts is None:
        return {"found": False}, "complete bipartite: no thick Z-subgraph"
    a, b, c, d = _sets(*parts)
    return {"found": True, "A": a, "B": b, "C": c, "D": d}, f"A={a} B={b} C={c} D={d}"


def cmd_gadgets(args):
    z = _decomposition(_graph(args.h, args), args)
    return decomposition_to_json(z), f"gadgets of size {z.gadget_l.graph.n} and {z.gadget_r.graph.n}"


def cmd_bis(args):
    v = zbis_value(_graph(args.g, args), args.alpha, args.beta, args.p)
    return {"value": v, "p": args.p}, f"Z = {v}"


def cmd_reduce_bis(args):
    h = _graph(args.h, args)
    z = _decomposition(h, args)
    gp = build_bis_reduction(_graph(args.g, args), h, z)
    return graph_to_json(gp), f"G' has {gp.n} vertices"


def cmd_verify_bis(args):
    h = _graph(args.h, args)
    z = _decomposition(h, args)
    rep = verify_reduction(_graph(args.g, args), h, z, args.p, debug=args.debug)
    out = rep.to_json()
    if args.debug:
        out["debug"] = {
            "ok": rep.debug["ok"],
            "outside": rep.debug["outside"],
            "classes": [[list(k), v] for k, v in sorted(rep.debug["classes"].items())],
        }
    if not rep.equal:
        raise VerificationFailed(json.dumps(out, sort_keys=True))
    return out, f"{rep.lhs} == {rep.rhs} (mod {rep.p})"


def cmd_mpp_eval(args):
    gad = _graph(args.gadget, args, pinned=True)
    rel = mpp_eval(gad, _graph(args.h, args), args.p)
    out = {
        "arity": rel.arity,
        "tuples": sorted(list(t) for t in rel.tuples),
        "strict": rel.strict,
        "counts": [[list(t), c] for t, c in rel.counts],
    }
    return out, f"{len(rel.tuples)} tuple(s), strict={rel.strict}"


def cmd_strictify(args):
    g = strictify(_graph(args.gadget, args, pinned=True), args.p)
    return graph_to_json(g), f"{g.graph.n} vertices"


def cmd_constants_reduce(args):
    try:
        inst = TableCSP.from_json(_load(args.instance))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed instance: {exc}")
    h = _graph(args.h, args)
    if h.n > args.max_bell:
        raise InputError(f"target has {h.n} vertices, above --max-bell {args.max_bell}")
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            r = constants_reduce(inst, h, args.p, transcript=fh)
    else:
        r = constants_reduce(inst, h, args.p)
    return {"residue": r, "p": args.p}, f"count = {r} (mod {args.p})"


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="human summary on stderr")
    common.add_argument("--max-bell", type=int, default=DEFAULT_MAX_BELL, help="largest partition ground set")
    common.add_argument("--max-n", type=int, default=DEFAULT_MAX_N, help="largest accepted input graph")

    parser = argparse.ArgumentParser(prog="modhom", description="Graph homomorphism counting modulo primes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, *flags):
        sp = sub.add_parser(name, parents=[common], help=help)
        for flag in flags:
            flag(sp)
        sp.set_defaults(func=func)
        return sp

    def f(name, **kw):
        return lambda sp: sp.add_argument(name, **kw)

    g = f("--g", required=True, help="source graph JSON")
    h = f("--h", required=True, help="target graph JSON")
    p = f("--p", type=_prime, required=True, help="prime modulus")
    bound = f("--bound", type=int, default=4, help="largest gadget size tried")
    zfile = f("--z", default=None, help="decomposition JSON with A, B, C, D (and optional gadgets)")

    add("count", cmd_count, "exact hom(g, h)", g, h)
    add("count-mod", cmd_count_mod, "hom(g, h) mod p", g, h, p)
    add("inj", cmd_inj, "injective homomorphisms", g, h)
    add("aut", cmd_aut, "|Aut(h)| via Möbius inversion", h)
    add("preduce", cmd_preduce, "p-reduced form", h, p,
        f("--choose", choices=["lex", "last", "random"], default="lex"))
    add("classify", cmd_classify, "tractable or hard mod p", h, p)
    add("count-tractable", cmd_count_tractable, "closed-form count for tractable targets", g, h)
    add("mobius-inj", cmd_mobius_inj, "injective count from quotient hom counts", g, h)
    add("indist", cmd_indist, "are two vertices indistinguishable", h,
        f("--a", type=int, required=True), f("--b", type=int, required=True),
        f("--bound", type=int, default=3))
    add("products", cmd_products, "graph products", f("--a", required=True), f("--b", required=True),
        f("--kind", choices=sorted(_PRODUCTS), default="diamond"))
    add("square", cmd_square, "Boolean square", g)
    add("skeleton", cmd_skeleton, "Cartesian skeleton", g)
    add("factor", cmd_factor, "prime factorization", g,
        f("--kind", choices=["cartesian", "diamond"], default="cartesian"))
    add("zgraph", cmd_zgraph, "find an induced thick Z-subgraph", h)
    add("gadgets", cmd_gadgets, "bounded search for non-degeneracy gadgets", h, p, bound, zfile)
    add("bis", cmd_bis, "weighted independent set sum", g, p,
        f("--alpha", type=int, default=1), f("--beta", type=int, default=1))
    add("reduce-bis", cmd_reduce_bis, "build the reduction instance G'", g, h, p, bound, zfile)
    add("verify-bis", cmd_verify_bis, "check the reduction congruence", g, h, p, bound, zfile,
        f("--debug", action="store_true", help="also check the per-class residues"))
    add("mpp-eval", cmd_mpp_eval, "relation defined by a gadget mod p", f("--gadget", required=True), h, p)
    add("strictify", cmd_strictify, "make every nonzero count 1 mod p", f("--gadget", required=True), p)
    add("constants-reduce", cmd_constants_reduce, "count with constants via a constant-free oracle",
        f("--instance", required=True), h, p, f("--transcript", default=None))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        payload, summary = args.func(args)
    except SearchExhausted as exc:
        print(json.dumps({"error": "search_exhausted", "message": str(exc)}, sort_keys=True))
        if args.verbose:
            print(f"search exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except VerificationFailed as exc:
        print(str(exc) if str(exc).startswith("{") else json.dumps({"error": "verification_failed"}))
        if args.verbose:
            print("verification failed", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, SortError, KeyError, TypeError) as exc:
        print(json.dumps({"error": "invalid_input", "message": str(exc)}, sort_keys=True))
        if args.verbose:
            print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps(payload, sort_keys=True))
    if args.verbose:
        print(f"{args.command}: {summary}", file=sys.stderr)
    return EXIT_OK


run = main

if __name__ == "__main__":
    sys.exit(main())
