"""Command-line entry point.

Exit codes: 0 success or affirmative answer, 1 usage error, 2 certified
negative answer, 3 internal consistency failure.
"""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import bilinear, certify, engine, rep, secant
from .tensor_core import load_tensor

OK, USAGE, NEGATIVE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def resolve_tensor(ref):
    """A named tensor (matmul:m,n,p, w-state, ghz, ...) or a JSON file."""
    if os.path.exists(ref):
        return load_tensor(ref)
    try:
        return bilinear.named_target(ref)
    except ValueError:
        raise UsageError(f"{ref!r} is neither a tensor file nor a named tensor")


def resolve_decomposition(ref):
    if os.path.exists(ref):
        with open(ref) as fh:
            rec = json.load(fh)
        dec = bilinear.Decomposition.from_json(rec)
        return (bilinear.VSplitDecomposition(dec, rec["split"]) if "split" in rec else dec), rec.get("target")
    try:
        return bilinear.catalog(ref), bilinear.catalog_record(ref).get("target")
    except bilinear.UnknownCatalogEntry as exc:
        raise UsageError(str(exc.args[0]))


def _emit(args, record, text):
    if args.json:
        print(json.dumps(record, default=str))
    else:
        print(text)


def _json_number(x):
    return "inf" if x == math.inf else x


# --- subcommands ----------------------------------------------------------

def cmd_verify(args):
    dec, default_target = resolve_decomposition(args.alg)
    target_ref = args.target or default_target
    if target_ref is None:
        raise UsageError("no --target given and the algorithm names none")
    T = resolve_tensor(target_ref)
    if isinstance(dec, bilinear.VSplitDecomposition):
        kind, ok, order = "multiplicative", bilinear.mult_complexity_verify(dec, T), None
    elif dec.is_exact():
        kind, ok, order = "exact", bilinear.verify_exact(dec, T), None
    else:
        kind = "border"
        ok, order = bilinear.verify_border(dec, T)
    record = {"alg": args.alg, "target": target_ref, "kind": kind, "terms": len(dec),
              "ok": ok, "order": _json_number(order)}
    text = f"{args.alg} {'computes' if ok else 'does NOT compute'} {target_ref} ({kind}, {len(dec)} terms"
    text += f", remainder order {order})" if order is not None else ")"
    _emit(args, record, text)
    return OK if ok else NEGATIVE


def cmd_mul(args):
    name = "standard-2x2" if args.base == "standard" else args.base
    base = bilinear.catalog(name)
    cutoff = args.cutoff if args.cutoff is not None else engine.DEFAULT_CUTOFF[args.mode]
    rng = np.random.default_rng(args.seed)
    if args.mode == engine.EXACT:
        A, B = engine.DenseMatrix.random_integer(args.n, rng), engine.DenseMatrix.random_integer(args.n, rng)
    else:
        A, B = engine.DenseMatrix.random_unit(args.n, rng), engine.DenseMatrix.random_unit(args.n, rng)
    start = time.perf_counter()
    C, stats = engine.recursive_mul(A, B, base, cutoff=cutoff, threads=args.threads)
    wall = time.perf_counter() - start
    if args.check and args.mode == engine.EXACT:
        if C != engine.classical_mul(A, B)[0]:
            print("recursive product differs from the classical product", file=sys.stderr)
            return INTERNAL
    if args.count_only:
        _emit(args, {"mults": stats.mults}, str(stats.mults))
        return OK
    record = {"n": args.n, "base": args.base, "cutoff": cutoff, "mults": stats.mults,
              "adds": stats.adds, "wall": round(wall, 6)}
    _emit(args, record, f"{args.n},{args.base},{cutoff},{stats.mults},{stats.adds},{wall:.6f}")
    return OK


def cmd_certify(args):
    T = resolve_tensor(args.tensor)
    report = certify.border_rank_bounds(T, seed=args.seed, triples=args.triples)
    bound = report.maximum
    method = report.best_method()
    record = {"tensor": args.tensor, "r": args.r, "lower_bound": bound, "method": method,
              "flattening": report.flattening, "multilinear": report.multilinear,
              "commutator": report.commutator, "p_matrix": report.p_matrix,
              "certified_above_r": bound > args.r}
    if bound > args.r:
        text = f"border rank > {args.r} certified by {method} (lower bound {bound})"
        _emit(args, record, text)
        return NEGATIVE
    _emit(args, record, f"no obstruction to border rank <= {args.r} (best lower bound {bound}, {method})")
    return OK


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _resolve_group(ref):
    if os.path.exists(ref):
        return certify.FiniteGroup.from_json(_load_json(ref))
    for G in certify.small_groups():
        if G.name == ref:
            return G
    raise UsageError(f"{ref!r} is neither a group file nor a built-in group name")


def cmd_tpp(args):
    G = _resolve_group(args.group)
    if args.search:
        if len(args.search) != 3:
            raise UsageError("--search needs three sizes")
        found = certify.find_tpp_triple(G, args.search)
        record = {"group": G.name, "order": G.order, "sizes": args.search,
                  "triple": None if found is None else [list(s) for s in found]}
        if found is None:
            _emit(args, record, f"no TPP triple of sizes {tuple(args.search)} exists in {G.name}")
            return NEGATIVE
        _emit(args, record, f"TPP triple in {G.name}: {found[0]} {found[1]} {found[2]}")
        return OK
    if not args.sets:
        raise UsageError("tpp needs --sets or --search")
    sets = _load_json(args.sets)
    if isinstance(sets, dict):
        sets = [sets["S1"], sets["S2"], sets["S3"]]
    degrees = _load_json(args.degrees) if args.degrees else None
    inst = certify.TPPInstance(G, tuple(sets[0]), tuple(sets[1]), tuple(sets[2]), degrees)
    holds = certify.tpp_check(inst)
    record = {"group": G.name, "holds": holds}
    text = f"TPP {'holds' if holds else 'fails'} for sets of sizes {[len(s) for s in sets]} in {G.name}"
    if holds and (degrees is not None or G.is_abelian()):
        bound = certify.tpp_omega_bound(inst)
        record["omega_bound"] = _json_number(bound)
        text += f"; omega <= {bound}"
    _emit(args, record, text)
    return OK if holds else NEGATIVE


def cmd_secant_dim(args):
    v = secant.VarietySpec.parse(args.variety)
    report = secant.secant_dim(v, args.r, trials=args.trials, seed=args.seed)
    row = report.row()
    _emit(args, row, f"{row['variety']} r={row['r']} observed={row['observed']} "
                     f"expected={row['expected']} defect={row['defect']}")
    return OK


def cmd_modules(args):
    labels = rep.decompose_symd(args.shape, args.degree)
    if args.filter:
        wanted = tuple(rep.Partition.of(p) for p in args.filter.split(","))
        labels = [lab for lab in labels if lab.partitions == wanted]
    rows = [{"partitions": [str(p) for p in lab.partitions], "multiplicity": lab.multiplicity,
             "dimension": lab.dimension(args.shape)} for lab in labels]
    if args.json:
        print(json.dumps(rows))
    else:
        for row in rows:
            print(";".join(row["partitions"]) + f";{row['multiplicity']};{row['dimension']}")
    return OK


def cmd_ideal_dim(args):
    v = rep.SecantSpec.parse(args.variety)
    dim = rep.ideal_dim_numeric(v, args.degree, samples=args.samples, seed=args.seed)
    record = {"variety": args.variety, "degree": args.degree, "dimension": dim, "upper_bound": True}
    _emit(args, record, f"dim I_{args.degree} = {dim} (exact upper bound; equal for generic samples)")
    return OK


def cmd_classify(args):
    T = resolve_tensor(args.tensor)
    cls = certify.classify_222(T)
    _emit(args, {"tensor": args.tensor, "class": cls.value}, cls.value)
    return OK


def cmd_phylo(args):
    T = resolve_tensor(args.tensor)
    ok = certify.phylo_necessary(T, args.topology)
    _emit(args, {"topology": args.topology, "consistent": ok},
          f"flattening test for {args.topology}: {'passed' if ok else 'failed'}")
    return OK if ok else NEGATIVE


def cmd_limit_plane(args):
    dec, default_target = resolve_decomposition(args.alg)
    if isinstance(dec, bilinear.VSplitDecomposition):
        dec = dec.decomposition
    basis, order = secant.limit_plane(secant.CurveFamily.from_decomposition(dec))
    record = {"alg": args.alg, "order": order, "dimension": len(basis)}
    text = f"limit plane of {args.alg}: dimension {len(basis)}, first nonzero wedge coefficient at order {order}"
    target_ref = args.tensor or default_target
    if target_ref:
        T = resolve_tensor(target_ref)
        inside = secant.in_span(T.entries, basis)
        record["contains"] = {target_ref: inside}
        text += f"; {'contains' if inside else 'does not contain'} {target_ref}"
    _emit(args, record, text)
    return OK


def _subspace(text, dim):
    if text in (None, "none", "0"):
        return ()
    if text == "full":
        return tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim))
    idx = _ints(text)
    if any(not 0 <= i < dim for i in idx):
        raise UsageError(f"coordinate index out of range 0..{dim - 1}")
    return tuple(tuple(int(i == j) for j in range(dim)) for i in idx)


def cmd_separation(args):
    dec, _ = resolve_decomposition(args.alg)
    if isinstance(dec, bilinear.VSplitDecomposition):
        dec = dec.decomposition
    a, b, c = dec.shape
    q = bilinear.SeparationQuery(dec, _subspace(args.a1, a), _subspace(args.b1, b), _subspace(args.c1, c))
    found = bilinear.separation_check(q)
    if found is None:
        _emit(args, {"alg": args.alg, "separation": None}, "no separating splitting exists")
        return NEGATIVE
    record = {"alg": args.alg, "parts": [list(p) for p in found.parts], "bound": found.bound,
              "length": len(dec)}
    _emit(args, record, f"splitting {found.parts} separates; length {len(dec)} >= {found.bound}")
    return OK


# --- parser ---------------------------------------------------------------

def build_parser():
    p = _Parser(prog="matmul-lab", description="Geometry and complexity of matrix multiplication.")
    p.add_argument("--json", action="store_true", help="emit JSON records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("verify", help="check a decomposition against a target tensor")
    s.add_argument("--alg", required=True, help="catalog name or decomposition JSON")
    s.add_argument("--target", help="named tensor or tensor JSON (defaults to the catalog target)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("mul", help="recursive matrix multiplication")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--base", default="strassen-2x2", choices=["strassen-2x2", "standard", "standard-2x2"])
    s.add_argument("--cutoff", type=int)
    s.add_argument("--mode", default=engine.EXACT, choices=[engine.EXACT, engine.MACHINE])
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--check", action="store_true", help="compare with the classical product")
    s.set_defaults(func=cmd_mul)

    s = sub.add_parser("certify", help="border rank lower bounds")
    s.add_argument("--tensor", required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--triples", type=int, default=20)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("tpp", help="triple product property")
    s.add_argument("--group", required=True, help="group JSON or built-in name such as Z7")
    s.add_argument("--sets")
    s.add_argument("--degrees")
    s.add_argument("--search", type=_ints, help="exhaustive search for sizes n1,n2,n3")
    s.set_defaults(func=cmd_tpp)

    s = sub.add_parser("secant-dim", help="Terracini dimension of a secant variety")
    s.add_argument("--variety", required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--trials", type=int, default=3)
    s.set_defaults(func=cmd_secant_dim)

    s = sub.add_parser("modules", help="isotypic decomposition of S^d(A_1 x ... x A_n)")
    s.add_argument("--shape", type=_ints, required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--filter")
    s.set_defaults(func=cmd_modules)

    s = sub.add_parser("ideal-dim", help="numeric dimension of an ideal in one degree")
    s.add_argument("--variety", required=True, help="e.g. secant:2:segre:2,2,3")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--samples", type=int)
    s.set_defaults(func=cmd_ideal_dim)

    s = sub.add_parser("classify", help="orbit class of a 2x2x2 tensor")
    s.add_argument("--tensor", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("phylo", help="flattening test for a four-leaf tree")
    s.add_argument("--tensor", required=True)
    s.add_argument("--topology", required=True, choices=sorted(certify.TOPOLOGIES))
    s.set_defaults(func=cmd_phylo)

    s = sub.add_parser("limit-plane", help="limit of the span of an eps-family")
    s.add_argument("--alg", required=True)
    s.add_argument("--tensor", help="tensor to test for membership (defaults to the catalog target)")
    s.set_defaults(func=cmd_limit_plane)

    s = sub.add_parser("separation", help="search for a separating splitting")
    s.add_argument("--alg", required=True)
    s.add_argument("--a1", help="'full', 'none' or coordinate indices")
    s.add_argument("--b1")
    s.add_argument("--c1")
    s.set_defaults(func=cmd_separation)
    return p


def dispatch(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return USAGE
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE
    except SystemExit as exc:
        return OK if exc.code in (0, None) else USAGE
    except (rep.ConsistencyError, AssertionError) as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return INTERNAL
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
