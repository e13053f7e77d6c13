"""Command line interface: ``relcomm <command> ...``.

Exit codes: 0 when every check passed (or was skipped), 1 when a check
failed, 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from typing import Optional

import numpy as np

from . import verify as V
from .brackets import all_bracketings, catalan
from .elementary import (
    certify_relative_elementary,
    factor_unitriangular,
    format_word,
    parse_word,
    rewrite_conjugated_generator,
    whitehead_factor,
    word_parameters_in,
)
from .matrices import MatSpace
from .report import any_failed, emit_report
from .rings import all_ideals, parse_ideal, parse_ring, verify_stable_rank_one

SUITES = {
    "habdank": "double formulas: the five inclusions",
    "standard": "double formulas: [E(A,I),GL(A)] and [E(A),GL(A,I)]",
    "generalized": "double formulas: [E(A,I),GL(A,J)] = [E,E]",
    "mason-stothers": "double formulas: [GL(A,I),GL(A,J)] = [E,E]",
    "comaximal": "double formulas: comaximal I, J",
    "full-congruence": "double formulas: full congruence subgroup",
    "double": "all six double-formula checks",
    "generators": "generator theorems for [E(A,I),E(A,J)]",
    "multiple": "multiple commutator formula for the configured bracketing",
    "double-reduction": "reduction of a multiple commutator to a double one",
    "cut-point": "equal subgroups for trees with the same cut point",
    "probe-bracketing": "exploratory: left- against right-normed commutators",
    "k1": "surjective and injective stability for GL(2,R,I)",
    "relations": "elementary relations, conjugation identity, free-group identities",
    "oracle": "seeded normal closure against the all-pairs commutator set",
    "unitary": "form-ring axioms, Steinberg relations and the unitary chain",
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def _split_list(text: Optional[str]):
    if not text:
        return []
    parts = [p.strip() for line in text.splitlines() for p in line.split("|")]
    return [p for p in parts if p]


def load_config(path: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    if "instance" not in cp:
        raise UsageError(f"{path}: missing [instance] section")
    inst = cp["instance"]
    run = cp["run"] if "run" in cp else {}
    try:
        return {
            "ring": inst.get("ring"),
            "n": int(inst.get("n", "3")),
            "ideals": _split_list(inst.get("ideals")),
            "form": inst.get("form"),
            "form_ideals": _split_list(inst.get("form_ideals")),
            "suite": run.get("suite"),
            "mode": run.get("mode", "exhaustive"),
            "seed": int(run.get("seed", "0")),
            "samples": int(run.get("samples", "10000")),
            "cap": int(run.get("cap", str(V.ENUM_CAP))),
            "bracketing": run.get("bracketing", "left"),
        }
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def run_suite(suite: str, conf: dict, cfg: V.RunConfig):
    """Records for one suite on the configured instance."""
    if suite == "unitary":
        if not conf.get("form"):
            raise UsageError("the unitary suite needs form = ... in [instance]")
        return V.verify_unitary(conf["form"], conf["n"], conf["form_ideals"], cfg)
    if not conf.get("ring"):
        raise UsageError("[instance] needs ring = ...")
    if suite == "k1":
        ideal = conf["ideals"][0] if conf["ideals"] else "(1)"
        return V.verify_k1_stability(conf["ring"], ideal, cfg)
    inst = V.LinearInstance(conf["ring"], conf["n"], conf["ideals"], cfg)
    if suite in V.DOUBLE_CHECKS:
        return V.verify_double_formulas(inst, [suite], cfg)
    if suite == "double":
        return V.verify_double_formulas(inst, None, cfg)
    if suite == "generators":
        return V.verify_generator_theorems(inst, cfg)
    if suite == "multiple":
        return V.verify_multiple_formula(inst, conf["bracketing"], cfg)
    if suite == "double-reduction":
        return V.verify_double_reduction(inst, conf["bracketing"], cfg)
    if suite == "cut-point":
        return V.verify_cut_point_invariance(inst, cfg)
    if suite == "probe-bracketing":
        return V.probe_bracketing_mismatch(inst, cfg)
    if suite == "relations":
        return V.verify_relations(inst, cfg)
    if suite == "oracle":
        return V.verify_oracle(inst, cfg)
    raise UsageError(f"unknown suite {suite!r}")


# ---------------------------------------------------------------------------
# commands


def cmd_ring_show(args, out):
    R = parse_ring(args.spec)
    out.write(f"ring        {R.descriptor}\n")
    out.write(f"size        {R.size}\n")
    out.write(f"commutative {R.commutative}\n")
    out.write(f"units       {len(R.units())}\n")
    if R.size <= 64:
        ok, _ = verify_stable_rank_one(R)
        out.write(f"sr = 1      {ok}\n")
    if R.size <= 256:
        ideals = all_ideals(R)
        out.write(f"ideals      {len(ideals)}\n")
        for I in ideals:
            out.write(f"  {I.fmt():<24} size {I.size}\n")
    return 0


def _space_ideal(args):
    R = parse_ring(args.ring)
    return MatSpace(R, args.n), parse_ideal(R, args.ideal)


def cmd_factor(args, out):
    S, I = _space_ideal(args)
    if args.kind == "triangular":
        if not args.matrix:
            raise UsageError("factor triangular needs --matrix")
        g = S.parse(args.matrix)
        w = factor_unitriangular(S, g, I, upper=not args.lower)
    elif args.kind == "whitehead":
        if not (args.x and args.y):
            raise UsageError("factor whitehead needs --x and --y")
        x, y = S.parse(args.x), S.parse(args.y)
        w = whitehead_factor(S, x, y, I)
        xi, yi = S.inv(x), S.inv(y)
        g = w.space.eye.copy()
        g[: S.n, : S.n] = S.mul(S.mul(x, y), S.mul(xi, yi))
    else:
        g = S.parse(args.matrix)
        w = certify_relative_elementary(S, g, I)
        if w is None:
            out.write("not in E(n, A, I): fails the level or determinant condition\n")
            return 1
    ok = np.array_equal(w.eval(), g) and word_parameters_in(w, I)
    out.write(format_word(w) + "\n")
    out.write(f"# {len(w)} letters, evaluation {'matches' if ok else 'DIFFERS'}\n")
    return 0 if ok else 1


def cmd_rewrite(args, out):
    S, I = _space_ideal(args)
    c = parse_word(S, "\n".join(args.conj or []))
    alpha = S.R.parse(args.alpha)
    if alpha not in I:
        raise UsageError(f"alpha = {args.alpha} is not in {I.fmt()}")
    w = rewrite_conjugated_generator(c, args.i, args.j, alpha)
    C = c.eval()
    target = S.mul(S.mul(C, S.elementary(args.i - 1, args.j - 1, alpha)), S.inv(C))
    ok = np.array_equal(w.eval(), target) and word_parameters_in(w, I)
    out.write(format_word(w) + "\n")
    out.write(f"# {len(w)} z-letters, evaluation {'matches' if ok else 'DIFFERS'}\n")
    return 0 if ok else 1


def _cfg_from(conf, args):
    return V.RunConfig(
        mode=args.mode or conf["mode"],
        seed=conf["seed"] if args.seed is None else args.seed,
        samples=conf["samples"] if args.samples is None else args.samples,
        cap=conf["cap"] if args.cap is None else args.cap,
        bracketing=args.bracketing or conf["bracketing"],
        unsafe_n2=args.unsafe_n2,
    )


def cmd_verify(args, out):
    conf = load_config(args.config)
    suite = args.suite
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    try:
        cfg = _cfg_from(conf, args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        records = run_suite(suite, conf, cfg)
    except V.HypothesisError as exc:
        raise UsageError(str(exc)) from None
    emit_report(records, args.emit, out, timings=args.timings)
    return 1 if any_failed(records) else 0


def cmd_search(args, out):
    cfg = V.RunConfig(seed=args.seed or 0)
    records = V.search_nonassociativity(args.rings, n=args.n, cfg=cfg)
    emit_report(records, args.emit, out)
    for r in records:
        if r.witness:
            out.write(f"{r.check_id} {r.instance['ring']}: {r.witness}\n")
    return 1 if any_failed(records) else 0


def cmd_bracketings(args, out):
    trees = all_bracketings(args.m)
    for t in trees:
        cut = t.cut_point if not t.is_leaf else "-"
        out.write(f"{t}  cut point {cut}\n")
    expected = catalan(args.m)
    out.write(f"{len(trees)} trees (Catalan number {expected})\n")
    return 0 if len(trees) == expected else 1


# ---------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="relcomm", description="Relative commutator calculus over finite rings.")
    sub = p.add_subparsers(dest="command", required=True)

    ring = sub.add_parser("ring", help="ring utilities")
    rsub = ring.add_subparsers(dest="ring_command", required=True)
    show = rsub.add_parser("show", help="size, units and ideals of a ring")
    show.add_argument("spec", help="ring descriptor, e.g. zmod:36 or tri:zmod:2,2")
    show.set_defaults(func=cmd_ring_show)

    fac = sub.add_parser("factor", help="constructive factorisations")
    fac.add_argument("kind", choices=["triangular", "whitehead", "certificate"])
    fac.add_argument("--ring", required=True)
    fac.add_argument("--n", type=int, required=True)
    fac.add_argument("--ideal", default="(1)")
    fac.add_argument("--matrix", help='rows separated by ";", e.g. "[1 2 0; 0 1 0; 0 0 1]"')
    fac.add_argument("--lower", action="store_true", help="lower unitriangular input")
    fac.add_argument("--x")
    fac.add_argument("--y")
    fac.set_defaults(func=cmd_factor)

    rw = sub.add_parser("rewrite", help="conjugate of e_ij(alpha) as z-letters")
    rw.add_argument("--ring", required=True)
    rw.add_argument("--n", type=int, required=True)
    rw.add_argument("--ideal", default="(1)")
    rw.add_argument("--conj", action="append", help='one conjugator letter per flag, e.g. "E 2 1 3"')
    rw.add_argument("--i", type=int, required=True)
    rw.add_argument("--j", type=int, required=True)
    rw.add_argument("--alpha", required=True)
    rw.set_defaults(func=cmd_rewrite)

    ver = sub.add_parser("verify", help="run a theorem suite on a configured instance")
    ver.add_argument("suite", help=", ".join(SUITES))
    ver.add_argument("--config", required=True)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--samples", type=int)
    ver.add_argument("--cap", type=int)
    ver.add_argument("--emit", help="write line-delimited records here")
    ver.add_argument("--mode", choices=["exhaustive", "randomized"])
    ver.add_argument("--bracketing", help='"left", "right" or a tree such as "[[0,1],2]"')
    ver.add_argument("--unsafe-n2", action="store_true", help="allow n = 2 (records become skipped-hypotheses)")
    ver.add_argument("--timings", action="store_true", help="keep elapsed times in the report")
    ver.set_defaults(func=cmd_verify)

    se = sub.add_parser("search", help="searches for counterexamples")
    ssub = se.add_subparsers(dest="search_command", required=True)
    na = ssub.add_parser("nonassoc", help="non-associativity of the symmetrised product and of commutators")
    na.add_argument("--rings", nargs="+", default=["zmod:4", "zmod:8", "tri:zmod:2,2"])
    na.add_argument("--n", type=int, default=3)
    na.add_argument("--seed", type=int)
    na.add_argument("--emit")
    na.set_defaults(func=cmd_search)

    br = sub.add_parser("bracketings", help="list all bracketings with their cut points")
    br.add_argument("--m", type=int, required=True)
    br.set_defaults(func=cmd_bracketings)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"relcomm: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"relcomm: error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
