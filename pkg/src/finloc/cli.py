"""Command line harness: instance checks, constructions, suites and generators.

Exit status is 0 when every executed property passes, 1 when one fails and 2
on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import constructions as cons
from . import largeness as lg
from . import relations as rel
from . import randomname as rn
from .creatures import (
    ConditionFragment,
    Creature,
    Derivation,
    fragment_leq,
    shrink_contract,
    shrink_creature_traced,
    validate_creature,
    weight,
)
from .errors import FinlocError, InvalidInstance
from .finsets import BlockFamily, WSet
from .generate import gen_instance
from .suites import SUITES, ExperimentConfig, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _load(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InvalidInstance(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InvalidInstance(f"{path} is not valid JSON: {e}") from e


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True)


class Output:
    """Collects JSON results and writes them to ``--out`` or stdout."""

    def __init__(self, args: argparse.Namespace) -> None:
        self.path = getattr(args, "out", None)
        self.lines: list[str] = []

    def emit(self, obj: Any) -> None:
        self.lines.append(_dump(obj))

    def close(self) -> None:
        text = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


# -- check / invariant --------------------------------------------------------


def cmd_check(args: argparse.Namespace, out: Output) -> int:
    data = _load(args.inp)
    X = WSet.from_json(data["X"])
    kind = args.relation
    if kind in ("rforall", "rexists"):
        F = BlockFamily.from_json(data["F"])
        fn = rel.eval_R_forall_k if kind == "rforall" else rel.eval_R_exists_k
        rep = fn(X, F, args.k)
        verdict = rep.holds_almost_always() if kind == "rforall" else rep.holds_infinitely_often(args.threshold)
        out.emit({"relation": kind, "k": args.k, "report": rep.to_json(), "verdict": verdict})
        return EXIT_PASS
    Y = WSet.from_json(data["Y"])
    if kind == "sk":
        rep = rel.eval_S_k(X, Y, args.k, args.rich)
        out.emit({"relation": kind, "k": args.k, "report": rep.to_json(), "verdict": rep.holds_infinitely_often(args.threshold)})
    elif kind == "splus":
        run = rel.eval_S_plus(X, Y, args.k, args.rich)
        out.emit({"relation": kind, "m": args.k, "start": run.start, "verdict": run.holds})
    elif kind == "spluseps":
        rep = rel.eval_S_plus_eps(X, Y, args.rich)
        out.emit({"relation": kind, "report": rep.to_json(), "verdict": rep.holds_infinitely_often(args.threshold)})
    else:
        phi = [int(v) for v in data["phi"]]
        rep = rel.eval_S_plus_phi(X, Y, phi, args.rich)
        out.emit({"relation": kind, "report": rep.to_json(), "verdict": rep.holds_infinitely_often(args.threshold)})
    return EXIT_PASS


def cmd_invariant(args: argparse.Namespace, out: Output) -> int:
    inst = rel.FiniteRelationInstance.from_json(_load(args.inp))
    v = rel.duality_values(inst)
    ok = v["d"] == v["b_dual"] and v["b"] == v["d_dual"]
    out.emit({**v, "dom_rng": inst.satisfies_dom_rng(), "identities_hold": ok})
    return EXIT_PASS if ok else EXIT_FAIL


# -- constructions ---------------------------------------------------------------------


def cmd_construct(args: argparse.Namespace, out: Output) -> int:
    data = _load(args.inp)
    which = args.which
    if which == "escape-g":
        F = BlockFamily.from_json(data["F"])
        out.emit({"F": F.to_json(), "g": cons.partition_to_escaping_g(F)})
    elif which == "intervals":
        P = cons.g_to_interval_partition([int(v) for v in data["g"]], int(data["k"]), int(data["length"]))
        out.emit({"cutpoints": list(P.cutpoints), "blocks": [[a, b] for a, b in zip(P.cutpoints, P.cutpoints[1:])]})
    elif which == "meabou":
        X, F = WSet.from_json(data["X"]), BlockFamily.from_json(data["F"])
        g = [frozenset(int(v) for v in G) for G in data["g"]]
        res = cons.meabou_partition(X, F, g)
        xs = X.as_set()
        out.emit({"result": res.to_json(), "disjoint_from_X": [n for n, b in enumerate(res.blocks) if not b & xs]})
    elif which == "splusphi":
        X, Y0 = WSet.from_json(data["X"]), WSet.from_json(data["Y0"])
        phi = [int(v) for v in data["phi"]]
        if data.get("oracle", "given") == "perfect":
            g: dict[int, frozenset[int]] = cons.pipeline_targets(X, phi, Y0)[2]
        else:
            g = {int(p): frozenset(int(v) for v in vals) for p, vals in data.get("g", {}).items()}
        tr = cons.s_plus_phi_pipeline(X, phi, Y0, g)
        wits = rel.eval_S_plus_phi(X, tr.Y, phi, strict=False)
        ok = all(s.verified for s in tr.steps)
        out.emit({"trace": tr.to_json(), "witnesses": wits.to_json(), "steps_verified": ok})
        return EXIT_PASS if ok else EXIT_FAIL
    else:
        x = cons.BranchPrefix(tuple(int(b) for b in data["bits"]))
        res = cons.lemat_witness(x, BlockFamily.from_json(data["F"]), int(data["k"]))
        out.emit(res.to_json())
    return EXIT_PASS


# -- largeness ---------------------------------------------------------------------------


def cmd_largeness(args: argparse.Namespace, out: Output) -> int:
    X = WSet.from_json(_load(args.x))
    U = lg.FamilyUniverse.from_json(_load(args.universe))
    v = lg.is_lk_large(X, U, args.l, args.k, args.tail)
    out.emit({"large": v.large, "family": v.family, "block": v.block, "meet": v.meet})
    return EXIT_PASS


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_transfer(args: argparse.Namespace, out: Output) -> int:
    if args.exhaustive:
        cfg = ExperimentConfig(seed=args.seed, window=args.window, l_max=args.lmax, m_max=args.mmax)
        rep = run_suite("largeness", cfg, only=["transfer_oracle", "concat_transfer"])
        for line in rep.lines(args.timings):
            out.emit(line)
        return EXIT_PASS if rep.passed else EXIT_FAIL
    if args.K is None or args.X is None:
        raise InvalidInstance("give --exhaustive, or --K and --X for a single check")
    chk = lg.transfer_counting_check(_int_list(args.K), _int_list(args.X), args.l, args.k)
    out.emit({
        "holds": chk.holds,
        "every_subset_large": chk.every_subset_large,
        "few_missing": chk.few_missing,
        "subsets_checked": chk.subsets_checked,
        "failing_positions": None if chk.failing_positions is None else list(chk.failing_positions),
    })
    return EXIT_PASS if chk.holds else EXIT_FAIL


# -- creatures ---------------------------------------------------------------------------


def cmd_creature(args: argparse.Namespace, out: Output) -> int:
    data = _load(args.inp)
    try:
        t = Creature.from_json(data)
        validate_creature(t)
    except FinlocError as e:
        if args.action != "validate":
            raise
        out.emit({"valid": False, "error": type(e).__name__, "message": str(e)})
        return EXIT_FAIL
    if args.action == "validate":
        out.emit({"valid": True, "weight": weight(t), "nodes": len(t)})
        return EXIT_PASS
    if args.action == "weight":
        out.emit({"weight": weight(t)})
        return EXIT_PASS
    if args.b is None:
        raise InvalidInstance("creature shrink needs --b")
    B = WSet.from_json(_load(args.b))
    t2, trace = shrink_creature_traced(t, B, args.min_weight)
    c = shrink_contract(t, t2, B)
    out.emit({"creature": t2.to_json(), "contract": c.to_json(), "trace": trace.steps})
    return EXIT_PASS if c else EXIT_FAIL


def cmd_fragment(args: argparse.Namespace, out: Output) -> int:
    p = ConditionFragment.from_json(_load(args.p))
    q = ConditionFragment.from_json(_load(args.q))
    hints = None
    if args.hints:
        raw = _load(args.hints)
        hints = {int(i): Derivation.from_json(d, p.creatures) for i, d in raw.items()}
    v = fragment_leq(p, q, hints, args.depth_cap)
    out.emit(v.to_json())
    return EXIT_PASS


# -- measure -----------------------------------------------------------------------------


def cmd_measure(args: argparse.Namespace, out: Output) -> int:
    if args.what == "tail":
        out.emit({"m": args.m, "tail_bound": rn.fraction_json(rn.tail_bound(args.m))})
        return EXIT_PASS
    if args.family is None:
        raise InvalidInstance(f"measure {args.what} needs --family")
    F = BlockFamily.from_json(_load(args.family))
    model = rn.NameModel(args.depth)
    if args.what == "bound":
        fb = rn.localization_failure_bound(F, args.m, model)
        out.emit(fb.to_json())
        return EXIT_PASS if fb.within else EXIT_FAIL
    est = rn.mc_localization_rate(F, args.m, model, args.trials, args.seed)
    exact = rn.localization_failure_bound(F, args.m, model).value
    out.emit({**est.to_json(), "exact": rn.fraction_json(exact), "within_radius": abs(est.rate - float(exact)) <= est.radius})
    return EXIT_PASS


# -- suites and generators -----------------------------------------------------------


def _config(args: argparse.Namespace) -> ExperimentConfig:
    base: dict[str, Any] = _load(args.config) if args.config else {}
    base.setdefault("seed", args.seed)
    base.setdefault("window", args.window)
    for name in ("cases", "shrink_cases", "mc_trials", "workers"):
        v = getattr(args, name)
        if v is not None:
            base[name] = v
    return ExperimentConfig.from_json(base)


def cmd_suite(args: argparse.Namespace, out: Output) -> int:
    cfg = _config(args)
    names = list(SUITES) if args.name == "all" else [args.name]
    ok = True
    lines: list[dict[str, Any]] = []
    for name in names:
        rep = run_suite(name, cfg)
        ok &= rep.passed
        lines.extend(rep.lines(args.timings))
    for line in lines:
        if args.json or out.path:
            out.emit(line)
        elif line.get("summary"):
            out.lines.append(f"{'PASS' if line['all_pass'] else 'FAIL'} suite {line['suite']}: {line['passed']}/{line['properties']} properties")
        else:
            out.lines.append(f"  {'PASS' if line['pass'] else 'FAIL'} {line['property']} ({line['cases']} cases, {line['failures']} failures)")
    if args.figures:
        from .plotting import render_figures

        for path in render_figures(lines, args.figures, (cfg.tail_m_max, cfg.tail_R_max)):
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_gen(args: argparse.Namespace, out: Output) -> int:
    rng = np.random.default_rng(args.seed)
    opts: dict[str, Any] = {"k": args.k, "depth": args.depth, "covering": not args.non_covering, "min_size": args.min_size}
    if args.size is not None:
        opts["size"] = args.size
    for _ in range(args.count):
        out.emit(gen_instance(args.kind, rng, args.window, **opts))
    return EXIT_PASS


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--window", type=int, default=120, help="window / horizon size")
    common.add_argument("--out", help="write JSON output here instead of stdout")
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in reports")

    p = argparse.ArgumentParser(prog="finloc", description="Finite localization and creature toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="evaluate a relation on an instance")
    c.add_argument("--relation", required=True, choices=["rforall", "rexists", "sk", "splus", "spluseps", "splusphi"])
    c.add_argument("--k", type=int, default=1, help="k for R/S_k, run length m for splus")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--threshold", type=int, default=1, help="witnesses needed to read 'infinitely often'")
    c.add_argument("--rich", type=int, default=rel.RICH, help="points making a gap rich")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("invariant", parents=[common], help="d and b of a relation and its dual")
    c.add_argument("--in", dest="inp", required=True)
    c.set_defaults(func=cmd_invariant)

    c = sub.add_parser("construct", parents=[common], help="run a witness construction")
    c.add_argument("which", choices=["escape-g", "intervals", "meabou", "splusphi", "lemat"])
    c.add_argument("--in", dest="inp", required=True)
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("largeness", parents=[common], help="(l,k)-largeness against a family universe")
    c.add_argument("--l", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--x", required=True)
    c.add_argument("--universe", required=True)
    c.add_argument("--tail", type=int, default=0)
    c.set_defaults(func=cmd_largeness)

    c = sub.add_parser("transfer", parents=[common], help="counting transfer oracle")
    c.add_argument("--exhaustive", action="store_true")
    c.add_argument("--lmax", type=int, default=4)
    c.add_argument("--mmax", type=int, default=2)
    c.add_argument("--K", help="comma-separated K for a single check")
    c.add_argument("--X", help="comma-separated X for a single check")
    c.add_argument("--l", type=int, default=3)
    c.add_argument("--k", type=int, default=1)
    c.set_defaults(func=cmd_transfer)

    c = sub.add_parser("creature", parents=[common], help="validate, weigh or shrink a creature")
    c.add_argument("action", choices=["validate", "weight", "shrink"])
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--b", help="WSet JSON for shrink")
    c.add_argument("--min-weight", type=int, default=15)
    c.set_defaults(func=cmd_creature)

    c = sub.add_parser("fragment", parents=[common], help="order between condition fragments")
    c.add_argument("action", choices=["leq"])
    c.add_argument("--p", required=True)
    c.add_argument("--q", required=True)
    c.add_argument("--hints")
    c.add_argument("--depth-cap", type=int, default=3)
    c.set_defaults(func=cmd_fragment)

    c = sub.add_parser("measure", parents=[common], help="exact and sampled measure arithmetic")
    c.add_argument("what", choices=["tail", "bound", "mc"])
    c.add_argument("--m", type=int, default=1)
    c.add_argument("--family")
    c.add_argument("--depth", type=int, default=5)
    c.add_argument("--trials", type=int, default=100_000)
    c.set_defaults(func=cmd_measure)

    c = sub.add_parser("suite", parents=[common], help="run a property suite")
    c.add_argument("name", choices=list(SUITES) + ["all"])
    c.add_argument("--config", help="JSON file with ExperimentConfig fields")
    c.add_argument("--cases", type=int)
    c.add_argument("--shrink-cases", type=int)
    c.add_argument("--mc-trials", type=int)
    c.add_argument("--workers", type=int)
    c.add_argument("--figures", help="directory for PNG figures")
    c.set_defaults(func=cmd_suite)

    c = sub.add_parser("gen", parents=[common], help="generate random valid instances")
    c.add_argument("kind", choices=["wset", "blockfamily", "creature", "fragment", "relinstance"])
    c.add_argument("--count", type=int, default=1)
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--depth", type=int, default=2)
    c.add_argument("--size", type=int)
    c.add_argument("--min-size", type=int, default=1)
    c.add_argument("--non-covering", action="store_true")
    c.set_defaults(func=cmd_gen)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args)
    try:
        code = args.func(args, out)
    except (FinlocError, KeyError, TypeError, ValueError) as e:
        name = type(e).__name__
        print(f"error: {name}: {e}", file=sys.stderr)
        return EXIT_INPUT
    out.close()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
