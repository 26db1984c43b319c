"""Command-line interface.  Every command prints one JSON result document.

Exit codes: 0 affirmative, 1 negative verdict, 2 input error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import io, oracle
from .automata import Plant
from .cost import KarpResult, bounded_cost_observer, cost_automaton, karp_max_mean, optimal_cost_observer
from .diagnosis import check_dynamic, check_static, min_k_dynamic
from .errors import InputError, PreconditionError, ResourceError
from .generate import random_game, random_observer, random_plant, random_weighted_automaton
from .meanpayoff import WeightedGraphGame, solve_game
from .observer import Observer, format_history, static_observer, validate_observer
from .synthesis import most_permissive_observer, mpo_membership, extract_observer, SELECTORS

SCHEMA = "dynobs-result/1"


def rational(x: Fraction):
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def _load(path, kind=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        model = io.parse_model(text)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    if kind is not None and not isinstance(model, kind):
        raise InputError(f"{path} does not hold a {kind.__name__.lower()}")
    return model


def _run_json(plant: Plant, run):
    return {"start": plant.states[run.start],
            "steps": [[label, plant.states[d]] for label, d in run.steps]}


def _lasso_json(plant, lasso):
    out = _run_json(plant, lasso.stem)
    out["cycle"] = [[label, plant.states[d]] for label, d in lasso.cycle]
    return out


def _verdict_json(plant, verdict):
    out = {"diagnosable": verdict.diagnosable, "k": verdict.k, "min_k": verdict.min_k,
           "epsilon_completed": verdict.completed, "stats": verdict.stats}
    if verdict.counterexample is not None:
        faulty, healthy = verdict.counterexample
        out["counterexample"] = {"faulty": _lasso_json(plant, faulty),
                                 "fault_free": _lasso_json(plant, healthy)}
    return out


def _parse_events(plant, text):
    if text in ("", "-"):
        return frozenset()
    return plant.alphabet.subset(text.split(","))


def _diagnose(args, plant, obs, label):
    if args.k is not None:
        if args.k < 0:
            raise InputError("--k must be non-negative")
        verdict = check_dynamic(plant, obs, args.k) if obs else check_static(plant, label, args.k)
        return (0 if verdict.diagnosable else 1), {"verdict": _verdict_json(plant, verdict)}
    # no k given: decide existence and report the least delay
    probe = check_dynamic(plant, obs, 0) if obs else check_static(plant, label, 0)
    if probe.min_k is None:
        return 1, {"verdict": _verdict_json(plant, probe)}
    verdict = check_dynamic(plant, obs, probe.min_k) if obs else check_static(plant, label, probe.min_k)
    return 0, {"verdict": _verdict_json(plant, verdict)}


def cmd_validate(args):
    model = _load(args.input)
    kind = type(model).__name__
    problems = []
    if isinstance(model, Observer):
        problems = validate_observer(model)
    elif isinstance(model, WeightedGraphGame):
        problems = model.validate()
    return (1 if problems else 0), {"kind": kind, "valid": not problems, "problems": problems}


def cmd_diagnose_static(args):
    plant = _load(args.plant, Plant)
    sub = _parse_events(plant, args.observe)
    code, doc = _diagnose(args, plant, None, sub)
    doc["observe"] = list(plant.alphabet.ordered(sub))
    return code, doc


def cmd_diagnose(args):
    plant = _load(args.plant, Plant)
    obs = _load(args.obs, Observer)
    problems = validate_observer(obs)
    if problems:
        raise InputError(f"invalid observer: {problems[0]}")
    return _diagnose(args, plant, obs, None)


def _mpo(args):
    plant = _load(args.plant, Plant)
    if args.k < 0:
        raise InputError("--k must be non-negative")
    return plant, most_permissive_observer(plant, args.k, args.cap)


def cmd_synthesize(args):
    plant, mpo = _mpo(args)
    if mpo is None:
        return 1, {"exists": False, "k": args.k}
    text = io.serialize(mpo)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    initial = [list(mpo.alphabet.ordered(X)) for X in mpo.allowed[mpo.initial]]
    return 0, {"exists": True, "k": args.k, "mpo": text, "initial_allowed": initial,
               "stats": {"nodes": len(mpo.allowed), "odd_nodes": len(mpo.odd_nodes())}}


def cmd_membership(args):
    plant, mpo = _mpo(args)
    obs = _load(args.obs, Observer)
    if mpo is None:
        return 1, {"member": False, "exists": False}
    member, history = mpo_membership(mpo, obs)
    doc = {"member": member, "exists": True}
    if history is not None:
        doc["violating_history"] = format_history(history)
    return (0 if member else 1), doc


def cmd_extract(args):
    if args.selector not in SELECTORS:
        raise InputError(f"unknown selector {args.selector}; expected one of {sorted(SELECTORS)}")
    plant, mpo = _mpo(args)
    if mpo is None:
        return 1, {"exists": False}
    obs = extract_observer(mpo, args.selector)
    text = io.serialize(obs)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0, {"exists": True, "observer": text}


def cmd_cost(args):
    plant = _load(args.plant, Plant)
    obs = _load(args.obs, Observer)
    problems = validate_observer(obs)
    if problems:
        raise InputError(f"invalid observer: {problems[0]}")
    wa, _ = cost_automaton(plant, obs)
    res: KarpResult = karp_max_mean(wa)
    prod = wa.automaton
    cycle = {"start": prod.states[res.start],
             "steps": [[label, prod.states[d]] for label, d in res.cycle]}
    return 0, {"cost": rational(res.value), "cycle": cycle,
               "stats": {"product_states": len(prod.states)}}


def cmd_optimal(args):
    plant = _load(args.plant, Plant)
    if args.k < 0:
        raise InputError("--k must be non-negative")
    budget = None
    if args.budget is not None:
        try:
            budget = Fraction(args.budget)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"budget {args.budget} is not an exact fraction") from None
        if "." in args.budget or "e" in args.budget.lower():
            raise InputError("budgets are exact fractions such as 1/2, not decimals")
        if budget < 0:
            raise InputError("budget must be non-negative")
    best = optimal_cost_observer(plant, args.k, args.cap)
    if best is None:
        return 1, {"exists": False, "k": args.k}
    doc = {"exists": True, "k": args.k, "optimal_cost": rational(best.cost),
           "game_cost": rational(best.game_cost), "certified": best.certified,
           "observer": io.serialize(best.observer)}
    if budget is not None:
        doc["budget"] = rational(budget)
        doc["within_budget"] = best.cost <= budget
        return (0 if best.cost <= budget else 1), doc
    return 0, doc


def cmd_export_dot(args):
    return 0, io.export_dot(_load(args.input))


def cmd_selfcheck(args):
    """Cross-check the algorithms against brute force on seeded random instances."""
    rng = random.Random(args.seed)
    failures = []
    for i in range(args.count):
        plant = random_plant(rng)
        obs = random_observer(rng, plant.alphabet)
        k = rng.randint(0, 3)
        if check_dynamic(plant, obs, k).diagnosable != oracle.diagnosable_by_observation(plant, obs, k):
            failures.append({"check": "diagnosis", "instance": i})
        wa = random_weighted_automaton(rng)
        a = wa.automaton
        succ = [[d for _, d in a.succ[q]] for q in range(len(a.states))]
        if karp_max_mean(wa).value != oracle.max_cycle_mean_bruteforce(len(a.states), succ, wa.weight, a.initial):
            failures.append({"check": "karp", "instance": i})
        game = random_game(rng)
        if solve_game(game).values[game.source] != oracle.game_value_bruteforce(game):
            failures.append({"check": "game", "instance": i})
    return (1 if failures else 0), {"seed": args.seed, "instances": args.count, "failures": failures}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None,
                        help="state cap for subset constructions (default: $DYNOBS_CAP or 2^20)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    p = argparse.ArgumentParser(prog="dynobs", description="Fault diagnosis with dynamic observers.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *opts):
        sp = sub.add_parser(name, parents=[common])
        for flags, kw in opts:
            sp.add_argument(*flags, **kw)
        sp.set_defaults(func=func)

    req = {"required": True}
    add("validate", cmd_validate, (("--in",), dict(dest="input", **req)))
    add("diagnose-static", cmd_diagnose_static, (("--plant",), req),
        (("--observe",), dict(help="comma-separated events, '-' for none", **req)),
        (("--k",), {"type": int}))
    add("diagnose", cmd_diagnose, (("--plant",), req), (("--obs",), req), (("--k",), {"type": int}))
    add("synthesize", cmd_synthesize, (("--plant",), req), (("--k",), dict(type=int, **req)),
        (("--out",), {}))
    add("membership", cmd_membership, (("--plant",), req), (("--k",), dict(type=int, **req)),
        (("--obs",), req))
    add("extract", cmd_extract, (("--plant",), req), (("--k",), dict(type=int, **req)),
        (("--selector",), {"default": "smallest"}), (("--out",), {}))
    add("cost", cmd_cost, (("--plant",), req), (("--obs",), req))
    add("optimal", cmd_optimal, (("--plant",), req), (("--k",), dict(type=int, **req)),
        (("--budget",), {}))
    add("export-dot", cmd_export_dot, (("--in",), dict(dest="input", **req)))
    add("selfcheck", cmd_selfcheck, (("--count",), {"type": int, "default": 50}))
    return p


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        code, body = args.func(args)
    except (InputError, PreconditionError) as exc:
        code, body = 2, {"error": str(exc)}
    except ResourceError as exc:
        code, body = 3, {"error": str(exc), "cap": exc.cap}
    if isinstance(body, str):
        out.write(body)
        return code
    doc = {"schema": SCHEMA, "command": argv, "exit": code}
    doc.update(body)
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
