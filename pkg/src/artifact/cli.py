"""Command-line front door.

Exit codes: 0 related or success, 1 distinguished or counterexample found,
2 usage, input or evaluation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .syntax import ParseError, Signature, parse_term, render_term

EXIT_OK, EXIT_DIFF, EXIT_ERR = 0, 1, 2


class CliError(Exception):
    pass


def _text(arg: str) -> str:
    if os.path.isfile(arg):
        with open(arg) as fh:
            return fh.read().strip()
    return arg


def _sig(args):
    return Signature.load(args.sig) if getattr(args, "sig", None) else None


def _env(args):
    if not getattr(args, "env", None):
        return None
    from .sos import DataEnv
    return DataEnv.load(args.env)


def _term(arg, sig):
    return parse_term(_text(arg), sig)


class Out:
    """Collects a run report; prints text lines or one JSON document."""

    def __init__(self, args, command):
        self.args = args
        self.report = {"command": command, "inputs": {}, "seed": getattr(args, "seed", 0)}
        self.text = []
        self.t0 = time.perf_counter()

    def line(self, s=""):
        self.text.append(s)

    def finish(self, code):
        if getattr(self.args, "timing", False):
            self.report["seconds"] = round(time.perf_counter() - self.t0, 3)
        self.report["exit"] = code
        if getattr(self.args, "json", False):
            print(json.dumps(self.report, indent=2, sort_keys=True, default=str))
        else:
            for s in self.text:
                print(s)
        return code


# ------------------------------------------------------------- commands


def cmd_parse(args, out):
    sig = _sig(args)
    t = _term(args.term, sig)
    out.report["inputs"]["term"] = args.term
    out.report["result"] = render_term(t)
    out.line(render_term(t))
    return EXIT_OK


def cmd_normalize(args, out):
    from .rewrite import normalize
    sig = _sig(args)
    t = _term(args.term, sig)
    nf, steps = normalize(t, sig, _env(args), trace=args.trace, tau_laws=args.tau_laws)
    out.report["inputs"]["term"] = args.term
    out.report["result"] = render_term(nf)
    if args.trace:
        out.report["trace"] = [s.line() for s in steps]
        for s in steps:
            out.line(s.line())
    out.line(render_term(nf))
    return EXIT_OK


def cmd_lts(args, out):
    from .sos import build_lts
    sig = _sig(args)
    t = _term(args.term, sig)
    env = _env(args)
    lts = build_lts(t, sig, env, args.init_state, args.max_states)
    out.report["inputs"]["term"] = args.term
    out.report["states"] = lts.n
    out.report["transitions"] = len(lts.trans)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(lts.to_dot())
        out.report["dot"] = args.dot
    out.line(f"{lts.n} states, {len(lts.trans)} transitions")
    for i in range(lts.n):
        mark = " (terminating)" if i in lts.terminating else ""
        out.line(f"  s{i}: {lts.state_name(i)}{mark}")
    for a, lab, b in lts.trans:
        out.line(f"  s{a} -{{{','.join(lab)}}}-> s{b}")
    return EXIT_OK


def _pes_arg(arg, sig):
    from .structures import PES, term_to_pes
    if arg.endswith(".json") and os.path.isfile(arg):
        return PES.load(arg)
    return term_to_pes(_term(arg, sig), sig)


def cmd_equiv(args, out):
    from .equivalence import PES_RELATIONS, RELATIONS
    from .sos import build_lts
    sig = _sig(args)
    out.report["inputs"] = {"left": args.left, "right": args.right, "relation": args.relation}
    if args.relation in ("pomset", "hp", "hhp"):
        v = PES_RELATIONS[args.relation](_pes_arg(args.left, sig), _pes_arg(args.right, sig))
    else:
        env = _env(args)
        l1 = build_lts(_term(args.left, sig), sig, env, args.init_state, args.max_states)
        l2 = build_lts(_term(args.right, sig), sig, env, args.init_state, args.max_states)
        v = RELATIONS[args.relation](l1, l2)
    out.report["verdict"] = "related" if v.related else "distinguished"
    out.report["witness"] = v.describe()
    out.line(v.describe())
    return EXIT_OK if v.related else EXIT_DIFF


def cmd_pes(args, out):
    from .structures import PES, detect_shapes, structurize_pes
    sig = _sig(args)
    pes = PES.load(args.file)
    out.report["inputs"]["file"] = args.file
    if args.action == "shapes":
        rep = detect_shapes(pes)
        lines = rep.lines(pes)
        out.report["shapes"] = lines
        for s in lines or ["no unstructured shapes"]:
            out.line(s)
        return EXIT_OK
    t = structurize_pes(pes, sig)
    out.report["result"] = render_term(t)
    out.line(render_term(t))
    return EXIT_OK


def cmd_pn(args, out):
    from .structures import PetriNet, structurize_pn
    sig = _sig(args)
    net = PetriNet.load(args.file)
    t = structurize_pn(net, sig)
    out.report["inputs"]["file"] = args.file
    out.report["result"] = render_term(t)
    out.line(render_term(t))
    return EXIT_OK


def cmd_kleene(args, out):
    from .kleene import mil_bisim, regex_diff
    r1, r2 = parse_term(_text(args.left)), parse_term(_text(args.right))
    out.report["inputs"] = {"left": args.left, "right": args.right, "mode": args.mode}
    if args.mode == "lang":
        w = regex_diff(r1, r2)
        ok = w is None
        msg = "equal" if ok else f"distinguished by word '{w}'" if w else "distinguished by the empty word"
    else:
        ok = mil_bisim(r1, r2)
        msg = "bisimilar" if ok else "not bisimilar"
    out.report["verdict"] = msg
    out.line(msg)
    return EXIT_OK if ok else EXIT_DIFF


def _inst(text):
    if not text:
        return None
    out = {}
    for part in text.split(";"):
        if part.strip():
            k, _, v = part.partition("=")
            out[k.strip()] = v.strip()
    return out


def cmd_cka(args, out):
    import random
    from . import kleene
    sig = _sig(args)
    bound = args.bound if args.bound is not None else 4
    if args.action == "lang":
        lang = kleene.tca_language(parse_term(_text(args.expr), sig), sig, bound)
        lines = lang.lines()
        out.report["inputs"] = {"expr": args.expr, "bound": bound}
        out.report["pomsets"] = lines
        out.report["truncated"] = lang.truncated
        for s in lines:
            out.line(s)
        return EXIT_OK
    axiom = args.axiom
    tables = dict(kleene.CKA_AXIOMS)
    if axiom not in tables:
        raise CliError(f"unknown axiom {axiom}")
    inst = _inst(args.inst)
    r = kleene.check_cka_axiom(axiom, inst, sig, bound, random.Random(args.seed),
                               1 if inst else args.samples)
    out.report["inputs"] = {"axiom": axiom, "bound": bound, "inst": inst}
    out.report["verdict"] = r.ok
    out.report["bounded"] = r.bounded
    out.line(r.line())
    return EXIT_OK if r.ok else EXIT_DIFF


def cmd_audit(args, out):
    from .audit import run_suite
    rep = run_suite(args.suite, args.seed, args.samples)
    d = rep.to_dict()
    if not getattr(args, "timing", False):
        d.pop("seconds", None)
    out.report.update(d)
    for s in rep.lines():
        if s.startswith("PASS") or s.startswith("FAIL in"):
            s = "PASS" if rep.ok else "FAIL"
        out.line(s)
    if args.dump and not rep.ok:
        os.makedirs(args.dump, exist_ok=True)
        for o in rep.outcomes:
            if o.counterexample:
                for side, t in zip(("lhs", "rhs"), o.counterexample[:2]):
                    path = os.path.join(args.dump, f"{args.suite}-{o.axiom}.{side}.term")
                    with open(path, "w") as fh:
                        fh.write(render_term(t) + "\n")
    return EXIT_OK if rep.ok else EXIT_DIFF


# --------------------------------------------------------------- parser


def _common():
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--sig", default=S, help="signature JSON file")
    p.add_argument("--env", default=S, help="data environment JSON file")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--max-states", type=int, default=S, dest="max_states")
    p.add_argument("--bound", type=int, default=S)
    p.add_argument("--json", action="store_true", default=S, help="emit the run report as JSON")
    p.add_argument("--timing", action="store_true", default=S, help="include wall-clock time in reports")
    return p


def build_parser():
    common = _common()
    ap = argparse.ArgumentParser(prog="artifact", parents=[common],
                                 description="Truly concurrent process algebra workbench")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and pretty-print a term")
    p.add_argument("term")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("normalize", parents=[common], help="rewrite to a normal form")
    p.add_argument("term")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--tau-laws", action="store_true", dest="tau_laws")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("lts", parents=[common], help="build the step transition system")
    p.add_argument("term")
    p.add_argument("--dot")
    p.add_argument("--init-state", dest="init_state")
    p.set_defaults(fn=cmd_lts)

    p = sub.add_parser("equiv", parents=[common], help="decide an equivalence")
    p.add_argument("--relation", default="step",
                   choices=["step", "pomset", "hp", "hhp", "bstep", "rbstep", "wstep"])
    p.add_argument("--init-state", dest="init_state")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("pes", parents=[common], help="event structure tools")
    p.add_argument("action", choices=["structurize", "shapes"])
    p.add_argument("file")
    p.set_defaults(fn=cmd_pes)

    p = sub.add_parser("pn", parents=[common], help="Petri net tools")
    p.add_argument("action", choices=["structurize"])
    p.add_argument("file")
    p.set_defaults(fn=cmd_pn)

    p = sub.add_parser("kleene", parents=[common], help="regular expression equivalence")
    p.add_argument("action", choices=["equiv"])
    p.add_argument("--mode", choices=["lang", "mil"], default="lang")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(fn=cmd_kleene)

    p = sub.add_parser("cka", parents=[common], help="concurrent Kleene algebra")
    p.add_argument("action", choices=["check", "lang"])
    p.add_argument("expr", nargs="?")
    p.add_argument("--axiom")
    p.add_argument("--inst", help="instantiation, e.g. 'x=a;y=b . c'")
    p.add_argument("--samples", type=int, default=50)
    p.set_defaults(fn=cmd_cka)

    p = sub.add_parser("audit", parents=[common], help="run an axiom soundness suite")
    p.add_argument("suite", choices=["batc", "aptc", "tau", "guards", "ka", "mil", "cka", "star"])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--dump", help="directory for counterexample term files")
    p.set_defaults(fn=cmd_audit)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    for k, v in (("seed", 0), ("max_states", 10000), ("bound", None), ("json", False),
                 ("timing", False), ("sig", None), ("env", None), ("init_state", None)):
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.cmd == "cka" and args.action == "check" and not args.axiom:
        ap.error("cka check needs --axiom")
    if args.cmd == "cka" and args.action == "lang" and not args.expr:
        ap.error("cka lang needs an expression")
    out = Out(args, args.cmd)
    try:
        code = args.fn(args, out)
    except (ParseError, CliError, OSError, ValueError, RuntimeError, KeyError) as exc:
        out.report["error"] = f"{type(exc).__name__}: {exc}"
        out.text = [f"error: {exc}"]
        if not args.json:
            for s in out.text:
                print(s, file=sys.stderr)
            return EXIT_ERR
        return out.finish(EXIT_ERR)
    return out.finish(code)


if __name__ == "__main__":
    sys.exit(main())
