"""Command-line front end.

Exit status: 0 when the query was answered (the boolean outcome is part of the
report), 1 when a verification run found an inconsistency, 2 on usage or input
errors.  With ``--json`` every command prints one object with the keys
``command``, ``inputs``, ``verdicts`` and ``witnesses``; teams appear as their
integer encodings (bit k set means valuation k is a member, valuation k having
bit i equal to the value of the i-th domain variable).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from prefteam.errors import PrefTeamError
from prefteam.postulates import (
    audit,
    literal_corpus,
    or_counterexample,
    verify_flattening_theorem,
    verify_theorem_main,
)
from prefteam.preferential import load_model
from prefteam.semantics import STRATEGIES, check_closure_properties, entails, mod_set, satisfies
from prefteam.syntax import Fragment, classify, parse, to_text
from prefteam.teams import Team, TeamDomain, read_team


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _team_text(team: Team) -> str:
    return "{" + ", ".join(team.valuation_strings()) + "}"


class Report:
    def __init__(self, command: str, inputs: dict[str, Any]):
        self.command = command
        self.inputs = inputs
        self.verdicts: dict[str, Any] = {}
        self.witnesses: dict[str, Any] = {}
        self.lines: list[str] = []

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def to_json(self) -> str:
        return json.dumps(
            {"command": self.command, "inputs": self.inputs,
             "verdicts": self.verdicts, "witnesses": self.witnesses},
            sort_keys=True, indent=2,
        )


def _domain(args) -> TeamDomain:
    return TeamDomain.of(args.domain)


def _formula(text: str, domain: TeamDomain):
    return parse(text, domain.variables)


def _corpus(args, domain: TeamDomain):
    return literal_corpus(domain, args.depth, args.fragment, args.seed, args.count)


def _cmd_sat(args) -> tuple[Report, int]:
    d = _domain(args)
    phi = _formula(args.formula, d)
    team = read_team(args.team, d)
    r = Report("sat", {"domain": args.domain, "formula": to_text(phi),
                       "team": team.bits, "strategy": args.strategy})
    v = satisfies(team, phi, args.strategy)
    r.verdicts["satisfied"] = v
    r.say(f"{_team_text(team)} |= {to_text(phi)}: {str(v).lower()}")
    return r, 0


def _cmd_mod(args) -> tuple[Report, int]:
    d = _domain(args)
    d.require_family_size()
    phi = _formula(args.formula, d)
    fam = mod_set(phi, d, args.strategy)
    enc = fam.encodings()
    r = Report("mod", {"domain": args.domain, "formula": to_text(phi), "strategy": args.strategy})
    r.verdicts["count"] = len(enc)
    r.witnesses["teams"] = enc
    r.say(f"{len(enc)} of {d.num_teams} teams satisfy {to_text(phi)}")
    for t in fam.teams():
        r.say(f"  {t.bits:>6}  {_team_text(t)}")
    return r, 0


def _cmd_entail(args) -> tuple[Report, int]:
    d = _domain(args)
    d.require_family_size()
    a, b = _formula(args.premise, d), _formula(args.conclusion, d)
    r = Report("entail", {"domain": args.domain, "premise": to_text(a), "conclusion": to_text(b)})
    v = entails(a, b, d)
    r.verdicts["entails"] = v
    r.say(f"{to_text(a)} |= {to_text(b)}: {str(v).lower()}")
    if not v:
        bad = mod_set(a, d).to_int() & ~mod_set(b, d).to_int()
        t = Team(d, (bad & -bad).bit_length() - 1)
        r.witnesses["countermodel"] = t.bits
        r.say(f"countermodel: {_team_text(t)}")
    return r, 0


def _cmd_nm_entail(args) -> tuple[Report, int]:
    d = _domain(args)
    w = load_model(args.model, d)
    a, b = _formula(args.premise, d), _formula(args.conclusion, d)
    r = Report("nm-entail", {"domain": args.domain, "model": args.model,
                             "premise": to_text(a), "conclusion": to_text(b)})
    res = w.entails(a, b)
    mins = w.min_states(a)
    r.verdicts["entails"] = res.holds
    r.witnesses["minimal"] = [t.bits for t in mins.teams]
    r.witnesses["refuting"] = [t.bits for t in res.witness_teams]
    r.say(f"{to_text(a)} |~ {to_text(b)}: {str(res.holds).lower()}")
    r.say("minimal models: " + ", ".join(_team_text(t) for t in mins.teams))
    if not res.holds:
        r.say("refuting minimal models: " + ", ".join(_team_text(t) for t in res.witness_teams))
    return r, 0


def _cmd_audit(args) -> tuple[Report, int]:
    d = _domain(args)
    w = load_model(args.model, d)
    corpus = _corpus(args, d)
    rep = audit(w, corpus, args.system, args.max_violations)
    r = Report("audit", {"domain": args.domain, "model": args.model, "system": rep.system,
                         "depth": args.depth, "seed": args.seed, "count": len(corpus),
                         "fragment": str(Fragment.parse(args.fragment).value)})
    r.say(f"System {rep.system} audit over {len(corpus)} formulas: "
          + ("all rules hold" if rep.ok else "violated " + ", ".join(map(str, rep.violated()))))
    for rule, v in rep.rules.items():
        r.verdicts[str(rule)] = {"holds": v.holds, "violations": v.count}
        r.say(f"  {str(rule):<4} {'holds' if v.holds else f'violated ({v.count} instances)'}")
        if v.violations:
            r.witnesses[str(rule)] = [
                {"instantiation": [to_text(f) for f in x.instantiation()],
                 "teams": [t.bits for t in x.witness_teams]}
                for x in v.violations
            ]
        for x in v.violations:
            inst = ", ".join(to_text(f) for f in x.instantiation())
            r.say(f"    ({inst})  witness " + ", ".join(_team_text(t) for t in x.witness_teams))
    return r, 0


def _cmd_props(args) -> tuple[Report, int]:
    d = _domain(args)
    d.require_family_size()
    phi = _formula(args.formula, d)
    rep = check_closure_properties(phi, d)
    frag = classify(phi)
    r = Report("props", {"domain": args.domain, "formula": to_text(phi)})
    r.verdicts = {"fragment": frag.value, **rep.as_dict()}
    r.say(f"{to_text(phi)}  [{frag.value}]")
    for k, v in rep.as_dict().items():
        r.say(f"  {k}: {str(v).lower()}")
    return r, 0


def _cmd_verify_main(args) -> tuple[Report, int]:
    d = _domain(args)
    w = load_model(args.model, d)
    corpus = _corpus(args, d)
    rep = verify_theorem_main(w, corpus)
    r = Report("verify-main", {"domain": args.domain, "model": args.model, "depth": args.depth,
                               "seed": args.seed, "count": len(corpus)})
    r.verdicts = {"triangle": rep.triangle, "star": rep.star,
                  "corpus_system_p": rep.corpus_system_p, "system_c": rep.system_c,
                  "system_p": rep.system_p, "consistent": rep.consistent,
                  "inconsistencies": list(rep.inconsistencies)}
    if rep.triangle_witness is not None:
        r.witnesses["triangle"] = rep.triangle_witness.bits
    if rep.counterexample is not None:
        c = rep.counterexample
        r.witnesses["or_counterexample"] = {
            "alpha": to_text(c.alpha), "beta": to_text(c.beta), "gamma": to_text(c.gamma),
            "team": c.team.bits, "verified": c.verified}
    for k in ("triangle", "star", "corpus_system_p", "system_c", "system_p"):
        r.say(f"{k}: {str(r.verdicts[k]).lower()}")
    if rep.triangle_witness is not None:
        r.say(f"triangle witness: {_team_text(rep.triangle_witness)}")
    for msg in rep.inconsistencies:
        r.say(f"INCONSISTENT: {msg}")
    r.say("FAILURE" if rep.inconsistencies else "consistent")
    return r, 0 if rep.consistent else 1


def _cmd_verify_flatten(args) -> tuple[Report, int]:
    d = _domain(args)
    w = load_model(args.model, d)
    corpus = literal_corpus(d, args.depth, "PDL", args.seed, args.count)
    pairs = [(a, b) for a in corpus for b in corpus]
    rep = verify_flattening_theorem(w, pairs)
    r = Report("verify-flatten", {"domain": args.domain, "model": args.model, "depth": args.depth,
                                  "seed": args.seed, "count": len(corpus)})
    r.verdicts = {"pairs": rep.total, "agree": rep.agree, "ok": rep.ok}
    r.witnesses["disagreements"] = [[to_text(a), to_text(b), t, f]
                                    for a, b, t, f in rep.disagreements]
    r.say(f"agreement on {rep.agree}/{rep.total} pairs")
    for a, b, t, f in rep.disagreements:
        r.say(f"  {to_text(a)} |~ {to_text(b)}: team {t}, flattened {f}")
    r.say("consistent" if rep.ok else "FAILURE")
    return r, 0 if rep.ok else 1


def _cmd_counterexample_or(args) -> tuple[Report, int]:
    d = _domain(args)
    w = load_model(args.model, d)
    r = Report("counterexample-or", {"domain": args.domain, "model": args.model})
    c = or_counterexample(w)
    r.verdicts["triangle"] = c is None
    if c is None:
        r.say("triangle condition holds; no (Or) counterexample")
        return r, 0
    r.verdicts["verified"] = c.verified
    r.witnesses.update({"alpha": to_text(c.alpha), "beta": to_text(c.beta),
                        "gamma": to_text(c.gamma), "team": c.team.bits,
                        "refuting": [t.bits for t in c.witness_teams]})
    r.say(f"triangle fails at {_team_text(c.team)}")
    r.say(f"alpha = {to_text(c.alpha)}")
    r.say(f"beta  = {to_text(c.beta)}")
    r.say(f"gamma = {to_text(c.gamma)}")
    r.say(f"alpha | beta |~ gamma fails; re-verified: {str(c.verified).lower()}")
    return r, 0 if c.verified else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="prefteam", description="Team semantics and preferential team entailment")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, func, help_text, model=False, corpus=False):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--domain", required=True, help='variables in order, e.g. "p q r"')
        s.add_argument("--json", action="store_true", help="machine-readable output")
        if model:
            s.add_argument("--model", required=True,
                           help="builtin:<sub|sup|discrete|peng|pq>, random:<seed> or a model file")
        if corpus:
            s.add_argument("--depth", type=int, default=2)
            s.add_argument("--seed", type=int, default=0)
            s.add_argument("--count", type=int, default=40)
        s.set_defaults(func=func)
        return s

    s = cmd("sat", _cmd_sat, "does a team satisfy a formula")
    s.add_argument("--team", required=True, help="team file, one 0/1 row per valuation")
    s.add_argument("--strategy", choices=STRATEGIES, default="auto")
    s.add_argument("formula")
    s = cmd("mod", _cmd_mod, "list all team models of a formula")
    s.add_argument("--strategy", choices=STRATEGIES, default="auto")
    s.add_argument("formula")
    s = cmd("entail", _cmd_entail, "team entailment")
    s.add_argument("premise")
    s.add_argument("conclusion")
    s = cmd("nm-entail", _cmd_nm_entail, "preferential entailment", model=True)
    s.add_argument("premise")
    s.add_argument("conclusion")
    s = cmd("audit", _cmd_audit, "audit System C or P rules on a corpus", model=True, corpus=True)
    s.add_argument("--system", choices=["C", "P"], default="P")
    s.add_argument("--fragment", default="PDL", choices=[f.value for f in Fragment])
    s.add_argument("--max-violations", type=int, default=5)
    s = cmd("props", _cmd_props, "fragment and closure properties of a formula")
    s.add_argument("formula")
    s = cmd("verify-main", _cmd_verify_main,
            "cross-check triangle, star, System P and the (Or) construction", model=True, corpus=True)
    s.add_argument("--fragment", default="PDL", choices=[f.value for f in Fragment])
    cmd("verify-flatten", _cmd_verify_flatten,
        "compare team preferential entailment with its flattened classical counterpart",
        model=True, corpus=True)
    cmd("counterexample-or", _cmd_counterexample_or,
        "build an (Or) violation from a triangle failure", model=True)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, code = args.func(args)
    except (PrefTeamError, ValueError, OSError) as exc:
        print(f"prefteam {args.command}: error: {exc}", file=sys.stderr)
        return 2
    print(report.to_json() if args.json else "\n".join(report.lines))
    return code


def main() -> None:
    sys.exit(run())

