"""Command-line interface and the line-oriented presentation/map file formats.

See docs/format.md for the grammar.  Exit codes: 0 = query answered (YES and
NO both count), 1 = usage or syntax error, 2 = invalid input (inconsistent
presentation, non-nilpotent group, or a map violating relations).
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .equalizer import equalizer
from .morphism import GroupMap, InvalidMap
from .oracle import DEFAULT_LIMIT, brute_classes
from .pcgroup import (
    DEFAULT_MAX_CLASS,
    Element,
    NotNilpotent,
    PcError,
    PcPresentation,
    consistency_check,
    lower_central_series,
)
from .twisted import decide


class PresentationSyntaxError(Exception):
    def __init__(self, line: int, col: int, msg: str):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {msg}")


class InconsistentPresentation(Exception):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(self.violations[0] if self.violations else "inconsistent")


_NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_TOKEN_RE = re.compile(rf"({_NAME})(?:\^(-?\d+))?$")
_CONJ_LHS_RE = re.compile(rf"({_NAME})\^({_NAME})(\^-1)?$")


def parse_word(text: str, names) -> tuple:
    """`name^exp` tokens separated by whitespace; empty text is the identity."""
    word = []
    index = {nm: i for i, nm in enumerate(names)}
    for tok in text.split():
        m = _TOKEN_RE.match(tok)
        if not m or m.group(1) not in index:
            raise PcError(f"bad word token {tok!r}")
        exp = int(m.group(2)) if m.group(2) is not None else 1
        word.append((index[m.group(1)], exp))
    return tuple(word)


def format_word(word, names) -> str:
    parts = []
    for i, e in word:
        if e == 1:
            parts.append(names[i])
        elif e:
            parts.append(f"{names[i]}^{e}")
    return " ".join(parts)


def format_element(g: Element) -> str:
    parts = []
    for i, e in enumerate(g.exps):
        if e == 1:
            parts.append(g.group.names[i])
        elif e:
            parts.append(f"{g.group.names[i]}^{e}")
    return " ".join(parts)


def parse_element(grp: PcPresentation, text: str) -> Element:
    from .pcgroup import collect

    return collect(grp, parse_word(text, grp.names))


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_presentation_document(text: str):
    """Parse the syntax only; returns (name, PcPresentation) unchecked."""
    group_name = None
    gens: list[str] = []
    orders: list[int | None] = []
    power_lines = []  # (lineno, gen, word text)
    conj_lines = []  # (lineno, target, conjugator, sign, word text)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue

        def err(msg, col=1):
            raise PresentationSyntaxError(lineno, col, msg)

        fields = line.split(None, 1)
        keyword = fields[0]
        rest = fields[1] if len(fields) > 1 else ""
        if keyword == "group":
            if group_name is not None:
                err("duplicate group line")
            if not re.match(rf"{_NAME}$", rest.strip()):
                err("expected: group <name>")
            group_name = rest.strip()
        elif keyword == "gen":
            parts = rest.split()
            if len(parts) != 2:
                err("expected: gen <name> <order|inf>")
            nm, order = parts
            if not re.match(rf"{_NAME}$", nm):
                err(f"bad generator name {nm!r}")
            if nm in gens:
                err(f"duplicate generator {nm!r}")
            if order == "inf":
                orders.append(None)
            elif order.isdigit() and int(order) >= 2:
                orders.append(int(order))
            else:
                err("order must be an integer >= 2 or 'inf'")
            gens.append(nm)
        elif keyword == "pow":
            if "=" not in rest:
                err("expected: pow <gen> = <word>")
            lhs, rhs = rest.split("=", 1)
            lhs = lhs.strip()
            if lhs not in gens:
                err(f"unknown generator {lhs!r} in pow")
            power_lines.append((lineno, lhs, rhs.strip()))
        elif keyword == "conj":
            if "=" not in rest:
                err("expected: conj <b>^<a>[^-1] = <word>")
            lhs, rhs = rest.split("=", 1)
            m = _CONJ_LHS_RE.match(lhs.strip())
            if not m:
                err(f"bad conjugate left-hand side {lhs.strip()!r}")
            target, conjer, inv = m.group(1), m.group(2), m.group(3)
            if target not in gens or conjer not in gens:
                err("conjugate relation names an unknown generator")
            conj_lines.append((lineno, target, conjer, -1 if inv else 1, rhs.strip()))
        else:
            err(f"unknown keyword {keyword!r}")

    if not gens:
        raise PresentationSyntaxError(1, 1, "no generators declared")
    index = {nm: i for i, nm in enumerate(gens)}
    power_words = {}
    for lineno, nm, wtext in power_lines:
        i = index[nm]
        if orders[i] is None:
            raise PresentationSyntaxError(lineno, 1, f"pow given for infinite-order generator {nm!r}")
        try:
            power_words[i] = parse_word(wtext, gens)
        except PcError as exc:
            raise PresentationSyntaxError(lineno, 1, str(exc)) from None
    conj_words = {}
    for lineno, target, conjer, sign, wtext in conj_lines:
        i, j = index[conjer], index[target]
        if not i < j:
            raise PresentationSyntaxError(
                lineno, 1, f"conjugator {conjer!r} must precede target {target!r}"
            )
        try:
            conj_words[(i, j, sign)] = parse_word(wtext, gens)
        except PcError as exc:
            raise PresentationSyntaxError(lineno, 1, str(exc)) from None
    try:
        pres = PcPresentation(gens, orders, power_words, conj_words)
    except PcError as exc:
        raise PresentationSyntaxError(1, 1, str(exc)) from None
    return group_name or "G", pres


def parse_presentation(text: str, max_class: int = DEFAULT_MAX_CLASS):
    """Parse and fully validate: syntax, consistency, nilpotency.

    Returns (name, presentation, lcs) where lcs is the lower central series.
    Raises PresentationSyntaxError, InconsistentPresentation, or NotNilpotent.
    """
    name, pres = parse_presentation_document(text)
    violations = consistency_check(pres)
    if violations:
        raise InconsistentPresentation(violations)
    lcs = lower_central_series(pres, max_class)
    return name, pres, lcs


def serialize_presentation(name: str, pres: PcPresentation) -> str:
    lines = [f"group {name}"]
    for i, nm in enumerate(pres.names):
        m = pres.relorders[i]
        lines.append(f"gen {nm} {'inf' if m is None else m}")
    for i in range(pres.n):
        if pres.relorders[i] is not None and pres.power_words[i]:
            w = " ".join(_fmt_tok(pres, t) for t in pres.power_words[i])
            lines.append(f"pow {pres.names[i]} = {w}")
    for (i, j, sign) in sorted(pres.conj):
        word = pres.conj[(i, j, sign)]
        if word == ((j, 1),):
            continue  # trivial relation, the parser defaults it
        w = " ".join(_fmt_tok(pres, t) for t in word)
        suffix = "^-1" if sign == -1 else ""
        lines.append(f"conj {pres.names[j]}^{pres.names[i]}{suffix} = {w}")
    return "\n".join(lines) + "\n"


def _fmt_tok(pres, tok):
    i, e = tok
    return pres.names[i] if e == 1 else f"{pres.names[i]}^{e}"


def parse_map(text: str, grp: PcPresentation, group_name: str | None = None) -> GroupMap:
    """Parse a map document and validate it as an endomorphism of grp."""
    from .pcgroup import collect

    domain = None
    images: dict[int, Element] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue

        def err(msg):
            raise PresentationSyntaxError(lineno, 1, msg)

        fields = line.split(None, 1)
        keyword, rest = fields[0], fields[1] if len(fields) > 1 else ""
        if keyword == "domain":
            domain = rest.strip()
            if group_name is not None and domain != group_name:
                err(f"map domain {domain!r} does not match group {group_name!r}")
        elif keyword == "map":
            if "->" not in rest:
                err("expected: map <gen> -> <word>")
            lhs, rhs = rest.split("->", 1)
            nm = lhs.strip()
            try:
                i = grp.gen_index(nm)
            except PcError:
                err(f"unknown generator {nm!r}")
            if i in images:
                err(f"duplicate image for generator {nm!r}")
            try:
                images[i] = collect(grp, parse_word(rhs.strip(), grp.names))
            except PcError as exc:
                err(str(exc))
        else:
            err(f"unknown keyword {keyword!r}")
    missing = [grp.names[i] for i in range(grp.n) if i not in images]
    if missing:
        raise PresentationSyntaxError(1, 1, f"missing image for generator(s) {', '.join(missing)}")
    return GroupMap.checked(grp, grp, [images[i] for i in range(grp.n)])


# -- command implementations ------------------------------------------------


def _emit(args, out, payload: dict, text_lines: list[str]):
    if args.json:
        full = {
            "verdict": payload.get("verdict"),
            "witness": payload.get("witness"),
            "generators": payload.get("generators"),
            "class": payload.get("class"),
            "diagnostics": payload.get("diagnostics", []),
        }
        print(json.dumps(full, sort_keys=True), file=out)
    else:
        for line in text_lines:
            print(line, file=out)


def _load_group(args):
    with open(args.group) as fh:
        text = fh.read()
    return parse_presentation(text, max_class=args.max_class)


def _load_maps(args, grp, name):
    maps = []
    for path in (args.phi, args.psi):
        with open(path) as fh:
            maps.append(parse_map(fh.read(), grp, group_name=name))
    return maps


def _cmd_check(args, out):
    name, pres, lcs = _load_group(args)
    cls = len(lcs) - 1
    layer_sizes = [len(lcs[k].sequence) - len(lcs[k + 1].sequence) for k in range(cls)]
    diag = [
        f"group {name}: consistent",
        f"class {cls}",
        "layers " + " ".join(str(s) for s in layer_sizes),
    ]
    _emit(args, out, {"class": cls, "diagnostics": diag}, diag)
    return 0


def _cmd_eq(args, out):
    name, pres, lcs = _load_group(args)
    phi, psi = _load_maps(args, pres, name)
    sub = equalizer(pres, phi, psi, max_class=args.max_class)
    gens = [format_element(h) for h in sub.sequence]
    _emit(
        args,
        out,
        {"generators": gens, "class": len(lcs) - 1},
        gens if gens else ["<trivial>"],
    )
    return 0


def _cmd_twisted(args, out):
    name, pres, lcs = _load_group(args)
    phi, psi = _load_maps(args, pres, name)
    u = parse_element(pres, args.u)
    v = parse_element(pres, args.v)
    result = decide(pres, phi, psi, u, v, max_class=args.max_class)
    if result.conjugate:
        word = format_element(result.witness)
        _emit(
            args,
            out,
            {"verdict": "yes", "witness": word, "class": len(lcs) - 1},
            [f"YES {word}".rstrip()],
        )
    else:
        _emit(args, out, {"verdict": "no", "class": len(lcs) - 1}, ["NO"])
    return 0


def _cmd_classes(args, out):
    name, pres, lcs = _load_group(args)
    phi, psi = _load_maps(args, pres, name)
    classes = brute_classes(pres, phi, psi, limit=args.oracle_limit)
    lines = []
    for cl in classes:
        members = sorted(cl, key=lambda g: g.exps)
        lines.append("{ " + ", ".join(format_element(g) or "1" for g in members) + " }")
    lines.append(f"reidemeister {len(classes)}")
    _emit(args, out, {"class": len(lcs) - 1, "diagnostics": lines}, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a stable JSON object")
    common.add_argument(
        "--max-class", type=int, default=DEFAULT_MAX_CLASS, help="nilpotency class bound"
    )
    common.add_argument(
        "--oracle-limit", type=int, default=DEFAULT_LIMIT, help="enumeration size bound"
    )
    parser = argparse.ArgumentParser(
        prog="twistedconj",
        description="Twisted conjugacy and equalizers in finitely generated nilpotent groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a presentation")
    p.add_argument("group")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("eq", parents=[common], help="generators of the equalizer")
    p.add_argument("group")
    p.add_argument("phi")
    p.add_argument("psi")
    p.set_defaults(func=_cmd_eq)

    p = sub.add_parser("twisted", parents=[common], help="decide (x phi) u = v (x psi)")
    p.add_argument("group")
    p.add_argument("phi")
    p.add_argument("psi")
    p.add_argument("-u", required=True, help="left element as a word ('' = identity)")
    p.add_argument("-v", required=True, help="right element as a word ('' = identity)")
    p.set_defaults(func=_cmd_twisted)

    p = sub.add_parser("classes", parents=[common], help="twisted classes (finite groups)")
    p.add_argument("group")
    p.add_argument("phi")
    p.add_argument("psi")
    p.set_defaults(func=_cmd_classes)

    return parser


def run_command(argv, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args, out)
    except (PresentationSyntaxError, FileNotFoundError, PcError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    except (InconsistentPresentation, NotNilpotent, InvalidMap) as exc:
        kind = type(exc).__name__
        print(f"invalid input ({kind}): {exc}", file=err)
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
