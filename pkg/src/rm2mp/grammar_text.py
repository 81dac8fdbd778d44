"""Text format for MP grammars.

::

    METABOLITES: R1, I1, HALT
    INITIAL: R1=5, I1=1
    RULES:
    I1 -> HALT : I1
    -> R1 : max(I1 - R1, 0)

``serialize_grammar`` emits the canonical form; ``parse_grammar`` accepts it
plus comments, blank lines and free whitespace.
"""
from __future__ import annotations

import re

from .grammar import (
    NAME_RE,
    RESERVED,
    Add,
    Const,
    GrammarError,
    MPGrammar,
    Multiset,
    NatSub,
    RegulatorExpr,
    Rule,
    Var,
)


class GrammarParseError(GrammarError):
    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str, line: int) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        tok = m.group(1) or m.group(2) or m.group(3)
        if m.group(3) and tok not in "+-(),":
            raise GrammarParseError(line, f"unexpected character {tok!r}")
        tokens.append(tok)
        pos = m.end()
    return tokens


class _RegulatorParser:
    def __init__(self, text: str, line: int):
        self.tokens = _tokenize(text, line)
        self.pos = 0
        self.line = line

    def fail(self, message: str):
        raise GrammarParseError(self.line, message)

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of regulator")
        if expected is not None and tok != expected:
            self.fail(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def parse(self) -> RegulatorExpr:
        if not self.tokens:
            self.fail("missing regulator")
        expr = self.expr()
        if self.peek() is not None:
            self.fail(f"unexpected {self.peek()!r} in regulator")
        return expr

    def expr(self) -> RegulatorExpr:
        node = self.term()
        while self.peek() == "+":
            self.take()
            node = Add(node, self.term())
        return node

    def term(self) -> RegulatorExpr:
        tok = self.take()
        if tok.isdigit():
            return Const(int(tok))
        if tok == "(":
            node = self.expr()
            self.take(")")
            return node
        if tok == "max" and self.peek() == "(":
            self.take("(")
            left = self.expr()
            self.take("-")
            right = self.expr()
            self.take(",")
            if self.take() != "0":
                self.fail("max(...) must have 0 as its second argument")
            self.take(")")
            return NatSub(left, right)
        if NAME_RE.fullmatch(tok) and tok not in RESERVED:
            return Var(tok)
        self.fail(f"unexpected {tok!r} in regulator")


def parse_regulator(text: str, line: int = 1) -> RegulatorExpr:
    return _RegulatorParser(text, line).parse()


def _parse_multiset(text: str, line: int) -> Multiset:
    text = text.strip()
    if not text:
        return Multiset()
    entries = []
    for term in text.split("+"):
        parts = term.split()
        if len(parts) == 1:
            mult, name = 1, parts[0]
        elif len(parts) == 2 and parts[0].isdigit():
            mult, name = int(parts[0]), parts[1]
        else:
            raise GrammarParseError(line, f"malformed multiset term {term.strip()!r}")
        if not NAME_RE.fullmatch(name) or name in RESERVED:
            raise GrammarParseError(line, f"invalid metabolite name {name!r}")
        if mult < 1:
            raise GrammarParseError(line, f"multiplicity of {name} must be >= 1")
        entries.append((name, mult))
    return Multiset(tuple(entries))


def _split_header(body: str, keyword: str) -> str | None:
    head, sep, rest = body.partition(":")
    if sep and head.strip().upper() == keyword:
        return rest
    return None


def parse_grammar(text: str) -> MPGrammar:
    metabolites: list[str] | None = None
    initial: dict[str, int] = {}
    rules: list[Rule] = []
    regulators: list[RegulatorExpr] = []
    rule_lines: list[int] = []
    in_rules = False
    seen_initial = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if not in_rules:
            names = _split_header(body, "METABOLITES")
            if names is not None:
                if metabolites is not None:
                    raise GrammarParseError(lineno, "duplicate METABOLITES section")
                metabolites = [n.strip() for n in names.split(",") if n.strip()]
                for name in metabolites:
                    if not NAME_RE.fullmatch(name) or name in RESERVED:
                        raise GrammarParseError(lineno, f"invalid metabolite name {name!r}")
                if len(set(metabolites)) != len(metabolites):
                    raise GrammarParseError(lineno, "duplicate metabolite names")
                continue
            values = _split_header(body, "INITIAL")
            if values is not None:
                if metabolites is None:
                    raise GrammarParseError(lineno, "INITIAL before METABOLITES")
                if seen_initial:
                    raise GrammarParseError(lineno, "duplicate INITIAL section")
                seen_initial = True
                for item in filter(None, (v.strip() for v in values.split(","))):
                    name, eq, value = (s.strip() for s in item.partition("="))
                    if not eq or not value.isdigit():
                        raise GrammarParseError(lineno, f"malformed initial value {item!r}")
                    if name not in metabolites:
                        raise GrammarParseError(lineno, f"unknown metabolite {name!r}")
                    if name in initial:
                        raise GrammarParseError(lineno, f"duplicate initial value for {name}")
                    initial[name] = int(value)
                continue
            rest = _split_header(body, "RULES")
            if rest is not None:
                if metabolites is None:
                    raise GrammarParseError(lineno, "RULES before METABOLITES")
                if rest.strip():
                    raise GrammarParseError(lineno, "RULES header takes no arguments")
                in_rules = True
                continue
            raise GrammarParseError(lineno, f"unexpected line {body!r}")

        reaction, colon, regulator = body.partition(":")
        if not colon:
            raise GrammarParseError(lineno, "rule needs ': regulator'")
        lhs_text, arrow, rhs_text = reaction.partition("->")
        if not arrow:
            raise GrammarParseError(lineno, "rule needs '->'")
        lhs = _parse_multiset(lhs_text, lineno)
        rhs = _parse_multiset(rhs_text, lineno)
        if not lhs and not rhs:
            raise GrammarParseError(lineno, "rule has both sides empty")
        reg = parse_regulator(regulator, lineno)
        for name in lhs.names() + rhs.names() + tuple(sorted(reg.variables())):
            if name not in metabolites:
                raise GrammarParseError(lineno, f"unknown metabolite {name!r}")
        rules.append(Rule(lhs, rhs, f"r{len(rules) + 1}"))
        regulators.append(reg)
        rule_lines.append(lineno)

    if metabolites is None:
        raise GrammarParseError(1, "missing METABOLITES section")
    return MPGrammar(
        tuple(metabolites),
        tuple(rules),
        tuple(initial.get(m, 0) for m in metabolites),
        tuple(regulators),
    )


def _format_multiset(ms: Multiset, order: dict[str, int]) -> str:
    terms = sorted(ms, key=lambda e: order[e[0]])
    return " + ".join(name if m == 1 else f"{m} {name}" for name, m in terms)


def format_rule(rule: Rule, regulator: RegulatorExpr, order: dict[str, int]) -> str:
    parts = []
    if rule.lhs:
        parts.append(_format_multiset(rule.lhs, order))
    parts.append("->")
    if rule.rhs:
        parts.append(_format_multiset(rule.rhs, order))
    return f"{' '.join(parts)} : {regulator}"


def serialize_grammar(grammar: MPGrammar) -> str:
    order = grammar.index()
    initial = ", ".join(
        f"{m}={v}" for m, v in zip(grammar.metabolites, grammar.initial) if v
    )
    lines = [
        f"METABOLITES: {', '.join(grammar.metabolites)}".rstrip(),
        f"INITIAL: {initial}".rstrip(),
        "RULES:",
    ]
    lines += [format_rule(r, f, order) for r, f in zip(grammar.rules, grammar.regulators)]
    return "\n".join(lines) + "\n"
