"""MP grammar data model: metabolites, multiset rules, regulators and the
stoichiometric matrix."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
RESERVED = frozenset({"max"})


class GrammarError(ValueError):
    """Structurally invalid MP grammar."""


def check_name(name: str) -> str:
    if not isinstance(name, str) or not NAME_RE.fullmatch(name):
        raise GrammarError(f"invalid metabolite name {name!r}")
    if name in RESERVED:
        raise GrammarError(f"{name!r} is reserved")
    return name


@dataclass(frozen=True)
class Multiset:
    """Finite multiset of metabolite names; zero multiplicities are dropped."""

    entries: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        counts: dict[str, int] = {}
        for name, mult in self.entries:
            if mult < 0:
                raise GrammarError(f"negative multiplicity for {name!r}")
            counts[name] = counts.get(name, 0) + mult
        object.__setattr__(
            self, "entries", tuple(sorted((n, m) for n, m in counts.items() if m))
        )

    @classmethod
    def of(cls, *names: str, **weighted: int) -> Multiset:
        return cls(tuple((n, 1) for n in names) + tuple(weighted.items()))

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def mult(self, name: str) -> int:
        for n, m in self.entries:
            if n == name:
                return m
        return 0

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.entries)


EMPTY = Multiset()


@dataclass(frozen=True)
class Rule:
    lhs: Multiset
    rhs: Multiset
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.lhs and not self.rhs:
            raise GrammarError(f"rule {self.label!r} has both sides empty")


# Regulators. Every node evaluates to a natural number on a natural state.

@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self) -> None:
        if self.value < 0:
            raise GrammarError("regulator constants must be natural numbers")

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.value

    def variables(self) -> frozenset[str]:
        return frozenset()

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def evaluate(self, env: Mapping[str, int]) -> int:
        return env[self.name]

    def variables(self) -> frozenset[str]:
        return frozenset((self.name,))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Add:
    left: RegulatorExpr
    right: RegulatorExpr

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.left.evaluate(env) + self.right.evaluate(env)

    def variables(self) -> frozenset[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        right = f"({self.right})" if isinstance(self.right, Add) else str(self.right)
        return f"{self.left} + {right}"


@dataclass(frozen=True)
class NatSub:
    """max(left - right, 0)."""

    left: RegulatorExpr
    right: RegulatorExpr

    def evaluate(self, env: Mapping[str, int]) -> int:
        return max(self.left.evaluate(env) - self.right.evaluate(env), 0)

    def variables(self) -> frozenset[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"max({self.left} - {self.right}, 0)"


RegulatorExpr = Union[Const, Var, Add, NatSub]


def compile_regulator(
    expr: RegulatorExpr, index: Mapping[str, int]
) -> Callable[[Sequence[int]], int]:
    """Turn a regulator into a function of a positional state vector."""
    if isinstance(expr, Const):
        value = expr.value
        return lambda x: value
    if isinstance(expr, Var):
        i = index[expr.name]
        return lambda x: x[i]
    if isinstance(expr, NatSub):
        if isinstance(expr.left, Var) and isinstance(expr.right, Var):
            a, b = index[expr.left.name], index[expr.right.name]
            return lambda x: x[a] - x[b] if x[a] > x[b] else 0
        f, g = compile_regulator(expr.left, index), compile_regulator(expr.right, index)
        return lambda x: max(f(x) - g(x), 0)
    if isinstance(expr, Add):
        f, g = compile_regulator(expr.left, index), compile_regulator(expr.right, index)
        return lambda x: f(x) + g(x)
    raise GrammarError(f"unknown regulator node {expr!r}")


@dataclass(frozen=True)
class MPGrammar:
    """An MP grammar ``(M, R, I, Phi)`` with natural-valued state."""

    metabolites: tuple[str, ...]
    rules: tuple[Rule, ...]
    initial: tuple[int, ...]
    regulators: tuple[RegulatorExpr, ...]

    def __post_init__(self) -> None:
        for attr in ("metabolites", "rules", "initial", "regulators"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        for name in self.metabolites:
            check_name(name)
        if len(set(self.metabolites)) != len(self.metabolites):
            raise GrammarError("duplicate metabolite names")
        if len(self.initial) != len(self.metabolites):
            raise GrammarError(
                f"{len(self.initial)} initial values for {len(self.metabolites)} metabolites"
            )
        if any(v < 0 for v in self.initial):
            raise GrammarError("initial values must be natural numbers")
        if len(self.regulators) != len(self.rules):
            raise GrammarError(
                f"{len(self.regulators)} regulators for {len(self.rules)} rules"
            )
        known = set(self.metabolites)
        for k, (rule, reg) in enumerate(zip(self.rules, self.regulators), start=1):
            for name in rule.lhs.names() + rule.rhs.names():
                if name not in known:
                    raise GrammarError(f"rule {k}: unknown metabolite {name!r}")
            for name in reg.variables():
                if name not in known:
                    raise GrammarError(f"regulator of rule {k}: unknown metabolite {name!r}")

    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.metabolites)}

    def value_of(self, values: Sequence[int], name: str) -> int:
        return values[self.metabolites.index(name)]

    def with_initial(self, values: Mapping[str, int]) -> MPGrammar:
        idx = self.index()
        initial = list(self.initial)
        for name, value in values.items():
            if name not in idx:
                raise GrammarError(f"unknown metabolite {name!r}")
            initial[idx[name]] = value
        return MPGrammar(self.metabolites, self.rules, tuple(initial), self.regulators)

    def without_rule(self, position: int) -> MPGrammar:
        """Copy with the rule at 0-based ``position`` (and its regulator) removed."""
        keep = [k for k in range(len(self.rules)) if k != position]
        return MPGrammar(
            self.metabolites,
            tuple(self.rules[k] for k in keep),
            self.initial,
            tuple(self.regulators[k] for k in keep),
        )


@dataclass(frozen=True)
class StoichMatrix:
    """|M| x |R| integer matrix; rows follow metabolites, columns follow rules."""

    entries: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        cols = len(self.entries[0]) if self.entries else 0
        return len(self.entries), cols

    def __getitem__(self, key: tuple[int, int]) -> int:
        row, col = key
        return self.entries[row][col]

    def column(self, col: int) -> tuple[tuple[int, int], ...]:
        """Nonzero ``(row, entry)`` pairs of one column."""
        return tuple((r, row[col]) for r, row in enumerate(self.entries) if row[col])

    def to_numpy(self):
        import numpy as np

        return np.array(self.entries, dtype=np.int64).reshape(self.shape)


def build_stoich_matrix(grammar: MPGrammar) -> StoichMatrix:
    rows = []
    for name in grammar.metabolites:
        rows.append(
            tuple(rule.rhs.mult(name) - rule.lhs.mult(name) for rule in grammar.rules)
        )
    return StoichMatrix(tuple(rows))


def consumers(grammar: MPGrammar) -> dict[str, list[tuple[int, int]]]:
    """metabolite -> [(rule position, multiplicity consumed)]."""
    out: dict[str, list[tuple[int, int]]] = {name: [] for name in grammar.metabolites}
    for k, rule in enumerate(grammar.rules):
        for name, mult in rule.lhs:
            out[name].append((k, mult))
    return out


def make_grammar(
    metabolites: Iterable[str],
    rules: Iterable[tuple[Rule, RegulatorExpr]],
    initial: Mapping[str, int] | None = None,
) -> MPGrammar:
    """Convenience constructor taking (rule, regulator) pairs and sparse initial values."""
    metabolites = tuple(metabolites)
    pairs = list(rules)
    values = dict(initial or {})
    unknown = set(values) - set(metabolites)
    if unknown:
        raise GrammarError(f"initial values for unknown metabolites {sorted(unknown)}")
    return MPGrammar(
        metabolites,
        tuple(r for r, _ in pairs),
        tuple(values.get(m, 0) for m in metabolites),
        tuple(f for _, f in pairs),
    )
