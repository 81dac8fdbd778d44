"""Random small MP grammars and a naive EMA oracle for engine tests."""
import random

from rm2mp.grammar import Add, Const, MPGrammar, Multiset, NatSub, Rule, Var


def random_regulator(rng: random.Random, names, depth=2):
    kind = rng.choice(("const", "var", "var", "natsub", "add") if depth else ("const", "var"))
    if kind == "const":
        return Const(rng.randint(0, 3))
    if kind == "var":
        return Var(rng.choice(names))
    left = random_regulator(rng, names, depth - 1)
    right = random_regulator(rng, names, depth - 1)
    return NatSub(left, right) if kind == "natsub" else Add(left, right)


def random_multiset(rng: random.Random, names, max_terms=2):
    k = rng.randint(0, max_terms)
    return Multiset(tuple((rng.choice(names), rng.randint(1, 2)) for _ in range(k)))


def random_grammar(rng: random.Random, max_metabolites=6, max_rules=6, max_value=5) -> MPGrammar:
    names = [f"X{i}" for i in range(1, rng.randint(1, max_metabolites) + 1)]
    rules, regulators = [], []
    for k in range(rng.randint(0, max_rules)):
        lhs = random_multiset(rng, names)
        rhs = random_multiset(rng, names)
        if not lhs and not rhs:
            rhs = Multiset.of(rng.choice(names))
        rules.append(Rule(lhs, rhs, f"r{k + 1}"))
        regulators.append(random_regulator(rng, names))
    initial = tuple(rng.randint(0, max_value) for _ in names)
    return MPGrammar(tuple(names), tuple(rules), initial, tuple(regulators))


def naive_delta(grammar, values):
    """Independent EMA: tree-walked regulators, dense matrix, double loop."""
    env = dict(zip(grammar.metabolites, values))
    u = [max(f.evaluate(env), 0) for f in grammar.regulators]
    starved = set()
    for x in grammar.metabolites:
        demand = sum(u[k] * r.lhs.mult(x) for k, r in enumerate(grammar.rules))
        if demand > env[x]:
            starved.add(x)
    u = [0 if set(r.lhs.names()) & starved else v for r, v in zip(grammar.rules, u)]
    delta = []
    for x in grammar.metabolites:
        total = 0
        for k, r in enumerate(grammar.rules):
            total += (r.rhs.mult(x) - r.lhs.mult(x)) * u[k]
        delta.append(total)
    return delta
