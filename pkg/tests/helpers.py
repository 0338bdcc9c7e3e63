"""Shared fixtures: fixed example networks and seeded random generators."""

from __future__ import annotations

import math
import random

import numpy as np

from beliefprop.model import Cpt, Network, Variable, all_assignments, joint_probability


def build_net(var_defs, cpt_defs, name=None) -> Network:
    """var_defs: [(name, states)]; cpt_defs: [(child, parents, table)]."""
    variables = [Variable(n, tuple(s)) for n, s in var_defs]
    cpts = [Cpt(c, tuple(p), t) for c, p, t in cpt_defs]
    return Network(variables, cpts, name=name)


def chain_net() -> Network:
    """A -> B with P(A)=(0.3,0.7), P(B|A) rows (0.9,0.1) and (0.2,0.8)."""
    return build_net(
        [("A", ("f", "t")), ("B", ("f", "t"))],
        [("A", (), [[0.3, 0.7]]), ("B", ("A",), [[0.9, 0.1], [0.2, 0.8]])],
    )


FIG1_EDGES = {
    "x1": (),
    "x2": ("x1",),
    "x3": ("x1",),
    "x4": ("x1", "x2"),
    "x5": ("x2", "x3"),
    "x6": ("x5",),
}


def fig1_net(seed: int = 0) -> Network:
    """Six binary variables wired x1->{x2,x3,x4}, x2->{x4,x5}, x3->x5,
    x5->x6 (two undirected loops through x1), random positive tables."""
    rng = random.Random(seed)
    var_defs = [(n, ("0", "1")) for n in FIG1_EDGES]
    cpt_defs = [
        (n, ps, random_table(rng, 2 ** len(ps), 2)) for n, ps in FIG1_EDGES.items()
    ]
    return build_net(var_defs, cpt_defs)


def fig1_fixed() -> Network:
    """The fig1 topology with hand-picked skewed tables: x2 and x3 track x1
    closely and x5 reacts to their agreement, so any method that ignores the
    loop is visibly wrong."""
    return build_net(
        [(f"x{i}", ("0", "1")) for i in range(1, 7)],
        [
            ("x1", (), [[0.6, 0.4]]),
            ("x2", ("x1",), [[0.95, 0.05], [0.05, 0.95]]),
            ("x3", ("x1",), [[0.9, 0.1], [0.1, 0.9]]),
            ("x4", ("x1", "x2"), [[0.9, 0.1], [0.3, 0.7], [0.6, 0.4], [0.2, 0.8]]),
            ("x5", ("x2", "x3"), [[0.9, 0.1], [0.1, 0.9], [0.1, 0.9], [0.9, 0.1]]),
            ("x6", ("x5",), [[0.85, 0.15], [0.2, 0.8]]),
        ],
    )


def diamond_net(prefix: str = "", seed: int = 3) -> Network:
    """A -> B, A -> C, B -> D, C -> D (one undirected 4-cycle)."""
    rng = random.Random(seed)
    a, b, c, d = (prefix + n for n in "ABCD")
    return build_net(
        [(n, ("f", "t")) for n in (a, b, c, d)],
        [
            (a, (), random_table(rng, 1, 2)),
            (b, (a,), random_table(rng, 2, 2)),
            (c, (a,), random_table(rng, 2, 2)),
            (d, (b, c), random_table(rng, 4, 2)),
        ],
    )


def random_table(rng: random.Random, rows: int, k: int, low: float = 0.05):
    t = np.array([[rng.uniform(low, 1.0) for _ in range(k)] for _ in range(rows)])
    return t / t.sum(axis=1, keepdims=True)


def random_polytree(
    seed: int,
    max_nodes: int = 15,
    min_nodes: int = 2,
    max_card: int = 4,
    max_evidence: int = 3,
):
    """A random singly-connected network plus a random evidence set.

    The underlying graph is a uniformly attached random tree with each edge
    oriented by a fair coin; joint sizes are capped so the enumeration
    oracle stays applicable.
    """
    rng = random.Random(seed)
    n = rng.randint(min_nodes, max_nodes)
    cards = [rng.randint(2, max_card) for _ in range(n)]
    while math.prod(cards) > 1 << 20:
        cards[cards.index(max(cards))] = 2
    names = [f"n{i:02d}" for i in range(n)]
    parents: dict[int, list[int]] = {i: [] for i in range(n)}
    for i in range(1, n):
        j = rng.randrange(i)
        if rng.random() < 0.5:
            parents[i].append(j)
        else:
            parents[j].append(i)
    var_defs = [
        (names[i], tuple(f"s{k}" for k in range(cards[i]))) for i in range(n)
    ]
    cpt_defs = []
    for i in range(n):
        rows = math.prod(cards[p] for p in parents[i])
        cpt_defs.append(
            (names[i], tuple(names[p] for p in parents[i]),
             random_table(rng, rows, cards[i]))
        )
    net = build_net(var_defs, cpt_defs)
    assert net.is_singly_connected()
    picked = rng.sample(range(n), rng.randint(0, min(max_evidence, n)))
    evidence = {names[i]: rng.randrange(cards[i]) for i in picked}
    return net, evidence


def random_loopy(
    seed: int, max_nodes: int = 12, min_nodes: int = 4, max_evidence: int = 3
):
    """A random binary DAG with at least one undirected cycle, plus random
    evidence."""
    rng = random.Random(seed)
    while True:
        n = rng.randint(min_nodes, max_nodes)
        names = [f"n{i:02d}" for i in range(n)]
        var_defs = [(names[i], ("0", "1")) for i in range(n)]
        cpt_defs = []
        for i in range(n):
            n_parents = min(i, rng.choice((0, 1, 1, 2, 2, 3)))
            ps = sorted(rng.sample(range(i), n_parents))
            cpt_defs.append(
                (names[i], tuple(names[p] for p in ps),
                 random_table(rng, 2 ** n_parents, 2))
            )
        net = build_net(var_defs, cpt_defs)
        if not net.is_singly_connected():
            picked = rng.sample(range(n), rng.randint(0, min(max_evidence, n)))
            evidence = {names[i]: rng.randrange(2) for i in picked}
            return net, evidence


def enum_marginal(net: Network, evidence, q: str):
    """Literal per-assignment sum over the joint; the slow cross-check for
    the vectorized oracle."""
    acc = np.zeros(net.card(q))
    for asg in all_assignments(net):
        if all(asg[v] == s for v, s in evidence.items()):
            acc[asg[q]] += joint_probability(net, asg)
    total = acc.sum()
    assert total > 0
    return acc / total
