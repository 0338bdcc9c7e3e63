"""Inference on multiply-connected networks by reasoning over cutset cases.

For every joint assignment of the cutset variables, slice the cutset
members out of their children's tables, pin them as evidence, and run plain
polytree propagation on the resulting singly-connected network.  Each case
is weighted by its exact joint likelihood P(evidence, cutset=assignment);
beliefs are mixed across cases only at the very end.  Mixing the messages
earlier would feed the cutset prior into the loop twice and give wrong
answers (there is a regression test for exactly that failure mode).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cutset import greedy_cutset, is_valid_cutset
from .errors import ImpossibleEvidenceError
from .model import Cpt, Evidence, Network
from .polytree import evidence_log_likelihood, fuse_belief, propagate


@dataclass
class ConditionedRun:
    """One cutset assignment: its reduced polytree, pinned evidence, exact
    log weight (None when the case is impossible), and fixpoint beliefs."""

    assignment: dict[str, int]
    reduced_net: Network
    reduced_evidence: Evidence | None
    log_weight: float | None
    beliefs: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class MixedBelief:
    beliefs: dict[str, np.ndarray]
    log_likelihood: float


def condition_network(
    net: Network, cutset, assignment: dict[str, int], evidence: Evidence | None = None
) -> tuple[Network, Evidence]:
    """Reduce the network under one cutset assignment.

    Every child of a cutset member gets that member sliced out of its
    table at the assigned state; the member keeps its own table and parents
    and becomes evidence, so its probability is counted exactly once.
    Raises ImpossibleEvidenceError when prior evidence contradicts the
    assignment.
    """
    members = list(cutset)
    if not is_valid_cutset(net, members):
        raise ValueError(f"not a valid cutset: {members}")
    if set(assignment) != set(members):
        raise ValueError("assignment must cover exactly the cutset members")
    evidence = dict(evidence or {})
    for m in members:
        if not 0 <= assignment[m] < net.card(m):
            raise ValueError(f"state {assignment[m]} out of range for {m!r}")
        if m in evidence and evidence[m] != assignment[m]:
            raise ImpossibleEvidenceError(
                f"evidence on {m} contradicts cutset assignment", variable=m
            )

    new_cpts = []
    for v in net.variables:
        cpt = net.cpts[v.name]
        fixed = [p for p in cpt.parents if p in assignment]
        if not fixed:
            new_cpts.append(cpt)
            continue
        tensor = net.cpt_tensor(v.name)
        for p in reversed(cpt.parents):  # slice from the back to keep axes stable
            if p in assignment:
                axis = cpt.parents.index(p)
                tensor = np.take(tensor, assignment[p], axis=axis)
        kept = tuple(p for p in cpt.parents if p not in assignment)
        new_cpts.append(Cpt(v.name, kept, tensor.reshape(-1, v.card)))

    reduced = Network(net.variables, new_cpts, name=net.name)
    evidence.update({m: assignment[m] for m in members})
    return reduced, evidence


def infer_conditioned(
    net: Network, evidence: Evidence, cutset, queries, on_update=None
) -> tuple[MixedBelief, list[ConditionedRun]]:
    """Enumerate all cutset assignments, propagate each, and mix.

    Per-case weights are exp(log P(evidence, cutset=assignment)) normalized
    over the possible cases; the mixture covers non-cutset queries, and a
    cutset query's belief is the total weight of the cases assigning each of
    its states.
    """
    members = list(cutset)
    if not is_valid_cutset(net, members):
        raise ValueError(f"not a valid cutset: {members}")
    queries = list(queries)
    for q in queries:
        net.variable(q)

    runs: list[ConditionedRun] = []
    for combo in itertools.product(*(range(net.card(m)) for m in members)):
        assignment = dict(zip(members, combo))
        conflict = any(
            m in evidence and evidence[m] != assignment[m] for m in members
        )
        if conflict:
            reduced, _ = condition_network(net, members, assignment)
            runs.append(ConditionedRun(assignment, reduced, None, None))
            continue
        reduced, reduced_ev = condition_network(net, members, assignment, evidence)
        log_weight = evidence_log_likelihood(reduced, reduced_ev)
        if log_weight is None:
            runs.append(ConditionedRun(assignment, reduced, reduced_ev, None))
            continue
        callback = None
        if on_update is not None:
            callback = lambda rec, a=assignment: on_update(a, rec)
        state, _ = propagate(reduced, reduced_ev, on_update=callback)
        beliefs = {v: fuse_belief(reduced, state, v) for v in reduced.var_names()}
        runs.append(ConditionedRun(assignment, reduced, reduced_ev, log_weight, beliefs))

    live = [r for r in runs if r.log_weight is not None]
    if not live:
        shown = ", ".join(f"{v}={s}" for v, s in sorted(evidence.items()))
        raise ImpossibleEvidenceError(
            f"evidence {{{shown}}} is impossible under every cutset case"
        )
    top = max(r.log_weight for r in live)
    raw = [math.exp(r.log_weight - top) for r in live]
    total = sum(raw)
    weights = [w / total for w in raw]
    log_likelihood = top + math.log(total)

    beliefs: dict[str, np.ndarray] = {}
    for q in queries:
        if q in members:
            vec = np.zeros(net.card(q))
            for run, w in zip(live, weights):
                vec[run.assignment[q]] += w
        else:
            vec = np.zeros(net.card(q))
            for run, w in zip(live, weights):
                vec = vec + w * run.beliefs[q]
        beliefs[q] = vec
    return MixedBelief(beliefs, log_likelihood), runs


def auto_infer(
    net: Network, evidence: Evidence, queries, on_update=None
) -> MixedBelief:
    """Polytree propagation when the network allows it, otherwise greedy
    cutset conditioning."""
    queries = list(queries)
    if net.is_singly_connected():
        log_likelihood = evidence_log_likelihood(net, evidence)
        if log_likelihood is None:
            raise ImpossibleEvidenceError("evidence has probability zero")
        callback = None
        if on_update is not None:
            callback = lambda rec: on_update({}, rec)
        state, _ = propagate(net, evidence, on_update=callback)
        beliefs = {q: fuse_belief(net, state, q) for q in queries}
        return MixedBelief(beliefs, log_likelihood)
    mixed, _ = infer_conditioned(
        net, evidence, greedy_cutset(net), queries, on_update=on_update
    )
    return mixed
