"""Brute-force reference engine over the full joint distribution.

Builds the complete joint table by multiplying every CPT into an n-axis
array, then answers marginal, likelihood, and conditional-independence
queries by summation.  Exponential in the network size; guarded by a hard
state-space limit.  This is the verification path for the message-passing
engines and must stay independent of them.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ImpossibleEvidenceError
from .model import Evidence, Network

#: refuse joints with more states than this
STATE_SPACE_GUARD = 1 << 22


def _check_guard(net: Network) -> None:
    size = math.prod(v.card for v in net.variables)
    if size > STATE_SPACE_GUARD:
        raise ValueError(
            f"joint has {size} states, above the {STATE_SPACE_GUARD} guard"
        )


def joint_table(net: Network) -> np.ndarray:
    """Full joint as an array with one axis per variable, declaration order."""
    _check_guard(net)
    names = net.var_names()
    pos = {n: i for i, n in enumerate(names)}
    shape = tuple(v.card for v in net.variables)
    joint = np.ones(shape)
    for v in net.variables:
        cpt = net.cpts[v.name]
        axes = [pos[p] for p in cpt.parents] + [pos[v.name]]
        tensor = net.cpt_tensor(v.name)
        # permute the factor's axes into global declaration order, then pad
        # with singleton axes so it broadcasts against the joint
        order = sorted(range(len(axes)), key=lambda i: axes[i])
        aligned = np.transpose(tensor, order)
        full_shape = [1] * len(names)
        for a in axes:
            full_shape[a] = shape[a]
        joint = joint * aligned.reshape(full_shape)
    return joint


def _masked_joint(net: Network, evidence: Evidence) -> np.ndarray:
    joint = joint_table(net)
    names = net.var_names()
    for var, state in evidence.items():
        net.variable(var)
        axis = names.index(var)
        if not 0 <= state < net.card(var):
            raise ValueError(f"state {state} out of range for variable {var!r}")
        indicator = np.zeros(net.card(var))
        indicator[state] = 1.0
        shape = [1] * len(names)
        shape[axis] = net.card(var)
        joint = joint * indicator.reshape(shape)
    return joint


def oracle_marginal(net: Network, evidence: Evidence, q: str) -> np.ndarray:
    """P(q | evidence) by summing the joint over all consistent assignments."""
    return oracle_posteriors(net, evidence, [q])[q]


def oracle_posteriors(
    net: Network, evidence: Evidence, queries=None
) -> dict[str, np.ndarray]:
    """P(q | evidence) for several queries off one joint enumeration."""
    names = net.var_names()
    if queries is None:
        queries = names
    for q in queries:
        net.variable(q)
    joint = _masked_joint(net, evidence)
    total = joint.sum()
    if total <= 0.0:
        raise ImpossibleEvidenceError("evidence has probability zero")
    out = {}
    for q in queries:
        axis = names.index(q)
        other = tuple(i for i in range(joint.ndim) if i != axis)
        out[q] = joint.sum(axis=other) / total
    return out


def oracle_evidence_probability(net: Network, evidence: Evidence) -> float:
    """P(evidence): total joint mass of the consistent assignments."""
    return float(_masked_joint(net, evidence).sum())


def oracle_conditional_independence(
    net: Network, x: str, y: str, s, tolerance: float = 1e-9
) -> bool:
    """True iff P(x,y|S=s) factorizes into P(x|s)P(y|s) within `tolerance`
    for every conditioning state with positive probability."""
    s = sorted(s)
    if x == y or x in s or y in s:
        raise ValueError("x, y, and s must be disjoint")
    names = net.var_names()
    keep = [names.index(x), names.index(y)] + [names.index(v) for v in s]
    joint = joint_table(net)
    drop = tuple(i for i in range(joint.ndim) if i not in keep)
    sub = joint.sum(axis=drop)
    # axes of `sub` follow declaration order; rearrange to (x, y, *s)
    kept_sorted = sorted(keep)
    sub = np.moveaxis(sub, [kept_sorted.index(a) for a in keep], range(len(keep)))

    p_s = sub.sum(axis=(0, 1))
    p_xs = sub.sum(axis=1)
    p_ys = sub.sum(axis=0)
    mask = np.asarray(p_s) > 0
    if not np.any(mask):
        return True
    safe = np.where(mask, p_s, 1.0)
    diff = np.abs(sub / safe - (p_xs / safe)[:, None] * (p_ys / safe)[None, :])
    return bool(np.max(np.where(mask, diff, 0.0)) <= tolerance)
