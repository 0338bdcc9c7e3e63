"""Discrete Bayes networks: variables, conditional probability tables, topology.

A network is a DAG in which every variable carries exactly one CPT over its
parent set; the product of all CPT entries selected by a full assignment is
the joint probability of that assignment.  Network and Cpt are immutable
after construction, so they can be shared freely across threads.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

# Observed state index per variable name.
Evidence = dict[str, int]

#: rows whose sum is off by no more than this are renormalized at load time
ROW_SUM_RENORM_TOL = 1e-6
#: rows must sum to 1 within this after renormalization
ROW_SUM_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class Variable:
    """A multivalued variable with ordered, labeled states."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def card(self) -> int:
        return len(self.states)


class Cpt:
    """P(child | parents) as a row-stochastic table.

    One row per parent configuration, enumerated in row-major order of the
    declared parent list (last parent varies fastest); one column per child
    state.  Rows whose sum is within ROW_SUM_RENORM_TOL of 1 are rescaled to
    sum exactly 1 on construction; worse rows are kept as-is so validate()
    can report them.
    """

    def __init__(self, child: str, parents: tuple[str, ...] | list[str], table) -> None:
        self.child = child
        self.parents = tuple(parents)
        arr = np.array(table, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        sums = arr.sum(axis=1)
        fixable = (np.abs(sums - 1.0) <= ROW_SUM_RENORM_TOL) & (sums > 0)
        arr[fixable] /= sums[fixable, None]
        arr.flags.writeable = False
        self.table = arr

    @property
    def n_states(self) -> int:
        return self.table.shape[1]

    @property
    def n_rows(self) -> int:
        return self.table.shape[0]


class Network:
    """A set of variables plus one Cpt per variable; arcs are derived from
    the CPT parent lists.  Construction is permissive (validate() reports
    violations); topology queries assume a valid network."""

    def __init__(self, variables, cpts, name: str | None = None) -> None:
        self.name = name
        self.variables: list[Variable] = list(variables)
        self.vars_by_name: dict[str, Variable] = {v.name: v for v in self.variables}
        self.cpt_list: list[Cpt] = list(cpts)
        self.cpts: dict[str, Cpt] = {}
        for cpt in self.cpt_list:
            self.cpts.setdefault(cpt.child, cpt)
        self._cache: dict = {}

    # ------------------------------------------------------------------
    # lookups
    # ------------------------------------------------------------------

    def variable(self, name: str) -> Variable:
        try:
            return self.vars_by_name[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def card(self, name: str) -> int:
        return self.variable(name).card

    def var_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def cpt(self, name: str) -> Cpt:
        self.variable(name)
        return self.cpts[name]

    def parents(self, name: str) -> tuple[str, ...]:
        return self.cpt(name).parents

    def children(self, name: str) -> tuple[str, ...]:
        self.variable(name)
        return self._children_map().get(name, ())

    def edges(self) -> list[tuple[str, str]]:
        """Directed arcs parent -> child, in declaration order of the child."""
        if "edges" not in self._cache:
            out = []
            for v in self.variables:
                cpt = self.cpts.get(v.name)
                if cpt is not None:
                    out.extend((p, v.name) for p in cpt.parents)
            self._cache["edges"] = out
        return self._cache["edges"]

    def _children_map(self) -> dict[str, tuple[str, ...]]:
        if "children" not in self._cache:
            acc: dict[str, list[str]] = {}
            for p, c in self.edges():
                acc.setdefault(p, []).append(c)
            self._cache["children"] = {p: tuple(cs) for p, cs in acc.items()}
        return self._cache["children"]

    def neighbors(self, name: str) -> tuple[str, ...]:
        """Adjacent variables in the underlying undirected graph, sorted."""
        return tuple(sorted(set(self.parents(name)) | set(self.children(name))))

    def descendants(self, name: str) -> frozenset[str]:
        if "descendants" not in self._cache:
            self._cache["descendants"] = {}
        memo = self._cache["descendants"]
        if name not in memo:
            self.variable(name)
            seen: set[str] = set()
            stack = list(self.children(name))
            while stack:
                v = stack.pop()
                if v not in seen:
                    seen.add(v)
                    stack.extend(self.children(v))
            memo[name] = frozenset(seen)
        return memo[name]

    # ------------------------------------------------------------------
    # topology
    # ------------------------------------------------------------------

    def topological_order(self) -> list[str]:
        """Parents before children, lexicographic tie-break.  On a cyclic
        graph the result is partial (shorter than the variable count)."""
        if "topo" not in self._cache:
            indeg = {v.name: 0 for v in self.variables}
            for _, c in self.edges():
                indeg[c] += 1
            ready = [n for n, d in indeg.items() if d == 0]
            heapq.heapify(ready)
            order = []
            while ready:
                n = heapq.heappop(ready)
                order.append(n)
                for c in self.children(n):
                    indeg[c] -= 1
                    if indeg[c] == 0:
                        heapq.heappush(ready, c)
            self._cache["topo"] = order
        return self._cache["topo"]

    def components(self) -> list[list[str]]:
        """Connected components of the underlying undirected graph."""
        if "components" not in self._cache:
            seen: set[str] = set()
            comps = []
            for v in self.variables:
                if v.name in seen:
                    continue
                comp = []
                stack = [v.name]
                seen.add(v.name)
                while stack:
                    n = stack.pop()
                    comp.append(n)
                    for m in self.neighbors(n):
                        if m not in seen:
                            seen.add(m)
                            stack.append(m)
                comps.append(sorted(comp))
            self._cache["components"] = comps
        return self._cache["components"]

    def is_singly_connected(self) -> bool:
        """True iff the underlying undirected graph is a forest."""
        n_edges = len(set((min(p, c), max(p, c)) for p, c in self.edges()))
        return n_edges == len(self.variables) - len(self.components())

    def underlying_diameter(self) -> int:
        """Longest shortest-path length in the underlying undirected graph,
        maximized over connected components."""
        if "diameter" not in self._cache:
            best = 0
            for v in self.variables:
                dist = {v.name: 0}
                frontier = [v.name]
                while frontier:
                    nxt = []
                    for n in frontier:
                        for m in self.neighbors(n):
                            if m not in dist:
                                dist[m] = dist[n] + 1
                                nxt.append(m)
                    frontier = nxt
                best = max(best, max(dist.values()))
            self._cache["diameter"] = best
        return self._cache["diameter"]

    # ------------------------------------------------------------------
    # table addressing
    # ------------------------------------------------------------------

    def row_index(self, name: str, config: tuple[int, ...]) -> int:
        """Row of `name`'s CPT for the given parent-state configuration."""
        idx = 0
        for p, s in zip(self.parents(name), config):
            idx = idx * self.card(p) + s
        return idx

    def cpt_tensor(self, name: str) -> np.ndarray:
        """CPT reshaped to one axis per parent (declared order) plus a final
        child axis."""
        key = ("tensor", name)
        if key not in self._cache:
            cpt = self.cpt(name)
            shape = tuple(self.card(p) for p in cpt.parents) + (cpt.n_states,)
            self._cache[key] = cpt.table.reshape(shape)
        return self._cache[key]


def validate(net: Network) -> list[str]:
    """Check every Network and Cpt invariant; return one message per
    violation (empty list when the network is well formed)."""
    problems: list[str] = []

    seen_vars: set[str] = set()
    for v in net.variables:
        if v.name in seen_vars:
            problems.append(f"variable {v.name}: duplicate declaration")
        seen_vars.add(v.name)
        if v.card < 2:
            problems.append(f"variable {v.name}: needs at least 2 states, has {v.card}")
        if len(set(v.states)) != len(v.states):
            problems.append(f"variable {v.name}: duplicate state labels")

    seen_cpts: set[str] = set()
    for cpt in net.cpt_list:
        tag = f"cpt {cpt.child}"
        if cpt.child not in net.vars_by_name:
            problems.append(f"{tag}: child is not a declared variable")
            continue
        if cpt.child in seen_cpts:
            problems.append(f"{tag}: duplicate table for this variable")
            continue
        seen_cpts.add(cpt.child)

        bad_ref = False
        for p in cpt.parents:
            if p not in net.vars_by_name:
                problems.append(f"{tag}: unknown parent {p!r}")
                bad_ref = True
        if len(set(cpt.parents)) != len(cpt.parents):
            problems.append(f"{tag}: duplicate parent in parent list")
            bad_ref = True
        if bad_ref:
            continue

        expect_rows = math.prod(net.card(p) for p in cpt.parents)
        if cpt.n_rows != expect_rows:
            problems.append(
                f"{tag}: has {cpt.n_rows} rows, expected {expect_rows}"
            )
            continue
        if cpt.n_states != net.card(cpt.child):
            problems.append(
                f"{tag}: rows have {cpt.n_states} entries, expected {net.card(cpt.child)}"
            )
            continue
        for i, row in enumerate(cpt.table):
            if np.any(row < 0) or not np.all(np.isfinite(row)):
                problems.append(f"{tag}: row {i} has a negative or non-finite entry")
            elif abs(row.sum() - 1.0) > ROW_SUM_CHECK_TOL:
                problems.append(f"{tag}: row {i} sums to {row.sum():.9g}, not 1")

    for v in net.variables:
        if v.name not in net.cpts:
            problems.append(f"variable {v.name}: no cpt")

    if not problems and len(net.topological_order()) != len(net.variables):
        on_cycle = sorted(set(net.var_names()) - set(net.topological_order()))
        problems.append(f"graph has a directed cycle involving {', '.join(on_cycle)}")

    return problems


def joint_probability(net: Network, assignment: dict[str, int]) -> float:
    """Probability of a full assignment: the product over all variables of
    the CPT entry selected by the assignment."""
    for v in net.variables:
        if v.name not in assignment:
            raise ValueError(f"assignment is missing variable {v.name!r}")
        s = assignment[v.name]
        if not 0 <= s < v.card:
            raise ValueError(f"state {s} out of range for variable {v.name!r}")
    p = 1.0
    for v in net.variables:
        cpt = net.cpts[v.name]
        config = tuple(assignment[q] for q in cpt.parents)
        p *= cpt.table[net.row_index(v.name, config), assignment[v.name]]
    return p


def all_assignments(net: Network):
    """Iterate every full assignment as a dict, row-major in declaration
    order.  Intended for small networks only."""
    names = net.var_names()
    for combo in itertools.product(*(range(net.card(n)) for n in names)):
        yield dict(zip(names, combo))
