"""Line-oriented text format for networks: parser, serializer, evidence args.

The format:

    net <name>                      # optional header
    var <name> : <state> <state> ...
    cpt <root> :
      <p1> ... <pk>
    cpt <child> | <parent> ... :
      <pstate> ... : <p1> ... <pk>  # one row per parent configuration,
      ...                           # row-major in the declared parent order

`#` starts a comment; blank lines are ignored; statements start in column 1
and CPT rows are indented.  Variable names are identifiers (letter or
underscore first); state labels may also be bare digits.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

import numpy as np

from .model import Cpt, Evidence, Network, Variable

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
LABEL_RE = re.compile(r"[A-Za-z0-9_]+\Z")
TOKEN_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str) -> None:
        super().__init__(f"{span.line}:{span.column}: {message}")
        self.span = span
        self.message = message


@dataclass
class _Token:
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column)


def _fail(where: _Token | SourceSpan, message: str) -> ParseError:
    span = where.span if isinstance(where, _Token) else where
    return ParseError(span, message)


def _tokenize(line: str, lineno: int) -> list[_Token]:
    body = line.split("#", 1)[0]
    return [
        _Token(m.group(), lineno, m.start() + 1) for m in TOKEN_RE.finditer(body)
    ]


def _parse_prob(tok: _Token) -> float:
    try:
        p = float(tok.text)
    except ValueError:
        raise _fail(tok, f"malformed number {tok.text!r}") from None
    if not math.isfinite(p):
        raise _fail(tok, f"malformed number {tok.text!r}")
    if p < 0.0 or p > 1.0:
        raise _fail(tok, f"probability {tok.text} outside [0, 1]")
    return p


class _CptBlock:
    """An open `cpt` statement waiting for its configuration rows."""

    def __init__(self, header: _Token, child: Variable, parents: list[Variable]):
        self.header = header
        self.child = child
        self.parents = parents
        self.configs = list(
            itertools.product(*(range(p.card) for p in parents))
        )
        self.rows: list[list[float]] = []

    @property
    def complete(self) -> bool:
        return len(self.rows) == len(self.configs)

    def describe_config(self, idx: int) -> str:
        labels = [
            p.states[s] for p, s in zip(self.parents, self.configs[idx])
        ]
        return " ".join(labels) if labels else "(root)"


def parse(text: str) -> Network:
    """Parse a network description; raises ParseError with a source span."""
    name: str | None = None
    variables: list[Variable] = []
    by_name: dict[str, Variable] = {}
    cpts: dict[str, Cpt] = {}
    order: list[str] = []
    block: _CptBlock | None = None
    saw_statement = False

    def close_block() -> None:
        nonlocal block
        if block is None:
            return
        if not block.complete:
            raise _fail(
                block.header,
                f"missing configuration row for {block.child.name} "
                f"(expected {block.describe_config(len(block.rows))!r} next)",
            )
        cpts[block.child.name] = Cpt(
            block.child.name, tuple(p.name for p in block.parents), block.rows
        )
        order.append(block.child.name)
        block = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokenize(raw, lineno)
        if not toks:
            continue
        indented = raw[: toks[0].column - 1].strip() == "" and toks[0].column > 1

        if indented:
            if block is None:
                raise _fail(toks[0], "row outside of a cpt statement")
            if block.complete:
                raise _fail(toks[0], f"too many rows for cpt {block.child.name}")
            block.rows.append(_parse_row(block, toks))
            continue

        close_block()
        keyword = toks[0]
        if keyword.text == "net":
            if saw_statement:
                raise _fail(keyword, "net header must come first")
            if len(toks) != 2 or not IDENT_RE.match(toks[1].text):
                raise _fail(keyword, "expected: net <identifier>")
            name = toks[1].text
        elif keyword.text == "var":
            v = _parse_var(toks, by_name)
            variables.append(v)
            by_name[v.name] = v
        elif keyword.text == "cpt":
            block = _open_cpt(toks, by_name, cpts)
        else:
            raise _fail(keyword, f"unknown statement {keyword.text!r}")
        saw_statement = True

    close_block()
    return Network(variables, [cpts[n] for n in order], name=name)


def _parse_var(toks: list[_Token], by_name: dict[str, Variable]) -> Variable:
    if len(toks) < 2 or not IDENT_RE.match(toks[1].text):
        raise _fail(toks[0], "expected: var <name> : <state> <state> ...")
    name_tok = toks[1]
    if name_tok.text in by_name:
        raise _fail(name_tok, f"duplicate variable {name_tok.text!r}")
    if len(toks) < 3 or toks[2].text != ":":
        raise _fail(name_tok, "expected ':' after variable name")
    states = toks[3:]
    if len(states) < 2:
        raise _fail(name_tok, "a variable needs at least 2 states")
    seen: set[str] = set()
    for s in states:
        if not LABEL_RE.match(s.text):
            raise _fail(s, f"bad state label {s.text!r}")
        if s.text in seen:
            raise _fail(s, f"duplicate state label {s.text!r}")
        seen.add(s.text)
    return Variable(name_tok.text, tuple(s.text for s in states))


def _open_cpt(
    toks: list[_Token], by_name: dict[str, Variable], cpts: dict[str, Cpt]
) -> _CptBlock:
    if len(toks) < 2:
        raise _fail(toks[0], "expected: cpt <child> [| <parents>] :")
    child_tok = toks[1]
    if child_tok.text not in by_name:
        raise _fail(child_tok, f"unknown variable {child_tok.text!r}")
    if child_tok.text in cpts:
        raise _fail(child_tok, f"duplicate cpt for {child_tok.text!r}")
    if toks[-1].text != ":":
        raise _fail(toks[-1], "cpt statement must end with ':'")
    middle = toks[2:-1]
    parents: list[Variable] = []
    if middle:
        if middle[0].text != "|":
            raise _fail(middle[0], "expected '|' before parent list")
        seen: set[str] = set()
        for t in middle[1:]:
            if t.text not in by_name:
                raise _fail(t, f"unknown variable {t.text!r}")
            if t.text in seen:
                raise _fail(t, f"duplicate parent {t.text!r}")
            seen.add(t.text)
            parents.append(by_name[t.text])
        if not parents:
            raise _fail(middle[0], "parent list after '|' is empty")
    return _CptBlock(child_tok, by_name[child_tok.text], parents)


def _parse_row(block: _CptBlock, toks: list[_Token]) -> list[float]:
    k = block.child.card
    if block.parents:
        texts = [t.text for t in toks]
        if ":" not in texts:
            raise _fail(toks[0], "expected '<parent states> : <probabilities>'")
        sep = texts.index(":")
        label_toks, prob_toks = toks[:sep], toks[sep + 1 :]
        if len(label_toks) != len(block.parents):
            raise _fail(
                toks[0],
                f"expected {len(block.parents)} parent states before ':'",
            )
        config = []
        for parent, t in zip(block.parents, label_toks):
            if t.text not in parent.states:
                raise _fail(t, f"unknown state {t.text!r} of {parent.name}")
            config.append(parent.states.index(t.text))
        expected = block.configs[len(block.rows)]
        if tuple(config) != expected:
            raise _fail(
                toks[0],
                f"configuration out of order: expected "
                f"{block.describe_config(len(block.rows))!r}",
            )
    else:
        prob_toks = toks

    if len(prob_toks) != k:
        raise _fail(toks[0], f"expected {k} probabilities, got {len(prob_toks)}")
    row = [_parse_prob(t) for t in prob_toks]
    total = sum(row)
    if abs(total - 1.0) > 1e-6:
        raise _fail(toks[0], f"row sum is {total:.9g}, not 1")
    return row


def _fmt(p: float) -> str:
    return format(p, ".12g")


def serialize(net: Network) -> str:
    """Canonical text form; parse(serialize(net)) is structurally equal to
    net (tables compared within 1e-9)."""
    lines: list[str] = []
    if net.name:
        lines.append(f"net {net.name}")
    for v in net.variables:
        lines.append(f"var {v.name} : {' '.join(v.states)}")
    for v in net.variables:
        cpt = net.cpts[v.name]
        if cpt.parents:
            lines.append(f"cpt {v.name} | {' '.join(cpt.parents)} :")
            parent_vars = [net.variable(p) for p in cpt.parents]
            configs = itertools.product(*(range(p.card) for p in parent_vars))
            for i, config in enumerate(configs):
                labels = " ".join(
                    p.states[s] for p, s in zip(parent_vars, config)
                )
                probs = " ".join(_fmt(x) for x in cpt.table[i])
                lines.append(f"  {labels} : {probs}")
        else:
            lines.append(f"cpt {v.name} :")
            lines.append("  " + " ".join(_fmt(x) for x in cpt.table[0]))
    return "\n".join(lines) + "\n"


def structurally_equal(a: Network, b: Network, tol: float = 1e-9) -> bool:
    """Same name, variables, states, and parent lists; tables within tol."""
    if a.name != b.name or a.var_names() != b.var_names():
        return False
    for va, vb in zip(a.variables, b.variables):
        if va.states != vb.states:
            return False
    for v in a.variables:
        ca, cb = a.cpts.get(v.name), b.cpts.get(v.name)
        if (ca is None) != (cb is None):
            return False
        if ca is None:
            continue
        if ca.parents != cb.parents or ca.table.shape != cb.table.shape:
            return False
        if np.max(np.abs(ca.table - cb.table)) > tol:
            return False
    return True


def parse_evidence(tokens: list[str], net: Network) -> Evidence:
    """Resolve 'Var=state' command-line tokens against a network."""
    evidence: Evidence = {}
    for tok in tokens:
        var, eq, label = tok.partition("=")
        if not eq or not var or not label:
            raise ValueError(f"bad evidence {tok!r}, expected Var=state")
        if var not in net.vars_by_name:
            raise ValueError(f"unknown variable {var!r}")
        states = net.variable(var).states
        if label not in states:
            raise ValueError(f"unknown state {label!r} of variable {var!r}")
        if var in evidence:
            raise ValueError(f"duplicate evidence for variable {var!r}")
        evidence[var] = states.index(label)
    return evidence
