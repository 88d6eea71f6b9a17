"""Shared oracles for the test suite."""

from __future__ import annotations

import re
from collections import Counter

from morsefol import GenSpec, generate
from morsefol.model import Assembly, BlockKind, leaf_census

GOLDEN_FAMILIES = ("two_centers", "double_pretzel", "morse_pair")


def random_spec(seed: int) -> GenSpec:
    """Spread seeds over sizes, nesting depths and pants counts."""
    return GenSpec("random", seed=seed, size=1 + seed % 7, bubble_depth=seed % 3, pants_count=seed % 4 // 2)


def random_assembly(seed: int) -> Assembly:
    return generate(random_spec(seed))


def recount(a: Assembly) -> Counter:
    """Independent index census, walking the tables directly."""
    out = Counter()
    stack = [a]
    while stack:
        sub = stack.pop()
        for s in sub.singularities.values():
            out[s.index] += 1
        stack.extend(b.inner for b in sub.blocks.values() if b.inner is not None)
    return out


def centers(c: Counter) -> int:
    return c[0] + c[3]


def conics(c: Counter) -> int:
    return c[1] + c[2]


def census_ids(a: Assembly) -> set[str]:
    ids = set(a.all_ids())
    for _, sub in a.walk():
        ids |= {lf.id for lf in leaf_census(sub)}
    return ids


def all_leaves(a: Assembly):
    for _, sub in a.walk():
        yield from leaf_census(sub)


def charts(a: Assembly) -> list[str]:
    return sorted(b.id for _, sub in a.walk() for b in sub.blocks.values()
                  if b.kind is BlockKind.CHART)


# -- a small grammar-level DOT checker (no graphviz in the sandbox) ------------

_TOKEN = re.compile(r'\s*(?:(//[^\n]*)|("(?:[^"\\]|\\.)*")|(--|->)|([{}\[\];,=])|([A-Za-z_][A-Za-z0-9_.]*|-?\d+(?:\.\d+)?))', re.S)


def dot_tokens(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad DOT token at {pos}: {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.group(1) is None:
            out.append(m.group(0).strip())
    return out


class DotChecker:
    """Recursive-descent check of the DOT subset graph/subgraph/node/edge/attr."""

    def __init__(self, text: str):
        self.toks = dot_tokens(text)
        self.i = 0
        self.nodes: set[str] = set()
        self.edges: list[tuple[str, str, dict]] = []
        self.node_attrs: dict[str, dict] = {}
        self.clusters: list[str] = []

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise ValueError(f"expected {expect!r}, got {tok!r}")
        self.i += 1
        return tok

    def ident(self):
        tok = self.take()
        if tok in "{}[];,=" or tok in ("--", "->"):
            raise ValueError(f"expected identifier, got {tok!r}")
        return tok[1:-1] if tok.startswith('"') else tok

    def attrs(self) -> dict:
        out = {}
        while self.peek() == "[":
            self.take("[")
            while self.peek() != "]":
                k = self.ident()
                self.take("=")
                out[k] = self.ident()
                if self.peek() in (",", ";"):
                    self.take()
            self.take("]")
        return out

    def stmts(self):
        self.take("{")
        while self.peek() != "}":
            tok = self.peek()
            if tok == "subgraph":
                self.take()
                name = self.ident() if self.peek() != "{" else ""
                if name.startswith("cluster"):
                    self.clusters.append(name)
                self.stmts()
            elif tok in ("graph", "node", "edge"):
                self.take()
                self.attrs()
            else:
                a = self.ident()
                if self.peek() == "=":
                    self.take("=")
                    self.ident()
                elif self.peek() == "--":
                    self.take()
                    b = self.ident()
                    self.edges.append((a, b, self.attrs()))
                else:
                    self.nodes.add(a)
                    self.node_attrs[a] = self.attrs()
            if self.peek() == ";":
                self.take()
        self.take("}")

    def check(self) -> "DotChecker":
        if self.peek() == "strict":
            self.take()
        self.take("graph")
        if self.peek() != "{":
            self.ident()
        self.stmts()
        if self.peek() is not None:
            raise ValueError(f"trailing tokens: {self.toks[self.i:]}")
        for a, b, _ in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge {a} -- {b} names an undeclared node")
        return self
