"""Finitely generated groups given by a symmetric generating set.

Every group exposes ``identity``, an ordered tuple of generator tokens and
right multiplication by a token. Generator order matters: it fixes the
breadth-first discovery order of Cayley balls and hence every tie-break
downstream (geodesic parents, shortlex words).
"""
from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence


def _letters(rank):
    if rank > 26:
        raise ValueError("at most 26 generators are supported")
    return string.ascii_lowercase[:rank]


class GroupSpec:
    identity: Hashable

    def generators(self) -> tuple:
        raise NotImplementedError

    def mul(self, elem, token):
        raise NotImplementedError

    def evaluate(self, word: Sequence) -> Hashable:
        """Element reached by reading ``word`` from the identity."""
        g = self.identity
        for token in word:
            g = self.mul(g, token)
        return g

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FreeGroup(GroupSpec):
    """Free group on ``rank`` letters; inverses are the upper-case letters.

    Elements are reduced words as strings, the identity is ``"e"``.
    """

    rank: int
    identity: str = field(default="e", init=False)

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        _letters(self.rank)

    def generators(self):
        return tuple(t for c in _letters(self.rank) for t in (c, c.upper()))

    def mul(self, elem, token):
        word = "" if elem == "e" else elem
        if word and word[-1] == token.swapcase():
            word = word[:-1]
        else:
            word = word + token
        return word or "e"

    def to_dict(self):
        return {"type": "free", "rank": self.rank}


@dataclass(frozen=True)
class FreeAbelian(GroupSpec):
    """Z^rank with standard basis; token ``"a"`` is +e_1, ``"A"`` is -e_1, and so on."""

    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        _letters(self.rank)

    @property
    def identity(self):
        return (0,) * self.rank

    def generators(self):
        return tuple(t for c in _letters(self.rank) for t in (c, c.upper()))

    def mul(self, elem, token):
        axis = ord(token.lower()) - ord("a")
        step = 1 if token.islower() else -1
        out = list(elem)
        out[axis] += step
        return tuple(out)

    def to_dict(self):
        return {"type": "free_abelian", "rank": self.rank}


@dataclass(frozen=True)
class FiniteGroup(GroupSpec):
    """Group given by a multiplication table ``table[g][h] = g*h`` on ``0..n-1``."""

    table: tuple
    gens: tuple
    check_seed: int = 0

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "gens", tuple(int(g) for g in self.gens))
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise ValueError("multiplication table must be square and nonempty")
        if any(not 0 <= v < n for row in table for v in row):
            raise ValueError("table entries out of range")
        ident = [e for e in range(n) if all(table[e][g] == g and table[g][e] == g for g in range(n))]
        if not ident:
            raise ValueError("table has no identity element")
        e = ident[0]
        object.__setattr__(self, "_e", e)
        for g in range(n):
            if e not in table[g]:
                raise ValueError(f"element {g} has no inverse")
        rng = random.Random(self.check_seed)
        for _ in range(min(1000, n**3)):
            a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise ValueError(f"table is not associative at {(a, b, c)}")
        gens = set(self.gens)
        if e in gens:
            raise ValueError("generating set must omit the identity")
        for g in gens:
            if table[g].index(e) not in gens:
                raise ValueError(f"generating set is not symmetric: inverse of {g} missing")

    @property
    def identity(self):
        return self._e

    def generators(self):
        return self.gens

    def mul(self, elem, token):
        return self.table[elem][token]

    def to_dict(self):
        return {"type": "finite", "table": [list(r) for r in self.table], "generators": list(self.gens)}


@dataclass(frozen=True)
class DirectProduct(GroupSpec):
    """Direct product; tokens are ``(factor_index, factor_token)``."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("direct product needs at least one factor")

    @property
    def identity(self):
        return tuple(f.identity for f in self.factors)

    def generators(self):
        return tuple((i, t) for i, f in enumerate(self.factors) for t in f.generators())

    def mul(self, elem, token):
        i, t = token
        out = list(elem)
        out[i] = self.factors[i].mul(elem[i], t)
        return tuple(out)

    def to_dict(self):
        return {"type": "product", "factors": [f.to_dict() for f in self.factors]}


@dataclass(frozen=True)
class ExplicitGraph(GroupSpec):
    """A connected graph given by adjacency lists; not a group, but treated like a
    Cayley graph whose tokens are the neighbour vertices themselves."""

    adjacency: tuple
    root: int = 0

    def __post_init__(self):
        adj = tuple(tuple(int(v) for v in nbrs) for nbrs in self.adjacency)
        object.__setattr__(self, "adjacency", adj)
        n = len(adj)
        for u, nbrs in enumerate(adj):
            for v in nbrs:
                if not 0 <= v < n or v == u:
                    raise ValueError(f"bad edge {u}-{v}")
                if u not in adj[v]:
                    raise ValueError(f"adjacency is not symmetric at {u}-{v}")

    @property
    def identity(self):
        return self.root

    def generators(self):
        return ()

    def neighbours(self, elem):
        return self.adjacency[elem]

    def mul(self, elem, token):
        if token not in self.adjacency[elem]:
            raise ValueError(f"{token} is not adjacent to {elem}")
        return token

    def to_dict(self):
        return {"type": "graph", "adjacency": [list(a) for a in self.adjacency], "root": self.root}


def cycle_graph(k: int) -> ExplicitGraph:
    return ExplicitGraph(tuple(((i - 1) % k, (i + 1) % k) for i in range(k)))


def path_graph(k: int) -> ExplicitGraph:
    """Vertices ``0..k-1`` in a line, rooted at 0."""
    return ExplicitGraph(tuple(tuple(v for v in (i - 1, i + 1) if 0 <= v < k) for i in range(k)))


def group_from_dict(data: dict[str, Any]) -> GroupSpec:
    kind = data.get("type")
    if kind == "free":
        return FreeGroup(int(data["rank"]))
    if kind == "free_abelian":
        return FreeAbelian(int(data["rank"]))
    if kind == "finite":
        return FiniteGroup(tuple(map(tuple, data["table"])), tuple(data["generators"]))
    if kind == "product":
        return DirectProduct(tuple(group_from_dict(f) for f in data["factors"]))
    if kind == "graph":
        return ExplicitGraph(tuple(map(tuple, data["adjacency"])), int(data.get("root", 0)))
    if kind == "cycle":
        return cycle_graph(int(data["length"]))
    if kind == "path":
        return path_graph(int(data["length"]))
    raise ValueError(f"unknown group type {kind!r}")
