"""Commutation graphs: operators described only by pairwise commutation phases.

A graph on ``n`` vertices with phase order ``d`` stores an integer table
``e[i][j]`` such that ``A_i A_j = exp(2 pi i e_ij / d) A_j A_i``.  For ``d = 2``
the table is the 0/1 adjacency matrix of the anti-commutation graph.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class GraphParseError(ValueError):
    """Raised for malformed graph6 or weighted edge-list input."""


class UnsupportedGraphError(ValueError):
    """Raised when an operation is only defined for ``d = 2``."""


@dataclass(frozen=True)
class CommutationGraph:
    n: int
    d: int
    exponents: tuple[tuple[int, ...], ...]
    hermitian: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"phase order must be positive, got {self.d}")
        if len(self.exponents) != self.n or any(len(r) != self.n for r in self.exponents):
            raise ValueError("exponent table must be n x n")
        if self.d == 2:
            object.__setattr__(self, "hermitian", True)
        for i in range(self.n):
            if self.exponents[i][i] != 0:
                raise ValueError(f"e[{i}][{i}] must be 0")
            for j in range(self.n):
                e = self.exponents[i][j]
                if not 0 <= e < self.d:
                    raise ValueError(f"e[{i}][{j}]={e} outside 0..{self.d - 1}")
                if (e + self.exponents[j][i]) % self.d:
                    raise ValueError(f"e[{i}][{j}] and e[{j}][{i}] are not conjugate")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "") -> "CommutationGraph":
        """Anti-commutation graph (``d = 2``) from an edge list."""
        table = [[0] * n for _ in range(n)]
        for i, j in edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            table[i][j] = table[j][i] = 1
        return cls(n, 2, tuple(map(tuple, table)), True, name)

    @classmethod
    def from_weights(cls, n: int, d: int, weights: dict[tuple[int, int], int],
                     hermitian: bool | None = None, name: str = "") -> "CommutationGraph":
        """Graph from ``{(i, j): e_ij}``; the conjugate entry is filled in."""
        table = [[0] * n for _ in range(n)]
        for (i, j), e in weights.items():
            table[i][j] = e % d
            table[j][i] = (-e) % d
        herm = (d == 2) if hermitian is None else hermitian
        return cls(n, d, tuple(map(tuple, table)), herm, name)

    def zeta(self, i: int, j: int) -> complex:
        e = self.exponents[i][j]
        if (4 * e) % self.d == 0:  # exact on the axes
            return (1, 1j, -1, -1j)[(4 * e) // self.d % 4]
        return cmath.exp(2j * math.pi * e / self.d)

    def commute(self, i: int, j: int) -> bool:
        return self.exponents[i][j] == 0

    def edges(self) -> list[tuple[int, int]]:
        """Pairs ``i < j`` that do not commute."""
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n)
                if self.exponents[i][j]]

    def adjacency(self) -> np.ndarray:
        return (np.array(self.exponents, dtype=int).reshape(self.n, self.n) != 0).astype(int)

    def neighbor_masks(self) -> list[int]:
        masks = []
        for i in range(self.n):
            m = 0
            for j in range(self.n):
                if self.exponents[i][j]:
                    m |= 1 << j
            masks.append(m)
        return masks

    def with_name(self, name: str) -> "CommutationGraph":
        return CommutationGraph(self.n, self.d, self.exponents, self.hermitian, name)


@dataclass(frozen=True)
class OddHole:
    vertices: tuple[int, ...]

    def check(self, g: CommutationGraph) -> bool:
        vs = self.vertices
        k = len(vs)
        if k < 5 or k % 2 == 0 or len(set(vs)) != k:
            return False
        for a in range(k):
            for b in range(a + 1, k):
                adjacent = b == a + 1 or (a == 0 and b == k - 1)
                if (g.exponents[vs[a]][vs[b]] == 1) != adjacent:
                    return False
        return True

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class IndependenceCertificate:
    size: int
    witness: tuple[int, ...]


# graph6 -------------------------------------------------------------------

def parse_graph6(text: str, name: str = "") -> CommutationGraph:
    """Decode a single graph6 line (``n <= 62``)."""
    s = text.strip("\r\n")
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise GraphParseError("empty graph6 string (offset 0)")
    for pos, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise GraphParseError(f"byte {ord(ch)} outside 63..126 at offset {pos}")
    n = ord(s[0]) - 63
    if n > 62:
        raise GraphParseError("multi-byte graph6 headers (n > 62) are not supported (offset 0)")
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    body = s[1:]
    if len(body) < nbytes:
        raise GraphParseError(f"truncated graph6 body: expected {nbytes} bytes, "
                              f"got {len(body)} (offset {1 + len(body)})")
    if len(body) > nbytes:
        raise GraphParseError(f"trailing garbage at offset {1 + nbytes}")
    bits = []
    for ch in body:
        v = ord(ch) - 63
        bits.extend((v >> (5 - t)) & 1 for t in range(6))
    if any(bits[nbits:]):
        raise GraphParseError(f"non-zero padding bits at offset {len(s) - 1}")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return CommutationGraph.from_edges(n, edges, name)


def encode_graph6(g: CommutationGraph) -> str:
    if g.d != 2:
        raise UnsupportedGraphError("graph6 encodes d=2 graphs only")
    if g.n > 62:
        raise ValueError("n > 62 not supported")
    bits = [g.exponents[i][j] for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        v = 0
        for b in bits[k:k + 6]:
            v = (v << 1) | b
        out.append(chr(v + 63))
    return "".join(out)


# weighted edge list -------------------------------------------------------

_HEADER = re.compile(r"^n\s*=\s*(\d+)\s+d\s*=\s*(\d+)$")


def parse_weighted_edgelist(text: str, name: str = "") -> CommutationGraph:
    """Parse ``n=<int> d=<int>`` followed by ``i j e`` lines.

    Omitted pairs commute.  ``#`` starts a comment.
    """
    n = d = None
    weights: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            m = _HEADER.match(line)
            if not m:
                raise GraphParseError(f"line {lineno}: expected header 'n=<int> d=<int>'")
            n, d = int(m.group(1)), int(m.group(2))
            if d < 1:
                raise GraphParseError(f"line {lineno}: d must be positive")
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphParseError(f"line {lineno}: expected 'i j e'")
        try:
            i, j, e = map(int, parts)
        except ValueError:
            raise GraphParseError(f"line {lineno}: non-integer field") from None
        if not (0 <= i < j < n):
            raise GraphParseError(f"line {lineno}: need 0 <= i < j < {n}, got {i} {j}")
        if not 0 < e < d:
            raise GraphParseError(f"line {lineno}: exponent {e} not in 1..{d - 1}")
        if (i, j) in weights:
            raise GraphParseError(f"line {lineno}: duplicate pair {i} {j}")
        weights[(i, j)] = e
    if n is None:
        raise GraphParseError("line 1: missing header")
    return CommutationGraph.from_weights(n, d, weights, name=name)


def format_weighted(g: CommutationGraph) -> str:
    lines = [f"n={g.n} d={g.d}"]
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if g.exponents[i][j]:
                lines.append(f"{i} {j} {g.exponents[i][j]}")
    return "\n".join(lines) + "\n"


def split_weighted_documents(text: str) -> list[tuple[int, str]]:
    """Split a stream holding several weighted graphs at header lines.

    Returns ``(first line number, chunk)`` pairs.
    """
    chunks: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if _HEADER.match(body) or (not chunks and body):
            chunks.append((lineno, []))
        if chunks:
            chunks[-1][1].append(raw)
    return [(start, "\n".join(lines)) for start, lines in chunks]


# combinatorics ------------------------------------------------------------

def complement(g: CommutationGraph) -> CommutationGraph:
    if g.d != 2:
        raise UnsupportedGraphError("complement is defined for d=2 only")
    table = tuple(tuple(0 if i == j else 1 - g.exponents[i][j] for j in range(g.n))
                  for i in range(g.n))
    return CommutationGraph(g.n, 2, table, True, g.name)


def _greedy_color_order(cand: int, compat: Sequence[int]) -> tuple[list[int], list[int]]:
    # Colour classes are cliques of the commuting graph; the colour count
    # bounds how many more vertices can be added.
    order, bounds = [], []
    uncolored = cand
    color = 0
    while uncolored:
        color += 1
        avail = uncolored
        while avail:
            v = (avail & -avail).bit_length() - 1
            avail &= ~(1 << v)
            avail &= ~compat[v]  # vertices commuting with v cannot share its colour
            uncolored &= ~(1 << v)
            order.append(v)
            bounds.append(color)
    return order, bounds


def independence_number(g: CommutationGraph) -> IndependenceCertificate:
    """Largest pairwise-commuting vertex set, by branch and bound.

    Works on the commuting graph (``e_ij = 0``) as a maximum-clique search
    with greedy-colouring bounds.  The witness is the first maximum set the
    search reaches, so it is deterministic but not lexicographically least.
    """
    if g.n > 64:
        raise ValueError("independence_number supports n <= 64")
    n = g.n
    compat = []
    for i in range(n):
        m = 0
        for j in range(n):
            if j != i and g.exponents[i][j] == 0:
                m |= 1 << j
        compat.append(m)

    best: list[int] = []

    def expand(current: list[int], cand: int):
        nonlocal best
        order, bounds = _greedy_color_order(cand, compat)
        for idx in range(len(order) - 1, -1, -1):
            if len(current) + bounds[idx] <= len(best):
                return
            v = order[idx]
            current.append(v)
            sub = cand & compat[v]
            if sub:
                expand(current, sub)
            elif len(current) > len(best):
                best = list(current)
            current.pop()
            cand &= ~(1 << v)

    if n:
        expand([], (1 << n) - 1)
    return IndependenceCertificate(len(best), tuple(sorted(best)))


def enumerate_odd_holes(g: CommutationGraph, max_len: int | None = None) -> list[OddHole]:
    """All chordless odd cycles of length 5..max_len, one per rotation/reflection class.

    Each hole is reported starting at its smallest vertex, oriented so that the
    second vertex is smaller than the last.
    """
    if g.d != 2:
        raise UnsupportedGraphError("odd holes are defined for d=2 only")
    if max_len is None:
        if g.n < 5:
            return []
        max_len = g.n if g.n % 2 else g.n - 1
    if max_len < 5 or max_len % 2 == 0:
        raise ValueError("max_len must be odd and >= 5")
    adj = g.neighbor_masks()
    holes: list[OddHole] = []

    def extend(path: list[int], used: int, forbidden: int, s: int):
        last = path[-1]
        k = len(path)
        nxt = adj[last] & ~used & ~forbidden
        while nxt:
            v = (nxt & -nxt).bit_length() - 1
            nxt &= nxt - 1
            if v <= s:
                continue
            closes = bool(adj[v] >> s & 1)
            if closes:
                if k + 1 >= 5 and (k + 1) % 2 == 1 and path[1] < v:
                    holes.append(OddHole(tuple(path + [v])))
                continue
            if k + 1 < max_len:
                # later vertices may only touch the path at its end or at s
                extend(path + [v], used | (1 << v), forbidden | adj[last], s)

    for s in range(g.n):
        for v1 in range(s + 1, g.n):
            if adj[s] >> v1 & 1:
                extend([s, v1], (1 << s) | (1 << v1), 0, s)
    holes.sort(key=lambda h: (len(h), h.vertices))
    return holes
