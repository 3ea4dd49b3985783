"""Seeded graph families used as fixtures and stress instances.

All randomness flows through the package RNG with one draw per candidate
pair, taken in lexicographic pair order, so any port that matches the RNG
reference vectors reproduces these graphs bit for bit.

The two named structured families mirror the standard witnesses for the
difference between uniform density and inseparability: two large cliques
sharing a small intersection (dense on every subset, but with a sparse
bipartite corner), and an independent set fully joined to a clique (dense
pairs everywhere, yet no Hamilton cycle once the independent side has the
majority).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Sequence

from powerham.errors import InputError
from powerham.graph import Graph
from powerham.rng import SplitMix64


@dataclass(frozen=True)
class GenSpec:
    """Echo of how a graph was generated; serialized next to saved graphs."""
    family: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def to_json(self) -> str:
        payload = {"family": self.family, "params": self.params}
        if self.seed is not None:
            payload["seed"] = self.seed
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def gnp(n: int, p: Fraction, seed: int) -> Graph:
    """Binomial random graph; one RNG draw per pair (u < v), lex order."""
    if n < 1:
        raise InputError("n must be >= 1")
    p = Fraction(p)
    rng = SplitMix64(seed)
    rows = [0] * n
    for u in range(n - 1):
        for v in range(u + 1, n):
            if rng.chance(p):
                rows[u] |= 1 << v
                rows[v] |= 1 << u
    return Graph(n, tuple(rows))


def random_bipartite(n: int, p: Fraction, seed: int) -> Graph:
    """Random bipartite graph with sides of size floor(n/2) and ceil(n/2).

    Side one is [0, n//2); each cross pair gets one draw, lex order.
    """
    if n < 2:
        raise InputError("n must be >= 2")
    p = Fraction(p)
    rng = SplitMix64(seed)
    half = n // 2
    rows = [0] * n
    for u in range(half):
        for v in range(half, n):
            if rng.chance(p):
                rows[u] |= 1 << v
                rows[v] |= 1 << u
    return Graph(n, tuple(rows))


def complete_multipartite(part_sizes: Sequence[int]) -> Graph:
    """Complete multipartite graph; parts occupy consecutive id blocks."""
    if not part_sizes or any(s < 1 for s in part_sizes):
        raise InputError("part sizes must be positive")
    n = sum(part_sizes)
    bounds = []
    start = 0
    for s in part_sizes:
        bounds.append((start, start + s))
        start += s
    full = (1 << n) - 1
    rows = []
    for lo, hi in bounds:
        block = ((1 << hi) - 1) ^ ((1 << lo) - 1)
        for _ in range(lo, hi):
            rows.append(full ^ block)
    return Graph(n, tuple(rows))


def two_overlapping_cliques(n: int, mu: Fraction) -> Graph:
    g, _, _ = two_overlapping_cliques_parts(n, mu)
    return g


def two_overlapping_cliques_parts(n: int, mu: Fraction
                                  ) -> tuple[Graph, set[int], set[int]]:
    """Two cliques A, B with |A|=|B|=ceil((1/2+mu/2)n), |A∩B|=floor(mu*n).

    The three blocks sit at consecutive ids: A-only, shared, B-only.  The
    raw block sizes can overshoot n by a ceil/floor sliver; the overshoot
    is trimmed from A-only first, then B-only.  Returns (graph, A, B).
    """
    mu = Fraction(mu)
    if n < 1 or not 0 < mu <= 1:
        raise InputError("need n >= 1 and 0 < mu <= 1")
    clique = ceil((Fraction(1, 2) + mu / 2) * n)
    shared = floor(mu * n)
    a_only = clique - shared
    b_only = clique - shared
    excess = a_only + b_only + shared - n
    if excess < 0:
        raise InputError("block sizes undershoot n; mu out of usable range")
    trim = min(excess, a_only)
    a_only -= trim
    b_only -= excess - trim
    if b_only < 0:
        raise InputError("block sizes infeasible for this (n, mu)")
    a = set(range(a_only + shared))
    b = set(range(a_only, n))
    edges = []
    for block in (sorted(a), sorted(b)):
        for i, u in enumerate(block):
            for v in block[i + 1:]:
                edges.append((u, v))
    return Graph.from_edges(n, set(edges)), a, b


def clique_complement(n: int, mu: Fraction) -> Graph:
    """Independent set of floor((1-mu)n) fully joined to a clique on the rest.

    Every vertex pair is either inside the clique or meets the join, so the
    graph is uniformly dense, yet an independent majority blocks Hamilton
    cycles.  Independent block first, clique block last.
    """
    mu = Fraction(mu)
    if n < 1 or not 0 < mu <= 1:
        raise InputError("need n >= 1 and 0 < mu <= 1")
    ind = floor((1 - mu) * n)
    edges = []
    for u in range(ind, n):
        for v in range(u + 1, n):
            edges.append((u, v))
    for u in range(ind):
        for v in range(ind, n):
            edges.append((u, v))
    return Graph.from_edges(n, edges)


def generate(spec: GenSpec) -> Graph:
    """Dispatch a GenSpec to its family; used by the CLI."""
    fam = spec.family
    p = spec.params
    if fam == "gnp":
        return gnp(p["n"], Fraction(p["p"]), spec.seed or 0)
    if fam == "random_bipartite":
        return random_bipartite(p["n"], Fraction(p["p"]), spec.seed or 0)
    if fam == "multipartite":
        return complete_multipartite(p["parts"])
    if fam == "two_cliques":
        return two_overlapping_cliques(p["n"], Fraction(p["mu"]))
    if fam == "clique_complement":
        return clique_complement(p["n"], Fraction(p["mu"]))
    raise InputError(f"unknown family '{fam}'")
