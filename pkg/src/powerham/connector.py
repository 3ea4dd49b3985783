"""Short k-paths between two prescribed ordered cliques.

Two independent constructions live here.  The workhorse is an exact search
over end-tuple states: a partial path is summarized by its last k vertices,
a new vertex must land in the AND of their adjacency rows, and iterative
deepening on the inner-vertex count finds a shortest connection first (the
depth-limited DFS explores exactly the breadth-first skeleton, but keeps
on-path disjointness exact).  Docking against the target tuple is pruned
early with prefix-ANDs of the target's adjacency rows, then re-verified by
literally appending the target vertices through the same window checks.

The second construction grows a rope: a walk between the two neighborhoods
whose singletons get blown up into k-cliques chosen inside the common
neighborhood of the surrounding parts.  It is randomized, retried on dead
ends, and kept because it scales to regimes where exact search cannot go;
the exact search is what the completeness tests pin down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from powerham.errors import InputError, SizeError
from powerham.graph import (Graph, is_clique, iter_bits, list_cliques,
                            mask_of, verts_of)
from powerham.pathcover import KPath
from powerham.rng import SplitMix64
from powerham.walks import DeltaSchedule, count_walks, find_walk_level

ROPE_RETRIES = 32


@dataclass(frozen=True)
class ConnectRequest:
    x_end: tuple[int, ...]
    y_end: tuple[int, ...]
    k: int
    max_inner: int
    forbidden: int = 0                    # vertex mask
    allowed_inner: Optional[int] = None   # vertex mask; None = anywhere
    prefer_inner: int = 0                 # vertex mask, tried first
    seed: int = 0
    node_budget: Optional[int] = None     # None = exhaustive
    min_inner: int = 0                    # skip connections shorter than this

    def _validate(self, g: Graph) -> None:
        if self.k < 1 or len(self.x_end) != self.k or len(self.y_end) != self.k:
            raise InputError("ends must be ordered k-tuples")
        xm, ym = mask_of(self.x_end), mask_of(self.y_end)
        if xm & ym:
            raise InputError("ends must be disjoint")
        if not is_clique(g, self.x_end) or not is_clique(g, self.y_end):
            raise InputError("ends must span cliques")
        if self.forbidden & (xm | ym):
            raise InputError("forbidden set may not touch the ends")
        if self.max_inner < 0:
            raise InputError("max_inner must be >= 0")
        if not 0 <= self.min_inner <= self.max_inner:
            raise InputError("min_inner must lie in [0, max_inner]")


def _window(g: Graph, vs) -> int:
    out = g.full_mask()
    for v in vs:
        out &= g.adj[v]
    return out


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit):
        self.left = limit

    def spend(self) -> bool:
        if self.left is None:
            return True
        if self.left <= 0:
            return False
        self.left -= 1
        return True


def _search(g: Graph, req: ConnectRequest, m: int, budget: _Budget,
            priority, count_mode: bool):
    """DFS for connections with exactly m inner vertices.

    Returns a vertex tuple (or the exact count in count_mode); None when
    the space is exhausted, and raises nothing on budget exhaustion --
    the caller treats a dead budget as a miss.
    """
    k = req.k
    ends_mask = mask_of(req.x_end) | mask_of(req.y_end)
    pool = g.full_mask() & ~ends_mask & ~req.forbidden
    if req.allowed_inner is not None:
        pool &= req.allowed_inner
    # dock[j] = AND of the first j target rows, for early pruning
    dock = [g.full_mask()]
    for y in req.y_end:
        dock.append(dock[-1] & g.adj[y])

    seq = list(req.x_end)
    total = 0

    def dockable() -> bool:
        # append y_end through the same window discipline
        trial = seq[-k:]
        for y in req.y_end:
            if not all(g.adj[y] >> u & 1 for u in trial):
                return False
            trial = trial[1:] + [y]
        return True

    def rec(depth: int, used: int) -> Optional[tuple[int, ...]]:
        nonlocal total
        if depth == m:
            if dockable():
                if count_mode:
                    total += 1
                    return None
                return tuple(seq) + tuple(req.y_end)
            return None
        if not budget.spend():
            return None
        win = _window(g, seq[-k:]) & pool & ~used
        # inner vertices close to the dock must already see its prefix
        j = depth + 1 + k - m
        if j >= 1:
            win &= dock[min(j, k)]
        cands = sorted(iter_bits(win),
                       key=lambda v: (not req.prefer_inner >> v & 1, priority[v]))
        for v in cands:
            seq.append(v)
            got = rec(depth + 1, used | 1 << v)
            seq.pop()
            if got is not None:
                return got
        return None

    got = rec(0, 0)
    if count_mode:
        return total
    return got


def connect(g: Graph, req: ConnectRequest) -> Optional[KPath]:
    """Shortest-inner-count connection between the two ordered ends."""
    req._validate(g)
    rng = SplitMix64(req.seed)
    order = list(range(g.n))
    rng.shuffle(order)
    priority = [0] * g.n
    for rank, v in enumerate(order):
        priority[v] = rank
    budget = _Budget(req.node_budget)
    for m in range(req.min_inner, req.max_inner + 1):
        got = _search(g, req, m, budget, priority, count_mode=False)
        if got is not None:
            return KPath(req.k, got)
        if budget.left is not None and budget.left <= 0:
            return None
    return None


def enumerate_connections(g: Graph, req: ConnectRequest, m: int) -> int:
    """Exact count of connections with exactly m inner vertices."""
    req._validate(g)
    if m > 6 or g.n > 30:
        raise SizeError("enumeration is capped at m <= 6, n <= 30")
    if m < 0:
        raise InputError("m must be >= 0")
    return _search(g, req, m, _Budget(None), list(range(g.n)),
                   count_mode=True)


# ------------------------------------------------------------------- ropes

@dataclass(frozen=True)
class Rope:
    """Parts Z_0..Z_{l+1}; ends and the first `a` inner parts are k-cliques,
    the remaining inner parts singletons; consecutive parts fully joined."""

    k: int
    parts: tuple[tuple[int, ...], ...]
    a: int

    @property
    def ell(self) -> int:
        return len(self.parts) - 2


def validate_rope(g: Graph, r: Rope) -> bool:
    k, parts = r.k, r.parts
    if len(parts) < 2 or not 0 <= r.a <= r.ell:
        return False
    for i, part in enumerate(parts):
        inner_index = i - 1
        if i in (0, len(parts) - 1) or 0 <= inner_index < r.a:
            if len(part) != k or not is_clique(g, part):
                return False
        elif len(part) != 1:
            return False
    for a, b in zip(parts, parts[1:]):
        for u in a:
            for v in b:
                if not g.adj[u] >> v & 1:
                    return False
    return True


def build_rope(g: Graph, x_end, y_end, k: int, schedule: DeltaSchedule,
               a_target: Optional[int], seed: int) -> Optional[Rope]:
    """Randomized rope construction: walk first, then blow-ups left to right.

    a_target = None blows up every inner part; an int is clamped to the
    walk's length.  Dead ends (no clique fits a blow-up) restart the whole
    construction with fresh randomness, up to ROPE_RETRIES attempts.
    """
    if len(x_end) != k or len(y_end) != k or mask_of(x_end) & mask_of(y_end):
        raise InputError("ends must be disjoint k-tuples")
    if not is_clique(g, x_end) or not is_clique(g, y_end):
        raise InputError("ends must span cliques")
    rng = SplitMix64(seed)
    ends_mask = mask_of(x_end) | mask_of(y_end)
    inner_g = g.without_vertices(verts_of(ends_mask))
    x_nbhd = verts_of(_window(g, x_end) & ~ends_mask)
    y_nbhd = verts_of(_window(g, y_end) & ~ends_mask)
    if not x_nbhd or not y_nbhd:
        return None

    for _ in range(ROPE_RETRIES):
        u = x_nbhd[rng.below(len(x_nbhd))]
        v = y_nbhd[rng.below(len(y_nbhd))]
        if u == v:
            continue
        found = find_walk_level(inner_g, u, v, schedule)
        if found is None:
            continue
        level, _count = found
        walk = _sample_walk(inner_g, u, v, level, rng)
        parts = [tuple(x_end)] + [(w,) for w in walk] + [tuple(y_end)]
        ell = len(parts) - 2
        a = ell if a_target is None else min(a_target, ell)
        if _blow_up(g, parts, k, a, rng):
            return Rope(k, tuple(parts), a)
    return None


def _sample_walk(g: Graph, u: int, v: int, inner: int,
                 rng: SplitMix64) -> list[int]:
    """One (u,v)-walk with `inner` inner vertices, weighted uniformly."""
    table = count_walks(g, u, inner)
    walk = [v]
    nxt = v
    for i in range(inner, 0, -1):
        options = [w for w in iter_bits(g.adj[nxt])
                   if table.counts[i - 1][w] > 0]
        weights = [table.counts[i - 1][w] for w in options]
        nxt = options[rng.weighted_choice(weights)]
        walk.append(nxt)
    walk.append(u)
    walk.reverse()
    return walk


def _blow_up(g: Graph, parts: list, k: int, a: int, rng: SplitMix64) -> bool:
    """Replace the first `a` singleton inner parts with k-cliques, in place."""
    for j in range(1, a + 1):
        # the replaced singleton may reappear inside its own blow-up
        used = mask_of(v for i, part in enumerate(parts) if i != j
                       for v in part)
        room = _window(g, parts[j - 1]) & _window(g, parts[j + 1]) & ~used
        cliques = list(list_cliques(g, k, within=room))
        if not cliques:
            return False
        parts[j] = cliques[rng.below(len(cliques))]
    return True


def rope_to_path(r: Rope) -> Optional[KPath]:
    """Concatenate a fully blown rope; None when a vertex repeats."""
    if r.a != r.ell:
        raise InputError("rope must be fully blown up")
    seq = tuple(v for part in r.parts for v in part)
    if len(set(seq)) != len(seq):
        return None
    return KPath(r.k, seq)
