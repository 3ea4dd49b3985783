"""Absorbers: prebuilt path segments that can swallow one extra vertex each.

A v-absorber is a clique on 2k vertices drawn from the neighborhood of v,
split into two halves that each have a large common neighborhood.  Laid

down consecutively inside a path, the segment stays a valid k-path whether
or not v is spliced into its midpoint, because v is adjacent to all 2k
segment vertices and any window containing v sees only segment vertices.

The module covers the full lifecycle: enumerate candidate absorbers per
vertex, sample a pairwise disjoint family with per-vertex rate limiting,
join the family into one absorbing path, and finally absorb a set of
leftover vertices by matching them to free segments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import Iterable

from .connector import ConnectRequest, connect
from .errors import AssemblyError, CapacityError, InputError
from .graph import Graph, is_clique, list_cliques, mask_of, verts_of
from .pathcover import KPath, is_valid_kpath
from .properties import is_connectable
from .rng import DEFAULT_SEED, SplitMix64

PER_VERTEX_CAP = 8
ENUMERATION_SLACK = 4    # fetch a few extra candidates; disjointification eats some


@dataclass(frozen=True)
class VAbsorber:
    """An ordered 2k-clique inside N(v) whose halves are both connectable."""

    v: int
    clique: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.clique) % 2 != 0 or not self.clique:
            raise InputError("absorber clique must have 2k vertices")
        if len(set(self.clique)) != len(self.clique):
            raise InputError("absorber clique has repeated vertices")
        if self.v in self.clique:
            raise InputError("absorber clique must avoid its own vertex")

    @property
    def k(self) -> int:
        return len(self.clique) // 2

    @property
    def x_half(self) -> tuple[int, ...]:
        return self.clique[: self.k]

    @property
    def y_half(self) -> tuple[int, ...]:
        return self.clique[self.k :]

    @property
    def mask(self) -> int:
        return mask_of(self.clique)


def is_valid_absorber(g: Graph, ab: VAbsorber, zeta: Fraction) -> bool:
    """Recheck every defining property of a v-absorber from scratch."""
    k = ab.k
    nb = g.adj[ab.v]
    if any(not (nb >> u) & 1 for u in ab.clique):
        return False
    for a, b in combinations(ab.clique, 2):
        if not g.has_edge(a, b):
            return False
    threshold = ceil(Fraction(zeta) * g.n)
    return (is_connectable(g, ab.x_half, threshold)
            and is_connectable(g, ab.y_half, threshold))


def find_v_absorbers(g: Graph, v: int, k: int, zeta: Fraction,
                     limit: int | None = None) -> list[VAbsorber]:
    """Enumerate absorbers for v in a fixed deterministic order.

    Each 2k-clique inside N(v) contributes at most one absorber: the first
    half/half split (in index order, with the smallest vertex pinned to the
    x-half) where both halves clear the connectable threshold.  Returns an
    empty list when deg(v) < 2k or no split qualifies.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    if not 0 <= v < g.n:
        raise InputError("vertex out of range")
    zeta = Fraction(zeta)
    threshold = ceil(zeta * g.n)
    out: list[VAbsorber] = []
    for cl in list_cliques(g, 2 * k, within=g.adj[v]):
        for rest in combinations(range(1, 2 * k), k - 1):
            xs = (cl[0],) + tuple(cl[i] for i in rest)
            ys = tuple(u for u in cl if u not in xs)
            if (is_connectable(g, xs, threshold)
                    and is_connectable(g, ys, threshold)):
                out.append(VAbsorber(v, xs + ys))
                break
        if limit is not None and len(out) >= limit:
            break
    return out


@dataclass(frozen=True)
class FamilyStats:
    """Bookkeeping from one sampling run."""

    sampled: int          # candidates that survived the coin flips
    discarded: int        # sampled candidates dropped for overlap or caps
    members: int
    candidates_min: int   # per-vertex sampled counts, before disjointification
    candidates_mean: float
    coverage_min: int     # per-vertex usable members, after disjointification
    coverage_mean: float

    @property
    def discard_rate(self) -> float:
        return self.discarded / self.sampled if self.sampled else 0.0


class AbsorberFamily:
    """A pairwise disjoint collection of absorbers with usage tracking.

    ``per_vertex_index`` maps every vertex to the member indices it could be
    absorbed by; a member sampled for one vertex often serves many others.
    ``usage`` flags flip to True when :func:`absorb` spends a segment.
    """

    __slots__ = ("k", "members", "per_vertex_index", "usage")

    def __init__(self, k: int, members: tuple[VAbsorber, ...],
                 per_vertex_index: dict[int, tuple[int, ...]]) -> None:
        self.k = k
        self.members = members
        self.per_vertex_index = per_vertex_index
        self.usage = [False] * len(members)

    def __len__(self) -> int:
        return len(self.members)

    def mask(self) -> int:
        m = 0
        for ab in self.members:
            m |= ab.mask
        return m

    def validate(self, g: Graph, zeta: Fraction) -> None:
        seen = 0
        for ab in self.members:
            if ab.k != self.k:
                raise InputError("family members disagree on k")
            if seen & ab.mask:
                raise InputError("family members overlap")
            seen |= ab.mask
            if not is_valid_absorber(g, ab, zeta):
                raise InputError(f"member for vertex {ab.v} is not an absorber")


def _index_members(g: Graph, members: tuple[VAbsorber, ...]
                   ) -> dict[int, tuple[int, ...]]:
    # a segment absorbs w exactly when w is adjacent to all 2k of its vertices
    index: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for i, ab in enumerate(members):
        m = ab.mask
        for w in range(g.n):
            if g.adj[w] & m == m:
                index[w].append(i)
    return {v: tuple(ids) for v, ids in index.items()}


def _draw_candidates(g: Graph, v: int, k: int, threshold: int, p: Fraction,
                     rng: SplitMix64, want: int, attempts: int) -> list[VAbsorber]:
    # random draws rather than a slice of the deterministic enumeration:
    # lexicographic prefixes collide across vertices and starve the family
    nb = verts_of(g.adj[v])
    if len(nb) < 2 * k:
        return []
    seen: set[tuple[int, ...]] = set()
    out: list[VAbsorber] = []
    for _ in range(attempts):
        if len(out) >= want:
            break
        picked: list[int] = []
        mask = 0
        for _ in range(2 * k):
            u = nb[rng.below(len(nb))]
            while (mask >> u) & 1:
                u = nb[rng.below(len(nb))]
            picked.append(u)
            mask |= 1 << u
        tup = tuple(sorted(picked))
        if tup in seen:
            continue
        seen.add(tup)
        if not is_clique(g, tup):
            continue
        split = None
        for rest in combinations(range(1, 2 * k), k - 1):
            xs = (tup[0],) + tuple(tup[i] for i in rest)
            ys = tuple(u for u in tup if u not in xs)
            if (is_connectable(g, xs, threshold)
                    and is_connectable(g, ys, threshold)):
                split = xs + ys
                break
        if split is not None and rng.chance(p):
            out.append(VAbsorber(v, split))
    return out


def sample_family(g: Graph, k: int, zeta: Fraction, p: Fraction, seed: int = DEFAULT_SEED,
                  per_vertex_cap: int = PER_VERTEX_CAP,
                  max_members: int | None = None
                  ) -> tuple[AbsorberFamily, FamilyStats]:
    """Sample a disjoint absorber family, rate limited per vertex.

    Candidate 2k-tuples are drawn at random from each neighborhood, checked
    for the absorber properties, kept independently with probability p, then
    admitted round robin across vertices so no vertex floods the family
    before others get a turn.  A candidate is discarded when it overlaps an
    admitted member or its vertex already owns ``per_vertex_cap`` members;
    ``max_members`` caps the whole family.
    """
    p = Fraction(p)
    if not 0 < p <= 1:
        raise InputError("sampling rate must lie in (0, 1]")
    if per_vertex_cap < 1:
        raise InputError("per-vertex cap must be >= 1")
    rng = SplitMix64(seed)
    threshold = ceil(Fraction(zeta) * g.n)
    fetch = per_vertex_cap * ENUMERATION_SLACK
    kept: dict[int, list[VAbsorber]] = {}
    sampled = 0
    counts = []
    for v in range(g.n):
        picked = _draw_candidates(g, v, k, threshold, p, rng,
                                  want=fetch, attempts=16 * fetch)
        counts.append(len(picked))
        sampled += len(picked)
        if picked:
            kept[v] = picked

    members: list[VAbsorber] = []
    owned = {v: 0 for v in kept}
    used = 0
    discarded = 0
    queues = {v: list(reversed(cands)) for v, cands in kept.items()}
    # vertices with the fewest neighbors are hostable by the fewest
    # segments, so they get first claim on owning one
    admit_order = sorted(queues, key=lambda v: (g.adj[v].bit_count(), v))
    progress = True
    while progress and (max_members is None or len(members) < max_members):
        progress = False
        for v in admit_order:
            if max_members is not None and len(members) >= max_members:
                break
            queue = queues[v]
            while queue:
                cand = queue.pop()
                if owned[v] >= per_vertex_cap:
                    discarded += 1
                    continue
                if cand.mask & used:
                    discarded += 1
                    continue
                members.append(cand)
                owned[v] += 1
                used |= cand.mask
                progress = True
                break   # one admission per vertex per round

    # rescue pass: random draws thin out badly once the admitted members
    # blanket the dense core, so an undershot family is topped up by direct
    # enumeration among vertices no member has claimed yet
    if max_members is not None and len(members) < max_members:
        order = list(range(g.n))
        rng.shuffle(order)
        for v in order:
            if len(members) >= max_members:
                break
            if owned.get(v, 0) >= per_vertex_cap:
                continue
            within = g.adj[v] & ~used & ~(1 << v)
            if within.bit_count() < 2 * k:
                continue
            # unclaimed vertices sit on the sparse fringe, so rank their
            # cliques by common neighborhood size: a segment only ever
            # absorbs vertices adjacent to all 2k of its members
            best = None
            for cl in list_cliques(g, 2 * k, within=within):
                common = g.full_mask()
                for u in cl:
                    common &= g.adj[u]
                score = common.bit_count()
                if best is not None and score <= best[0]:
                    continue
                split = None
                for rest in combinations(range(1, 2 * k), k - 1):
                    xs = (cl[0],) + tuple(cl[i] for i in rest)
                    ys = tuple(u for u in cl if u not in xs)
                    if (is_connectable(g, xs, threshold)
                            and is_connectable(g, ys, threshold)):
                        split = xs + ys
                        break
                if split is not None:
                    best = (score, split)
            if best is not None:
                members.append(VAbsorber(v, best[1]))
                owned[v] = owned.get(v, 0) + 1
                used |= mask_of(best[1])

    fam = AbsorberFamily(k, tuple(members), _index_members(g, tuple(members)))
    coverage = [len(fam.per_vertex_index[v]) for v in range(g.n)]
    stats = FamilyStats(
        sampled=sampled,
        discarded=discarded,
        members=len(members),
        candidates_min=min(counts) if counts else 0,
        candidates_mean=sum(counts) / len(counts) if counts else 0.0,
        coverage_min=min(coverage) if coverage else 0,
        coverage_mean=sum(coverage) / len(coverage) if coverage else 0.0,
    )
    return fam, stats


@dataclass(frozen=True, eq=False)
class AbsorbingPath:
    """A k-path threading every family member as one contiguous segment.

    ``starts[i]`` is the position of ``member_ids[i]``'s segment inside
    ``path``; positions refer to the path as built, so absorb once and
    rebuild rather than absorbing into an already grown path.
    """

    path: KPath
    family: AbsorberFamily
    member_ids: tuple[int, ...]
    starts: tuple[int, ...]

    @property
    def k(self) -> int:
        return self.path.k

    def segment(self, i: int) -> tuple[int, ...]:
        s = self.starts[i]
        return self.path.vertices[s : s + 2 * self.path.k]

    def free_segments(self) -> list[int]:
        return [i for i, mid in enumerate(self.member_ids)
                if not self.family.usage[mid]]


def build_absorbing_path(g: Graph, k: int, zeta: Fraction, family: AbsorberFamily,
                         seed: int = DEFAULT_SEED, max_inner: int = 12,
                         node_budget: int | None = None) -> AbsorbingPath:
    """Join all family members into a single k-path, in owner order.

    Members are visited ascending by the vertex they were sampled for; each
    join connects the y-half of the previous segment to the x-half of the
    next one.  Everything already placed plus every not-yet-placed segment
    is forbidden as connector interior, so segments stay contiguous.
    Raises AssemblyError naming the failing pair when a join cannot be made.
    """
    if family.k != k:
        raise InputError("family was sampled for a different k")
    if not family.members:
        raise InputError("cannot assemble an empty family")
    family.validate(g, zeta)
    rng = SplitMix64(seed)
    order = sorted(range(len(family.members)),
                   key=lambda i: (family.members[i].v, family.members[i].clique))
    members = [family.members[i] for i in order]

    verts = list(members[0].clique)
    starts = [0]
    placed_mask = members[0].mask
    pending_mask = 0
    for ab in members[1:]:
        pending_mask |= ab.mask
    for prev, nxt in zip(members, members[1:]):
        # nxt's y-half stays forbidden: contiguity, and it follows immediately
        forbidden = (placed_mask | pending_mask) & ~mask_of(prev.y_half) \
            & ~mask_of(nxt.x_half)
        pending_mask &= ~nxt.mask
        attempts = 1 if node_budget is None else 3
        piece = None
        for _ in range(attempts):
            req = ConnectRequest(x_end=prev.y_half, y_end=nxt.x_half, k=k,
                                 max_inner=max_inner, forbidden=forbidden,
                                 seed=rng.next_u64(), node_budget=node_budget)
            piece = connect(g, req)
            if piece is not None:
                break
        if piece is None:
            raise AssemblyError(
                f"cannot join the segment for vertex {prev.v} "
                f"to the segment for vertex {nxt.v}")
        inner = piece.vertices[k:-k]
        verts.extend(inner)
        starts.append(len(verts))
        verts.extend(nxt.clique)
        placed_mask |= mask_of(inner) | nxt.mask

    path = KPath(k, tuple(verts))
    if not is_valid_kpath(g, path):
        raise AssemblyError("assembled segments do not form a valid k-path")
    return AbsorbingPath(path, family, tuple(order), tuple(starts))


def absorb(g: Graph, pa: AbsorbingPath, x_set: Iterable[int]) -> KPath:
    """Insert every vertex of x_set between the halves of free segments.

    Singletons first: vertices are matched one-per-segment by augmenting
    paths, so a one-each assignment is found whenever it exists at all.
    Vertices left over by the matching are packed as groups: a segment's
    halves come from one clique, so it can host any clique of up to k
    vertices each adjacent to that whole clique (every pair inside a
    crossing window is then an edge).  Raises CapacityError for the first
    vertex (ascending) that fits nowhere.
    """
    xs = sorted(set(x_set))
    if not xs:
        return pa.path
    path_mask = pa.path.mask
    for v in xs:
        if not 0 <= v < g.n:
            raise InputError(f"vertex {v} out of range")
        if (path_mask >> v) & 1:
            raise InputError(f"vertex {v} already lies on the path")

    k = pa.path.k
    free = pa.free_segments()
    seg_masks = {i: mask_of(pa.segment(i)) for i in free}
    usable = {v: [i for i in free if g.adj[v] & seg_masks[i] == seg_masks[i]]
              for v in xs}

    matched: dict[int, int] = {}   # segment -> its singleton vertex

    def augment(v: int, visited: set[int]) -> bool:
        for i in usable[v]:
            if i in visited:
                continue
            visited.add(i)
            if i not in matched or augment(matched[i], visited):
                matched[i] = v
                return True
        return False

    groups: dict[int, list[int]] = {}
    spill: list[int] = []
    for v in xs:
        if not augment(v, set()):
            spill.append(v)
    for i, v in matched.items():
        groups[i] = [v]
    for v in spill:
        for i in usable[v]:
            grp = groups.setdefault(i, [])
            if len(grp) < k and all((g.adj[v] >> w) & 1 for w in grp):
                grp.append(v)
                break
        else:
            raise CapacityError(f"no free absorber segment can take vertex {v}")

    verts = list(pa.path.vertices)
    for i, grp in sorted(groups.items(), key=lambda t: pa.starts[t[0]],
                         reverse=True):
        verts[pa.starts[i] + k:pa.starts[i] + k] = sorted(grp)
        pa.family.usage[pa.member_ids[i]] = True
    out = KPath(pa.path.k, tuple(verts))
    if not is_valid_kpath(g, out):
        raise CapacityError("absorption produced an invalid path")
    return out
