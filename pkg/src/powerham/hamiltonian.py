"""End-to-end search for the k-th power of a Hamiltonian cycle.

The pipeline runs the absorption argument in proof order: sample and join
an absorber family into one long path, set aside a random reservoir, cover
what is left by tight paths, close everything into a cycle through the
reservoir, then absorb the stragglers into the absorber segments.  Every
certificate is verified internally before it is returned, and a bounded
brute-force oracle provides independent ground truth on small graphs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Optional

from powerham.absorber import absorb, build_absorbing_path, sample_family
from powerham.connector import ConnectRequest, connect
from powerham.constants import feasibility, main_constants
from powerham.errors import (AssemblyError, CapacityError, InfeasibleSetError,
                             InputError, PowerhamError, SizeError)
from powerham.graph import Graph, is_clique, list_cliques, mask_of, verts_of
from powerham.pathcover import KPath, cover_with_paths
from powerham.properties import inseparable_heuristic, is_connectable
from powerham.rng import DEFAULT_SEED, SplitMix64

STAGES = ("absorbing_path", "reservoir", "cover", "connect", "absorb")

ORACLE_CAP = 14
MAX_HITTING_SETS = 64
MAX_INNER_CAP = 24
# node budgets keep the exact searches from stalling on adversarial pools
ASSEMBLY_NODE_BUDGET = 100_000
CONNECT_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for one pipeline run; frozen so reports can reference it."""
    k: int
    zeta: Fraction = Fraction(1, 25)
    reservoir_fraction: Fraction = Fraction(1, 10)
    stop_fraction: Optional[Fraction] = None
    retries: int = 9
    seed: int = DEFAULT_SEED
    mode: str = "practical"

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be >= 1")
        object.__setattr__(self, "zeta", Fraction(self.zeta))
        object.__setattr__(self, "reservoir_fraction",
                           Fraction(self.reservoir_fraction))
        if not 0 < self.zeta < 1:
            raise InputError("zeta must lie in (0, 1)")
        if not 0 < self.reservoir_fraction < 1:
            raise InputError("reservoir_fraction must lie in (0, 1)")
        if self.stop_fraction is not None:
            object.__setattr__(self, "stop_fraction",
                               Fraction(self.stop_fraction))
            if not 0 < self.stop_fraction < 1:
                raise InputError("stop_fraction must lie in (0, 1)")
        if self.retries < 0:
            raise InputError("retries must be >= 0")
        if self.mode not in ("practical", "paper_constants"):
            raise InputError("mode must be practical or paper_constants")


@dataclass(frozen=True)
class Certificate:
    """A cyclic ordering claimed to realize the k-th cycle power."""
    k: int
    ordering: tuple[int, ...]

    def to_json_dict(self):
        return {"k": self.k, "ordering": list(self.ordering)}


def canonicalize(cert: Certificate) -> Certificate:
    """Rotate to start at vertex 0 and keep the lex-smaller direction."""
    o = cert.ordering
    if 0 not in o:
        raise InputError("ordering does not contain vertex 0")
    i = o.index(0)
    fwd = o[i:] + o[:i]
    rev = tuple(reversed(o))
    j = rev.index(0)
    bwd = rev[j:] + rev[:j]
    return Certificate(cert.k, min(fwd, bwd))


def verify(g: Graph, cert: Certificate
           ) -> tuple[bool, Optional[tuple[int, int]]]:
    """Check every pair at cyclic distance <= k; report the first miss.

    The ordering must be a permutation of the vertex set, anything else is
    an input error rather than a verification failure.
    """
    o = cert.ordering
    n = g.n
    if sorted(o) != list(range(n)):
        raise InputError("ordering is not a permutation of the vertices")
    if cert.k < 1:
        raise InputError("k must be >= 1")
    for i in range(n):
        for d in range(1, cert.k + 1):
            if d % n == 0:
                continue    # the pair wraps onto itself
            u, v = o[i], o[(i + d) % n]
            if not g.has_edge(u, v):
                return False, (u, v)
    return True, None


def extract_clique_factor(g: Graph, cert: Certificate
                          ) -> tuple[tuple[int, ...], ...]:
    """Cut floor(n/(k+1)) disjoint (k+1)-cliques out of consecutive windows."""
    o, k = cert.ordering, cert.k
    out = []
    for i in range(len(o) // (k + 1)):
        win = o[i * (k + 1):(i + 1) * (k + 1)]
        if not is_clique(g, win):
            raise PowerhamError(f"window {win} is not a clique")
        out.append(win)
    return tuple(out)


def brute_force_oracle(g: Graph, k: int) -> Optional[Certificate]:
    """Exhaustive search for a certificate, usable as independent truth.

    Backtracking over cyclic orderings anchored at vertex 0; a candidate
    must be adjacent to the last k placed vertices, and near the end also
    to the vertices it will wrap onto.  Mirror orderings are cut at the
    leaves, which is safe because the search generates both directions.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    n = g.n
    if n > ORACLE_CAP:
        raise SizeError(f"oracle handles n <= {ORACLE_CAP} only")
    if n == 1:
        return Certificate(k, (0,))
    if n == 2:
        return Certificate(k, (0, 1)) if g.has_edge(0, 1) else None

    order = [0] * n
    found: Optional[tuple[int, ...]] = None

    def place(p: int, used: int) -> bool:
        nonlocal found
        if p == n:
            if order[1] < order[-1]:
                found = tuple(order)
                return True
            return False
        cand = g.full_mask() & ~used
        for i in range(max(0, p - k), p):
            cand &= g.adj[order[i]]
        # wraparound: positions past n-k close pairs with the first ones
        for j in range(0, p + k - n + 1):
            cand &= g.adj[order[j]]
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            order[p] = v
            if place(p + 1, used | (1 << v)):
                return True
        return False

    if not place(1, 1):
        return None
    cert = canonicalize(Certificate(k, found))
    ok, _ = verify(g, cert)
    if not ok:
        raise PowerhamError("oracle produced an invalid certificate")
    return cert


@dataclass(frozen=True)
class StageReport:
    """What each stage did, which seeds it used, and where it stopped."""
    n: int
    k: int
    mode: str
    attempts: int
    failed_stage: Optional[str]
    stages: dict
    timings: dict
    notes: tuple[str, ...] = ()

    def to_json_dict(self):
        # timings stay out: reports must be byte-stable across runs
        return {"n": self.n, "k": self.k, "mode": self.mode,
                "attempts": self.attempts, "failed_stage": self.failed_stage,
                "stages": self.stages, "notes": list(self.notes)}


@dataclass(frozen=True)
class PipelineResult:
    certificate: Optional[Certificate]
    report: StageReport

    @property
    def ok(self) -> bool:
        return self.certificate is not None


class _StageFailure(Exception):
    def __init__(self, stage: str, stages: dict, timings: dict):
        super().__init__(stage)
        self.stage = stage
        self.stages = stages
        self.timings = timings


def _family_target(n: int, k: int) -> int:
    # absorbing capacity scales with the family; spend about 2n/3 on the
    # path so the stop gate (half capacity) leaves the cover stage slack
    return max(2, round(2 * n / (3 * (2 * k + 1))))


def _practical_max_inner(g: Graph, k: int) -> int:
    """Connection length ceiling, scaled to how separable the graph looks."""
    mu = inseparable_heuristic(g, seed=0, budget=2000).mu_star
    level = MAX_INNER_CAP if mu <= 0 else int(8 / mu) + 2
    return max(k + 2, min(level, MAX_INNER_CAP))


@dataclass
class _CycleLayout:
    """A successful cyclic hookup of the head and the cover paths."""
    sequence: list
    inners: list
    route: int
    widen: int
    reservoir_used: int
    leftover_routed: int
    stage: dict

    @property
    def joints(self) -> int:
        return len(self.inners)


def _close_cycle(g: Graph, k: int, head: KPath, cover, reservoir: int,
                 max_inner: int, seed: int, prefer: int = 0):
    """Join head and cover paths into one cycle, routing through the pool.

    Piece order and direction are free choices made greedily per joint;
    inner lengths aim at an even split of the pool over the joints that
    remain, so the absorb stage inherits as little as possible.  Returns a
    _CycleLayout, or a dict describing the joint that failed.
    """
    route = reservoir
    widen = mask_of(cover.leftover)
    crng = SplitMix64(seed)
    joints = len(cover.paths) + 1
    sequence: list[KPath] = [head]
    available: list[KPath] = list(cover.paths)
    inners: list[tuple[int, ...]] = []
    reservoir_used = 0
    leftover_routed = 0
    cur = head
    for j in range(joints):
        avail = route | widen
        share = ceil(avail.bit_count() / (joints - j)) if avail else 0
        target = min(share, max_inner, avail.bit_count())
        if available:
            options = [(i, p) for i, p in enumerate(available)]
            options += [(i, KPath(k, tuple(reversed(p.vertices))))
                        for i, p in enumerate(available)]
        else:
            options = [(-1, head)]      # close the cycle
        ladder = list(range(target, -1, -1))
        ladder += list(range(target + 1, max_inner + 1))
        found = None
        for t in ladder:
            for i, cand in options:
                req = ConnectRequest(x_end=cur.y_end, y_end=cand.x_end, k=k,
                                     max_inner=t, min_inner=t,
                                     allowed_inner=avail,
                                     prefer_inner=prefer & avail,
                                     seed=crng.next_u64(),
                                     node_budget=CONNECT_NODE_BUDGET)
                piece = connect(g, req)
                if piece is None:
                    continue
                if not available:
                    # closing joint: a closure that strands a vertex no
                    # segment can host would doom the absorb stage, so
                    # keep looking for one that routes them all
                    im = mask_of(piece.vertices[k:-k])
                    if (avail & ~im) & prefer:
                        continue
                found = (i, cand, piece)
                break
            if found:
                break
        if found is None:
            return {"joints": joints, "failed_joint": j,
                    "pool": avail.bit_count(),
                    "pieces_left": len(available), "seed": seed}
        i, cand, piece = found
        inner = piece.vertices[k:-k]
        im = mask_of(inner)
        reservoir_used += (im & route).bit_count()
        leftover_routed += (im & widen).bit_count()
        route &= ~im
        widen &= ~im
        inners.append(inner)
        if i >= 0:
            available.pop(i)
            sequence.append(cand)
            cur = cand
    stage = {"joints": joints, "inner_total": sum(len(x) for x in inners),
             "reservoir_used": reservoir_used,
             "leftover_routed": leftover_routed,
             "seed": seed}
    return _CycleLayout(sequence, inners, route, widen,
                        reservoir_used, leftover_routed, stage)


def _stitch_hitting_cliques(g: Graph, k: int, head: KPath,
                            chosen: list[tuple[int, ...]], seed: int,
                            max_inner: int) -> KPath:
    """Append each chosen clique to the head's y side, disjointly."""
    rng = SplitMix64(seed)
    cur = head
    pending = 0
    for cl in chosen:
        pending |= mask_of(cl)
    for cl in chosen:
        pending &= ~mask_of(cl)
        req = ConnectRequest(x_end=cur.y_end, y_end=tuple(cl), k=k,
                             max_inner=max_inner,
                             allowed_inner=g.full_mask()
                             & ~(cur.mask | pending | mask_of(cl)),
                             seed=rng.next_u64(),
                             node_budget=ASSEMBLY_NODE_BUDGET)
        piece = connect(g, req)
        if piece is None:
            raise AssemblyError(
                f"cannot stitch the clique {cl} onto the absorbing path")
        cur = KPath(k, cur.vertices + piece.vertices[k:])
    return cur


def _attempt(g: Graph, cfg: PipelineConfig, seed: int, zeta: Fraction,
             reservoir_fraction: Fraction, max_inner: int,
             hitting: Optional[list[list[tuple[int, ...]]]] = None):
    """One full pass over the five stages; raises _StageFailure to retry."""
    n, k = g.n, cfg.k
    stages: dict = {}
    timings: dict = {}
    srng = SplitMix64(seed)
    s_family = srng.next_u64()
    s_build = srng.next_u64()
    s_stitch = srng.next_u64()
    s_reservoir = srng.next_u64()
    s_cover = srng.next_u64()
    s_connect = srng.next_u64()

    # -- stage 1: absorbing path
    t0 = time.perf_counter()
    fam, _stats = sample_family(g, k, zeta, Fraction(1), seed=s_family,
                                max_members=_family_target(n, k))
    stages["absorbing_path"] = {"members": len(fam), "seed": s_family}
    if len(fam) < 2:
        timings["absorbing_path"] = time.perf_counter() - t0
        raise _StageFailure("absorbing_path", stages, timings)
    try:
        pa = build_absorbing_path(g, k, zeta, fam, seed=s_build,
                                  node_budget=ASSEMBLY_NODE_BUDGET)
    except AssemblyError:
        timings["absorbing_path"] = time.perf_counter() - t0
        raise _StageFailure("absorbing_path", stages, timings)
    head = pa.path
    if hitting is not None:
        hrng = SplitMix64(s_stitch)
        chosen: list[tuple[int, ...]] = []
        taken = head.mask
        for cands in hitting:
            pool = list(cands)
            hrng.shuffle(pool)
            pick = next((cl for cl in pool if not mask_of(cl) & taken), None)
            if pick is None:
                timings["absorbing_path"] = time.perf_counter() - t0
                raise _StageFailure("absorbing_path", stages, timings)
            chosen.append(pick)
            taken |= mask_of(pick)
        try:
            head = _stitch_hitting_cliques(g, k, head, chosen, s_stitch,
                                           max_inner)
        except AssemblyError:
            timings["absorbing_path"] = time.perf_counter() - t0
            raise _StageFailure("absorbing_path", stages, timings)
        stages["absorbing_path"]["stitched"] = len(chosen)
    capacity = k * len(fam)   # each segment hosts up to a k-clique
    stages["absorbing_path"].update(path_length=len(head), capacity=capacity)
    timings["absorbing_path"] = time.perf_counter() - t0
    if cfg.stop_fraction is not None:
        stop_size = int(cfg.stop_fraction * n)
    else:
        stop_size = max(1, capacity // 2)

    # vertices no free segment can host must leave the pool by routing,
    # so the connection search is told to spend them first
    seg_masks = [mask_of(pa.segment(i)) for i in range(len(fam))]
    incompat = 0
    for v in verts_of(g.full_mask() & ~head.mask):
        if not any(g.adj[v] & sm == sm for sm in seg_masks):
            incompat |= 1 << v

    # -- stages 2-5, with one reservoir resample allowed: when the cycle
    # cannot be closed or a straggler cannot be absorbed, a fresh reservoir
    # reshuffles both the cover and the demand set, far cheaper than
    # rebuilding the family
    rseed = SplitMix64(s_reservoir)
    cseed = SplitMix64(s_cover)
    xseed = SplitMix64(s_connect)
    head_rev = KPath(k, tuple(reversed(head.vertices)))
    finished = None
    failed = "connect"
    for rnd in range(2):
        t0 = time.perf_counter()
        round_seed = rseed.next_u64()
        rrng = SplitMix64(round_seed)
        reservoir = 0
        for v in verts_of(g.full_mask() & ~head.mask):
            if rrng.chance(reservoir_fraction):
                reservoir |= 1 << v
        stages["reservoir"] = {"size": reservoir.bit_count(),
                               "rounds": rnd + 1, "seed": round_seed}
        timings["reservoir"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        # a residue small enough for one joint closes more reliably as a
        # single rich connection than as covered paths docked through
        # starved pools, so in that regime the cover stands down; on the
        # second round it runs anyway if unhostable vertices are present,
        # since a path can carry them where a route could not
        live = g.full_mask() & ~(head.mask | reservoir)
        round_stop = stop_size
        if live.bit_count() <= min(max_inner, capacity):
            if rnd == 0 or not live & incompat:
                round_stop = live.bit_count()
        # prune threshold 0: harvest even isolated cliques, the cycle
        # closure copes with weak path ends by picking order and direction
        cover_seed = cseed.next_u64()
        cover = cover_with_paths(g, k, Fraction(0),
                                 excluded=head.mask | reservoir,
                                 stop_size=round_stop, seed=cover_seed)
        stages["cover"] = {"paths": [len(p) for p in cover.paths],
                           "leftover": len(cover.leftover),
                           "stop_size": round_stop, "seed": cover_seed}
        timings["cover"] = time.perf_counter() - t0
        if not cover.reached_stop:
            raise _StageFailure("cover", stages, timings)

        t0 = time.perf_counter()
        outcome = None
        last_fail = None
        for head_path in (head, head_rev):
            outcome = _close_cycle(g, k, head_path, cover, reservoir,
                                   max_inner, xseed.next_u64(), incompat)
            if isinstance(outcome, dict):
                last_fail = outcome
                outcome = None
            else:
                break
        if outcome is None:
            stages["connect"] = last_fail
            timings["connect"] = time.perf_counter() - t0
            failed = "connect"
            continue
        stages["connect"] = outcome.stage
        timings["connect"] = time.perf_counter() - t0
        if outcome.reservoir_used > outcome.joints * max_inner:
            raise PowerhamError(
                "internal: reservoir accounting bound violated")

        # -- stage 5: absorb the rest into the absorbing path
        t0 = time.perf_counter()
        demand = verts_of(outcome.route | outcome.widen)
        stages["absorb"] = {"absorbed": len(demand), "capacity": capacity}
        try:
            new_head = absorb(g, pa, demand)
        except CapacityError:
            timings["absorb"] = time.perf_counter() - t0
            failed = "absorb"
            continue
        finished = (outcome, new_head)
        break
    if finished is None:
        raise _StageFailure(failed, stages, timings)
    outcome, new_head = finished

    head_suffix = head.vertices[len(pa.path.vertices):]
    if outcome.sequence[0] is head:
        head_block = list(new_head.vertices) + list(head_suffix)
    else:
        # the chain docked the head back to front; insertions into the
        # segment midpoints stay valid under reversal
        head_block = list(reversed(head_suffix))
        head_block += list(reversed(new_head.vertices))
    ordering = head_block
    joints = outcome.joints
    for j in range(1, joints):
        ordering.extend(outcome.inners[j - 1])
        ordering.extend(outcome.sequence[j].vertices)
    ordering.extend(outcome.inners[joints - 1])
    timings["absorb"] = time.perf_counter() - t0

    cert = canonicalize(Certificate(k, tuple(ordering)))
    ok, viol = verify(g, cert)
    if not ok:
        raise PowerhamError(f"internal: invalid certificate, pair {viol}")
    extract_clique_factor(g, cert)
    return cert, stages, timings


def _run_pipeline(g: Graph, cfg: PipelineConfig,
                  hitting: Optional[list[list[tuple[int, ...]]]] = None
                  ) -> PipelineResult:
    n = g.n
    zeta, reservoir_fraction = cfg.zeta, cfg.reservoir_fraction
    notes: list[str] = []
    if cfg.mode == "paper_constants":
        if n < 2 or g.edge_count == 0:
            raise InputError("paper-constants mode needs a nonempty graph")
        d = Fraction(2 * g.edge_count, n * n)
        mu = inseparable_heuristic(g, seed=0, budget=2000).mu_star
        if mu <= 0:
            report = StageReport(
                n, cfg.k, cfg.mode, 0, "feasibility",
                {"feasibility": {"ok": False,
                                 "reasons": ["graph is separable (mu = 0)"]}},
                {}, ("refused: thresholds undefined at mu = 0",))
            return PipelineResult(None, report)
        mc = main_constants(d, mu, cfg.k)
        feas = feasibility(mc, n)
        if not feas.ok:
            report = StageReport(
                n, cfg.k, cfg.mode, 0, "feasibility",
                {"feasibility": feas.to_json_dict(),
                 "constants": mc.to_json_dict()},
                {}, ("refused: proof-grade thresholds are not satisfiable "
                     "at this n",))
            return PipelineResult(None, report)
        zeta = mc.zeta
        reservoir_fraction = mc.reservoir_rate
        notes.append("proof-grade thresholds satisfied; using exact constants")

    max_inner = _practical_max_inner(g, cfg.k)
    arng = SplitMix64(cfg.seed)
    attempt_seeds = [arng.next_u64() for _ in range(cfg.retries + 1)]
    last: Optional[_StageFailure] = None
    for attempt, aseed in enumerate(attempt_seeds, start=1):
        try:
            cert, stages, timings = _attempt(g, cfg, aseed, zeta,
                                             reservoir_fraction, max_inner,
                                             hitting)
        except _StageFailure as f:
            last = f
            continue
        report = StageReport(n, cfg.k, cfg.mode, attempt, None,
                             stages, timings, tuple(notes))
        return PipelineResult(cert, report)
    report = StageReport(n, cfg.k, cfg.mode, len(attempt_seeds), last.stage,
                         last.stages, last.timings, tuple(notes))
    return PipelineResult(None, report)


def find_hamiltonian_power(g: Graph, cfg: PipelineConfig) -> PipelineResult:
    """Run the staged search; the result always carries a stage report."""
    if g.n < 1:
        raise InputError("graph must have at least one vertex")
    return _run_pipeline(g, cfg)


def window_tallies(cert: Certificate, sets: list[tuple[int, ...]]
                   ) -> tuple[int, ...]:
    """Count, per set, the cyclic k-windows lying entirely inside it."""
    o, k, n = cert.ordering, cert.k, len(cert.ordering)
    tallies = []
    for s in sets:
        smask = mask_of(s)
        hits = 0
        for i in range(n):
            wmask = 0
            for d in range(k):
                wmask |= 1 << o[(i + d) % n]
            if wmask & ~smask == 0:
                hits += 1
        tallies.append(hits)
    return tuple(tallies)


@dataclass(frozen=True)
class HittingSetsResult:
    certificate: Optional[Certificate]
    report: StageReport
    tallies: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.certificate is not None


def find_with_hitting_sets(g: Graph, cfg: PipelineConfig,
                           sets: list[tuple[int, ...]],
                           per_set_min: int = 1) -> HittingSetsResult:
    """Pipeline variant that plants a connectable k-clique in every set.

    Each requested set contributes at least one clique stitched onto the
    absorbing path, so the final cycle carries k-windows inside every set;
    the tallies report how many.
    """
    if per_set_min < 1:
        raise InputError("per_set_min must be >= 1")
    if len(sets) > MAX_HITTING_SETS:
        raise SizeError(f"at most {MAX_HITTING_SETS} sets are supported")
    k = cfg.k
    for i, s in enumerate(sets):
        if len(set(s)) != len(s):
            raise InputError(f"set {i} repeats vertices")
        if any(not 0 <= v < g.n for v in s):
            raise InputError(f"set {i} leaves the vertex range")
        if len(s) < 2 * k:
            raise InputError(f"set {i} is smaller than 2k")
    threshold = ceil(cfg.zeta * g.n)
    hitting: list[list[tuple[int, ...]]] = []
    for i, s in enumerate(sets):
        cands = [cl for cl in list_cliques(g, k, within=mask_of(s))
                 if is_connectable(g, cl, threshold)]
        if not cands:
            raise InfeasibleSetError(
                f"set {i} contains no connectable {k}-clique")
        hitting.append(cands)
    result = _run_pipeline(g, cfg, hitting=hitting)
    if not result.ok:
        return HittingSetsResult(None, result.report, ())
    tallies = window_tallies(result.certificate, sets)
    if any(t < per_set_min for t in tallies):
        raise PowerhamError("a planted clique vanished from the final cycle")
    return HittingSetsResult(result.certificate, result.report, tallies)
