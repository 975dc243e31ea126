"""Feasibility checking and enumeration of still-possible elimination orders.

With ``u`` ballots outstanding, an elimination order is *feasible* if some
assignment of rankings to those ballots makes the round-by-round count
eliminate candidates in exactly that order. Feasibility of a (partial) order
is decided constructively, one eliminee at a time:

  Loop 1: tally every tentatively-bound ballot to its highest-ranked active
          candidate. An unbound-origin ballot whose assigned candidates have
          all been eliminated returns to the unbound pool if it still has
          ranking capacity; at capacity it is exhausted for good.
  Loop 2: for the intended eliminee e, every active rival c with
          t_c <= t_e must be pushed strictly above e. That takes
          margin = t_e - t_c + 1 unbound ballots, each of which gets c
          appended as its next ranking and moves to the bound side. If the
          pool runs out, the order is infeasible.

Each boost is minimal (rival lands exactly one vote above the eliminee), so
a prefix rejected here cannot be rescued by any completion: the rejection
prunes the whole subtree of the candidate-permutation tree.

State is tracked as multisets: unbound ballots with the same assigned
sequence are interchangeable, so they are grouped by that sequence with a
count. Bound-ballot tallies depend only on the set of active candidates and
are cached per active-set across the whole search; that cache plus the
grouping is what keeps large elections tractable.

Counters reported by the search:

  * ``nodes_expanded`` - prefix extensions attempted. The branch-and-bound
    attempts each distinct prefix at most once; the brute-force baseline
    counts every prefix it walks through, with multiplicity.
  * ``verify_calls``   - single-eliminee verification steps executed. With
    memoization each attempted prefix costs one step; without it, a depth-k
    attempt replays k steps from the initial state.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import _kernel
from .core import ElectionProfile, require_valid
from .errors import AllPruned, InvalidPrefix

DEFAULT_TIMEOUT_SECS = 7200.0


@dataclass(frozen=True)
class SearchOptions:
    """Knobs for the outcome search; defaults match normal analysis runs."""

    timeout_secs: float = DEFAULT_TIMEOUT_SECS
    prune_threshold: float = 0.0
    memoize: bool = True
    parallel: bool = False
    seed: int | None = None
    kernel: str = "auto"

    def __post_init__(self) -> None:
        if self.timeout_secs <= 0:
            raise ValueError("timeout_secs must be positive")
        if not 0.0 <= self.prune_threshold < 1.0:
            raise ValueError("prune_threshold must be in [0, 1)")


class TentativeState:
    """Search-node snapshot of the tentatively bound/unbound ballot split.

    The tentatively-bound side holds the original bound ballots (immutable,
    shared via the profile) plus the unbound-origin groups in ``counting``
    (last assigned candidate still active) and ``exhausted`` (at ranking
    capacity with every assigned candidate eliminated). ``pending`` is the
    tentatively-unbound side: groups with no active assigned candidate and
    spare capacity, keyed by their assigned sequence (the empty tuple for
    never-assigned ballots).
    """

    __slots__ = ("active", "pending", "counting", "exhausted", "prefix")

    def __init__(self, active, pending, counting, exhausted, prefix):
        self.active = active
        self.pending = pending
        self.counting = counting
        self.exhausted = exhausted
        self.prefix = prefix

    def unbound_size(self) -> int:
        return sum(self.pending.values())

    def assigned_groups(self) -> dict[tuple[int, ...], int]:
        """All unbound-origin groups with at least one assigned ranking."""
        merged: dict[tuple[int, ...], int] = {}
        for groups in (self.pending, self.counting, self.exhausted):
            for sig, cnt in groups.items():
                if sig:
                    merged[sig] = merged.get(sig, 0) + cnt
        return merged

    def total_unbound_origin(self) -> int:
        return (
            sum(self.pending.values())
            + sum(self.counting.values())
            + sum(self.exhausted.values())
        )


def initial_state(profile: ElectionProfile) -> TentativeState:
    pending = {(): profile.unbound_count} if profile.unbound_count else {}
    return TentativeState(
        active=frozenset(range(profile.num_candidates)),
        pending=pending,
        counting={},
        exhausted={},
        prefix=(),
    )


class _Timeout(Exception):
    pass


class _SearchContext:
    """Per-run machinery: kernel blob, active-set tally cache, counters."""

    def __init__(
        self,
        profile: ElectionProfile,
        opts: SearchOptions,
        deadline: float | None = None,
    ):
        self.profile = profile
        self.n = profile.num_candidates
        self.max_rankings = profile.max_rankings
        self.kernel = _kernel.load_backend(opts.kernel)
        sigs, weights = profile.grouped_ballots()
        self.blob = self.kernel.prepare_ballots(sigs, weights, self.n)
        self.bound_cache: dict[int, list[int]] = {}
        self.nodes_expanded = 0
        self.verify_calls = 0
        self.deadline = deadline if deadline is not None else time.time() + opts.timeout_secs
        self.orders: list[tuple[int, ...]] = []

    def check_deadline(self) -> None:
        if time.time() > self.deadline:
            raise _Timeout

    def bound_tally(self, active: frozenset[int]) -> list[int]:
        mask = 0
        for c in active:
            mask |= 1 << c
        counts = self.bound_cache.get(mask)
        if counts is None:
            counts, _ = self.kernel.tally_ballots(self.blob, active, self.n)
            self.bound_cache[mask] = counts
        return counts

    def tally(self, state: TentativeState) -> list[int]:
        """Tallies of all active candidates, after Loop-1 relocation."""
        counts = list(self.bound_tally(state.active))
        for sig, cnt in state.counting.items():
            counts[sig[-1]] += cnt
        return counts


def _relocate(ctx: _SearchContext, state: TentativeState) -> TentativeState:
    """Loop-1 ballot movement: dead unbound-origin groups leave ``counting``."""
    dead = [sig for sig in state.counting if sig[-1] not in state.active]
    if not dead:
        return state
    pending = dict(state.pending)
    counting = dict(state.counting)
    exhausted = dict(state.exhausted)
    for sig in dead:
        cnt = counting.pop(sig)
        target = pending if len(sig) < ctx.max_rankings else exhausted
        target[sig] = target.get(sig, 0) + cnt
    return TentativeState(state.active, pending, counting, exhausted, state.prefix)


def _advance(ctx, state: TentativeState, eliminee: int) -> TentativeState | None:
    """One verification step: force ``eliminee`` out next, or report infeasible.

    Returns the successor state (new dicts; the input state is never
    mutated, so siblings can branch from it) or None when not enough
    unbound ballots remain to push every trailing rival above the eliminee.
    """
    ctx.verify_calls += 1
    state = _relocate(ctx, state)
    counts = ctx.tally(state)

    target = counts[eliminee]
    boosts = [
        (c, target - counts[c] + 1)
        for c in sorted(state.active)
        if c != eliminee and counts[c] <= target
    ]

    pending = state.pending
    counting = state.counting
    if boosts:
        pending = dict(pending)
        counting = dict(counting)
        # Draw from the groups with the most remaining capacity first;
        # equal-length groups in canonical signature order for determinism.
        pool = sorted(pending, key=lambda sig: (len(sig), sig))
        for c, margin in boosts:
            needed = margin
            for sig in pool:
                if needed == 0:
                    break
                avail = pending.get(sig, 0)
                if avail == 0 or c in sig:
                    continue
                take = min(avail, needed)
                if take == avail:
                    del pending[sig]
                else:
                    pending[sig] = avail - take
                grown = sig + (c,)
                counting[grown] = counting.get(grown, 0) + take
                needed -= take
            if needed:
                return None

    return TentativeState(
        active=state.active - {eliminee},
        pending=pending,
        counting=counting,
        exhausted=state.exhausted,
        prefix=state.prefix + (eliminee,),
    )


def verify(
    profile: ElectionProfile,
    prefix: tuple[int, ...],
    state: TentativeState | None = None,
) -> tuple[bool, TentativeState | None]:
    """Check whether ``prefix`` is a feasible (partial) elimination order.

    ``prefix`` must extend ``state.prefix`` (the initial state when ``state``
    is omitted). Returns ``(True, next_state)`` so callers can keep
    extending, or ``(False, None)``. Infeasibility is a result, not an
    error; malformed prefixes raise :class:`InvalidPrefix`.
    """
    require_valid(profile)
    if state is None:
        state = initial_state(profile)
    base = state.prefix
    if prefix[: len(base)] != base:
        raise InvalidPrefix(f"{prefix} does not extend {base}")
    extension = prefix[len(base) :]
    seen = set(base)
    for c in extension:
        if not 0 <= c < profile.num_candidates:
            raise InvalidPrefix(f"unknown candidate id {c}")
        if c in seen:
            raise InvalidPrefix(f"candidate {c} repeated in {prefix}")
        seen.add(c)

    ctx = _SearchContext(profile, SearchOptions())
    for c in extension:
        state = _advance(ctx, state, c)
        if state is None:
            return False, None
    return True, state


@dataclass(frozen=True)
class SearchReport:
    """Outcome of a search: the feasible elimination orders plus counters."""

    orders: tuple[tuple[int, ...], ...]
    possible_winners: frozenset[int]
    nodes_expanded: int
    verify_calls: int
    timed_out: bool
    pruned_candidates: tuple[str, ...] = ()

    @property
    def num_orders(self) -> int:
        return len(self.orders)


def _make_report(ctx, timed_out, pruned) -> SearchReport:
    orders = tuple(sorted(ctx.orders))
    return SearchReport(
        orders=orders,
        possible_winners=frozenset(o[-1] for o in orders),
        nodes_expanded=ctx.nodes_expanded,
        verify_calls=ctx.verify_calls,
        timed_out=timed_out,
        pruned_candidates=tuple(pruned),
    )


def _dfs_memo(ctx, state: TentativeState) -> None:
    if len(state.prefix) == ctx.n:
        ctx.orders.append(state.prefix)
        return
    for c in sorted(state.active):
        ctx.check_deadline()
        ctx.nodes_expanded += 1
        child = _advance(ctx, state, c)
        if child is not None:
            _dfs_memo(ctx, child)


def _dfs_replay(ctx, prefix: tuple[int, ...], remaining: frozenset[int]) -> None:
    if not remaining:
        ctx.orders.append(prefix)
        return
    for c in sorted(remaining):
        ctx.check_deadline()
        ctx.nodes_expanded += 1
        state = initial_state(ctx.profile)
        for e in prefix + (c,):
            state = _advance(ctx, state, e)
            if state is None:
                break
        if state is not None:
            _dfs_replay(ctx, prefix + (c,), remaining - {c})


def enumerate_outcomes(
    profile: ElectionProfile,
    opts: SearchOptions | None = None,
    pruned_candidates: tuple[str, ...] = (),
) -> SearchReport:
    """Enumerate every feasible complete elimination order (branch and bound).

    Depth-first over the candidate-permutation tree; a child prefix is
    explored only if its one-step verification succeeds, which prunes the
    entire subtree otherwise. With ``opts.memoize`` (the default) each
    prefix's post-verification state is computed once and shared by all
    sibling extensions; without it every attempt replays its full prefix
    from the initial state. Both modes produce the same order set.

    On timeout the report carries the orders found so far with
    ``timed_out=True``.
    """
    opts = opts or SearchOptions()
    require_valid(profile)
    if opts.parallel:
        return _enumerate_parallel(profile, opts, pruned_candidates)
    ctx = _SearchContext(profile, opts)
    timed_out = False
    try:
        if opts.memoize:
            _dfs_memo(ctx, initial_state(profile))
        else:
            _dfs_replay(ctx, (), frozenset(range(ctx.n)))
    except _Timeout:
        timed_out = True
    return _make_report(ctx, timed_out, pruned_candidates)


def brute_force_outcomes(
    profile: ElectionProfile,
    opts: SearchOptions | None = None,
    pruned_candidates: tuple[str, ...] = (),
) -> SearchReport:
    """Baseline: verify each of the n! complete orders from a fresh state."""
    opts = opts or SearchOptions()
    require_valid(profile)
    ctx = _SearchContext(profile, opts)
    timed_out = False
    try:
        for perm in itertools.permutations(range(ctx.n)):
            ctx.check_deadline()
            state = initial_state(profile)
            for e in perm:
                ctx.nodes_expanded += 1
                state = _advance(ctx, state, e)
                if state is None:
                    break
            else:
                ctx.orders.append(perm)
    except _Timeout:
        timed_out = True
    return _make_report(ctx, timed_out, pruned_candidates)


def _subtree_job(args):
    profile, opts, root, deadline = args
    ctx = _SearchContext(profile, opts, deadline=deadline)
    timed_out = False
    try:
        ctx.check_deadline()
        ctx.nodes_expanded += 1
        state = _advance(ctx, initial_state(profile), root)
        if state is not None:
            _dfs_memo(ctx, state)
    except _Timeout:
        timed_out = True
    return ctx.orders, ctx.nodes_expanded, ctx.verify_calls, timed_out


def _enumerate_parallel(profile, opts, pruned_candidates) -> SearchReport:
    """Root-level subtrees searched in worker processes, results merged."""
    n = profile.num_candidates
    deadline = time.time() + opts.timeout_secs
    jobs = [(profile, replace(opts, parallel=False), c, deadline) for c in range(n)]
    orders: list[tuple[int, ...]] = []
    nodes = calls = 0
    timed_out = False
    with ProcessPoolExecutor() as pool:
        for sub_orders, sub_nodes, sub_calls, sub_timeout in pool.map(
            _subtree_job, jobs
        ):
            orders.extend(sub_orders)
            nodes += sub_nodes
            calls += sub_calls
            timed_out = timed_out or sub_timeout
    orders.sort()
    return SearchReport(
        orders=tuple(orders),
        possible_winners=frozenset(o[-1] for o in orders),
        nodes_expanded=nodes,
        verify_calls=calls,
        timed_out=timed_out,
        pruned_candidates=tuple(pruned_candidates),
    )


def prune_candidates(
    profile: ElectionProfile, threshold: float
) -> tuple[ElectionProfile, tuple[str, ...]]:
    """Drop candidates whose first-round share of bound ballots is below ``threshold``.

    The comparison is strict: a candidate holding exactly the threshold
    share stays. Removed candidates are deleted from every signature (later
    ranks shift up); ballots left empty are dropped. Candidate ids are
    re-densified in the reduced profile.
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError("threshold must be in [0, 1)")
    require_valid(profile)
    if threshold == 0.0 or not profile.bound_ballots:
        return profile, ()

    n = profile.num_candidates
    sigs, weights = profile.grouped_ballots()
    kernel = _kernel.load_backend("auto")
    counts, _ = kernel.tally_ballots(
        kernel.prepare_ballots(sigs, weights, n), frozenset(range(n)), n
    )
    total = len(profile.bound_ballots)
    keep = [c for c in range(n) if counts[c] / total >= threshold]
    if not keep:
        raise AllPruned(f"no candidate reaches {threshold:.2%} of first-round votes")
    if len(keep) == n:
        return profile, ()

    remap = {old: new for new, old in enumerate(keep)}
    pruned = tuple(profile.candidates[c] for c in range(n) if c not in remap)
    ballots = []
    for sig in profile.bound_ballots:
        reduced = tuple(remap[c] for c in sig if c in remap)
        if reduced:
            ballots.append(reduced)
    reduced_profile = ElectionProfile(
        candidates=tuple(profile.candidates[c] for c in keep),
        bound_ballots=tuple(ballots),
        unbound_count=profile.unbound_count,
        max_rankings=profile.max_rankings,
    )
    return reduced_profile, pruned


def report_to_json(report: SearchReport, profile: ElectionProfile) -> dict:
    """JSON-ready view of a report, with candidate ids resolved to names."""
    return {
        "possible_winners": sorted(profile.candidates[c] for c in report.possible_winners),
        "orders": [list(profile.names(order)) for order in report.orders],
        "nodes_expanded": report.nodes_expanded,
        "verify_calls": report.verify_calls,
        "timed_out": report.timed_out,
        "pruned_candidates": sorted(report.pruned_candidates),
    }
