"""Minimum-absentee-ballot bounds for each possible winner.

For every feasible complete order won by candidate w, replay the
feasibility check to recover its tentative ballot assignments, then charge
w with two components:

  1. ballots the replay had to bind to w (boosts made to keep w above some
     eliminee), and
  2. the unavoidable share of the still-empty unbound ballots, once every
     one of them is forced to carry at least one ranking.

Component 2 is an exact minimization. Giving an empty ballot a single
ranking of candidate c adds one vote to c in every round up to c's
elimination, so the elimination order stays valid iff at each round k the
eliminee stays strictly below every active rival:

    t[e_k] + x[e_k] < t[c'] + x[c']   for every rival c' active at round k

where t are per-round tallies of the replayed ballot configuration and x[c]
is the number of empty ballots assigned to c. Rivals at round k are
eliminated later than e_k, so processing eliminees from the last round
backwards and raising each x to its cap yields the componentwise-maximal
assignment for a given winner share x[w] = q; the smallest q with
q + sum(x) >= empty_count is found by bisection (the absorbable total is
monotone in q).

min_bound(w) is the minimum of (1) + (2) over all orders won by w. It is a
lower bound on the absentee ballots w needs, not a sufficiency guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernel
from .core import ElectionProfile, require_valid
from .errors import InconsistentInput
from .search import SearchOptions, SearchReport, TentativeState, _advance, _SearchContext, initial_state


@dataclass(frozen=True)
class MinBound:
    min_ballots: int
    fraction_of_unbound: float


@dataclass(frozen=True)
class MinBoundReport:
    """Per possible winner: minimum unbound ballots that must contain them."""

    bounds: dict[int, MinBound]

    def to_json(self, profile: ElectionProfile) -> dict:
        return {
            profile.candidates[c]: {
                "min_ballots": b.min_ballots,
                "fraction_of_unbound": b.fraction_of_unbound,
            }
            for c, b in sorted(self.bounds.items())
        }


class _RoundTallies:
    """Tallies of a fixed ballot multiset along a known elimination order.

    Bound-ballot contributions are cached per active set (shared across
    orders); the per-order assigned groups are folded in on top.
    """

    def __init__(self, ctx: _SearchContext, order, assigned: dict[tuple[int, ...], int]):
        self.ctx = ctx
        self.order = order
        self.assigned = assigned

    def at_round(self, k: int) -> dict[int, int]:
        active = frozenset(self.order[k:])
        counts = list(self.ctx.bound_tally(active))
        for sig, cnt in self.assigned.items():
            for c in sig:
                if c in active:
                    counts[c] += cnt
                    break
        return {c: counts[c] for c in active}


def _absorbable(order, tallies_by_round, q: int) -> tuple[int, list[int]]:
    """Componentwise-maximal empty-ballot absorption by non-winners, given
    the winner takes q. Returns (total, per-round caps)."""
    n = len(order)
    x = {order[-1]: q}
    caps: list[int] = [0] * (n - 1)
    for k in range(n - 2, -1, -1):
        e = order[k]
        t = tallies_by_round[k]
        cap = min(t[c] + x.get(c, 0) for c in order[k + 1 :]) - t[e] - 1
        caps[k] = max(cap, 0)
        x[e] = caps[k]
    return sum(caps), caps


def _min_winner_share(order, tallies_by_round, empty: int) -> int:
    """Smallest winner share q with q + absorbable(q) >= empty."""
    if empty == 0:
        return 0
    if len(order) == 1:
        return empty
    lo, hi = 0, empty
    while lo < hi:
        mid = (lo + hi) // 2
        total, _ = _absorbable(order, tallies_by_round, mid)
        if mid + total >= empty:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _allocate_empty(order, tallies_by_round, empty: int) -> dict[int, int]:
    """A concrete minimal assignment of empty ballots, candidate -> count.

    Used by tests to materialize completions; fills later-eliminated
    candidates first since their share raises earlier rounds' caps.
    """
    q = _min_winner_share(order, tallies_by_round, empty)
    _, caps = _absorbable(order, tallies_by_round, q)
    out: dict[int, int] = {}
    if q:
        out[order[-1]] = q
    remaining = empty - q
    for k in range(len(order) - 2, -1, -1):
        if remaining == 0:
            break
        take = min(caps[k], remaining)
        if take:
            out[order[k]] = take
            remaining -= take
    if remaining:
        raise AssertionError("allocation shortfall; caps miscomputed")
    return out


def _replay_order(ctx: _SearchContext, order) -> TentativeState:
    state = initial_state(ctx.profile)
    for e in order:
        state = _advance(ctx, state, e)
        if state is None:
            raise InconsistentInput(
                f"order {order} is not feasible for this profile"
            )
    return state


def min_bound_ballots(
    profile: ElectionProfile,
    report: SearchReport,
    opts: SearchOptions | None = None,
) -> MinBoundReport:
    """Compute the per-winner minimum over ``report.orders``.

    ``report`` must come from a search over the same profile; an order that
    fails re-verification raises :class:`InconsistentInput`.
    """
    require_valid(profile)
    ctx = _SearchContext(profile, opts or SearchOptions())
    n = profile.num_candidates
    expected = frozenset(range(n))

    best: dict[int, int] = {}
    for order in report.orders:
        if len(order) != n or frozenset(order) != expected:
            raise InconsistentInput(f"{order} is not a complete elimination order")
        winner = order[-1]
        final = _replay_order(ctx, order)

        assigned = final.assigned_groups()
        contains_winner = sum(cnt for sig, cnt in assigned.items() if winner in sig)
        empty = final.pending.get((), 0)

        tallies = _RoundTallies(ctx, order, assigned)
        tallies_by_round = [tallies.at_round(k) for k in range(n - 1)]
        for k, t in enumerate(tallies_by_round):
            eliminee = order[k]
            floor = min(v for c, v in t.items() if c != eliminee) if len(t) > 1 else None
            if floor is not None and t[eliminee] >= floor:
                raise InconsistentInput(
                    f"replayed tallies do not eliminate {eliminee} strictly at round {k + 1}"
                )

        value = contains_winner + _min_winner_share(order, tallies_by_round, empty)
        if winner not in best or value < best[winner]:
            best[winner] = value

    unbound = profile.unbound_count
    bounds = {
        c: MinBound(v, (v / unbound) if unbound else 0.0) for c, v in best.items()
    }
    return MinBoundReport(bounds=bounds)
