"""Independent ground truth for tests: completion enumeration and random profiles.

``exhaustive_winner_set`` answers "who can still win" the slow way: try every
concrete assignment of rankings to the unbound ballots, run the standard
count on each completed profile, and union the results. It shares no code
with the search module's feasibility logic, so agreement between the two is
a meaningful check rather than a tautology.

Completions that hit a tie under the strict elimination policy are
discarded: the search only certifies orders whose eliminations are strict,
so the comparison is restricted to the same worlds.
"""

from __future__ import annotations

import random
from dataclasses import replace
from itertools import combinations_with_replacement, permutations

from .core import ElectionProfile, count_ranked_votes, require_valid
from .errors import SpaceTooLarge, UnresolvableTie

DEFAULT_COMPLETION_CAP = 10**6

_NAMES = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def signature_space(num_candidates: int, max_rankings: int) -> list[tuple[int, ...]]:
    """Every duplicate-free ranking of length 1..max_rankings."""
    sigs: list[tuple[int, ...]] = []
    for length in range(1, min(max_rankings, num_candidates) + 1):
        sigs.extend(permutations(range(num_candidates), length))
    return sigs


def exhaustive_winner_set(
    profile: ElectionProfile, cap: int = DEFAULT_COMPLETION_CAP
) -> tuple[frozenset[int], frozenset[tuple[int, ...]]]:
    """Winners and strict elimination orders over every unbound-ballot completion.

    Enumerates completions as multisets (unbound ballots are
    interchangeable, so ordered assignments add nothing). The tractability
    precondition is still stated over the ordered space:
    len(signature_space)**unbound_count must not exceed ``cap``.
    """
    require_valid(profile)
    sigs = signature_space(profile.num_candidates, profile.max_rankings)
    if len(sigs) ** profile.unbound_count > cap:
        raise SpaceTooLarge(
            f"{len(sigs)}^{profile.unbound_count} completions exceed cap {cap}"
        )
    winners: set[int] = set()
    orders: set[tuple[int, ...]] = set()
    for extra in combinations_with_replacement(sigs, profile.unbound_count):
        completed = replace(
            profile,
            bound_ballots=profile.bound_ballots + extra,
            unbound_count=0,
        )
        try:
            result = count_ranked_votes(completed, tie_policy="strict")
        except UnresolvableTie:
            continue
        orders.add(result.order)
        winners.add(result.winner)
    return frozenset(winners), frozenset(orders)


def random_profile(
    n: int,
    ballots: int,
    unbound: int,
    max_rankings: int,
    seed: int,
) -> ElectionProfile:
    """Deterministic random profile: each ballot is a random-length random
    duplicate-free prefix of a random permutation."""
    if n < 1 or ballots < 0 or unbound < 0 or max_rankings < 1:
        raise ValueError("profile parameters must be positive")
    rng = random.Random(seed)
    limit = min(max_rankings, n)
    names = tuple(_NAMES[i] if n <= len(_NAMES) else f"C{i}" for i in range(n))
    sigs = tuple(
        tuple(rng.sample(range(n), rng.randint(1, limit))) for _ in range(ballots)
    )
    return ElectionProfile(
        candidates=names,
        bound_ballots=sigs,
        unbound_count=unbound,
        max_rankings=max_rankings,
    )
