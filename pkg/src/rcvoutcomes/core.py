"""Election domain types and the standard instant-runoff count.

Conventions used throughout the package:

  * Candidates are dense integer ids 0..n-1 indexing ``profile.candidates``
    (the display-name table).
  * A ballot signature is a duplicate-free tuple of candidate ids, most
    preferred first. Bound ballots are signatures that are known; unbound
    ballots (absentee, contested, ...) are modelled only by their count and
    the shared ranking capacity ``max_rankings``.
  * An elimination order is a tuple of candidate ids in elimination
    sequence; in a complete order the last element is the winner.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from . import _kernel
from .errors import InvalidProfile, UnresolvableTie


class Candidate(NamedTuple):
    id: int
    name: str


@dataclass(frozen=True)
class Violation:
    """One validation finding; ``ballot_index`` is None for profile-level issues."""

    ballot_index: Optional[int]
    reason: str

    def __str__(self) -> str:
        if self.ballot_index is None:
            return self.reason
        return f"ballot {self.ballot_index}: {self.reason}"


@dataclass(frozen=True)
class ElectionProfile:
    """Candidates, known (bound) ballots, and the count of outstanding ballots."""

    candidates: tuple[str, ...]
    bound_ballots: tuple[tuple[int, ...], ...]
    unbound_count: int
    max_rankings: int

    @property
    def num_candidates(self) -> int:
        return len(self.candidates)

    @property
    def total_ballots(self) -> int:
        return len(self.bound_ballots) + self.unbound_count

    def candidate(self, cid: int) -> Candidate:
        return Candidate(cid, self.candidates[cid])

    def candidate_id(self, name: str) -> int:
        try:
            return self.candidates.index(name)
        except ValueError:
            raise KeyError(name) from None

    def names(self, ids: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.candidates[c] for c in ids)

    def grouped_ballots(self) -> tuple[list[tuple[int, ...]], list[int]]:
        """Distinct bound signatures and their multiplicities."""
        groups = Counter(self.bound_ballots)
        sigs = sorted(groups)
        return sigs, [groups[s] for s in sigs]


@dataclass(frozen=True)
class RoundTally:
    """Tallies for one counting round over the still-active candidates."""

    number: int
    tallies: dict[int, int]
    exhausted: int
    eliminated: int


@dataclass(frozen=True)
class CountResult:
    order: tuple[int, ...]
    rounds: tuple[RoundTally, ...]

    @property
    def winner(self) -> int:
        return self.order[-1]


def validate_profile(profile: ElectionProfile) -> list[Violation]:
    """Check all profile invariants; violations are data, not exceptions."""
    out: list[Violation] = []
    n = profile.num_candidates
    if n == 0:
        out.append(Violation(None, "no candidates"))
    seen: set[str] = set()
    for name in profile.candidates:
        if not name:
            out.append(Violation(None, "empty candidate name"))
        elif name in seen:
            out.append(Violation(None, f"duplicate candidate name {name!r}"))
        seen.add(name)
    if profile.max_rankings < 1:
        out.append(Violation(None, f"max_rankings must be positive, got {profile.max_rankings}"))
    if profile.unbound_count < 0:
        out.append(Violation(None, f"unbound_count must be non-negative, got {profile.unbound_count}"))

    limit = min(profile.max_rankings, n) if n else 0
    for idx, sig in enumerate(profile.bound_ballots):
        if len(sig) == 0:
            out.append(Violation(idx, "empty ballot"))
            continue
        if len(sig) > limit:
            out.append(Violation(idx, f"ballot has {len(sig)} rankings, limit is {limit}"))
        counted = Counter(sig)
        for cid, times in counted.items():
            if not 0 <= cid < n:
                out.append(Violation(idx, f"unknown candidate id {cid}"))
            elif times > 1:
                out.append(Violation(idx, f"duplicate candidate at ballot {idx}"))
                break
    return out


def require_valid(profile: ElectionProfile) -> None:
    violations = validate_profile(profile)
    if violations:
        raise InvalidProfile(violations)


def count_ranked_votes(
    profile: ElectionProfile, tie_policy: str = "strict"
) -> CountResult:
    """Run the round-by-round count and return the full elimination order.

    Each round tallies every bound ballot to its highest-ranked still-active
    candidate, then removes the lowest-tallied candidate. Rounds continue
    until a single candidate survives; the survivor is appended as the final
    element, so the result is a complete elimination order whose last entry
    is the winner.

    tie_policy:
      * ``"strict"`` - raise :class:`UnresolvableTie` when a round has no
        unique minimum.
      * ``"lowest_id"`` - eliminate the lowest-id candidate among the tied
        minimum (deterministic convenience for tooling).
    """
    if tie_policy not in ("strict", "lowest_id"):
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    if profile.unbound_count != 0:
        raise InvalidProfile(
            [Violation(None, "standard count requires all ballots to be bound")]
        )
    require_valid(profile)

    n = profile.num_candidates
    sigs, weights = profile.grouped_ballots()
    blob = _kernel.prepare_ballots(sigs, weights, n)

    active = set(range(n))
    order: list[int] = []
    rounds: list[RoundTally] = []
    round_no = 0
    while len(active) > 1:
        round_no += 1
        counts, exhausted = _kernel.tally_ballots(blob, active, n)
        low = min(counts[c] for c in active)
        lowest = sorted(c for c in active if counts[c] == low)
        if len(lowest) > 1 and tie_policy == "strict":
            raise UnresolvableTie(
                f"round {round_no}: candidates {lowest} tied at {low} votes"
            )
        eliminated = lowest[0]
        rounds.append(
            RoundTally(
                number=round_no,
                tallies={c: counts[c] for c in sorted(active)},
                exhausted=exhausted,
                eliminated=eliminated,
            )
        )
        active.remove(eliminated)
        order.append(eliminated)
    order.extend(active)
    return CountResult(order=tuple(order), rounds=tuple(rounds))
