"""Pure-Python tally kernel.

Fallback used when the compiled extension is unavailable. Both kernels share
one interface:

  prepare_ballots(signatures, weights, num_candidates) -> opaque blob
  tally_ballots(blob, active, num_candidates) -> (counts, exhausted)

where ``active`` is a set of candidate ids and ``counts[c]`` is the number of
ballots whose highest-ranked active candidate is ``c``. Ballots with no
active candidate are counted as exhausted.
"""

BACKEND = "python"


def prepare_ballots(signatures, weights, num_candidates):
    return list(zip([tuple(s) for s in signatures], weights))


def tally_ballots(blob, active, num_candidates):
    counts = [0] * num_candidates
    exhausted = 0
    for sig, weight in blob:
        for c in sig:
            if c in active:
                counts[c] += weight
                break
        else:
            exhausted += weight
    return counts, exhausted
