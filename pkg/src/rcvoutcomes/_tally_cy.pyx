# cython: language_level=3
"""Compiled tally kernel; same interface as ``_tally_py``."""

import numpy as np

cimport numpy as cnp

BACKEND = "cython"


def prepare_ballots(signatures, weights, num_candidates):
    cdef Py_ssize_t total = 0
    for sig in signatures:
        total += len(sig)
    flat = np.empty(total, dtype=np.int32)
    offsets = np.empty(len(signatures) + 1, dtype=np.int64)
    wts = np.asarray(list(weights), dtype=np.int64)
    cdef Py_ssize_t pos = 0, i = 0
    offsets[0] = 0
    for sig in signatures:
        for c in sig:
            flat[pos] = c
            pos += 1
        i += 1
        offsets[i] = pos
    return flat, offsets, wts


def tally_ballots(blob, active, num_candidates):
    flat, offsets, wts = blob
    mask = np.zeros(num_candidates, dtype=np.uint8)
    for c in active:
        mask[c] = 1
    counts = np.zeros(num_candidates, dtype=np.int64)
    cdef long long exhausted = _tally(flat, offsets, wts, mask, counts)
    return counts.tolist(), exhausted


cdef long long _tally(cnp.int32_t[::1] flat, cnp.int64_t[::1] offsets,
                      cnp.int64_t[::1] wts, cnp.uint8_t[::1] mask,
                      cnp.int64_t[::1] counts) nogil:
    cdef Py_ssize_t i, j, start, stop
    cdef cnp.int32_t c
    cdef long long exhausted = 0
    cdef Py_ssize_t nsigs = offsets.shape[0] - 1
    for i in range(nsigs):
        start = offsets[i]
        stop = offsets[i + 1]
        for j in range(start, stop):
            c = flat[j]
            if mask[c]:
                counts[c] += wts[i]
                break
        else:
            exhausted += wts[i]
    return exhausted
