"""Cube covers of bit-vector sets.

A cube is a pair of masks (care, value): it matches m iff m & care == value.
`cube_cover` turns an explicit set of vectors into an ordered list of
disjoint cubes covering exactly that set, by Shannon splitting on bit
positions in ascending order.  The split is deterministic, so equal inputs
always produce byte-identical covers.
"""

from __future__ import annotations


def cube_matches(care, value, m):
    return m & care == value


def cube_cover(masks, n_bits):
    """Disjoint cubes covering exactly `masks` within an n_bits universe."""
    members = frozenset(masks)
    if members and max(members) >> n_bits:
        raise ValueError("mask exceeds %d bits" % n_bits)
    out = []

    def rec(care, value, bit, pool):
        if not pool:
            return
        if len(pool) == 1 << (n_bits - bit):
            out.append((care, value))
            return
        b = 1 << bit
        rec(care | b, value, bit + 1, [m for m in pool if not m & b])
        rec(care | b, value | b, bit + 1, [m for m in pool if m & b])

    rec(0, 0, 0, sorted(members))
    return out


def cube_size(care, n_bits):
    free = n_bits - bin(care).count("1")
    return 1 << free
