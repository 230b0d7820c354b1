#!/usr/bin/env python3
"""Synthesis blowup on the binary counter family.

Solution machines double per bit while the specification grows linearly;
bit widths past 3 are expected to exhaust the default budget.
"""

import sys
import time

from tslsynth import counter_ltl, synthesize, Limits


def main():
    max_bits = int(sys.argv[1]) if len(sys.argv) > 1 else 3
    for bits in range(1, max_bits + 1):
        spec = counter_ltl(bits)
        t0 = time.monotonic()
        result = synthesize(spec, Limits(max_k=8, max_states=2_000_000,
                                         seconds=600))
        dt = time.monotonic() - t0
        states = result.machine.n_states if result.machine else "-"
        print("bits=%d  status=%-12s  states=%-6s  %.2fs"
              % (bits, result.status, states, dt))


if __name__ == "__main__":
    main()
