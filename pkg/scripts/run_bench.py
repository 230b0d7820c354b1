#!/usr/bin/env python3
"""Run the benchmark corpus and print the comparison table.

Heavy entries carry multi-minute budgets; pass a substring to restrict the
run, e.g. `scripts/run_bench.py escalator`.
"""

import sys

from tslsynth.bench import run_bench, bench_report


def main():
    name_filter = sys.argv[1] if len(sys.argv) > 1 else None
    results = run_bench(name_filter=name_filter)
    print(bench_report(results))


if __name__ == "__main__":
    main()
