"""Compiled kernel against the pure-Python kernel on the same fixed-point workloads.

    python benchmarks/bench_kernel.py [--repeat 3]
"""

import argparse
import random
import time

from inclogic import corpus
from inclogic.fixpoint import FixpointContext, FixpointEvaluator, available_backends
from inclogic.structures import graph
from inclogic.syntax import parse_formula
from inclogic.translate import wrap_sentence_inc_to_gfp

WORKLOADS = [
    # (label, formula, universe sizes)
    ("game sentence", corpus.AGAP_PGFP, (20, 40, 80)),
    ("transitive closure", "exists x. (lfp T(a,b). (E(a,b) | exists c. "
                           "(E(a,c) & T(c,b))) @ (x,x))", (10, 20, 30)),
    ("translated game sentence", None, (6, 8, 10)),
]


def instance(n, rng):
    edges = [(a, b) for a in range(n) for b in range(n) if rng.random() < 2.0 / n]
    return graph(n, edges, P=rng.sample(range(n), min(3, n)))


def run(formula, M, backend, repeat):
    best = float("inf")
    value = None
    for _ in range(repeat):
        ev = FixpointEvaluator(FixpointContext(M, backend=backend), formula)
        t0 = time.perf_counter()
        value = ev.holds()
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the Python kernel is available")
    print(f"{'workload':28s} {'n':>4s} " + " ".join(f"{b:>10s}" for b in backends) + "  speedup")
    for label, text, sizes in WORKLOADS:
        if text is None:
            formula = wrap_sentence_inc_to_gfp(corpus.parsed(corpus.AGAP_INCL))
        else:
            formula = parse_formula(text)
        for n in sizes:
            M = instance(n, random.Random(n))
            times, values = {}, set()
            for b in backends:
                times[b], v = run(formula, M, b, args.repeat)
                values.add(v)
            assert len(values) == 1, f"backends disagree on {label} n={n}"
            speed = (f"{times['python'] / times['compiled']:7.1f}x"
                     if len(times) == 2 and times["compiled"] > 0 else "")
            print(f"{label:28s} {n:4d} " + " ".join(f"{times[b]:10.4f}" for b in backends)
                  + f"  {speed}")


if __name__ == "__main__":
    main()
