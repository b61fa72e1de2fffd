"""Compare the compiled and pure-Python kernels on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import timeit
from array import array

from declat import _pykernels
from declat.forest import enumerate_forests, full
from declat.glue import dec_filtration, generating_family, pack, tstructure_for_element

try:
    from declat import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def poset_downs(seed=0, n=12, count=30):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.25]
        out.append(list(_pykernels.transitive_closure(n, pairs)))
    return out


def cases():
    downs = poset_downs()
    small = poset_downs(n=8)
    F = enumerate_forests(5)[-1]
    filt = dec_filtration(F)
    slots = filt.slots.elements
    packed = pack(generating_family(slots, n_random=2000), slots)
    th = [tstructure_for_element(F, full(F))[s] for s in slots]
    ms = [-1, 0, 1]
    c_bufs = [array("q", packed.lows), array("q", packed.highs), array("q", th), array("q", ms)]
    p_bufs = [list(packed.lows), list(packed.highs), th, ms]

    def run(K, name):
        if name == "lower_ideals (n=12)":
            return lambda: [K.lower_ideals(d) for d in downs]
        if name == "linear_extensions (n=8)":
            return lambda: [K.linear_extensions(d) for d in small]
        if name == "count_linear_extensions (n=12)":
            return lambda: [K.count_linear_extensions(d) for d in downs]
        if name == "transitive_closure (n=12)":
            pairs = [(i, j) for i in range(12) for j in range(i + 1, 12) if (i * j) % 3 == 0]
            return lambda: K.transitive_closure(12, pairs)
        if name == "aisle_signature (2000 objects)":
            bufs = c_bufs if K is _ckernels else p_bufs
            return lambda: K.aisle_signature(*bufs)
        raise KeyError(name)

    names = [
        "lower_ideals (n=12)",
        "linear_extensions (n=8)",
        "count_linear_extensions (n=12)",
        "transitive_closure (n=12)",
        "aisle_signature (2000 objects)",
    ]
    return names, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names, run = cases()
    print(f"{'kernel':34} {'python ms':>10} {'cython ms':>10} {'speed-up':>9}")
    for name in names:
        py = min(timeit.repeat(run(_pykernels, name), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:34} {py:10.2f} {'n/a':>10} {'':>9}")
            continue
        cy = min(timeit.repeat(run(_ckernels, name), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:34} {py:10.2f} {cy:10.2f} {py / cy:8.1f}x")


if __name__ == "__main__":
    main()
