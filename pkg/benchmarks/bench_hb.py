"""Compare the compiled and pure-Python reachability kernels.

Builds the happens-before graph of one 10^4-event fuzz log of the notes
fixture, then answers every conflicting-pair query with each kernel.

    python3 benchmarks/bench_hb.py [--budget N] [--repeat R]
"""
import argparse
import time
from importlib import resources

from apecheck.baselines import fuzz
from apecheck.baselines import _hbkernel_py
from apecheck.baselines.hbkernel import BACKEND, reach_batch
from apecheck.baselines.races import build_hb_graph, conflicting_pairs
from apecheck.dsl import parse_app


def queries(g):
    pairs = conflicting_pairs(g)
    pairs.sort(key=lambda p: g.accesses[p[0]][0])
    return ([g.accesses[i][0] for i, _ in pairs], [g.accesses[j][0] for _, j in pairs])


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--budget", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    src = resources.files("apecheck").joinpath("fixtures/compliant.ape").read_text()
    logs = []
    fuzz(parse_app(src), args.budget, seed=1, record=True, logs=logs)
    log = max(logs, key=len)
    g = build_hb_graph(log)
    s, d = queries(g)
    print(f"log records {len(log)}, nodes {g.n_nodes}, edges {len(g.indices)}, queries {len(s)}")
    t_py, r_py = best_of(lambda: reach_batch(g.indptr, g.indices, s, d, _hbkernel_py), args.repeat)
    print(f"python   {t_py * 1e3:9.2f} ms")
    if BACKEND == "compiled":
        t_c, r_c = best_of(lambda: reach_batch(g.indptr, g.indices, s, d), args.repeat)
        assert r_c == r_py, "kernels disagree"
        print(f"compiled {t_c * 1e3:9.2f} ms  speedup {t_py / t_c:5.1f}x")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
