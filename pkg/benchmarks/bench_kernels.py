"""Throughput comparison: compiled edit-distance kernels vs pure Python.

Workloads mirror the hot paths: character-level distance for CER,
token-level alignment counts for WER, and bounded distance as used by the
normalisation fallback scanning every lexicon key.

Run: python benchmarks/bench_kernels.py
"""

import random
import time

from variaforge import kernels
from variaforge.fixtures import VOCAB, make_saturating_lexicon


def build_workload(seed=2024, n_lines=400):
    rnd = random.Random(seed)
    lexicon = make_saturating_lexicon()
    pairs = []
    for _ in range(n_lines):
        ref = [rnd.choice(VOCAB) for _ in range(rnd.randint(6, 12))]
        hyp = list(ref)
        for i, word in enumerate(hyp):
            if rnd.random() < 0.7:
                entry = lexicon.entries[word]
                hyp[i] = entry.variants[0][0]
        pairs.append((ref, hyp))
    unknown_tokens = [w + "zz" for w in VOCAB[:50]]
    keys = sorted(lexicon.entries)
    return pairs, unknown_tokens, keys


def measure(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def run_backend(impl, pairs, unknown_tokens, keys):
    def char_work():
        for ref, hyp in pairs:
            impl.distance_str(" ".join(ref), " ".join(hyp))

    def token_work():
        table = {}
        for ref, hyp in pairs:
            a = [table.setdefault(t, len(table)) for t in ref]
            b = [table.setdefault(t, len(table)) for t in hyp]
            impl.edit_counts_ids(a, b)

    def fallback_work():
        for token in unknown_tokens:
            for key in keys:
                impl.bounded_distance_str(token, key, 2)

    return {
        "char distance (CER)": measure_best(char_work),
        "token edit counts (WER)": measure_best(token_work),
        "bounded scan (normalise)": measure_best(fallback_work),
    }


def measure_best(fn, repeat=3):
    return min(measure(fn) for _ in range(repeat))


def main():
    pairs, unknown_tokens, keys = build_workload()
    backends = [("python", kernels.pure_python_module())]
    if kernels.BACKEND == "cython":
        backends.insert(0, ("cython", kernels.active_module()))
    else:
        print("compiled extension not built; timing pure Python only")
    results = {}
    for name, impl in backends:
        print(f"{name} backend:")
        results[name] = run_backend(impl, pairs, unknown_tokens, keys)
        for label, secs in results[name].items():
            print(f"  {label:<28} {secs * 1000:8.1f} ms")
    if len(results) == 2:
        print("speedup (python / cython):")
        for label in results["cython"]:
            ratio = results["python"][label] / results["cython"][label]
            print(f"  {label:<28} {ratio:8.1f}x")


if __name__ == "__main__":
    main()
