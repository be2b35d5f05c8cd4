"""Compare the numba and numpy frame kernels.

    python benchmarks/bench_kernels.py [--frames N] [--repeat R]

Packs and unpacks N random frames with each backend, then times an
end-to-end compress/decompress of a synthetic prose corpus.
"""
import argparse
import random
import time

import numpy as np

from idxdict import kernels
from idxdict.codec import compress, decompress
from idxdict.dictionary import Dictionary


def random_frames(n, seed=0):
    rng = np.random.default_rng(seed)
    flag = rng.integers(0, 4, n).astype(np.uint32)
    nc = rng.integers(1, 16, n).astype(np.uint32)
    cs = (rng.integers(0, 1 << 15, n) & ((1 << nc.astype(np.int64)) - 1)).astype(np.uint32)
    ic = rng.integers(1, 27, n).astype(np.uint32)
    pos = rng.integers(0, 256, n).astype(np.uint32)
    return flag, nc, cs, ic, pos


def prose(n_words, seed=0):
    rng = random.Random(seed)
    vocab = [
        "".join(rng.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(rng.randrange(1, 12)))
        for _ in range(3000)
    ]
    out = []
    for _ in range(n_words):
        w = rng.choice(vocab)
        if rng.random() < 0.1:
            w = w.capitalize()
        if rng.random() < 0.08:
            w += rng.choice(",.;")
        out.append(w)
        out.append("\n" if rng.random() < 0.05 else " ")
    return "".join(out).encode()


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--frames", type=int, default=1_000_000)
    ap.add_argument("--words", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    arrays = random_frames(args.frames)
    ref_payload, ref_bits = kernels.pack_frames(*arrays, backend="numpy")

    print(f"{args.frames:,} random frames, {ref_bits / 8 / 1e6:.2f} MB packed")
    print(f"{'backend':8} {'pack ms':>10} {'unpack ms':>10}")
    for be in backends:
        # warm-up compiles the numba kernels
        payload, _ = kernels.pack_frames(*[a[:10] for a in arrays], backend=be)
        kernels.unpack_frames(payload, 10, backend=be)
        payload, nbits = kernels.pack_frames(*arrays, backend=be)
        assert (payload, nbits) == (ref_payload, ref_bits)
        fields, status, _, _ = kernels.unpack_frames(payload, args.frames, backend=be)
        assert status == kernels.OK
        t_pack = best_of(lambda: kernels.pack_frames(*arrays, backend=be), args.repeat)
        t_unpack = best_of(lambda: kernels.unpack_frames(payload, args.frames, backend=be),
                           1 if be == "numpy" else args.repeat)
        print(f"{be:8} {t_pack * 1e3:10.1f} {t_unpack * 1e3:10.1f}")

    data = prose(args.words)
    print(f"\nend to end on {len(data) / 1e6:.2f} MB of synthetic prose")
    print(f"{'backend':8} {'compress s':>11} {'decompress s':>13} {'ratio':>7}")
    for be in backends:
        d = Dictionary(id=1)
        t0 = time.perf_counter()
        c = compress(data, d, backend=be)
        t1 = time.perf_counter()
        out = decompress(c, d, backend=be)
        t2 = time.perf_counter()
        assert out == data
        print(f"{be:8} {t1 - t0:11.3f} {t2 - t1:13.3f} {len(c.to_bytes()) / len(data):7.4f}")


if __name__ == "__main__":
    main()
