#!/usr/bin/env python3
"""Generate known-answer files for the twisted generalized feedback generators.

Pure-Python reference, independent of the Rust crate. Uses the classic
mt[0] = seed, mt[i] = 1812433253*(mt[i-1] ^ (mt[i-1] >> (w-2))) + i seeding
(note: this is NOT Python's random.seed, which seeds via init_by_array).

Writes one decimal output word per line after a '#'-header naming the spec.
"""

import os

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "prngformer", "tests", "data")


def mt_stream(w, n, m, r, a, u, s, t, b, c, l, seed, count):
    mask = (1 << w) - 1
    mt = [0] * n
    mt[0] = seed & mask
    for i in range(1, n):
        mt[i] = (1812433253 * (mt[i - 1] ^ (mt[i - 1] >> (w - 2))) + i) & mask
    lower = (1 << r) - 1
    upper = ~lower & mask
    out = []
    i = 0
    for _ in range(count):
        tt = (mt[i] & upper) | (mt[(i + 1) % n] & lower)
        z = mt[(i + m) % n] ^ (tt >> 1) ^ (a if tt & 1 else 0)
        mt[i] = z
        y = z
        y ^= y >> u
        y ^= (y << s) & b & mask
        y ^= (y << t) & c & mask
        y ^= y >> l
        out.append(y & mask)
        i = (i + 1) % n
    return out


SPECS = {
    "mt19937": dict(w=32, n=624, m=397, r=31, a=0x9908B0DF, u=11, s=7,
                    b=0x9D2C5680, t=15, c=0xEFC60000, l=18),
    "mt_w16": dict(w=16, n=16, m=5, r=8, a=0xB5A1, u=5, s=3,
                   b=0x6CA4, t=7, c=0xC530, l=9),
    "mt_w8": dict(w=8, n=4, m=2, r=3, a=0x9D, u=3, s=2,
                  b=0x68, t=4, c=0xC0, l=5),
}


def write_kat(name, spec, seed, count):
    words = mt_stream(seed=seed, count=count, **spec)
    path = os.path.join(OUT, f"{name}_seed{seed}.txt")
    with open(path, "w") as fh:
        fields = " ".join(f"{k}={spec[k]}" for k in ("w", "n", "m", "r", "a", "u", "s", "b", "t", "c", "l"))
        fh.write(f"# {name} {fields} seed={seed} init=standard count={count}\n")
        for y in words:
            fh.write(f"{y}\n")
    return words


def main():
    os.makedirs(OUT, exist_ok=True)
    first = write_kat("mt19937", SPECS["mt19937"], 5489, 1000)
    assert first[0] == 3499211612 and first[1] == 581869302, first[:2]
    write_kat("mt19937", SPECS["mt19937"], 1, 1000)
    write_kat("mt19937", SPECS["mt19937"], 42, 1000)
    write_kat("mt_w16", SPECS["mt_w16"], 5489, 1000)
    write_kat("mt_w8", SPECS["mt_w8"], 5489, 1000)
    print("first mt19937/5489 words:", first[:4])
    print("first mt_w16/5489 words:", mt_stream(seed=5489, count=4, **SPECS["mt_w16"]))
    print("first mt_w8/5489 words:", mt_stream(seed=5489, count=8, **SPECS["mt_w8"]))


if __name__ == "__main__":
    main()
