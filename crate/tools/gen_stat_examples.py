#!/usr/bin/env python3
"""Recompute the statistical-test worked examples used as frozen test anchors.

Independent straight-from-the-definitions implementation (mpmath for the
special functions). The printed values get frozen into the Rust unit tests;
the classic small published examples double as sanity anchors.
"""

import math
import cmath
import mpmath as mp

mp.mp.dps = 40

PI_100 = ("1100100100001111110110101010001000100001011010001100001000110100"
          "110001001100011001100010100010111000")

LONGEST_128 = ("1100110000010101011011000100110011100000000000100100110101010001"
               "0001001111010110100000001101011111001100111001101101100010110010")


def igamc(a, x):
    return float(mp.gammainc(mp.mpf(a), mp.mpf(x), mp.inf, regularized=True))


def erfc(x):
    return float(mp.erfc(mp.mpf(x)))


def phi(x):
    return float(mp.ncdf(mp.mpf(x)))


def monobit(eps):
    n = len(eps)
    s = sum(2 * int(b) - 1 for b in eps)
    s_obs = abs(s) / math.sqrt(n)
    return erfc(s_obs / math.sqrt(2))


def block_frequency(eps, M):
    n = len(eps)
    N = n // M
    chi = 0.0
    for i in range(N):
        pi = sum(int(b) for b in eps[i * M:(i + 1) * M]) / M
        chi += (pi - 0.5) ** 2
    chi *= 4 * M
    return igamc(N / 2, chi / 2)


def runs(eps):
    n = len(eps)
    pi = sum(int(b) for b in eps) / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return 0.0
    v = 1 + sum(1 for k in range(n - 1) if eps[k] != eps[k + 1])
    num = abs(v - 2 * n * pi * (1 - pi))
    den = 2 * math.sqrt(2 * n) * pi * (1 - pi)
    return erfc(num / den)


def longest_run(eps):
    n = len(eps)
    if n < 6272:
        M, K, cats = 8, 3, [1, 2, 3, 4]          # <=1, 2, 3, >=4
        piv = [0.21484375, 0.3671875, 0.23046875, 0.1875]
    elif n < 750000:
        M, K, cats = 128, 5, [4, 5, 6, 7, 8, 9]  # <=4 .. >=9
        piv = [0.1174035788, 0.242955959, 0.249363483, 0.17517706,
               0.102701071, 0.112398847]
    else:
        M, K, cats = 10000, 6, [10, 11, 12, 13, 14, 15, 16]
        piv = [0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727]
    N = n // M
    nu = [0] * len(cats)
    for i in range(N):
        longest = cur = 0
        for b in eps[i * M:(i + 1) * M]:
            cur = cur + 1 if b == "1" else 0
            longest = max(longest, cur)
        j = min(max(longest, cats[0]), cats[-1]) - cats[0]
        nu[j] += 1
    chi = sum((nu[j] - N * piv[j]) ** 2 / (N * piv[j]) for j in range(len(cats)))
    return igamc(K / 2, chi / 2), nu, chi


def cusum(eps, forward=True):
    n = len(eps)
    xs = [2 * int(b) - 1 for b in (eps if forward else eps[::-1])]
    s = z = 0
    for x in xs:
        s += x
        z = max(z, abs(s))
    sq = math.sqrt(n)

    def trunc(a, b):
        # C-style integer division (truncation toward zero), matching the
        # summation bounds used by the reference implementation.
        return -((-a) // b) if (a < 0) != (b < 0) and a % b != 0 else a // b

    nz = trunc(n, z)
    t1 = sum(phi((4 * k + 1) * z / sq) - phi((4 * k - 1) * z / sq)
             for k in range(trunc(-nz + 1, 4), trunc(nz - 1, 4) + 1))
    t2 = sum(phi((4 * k + 3) * z / sq) - phi((4 * k + 1) * z / sq)
             for k in range(trunc(-nz - 3, 4), trunc(nz - 1, 4) + 1))
    return 1 - t1 + t2, z


def psi_sq(eps, m):
    if m == 0:
        return 0.0
    n = len(eps)
    counts = {}
    ext = eps + eps[:m - 1]
    for i in range(n):
        pat = ext[i:i + m]
        counts[pat] = counts.get(pat, 0) + 1
    return (2 ** m / n) * sum(c * c for c in counts.values()) - n


def serial(eps, m):
    d1 = psi_sq(eps, m) - psi_sq(eps, m - 1)
    d2 = psi_sq(eps, m) - 2 * psi_sq(eps, m - 1) + psi_sq(eps, m - 2)
    return igamc(2 ** (m - 2), d1 / 2), igamc(2 ** (m - 3), d2 / 2), d1, d2


def approx_entropy(eps, m):
    n = len(eps)

    def phi_m(mm):
        if mm == 0:
            return 0.0
        ext = eps + eps[:mm - 1]
        counts = {}
        for i in range(n):
            pat = ext[i:i + mm]
            counts[pat] = counts.get(pat, 0) + 1
        return sum(c / n * math.log(c / n) for c in counts.values())

    apen = phi_m(m) - phi_m(m + 1)
    chi = 2 * n * (math.log(2) - apen)
    return igamc(2 ** (m - 1), chi / 2), chi


def spectral(eps):
    n = len(eps)
    xs = [2 * int(b) - 1 for b in eps]
    # direct DFT, O(n^2), fine at example sizes
    mods = []
    for j in range(n // 2):
        s = complex(0, 0)
        for k in range(n):
            ang = 2 * math.pi * j * k / n
            s += xs[k] * complex(math.cos(ang), math.sin(ang))
        mods.append(abs(s))
    T = math.sqrt(math.log(1 / 0.05) * n)
    N0 = 0.95 * n / 2
    N1 = sum(1 for v in mods if v < T)
    d = (N1 - N0) / math.sqrt(n * 0.95 * 0.05 / 4)
    return erfc(abs(d) / math.sqrt(2)), N1, d


def main():
    print("== published small examples (sanity anchors) ==")
    print("monobit 1011010101      p=%.6f (doc 0.527089)" % monobit("1011010101"))
    print("blockfreq 0110011010 M3 p=%.6f (doc 0.801252)" % block_frequency("0110011010", 3))
    print("runs 1001101011         p=%.6f (doc 0.147232)" % runs("1001101011"))
    p, nu, chi = longest_run(LONGEST_128)
    print("longest_run 128bit      p=%.6f nu=%s chi=%.6f (doc 0.180609)" % (p, nu, chi))
    pc, z = cusum("1011010111", True)
    print("cusum fwd 1011010111    p=%.7f z=%d (doc 0.4116588)" % (pc, z))
    p1, p2, d1, d2 = serial("0011011101", 3)
    print("serial m3 0011011101    p1=%.6f p2=%.6f d1=%.4f d2=%.4f (doc 0.9057 0.8805)" % (p1, p2, d1, d2))
    pa, chi_a = approx_entropy("0100110101", 3)
    print("apen m3 0100110101      p=%.6f chi=%.6f (doc 0.261961)" % (pa, chi_a))
    ps, N1, d = spectral("1001010011")
    print("dft 1001010011          p=%.6f N1=%d d=%.6f (doc 0.029523)" % (ps, N1, d))

    print()
    print("== frozen values for the 100-bit pi-expansion string ==")
    e = PI_100
    print("monobit   p=%.12f" % monobit(e))
    print("blockfreq M=10 p=%.12f" % block_frequency(e, 10))
    print("blockfreq M=128-> skipped (n<M)")
    print("runs      p=%.12f" % runs(e))
    pc, z = cusum(e, True)
    print("cusum fwd p=%.12f z=%d" % (pc, z))
    pc, z = cusum(e, False)
    print("cusum rev p=%.12f z=%d" % (pc, z))
    p1, p2, d1, d2 = serial(e, 2)
    print("serial m2 p1=%.12f p2=%.12f d1=%.12f d2=%.12f" % (p1, p2, d1, d2))
    pa, chi_a = approx_entropy(e, 2)
    print("apen m2   p=%.12f chi=%.12f" % (pa, chi_a))
    ps, N1, d = spectral(e)
    print("dft       p=%.12f N1=%d d=%.12f" % (ps, N1, d))


if __name__ == "__main__":
    main()
