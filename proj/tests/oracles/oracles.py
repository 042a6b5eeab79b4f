"""Independent reference values frozen into the C++ tests.

Run with python3; needs mpmath and numpy. Everything here is computed
without the C++ code so that the tests compare against an outside source.
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 40
M64 = (1 << 64) - 1
G = 0x9E3779B97F4A7C15


def mix64(z):
    z &= M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def absorb(h, v):
    return mix64(h ^ ((v + G) & M64))


def key(seed, k, stream):
    return absorb(absorb(absorb(0, seed), k), stream)


def word(kk, j):
    return mix64((kk + (j + 1) * G) & M64)


def u01(kk, j):
    return ((word(kk, j) >> 11) + 0.5) * 2.0 ** -53


print("== prng")
for seed, k, stream in [(0, 0, 0), (1, 0, 0), (7, 3, 2)]:
    kk = key(seed, k, stream)
    print(f"key({seed},{k},{stream}) = 0x{kk:016X}")
    for j in range(3):
        print(f"  word[{j}] = 0x{word(kk, j):016X}  u01 = {u01(kk, j)!r}")

print("== generate(m=2, n=4, seed=7, k=3)")
m, n = 2, 4
kx, ks, ka = key(7, 3, 0), key(7, 3, 1), key(7, 3, 2)
x = [u01(kx, i) for i in range(n)]
s = [u01(ks, i) for i in range(n)]
A = [[2.0 * u01(ka, i * n + j) - 1.0 for j in range(n)] for i in range(m)]
print("x =", [repr(v) for v in x])
print("s =", [repr(v) for v in s])
print("A =", [[repr(v) for v in row] for row in A])

print("== omega_*")
for t in [mp.mpf(1) / 2, mp.mpf(6) / 7]:
    print(f"omega({mp.nstr(t, 8)}) = {mp.nstr(-t - mp.log(1 - t), 20)}")

print("== proximity r=(2,1,0.5), rho=7/6")
r = [mp.mpf(2), mp.mpf(1), mp.mpf(1) / 2]
rho = mp.mpf(7) / 6
chi = [mp.sqrt(sum((ri - rho) ** 2 / (ri ** kk * rho ** (2 - kk)) for ri in r)) for kk in range(3)]
print("chi0 chi1 chi2 =", [mp.nstr(c, 20) for c in chi])
print("delta =", mp.nstr(chi[1] ** 2 / chi[2], 20))
print("psi =", mp.nstr(-sum(mp.log(ri / rho) for ri in r), 20))

print("== R1 tptfm psi(alpha)")
g = [mp.mpf(1) / 3, mp.mpf(-5) / 9, mp.mpf(2) / 9]


def psi_r1(a):
    rho_a = ((1 - a) * 4 - (1 - a) ** 2) / 3
    return -sum(mp.log(1 + a * a * gi / rho_a) for gi in g)


print("psi(0.5) =", mp.nstr(psi_r1(mp.mpf(1) / 2), 20))
A_psi = -mp.mpf(6) / 7 - mp.log(1 - mp.mpf(6) / 7)
lo, hi = mp.mpf("0.7"), mp.mpf("0.8")  # psi(0.7) < A_psi; 0.8 is outside the domain
for _ in range(200):
    mid = (lo + hi) / 2
    rho_mid = ((1 - mid) * 4 - (1 - mid) ** 2) / 3
    inside = all(1 + mid * mid * gi / rho_mid > 0 for gi in g)
    if inside and psi_r1(mid) <= A_psi:
        lo = mid
    else:
        hi = mid
root = lo
print("alpha* (psi = A_psi) =", mp.nstr(root, 20))

print("== gamma")


def gammas(nn, rr):
    nn = mp.mpf(nn)
    beta = rr / (2 + rr)
    n_r = mp.mpf(25) / 6 + nn / (1 - beta)
    g1 = 1 / (1 + mp.sqrt(((nn + 1) / 2 + n_r) / rr))
    nh = mp.sqrt(mp.mpf(16) / 27 * (nn + 1) + n_r ** 2 / 2)
    nb = max(nh, n_r)
    k1 = mp.cbrt(rr / 2 * mp.sqrt(1 - beta))
    k2 = 1 + mp.cbrt(rr / (2 * (1 - beta))) / 6
    g2 = k1 / (mp.sqrt(nb) * k2 + k1)
    return g1, g2


for nn in [1, 99, 10 ** 6]:
    g1, g2 = gammas(nn, mp.mpf(6) / 7)
    print(f"n={nn}: acptfm {mp.nstr(g1, 20)}  (2/(3 sqrt n) = {mp.nstr(2 / (3 * mp.sqrt(nn)), 10)})"
          f"  ptfm2 {mp.nstr(g2, 20)} (x sqrt n = {mp.nstr(g2 * mp.sqrt(nn), 10)})")

print("== corrector on R1, x=(1.2,0.8), s=(1,2), y=0, w=(4,(0,1))")
xv = [mp.mpf("1.2"), mp.mpf("0.8")]
sv = [mp.mpf(1), mp.mpf(2)]
vv = [mp.mpf(0), mp.mpf(1)]
v0 = mp.mpf(4)
rr = [v0 - sum(a * b for a, b in zip(xv, sv))] + [a * b - c * c for a, b, c in zip(xv, sv, vv)]
rho = (v0 - sum(c * c for c in vv)) / 3
d = [rho - rr[1], rho - rr[2]]
# UTD with A = (1, 1)
sig = sum(a / b for a, b in zip(xv, sv))
dy = -sum(di / si for di, si in zip(d, sv)) / sig
ds = [-dy, -dy]
dx = [(di - xi * dsi) / si for di, xi, dsi, si in zip(d, xv, ds, sv)]
print("d_c =", [mp.nstr(t, 17) for t in d], " dx =", [mp.nstr(t, 17) for t in dx],
      " ds =", [mp.nstr(t, 17) for t in ds], " dy =", mp.nstr(dy, 17))


def F(a):
    xa = [xi + a * t for xi, t in zip(xv, dx)]
    sa = [si + a * t for si, t in zip(sv, ds)]
    ya = a * dy
    # c = (1,2), b = 2
    r0 = v0 - (xa[0] + 2 * xa[1]) + 2 * ya
    return -sum(mp.log(p * q - c * c) for p, q, c in zip(xa, sa, vv)) - mp.log(r0)


amin = mp.findroot(lambda a: mp.diff(F, a), mp.mpf("0.5"))
print("alpha_min =", mp.nstr(amin, 20), " F(0) =", mp.nstr(F(0), 20), " F(min) =", mp.nstr(F(amin), 20))

print("== forecast")
for mm, nn in [(32, 64), (512, 1024), (16, 16), (64, 128)]:
    print(mm, nn, (25 + mp.log(mm, 2) * mp.log(mp.mpf(nn) / 16, 2)) / 4)
