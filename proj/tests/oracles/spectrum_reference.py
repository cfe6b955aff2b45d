#!/usr/bin/env python3
"""High-precision m=0 ring spectrum (winding convention) used to freeze the
expectations in tests/test_spectral.cpp: mode energies/decay rates, the
subradiant fraction, and the group velocity at the packet winding.

Requires mpmath. Run from anywhere:  python3 spectrum_reference.py
"""
import mpmath as mp

mp.mp.dps = 40


def v00(k):
    return 2 * ((mp.sin(k) / k**2 + mp.cos(k) / k**3) - mp.cos(k) / k)


def g00(k):
    return 2 * (mp.sin(k) / k + (mp.cos(k) / k**2 - mp.sin(k) / k**3))


def spectrum(n, a):
    radius = a / (2 * mp.sin(mp.pi / n))
    row_v = [mp.mpf(0)] * n
    row_g = [mp.mpf(1)] + [mp.mpf(0)] * (n - 1)
    for d in range(1, n):
        kappa = 2 * mp.pi * 2 * radius * mp.sin(mp.pi * d / n)
        row_v[d] = mp.mpf(3) / 8 * v00(kappa)
        row_g[d] = mp.mpf(3) / 4 * g00(kappa)
    ks = list(range(-(n // 2), (n - 1) // 2 + 1))
    vk, gk = [], []
    for k in ks:
        vk.append(mp.fsum(row_v[d] * mp.cos(2 * mp.pi * d * k / n) for d in range(n)))
        gk.append(mp.fsum(row_g[d] * mp.cos(2 * mp.pi * d * k / n) for d in range(n)))
    return ks, vk, gk


for a in ["0.05", "0.08", "0.1"]:
    ks, vk, gk = spectrum(51, mp.mpf(a))
    nsub = sum(1 for g in gk if g < 1)
    print(f"N=51 a={a}: subradiant {nsub}/51, sum Gamma_k = {mp.nstr(mp.fsum(gk), 20)}")

ks, vk, gk = spectrum(51, mp.mpf("0.08"))
for k in [-11, 0]:
    i = ks.index(k)
    print(f"k={k}: V_k = {mp.nstr(vk[i], 20)}  Gamma_k = {mp.nstr(gk[i], 20)}")
i = ks.index(-11)
velocity = (vk[i + 1] - vk[i - 1]) / (4 * mp.pi / 51)
print("group velocity at k=-11:", mp.nstr(velocity, 20), "sites per 1/gamma")
print("superradiant windings:", [k for k, g in zip(ks, gk) if g > 1])
