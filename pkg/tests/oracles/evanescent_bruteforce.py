"""Brute-force reference for the evanescent pressure.

Dense trapezoid sums on log-log grids, written independently of the package
(no shared helpers). Slow; run by hand to regenerate the frozen values in
test_evanescent.py:

    python tests/oracles/evanescent_bruteforce.py
"""
import numpy as np

HBAR, KB, C = 1.054571817e-34, 1.380649e-23, 2.99792458e8


def density(w, y, a, T, pol, wp, gamma):
    q = y / (2 * a)
    eps = 1 - wp**2 / (w * (w + 1j * gamma))
    p = np.sqrt(q * q + (1 - eps) * w * w / C**2)
    if pol == "TM":
        r = (eps * q - p) / (eps * q + p)
    else:
        r = (q - p) / (q + p)
    x = r * r * np.exp(-y)
    return q * q * np.imag(x / (1 - x)) / np.tanh(HBAR * w / (2 * KB * T))


def evanescent(a, T, pol, wp=1.37e16, gamma=0.53e14, w_lo=1e3, w_hi=1.37e16,
               per_decade=300, dense_band=(5e14, 1.37e16), dense_per_decade=6000,
               ny=12000):
    lo, hi = np.log10(w_lo), np.log10(w_hi)
    b0, b1 = np.log10(dense_band[0]), np.log10(dense_band[1])
    grid = np.unique(np.concatenate([
        np.linspace(lo, min(b0, hi), int(per_decade * (min(b0, hi) - lo)) + 2),
        np.linspace(max(b0, lo), min(b1, hi), int(dense_per_decade * (min(b1, hi) - max(b0, lo))) + 2),
    ]))
    ws = 10.0**grid
    total = np.empty(ws.size)
    for i, w in enumerate(ws):
        y_ref = min(1.0, 2 * a * w / C)
        ys = np.logspace(np.log10(1e-6 * y_ref), np.log10(60), ny)
        f = density(w, ys, a, T, pol, wp, gamma) * ys / (2 * a)
        total[i] = np.trapezoid(f, np.log(ys))
    return -HBAR / (2 * np.pi**2) * np.trapezoid(total * ws, np.log(ws))


if __name__ == "__main__":
    for a in (0.5e-6, 1e-6, 4e-6, 20e-6):
        for pol in ("TM", "TE"):
            print(f"a={a:g} {pol}: {evanescent(a, 300.0, pol):.8e}", flush=True)
