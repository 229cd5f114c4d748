"""Independent reference computations used by the tests.

None of these touch the code paths they check: the DFT is an explicit
matrix product, transfer functions are evaluated in mpmath, and
steady-state amplitudes come from a least-squares sinusoid fit.
"""
import mpmath
import numpy as np


def brute_force_dft(x, bins=None, chunk=512):
    """O(N^2) DFT, ``Y[k] = sum x[m] exp(-2j pi k m / N)``, for 1-D or 2-D (batch, N) input."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    ks = np.arange(n) if bins is None else np.asarray(bins)
    m = np.arange(n)
    out = []
    for start in range(0, ks.size, chunk):
        k = ks[start:start + chunk, None]
        # Reduce k*m modulo N before scaling so the phase argument stays exact.
        w = np.exp(-2j * np.pi * ((k * m) % n) / n)
        out.append(x @ w.T)
    return np.concatenate(out, axis=-1)


def mp_transfer(b, a, freq, fs, dps=40):
    """High-precision ``H(e^{jw})`` of a single rational stage."""
    with mpmath.workdps(dps):
        z = mpmath.exp(-2j * mpmath.pi * mpmath.mpf(freq) / mpmath.mpf(fs))
        num = mpmath.fsum(mpmath.mpf(c) * z**i for i, c in enumerate(b))
        den = mpmath.fsum(mpmath.mpf(c) * z**i for i, c in enumerate(a))
        return complex(num / den)


def fitted_amplitude(y, freq, fs, start=0):
    """Amplitude of the ``freq`` sinusoid in ``y[start:]`` by least squares (with an offset term)."""
    y = np.asarray(y, dtype=float)[start:]
    t = (np.arange(y.size) + start) / fs
    basis = np.column_stack([np.sin(2 * np.pi * freq * t), np.cos(2 * np.pi * freq * t), np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(np.hypot(coef[0], coef[1]))


def local_peaks(mags):
    """Indices of strict local maxima of ``mags`` sorted by decreasing height."""
    mags = np.asarray(mags)
    idx = [k for k in range(1, mags.size - 1) if mags[k] > mags[k - 1] and mags[k] > mags[k + 1]]
    return sorted(idx, key=lambda k: -mags[k])
