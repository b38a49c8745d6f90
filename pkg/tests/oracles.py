"""Independent reference computations used to freeze expected values.

Nothing here imports the package under test.
"""
import numpy as np


def expm_series(a, terms=40):
    """exp(A) by scaling and squaring around a plain Taylor series."""
    a = np.asarray(a, dtype=complex)
    norm = np.abs(a).sum(axis=1).max()
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0.5 else 0
    b = a / 2**s
    out = np.eye(len(a), dtype=complex)
    term = np.eye(len(a), dtype=complex)
    for m in range(1, terms):
        term = term @ b / m
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def henon(z, k):
    """(z1, z2) -> (z2, -z1 + z2**k), written straight from the formula."""
    z = np.asarray(z, dtype=complex)
    return np.stack([z[..., 1], -z[..., 0] + z[..., 1] ** k], axis=-1)


def cauchy_riemann_residual(f, w, h=1e-4):
    """|df/dx + i df/dy| by central differences; zero for holomorphic f."""
    dx = (f(w + h) - f(w - h)) / (2 * h)
    dy = (f(w + 1j * h) - f(w - 1j * h)) / (2 * h)
    return np.abs(dx + 1j * dy)
