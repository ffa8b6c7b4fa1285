"""Smooth cutoff primitives shared across the package.

Everything is built from the C-infinity step

    S(x) = E(x) / (E(x) + E(1 - x)),    E(x) = exp(-1/x) for x > 0, else 0,

which is *exactly* 0 for x <= 0 and *exactly* 1 for x >= 1 in double
precision: the tails of E underflow long before the plateau boundaries, so
the plateaus carry no rounding fuzz.  The frequency cutoff profile, the
time cutoffs of the explicit solution, and the mollifier kernel are all
expressed through S and its closed-form derivatives.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "bump_e",
    "bump_e_d1",
    "bump_e_d2",
    "smoothstep",
    "smoothstep_d1",
    "smoothstep_d2",
]

# exp(-1/x) underflows to 0.0 for x below ~1/745; treating it as exactly
# zero there is lossless in doubles.
_E_FLOOR = 1.0 / 745.0


def _asarray(x):
    a = np.asarray(x, dtype=float)
    return a, (a.ndim == 0)


def _ret(a, scalar):
    return float(a) if scalar else a


def bump_e(x):
    """E(x) = exp(-1/x) for x > 0, else 0."""
    a, scalar = _asarray(x)
    m = a > _E_FLOOR
    safe = np.where(m, a, 1.0)
    out = np.where(m, np.exp(-1.0 / safe), 0.0)
    return _ret(out, scalar)


def bump_e_d1(x):
    """E'(x) = E(x) / x**2 (0 for x <= 0)."""
    a, scalar = _asarray(x)
    m = a > _E_FLOOR
    safe = np.where(m, a, 1.0)
    out = np.where(m, np.exp(-1.0 / safe) / safe**2, 0.0)
    return _ret(out, scalar)


def bump_e_d2(x):
    """E''(x) = E(x) * (1 - 2x) / x**4 (0 for x <= 0)."""
    a, scalar = _asarray(x)
    m = a > _E_FLOOR
    safe = np.where(m, a, 1.0)
    out = np.where(m, np.exp(-1.0 / safe) * (1.0 - 2.0 * safe) / safe**4, 0.0)
    return _ret(out, scalar)


def smoothstep(x):
    """S(x): 0 for x <= 0, 1 for x >= 1, strictly increasing in between.

    The denominator E(x) + E(1-x) is positive for every real x, so the
    division is always well defined.
    """
    a, scalar = _asarray(x)
    e1 = np.asarray(bump_e(a))
    e2 = np.asarray(bump_e(1.0 - a))
    out = e1 / (e1 + e2)
    return _ret(out, scalar)


def smoothstep_d1(x):
    """S'(x), closed form; identically 0 outside (0, 1)."""
    a, scalar = _asarray(x)
    e1 = np.asarray(bump_e(a))
    e2 = np.asarray(bump_e(1.0 - a))
    d1 = np.asarray(bump_e_d1(a))
    d2 = np.asarray(bump_e_d1(1.0 - a))
    den = e1 + e2
    out = (d1 * e2 + e1 * d2) / den**2
    return _ret(out, scalar)


def smoothstep_d2(x):
    """S''(x), closed form; identically 0 outside (0, 1)."""
    a, scalar = _asarray(x)
    e1 = np.asarray(bump_e(a))
    e2 = np.asarray(bump_e(1.0 - a))
    d1 = np.asarray(bump_e_d1(a))
    d2 = np.asarray(bump_e_d1(1.0 - a))
    s1 = np.asarray(bump_e_d2(a))
    s2 = np.asarray(bump_e_d2(1.0 - a))
    den = e1 + e2
    num = d1 * e2 + e1 * d2          # numerator of S'
    dden = d1 - d2                   # derivative of the denominator
    out = (s1 * e2 - e1 * s2) / den**2 - 2.0 * num * dden / den**3
    return _ret(out, scalar)
