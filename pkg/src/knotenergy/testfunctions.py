"""Fixed suite of test functions on R/Z for seminorm and operator probes.

The suite spans the regularity range the probes care about: smooth
trigonometric polynomials, a Lipschitz hat, and a Hoelder-only
Weierstrass-type partial sum.  Coefficients are frozen so results are
reproducible across runs and machines.
"""

from __future__ import annotations

import numpy as np

# degree <= 5 trig polynomials; rows are (k, cos coeff, sin coeff)
_TRIG_A = [(1, 1.0, 0.0), (2, 0.3, -0.4), (5, 0.05, 0.1)]
_TRIG_B = [(1, 0.0, 0.8), (3, -0.5, 0.2), (4, 0.1, 0.0)]


def _trig(coeffs):
    def fn(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for k, a, b in coeffs:
            out += a * np.cos(2 * np.pi * k * t) + b * np.sin(2 * np.pi * k * t)
        return out
    return fn


def hat(t):
    """Periodic tent map, Lipschitz with a kink at 0 and 1/2."""
    t = np.mod(np.asarray(t, dtype=float), 1.0)
    return 1.0 - 4.0 * np.abs(t - 0.5) / 2.0


def weierstrass(t, gamma: float = 0.7, terms: int = 8):
    """Partial Weierstrass sum: C^{0,gamma} but nowhere smoother."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for j in range(terms):
        out += 2.0 ** (-gamma * j) * np.cos(2 * np.pi * 2 ** j * t)
    return out


def circle_map(t):
    """The unit-speed circle tangent direction (vector-valued)."""
    t = np.asarray(t, dtype=float)
    return np.column_stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)])


SMOOTH_SUITE = {
    "trig_a": _trig(_TRIG_A),
    "trig_b": _trig(_TRIG_B),
    "circle": circle_map,
}

FULL_SUITE = dict(SMOOTH_SUITE, hat=hat, weierstrass=weierstrass)
