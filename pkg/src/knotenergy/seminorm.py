"""Fractional Sobolev seminorms on sampled functions over R/Z.

Two variants are provided: the Gagliardo form built from endpoint
differences |u(x) - u(y)|, and the double-averaged ("bracket") form
built from the arc bracket <u,u>(x,y).  Both use the plain uniform-grid
double sum with the diagonal excluded and no singular-cell correction;
the consumers of these numbers are ratio and convergence probes, which
that level of quadrature supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import NumericalDomainError
from .summation import NeumaierSum, chunk_ranges, map_chunks
from .tangentmap import _arc_mean, _blocks, _prefix


def as_field_like(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    return v


@dataclass(frozen=True)
class SeminormParams:
    """Order beta in (0,1), exponent p in (1,inf), and the domain sub-arc.

    interval is a sub-arc (lo, hi) of [0, 1] with hi - lo <= 1; the full
    circle is (0, 1).  The double-averaged/Gagliardo comparability probe
    is only backed by theory for beta > 1/p - 1/2; ``equivalence_range``
    flags that.
    """

    beta: float
    p: float
    interval: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1)")
        if not (1.0 < self.p < math.inf):
            raise ValueError("p must lie in (1, inf)")
        lo, hi = self.interval
        if not (0.0 <= lo < hi <= 1.0):
            raise ValueError("interval must be a nonempty sub-arc of [0, 1]")

    @property
    def full_circle(self) -> bool:
        return self.interval == (0.0, 1.0)

    @property
    def equivalence_range(self) -> bool:
        return self.beta > 1.0 / self.p - 0.5


def sample(fn, params: SeminormParams, n: int) -> np.ndarray:
    """n uniform samples of fn over the parameter interval.

    On the full circle the grid is {i/n}; on a sub-arc [lo, hi) it is
    lo + (hi-lo)*i/n - the endpoint hi is not sampled, matching the
    half-open circle convention.
    """
    lo, hi = params.interval
    t = lo + (hi - lo) * np.arange(n) / n
    vals = np.asarray(fn(t), dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    elif vals.shape[0] != n:
        vals = vals.T
    return vals


def _rho_matrix(params: SeminormParams, n: int, lo: int, hi: int):
    """Pair distances rho(x, y) for grid rows lo..hi, diagonal masked out."""
    span = params.interval[1] - params.interval[0]
    i = np.arange(lo, hi)[:, None]
    j = np.arange(n)[None, :]
    if params.full_circle:
        frac = np.abs(i - j) / n
        rho = np.minimum(frac, 1.0 - frac)
    else:
        rho = span * np.abs(i - j) / n
    return rho, i != j


def gagliardo(values: np.ndarray, params: SeminormParams, threads: int = 1) -> float:
    """[u]_{W^{beta,p}}: (sum |u(x)-u(y)|^p / rho^{1+beta p} w w)^{1/p}."""
    u = np.asarray(values, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    n = len(u)
    span = params.interval[1] - params.interval[0]
    cell = span / n
    ex = 1.0 + params.beta * params.p

    def run(lo, hi):
        rho, valid = _rho_matrix(params, n, lo, hi)
        diff = u[lo:hi, None, :] - u[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        t = np.where(valid, dist ** params.p / np.where(valid, rho, 1.0) ** ex, 0.0)
        return float(t.sum())

    acc = NeumaierSum()
    for x in map_chunks(run, chunk_ranges(n), threads=threads):
        acc.add(x)
    return (acc.total * cell * cell) ** (1.0 / params.p)


def bracket_seminorm(values: np.ndarray, params: SeminormParams, threads: int = 1) -> float:
    """[[u]]_{W^{beta,p}}: the double-averaged variant, bracket in place of
    the endpoint difference.  Antipodal pairs (full circle, even n) are
    skipped along with the diagonal.
    """
    u = as_field_like(values)
    n = len(u)
    span = params.interval[1] - params.interval[0]
    if not params.full_circle and span > 0.5:
        raise NumericalDomainError("sub-arc seminorms need span <= 1/2 "
                                   "(shortest-arc means leave the interval)")
    cell = span / n
    ex = 1.0 + params.beta * params.p
    Pu = _prefix(u)
    Puu = _prefix((u * u).sum(axis=1))
    uu_sq = (u * u).sum(axis=1)

    def run(lo, hi):
        if params.full_circle:
            m, valid, _, start, end = _blocks(n, lo, hi)
            mm = np.maximum(m, 1)
        else:
            i = np.arange(lo, hi)[:, None]
            j = np.arange(n)[None, :]
            m = np.abs(i - j)
            valid = m > 0
            start = np.minimum(i, j)
            mm = np.maximum(m, 1)
            end = start + mm
        rho, valid2 = _rho_matrix(params, n, lo, hi)
        valid = valid & valid2
        mean_u = _arc_mean(Pu, u, start, end, mm, n)
        mean_uu = _arc_mean(Puu, uu_sq, start, end, mm, n)
        a = np.maximum(2.0 * (mean_uu - np.einsum("ijk,ijk->ij", mean_u, mean_u)), 0.0)
        t = np.where(valid,
                     a ** (params.p / 2.0) / np.where(valid, rho, 1.0) ** ex, 0.0)
        return float(t.sum())

    acc = NeumaierSum()
    for x in map_chunks(run, chunk_ranges(n), threads=threads):
        acc.add(x)
    return (acc.total * cell * cell) ** (1.0 / params.p)


def ast_integral(s: float, t: float, mu: float) -> float:
    """Closed form of the hourglass-set integral.

    For A(s,t) = {(x,y): min(x,y) < s,t < max(x,y)} and mu > 0,
        integral over A(s,t) of |x-y|^(-2-mu) = 2/(mu(1+mu)) |t-s|^(-mu).
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if s == t:
        raise NumericalDomainError("s and t must be distinct")
    return 2.0 / (mu * (1.0 + mu)) * abs(t - s) ** (-mu)


def ast_integral_numeric(s: float, t: float, mu: float) -> float:
    """Quadrature verification of ``ast_integral``.

    Integrates the inner y-integral's closed form (t - x)^(-1-mu)/(1+mu)
    over x in (-inf, min(s,t)), doubled for the symmetric half.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if s == t:
        raise NumericalDomainError("s and t must be distinct")
    a, b = min(s, t), max(s, t)
    val, _ = quad(lambda x: (b - x) ** (-1.0 - mu), -np.inf, a, limit=400)
    return 2.0 * val / (1.0 + mu)
