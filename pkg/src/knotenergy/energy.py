"""Discrete O'hara energies on polygonal curves.

The direct quadrature is the mid-point pair sum

    sum_{j != k} (1/|x_j - x_k|^alpha - 1/d_{j,k}^alpha)^{p/2} Delta_j Delta_k

with d_{j,k} the shorter-way polygon arclength and Delta_j the mid-point
cell weights.  Pairs whose chord meets or exceeds the arc (possible on
straight segments through rounding) contribute zero.

For the scale-invariant family p = 4/alpha the module also evaluates the
plotted quantity of the small-alpha experiment in a cancellation- and
underflow-free form: each summand is handled in log space and the sum is
normalized by its distortion-pair term, so the evaluation stays finite
down to alpha = 1e-3 where the naive power-based form dies.  See
``scaled_energy_stable`` for the exact expression.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curve import PolyCurve, build_arc_table
from .errors import ConfigError, NumericalDomainError
from .summation import LogSumExp, NeumaierSum, chunk_ranges, map_chunks

LOG_TINY = math.log(np.finfo(float).tiny)  # below this, exp() underflows
BETA_FALLBACK = 1.0 + 1e-9


@dataclass(frozen=True)
class EnergyParams:
    """Exponent pair (alpha, p) with alpha in (0, 4) and p >= 1.

    The energy is scale invariant exactly when alpha * p = 4; for
    alpha * p < 4 it is no longer self-repulsive and a warning is issued.
    """

    alpha: float
    p: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 4.0):
            raise ValueError("alpha must lie in (0, 4)")
        if self.p < 1.0:
            raise ValueError("p must be >= 1")
        if self.alpha * self.p < 4.0 - 1e-12:
            warnings.warn(
                f"alpha*p = {self.alpha * self.p:g} < 4: energy is not self-repulsive",
                stacklevel=2)

    @classmethod
    def scale_invariant(cls, alpha: float) -> "EnergyParams":
        return cls(alpha=alpha, p=4.0 / alpha)

    @property
    def is_scale_invariant(self) -> bool:
        return abs(self.alpha * self.p - 4.0) < 1e-12


@dataclass(frozen=True)
class EnergyReport:
    """Result of an energy evaluation.

    value        compensated direct pair sum
    stable_value log-space evaluation of the same sum (None when skipped;
                 0.0 signals underflow at very small alpha)
    beta         discrete distortion max d_{j,k} / |x_j - x_k|
    terms        number of pairs with a positive contribution
    max_term     largest single summand
    """

    value: float
    stable_value: float | None
    beta: float
    terms: int
    max_term: float

    @property
    def underflowed(self) -> bool:
        return self.stable_value is not None and self.stable_value == 0.0 and self.terms > 0


def _neg_pow(x: np.ndarray, alpha: float) -> np.ndarray:
    """x**(-alpha) with cheap paths for the common exponents."""
    if alpha == 2.0:
        return 1.0 / (x * x)
    if alpha == 1.0:
        return 1.0 / x
    return np.power(x, -alpha)


def _pos_pow(x: np.ndarray, e: float) -> np.ndarray:
    if e == 1.0:
        return x
    if e == 2.0:
        return x * x
    if e == 0.5:
        return np.sqrt(x)
    return np.power(x, e)


@dataclass
class _Accum:
    """Per-(alpha, p) reduction state across chunks."""

    direct: NeumaierSum = field(default_factory=NeumaierSum)
    lse: LogSumExp = field(default_factory=LogSumExp)
    max_term: float = 0.0
    terms: int = 0

    def double(self) -> None:
        """Upper-triangle scan to full ordered-pair sum (exact factor 2)."""
        self.direct = NeumaierSum(2.0 * self.direct.total)
        self.terms *= 2
        self.lse.shift(math.log(2.0))


def _energy_scan(curve: PolyCurve, param_list: Sequence[EnergyParams],
                 threads: int = 1, want_log: bool = True):
    """One pass over all vertex pairs, reduced for every (alpha, p) at once.

    Returns (accumulators, beta).  The pair geometry (chords, arc
    distances, weights) is computed once per chunk and shared across the
    parameter list, which is what makes alpha sweeps affordable.
    """
    v = curve.vertices
    arc = build_arc_table(curve)
    n = curve.n
    delta = arc.delta
    log_delta = np.log(delta)
    # near-diagonal arc distances recomputed as direct edge-window sums:
    # cumsum differences carry ulp(L)-level noise that the d - chord
    # cancellation amplifies far above the 1e-12 invariance targets
    k_near = min(32, (n - 1) // 2)
    windows = np.empty((k_near + 1, n))
    windows[0] = 0.0
    for m in range(1, k_near + 1):
        windows[m] = windows[m - 1] + np.roll(arc.edge_lengths, -(m - 1))

    need_chord = want_log or any(prm.alpha != 2.0 for prm in param_list)

    def run(lo, hi):
        # the pair matrix is symmetric: process columns j >= lo only and
        # double the reductions afterwards (exact, a power-of-two factor)
        diff = v[lo:hi, None, :] - v[None, lo:, :]
        chord2 = np.einsum("ijk,ijk->ij", diff, diff)
        d = np.abs(np.subtract(arc.s[lo:hi, None], arc.s[None, lo:]))
        np.minimum(d, arc.total - d, out=d)
        nrows = hi - lo
        rows = np.arange(nrows)
        g = np.arange(lo, hi)                       # global row indices
        for m in range(1, k_near + 1):
            near = g + m < n                        # forward neighbor j = g + m
            d[rows[near], g[near] + m - lo] = windows[m, g[near]]
            wrap = g < m                            # wrapped neighbor j = g + n - m
            if np.any(wrap):
                d[rows[wrap], g[wrap] + n - m - lo] = windows[m, g[wrap] + n - m]
        # drop the diagonal and the duplicate lower triangle
        tri = np.tril_indices(nrows)
        chord2[:, :nrows][tri] = np.inf
        d[:, :nrows][tri] = 1.0
        rchord2 = 1.0 / chord2
        d2 = d * d
        beta2_chunk = float(np.max(d2 * rchord2))
        chord = np.sqrt(chord2) if need_chord else None
        log_chord = log_d = log_w = None
        if want_log:
            with np.errstate(divide="ignore"):
                log_chord = np.log(chord)
            log_d = np.log(d)
            log_w = log_delta[lo:hi, None] + log_delta[None, lo:]
        out = []
        for prm in param_list:
            a, p = prm.alpha, prm.p
            if a == 2.0:
                bracket = rchord2 - 1.0 / d2
                floor = rchord2
            else:
                neg = _neg_pow(chord, a)
                bracket = neg - _neg_pow(d, a)
                floor = neg
            # pairs along straight runs have arc == chord up to rounding;
            # a bare clamp keeps the positive half of that noise and breaks
            # exact scale invariance at 1e-12, so zero the whole band
            # (bracket <= chord^-alpha * alpha * 1e-13 <=> d - chord <~ 1e-13 chord)
            bracket *= bracket > floor * (a * 1e-13)
            np.maximum(bracket, 0.0, out=bracket)
            pos = bracket > 0.0
            nterms = int(np.count_nonzero(pos))
            term = _pos_pow(bracket, p / 2.0)
            term *= delta[lo:hi, None]
            term *= delta[None, lo:]
            chunk_sum = float(term.sum())
            chunk_max = float(term.max(initial=0.0))
            lse_m = -math.inf
            lse_s = 0.0
            if want_log and nterms:
                # log term = (p/2) [ -alpha log chord + log(1 - (chord/d)^alpha) ] + log w
                lr = log_chord[pos] - log_d[pos]              # log(chord/d) <= 0
                one_minus = -np.expm1(a * lr)
                live = one_minus > 0.0    # drops ulp-level chord==arc rounding junk
                if np.any(live):
                    lt = (p / 2.0) * (-a * log_chord[pos][live] + np.log(one_minus[live])) \
                        + log_w[pos][live]
                    lse_m = float(lt.max())
                    lse_s = float(np.exp(lt - lse_m).sum())
            out.append((chunk_sum, chunk_max, nterms, lse_m, lse_s))
        return beta2_chunk, out

    parts = map_chunks(run, chunk_ranges(n), threads=threads)
    accums = [_Accum() for _ in param_list]
    beta2 = 0.0
    for beta2_chunk, per_param in parts:
        beta2 = max(beta2, beta2_chunk)
        for acc, (csum, cmax, cnt, lm, ls) in zip(accums, per_param):
            acc.direct.add(csum)
            acc.max_term = max(acc.max_term, cmax)
            acc.terms += cnt
            acc.lse.add(lm, ls)
    for acc in accums:
        acc.double()                                # unordered pairs -> ordered sum
    return accums, math.sqrt(beta2)


def ohara_energy(curve: PolyCurve, params: EnergyParams, threads: int = 1,
                 stable: bool | None = None) -> EnergyReport:
    """Direct quadrature of the O'hara energy of a polygon.

    stable=None computes the log-space cross-evaluation only for the
    scale-invariant family (where the small-alpha experiment needs it);
    pass True/False to force or skip it.
    """
    if stable is None:
        stable = params.is_scale_invariant
    accums, beta = _energy_scan(curve, [params], threads=threads, want_log=stable)
    acc = accums[0]
    stable_value = None
    if stable:
        log_e = acc.lse.value
        stable_value = 0.0 if log_e == -math.inf or log_e < LOG_TINY else math.exp(log_e)
    return EnergyReport(value=acc.direct.total, stable_value=stable_value,
                        beta=beta, terms=acc.terms, max_term=acc.max_term)


def _scaled_from_logsum(log_e: float, alpha: float, beta: float) -> float:
    """log beta * (Sigma_scaled)^(alpha/4) given log(Sigma_direct).

    Sigma_scaled divides every summand by (alpha log beta)^{p/2}; pulling
    that factor out of the pair sum gives
        value = log beta * exp( (alpha/4) * [log Sigma - (2/alpha) log(alpha log beta)] ).
    """
    log_beta = math.log(beta)
    log_sigma_scaled = log_e - (2.0 / alpha) * math.log(alpha * log_beta)
    return log_beta * math.exp((alpha / 4.0) * log_sigma_scaled)


def scaled_energy_stable(curve: PolyCurve, alpha: float, threads: int = 1) -> float:
    """Cancellation-stable scaled energy of the small-alpha experiment.

    Evaluates, for p = 4/alpha,

        log beta * ( sum_{j != k} |x_j - x_k|^{-2}
                     [ (1 - (|x_j - x_k|/d_{j,k})^alpha) / (alpha log beta) ]^{2/alpha}
                     Delta_j Delta_k )^{alpha/4}

    with beta the discrete distortion of the same vertex set.  As alpha
    decreases at fixed N this converges to log(beta); the power-based
    ("naive") evaluation of the same expression loses all digits below
    alpha ~ 0.1 while this form is exact down to alpha = 1e-3 and below.

    If beta <= 1 + 1e-9 (no distortion to normalize by) the plain
    normalized energy (1/alpha) * O^{alpha/4} is returned instead and a
    warning is issued.
    """
    params = EnergyParams.scale_invariant(alpha)
    accums, beta = _energy_scan(curve, [params], threads=threads)
    log_e = accums[0].lse.value
    if log_e == -math.inf:
        raise NumericalDomainError("energy sum is empty (degenerate curve)")
    if beta <= BETA_FALLBACK:
        warnings.warn("distortion too close to 1; falling back to the direct "
                      "normalized form", stacklevel=2)
        return math.exp((alpha / 4.0) * log_e) / alpha
    return _scaled_from_logsum(log_e, alpha, beta)


def scaled_energy_naive(curve: PolyCurve, alpha: float, threads: int = 1) -> float:
    """Power-based evaluation of the same scaled-energy expression.

    Kept as the direct counterpart of ``scaled_energy_stable``: the two
    agree to ~1e-14 for alpha >= 0.5 and the naive form degrades and
    underflows as alpha -> 0 (catastrophic cancellation in
    1 - (chord/arc)^alpha followed by the 2/alpha power).
    """
    params = EnergyParams.scale_invariant(alpha)
    accums, beta = _energy_scan(curve, [params], threads=threads, want_log=False)
    if beta <= BETA_FALLBACK:
        return accums[0].direct.total ** (alpha / 4.0) / alpha
    log_beta = math.log(beta)
    # naive: power/pow arithmetic on the normalized summands
    v = curve.vertices
    arc = build_arc_table(curve)
    n = curve.n
    k_near = min(32, (n - 1) // 2)
    windows = np.empty((k_near + 1, n))
    windows[0] = 0.0
    for m in range(1, k_near + 1):
        windows[m] = windows[m - 1] + np.roll(arc.edge_lengths, -(m - 1))
    acc = NeumaierSum()
    for lo, hi in chunk_ranges(n):
        diff = v[lo:hi, None, :] - v[None, :, :]
        chord = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        ds = np.abs(arc.s[lo:hi, None] - arc.s[None, :])
        d = np.minimum(ds, arc.total - ds)
        rows = np.arange(hi - lo)
        cols = np.arange(lo, hi)
        for m in range(1, k_near + 1):
            d[rows, (cols + m) % n] = windows[m, cols]
            d[rows, (cols - m) % n] = windows[m, (cols - m) % n]
        chord[rows, cols] = np.inf
        d[rows, cols] = 1.0
        t = (1.0 - (chord / d) ** alpha) / (alpha * log_beta)
        t[d - chord <= 1e-13 * chord] = 0.0
        np.maximum(t, 0.0, out=t)
        w = arc.delta[lo:hi, None] * arc.delta[None, :]
        acc.add(float((t ** (2.0 / alpha) / (chord * chord) * w).sum()))
    return log_beta * acc.total ** (alpha / 4.0)


def normalized_energy(curve: PolyCurve, alpha: float, threads: int = 1) -> float:
    """(1/alpha) * O^{alpha,4/alpha}(curve)^{alpha/4}, evaluated in log space.

    The distortion-free normalization of the scale-invariant energy; this
    is the quantity whose equality under sphere inversion expresses
    Moebius invariance.  Related to the stable form by an exact factor:
    stable = sqrt(alpha * log beta) * normalized.
    """
    params = EnergyParams.scale_invariant(alpha)
    accums, _ = _energy_scan(curve, [params], threads=threads)
    log_e = accums[0].lse.value
    if log_e == -math.inf:
        raise NumericalDomainError("energy sum is empty (degenerate curve)")
    return math.exp((alpha / 4.0) * log_e) / alpha


def total_curvature_limit(curve: PolyCurve, alpha: float, threads: int = 1) -> float:
    """((4 - alpha)/4) * O^{alpha,4/alpha}: the quantity that tends to a
    multiple of the total curvature as alpha -> 4.

    Only proportionality across curves is meaningful (the limiting
    constant is not pinned down); use for trend checks with alpha in (3, 4).
    """
    if not (3.0 < alpha < 4.0):
        raise ValueError("total-curvature limit regime needs alpha in (3, 4)")
    report = ohara_energy(curve, EnergyParams.scale_invariant(alpha),
                          threads=threads, stable=False)
    return (4.0 - alpha) / 4.0 * report.value


# ---------------------------------------------------------------------------
# alpha sweeps


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    curve: str
    value: float        # scaled_energy_stable; nan if the cell failed
    beta: float
    n: int
    error: str | None = None


@dataclass(frozen=True)
class SweepTable:
    rows: tuple

    def to_csv(self) -> str:
        lines = ["alpha,curve,value,beta,n"]
        for r in self.rows:
            lines.append(f"{r.alpha:.12g},{r.curve},{r.value:.12g},{r.beta:.12g},{r.n}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())

    def column(self, curve_id: str):
        """(alphas, values) for one curve, in row order."""
        rows = [r for r in self.rows if r.curve == curve_id]
        return [r.alpha for r in rows], [r.value for r in rows]

    @property
    def curve_ids(self):
        seen = []
        for r in self.rows:
            if r.curve not in seen:
                seen.append(r.curve)
        return seen


def alpha_sweep(curves: Sequence[tuple[str, PolyCurve]], alphas: Sequence[float],
                threads: int = 1) -> SweepTable:
    """Stable scaled energy for every (curve, alpha) cell.

    Row order is deterministic: curves in the given order, alphas
    ascending within each curve.  Per-cell failures are flagged rows with
    value = nan rather than aborting the sweep.
    """
    ids = [cid for cid, _ in curves]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate curve ids in sweep")
    alphas = sorted(float(a) for a in alphas)
    for a in alphas:
        if not (0.0 < a <= 2.0):
            raise ConfigError("sweep alphas must lie in (0, 2]")
    rows = []
    for cid, curve in curves:
        params = [EnergyParams.scale_invariant(a) for a in alphas]
        try:
            accums, beta = _energy_scan(curve, params, threads=threads)
        except Exception as exc:  # flag the whole curve
            rows.extend(SweepRow(a, cid, float("nan"), float("nan"), curve.n, str(exc))
                        for a in alphas)
            continue
        for a, acc in zip(alphas, accums):
            try:
                log_e = acc.lse.value
                if log_e == -math.inf:
                    raise NumericalDomainError("empty energy sum")
                if beta <= BETA_FALLBACK:
                    val = math.exp((a / 4.0) * log_e) / a
                else:
                    val = _scaled_from_logsum(log_e, a, beta)
                rows.append(SweepRow(a, cid, val, beta, curve.n))
            except Exception as exc:
                rows.append(SweepRow(a, cid, float("nan"), beta, curve.n, str(exc)))
    return SweepTable(rows=tuple(rows))
