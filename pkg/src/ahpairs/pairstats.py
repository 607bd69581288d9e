"""Empirical pair statistics of a ZeroSet.

Every statistic works on rescaled differences d = (gamma - gamma') * L with
L = log(T) / (2 pi).  Synthetic sets flagged ``rescaled`` already have unit
mean spacing and use L = 1.

Several functions accept ``unfold=True``.  Ordinates are then mapped
through the smooth counting function theta(t)/pi + 1 before differencing,
and the normaliser T*L is replaced by theta(T)/pi + 1.  At finite heights
this is the natural analogue of the asymptotic T*L convention (TL and N(T)
differ by a factor 1 - log(2 pi e)/log T, about 0.7 at T = 10^4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import zero_engine
from .errors import InsufficientBins
from .zero_store import ZeroSet

_TWO_PI = 2.0 * math.pi

# Gauss-Legendre rules for the per-segment S-variance quadrature
_GL_LO = np.polynomial.legendre.leggauss(8)
_GL_HI = np.polynomial.legendre.leggauss(16)


def rescale_factor(T: float) -> float:
    """L = log(T) / (2 pi); 1/L is the mean spacing of ordinates near T."""
    if not T > 1:
        raise ValueError("T must exceed 1")
    return math.log(T) / _TWO_PI


def _scale(zs: ZeroSet, T: float) -> float:
    return 1.0 if zs.rescaled else rescale_factor(T)


def _coordinates(zs: ZeroSet, values: np.ndarray, T: float, unfold: bool):
    """(coordinates, scale, normaliser) for a block of ordinates."""
    if unfold:
        if zs.rescaled:
            raise ValueError("rescaled sets are already unfolded")
        return zero_engine.smooth_count(values), 1.0, float(zero_engine.smooth_count(T))
    L = _scale(zs, T)
    return values, L, T * L


def _lags(x: np.ndarray, scale: float, window: float) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield ``(lag, i, d)`` with d = (x[i+lag] - x[i]) * scale <= window.

    Only lags that still have a qualifying pair are visited; ``i`` indexes
    the lower member of each pair.
    """
    n = x.size
    active = np.arange(n - 1)
    lag = 1
    while active.size:
        active = active[active + lag < n]
        if not active.size:
            break
        d = (x[active + lag] - x[active]) * scale
        keep = d <= window
        active = active[keep]
        if active.size:
            yield lag, active, d[keep]
        lag += 1


def _half_bin(d: np.ndarray) -> np.ndarray:
    """Integer k with k/2 - 1/4 < d <= k/2 + 1/4."""
    k = np.ceil(2.0 * d - 0.5)
    k[d <= k / 2 - 0.25] -= 1
    k[d > k / 2 + 0.25] += 1
    return k.astype(np.int64)


def pair_count(zs: ZeroSet, T: float, lam: float, unfold: bool = False) -> int:
    """N(T, lambda): ordered pairs in (0, T] with 0 < (gamma - gamma') L <= lambda."""
    x, scale, _ = _coordinates(zs, zs.below(T), T, unfold)
    total = 0
    for _, _, d in _lags(x, scale, lam):
        total += int(np.count_nonzero(d > 0))
    return total


def d_statistic(zs: ZeroSet, T: float, lam: float) -> float:
    """D(T, lambda): sum over ordered pairs (diagonal included) with
    |(gamma - gamma') L| <= lambda of (lambda/L - |gamma - gamma'|)."""
    g = zs.below(T)
    L = _scale(zs, T)
    width = lam / L
    terms = [np.full(g.size, width)]
    for lag, i, _ in _lags(g, L, lam):
        t = width - (g[i + lag] - g[i])
        terms.append(t)
        terms.append(t)
    return math.fsum(np.concatenate(terms)) if g.size else 0.0


@dataclass(frozen=True)
class BinnedDensities:
    """Pair counts and densities in the half-integer bins B_{k/2}, k = 0..2M.

    ``counts_pos[k]`` and ``counts_neg[k]`` hold |B_{k/2}| and |B_{-k/2}|;
    ``counts[0]`` includes the diagonal and ``counts[k]`` for k > 0 is the sum
    of both signs.  ``densities[0] = counts[0]/norm`` and
    ``densities[k] = counts[k]/(2 norm)`` for k > 0.
    """

    T: float
    M: float
    L: float
    norm: float
    n_in_range: int
    counts_pos: np.ndarray
    counts_neg: np.ndarray
    counts: np.ndarray
    densities: np.ndarray
    unfold: bool = False

    @property
    def k_max(self) -> int:
        return int(self.densities.size - 1)

    @property
    def total_pairs(self) -> int:
        """|P(T, M)|, the number of ordered pairs in all bins."""
        return int(self.counts.sum())

    def P(self, half: float) -> float:
        """Density P_{k/2} for ``half`` = k/2 (negative values fold)."""
        k = abs(int(round(2 * half)))
        if k > self.k_max:
            raise InsufficientBins(f"no bin for k/2 = {half}; available up to {self.k_max / 2}")
        return float(self.densities[k])

    def half_integer(self, M: int) -> np.ndarray:
        """P_{j-1/2} for j = 1..M."""
        self.require(M)
        return self.densities[1 : 2 * M : 2]

    def integer(self, M: int) -> np.ndarray:
        """P_j for j = 1..M."""
        self.require(M)
        return self.densities[2 : 2 * M + 1 : 2]

    def require(self, M: int) -> None:
        if 2 * M > self.k_max:
            raise InsufficientBins(f"need bins up to k = {2 * M}, have {self.k_max}")

    @classmethod
    def from_densities(cls, densities, T: float = float("nan"), M: float | None = None) -> "BinnedDensities":
        """Wrap a density vector indexed by k (no counts)."""
        dens = np.asarray(densities, dtype=float)
        zeros = np.zeros(dens.size, dtype=np.int64)
        return cls(
            T=T,
            M=M if M is not None else (dens.size - 1) / 2,
            L=float("nan"),
            norm=float("nan"),
            n_in_range=0,
            counts_pos=zeros,
            counts_neg=zeros,
            counts=zeros,
            densities=dens,
        )


def lower_cut(T: float) -> float:
    """T / log^2 T, the lower end of the AH pair range."""
    return T / math.log(T) ** 2


def _restricted(zs: ZeroSet, T: float) -> np.ndarray:
    """Ordinates in (T/log^2 T, T]; rescaled sets have no height and keep all."""
    g = zs.below(T)
    if zs.rescaled:
        return g
    return g[np.searchsorted(g, lower_cut(T), side="right") :]


def bin_densities(zs: ZeroSet, T: float, M: float, unfold: bool = False) -> BinnedDensities:
    """Densities P_{k/2}(T) over pairs with T/log^2 T < gamma, gamma' <= T."""
    if not M > 0:
        raise ValueError("M must be positive")
    g = _restricted(zs, T)
    x, scale, norm = _coordinates(zs, g, T, unfold)
    k_max = int(math.floor(2 * M + 0.5))
    pos = np.zeros(k_max + 1, dtype=np.int64)
    neg = np.zeros(k_max + 1, dtype=np.int64)
    pos[0] += g.size
    for _, _, d in _lags(x, scale, M):
        pos += np.bincount(_half_bin(d), minlength=k_max + 1)[: k_max + 1]
        neg += np.bincount(-_half_bin(-d), minlength=k_max + 1)[: k_max + 1]
    # B_0 is a single bin; keep all of it on the positive side
    pos[0] += neg[0]
    neg[0] = 0
    counts = pos + neg
    dens = np.zeros(k_max + 1)
    if norm > 0:
        dens[0] = counts[0] / norm
        dens[1:] = counts[1:] / (2.0 * norm)
    return BinnedDensities(
        T=float(T),
        M=float(M),
        L=float(scale),
        norm=float(norm),
        n_in_range=int(g.size),
        counts_pos=pos,
        counts_neg=neg,
        counts=counts,
        densities=dens,
        unfold=unfold,
    )


class AhResiduals(NamedTuple):
    k: np.ndarray
    residual: np.ndarray

    def max_by_k(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for k in np.unique(self.k):
            out[int(k)] = float(self.residual[self.k == k].max())
        return out


def ah_residuals(zs: ZeroSet, T: float, M: float, unfold: bool = False) -> AhResiduals:
    """Per-pair distance to the nearest half-integer, scaled by 1/(|k|+1).

    Pairs are the unordered off-diagonal pairs of P(T, M), oriented so that
    d = (gamma - gamma') L >= 0; mirrored pairs carry the same residual and
    diagonal pairs have residual 0.  k is the nearest integer to 2d (ties to
    even).
    """
    g = _restricted(zs, T)
    x, scale, _ = _coordinates(zs, g, T, unfold)
    ks, rs = [], []
    for _, _, d in _lags(x, scale, M):
        k = np.rint(2.0 * d)
        ks.append(k.astype(np.int64))
        rs.append(np.abs(d - k / 2) / (np.abs(k) + 1))
    if not ks:
        return AhResiduals(np.empty(0, dtype=np.int64), np.empty(0))
    return AhResiduals(np.concatenate(ks), np.concatenate(rs))


def _pieces(g: np.ndarray, t0: float, T: float, delta: float):
    """Breakpoints of t -> N(t+delta) - N(t) on [t0, T] and the piece values."""
    cand = np.concatenate(([t0, T], g, g - delta))
    cand = cand[(cand >= t0) & (cand <= T)]
    bp = np.unique(cand)
    mid = 0.5 * (bp[:-1] + bp[1:])
    c = np.searchsorted(g, mid + delta, side="right") - np.searchsorted(g, mid, side="right")
    return bp, c


def windowed_count_variance(zs: ZeroSet, T: float, lam: float, t_start: float = 0.0) -> float:
    """Exact value of the integral over [t_start, T] of (N(t + lambda/L) - N(t))^2.

    The integrand is a step function; the integral is summed piece by piece.
    """
    L = _scale(zs, T)
    delta = lam / L
    g = zs.below(T + delta)
    if g.size == 0:
        return 0.0
    bp, c = _pieces(g, t_start, T, delta)
    return math.fsum(np.diff(bp) * c.astype(float) ** 2)


def _theta_diff(t: np.ndarray, delta: float) -> np.ndarray:
    return (zero_engine._theta_any(t + delta) - zero_engine._theta_any(t)) / math.pi


def _segment_integrals(a, b, c, delta, nodes_weights):
    x, w = nodes_weights
    half = 0.5 * (b - a)
    t = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    f = (c[:, None] - _theta_diff(t, delta)) ** 2
    return half * (f @ w)


def windowed_s_variance(
    zs: ZeroSet, T: float, lam: float, t_start: float = 0.0, rtol: float = 1e-6
) -> float:
    """Integral over [t_start, T] of (S(t + lambda/L) - S(t))^2.

    Uses S(t+delta) - S(t) = (N(t+delta) - N(t)) - (theta(t+delta) - theta(t))/pi.
    The count difference is constant between breakpoints and the theta part
    is smooth, so each piece is integrated by Gauss-Legendre rules, bisecting
    pieces where the 8- and 16-point rules disagree.  Below t = 10 theta is
    taken from the log-gamma representation.
    """
    L = _scale(zs, T)
    delta = lam / L
    g = zs.below(T + delta)
    bp, c = _pieces(g, t_start, T, delta)
    a, b, cc = bp[:-1], bp[1:], c.astype(float)
    done = []
    for _ in range(40):
        if a.size == 0:
            break
        lo = _segment_integrals(a, b, cc, delta, _GL_LO)
        hi = _segment_integrals(a, b, cc, delta, _GL_HI)
        err = np.abs(hi - lo)
        ok = err <= rtol * 1e-3 * np.maximum(np.abs(hi), b - a)
        done.append(hi[ok])
        m = 0.5 * (a + b)
        bad = ~ok
        a, b, cc = (
            np.concatenate((a[bad], m[bad])),
            np.concatenate((m[bad], b[bad])),
            np.concatenate((cc[bad], cc[bad])),
        )
    else:
        done.append(_segment_integrals(a, b, cc, delta, _GL_HI))
    return math.fsum(np.concatenate(done)) if done else 0.0


@dataclass(frozen=True)
class MultiplicityCounts:
    n: int
    n_star: int
    n_circledast: int
    n_simple: int
    n_critical: int


def multiplicity_counts(zs: ZeroSet, T: float) -> MultiplicityCounts:
    """N, N*, N-circledast, N_s and N_0 from clusters of coincident ordinates."""
    g = zs.below(T)
    if g.size == 0:
        return MultiplicityCounts(0, 0, 0, 0, 0)
    starts = np.concatenate(([True], np.diff(g) > 0))
    m = np.diff(np.append(np.flatnonzero(starts), g.size))
    n = int(m.sum())
    sq = int((m * m).sum())
    return MultiplicityCounts(
        n=n, n_star=sq, n_circledast=sq, n_simple=int(np.count_nonzero(m == 1)), n_critical=n
    )


def close_pair_count(zs: ZeroSet, T: float, h: float, unfold: bool = False, lower: float = 0.0) -> int:
    """Ordered pairs (diagonal included) with lower < gamma, gamma' <= T and |d| <= h."""
    g = zs.below(T)
    g = g[np.searchsorted(g, lower, side="right") :]
    x, scale, _ = _coordinates(zs, g, T, unfold)
    total = g.size
    for _, _, d in _lags(x, scale, h):
        total += 2 * d.size
    return total


def gm_bound_check(zs: ZeroSet, T: float, h: float, unfold: bool = False) -> float:
    """Pairs with |(gamma - gamma') L| <= h divided by (1 + h) T L."""
    if h < 0 or h > T:
        raise ValueError("need 0 <= h <= T")
    zs.check_height(T)
    _, _, norm = _coordinates(zs, np.empty(0), T, unfold)
    if norm <= 0:
        return 0.0
    return close_pair_count(zs, T, h, unfold) / ((1.0 + h) * norm)


def range_switch_gap(zs: ZeroSet, T: float, h: float) -> tuple[int, float]:
    """Pair-count change from dropping gamma <= T/log^2 T, and the (1+h)T/L scale."""
    full = close_pair_count(zs, T, h)
    cut = close_pair_count(zs, T, h, lower=lower_cut(T))
    L = _scale(zs, T)
    return full - cut, (1.0 + h) * T / L
