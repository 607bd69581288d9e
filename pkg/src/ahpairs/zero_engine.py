"""Zeros of the Riemann zeta function on the critical line.

Hardy's Z function is evaluated with the Euler-Maclaurin formula for
t < 200 and with the Riemann-Siegel formula (main sum plus the remainder
terms C0..C4) above.  Zeros are isolated on the Gram grid, grouped into
Gram blocks between good Gram points, and the sign-change count of every
block is reconciled with the count implied by its endpoints.  Blocks
that come up short are subdivided; a block that still disagrees raises
:class:`UnresolvedBlock`.  The count at the base of a scan is fixed by
Brent's rule, which needs a few reconciled blocks on either side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import bernoulli, lambertw, loggamma

from ._rs_coefficients import RS_COEFFS
from .errors import DomainTooSmall, UnresolvedBlock

__all__ = [
    "Ordinate",
    "GramPoint",
    "riemann_siegel_theta",
    "smooth_count",
    "hardy_z",
    "gram_point",
    "gram_points",
    "find_zeros",
    "zero_ordinates",
    "count_zeros",
    "s_function",
    "gram_law_fraction",
]

T_MIN = 10.0
EM_SWITCH = 200.0
FIRST_ZERO_FLOOR = 14.0
MAX_DEPTH = 20
REFINE_BISECT_WIDTH = 1e-4

_TWO_PI = 2.0 * math.pi
_LOG_PI = math.log(math.pi)
_RS_POLYS = tuple(np.asarray(c, dtype=float) for c in RS_COEFFS)

# theta(t) ~ t/2 log(t/2pi) - t/2 - pi/8 + sum c_k / t^(2k-1)
_THETA_TAIL = (1.0 / 48, 7.0 / 5760, 31.0 / 80640, 127.0 / 430080, 511.0 / 1216512)

_EM_TERMS = 12
_B = bernoulli(2 * _EM_TERMS)
_EM_WEIGHTS = np.array(
    [_B[2 * k] / math.factorial(2 * k) for k in range(1, _EM_TERMS + 1)]
)


@dataclass(frozen=True)
class Ordinate:
    gamma: float
    precision: float


@dataclass(frozen=True)
class GramPoint:
    index: int
    t: float


def _theta_series(t):
    t = np.asarray(t, dtype=float)
    inv = 1.0 / t
    inv2 = inv * inv
    tail = 0.0
    for c in reversed(_THETA_TAIL):
        tail = tail * inv2 + c
    return 0.5 * t * np.log(t / _TWO_PI) - 0.5 * t - math.pi / 8 + tail * inv


def _theta_exact(t):
    t = np.asarray(t, dtype=float)
    return np.imag(loggamma(0.25 + 0.5j * t)) - 0.5 * t * _LOG_PI


def _theta_any(t):
    """theta on t > 0; exact log-gamma form below T_MIN, series above."""
    t = np.asarray(t, dtype=float)
    small = t < T_MIN
    if not np.any(small):
        return _theta_series(t)
    out = np.empty_like(t)
    out[small] = _theta_exact(t[small])
    out[~small] = _theta_series(t[~small])
    return out


def _check_domain(t, name="t"):
    arr = np.asarray(t, dtype=float)
    if arr.size and (not np.all(np.isfinite(arr)) or np.min(arr) < T_MIN):
        raise DomainTooSmall(f"{name} must be >= {T_MIN}, got min {np.min(arr)!r}")
    return arr


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(np.asarray(value).reshape(-1)[0])
    return value


def riemann_siegel_theta(t):
    """Riemann-Siegel phase theta(t) for t >= 10 (scalar or array)."""
    arr = _check_domain(t)
    return _scalar_or_array(_theta_series(arr), t)


def smooth_count(t):
    """Mean zero-counting function theta(t)/pi + 1, defined for all t > 0.

    Below t = 10 the phase is taken from the log-gamma representation
    rather than the asymptotic series.
    """
    arr = np.asarray(t, dtype=float)
    return _scalar_or_array(_theta_any(arr) / math.pi + 1.0, t)


def _z_euler_maclaurin(t: np.ndarray) -> np.ndarray:
    n_cut = int(t.max() / 2) + 12
    s = 0.5 + 1j * t
    logn = np.log(np.arange(1, n_cut, dtype=float))
    head = np.exp(-s[:, None] * logn[None, :]).sum(axis=1)
    zeta = head + n_cut ** (1 - s) / (s - 1) + 0.5 * n_cut ** (-s)
    rising = s
    power = n_cut ** (-s - 1)
    for k in range(_EM_TERMS):
        zeta = zeta + _EM_WEIGHTS[k] * rising * power
        rising = rising * (s + 2 * k + 1) * (s + 2 * k + 2)
        power = power / (n_cut * n_cut)
    return (np.exp(1j * _theta_exact(t)) * zeta).real


def _z_riemann_siegel(t: np.ndarray) -> np.ndarray:
    a = np.sqrt(t / _TWO_PI)
    n_main = np.floor(a).astype(np.int64)
    frac = a - n_main
    theta = _theta_series(t)
    out = np.empty_like(t)
    n_max = int(n_main.max())
    logs = np.log(np.arange(1, n_max + 1, dtype=float))
    weights = 1.0 / np.sqrt(np.arange(1, n_max + 1, dtype=float))
    rows = max(1, 2_000_000 // n_max)
    for lo in range(0, t.size, rows):
        sl = slice(lo, lo + rows)
        tt = t[sl]
        k = int(n_main[sl].max())
        phase = theta[sl, None] - tt[:, None] * logs[None, :k]
        terms = np.cos(phase) * weights[None, :k]
        terms[np.arange(1, k + 1)[None, :] > n_main[sl, None]] = 0.0
        out[sl] = 2.0 * terms.sum(axis=1)
    u = frac - 0.5
    inv_a = 1.0 / a
    rem = np.zeros_like(t)
    for poly in reversed(_RS_POLYS):
        rem = rem * inv_a + npoly.polyval(u, poly)
    sign = np.where(n_main % 2 == 1, 1.0, -1.0)
    return out + sign * np.sqrt(inv_a) * rem


def _hardy_z_unchecked(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    low = t < EM_SWITCH
    if np.any(low):
        out[low] = _z_euler_maclaurin(t[low])
    if np.any(~low):
        out[~low] = _z_riemann_siegel(t[~low])
    return out


def hardy_z(t):
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + it), real-valued, t >= 10."""
    arr = np.atleast_1d(_check_domain(t)).astype(float)
    return _scalar_or_array(_hardy_z_unchecked(arr), t)


def gram_points(indices) -> np.ndarray:
    """Vectorised Gram points g_n (theta(g_n) = n pi) for n >= -1."""
    n = np.atleast_1d(np.asarray(indices, dtype=float))
    if np.any(n < -1):
        raise ValueError("Gram index must be >= -1")
    rhs = n * math.pi
    # leading-order inverse of t/2 log(t/(2 pi e)) - pi/8 = n pi
    w = np.real(lambertw((n + 0.125) / math.e))
    t = _TWO_PI * math.e * np.exp(w)
    for _ in range(50):
        f = _theta_any(t) - rhs
        step = f / (0.5 * np.log(t / _TWO_PI))
        t = t - step
        if np.all(np.abs(step) <= 4e-16 * t):
            break
    return t


def gram_point(n: int) -> GramPoint:
    if n < -1:
        raise ValueError("Gram index must be >= -1")
    return GramPoint(int(n), float(gram_points([n])[0]))


def _brent_margin(t: float) -> int:
    lt = math.log(max(t, math.e))
    return max(2, math.ceil(0.0061 * lt * lt + 0.08 * lt))


class _Sampler:
    """Z values on a growing grid, cached per Gram index."""

    def __init__(self, a0: int, b0: int):
        self.a0 = a0
        self.b0 = b0
        idx = np.arange(a0, b0 + 1)
        self.idx = idx
        self.g = gram_points(idx)
        self.z = _hardy_z_unchecked(np.maximum(self.g, T_MIN))


def _count_changes(z: np.ndarray) -> int:
    s = np.signbit(z)
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _block_samples(lo: float, hi: float, interior: np.ndarray, z_lo, z_hi, z_int):
    t = np.concatenate(([lo], interior, [hi]))
    z = np.concatenate(([z_lo], z_int, [z_hi]))
    return t, z


def _reconcile(t: np.ndarray, z: np.ndarray, expected: int):
    """Subdivide until the sign-change count reaches ``expected``."""
    found = _count_changes(z)
    depth = 0
    while found < expected and depth < MAX_DEPTH:
        depth += 1
        mid = 0.5 * (t[:-1] + t[1:])
        zm = _hardy_z_unchecked(mid)
        tt = np.empty(t.size + mid.size)
        zz = np.empty_like(tt)
        tt[0::2], tt[1::2] = t, mid
        zz[0::2], zz[1::2] = z, zm
        t, z = tt, zz
        found = _count_changes(z)
    if found != expected:
        raise UnresolvedBlock(float(t[0]), float(t[-1]), expected, found)
    return t, z


def _refine(a: np.ndarray, b: np.ndarray, za: np.ndarray, zb: np.ndarray, tol: float):
    """Bracketed refinement: bisection to 1e-4, then Illinois steps to ``tol``."""
    a, b, za, zb = a.copy(), b.copy(), za.copy(), zb.copy()
    if a.size == 0:
        return a, a
    coarse = max(tol, REFINE_BISECT_WIDTH)
    while True:
        wide = (b - a) > coarse
        if not np.any(wide):
            break
        m = 0.5 * (a[wide] + b[wide])
        zm = _hardy_z_unchecked(m)
        left = np.signbit(zm) == np.signbit(za[wide])
        ia = np.flatnonzero(wide)
        a[ia[left]], za[ia[left]] = m[left], zm[left]
        b[ia[~left]], zb[ia[~left]] = m[~left], zm[~left]
    side = np.zeros(a.size, dtype=np.int8)
    for _ in range(200):
        active = (b - a) > tol
        if not np.any(active):
            break
        ia = np.flatnonzero(active)
        fa, fb = za[ia], zb[ia]
        x = (a[ia] * fb - b[ia] * fa) / (fb - fa)
        lo = a[ia] + 0.25 * tol
        hi = b[ia] - 0.25 * tol
        # fall back to bisection if the secant point is degenerate
        bad = ~np.isfinite(x) | (x <= lo) | (x >= hi)
        x = np.where(bad, 0.5 * (a[ia] + b[ia]), np.clip(x, lo, hi))
        zx = _hardy_z_unchecked(x)
        left = np.signbit(zx) == np.signbit(fa)
        # replace a
        ra = ia[left]
        a[ra], za[ra] = x[left], zx[left]
        stale_b = ra[side[ra] == 1]
        zb[stale_b] *= 0.5
        side[ra] = 1
        rb = ia[~left]
        b[rb], zb[rb] = x[~left], zx[~left]
        stale_a = rb[side[rb] == -1]
        za[stale_a] *= 0.5
        side[rb] = -1
    gamma = 0.5 * (a + b)
    # pad by a few ulps so gamma -/+ precision, recomputed in floating point,
    # still encloses the bracket [a, b]
    half = np.maximum(gamma - a, b - gamma) + 2.0 * np.spacing(gamma)
    return gamma, half


def _gram_index_below(t: float) -> int:
    return int(math.floor(float(_theta_any(np.array([t]))[0]) / math.pi))


def _scan(t_lo: float, t_hi: float, tol: float, refine: bool = True):
    """Zeros in (t_lo, t_hi] and the certified count N(t_lo).

    Returns ``(gamma, precision, n_below)``.
    """
    low_start = t_lo < 100.0
    margin = _brent_margin(t_hi)
    pad = 6 * margin + 8
    a0 = -1 if low_start else max(-1, _gram_index_below(t_lo) - pad)
    b0 = _gram_index_below(t_hi) + pad
    while True:
        s = _Sampler(a0, b0)
        good = (np.where(s.idx % 2 == 0, 1.0, -1.0) * s.z) > 0
        if low_start:
            good[s.g < T_MIN] = False
        good_pos = np.flatnonzero(good)
        # need `margin` full blocks beyond the last block reaching t_hi
        after = good_pos[s.g[good_pos] >= t_hi]
        if low_start:
            before_ok = True
        else:
            before = good_pos[s.g[good_pos] <= t_lo]
            before_ok = before.size >= margin + 1
        if after.size >= margin + 1 and before_ok:
            break
        if not before_ok:
            a0 = max(-1, a0 - pad)
        if after.size < margin + 1:
            b0 += pad

    if low_start:
        anchors_t = [T_MIN]
        anchors_n = [0]
        positions = [None]
        first = 0
    else:
        before = good_pos[s.g[good_pos] <= t_lo]
        first = int(np.searchsorted(good_pos, before[-1 - margin]))
        anchors_t, anchors_n, positions = [], [], []
    for p in good_pos[first:]:
        anchors_t.append(float(s.g[p]))
        anchors_n.append(int(s.idx[p]) + 1)
        positions.append(int(p))

    lo_brackets, hi_brackets, z_lo_br, z_hi_br = [], [], [], []
    # fast path: all Gram samples between the first and last anchor at once
    p_first = positions[1] if positions[0] is None else positions[0]
    p_last = positions[-1]
    gs = s.g[p_first : p_last + 1]
    zs = s.z[p_first : p_last + 1]
    sb = np.signbit(zs)
    change = sb[1:] != sb[:-1]
    cum = np.concatenate(([0], np.cumsum(change)))
    pos = np.asarray(positions[1:] if positions[0] is None else positions) - p_first
    found = np.diff(cum[pos])
    expected = np.diff(np.asarray(anchors_n[len(anchors_n) - len(pos) :]))
    ok_interval = np.ones(change.size, dtype=bool)
    for j in np.flatnonzero(found != expected):
        lo_i, hi_i = pos[j], pos[j + 1]
        ok_interval[lo_i:hi_i] = False
        t, z = _reconcile(gs[lo_i : hi_i + 1], zs[lo_i : hi_i + 1], int(expected[j]))
        sbb = np.signbit(z)
        ch = np.flatnonzero(sbb[1:] != sbb[:-1])
        lo_brackets.append(t[ch])
        hi_brackets.append(t[ch + 1])
        z_lo_br.append(z[ch])
        z_hi_br.append(z[ch + 1])
    ch = np.flatnonzero(change & ok_interval)
    lo_brackets.append(gs[ch])
    hi_brackets.append(gs[ch + 1])
    z_lo_br.append(zs[ch])
    z_hi_br.append(zs[ch + 1])
    if positions[0] is None:
        # opening block (T_MIN, first good Gram point]
        inner = np.flatnonzero((s.g > anchors_t[0]) & (s.g < anchors_t[1]))
        z0 = float(_hardy_z_unchecked(np.array([anchors_t[0]]))[0])
        t, z = _block_samples(
            anchors_t[0], anchors_t[1], s.g[inner], z0, s.z[positions[1]], s.z[inner]
        )
        t, z = _reconcile(t, z, anchors_n[1] - anchors_n[0])
        sbb = np.signbit(z)
        ch = np.flatnonzero(sbb[1:] != sbb[:-1])
        lo_brackets.append(t[ch])
        hi_brackets.append(t[ch + 1])
        z_lo_br.append(z[ch])
        z_hi_br.append(z[ch + 1])
    a = np.concatenate(lo_brackets)
    b = np.concatenate(hi_brackets)
    za = np.concatenate(z_lo_br)
    zb = np.concatenate(z_hi_br)
    order = np.argsort(a, kind="stable")
    a, b, za, zb = a[order], b[order], za[order], zb[order]
    gamma = 0.5 * (a + b)
    prec = 0.5 * (b - a)
    if refine:
        sel = (b > t_lo) & (a <= t_hi)
    else:
        # counting only: refine brackets that straddle an endpoint
        sel = ((a <= t_lo) & (b > t_lo)) | ((a <= t_hi) & (b > t_hi))
        tol = 1e-9
    g, pr = _refine(a[sel], b[sel], za[sel], zb[sel], tol)
    gamma[sel], prec[sel] = g, pr
    base_t, base_n = anchors_t[0], anchors_n[0]
    n_below = base_n + int(np.count_nonzero((gamma > base_t) & (gamma <= t_lo)))
    keep = (gamma > t_lo) & (gamma <= t_hi)
    return gamma[keep], prec[keep], n_below


def _validate_range(t_lo: float, t_hi: float, tol: float) -> None:
    if t_lo < T_MIN:
        raise DomainTooSmall(f"t_lo must be >= {T_MIN}, got {t_lo!r}")
    if not t_lo < t_hi:
        raise ValueError("need t_lo < t_hi")
    if tol < 1e-9:
        raise ValueError("tol must be >= 1e-9")


def zero_ordinates(t_lo: float, t_hi: float, tol: float = 1e-9) -> np.ndarray:
    """Ordinates in (t_lo, t_hi] as a float array."""
    _validate_range(t_lo, t_hi, tol)
    gamma, _, _ = _scan(float(t_lo), float(t_hi), tol)
    return gamma


def find_zeros(t_lo: float, t_hi: float, tol: float = 1e-9) -> list[Ordinate]:
    """All zero ordinates in (t_lo, t_hi], each refined to within ``tol``.

    The number returned always equals ``count_zeros(t_hi) - count_zeros(t_lo)``;
    when a Gram block cannot be reconciled :class:`UnresolvedBlock` is raised.
    """
    _validate_range(t_lo, t_hi, tol)
    gamma, prec, _ = _scan(float(t_lo), float(t_hi), tol)
    return [Ordinate(float(g), float(p)) for g, p in zip(gamma, prec)]


def count_zeros(T: float) -> int:
    """N(T): zeros with 0 < gamma <= T, counted with multiplicity."""
    if T < 0:
        raise ValueError("T must be >= 0")
    if T < FIRST_ZERO_FLOOR:
        return 0
    _, _, n = _scan(float(T), float(T) + 1.0, 1e-4, refine=False)
    return n


def s_function(t: float, tol: float = 1e-9) -> float:
    """S(t) = N(t) - theta(t)/pi - 1, using N(t+) when t sits on an ordinate."""
    _check_domain(t)
    gamma, _, n_below = _scan(float(t), float(t) + 1.0, tol)
    n = n_below + int(np.count_nonzero(gamma <= t + tol))
    return float(n - _theta_series(float(t)) / math.pi - 1.0)


def gram_law_fraction(zeros: np.ndarray, t_lo: float, t_hi: float) -> float:
    """Fraction of Gram intervals inside [t_lo, t_hi] holding exactly one zero."""
    n0 = _gram_index_below(max(t_lo, T_MIN)) + 1
    n1 = _gram_index_below(t_hi)
    if n1 <= n0:
        return float("nan")
    g = gram_points(np.arange(n0, n1 + 1))
    counts = np.diff(np.searchsorted(np.asarray(zeros), g, side="right"))
    return float(np.mean(counts == 1))
