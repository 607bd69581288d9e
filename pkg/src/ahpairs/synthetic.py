"""Synthetic point processes with half-integer gap structure.

A renewal process whose gaps live on the lattice {1/2, 1, 3/2, ...} puts
every pairwise difference exactly on a half-integer, so it satisfies the
Alternative Hypothesis pair condition by construction.  Each gap may be
perturbed by an independent uniform jitter, so the error of a pair grows
with the number of gaps it spans.

Random numbers come from numpy's PCG64 bit generator seeded with a 64-bit
integer.  Given the seed, the output is reproducible across platforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import zero_engine
from .errors import Infeasible, InvalidSpec
from .zero_store import ZeroSet

MODES = ("rescaled", "mapped")
_PI2 = math.pi**2


def _half_index(g: float) -> int:
    k = round(2 * float(g))
    if k < 1 or abs(2 * float(g) - k) > 1e-9:
        raise InvalidSpec(f"gap {g!r} is not a positive half-integer")
    return k


@dataclass(frozen=True)
class GapDistribution:
    """Probability masses on half-integer gaps with unit mean.

    ``residual`` holds the achieved fit residual norm for distributions
    produced by :func:`fit_gap_distribution` and is NaN otherwise.  It does
    not take part in equality.
    """

    mass: dict
    residual: float = field(default=float("nan"), compare=False)

    def __post_init__(self):
        clean: dict[float, float] = {}
        for g, p in self.mass.items():
            k = _half_index(g)
            p = float(p)
            if not p >= 0 or not math.isfinite(p):
                raise InvalidSpec(f"mass at {g!r} must be a nonnegative number")
            clean[k / 2] = clean.get(k / 2, 0.0) + p
        if not clean:
            raise InvalidSpec("gap distribution is empty")
        total = math.fsum(clean.values())
        if abs(total - 1.0) > 1e-12:
            raise InvalidSpec(f"masses sum to {total!r}, not 1")
        mean = math.fsum(g * p for g, p in clean.items())
        if abs(mean - 1.0) > 1e-9:
            raise InvalidSpec(f"mean gap is {mean!r}, not 1")
        object.__setattr__(self, "mass", dict(sorted(clean.items())))

    @property
    def support(self) -> np.ndarray:
        return np.array(list(self.mass), dtype=float)

    @property
    def probs(self) -> np.ndarray:
        return np.array(list(self.mass.values()), dtype=float)

    @property
    def g_max(self) -> float:
        return float(max(self.mass))

    def lattice_vector(self) -> np.ndarray:
        """q[j] = mass at gap j/2 for j = 0..2 g_max (q[0] = 0)."""
        q = np.zeros(int(round(2 * self.g_max)) + 1)
        for g, p in self.mass.items():
            q[int(round(2 * g))] = p
        return q

    @classmethod
    def from_vector(cls, q, residual: float = float("nan")) -> "GapDistribution":
        """Inverse of :meth:`lattice_vector`, renormalising away rounding."""
        q = np.clip(np.asarray(q, dtype=float), 0.0, None)
        q[0] = 0.0
        q[q < 1e-14] = 0.0
        g = np.arange(q.size) / 2
        # tiny correction so both moment constraints hold to rounding error
        q = q / q.sum()
        nz = np.flatnonzero(q > 0)
        mass = {float(g[j]): float(q[j]) for j in nz}
        mean = math.fsum(g[j] * q[j] for j in nz)
        if abs(mean - 1.0) > 1e-9 and mean > 0:
            raise InvalidSpec(f"vector has mean {mean!r}, not 1")
        return cls(mass, residual)

    def to_json(self) -> str:
        return json.dumps(
            {"mass": {repr(g): p for g, p in self.mass.items()}, "residual": self.residual},
            indent=2,
            sort_keys=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "GapDistribution":
        obj = json.loads(text)
        mass = obj["mass"] if "mass" in obj else obj
        res = obj.get("residual", float("nan")) if "mass" in obj else float("nan")
        return cls({float(g): float(p) for g, p in mass.items()}, float(res if res is not None else "nan"))


def lattice(step: float = 1.0) -> GapDistribution:
    """Point mass at gap 1 (the integer lattice)."""
    return GapDistribution({step: 1.0})


NAMED_GAPS = {
    "lattice1": lambda: lattice(1.0),
    "half-three-halves": lambda: GapDistribution({0.5: 0.5, 1.5: 0.5}),
}


@dataclass(frozen=True)
class SyntheticSpec:
    n_points: int
    gaps: GapDistribution
    jitter: float = 0.0
    seed: int = 0
    mode: str = "rescaled"
    offset: float = 1.0

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise InvalidSpec("n_points must be a positive integer")
        if not isinstance(self.gaps, GapDistribution):
            raise InvalidSpec("gaps must be a GapDistribution")
        if not 0 <= self.jitter < 0.25:
            raise InvalidSpec("jitter must lie in [0, 1/4)")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")
        if self.mode not in MODES:
            raise InvalidSpec(f"mode must be one of {MODES}")
        if not self.offset > 0:
            raise InvalidSpec("offset must be positive")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def unit_to_height(x, offset: float = 1.0) -> np.ndarray:
    """Heights t with theta(t)/pi + 1 = x + offset (monotone Newton solve)."""
    n = np.asarray(x, dtype=float) + offset - 1.0
    return zero_engine.gram_points(n)


def _package(x: np.ndarray, mode: str, offset: float, meta: dict) -> ZeroSet:
    if mode == "rescaled":
        return ZeroSet(x, "synthetic", t_max=float(x[-1]), rescaled=True, meta=meta)
    t = unit_to_height(x, offset)
    return ZeroSet(t, "synthetic", t_max=float(t[-1]), rescaled=False, meta=meta)


def generate_ah_process(spec: SyntheticSpec) -> ZeroSet:
    """Cumulative sums of i.i.d. lattice gaps, each jittered by U(-j, j)."""
    rng = _rng(spec.seed)
    gaps = rng.choice(spec.gaps.support, size=spec.n_points, p=spec.gaps.probs)
    if spec.jitter > 0:
        gaps = gaps + rng.uniform(-spec.jitter, spec.jitter, size=spec.n_points)
    x = np.cumsum(gaps)
    meta = {"generator": "ah", "seed": str(spec.seed), "jitter": repr(spec.jitter)}
    return _package(x, spec.mode, spec.offset, meta)


def generate_poisson(n_points: int, seed: int, mode: str = "rescaled", offset: float = 1.0) -> ZeroSet:
    """Unit-intensity Poisson control process."""
    if int(n_points) != n_points or n_points < 1:
        raise InvalidSpec("n_points must be a positive integer")
    if mode not in MODES:
        raise InvalidSpec(f"mode must be one of {MODES}")
    if not 0 <= int(seed) < 2**64:
        raise InvalidSpec("seed must be a 64-bit unsigned integer")
    x = np.cumsum(_rng(seed).exponential(1.0, size=int(n_points)))
    return _package(x, mode, offset, {"generator": "poisson", "seed": str(seed)})


# -- renewal equation ----------------------------------------------------------

def renewal_sequence(q: GapDistribution, m_max: float) -> np.ndarray:
    """u[i] = u(i/2) for i = 0..2 m_max, with u(0) = 1 and
    u(m) = sum_g q(g) u(m - g)."""
    return _renewal(q.lattice_vector(), int(round(2 * m_max)))


def _renewal(qv: np.ndarray, n: int) -> np.ndarray:
    u = np.zeros(n + 1)
    u[0] = 1.0
    w = qv[1:]
    for i in range(1, n + 1):
        s = min(i, w.size)
        u[i] = np.dot(w[:s], u[i - 1 :: -1][:s])
    return u


def renewal_pair_density(q: GapDistribution, m: float) -> float:
    """Predicted density P_m of a jitter-free renewal process at lattice distance m."""
    i = round(2 * float(m))
    if i < 0 or abs(2 * float(m) - i) > 1e-9:
        raise ValueError("m must be a nonnegative half-integer")
    return float(renewal_sequence(q, i / 2)[i])


def _renewal_jacobian(qv: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """u[0..n] and du[i]/dq[j] for j = 1..len(qv)-1 (column j-1)."""
    u = _renewal(qv, n)
    w = qv[1:]
    J = np.zeros((n + 1, w.size))
    for i in range(1, n + 1):
        s = min(i, w.size)
        back = J[i - 1 :: -1][:s]
        J[i] = w[:s] @ back
        J[i, :s] += u[i - 1 :: -1][:s]
    return u, J


def ah_targets(K: float) -> dict:
    """AH densities with p0 = 1: 1/2 - 2/(pi^2 k^2) at odd k, 1/2 at even k."""
    out = {}
    for k in range(1, int(round(2 * K)) + 1):
        out[k / 2] = 0.5 - 2.0 / (_PI2 * k * k) if k % 2 else 0.5
    return out


def _project(y: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {q >= 0, sum q = 1, sum g q = 1}.

    The solution is max(y - a - b g, 0); b is found by bisection on the
    mean constraint with a solved for each b by bisection on the sum.
    """

    def alpha_for(b):
        z = y - b * g
        lo, hi = z.min() - 1.0, z.max()
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if np.maximum(z - mid, 0).sum() > 1.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15 * max(1.0, abs(mid)):
                break
        return 0.5 * (lo + hi)

    def mean_for(b):
        a = alpha_for(b)
        return np.maximum(y - a - b * g, 0) @ g, a

    lo, hi = -1.0, 1.0
    while mean_for(lo)[0] < 1.0:
        lo *= 2.0
    while mean_for(hi)[0] > 1.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean_for(mid)[0] > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    b = 0.5 * (lo + hi)
    q = np.maximum(y - alpha_for(b) - b * g, 0)
    return _polish(q, g)


def _polish(q: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Enforce both equality constraints exactly on the current support."""
    s = np.flatnonzero(q > 0)
    if s.size < 2:
        return q
    A = np.vstack([np.ones(s.size), g[s]])
    r = np.array([1.0, 1.0]) - A @ q[s]
    corr = A.T @ np.linalg.lstsq(A @ A.T, r, rcond=None)[0]
    out = q.copy()
    out[s] = np.maximum(q[s] + corr, 0)
    return out


def fit_gap_distribution(
    targets: dict,
    g_max: float,
    penalty: float = 0.0,
    max_iter: int = 5000,
    tol: float = 1e-12,
) -> GapDistribution:
    """Least-squares fit of renewal densities u(m) to ``targets`` over gap laws.

    Minimises sum_m (u(m) - target_m)^2 + penalty * sum_g (g - 1)^2 q(g)
    by projected gradient descent with Armijo backtracking, starting from
    the projection of the uniform law.  ``penalty = inf`` confines the
    support to g <= 1, where the only unit-mean law is the point mass at 1.
    The residual norm sqrt(sum (u - target)^2) is stored on the result.
    """
    if g_max < 1.0:
        raise Infeasible(f"no unit-mean gap law is supported on gaps <= {g_max}")
    n_g = _half_index(g_max)
    idx = {_half_index(m): float(v) for m, v in targets.items()}
    if not idx:
        raise ValueError("targets are empty")
    n = max(idx)
    ti = np.array(sorted(idx))
    tv = np.array([idx[i] for i in ti])
    g = np.arange(1, n_g + 1) / 2

    def residual_norm(w):
        u = _renewal(np.concatenate(([0.0], w)), n)
        return float(np.sqrt(np.sum((u[ti] - tv) ** 2)))

    if math.isinf(penalty):
        w = np.zeros(n_g)
        w[1] = 1.0
        return GapDistribution.from_vector(np.concatenate(([0.0], w)), residual_norm(w))

    var = (g - 1.0) ** 2

    def objective(w):
        u, J = _renewal_jacobian(np.concatenate(([0.0], w)), n)
        r = u[ti] - tv
        f = r @ r + penalty * (var @ w)
        grad = 2.0 * J[ti].T @ r + penalty * var
        return f, grad

    w = _project(np.full(n_g, 1.0 / n_g), g)
    f, grad = objective(w)
    step = 1.0
    for _ in range(max_iter):
        while True:
            cand = _project(w - step * grad, g)
            fc, gc = objective(cand)
            if fc <= f - 1e-4 * (grad @ (w - cand)) or step < 1e-14:
                break
            step *= 0.5
        moved = np.max(np.abs(cand - w))
        w, f, grad = cand, fc, gc
        step = min(step * 2.0, 1e3)
        if moved < tol:
            break
    return GapDistribution.from_vector(np.concatenate(([0.0], w)), residual_norm(w))
