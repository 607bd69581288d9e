"""Reference predictions and identities for the pair densities.

GUE (Montgomery) predictions come from integrating 1 - (sin(pi a)/(pi a))^2
over the half-integer bins.  The Alternative Hypothesis side is the density
formula under p0, the two sides of the weighted-density identity for even
M, the weak-density checks and the two p0 estimators.  Error envelopes are
reported next to the values, never added to them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import pairstats
from .errors import ZeroKNotAllowed
from .pairstats import BinnedDensities
from .zero_store import ZeroSet

_PI2 = math.pi**2


@dataclass(frozen=True)
class ModelPrediction:
    statistic: str
    value: float
    equation: str
    envelopes: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("prediction value must be finite")
        if not self.equation:
            raise ValueError("equation tag must be nonempty")

    def __float__(self) -> float:
        return self.value


def gue_pair_integrand(alpha):
    """1 - (sin(pi a) / (pi a))^2, equal to 0 at a = 0."""
    a = np.asarray(alpha, dtype=float)
    out = 1.0 - np.sinc(a) ** 2
    return float(out) if out.ndim == 0 else out


def gue_bin_mass(k: int, include_diagonal: bool = True) -> float:
    """PCC prediction for P_{k/2}: the integrand's mass on (k/2 - 1/4, k/2 + 1/4].

    For k = 0 the bin is (-1/4, 1/4] and the diagonal adds 1.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        mass, _ = integrate.quad(gue_pair_integrand, -0.25, 0.25, epsabs=1e-10, epsrel=1e-12)
        return mass + (1.0 if include_diagonal else 0.0)
    mass, _ = integrate.quad(
        gue_pair_integrand, k / 2 - 0.25, k / 2 + 0.25, epsabs=1e-10, epsrel=1e-12
    )
    return mass


def ah_density_prediction(k: int, P0: float) -> float:
    """Limiting density P_{k/2} under AH given P0."""
    if k == 0:
        raise ZeroKNotAllowed("k must be nonzero")
    if k % 2 == 0:
        return P0 - 0.5
    return 1.5 - 2.0 / (_PI2 * k * k) - P0


def ah1_target(j):
    """1 - 2/(pi^2 (2j-1)^2), the AH value of P_{j-1/2} + P_j."""
    j = np.asarray(j, dtype=float)
    return 1.0 - 2.0 / (_PI2 * (2 * j - 1) ** 2)


def ideal_ah_densities(M: int, P0: float = 1.0) -> np.ndarray:
    """Density vector indexed by k = 0..2M satisfying AH1 exactly."""
    dens = np.empty(2 * M + 1)
    dens[0] = P0
    k = np.arange(1, 2 * M + 1)
    dens[1:] = np.where(k % 2 == 0, 0.5, 0.5 - 2.0 / (_PI2 * k * k))
    return dens


def _even_M(M) -> int:
    if int(M) != M or M <= 0 or int(M) % 2:
        raise ValueError("M must be a positive even integer")
    return int(M)


def theorem2_lhs(bd: BinnedDensities, M: int) -> float:
    """2 sum_{j<=M} (M - j) (P_{j-1/2} + P_j - (1 - 2/(pi^2 (2j-1)^2)))."""
    M = _even_M(M)
    half, whole = bd.half_integer(M), bd.integer(M)
    j = np.arange(1, M + 1)
    return float(2.0 * np.sum((M - j) * (half + whole - ah1_target(j))))


def theorem2_rhs(bd: BinnedDensities, M: int, L: float | None = None, R: float = 0.0) -> ModelPrediction:
    """(3/2 - P0) M - sum_{j<=M} P_{j-1/2}, with the error envelopes alongside.

    ``sqrt_log_M`` is sqrt(log M); ``m2_r_l`` is M^2 (R + 1/L^2) when L is known.
    """
    M = _even_M(M)
    half = bd.half_integer(M)
    value = (1.5 - bd.P(0)) * M - float(np.sum(half))
    L = bd.L if L is None else L
    env = {"sqrt_log_M": math.sqrt(math.log(M))}
    if L is not None and math.isfinite(L) and L > 0:
        env["m2_r_l"] = M * M * (R + 1.0 / (L * L))
    return ModelPrediction("theorem2_side", value, "(3/2 - P0) M - sum_{j<=M} P_{j-1/2}", env)


def weighted_density_sum(bd: BinnedDensities, M: int) -> float:
    """sum_{|k|<=2M} (M - |k|/2) P_{k/2}, i.e. D(T, M)/T up to error terms."""
    bd.require(M)
    k = np.arange(1, 2 * M + 1)
    return float(M * bd.P(0) + 2.0 * np.sum((M - k / 2) * bd.densities[1 : 2 * M + 1]))


def theorem2_decomposition(bd: BinnedDensities, M: int) -> dict:
    """The regrouping M P0 + 2 sum (M-j)(P_{j-1/2}+P_j) + sum P_{j-1/2}."""
    bd.require(M)
    half, whole = bd.half_integer(M), bd.integer(M)
    j = np.arange(1, M + 1)
    return {
        "diagonal": M * bd.P(0),
        "paired": float(2.0 * np.sum((M - j) * (half + whole))),
        "half_sum": float(np.sum(half)),
    }


def ah1_check(bd: BinnedDensities, M: int | None = None) -> np.ndarray:
    """Residuals P_{j-1/2} + P_j - (1 - 2/(pi^2 (2j-1)^2)) for j = 1..M."""
    if M is None:
        M = bd.k_max // 2
    half, whole = bd.half_integer(M), bd.integer(M)
    return half + whole - ah1_target(np.arange(1, M + 1))


def ah2_check(bd: BinnedDensities, M: int) -> float:
    """sum_{j<=M} P_{j-1/2} - (M/2 - 1/4)."""
    M = _even_M(M)
    return float(np.sum(bd.half_integer(M))) - (M / 2 - 0.25)


def p0_estimate(bd: BinnedDensities, M: int) -> tuple[float, float]:
    """(3/2 - mean of P_{j-1/2}, 1/2 + mean of P_j) over j = 1..M."""
    M = _even_M(M)
    return (
        1.5 - float(np.mean(bd.half_integer(M))),
        0.5 + float(np.mean(bd.integer(M))),
    )


def d_asymptotic(T: float, lam: float) -> ModelPrediction:
    """Main terms lambda^2 T + (T/pi^2) log(2 + lambda) of D(T, lambda)."""
    if not T > 1:
        raise ValueError("T must exceed 1")
    value = lam * lam * T + T / _PI2 * math.log(2 + lam)
    env = {"t_sqrt_log": T * math.sqrt(math.log(2 + lam))}
    if T > math.e:
        env["lam2_t_over_l"] = lam * lam * T / pairstats.rescale_factor(T)
    return ModelPrediction("d_asymptotic", value, "lambda^2 T + (T/pi^2) log(2 + lambda)", env)


def sum_identity(M: int) -> tuple[float, float]:
    """(2 sum_{j<=M} (M-j)(1 - 2/(pi^2 (2j-1)^2)),  M^2 - 3M/2 + log(M)/pi^2)."""
    if M < 1:
        raise ValueError("M must be >= 1")
    j = np.arange(1, M + 1, dtype=float)
    direct = math.fsum(2.0 * (M - j) * ah1_target(j))
    closed = M * M - 1.5 * M + math.log(M) / _PI2
    return direct, closed


@dataclass(frozen=True)
class EsDiagnostic:
    lambda0: float
    ratio: float
    simple_fraction: float
    critical_fraction: float


def es_diagnostics(zs: ZeroSet, T: float, lambda0_grid, unfold: bool = False) -> list[EsDiagnostic]:
    """(N-circledast + 2 N(T, lambda0)) / (T L) per lambda0, with N_s/N and N_0/N."""
    mc = pairstats.multiplicity_counts(zs, T)
    unfold = unfold and not zs.rescaled
    if unfold:
        norm = float(pairstats.zero_engine.smooth_count(T))
    else:
        norm = T * pairstats._scale(zs, T)
    simple = mc.n_simple / mc.n if mc.n else float("nan")
    critical = mc.n_critical / mc.n if mc.n else float("nan")
    out = []
    for lam0 in lambda0_grid:
        pc = pairstats.pair_count(zs, T, lam0, unfold=unfold)
        out.append(EsDiagnostic(float(lam0), (mc.n_circledast + 2 * pc) / norm, simple, critical))
    return out
