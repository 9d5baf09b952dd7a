"""Closed-form references for the sector-resolved interferometer.

Everything here is analytic: sector gaps and their neighbor expansions, the
asymptotic sweep-through probability and its power law under the fixed-gap
calibration, the adiabatic-impulse fringe model, the exact constant-detuning
sector amplitudes, and photon statistics of squeezed batteries.  These are
used as independent cross-checks of the density-matrix simulation, never as
the production model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EnergyBudgetExceeded


def sector_gap(n: int, g: float) -> float:
    """Avoided-crossing gap 2 g sqrt(n) of the n-excitation block."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return 2.0 * g * math.sqrt(n)


def neighbor_gap_expansion(n: int, sign: int, order: int = 2) -> tuple[float, float]:
    """Exact and series ratio of the (n +/- 1)-sector gap to the n-sector gap.

    Returns (sqrt(1 +/- 1/n), 1 +/- 1/(2n) [- 1/(8 n^2)]); the second-order
    term enters with the same sign for both branches.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    exact = math.sqrt(1.0 + sign / n)
    series = 1.0 + sign / (2.0 * n)
    if order == 2:
        series -= 1.0 / (8.0 * n * n)
    return exact, series


def gap_width(var_n: float, nbar: float) -> float:
    """RMS relative width sqrt(Var(n)) / (2 nbar) of the gap distribution."""
    if nbar <= 0:
        raise ValueError(f"nbar must be > 0, got {nbar}")
    if var_n < 0:
        raise ValueError(f"var_n must be >= 0, got {var_n}")
    return math.sqrt(var_n) / (2.0 * nbar)


def sweep_rate(delta0: float, tau_p: float) -> float:
    """Detuning slope 2*delta0/tau_p of the linear sweep, in rad/ns^2."""
    return 2.0 * delta0 / tau_p


def lz_probability(gap: float, v: float) -> float:
    """Asymptotic diabatic-passage probability exp(-pi gap^2 / (2 v))."""
    if v <= 0:
        raise ValueError(f"sweep rate must be > 0, got {v}")
    return math.exp(-math.pi * gap**2 / (2.0 * v))


def fringe_amplitude(p: float) -> float:
    """Two-passage interference amplitude 4 P (1 - P)."""
    return 4.0 * p * (1.0 - p)


def fringe_curvature(p0: float, beta: float) -> float:
    """Second derivative at x=1 of A(x) = 4 e^{-beta x}(1 - e^{-beta x})."""
    return 4.0 * beta**2 * p0 * (1.0 - 4.0 * p0)


def averaged_deficit(p0: float, beta: float, var_n: float, nbar: float) -> float:
    """Leading distribution-averaged loss of fringe amplitude.

    A(1) - <A> ~= 2 beta^2 P0 (4 P0 - 1) Var(n) / nbar^2; for Poisson
    statistics this scales as 1/nbar.
    """
    return 2.0 * beta**2 * p0 * (4.0 * p0 - 1.0) * var_n / nbar**2


class SectorAmplitudes(NamedTuple):
    stay: complex  # amplitude to remain on |n, g>
    flip: complex  # amplitude transferred to |n-1, e>


def sector_amplitudes(n: int, g: float, delta: float, t: float) -> SectorAmplitudes:
    """Exact constant-detuning evolution of the n-excitation block from |n, g>.

    With lam = sqrt(g^2 n + delta^2/4):
        stay = cos(lam t) + i (delta / 2 lam) sin(lam t)
        flip = -i (g sqrt(n) / lam) sin(lam t)
    For n = 0 the block is one-dimensional and stay reduces to the bare
    phase exp(i delta t / 2).
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    gn = g * math.sqrt(n)
    lam = math.hypot(gn, delta / 2.0)
    if lam == 0.0:
        return SectorAmplitudes(stay=1.0 + 0.0j, flip=0.0j)
    s = math.sin(lam * t)
    stay = math.cos(lam * t) + 1j * (delta / (2.0 * lam)) * s
    flip = -1j * (gn / lam) * s
    return SectorAmplitudes(stay=stay, flip=flip)


class ReducedQubit(NamedTuple):
    p_excited: float
    p_ground: float
    coherence_ge: complex  # <g| rho_qubit |e>


def reduced_qubit(amplitudes: Sequence[complex], g: float, delta: float,
                  t: float) -> ReducedQubit:
    """Reduced qubit state after constant-detuning evolution from |g>.

    The battery starts in sum_n c_n |n>; the excited population only sees the
    sector populations, while the coherence requires adjacent Fock coherences
    c_k c_{k+1}^*.
    """
    c = np.asarray(amplitudes, dtype=complex)
    stay = np.empty(c.size, dtype=complex)
    flip = np.empty(c.size, dtype=complex)
    for n in range(c.size):
        stay[n], flip[n] = sector_amplitudes(n, g, delta, t)
    probs = np.abs(c) ** 2
    p_e = float(probs @ np.abs(flip) ** 2)
    p_g = float(probs @ np.abs(stay) ** 2)
    coh = complex(np.sum(c[:-1] * np.conj(c[1:]) * stay[:-1] * np.conj(flip[1:])))
    return ReducedQubit(p_excited=p_e, p_ground=p_g, coherence_ge=coh)


def amean_from_amplitudes(amplitudes: Sequence[complex]) -> complex:
    """<a> = sum_k sqrt(k+1) c_k^* c_{k+1} from Fock amplitudes."""
    c = np.asarray(amplitudes, dtype=complex)
    k = np.arange(1, c.size)
    return complex(np.sum(np.sqrt(k) * np.conj(c[:-1]) * c[1:]))


def adjacent_overlap_amean(probs: Sequence[float]) -> float:
    """|<a>| of a uniform-phase state: sum_n sqrt(n+1) sqrt(p_n p_{n+1})."""
    p = np.asarray(probs, dtype=float)
    n = np.arange(1, p.size)
    return float(np.sum(np.sqrt(n) * np.sqrt(p[:-1] * p[1:])))


@dataclass(frozen=True)
class SqueezedStats:
    var_n: float
    eta_coh: float
    omega_eff_ratio: float


def squeezed_stats(nbar: float, r: float,
                   alignment: str | float = "amplitude") -> SqueezedStats:
    """Photon statistics of a fixed-energy displaced squeezed state.

    alignment selects the squeezing angle relative to the displacement:
    "amplitude" squeezes along it (quadrature factor e^{-2r}), "phase"
    orthogonally (e^{+2r}); a float is taken as the relative angle whose
    cosine interpolates between the two.  The coherent fraction is
    1 - sinh^2(r)/nbar and the effective drive scales with its square root.
    """
    sh2 = math.sinh(r) ** 2
    if nbar <= sh2:
        raise EnergyBudgetExceeded(f"nbar={nbar} <= sinh^2(r)={sh2:.6f}")
    if alignment == "amplitude":
        quad = math.exp(-2.0 * r)
    elif alignment == "phase":
        quad = math.exp(2.0 * r)
    else:
        quad = math.cosh(2.0 * r) - math.sinh(2.0 * r) * math.cos(float(alignment))
    var_n = (nbar - sh2) * quad + 2.0 * sh2 * (sh2 + 1.0)
    eta = 1.0 - sh2 / nbar
    return SqueezedStats(var_n=var_n, eta_coh=eta, omega_eff_ratio=math.sqrt(eta))
