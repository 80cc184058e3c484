"""Closed-form reference results for SSH-type scattering centers.

Everything here is a pure function of the model parameters: edge-state
profiles, the resonant transmission/reflection amplitudes of the
topological zero mode, channel probabilities for an incident packet, the
visibility and reflection laws as functions of q = v/w, and the
approximate spectrum of the gain/loss chain in the strongly dimerized
regime.  These serve as test oracles and as theory overlays in CLI output.

The ratio q = 1 marks the localization transition; formulas that lose
meaning there raise instead of returning a limit value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PhysicsError


@dataclass(frozen=True)
class EdgeStateProfile:
    """Zero-mode amplitudes on the odd sublattice: entry j-1 lives on
    center site 2j-1, with amplitude (1-q^2)^(1/2) (-q)^(j-1)."""

    q: float
    amplitudes: np.ndarray

    @property
    def cells(self) -> int:
        return len(self.amplitudes)

    def embedded(self) -> np.ndarray:
        """Amplitudes placed on the full 2*cells center sites (zeros on
        the even sublattice)."""
        full = np.zeros(2 * self.cells, dtype=float)
        full[0::2] = self.amplitudes
        return full


def edge_state_amplitudes(q: float, cells: int) -> EdgeStateProfile:
    """In-gap zero-mode profile for hopping ratio q = v/w < 1.

    The prefactor normalizes the infinite chain; for finite ``cells`` the
    summed weight is 1 - q^(2*cells).
    """
    if not 0 <= q < 1:
        raise PhysicsError(f"edge state requires 0 <= q < 1, got q={q}")
    if cells < 1:
        raise PhysicsError("cells must be >= 1")
    amps = np.sqrt(1.0 - q * q) * (-q) ** np.arange(cells)
    return EdgeStateProfile(q=q, amplitudes=amps)


def zero_mode_amplitudes(q: float) -> tuple[float, float]:
    """Resonant (t1, r) of the zero mode: t1 = 2(1-q^2)/(2-q^2),
    r = -q^2/(2-q^2).  Satisfies t1 - r = 1 identically."""
    denom = 2.0 - q * q
    if denom == 0:
        raise PhysicsError("amplitudes undefined at q = sqrt(2)")
    return 2.0 * (1.0 - q * q) / denom, -q * q / denom


def predicted_probabilities(q: float, l: int) -> float:
    """Channel probability p_l for an incident packet resonant with the
    zero mode.

    Channel 0 is the reflected weight; odd output channels form the
    geometric series |t1|^2 q^(l-1); even output channels are dark.  For
    q > 1 there is no in-gap mode and everything reflects.
    """
    if q <= 0:
        raise PhysicsError(f"q must be positive, got {q}")
    if q == 1:
        raise PhysicsError("q = 1 is the transition point; probabilities undefined")
    if l < 0:
        raise PhysicsError(f"channel index must be >= 0, got {l}")
    if q > 1:
        return 1.0 if l == 0 else 0.0
    t1, r = zero_mode_amplitudes(q)
    if l == 0:
        return r * r
    if l % 2 == 0:
        return 0.0
    return t1 * t1 * q ** (l - 1)


def visibility_theory(q: float) -> float:
    """Odd-neighbor visibility (1-q^2)/(1+q^2), defined for 0 < q < 1."""
    if not 0 < q < 1:
        raise PhysicsError(f"visibility undefined outside 0 < q < 1, got q={q}")
    return (1.0 - q * q) / (1.0 + q * q)


def reflection_theory(q: float) -> float:
    """Resonant reflection law: q^4/(2-q^2)^2 below the transition, total
    reflection above it."""
    if q <= 0:
        raise PhysicsError(f"q must be positive, got {q}")
    if q == 1:
        raise PhysicsError("q = 1 is the transition point; reflection law undefined")
    if q > 1:
        return 1.0
    return q ** 4 / (2.0 - q * q) ** 2


@dataclass(frozen=True)
class NHLevel:
    """One level of the gain/loss chain: standing-wave momentum kappa,
    energy, and the internal phase phi with tan(phi) = gamma/energy.
    ``is_real`` is False when the squared energy is negative (broken-
    reality regime); such levels are excluded from scattering use."""

    n: int
    kappa: float
    energy: complex
    phase: float
    is_real: bool

    @property
    def real_energy(self) -> float:
        if not self.is_real:
            raise PhysicsError(f"level n={self.n} has complex energy")
        return self.energy.real


@dataclass(frozen=True)
class NHSpectrum:
    v: float
    w: float
    gamma: float
    cells: int
    levels: tuple[NHLevel, ...]

    def real_levels(self) -> tuple[NHLevel, ...]:
        return tuple(lv for lv in self.levels if lv.is_real)

    def level(self, n: int) -> NHLevel:
        return self.levels[n]


def nh_spectrum(v: float, w: float, gamma: float, cells: int) -> NHSpectrum:
    """Approximate positive-branch spectrum of the staggered gain/loss
    chain in the strongly dimerized regime v >> w.

    Level n in [0, cells-1] carries kappa = (n+1) pi / (cells + 1) and
    energy sqrt((v - w cos kappa)^2 - gamma^2).  Levels with negative
    radicand are flagged complex rather than rejected.
    """
    if v <= 0 or w <= 0 or gamma <= 0:
        raise PhysicsError("nh_spectrum requires v, w, gamma > 0")
    if cells < 1:
        raise PhysicsError("cells must be >= 1")
    levels = []
    for n in range(cells):
        kappa = (n + 1) * np.pi / (cells + 1)
        radicand = (v - w * np.cos(kappa)) ** 2 - gamma * gamma
        if radicand >= 0:
            eps = float(np.sqrt(radicand))
            levels.append(
                NHLevel(
                    n=n,
                    kappa=kappa,
                    energy=complex(eps),
                    phase=float(np.arctan2(gamma, eps)),
                    is_real=True,
                )
            )
        else:
            levels.append(
                NHLevel(
                    n=n,
                    kappa=kappa,
                    energy=1j * float(np.sqrt(-radicand)),
                    phase=float("nan"),
                    is_real=False,
                )
            )
    return NHSpectrum(v=v, w=w, gamma=gamma, cells=cells, levels=tuple(levels))


def nh_transmission_profile(level: NHLevel, cells: int) -> np.ndarray:
    """Per-cell transmission pattern of a real level, normalized to unit
    maximum.

    Entry m-1 is proportional to sin^2(kappa m); the two leads of cell m
    (channels 2m-1 and 2m) share this value.
    """
    if not level.is_real:
        raise PhysicsError(f"level n={level.n} is complex; no scattering profile")
    if cells < 1:
        raise PhysicsError("cells must be >= 1")
    m = np.arange(1, cells + 1)
    prof = np.sin(level.kappa * m) ** 2
    peak = prof.max()
    if peak == 0:
        raise PhysicsError("degenerate profile: sin(kappa m) vanishes on every cell")
    return prof / peak
