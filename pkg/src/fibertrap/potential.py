"""Two-color optical potential, total potential with the surface term, and the
closed-form design conditions of the simplified (K0-only) model."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import constants as csts
from scipy import optimize, special

from .atom import AtomModel, detuning_hz, polarizability_imag, polarizability_real
from .errors import DomainError, InvalidInputError, NoTrapError
from .modes import (FiberSpec, ModeSolution, intensity_circular, intensity_linear,
                    normalize_power, solve_he11)
from .vdw import vdw_table

CIRCULAR = "circular"
LINEAR = "linear"
D2_WAVELENGTH = 852.113e-9


@dataclass(frozen=True)
class TrapConfiguration:
    """Everything needed to evaluate the potential: fiber, atom, both modes.

    ``red`` and ``blue`` are power-normalized mode solutions.  With
    ``include_vdw=False`` the surface interaction is dropped from the total.
    """

    fiber: FiberSpec
    atom: AtomModel
    red: ModeSolution
    blue: ModeSolution
    scheme: str = CIRCULAR
    include_vdw: bool = True
    alpha_red: float = field(init=False)
    alpha_blue: float = field(init=False)

    def __post_init__(self):
        if self.scheme not in (CIRCULAR, LINEAR):
            raise InvalidInputError(f"unknown polarization scheme '{self.scheme}'")
        if self.red.field is None or self.blue.field is None:
            raise InvalidInputError("both modes must be power-normalized")
        if not self.red.omega < self.blue.omega:
            raise InvalidInputError("the red-detuned mode must have the lower frequency")
        a1 = float(polarizability_real(self.atom, self.red.omega))
        a2 = float(polarizability_real(self.atom, self.blue.omega))
        if not (a1 > 0 and a2 < 0):
            raise InvalidInputError(
                "need a red-detuned (alpha > 0) and a blue-detuned (alpha < 0) wavelength")
        object.__setattr__(self, "alpha_red", a1)
        object.__setattr__(self, "alpha_blue", a2)

    @classmethod
    def build(cls, atom: AtomModel, radius: float, lambda_red: float, lambda_blue: float,
              p_red: float, p_blue: float, scheme: str = CIRCULAR, include_vdw: bool = True):
        fiber = FiberSpec(radius)
        red = normalize_power(solve_he11(fiber, lambda_red), p_red)
        blue = normalize_power(solve_he11(fiber, lambda_blue), p_blue)
        return cls(fiber, atom, red, blue, scheme, include_vdw)

    @property
    def radius(self) -> float:
        return self.fiber.radius

    @property
    def g_red(self) -> float:
        """Coupling G1 = |alpha1| E1^2 / 4, joules."""
        return abs(self.alpha_red) * self.red.field**2 / 4

    @property
    def g_blue(self) -> float:
        return abs(self.alpha_blue) * self.blue.field**2 / 4

    @property
    def kappa_red(self) -> float:
        return float(polarizability_imag(self.atom, self.red.omega))

    @property
    def kappa_blue(self) -> float:
        return float(polarizability_imag(self.atom, self.blue.omega))

    def detunings(self, reference: float = D2_WAVELENGTH):
        """(Delta1, Delta2)/2pi in Hz relative to ``reference`` (default Cs D2)."""
        return (detuning_hz(self.red.wavelength, reference),
                detuning_hz(self.blue.wavelength, reference))

    def with_powers(self, p_red: Optional[float] = None, p_blue: Optional[float] = None):
        red = self.red if p_red is None else normalize_power(self.red, p_red)
        blue = self.blue if p_blue is None else normalize_power(self.blue, p_blue)
        return TrapConfiguration(self.fiber, self.atom, red, blue, self.scheme, self.include_vdw)


@dataclass(frozen=True)
class PotentialSample:
    """Potential components at (r, phi), joules.  Arrays broadcast together."""

    r: np.ndarray
    phi: np.ndarray
    optical: np.ndarray
    vdw: np.ndarray
    total: np.ndarray


def optical_potential(alpha, intensity):
    """Dipole potential -alpha |E|^2 / 4 of a ground-state atom."""
    intensity = np.asarray(intensity, dtype=float)
    if np.any(intensity < 0):
        raise InvalidInputError("intensity must be non-negative")
    return -alpha * intensity / 4


def _check_outside(cfg, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < cfg.radius * (1 - 1e-12)):
        raise DomainError("potential is only defined outside the fiber")
    return r


def color_potentials(cfg: TrapConfiguration, r, phi=0.0):
    """(U1, U2): red and blue optical potentials for the configured scheme."""
    r = _check_outside(cfg, r)
    if cfg.scheme == CIRCULAR:
        i1, i2 = intensity_circular(cfg.red, r), intensity_circular(cfg.blue, r)
    else:
        i1, i2 = intensity_linear(cfg.red, r, phi), intensity_linear(cfg.blue, r, phi)
    return optical_potential(cfg.alpha_red, i1), optical_potential(cfg.alpha_blue, i2)


def net_optical_circular(cfg: TrapConfiguration, r):
    r = _check_outside(cfg, r)
    u1 = optical_potential(cfg.alpha_red, intensity_circular(cfg.red, r))
    u2 = optical_potential(cfg.alpha_blue, intensity_circular(cfg.blue, r))
    return u1 + u2


def net_optical_linear(cfg: TrapConfiguration, r, phi):
    r = _check_outside(cfg, r)
    u1 = optical_potential(cfg.alpha_red, intensity_linear(cfg.red, r, phi))
    u2 = optical_potential(cfg.alpha_blue, intensity_linear(cfg.blue, r, phi))
    return u1 + u2


def net_optical(cfg: TrapConfiguration, r, phi=0.0):
    if cfg.scheme == CIRCULAR:
        return net_optical_circular(cfg, r) + 0 * np.asarray(phi, dtype=float)
    return net_optical_linear(cfg, r, phi)


def vdw_potential(cfg: TrapConfiguration, r):
    r = np.asarray(r, dtype=float)
    if not cfg.include_vdw:
        return np.zeros_like(r)
    return vdw_table(cfg.atom, cfg.fiber)(r)


def total_potential(cfg: TrapConfiguration, r, phi=0.0) -> PotentialSample:
    r = np.asarray(r, dtype=float)
    if np.any(r <= cfg.radius):
        raise DomainError("total potential needs r > a")
    phi = np.asarray(phi, dtype=float)
    u = net_optical(cfg, r, phi)
    v = vdw_potential(cfg, r)
    return PotentialSample(r=r, phi=phi, optical=u, vdw=v + 0 * u, total=u + v)


def total_energy(cfg: TrapConfiguration, r, phi=0.0):
    """Shortcut for ``total_potential(...).total``."""
    return net_optical(cfg, r, phi) + vdw_potential(cfg, r)


def radial_grid(cfg: TrapConfiguration, points: int = 2000, span_decay_lengths: float = 6.0):
    """Geometric grid in distance from a(1e-4) to ``span`` red decay lengths."""
    a = cfg.radius
    d = np.geomspace(a * 1e-4, span_decay_lengths * cfg.red.decay_length, points)
    return a + d


# --- simplified K0-only model, used for design analysis only -----------------

@dataclass(frozen=True)
class TrapConditions:
    ratio: float  # G2 / G1
    existence_bound: float
    surface_bound: float

    @property
    def minimum_exists(self) -> bool:
        return self.ratio > self.existence_bound

    @property
    def surface_repulsive(self) -> bool:
        return self.ratio >= self.surface_bound


def _k0k1(x):
    return special.k0(x) * special.k1(x)


def trap_condition_ratio(cfg: TrapConfiguration) -> TrapConditions:
    a, q1, q2 = cfg.radius, cfg.red.q, cfg.blue.q
    ratio = cfg.g_blue / cfg.g_red if cfg.g_red > 0 else np.inf
    existence = q1 * _k0k1(q1 * a) / (q2 * _k0k1(q2 * a))
    surface = special.k0(q1 * a) ** 2 / special.k0(q2 * a) ** 2
    return TrapConditions(ratio=ratio, existence_bound=existence, surface_bound=surface)


def approximate_potential(cfg: TrapConfiguration, r):
    """G2 K0^2(q2 r) - G1 K0^2(q1 r)."""
    r = _check_outside(cfg, r)
    return cfg.g_blue * special.k0(cfg.blue.q * r) ** 2 - cfg.g_red * special.k0(cfg.red.q * r) ** 2


def optimize_blue_power(cfg: TrapConfiguration) -> float:
    """Blue power that makes the simplified potential vanish at the surface."""
    a = cfg.radius
    target = special.k0(cfg.red.q * a) ** 2 / special.k0(cfg.blue.q * a) ** 2
    g_blue_per_watt = abs(cfg.alpha_blue) * normalize_power(cfg.blue, 1.0).field ** 2 / 4
    return target * cfg.g_red / g_blue_per_watt


def design_profile(r, q1, q2, a):
    """Bracket of the optimized simplified profile; multiply by G0 for energy."""
    return (special.k0(q2 * r) ** 2 / special.k0(q2 * a) ** 2
            - special.k0(q1 * r) ** 2 / special.k0(q1 * a) ** 2)


def analytic_f(r, q1, q2):
    """F(r) = K0(q1 r) K1(q1 r) / (K0(q2 r) K1(q2 r)), increasing in r when q1 < q2."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InvalidInputError("r must be positive")
    num = special.k0e(q1 * r) * special.k1e(q1 * r)
    den = special.k0e(q2 * r) * special.k1e(q2 * r)
    return num / den * np.exp(2 * (q2 - q1) * r)


def analytic_a(cfg: TrapConfiguration) -> float:
    """A = q2 G2 / (q1 G1)."""
    return cfg.blue.q * cfg.g_blue / (cfg.red.q * cfg.g_red)


def approximate_minimum(cfg: TrapConfiguration) -> float:
    """Minimum of the simplified potential from F(r_m) = A."""
    a, q1, q2 = cfg.radius, cfg.red.q, cfg.blue.q
    target = analytic_a(cfg)
    fa = analytic_f(a, q1, q2)
    if target < fa:
        raise NoTrapError("A <= F(a): no minimum of the simplified potential outside the fiber")
    if target == fa:
        return a
    hi = 2 * a
    while analytic_f(hi, q1, q2) < target:
        hi *= 2
    return optimize.brentq(lambda r: analytic_f(r, q1, q2) - target, a, hi, xtol=1e-22)


def to_mk(energy):
    return np.asarray(energy) / csts.k * 1e3


def to_uk(energy):
    return np.asarray(energy) / csts.k * 1e6
