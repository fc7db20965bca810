"""Trap figures of merit: minimum, depth, scattering, lifetimes, frequencies."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import constants as csts
from scipy import optimize

from .atom import recoil_energy
from .errors import NoTrapError, SaddlePointError
from .modes import intensity_circular, intensity_linear
from .potential import CIRCULAR, TrapConfiguration, radial_grid, total_energy


@dataclass(frozen=True)
class TrapMinimum:
    r: float
    phi: float
    energy: float  # J


@dataclass(frozen=True)
class ScatteringRates:
    red: float  # 1/s
    blue: float
    total: float
    coherence_time: float  # s, inf when nothing scatters


@dataclass(frozen=True)
class TrapReport:
    scheme: str
    r_m: float
    phi_m: float
    u_m: float  # J
    depth: float  # J
    gamma_red: float
    gamma_blue: float
    gamma_sc: float
    tau_coh: float
    tau_trap: float
    nu_r: float  # Hz, omega_r / 2 pi
    nu_phi: Optional[float]
    l_r: float
    l_phi: Optional[float]
    barrier: float  # J, wall height above the minimum on the surface side

    def to_dict(self) -> dict:
        """SI fields plus mK / uK / um / nm / kHz / ms convenience fields."""
        d = asdict(self)
        d.update(
            r_m_um=self.r_m * 1e6,
            u_m_mK=self.u_m / csts.k * 1e3,
            depth_mK=self.depth / csts.k * 1e3,
            barrier_mK=self.barrier / csts.k * 1e3,
            tau_coh_ms=self.tau_coh * 1e3,
            nu_r_kHz=self.nu_r * 1e-3,
            nu_phi_kHz=None if self.nu_phi is None else self.nu_phi * 1e-3,
            l_r_nm=self.l_r * 1e9,
            l_phi_nm=None if self.l_phi is None else self.l_phi * 1e9,
            mode_spacing_uK=csts.h * self.nu_r / csts.k * 1e6,
        )
        return {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in d.items()}


def _radial_minimum(cfg, phi, grid):
    u = total_energy(cfg, grid, phi)
    interior = np.flatnonzero((u[1:-1] < u[:-2]) & (u[1:-1] <= u[2:])) + 1
    if interior.size == 0:
        return None
    i = interior[np.argmin(u[interior])]
    res = optimize.minimize_scalar(
        lambda r: float(total_energy(cfg, r, phi)), bounds=(grid[i - 1], grid[i + 1]),
        method="bounded", options={"xatol": 1e-15})
    return res.x, float(res.fun)


def find_minimum(cfg: TrapConfiguration, points: int = 2000, phi_step_deg: float = 1.0) -> TrapMinimum:
    """Deepest local minimum of the total potential outside the fiber.

    The surface van der Waals divergence is excluded: only interior local
    minima of the radial profile count.  For the linear scheme the ring of
    radial minima is scanned in phi and refined; phi is returned modulo pi.
    """
    grid = radial_grid(cfg, points)
    if cfg.scheme == CIRCULAR:
        found = _radial_minimum(cfg, 0.0, grid)
        if found is None:
            raise NoTrapError("total potential has no minimum outside the fiber")
        return TrapMinimum(r=found[0], phi=0.0, energy=found[1])

    phis = np.deg2rad(np.arange(0.0, 180.0, phi_step_deg))
    best = None
    for phi in phis:
        found = _radial_minimum(cfg, phi, grid)
        if found is not None and (best is None or found[1] < best[2]):
            best = (found[0], phi, found[1])
    if best is None:
        raise NoTrapError("total potential has no minimum outside the fiber")

    step = np.deg2rad(phi_step_deg)

    def ring(phi):
        found = _radial_minimum(cfg, phi, grid)
        return np.inf if found is None else found[1]

    res = optimize.minimize_scalar(ring, bounds=(best[1] - step, best[1] + step),
                                   method="bounded", options={"xatol": 1e-10})
    phi_m = float(np.mod(res.x, np.pi))
    if np.isclose(phi_m, np.pi, atol=1e-8):
        phi_m = 0.0
    r_m, u_m = _radial_minimum(cfg, phi_m, grid)
    return TrapMinimum(r=r_m, phi=phi_m, energy=u_m)


def scattering_rates(cfg: TrapConfiguration, r, phi=0.0) -> ScatteringRates:
    if cfg.scheme == CIRCULAR:
        i1, i2 = intensity_circular(cfg.red, r), intensity_circular(cfg.blue, r)
    else:
        i1, i2 = intensity_linear(cfg.red, r, phi), intensity_linear(cfg.blue, r, phi)
    g1 = float(cfg.kappa_red * i1 / (4 * csts.hbar))
    g2 = float(cfg.kappa_blue * i2 / (4 * csts.hbar))
    total = g1 + g2
    return ScatteringRates(g1, g2, total, math.inf if total == 0 else 1 / total)


def recoil_energies(cfg: TrapConfiguration):
    m = cfg.atom.mass
    return float(recoil_energy(cfg.red.wavelength, m)), float(recoil_energy(cfg.blue.wavelength, m))


def trap_lifetime(depth: float, rates: ScatteringRates, recoils) -> float:
    """Recoil-heating lifetime U_D / (2 sum_i theta_i Gamma_i)."""
    if not depth > 0:
        raise NoTrapError("trap depth must be positive")
    heating = 2 * (recoils[0] * rates.red + recoils[1] * rates.blue)
    return math.inf if heating == 0 else depth / heating


def curvatures(cfg: TrapConfiguration, r, phi=0.0, rel_step=1e-4, stencil=5):
    """(d2U/dr2, d2U/ds2) by central differences, s = r phi the arc length."""
    h = r * rel_step
    f = lambda rr, pp: float(total_energy(cfg, rr, pp))  # noqa: E731
    if stencil == 3:
        d2r = (f(r + h, phi) - 2 * f(r, phi) + f(r - h, phi)) / h**2
        dr = (f(r + h, phi) - f(r - h, phi)) / (2 * h)
    else:
        d2r = (-f(r + 2 * h, phi) + 16 * f(r + h, phi) - 30 * f(r, phi)
               + 16 * f(r - h, phi) - f(r - 2 * h, phi)) / (12 * h**2)
        dr = (-f(r + 2 * h, phi) + 8 * f(r + h, phi) - 8 * f(r - h, phi) + f(r - 2 * h, phi)) / (12 * h)
    if cfg.scheme == CIRCULAR:
        return d2r, 0.0
    dp = rel_step
    if stencil == 3:
        d2p = (f(r, phi + dp) - 2 * f(r, phi) + f(r, phi - dp)) / dp**2
    else:
        d2p = (-f(r, phi + 2 * dp) + 16 * f(r, phi + dp) - 30 * f(r, phi)
               + 16 * f(r, phi - dp) - f(r, phi - 2 * dp)) / (12 * dp**2)
    return d2r, d2p / r**2 + dr / r


def harmonic_frequencies(cfg: TrapConfiguration, r, phi=0.0):
    """Angular frequencies (omega_r, omega_phi); omega_phi is None for circular."""
    kr, ks = curvatures(cfg, r, phi)
    m = cfg.atom.mass
    if kr <= 0:
        raise SaddlePointError("radial curvature is not positive")
    if cfg.scheme == CIRCULAR:
        return math.sqrt(kr / m), None
    if ks <= 0:
        raise SaddlePointError("azimuthal curvature is not positive")
    return math.sqrt(kr / m), math.sqrt(ks / m)


def ground_state_size(omega: float, mass: float) -> float:
    """Position spread of the harmonic ground state, sqrt(hbar / (2 M omega)).

    This is the rms width, directly comparable with the rms size of a
    numerically solved bound state.
    """
    if not omega > 0:
        raise SaddlePointError("oscillation frequency must be positive")
    return math.sqrt(csts.hbar / (2 * mass * omega))


def barrier_height(cfg: TrapConfiguration, minimum: TrapMinimum, points: int = 2000) -> float:
    """max U_tot between the surface and r_m, minus U_m (vdW divergence excluded)."""
    grid = radial_grid(cfg, points)
    grid = grid[grid < minimum.r]
    u = total_energy(cfg, grid, minimum.phi)
    peaks = np.flatnonzero((u[1:-1] >= u[:-2]) & (u[1:-1] > u[2:])) + 1
    top = u[peaks].max() if peaks.size else u.max()
    return float(top - minimum.energy)


def analyze(cfg: TrapConfiguration) -> TrapReport:
    """Full characterization of the trap described by ``cfg``."""
    mn = find_minimum(cfg)
    depth = -mn.energy
    if depth <= 0:
        raise NoTrapError("local minimum is not below zero energy")
    rates = scattering_rates(cfg, mn.r, mn.phi)
    tau = trap_lifetime(depth, rates, recoil_energies(cfg))
    w_r, w_p = harmonic_frequencies(cfg, mn.r, mn.phi)
    m = cfg.atom.mass
    return TrapReport(
        scheme=cfg.scheme, r_m=mn.r, phi_m=mn.phi, u_m=mn.energy, depth=depth,
        gamma_red=rates.red, gamma_blue=rates.blue, gamma_sc=rates.total,
        tau_coh=rates.coherence_time, tau_trap=tau,
        nu_r=w_r / (2 * np.pi), nu_phi=None if w_p is None else w_p / (2 * np.pi),
        l_r=ground_state_size(w_r, m), l_phi=None if w_p is None else ground_state_size(w_p, m),
        barrier=barrier_height(cfg, mn),
    )
