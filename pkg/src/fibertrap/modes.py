"""Fundamental HE11 mode of a vacuum-clad step-index nanofiber.

The propagation constant comes from the exact vector dispersion relation of a
two-layer cylindrical fiber.  Outside the core the time-averaged field
intensity is

    |E|^2 = E0^2 [K0^2(qr) + w K1^2(qr) + f K2^2(qr)]                (circular)

plus ``[w K1^2 + xi K0 K2] cos(2 phi)`` for quasi-linear polarization along x.
``E0`` is fixed by the launched power through the axial Poynting flux of the
full mode (core + cladding).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import constants as csts
from scipy import integrate, optimize, special

from .dielectric import SILICA, DielectricModel
from .errors import DomainError, InvalidInputError, MultimodeError, NoGuidedModeError

V_CUTOFF = 2.405
W_FLOOR = 1e-7


@dataclass(frozen=True)
class FiberSpec:
    radius: float  # m
    core: DielectricModel = SILICA
    n_clad: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInputError(f"fiber radius must be positive, got {self.radius}")

    def n_core(self, wavelength: float) -> float:
        n1 = float(self.core.index(wavelength))
        if not n1 > self.n_clad:
            raise InvalidInputError("core index must exceed cladding index")
        return n1


@dataclass(frozen=True)
class ModeSolution:
    """One solved HE11 mode at one wavelength.

    ``field`` (the intensity scale E0 in V/m) and ``power`` stay ``None``
    until :func:`normalize_power` is applied.
    """

    wavelength: float
    radius: float
    n1: float
    n2: float
    k: float
    v: float
    beta: float
    q: float
    h: float
    s: float
    w: float
    f: float
    xi: float
    field: Optional[float] = None
    power: Optional[float] = None

    @property
    def decay_length(self) -> float:
        return 1.0 / self.q

    @property
    def omega(self) -> float:
        return csts.c * self.k

    @property
    def neff(self) -> float:
        return self.beta / self.k

    def core_amplitude(self) -> float:
        """Amplitude A of the core field E_z = A J1(hr) that yields ``field``."""
        if self.field is None:
            raise InvalidInputError("mode is not power-normalized")
        ha, qa = self.h * self.radius, self.q * self.radius
        return (self.field * np.sqrt(2) * self.q * special.k1(qa)
                / (special.j1(ha) * self.beta * (1 - self.s)))


def v_number(fiber: FiberSpec, wavelength: float) -> float:
    if not wavelength > 0:
        raise InvalidInputError(f"wavelength must be positive, got {wavelength}")
    k = 2 * np.pi / wavelength
    n1 = fiber.n_core(wavelength)
    return k * fiber.radius * np.sqrt(n1**2 - fiber.n_clad**2)


def _bessel_terms(u, w):
    # J1'(u)/(u J1(u)) and K1'(w)/(w K1(w))
    jt = special.jvp(1, u) / (u * special.j1(u))
    kt = special.kvp(1, w) / (w * special.k1(w))
    return jt, kt


def he11_residual(u, v, n1, n2, w=None):
    """HE11 branch of the exact dispersion relation in u = h a (w = q a).

    Zero at the fundamental mode.  Written as
    J0(u)/(u J1(u)) - [ -(n1^2+n2^2)/(2 n1^2) Kt + 1/u^2 - sqrt(...) ].
    Pass ``w`` explicitly when it is too small to survive sqrt(v^2 - u^2).
    """
    if w is None:
        w = np.sqrt(v**2 - u**2)
    _, kt = _bessel_terms(u, w)
    beta_ratio2 = 1 - u**2 / (v**2) * (1 - n2**2 / n1**2)  # (beta / (n1 k))^2
    root = np.sqrt(((n1**2 - n2**2) / (2 * n1**2)) ** 2 * kt**2
                   + beta_ratio2 * (1 / w**2 + 1 / u**2) ** 2)
    rhs = -(n1**2 + n2**2) / (2 * n1**2) * kt + 1 / u**2 - root
    return special.j0(u) / (u * special.j1(u)) - rhs


def _residual_w(w, v, n1, n2):
    return he11_residual(np.sqrt(v**2 - w**2), v, n1, n2, w)


def dispersion_relative_residual(mode: ModeSolution) -> float:
    """Relative residual of the product form of the hybrid-mode equation.

    (Jt + Kt)(Jt + n2^2/n1^2 Kt) = (beta/(n1 k))^2 (1/u^2 + 1/w^2)^2
    """
    u, w = mode.h * mode.radius, mode.q * mode.radius
    jt, kt = _bessel_terms(u, w)
    lhs = (jt + kt) * (jt + (mode.n2 / mode.n1) ** 2 * kt)
    rhs = (mode.beta / (mode.n1 * mode.k)) ** 2 * (1 / u**2 + 1 / w**2) ** 2
    return abs(lhs - rhs) / abs(rhs)


def solve_he11(fiber: FiberSpec, wavelength: float) -> ModeSolution:
    """Solve for the HE11 propagation constant and the derived coefficients."""
    v = v_number(fiber, wavelength)
    if v >= V_CUTOFF:
        raise MultimodeError(f"V = {v:.4f} >= {V_CUTOFF}: fiber is not single-mode")
    a = fiber.radius
    k = 2 * np.pi / wavelength
    n1, n2 = fiber.n_core(wavelength), fiber.n_clad

    # The fundamental root has the largest u below V, i.e. the smallest
    # w = q a.  Scan w on a log grid and keep the first sign change.  Below
    # w ~ 1e-7 V the two 1/w^4 pieces of the equation cancel to round-off, so
    # exponentially weak guidance (V well under 1) cannot be resolved.
    grid = v * np.geomspace(W_FLOOR, 1 - 1e-6, 4001)
    with np.errstate(all="ignore"):
        res = _residual_w(grid, v, n1, n2)
    ok = np.isfinite(res)
    idx = np.flatnonzero(ok[:-1] & ok[1:] & (np.sign(res[:-1]) != np.sign(res[1:])))
    if idx.size == 0:
        raise NoGuidedModeError(
            f"no HE11 root with q a >= {W_FLOOR:g} V for V = {v:.4f}; "
            "guidance is too weak to resolve in double precision")
    i = idx[0]
    wq = optimize.brentq(_residual_w, grid[i], grid[i + 1], args=(v, n1, n2),
                         xtol=1e-30, rtol=4 * np.finfo(float).eps, maxiter=500)
    u = np.sqrt(v**2 - wq**2)

    h = u / a
    beta = np.sqrt(n1**2 * k**2 - h**2)
    q = wq / a
    jt, kt = _bessel_terms(u, wq)
    s = (1 / wq**2 + 1 / u**2) / (jt + kt)
    return ModeSolution(
        wavelength=wavelength, radius=a, n1=n1, n2=n2, k=k, v=v, beta=beta, q=q, h=h, s=s,
        w=2 * q**2 / (beta**2 * (1 - s) ** 2),
        f=(1 + s) ** 2 / (1 - s) ** 2,
        xi=2 * (1 + s) / (1 - s),
    )


def mode_fields(mode: ModeSolution, r, amplitude: float = 1.0, l: int = 1):
    """Complex (E_r, E_phi, E_z, dE_z/dr) of the circular mode with winding ``l``.

    Fields carry the phase exp(i(beta z + l phi - omega t)); ``amplitude`` is
    the core E_z amplitude A.
    """
    r = np.asarray(r, dtype=float)
    a, b, h, q, s = mode.radius, mode.beta, mode.h, mode.q, mode.s
    inside = r < a
    ri = np.where(inside, r, a)
    ro = np.where(inside, a, r)

    hr = h * ri
    er_in = 1j * b / (2 * h) * ((1 - s) * special.j0(hr) - (1 + s) * special.jv(2, hr))
    ep_in = -b / (2 * h) * ((1 - s) * special.j0(hr) + (1 + s) * special.jv(2, hr))
    ez_in = special.j1(hr).astype(complex)
    dez_in = h * special.jvp(1, hr)

    c = special.j1(h * a) / special.k1(q * a)
    qr = q * ro
    er_out = 1j * b / (2 * q) * c * ((1 - s) * special.k0(qr) + (1 + s) * special.kn(2, qr))
    ep_out = -b / (2 * q) * c * ((1 - s) * special.k0(qr) - (1 + s) * special.kn(2, qr))
    ez_out = c * special.k1(qr) + 0j
    dez_out = c * q * special.kvp(1, qr)

    er = amplitude * np.where(inside, er_in, er_out)
    ep = amplitude * np.where(inside, ep_in, ep_out)
    ez = amplitude * np.where(inside, ez_in, ez_out)
    dez = amplitude * np.where(inside, dez_in, dez_out)
    if l < 0:
        ep = -ep
    return er, ep, ez, dez


def poynting_z(mode: ModeSolution, r, amplitude: float = 1.0, l: int = 1):
    """Time-averaged axial Poynting flux density, W/m^2.

    The magnetic field follows from Faraday's law applied to the electric
    field, so only E and its radial derivative are needed.
    """
    r = np.asarray(r, dtype=float)
    er, ep, ez, dez = mode_fields(mode, r, amplitude, l)
    om_mu = mode.omega * csts.mu_0
    h_r = (l / r * ez - mode.beta * ep) / om_mu
    h_p = (mode.beta * er + 1j * dez) / om_mu
    return 0.5 * np.real(er * np.conj(h_p) - ep * np.conj(h_r))


def mode_power(mode: ModeSolution, amplitude: float = 1.0) -> float:
    """Total guided power (core + cladding) for core amplitude ``amplitude``."""
    a, q = mode.radius, mode.q
    integrand = lambda r: 2 * np.pi * r * poynting_z(mode, r, amplitude)  # noqa: E731
    p_in, _ = integrate.quad(integrand, 0.0, a, epsabs=0, epsrel=1e-12, limit=200)
    # cladding flux decays as exp(-2qr); integrate in t = q (r - a)
    outer = lambda t: integrand(a + t / q) / q  # noqa: E731
    p_out, _ = integrate.quad(outer, 0.0, np.inf, epsabs=0, epsrel=1e-12, limit=200)
    return p_in + p_out


def normalize_power(mode: ModeSolution, power: float) -> ModeSolution:
    """Return a copy of ``mode`` carrying ``power`` watts and its field scale."""
    if not power >= 0:
        raise InvalidInputError(f"power must be non-negative, got {power}")
    unit = replace(mode, field=1.0)
    p_unit = mode_power(mode, unit.core_amplitude())
    return replace(mode, field=float(np.sqrt(power / p_unit)), power=float(power))


def _radial_terms(mode: ModeSolution, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < mode.radius * (1 - 1e-12)):
        raise DomainError("intensity is only defined outside the fiber (r >= a)")
    if mode.field is None:
        raise InvalidInputError("mode is not power-normalized")
    qr = mode.q * r
    return special.k0(qr), special.k1(qr), special.kn(2, qr)


def intensity_circular(mode: ModeSolution, r):
    """|E|^2 outside the fiber for circular input polarization, V^2/m^2."""
    k0, k1, k2 = _radial_terms(mode, r)
    return mode.field**2 * (k0**2 + mode.w * k1**2 + mode.f * k2**2)


def intensity_linear(mode: ModeSolution, r, phi):
    """|E|^2 outside the fiber for quasi-linear polarization along x."""
    k0, k1, k2 = _radial_terms(mode, r)
    mean = k0**2 + mode.w * k1**2 + mode.f * k2**2
    mod = mode.w * k1**2 + mode.xi * k0 * k2
    return mode.field**2 * (mean + mod * np.cos(2 * np.asarray(phi, dtype=float)))
