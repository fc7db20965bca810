"""van der Waals potential of a ground-state atom outside a dielectric cylinder.

The cylinder potential is a sum over azimuthal orders n of a double integral
over axial wavenumber k and imaginary frequency xi:

    V(r) = hbar / (4 pi^3 eps0) sum_n int dk [k^2 K_n'^2(kr) + (k^2 + n^2/r^2) K_n^2(kr)]
                                   int dxi alpha(i xi) G_n(i xi, ka)

    G_n = (eps - 1) I_n I_n' / (I_n K_n' - eps I_n' K_n)       (arguments ka)

Individual Bessel functions over/underflow long before the orders needed
close to the surface, so every factor is rewritten in terms of the ratios
R_n = K_{n+1}/K_n (stable upward), Q_n = I_{n+1}/I_n (stable downward) and the
Wronskian I_n K_n = 1 / (x (R_n + Q_n)).  The k integral is a trapezoid rule in
log k, shared by all requested radii; the xi integral is Gauss-Legendre after
xi = xi0 tan(theta).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import constants as csts
from scipy import interpolate, optimize, special

from .atom import AtomModel, polarizability_imag_axis
from .dielectric import SILICA, DielectricModel
from .errors import ConvergenceError, DomainError, InvalidInputError
from .modes import FiberSpec

XI_SCALE = 2.0e15  # rad/s, near the alkali resonance lines


@dataclass(frozen=True)
class VdwResult:
    r: float  # m
    energy: float  # J
    terms: int  # azimuthal orders summed (n = 0..terms-1)
    truncation_estimate: float  # J, geometric estimate of the dropped tail (already added)

    @property
    def temperature(self) -> float:
        """Energy expressed in kelvin."""
        return self.energy / csts.k


def _xi_cutoff(atom: AtomModel, rel: float = 1e-8) -> float:
    a0 = polarizability_imag_axis(atom, 0.0)
    f = lambda x: polarizability_imag_axis(atom, x) - rel * a0  # noqa: E731
    hi = XI_SCALE
    while f(hi) > 0:
        hi *= 10
    return optimize.brentq(f, 0.0, hi, xtol=1e-6 * hi)


def xi_rule(atom: AtomModel, nodes: int = 160, xi0: float = XI_SCALE):
    """Quadrature nodes and weights on [0, xi_max] for the imaginary-frequency integral."""
    xi_max = _xi_cutoff(atom)
    theta_max = np.arctan(xi_max / xi0)
    t, wt = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * theta_max * (t + 1)
    xi = xi0 * np.tan(theta)
    weights = 0.5 * theta_max * wt * xi0 / np.cos(theta) ** 2
    return xi, weights


def c3_flat(atom: AtomModel, dielectric: DielectricModel = SILICA, nodes: int = 160) -> float:
    """Flat-surface coefficient C3 in J m^3 (V_flat = -C3 / D^3)."""
    xi, wts = xi_rule(atom, nodes)
    eps = dielectric.epsilon_imag_axis(xi)
    integrand = polarizability_imag_axis(atom, xi) * (eps - 1) / (eps + 1)
    return csts.hbar / (16 * np.pi**2 * csts.epsilon_0) * float(np.sum(wts * integrand))


def vdw_flat(c3: float, distance):
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise DomainError("atom-surface distance must be positive")
    return -c3 / distance**3


def _i_ratios(x, n_top):
    """Q_n(x) = I_{n+1}(x)/I_n(x) for n = 0..n_top by backward recurrence."""
    x = np.asarray(x, dtype=float)
    start = n_top + int(np.max(x) + 30 * np.sqrt(np.max(x))) + 60
    q = x / (2 * (start + 1) + x)
    out = np.empty((n_top + 1,) + x.shape)
    for n in range(start, 0, -1):
        q = 1.0 / (2 * n / x + q)  # now Q_{n-1}
        if n - 1 <= n_top:
            out[n - 1] = q
    return out


def _cylinder_series(atom, dielectric, a, radii, tol, n_max, k_step, xi_nodes):
    radii = np.asarray(radii, dtype=float)
    dist = radii - a
    xi, xw = xi_rule(atom, xi_nodes)
    alpha_w = xw * polarizability_imag_axis(atom, xi)
    eps = dielectric.epsilon_imag_axis(xi)

    k_lo = 1e-7 / radii.max()
    k_hi = 40.0 / dist.min()
    lnk = np.arange(np.log(k_lo), np.log(k_hi) + k_step, k_step)
    k = np.exp(lnk)
    xa = k * a
    xr = np.outer(k, radii)

    q_all = _i_ratios(xa, n_max)
    r_a = special.k1e(xa) / special.k0e(xa)
    r_r = special.k1e(xr) / special.k0e(xr)
    log_ratio = (np.log(special.k0e(xr)) - np.log(special.k0e(xa))[:, None]
                 - np.outer(k, dist))

    n_r = radii.size
    total = np.zeros(n_r)
    prev = np.zeros(n_r)
    tail = np.zeros(n_r)
    nterms = np.zeros(n_r, dtype=int)
    active = np.ones(n_r, dtype=bool)

    for n in range(n_max + 1):
        q_n = q_all[n]
        rho = q_n + n / xa  # I_n'/I_n at ka
        sig_a = n / xa - r_a  # K_n'/K_n at ka
        iknk = 1.0 / (xa * (r_a + q_n))  # I_n K_n at ka
        g = (eps - 1) * alpha_w / (sig_a[:, None] - eps * rho[:, None])
        w_n = rho * (g.sum(axis=1))  # xi integral, without the I/K factor

        cols = np.flatnonzero(active)
        sig_r = n / xr[:, cols] - r_r[:, cols]
        bracket = k[:, None] ** 2 * (sig_r**2 + 1) + (n / radii[cols]) ** 2
        integrand = k[:, None] * iknk[:, None] * np.exp(2 * log_ratio[:, cols]) * bracket * w_n[:, None]
        term = (1.0 if n == 0 else 2.0) * k_step * integrand.sum(axis=0)

        total[cols] += term
        nterms[cols] = n + 1
        if n >= 2:
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.abs(term / prev[cols])
                est = np.where(ratio < 1, term * ratio / (1 - ratio), np.inf)
            est = np.where(term == 0, 0.0, est)  # e.g. a vacuum "dielectric"
            small = np.abs(term) <= 1e-4 * np.abs(total[cols])
            done = small & (np.abs(est) <= tol * np.abs(total[cols]))
            tail[cols[done]] = est[done]
            total[cols[done]] += est[done]
            active[cols[done]] = False
        prev[cols] = term

        # advance the K ratios to order n + 1
        log_ratio[:, cols] += np.log(r_r[:, cols]) - np.log(r_a)[:, None]
        r_a = 2 * (n + 1) / xa + 1 / r_a
        r_r[:, cols] = 2 * (n + 1) / xr[:, cols] + 1 / r_r[:, cols]
        if not active.any():
            break

    pref = csts.hbar / (4 * np.pi**3 * csts.epsilon_0)
    if active.any():
        raise ConvergenceError(
            f"azimuthal sum not converged within {n_max} orders at r = {radii[active]}",
            partial=pref * total,
        )
    return pref * total, nterms, pref * tail


def vdw_cylinder(atom: AtomModel, fiber: FiberSpec, r: float, tol: float = 1e-3,
                 n_max: int = 4000, k_step: float = 0.05, xi_nodes: int = 80) -> VdwResult:
    """van der Waals energy at distance ``r`` from the axis of ``fiber``."""
    if not r > fiber.radius:
        raise DomainError("the cylinder potential needs r > a")
    v, n, t = vdw_cylinder_many(atom, fiber, [r], tol, n_max, k_step, xi_nodes)
    return VdwResult(r=float(r), energy=float(v[0]), terms=int(n[0]), truncation_estimate=float(t[0]))


def vdw_cylinder_many(atom, fiber, radii, tol=1e-3, n_max=4000, k_step=0.05, xi_nodes=80):
    """Vectorized form returning (energies J, terms, tail estimates J)."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii <= fiber.radius):
        raise DomainError("the cylinder potential needs r > a")
    if not tol > 0:
        raise InvalidInputError("tolerance must be positive")
    return _cylinder_series(atom, fiber.core, fiber.radius, radii, tol, n_max, k_step, xi_nodes)


class VdwTable:
    """Spline of V/V_flat versus log distance, filled once per (atom, fiber).

    Below the first node the ratio is interpolated linearly to its exact
    D -> 0 limit of one; beyond the last node V follows the power law set by
    the last two nodes.
    """

    def __init__(self, atom: AtomModel, fiber: FiberSpec, d_min_rel=0.01, d_max_rel=40.0, points=36):
        a = fiber.radius
        self.radius = a
        self.c3 = c3_flat(atom, fiber.core)
        d = a * np.geomspace(d_min_rel, d_max_rel, points)
        v, _, _ = vdw_cylinder_many(atom, fiber, a + d)
        self.distances = d
        self.energies = v
        ratio = v / vdw_flat(self.c3, d)
        self._d0, self._g0 = d[0], ratio[0]
        self._spline = interpolate.CubicSpline(np.log(d), ratio)
        self._slope = np.log(v[-1] / v[-2]) / np.log((a + d[-1]) / (a + d[-2]))

    def ratio(self, distance):
        d = np.asarray(distance, dtype=float)
        dc = np.clip(d, self._d0, self.distances[-1])
        g = self._spline(np.log(dc))
        near = 1 + (self._g0 - 1) * d / self._d0
        return np.where(d < self._d0, near, g)

    def __call__(self, r):
        """van der Waals energy in joules at radius ``r`` (array-friendly)."""
        r = np.asarray(r, dtype=float)
        d = r - self.radius
        if np.any(d <= 0):
            raise DomainError("the cylinder potential needs r > a")
        inside = self.ratio(d) * vdw_flat(self.c3, np.maximum(d, 1e-300))
        r_last = self.radius + self.distances[-1]
        far = self.energies[-1] * (r / r_last) ** self._slope
        return np.where(d > self.distances[-1], far, inside)


@functools.lru_cache(maxsize=16)
def vdw_table(atom: AtomModel, fiber: FiberSpec) -> VdwTable:
    return VdwTable(atom, fiber)
