"""Quantized radial motion in the cylindrically symmetric trap.

For L_z = hbar m the reduced radial wavefunction u = sqrt(r) R obeys a 1D
Schroedinger equation with U_eff = U_tot + hbar^2 (m^2 - 1/4) / (2 M r^2).
Levels are found by second-order finite differences on a uniform grid with
Dirichlet walls; tunnelling through the inner barrier to the surface is
ignored.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np
from scipy import constants as csts
from scipy import linalg, optimize

from .analysis import find_minimum, harmonic_frequencies
from .errors import InvalidInputError, NoTrapError
from .potential import CIRCULAR, TrapConfiguration, radial_grid, total_energy


def centrifugal(m: int, mass: float, r):
    return csts.hbar**2 * (m**2 - 0.25) / (2 * mass * np.asarray(r, dtype=float) ** 2)


def effective_potential(cfg: TrapConfiguration, m: int, r):
    """U_tot plus the quantum centrifugal term, joules."""
    return total_energy(cfg, r) + centrifugal(m, cfg.atom.mass, r)


@dataclass(frozen=True)
class BoundStateSet:
    m: int
    r: np.ndarray  # grid, m
    energies: np.ndarray  # J
    wavefunctions: np.ndarray  # (N, len(r)), units 1/sqrt(m)
    delta_r: float  # rms width of the ground state, m
    n_requested: int
    n_bound: int
    potential: np.ndarray  # U_eff on the grid, J

    @property
    def complete(self) -> bool:
        return self.n_bound >= self.n_requested

    @property
    def spacing(self):
        return np.diff(self.energies)

    def to_dict(self) -> dict:
        e_mk = self.energies / csts.k * 1e3
        d = {
            "m": self.m,
            "n_requested": self.n_requested,
            "n_bound": self.n_bound,
            "complete": self.complete,
            "energies_J": self.energies.tolist(),
            "energies_mK": e_mk.tolist(),
            "delta_r": self.delta_r,
            "delta_r_nm": self.delta_r * 1e9,
            "r_min": float(self.r[0]),
            "r_max": float(self.r[-1]),
            "grid_points": int(self.r.size),
        }
        if len(self.energies) > 1:
            d["spacings_uK"] = (np.diff(self.energies) / csts.k * 1e6).tolist()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def wavefunctions_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r_m_"] + [f"psi_{n}" for n in range(len(self.energies))])
        for i, r in enumerate(self.r):
            w.writerow([f"{r:.9g}"] + [f"{v:.9g}" for v in self.wavefunctions[:, i]])
        return buf.getvalue()


def _domain(cfg, m, n_levels):
    if cfg.scheme != CIRCULAR:
        raise InvalidInputError("radial bound states need the cylindrically symmetric scheme")
    mn = find_minimum(cfg)
    mass = cfg.atom.mass
    u = lambda r: float(effective_potential(cfg, m, r))  # noqa: E731
    # minimum of U_eff itself (shifted from r_m by the centrifugal term)
    lo = optimize.minimize_scalar(u, bounds=(mn.r * 0.9, mn.r * 1.1), method="bounded",
                                  options={"xatol": 1e-14})
    r_min, u_min = lo.x, lo.fun
    if u_min >= 0:
        raise NoTrapError(f"effective potential has no negative well for m = {m}")
    depth = -u_min

    grid = radial_grid(cfg, 4000)
    inner = grid[grid < r_min]
    ui = effective_potential(cfg, m, inner)
    peaks = np.flatnonzero((ui[1:-1] >= ui[:-2]) & (ui[1:-1] > ui[2:])) + 1
    if peaks.size:
        i_top = peaks[-1]
    else:
        i_top = int(np.argmax(ui))
    r_top, u_top = inner[i_top], ui[i_top]
    wall = u_min + 50 * depth
    if u_top > wall:
        r_in = optimize.brentq(lambda r: u(r) - wall, r_top, r_min, xtol=1e-15)
    else:
        r_in = r_top

    w_r, _ = harmonic_frequencies(cfg, r_min)
    e_guess = u_min + (n_levels + 1) * csts.hbar * w_r
    e_guess = min(e_guess, u_min + 0.5 * depth)
    left = optimize.brentq(lambda r: u(r) - e_guess, r_in, r_min, xtol=1e-15)
    hi = r_min * 1.01
    while u(hi) < e_guess:
        hi = r_min + 2 * (hi - r_min)
    right = optimize.brentq(lambda r: u(r) - e_guess, r_min, hi, xtol=1e-15)
    r_out = r_min + 8 * (right - left)
    return r_in, r_out


def solve_bound_states(cfg: TrapConfiguration, m: int = 0, n_levels: int = 6,
                       points: int = 4000, domain=None) -> BoundStateSet:
    """Lowest ``n_levels`` radial eigenpairs for rotational quantum number ``m``."""
    if n_levels < 1:
        raise InvalidInputError("need at least one level")
    if points < 10:
        raise InvalidInputError("grid too small")
    r_in, r_out = domain if domain is not None else _domain(cfg, m, n_levels)
    # interior nodes only; psi vanishes at r_in and r_out
    r = np.linspace(r_in, r_out, points + 2)[1:-1]
    pot = effective_potential(cfg, m, r)
    energies, psi, n_bound = solve_radial(r, pot, cfg.atom.mass, n_levels)
    return BoundStateSet(m=m, r=r, energies=energies, wavefunctions=psi,
                         delta_r=rms_width(r, psi[0]), n_requested=n_levels,
                         n_bound=n_bound, potential=pot)


def solve_radial(r, potential, mass, n_levels):
    """Lowest eigenpairs of -hbar^2/2M d2/dr2 + potential on a uniform grid.

    ``r`` holds interior nodes; the wavefunction vanishes one step beyond
    each end.  Returns (energies, psi normalized to sum psi^2 dr = 1,
    number of levels below both boundary values of the potential).
    """
    dr = r[1] - r[0]
    kin = csts.hbar**2 / (2 * mass * dr**2)
    diag = potential + 2 * kin
    off = np.full(r.size - 1, -kin)
    n = min(n_levels, r.size)
    energies, vecs = linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, n - 1))
    psi = vecs.T / np.sqrt(dr)
    for row in psi:
        big = np.flatnonzero(np.abs(row) > 1e-3 * np.abs(row).max())
        if row[big[0]] < 0:
            row *= -1
    edge = min(potential[0], potential[-1])
    return energies, psi, int(np.sum(energies < edge))


def rms_width(r, psi) -> float:
    dr = r[1] - r[0]
    p = psi**2 * dr
    mean = np.sum(p * r)
    return float(np.sqrt(max(np.sum(p * r**2) - mean**2, 0.0)))


def count_nodes(psi, rel_floor: float = 1e-6) -> int:
    """Sign changes of ``psi`` ignoring samples below ``rel_floor`` of its peak."""
    psi = np.asarray(psi)
    keep = psi[np.abs(psi) > rel_floor * np.abs(psi).max()]
    return int(np.sum(np.sign(keep[1:]) != np.sign(keep[:-1])))


def harmonic_check(states: BoundStateSet, omega_r: float):
    """Level spacings in units of hbar omega_r; all ones for a harmonic well."""
    if len(states.energies) < 2:
        raise InvalidInputError("need at least two levels")
    return np.diff(states.energies) / (csts.hbar * omega_r)
