"""Ground-state atomic response built from a handful of spectral lines.

Real and imaginary dynamic polarizability (damped Lorentz oscillators written
in terms of emission probabilities and statistical weights), the undamped
polarizability continued to imaginary frequency, and photon recoil energy.
All quantities are SI; polarizabilities are in C m^2 / V.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import constants as csts

from .errors import InvalidInputError

_PREFACTOR = 2 * np.pi * csts.epsilon_0 * csts.c**3


@dataclass(frozen=True)
class SpectralLine:
    wavelength: float  # m
    gamma: float  # emission transition probability, 1/s
    g_upper: int

    def __post_init__(self):
        if not self.wavelength > 0:
            raise InvalidInputError(f"line wavelength must be positive, got {self.wavelength}")
        if not self.gamma > 0:
            raise InvalidInputError(f"line decay rate must be positive, got {self.gamma}")
        if self.g_upper < 1:
            raise InvalidInputError(f"statistical weight must be >= 1, got {self.g_upper}")

    @property
    def omega(self) -> float:
        """Angular transition frequency in rad/s."""
        return 2 * np.pi * csts.c / self.wavelength


@dataclass(frozen=True)
class AtomModel:
    """A ground-state atom: mass, ground-level weight and its dipole lines."""

    name: str
    mass: float  # kg
    g_ground: int
    lines: tuple[SpectralLine, ...]

    def __post_init__(self):
        if not self.mass > 0:
            raise InvalidInputError("atomic mass must be positive")
        if self.g_ground < 1:
            raise InvalidInputError("ground-state statistical weight must be >= 1")
        if len(self.lines) == 0:
            raise InvalidInputError("an atom needs at least one spectral line")
        object.__setattr__(self, "lines", tuple(self.lines))

    def _arrays(self):
        w = np.array([ln.omega for ln in self.lines])
        gam = np.array([ln.gamma for ln in self.lines])
        weight = np.array([ln.g_upper for ln in self.lines]) / self.g_ground
        return w, gam, weight

    def polarizability(self, omega):
        return polarizability_real(self, omega)


def polarizability_real(atom: AtomModel, omega):
    """Real part of the dynamic polarizability at angular frequency ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise InvalidInputError("frequency must be non-negative")
    wj, gam, weight = atom._arrays()
    w2 = omega[..., None] ** 2
    num = gam * (1 - w2 / wj**2)
    den = (wj**2 - w2) ** 2 + gam**2 * w2
    return _PREFACTOR * np.sum(weight * num / den, axis=-1)


def polarizability_imag(atom: AtomModel, omega):
    """Imaginary part of the polarizability; sets the photon scattering rate."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise InvalidInputError("frequency must be non-negative")
    wj, gam, weight = atom._arrays()
    w = omega[..., None]
    num = gam**2 * w / wj**2
    den = (wj**2 - w**2) ** 2 + gam**2 * w**2
    return _PREFACTOR * np.sum(weight * num / den, axis=-1)


def polarizability_imag_axis(atom: AtomModel, xi):
    """Undamped polarizability continued to imaginary frequency ``i*xi``.

    Real, positive and decreasing in ``xi``; ``xi = 0`` gives the static value.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise InvalidInputError("imaginary frequency must be non-negative")
    wj, gam, weight = atom._arrays()
    terms = weight * gam / (wj**2 * (wj**2 + xi[..., None] ** 2))
    return _PREFACTOR * np.sum(terms, axis=-1)


def recoil_energy(wavelength, mass):
    """Single-photon recoil energy (hbar k)^2 / 2M in joules."""
    wavelength = np.asarray(wavelength, dtype=float)
    if np.any(wavelength <= 0) or not mass > 0:
        raise InvalidInputError("wavelength and mass must be positive")
    k = 2 * np.pi / wavelength
    return (csts.hbar * k) ** 2 / (2 * mass)


def angular_frequency(wavelength):
    return 2 * np.pi * csts.c / np.asarray(wavelength, dtype=float)


def detuning_hz(wavelength, reference_wavelength):
    """Optical detuning (nu - nu_ref) in Hz; negative means red of the reference."""
    return csts.c / wavelength - csts.c / reference_wavelength


def parse_atom_file(text: str, default_name: str = "atom") -> AtomModel:
    """Parse the plain-text atom format.

    Header lines are ``key = value`` (``mass_kg``, ``g_ground``, optional
    ``name``); every other non-comment line is one transition
    ``wavelength_nm, gamma_per_s, g_upper``.
    """
    header = {}
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = (s.strip() for s in line.split("=", 1))
            header[key] = value
            continue
        fields = [s.strip() for s in line.split(",")]
        if len(fields) != 3:
            raise InvalidInputError(f"line {lineno}: expected 'wavelength_nm, gamma_per_s, g_upper'")
        try:
            lam_nm, gamma, g = float(fields[0]), float(fields[1]), int(fields[2])
        except ValueError as exc:
            raise InvalidInputError(f"line {lineno}: {exc}") from None
        lines.append(SpectralLine(lam_nm * 1e-9, gamma, g))
    for key in ("mass_kg", "g_ground"):
        if key not in header:
            raise InvalidInputError(f"atom file is missing header field '{key}'")
    return AtomModel(
        name=header.get("name", default_name),
        mass=float(header["mass_kg"]),
        g_ground=int(header["g_ground"]),
        lines=tuple(lines),
    )


def load_atom(name_or_path: str = "cesium") -> AtomModel:
    """Load a bundled species by name, or any atom file by path."""
    if os.path.exists(name_or_path):
        with open(name_or_path, encoding="utf-8") as fh:
            stem = os.path.splitext(os.path.basename(name_or_path))[0]
            return parse_atom_file(fh.read(), default_name=stem)
    res = resources.files("fibertrap") / "data" / f"{name_or_path.lower()}.dat"
    if not res.is_file():
        raise InvalidInputError(f"unknown atom '{name_or_path}'")
    return parse_atom_file(res.read_text(encoding="utf-8"), default_name=name_or_path)


def cesium() -> AtomModel:
    return load_atom("cesium")
