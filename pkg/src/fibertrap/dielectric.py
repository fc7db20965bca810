"""Three-term Sellmeier model of fused silica on the real and imaginary axes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants as csts

from .errors import DomainError, InvalidInputError


@dataclass(frozen=True)
class DielectricModel:
    """Sellmeier dielectric: eps/eps0 = 1 + sum B_i lam^2 / (lam^2 - C_i^2).

    ``resonances`` are the C_i in metres.
    """

    strengths: tuple[float, ...] = (0.6961663, 0.4079426, 0.8974794)
    resonances: tuple[float, ...] = (0.0684043e-6, 0.1162414e-6, 9.896161e-6)
    valid_range: tuple[float, float] = (0.2e-6, 10e-6)

    def epsilon(self, wavelength):
        """Relative permittivity at real vacuum wavelength(s) in metres."""
        lam = np.asarray(wavelength, dtype=float)
        if np.any(lam <= 0):
            raise InvalidInputError("wavelength must be positive")
        lam2 = lam[..., None] ** 2
        c2 = np.asarray(self.resonances) ** 2
        den = lam2 - c2
        if np.any(np.abs(den) < 1e-12 * c2):
            raise DomainError("wavelength sits on a Sellmeier pole")
        return 1 + np.sum(np.asarray(self.strengths) * lam2 / den, axis=-1)

    def index(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        lo, hi = self.valid_range
        if np.any((lam < lo) | (lam > hi)):
            raise DomainError(f"wavelength outside Sellmeier validity range {lo:g}-{hi:g} m")
        return np.sqrt(self.epsilon(lam))

    def epsilon_imag_axis(self, xi):
        """Relative permittivity at imaginary angular frequency ``i*xi``.

        Substituting omega^2 -> -xi^2 turns each term into
        B_i w_i^2 / (w_i^2 + xi^2) with w_i = 2 pi c / C_i.
        """
        xi = np.asarray(xi, dtype=float)
        if np.any(xi < 0):
            raise InvalidInputError("imaginary frequency must be non-negative")
        w2 = (2 * np.pi * csts.c / np.asarray(self.resonances)) ** 2
        return 1 + np.sum(np.asarray(self.strengths) * w2 / (w2 + xi[..., None] ** 2), axis=-1)

    @property
    def static_epsilon(self) -> float:
        return 1 + float(np.sum(self.strengths))


SILICA = DielectricModel()


@dataclass(frozen=True)
class ConstantDielectric:
    """Dispersionless medium; ``value = 1`` is vacuum."""

    value: float = 1.0

    def epsilon(self, wavelength):
        return np.full(np.shape(wavelength), self.value, dtype=float)

    def index(self, wavelength):
        return np.sqrt(self.epsilon(wavelength))

    def epsilon_imag_axis(self, xi):
        return np.full(np.shape(xi), self.value, dtype=float)
