"""Complex field amplitudes of single optical modes.

Amplitudes are dimensionless: intensities are expressed in units of the
input signal intensity, so a unit-magnitude field carries intensity 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class FieldAmplitude:
    """Complex amplitude of one optical mode.

    intensity = re**2 + im**2 and the optical phase is atan2(im, re).
    Components must be finite; intensity is non-negative by construction.
    """

    re: float
    im: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", float(self.re))
        object.__setattr__(self, "im", float(self.im))
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(
                f"field amplitude components must be finite, got ({self.re}, {self.im})"
            )

    @classmethod
    def from_complex(cls, z: complex) -> FieldAmplitude:
        return cls(z.real, z.imag)

    @classmethod
    def from_polar(cls, magnitude: float, phase: float = 0.0) -> FieldAmplitude:
        if not (math.isfinite(magnitude) and magnitude >= 0.0):
            raise DomainError(f"magnitude must be finite and >= 0, got {magnitude}")
        return cls(magnitude * math.cos(phase), magnitude * math.sin(phase))

    @property
    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    @property
    def intensity(self) -> float:
        return self.re * self.re + self.im * self.im

    @property
    def magnitude(self) -> float:
        return abs(self.as_complex)

    @property
    def phase(self) -> float:
        return cmath.phase(self.as_complex)
