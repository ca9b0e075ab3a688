"""Two-mode parametric amplifier: field evolution and closed-form gain laws.

The amplifier couples a signal and an idler mode through a strong pump.
For squeezing parameter r and pump phase phi_p the classical amplitudes
transform as

    s_out = cosh(r) * s_in + exp(2j*phi_p) * sinh(r) * conj(i_in)
    i_out = cosh(r) * i_in + exp(2j*phi_p) * sinh(r) * conj(s_in)

which conserves the signal-idler photon-number difference exactly.  For
equal input magnitudes the signal intensity gain follows the
phase-sensitive law

    G(g, Phi) = 2g - 1 + 2*sqrt(g*(g-1))*cos(Phi),    g = cosh(r)**2,

where Phi = 2*phi_p - phi_s - phi_i is the pump/signal/idler relative
phase.  G is maximal at Phi = 0, minimal at Phi = pi, and for this ideal
device G_min = 1/G_max.  With no idler seed the gain is phase-insensitive
and equals g.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError
from .fields import FieldAmplitude

TWO_PI = 2.0 * math.pi


def wrap_phase(phi):
    """Wrap an angle (scalar or ndarray) into [-pi, pi)."""
    return (phi + math.pi) % TWO_PI - math.pi


def fold_phase(phi):
    """Fold an angle into [0, pi], the presentation used for wrapped
    transfer-curve plots (distance from zero on the circle)."""
    return abs(wrap_phase(phi))


@dataclass(frozen=True)
class AmplifierParams:
    """Operating point of the parametric amplifier.

    Exactly one of ``r`` (dimensionless squeezing parameter, used as-is)
    or ``pump_power`` (milliwatts, mapped to r through a CalibrationMap)
    must be provided before the amplifier can be evaluated.  ``detuning``
    is the pump-signal frequency offset in kHz.  ``pump_phase`` is stored
    wrapped to [-pi, pi).
    """

    r: float | None = None
    pump_phase: float = 0.0
    pump_power: float | None = None
    detuning: float = 2.0

    def __post_init__(self) -> None:
        if self.r is not None:
            r = float(self.r)
            if not math.isfinite(r) or r < 0.0:
                raise DomainError(f"squeezing parameter r must be finite and >= 0, got {self.r}")
            object.__setattr__(self, "r", r)
        if not math.isfinite(self.pump_phase):
            raise DomainError(f"pump_phase must be finite, got {self.pump_phase}")
        object.__setattr__(self, "pump_phase", float(wrap_phase(float(self.pump_phase))))
        if self.pump_power is not None:
            p = float(self.pump_power)
            if not math.isfinite(p) or p < 0.0:
                raise DomainError(f"pump_power must be finite and >= 0 mW, got {self.pump_power}")
            object.__setattr__(self, "pump_power", p)
        d = float(self.detuning)
        if not math.isfinite(d) or d < 0.0:
            raise DomainError(f"detuning must be finite and >= 0 kHz, got {self.detuning}")
        object.__setattr__(self, "detuning", d)


@dataclass(frozen=True)
class GainPair:
    """Extremal gains of a pure phase-sensitive amplifier."""

    g_max: float
    g_min: float

    def __post_init__(self) -> None:
        if not (self.g_max >= 1.0 >= self.g_min > 0.0):
            raise DomainError(
                f"gain pair must satisfy g_max >= 1 >= g_min > 0, got ({self.g_max}, {self.g_min})"
            )


def evolve_two_mode(
    s_in: FieldAmplitude, i_in: FieldAmplitude, params: AmplifierParams
) -> tuple[FieldAmplitude, FieldAmplitude]:
    """Propagate signal and idler amplitudes through the amplifier.

    Requires ``params.r`` to be set.  Conserves |s|^2 - |i|^2.
    """
    if params.r is None:
        raise DomainError("amplifier evolution needs an explicit squeezing parameter r")
    c = math.cosh(params.r)
    s = math.sinh(params.r)
    pump = cmath.exp(2j * params.pump_phase)
    a = s_in.as_complex
    b = i_in.as_complex
    s_out = c * a + pump * s * b.conjugate()
    i_out = c * b + pump * s * a.conjugate()
    return FieldAmplitude.from_complex(s_out), FieldAmplitude.from_complex(i_out)


def psa_gain(g: float, phi: float) -> float:
    """Phase-sensitive signal gain 2g - 1 + 2*sqrt(g*(g-1))*cos(phi).

    Evaluated as (sqrt(g) + sqrt(g-1)*cos(phi))**2 + (g-1)*sin(phi)**2,
    an exact rewrite that stays accurate to a few ulp near the
    deamplification point, where the textbook form loses half the
    mantissa to cancellation.
    """
    if not math.isfinite(g) or g < 1.0:
        raise DomainError(f"phase-insensitive gain g must be >= 1, got {g}")
    if not math.isfinite(phi):
        raise DomainError(f"relative phase must be finite, got {phi}")
    a = math.sqrt(g)
    b = math.sqrt(g - 1.0)
    u = a + b * math.cos(phi)
    v = b * math.sin(phi)
    return u * u + v * v


def gain_extrema(g: float) -> GainPair:
    """Extremal gains at relative phase 0 and pi.

    Evaluated in the cancellation-free form g_max = (sqrt(g)+sqrt(g-1))**2,
    g_min = 1/g_max, so the product g_max*g_min holds to a few ulp even for
    large g (the naive difference 2g-1-2*sqrt(g*(g-1)) loses half the
    mantissa near g ~ 100).
    """
    if not math.isfinite(g) or g < 1.0:
        raise DomainError(f"phase-insensitive gain g must be >= 1, got {g}")
    a = math.sqrt(g) + math.sqrt(g - 1.0)
    b = 1.0 / a
    return GainPair(a * a, b * b)


def pia_gain(r: float) -> float:
    """Phase-insensitive gain cosh(r)**2 (no idler seed)."""
    if not math.isfinite(r) or r < 0.0:
        raise DomainError(f"squeezing parameter r must be finite and >= 0, got {r}")
    c = math.cosh(r)
    return c * c


def psa_max_from_pia(g_pia: float) -> float:
    """Maximum phase-sensitive gain implied by a phase-insensitive gain.

    Returns 2*g - 1 + 2*sqrt(g*(g-1)) = (sqrt(g) + sqrt(g-1))**2.
    """
    if not math.isfinite(g_pia) or g_pia < 1.0:
        raise DomainError(f"phase-insensitive gain must be >= 1, got {g_pia}")
    a = math.sqrt(g_pia) + math.sqrt(g_pia - 1.0)
    return a * a


def output_relative_phase(
    s_in: FieldAmplitude, i_in: FieldAmplitude, params: AmplifierParams
) -> float:
    """Phase of the amplified signal relative to the pump, in [-pi, pi).

    For equal input magnitudes and large r this approaches 0 where
    cos(pump-signal input phase) > 0 and pi where it is negative: the
    square-wave transfer characteristic of a strong squeezer.
    """
    if s_in.intensity == 0.0:
        raise DomainError("zero signal input carries no defined phase")
    s_out, _ = evolve_two_mode(s_in, i_in, params)
    if s_out.intensity == 0.0:
        raise DomainError("amplified signal vanished; output phase undefined")
    return float(wrap_phase(s_out.phase - params.pump_phase))
