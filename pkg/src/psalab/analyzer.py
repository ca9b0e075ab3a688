"""Gain and phase recovery from beatnote records.

Mirrors the experimental data processing chain: Fourier-transform the trace,
read the coherent amplitudes of the peaks at delta and 2*delta, take the
cell-on / cell-off ratio of the 2*delta peaks for the gain, and read
cos(dphi_out) from the signed delta-peak amplitude normalised by
4*sqrt(I_p * G * I_s).

Because records span an integer number of periods with the time origin at
t = 0, an on-bin tone A*cos(w t + theta) appears with complex amplitude
A*exp(j*theta) exactly; no window corrections are involved.  The phase
readout is therefore taken from the signed real part of the delta bin
rather than from arg(), which would jitter by pi at near-zero amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .beatnote import BeatnoteRecord
from .squeezer import wrap_phase

# |cos| may exceed unity by this much before extraction errors out
# (floating-point rounding in the noiseless chain stays far below it).
DEFAULT_CLAMP_TOL = 1e-6
# Off-record 2*delta amplitudes below this fraction of the DC level are
# treated as "no reference beat present".
DEFAULT_REFERENCE_FLOOR = 1e-12


@dataclass(frozen=True)
class SpectrumPeaks:
    """Coherent single-sided amplitudes at DC, delta and 2*delta."""

    dc: float
    at_delta: complex
    at_two_delta: complex
    bin_resolution: float


@dataclass(frozen=True)
class TransferPoint:
    """One point of a phase-to-phase transfer scan."""

    phi_in: float
    gain: float
    phi_out: float
    cos_phi_out: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.gain) or self.gain <= 0.0:
            raise DomainError(f"transfer-point gain must be finite and > 0, got {self.gain}")


def _bin_index(frequency: float, bin_resolution: float, n: int) -> int:
    k = frequency / bin_resolution
    if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
        raise DomainError(
            f"frequency {frequency} is off the FFT bin grid (resolution {bin_resolution})"
        )
    k = int(round(k))
    if not 0 < k < n // 2:
        raise DomainError(f"frequency {frequency} maps to unusable bin {k} of {n}")
    return k


def spectrum_peaks(rec: BeatnoteRecord) -> SpectrumPeaks:
    """Read DC and the delta / 2*delta coherent amplitudes of a record.

    For an on-bin tone A*cos(w t + theta) the returned complex amplitude is
    A*exp(j*theta); DC returns the mean of the trace.
    """
    n = rec.n_samples
    resolution = rec.sample_rate / n
    k1 = _bin_index(rec.delta, resolution, n)
    k2 = _bin_index(2.0 * rec.delta, resolution, n)
    spectrum = np.fft.rfft(rec.samples)
    dc = float(spectrum[0].real) / n
    return SpectrumPeaks(
        dc=dc,
        at_delta=complex(2.0 * spectrum[k1] / n),
        at_two_delta=complex(2.0 * spectrum[k2] / n),
        bin_resolution=resolution,
    )


def extract_gain(
    on: BeatnoteRecord,
    off: BeatnoteRecord,
    *,
    reference_floor: float = DEFAULT_REFERENCE_FLOOR,
) -> float:
    """Gain as the cell-on / cell-off ratio of the 2*delta peak amplitudes."""
    if (on.delta, on.sample_rate, on.n_samples) != (off.delta, off.sample_rate, off.n_samples):
        raise DomainError(
            "on/off records must share delta, sample_rate and n_samples: "
            f"got ({on.delta}, {on.sample_rate}, {on.n_samples}) vs "
            f"({off.delta}, {off.sample_rate}, {off.n_samples})"
        )
    peaks_on = spectrum_peaks(on)
    peaks_off = spectrum_peaks(off)
    reference = abs(peaks_off.at_two_delta)
    if reference <= reference_floor * abs(peaks_off.dc):
        raise DomainError(
            f"no reference beat: off-record 2*delta amplitude {reference} is below "
            f"{reference_floor} of its DC level {peaks_off.dc}"
        )
    return abs(peaks_on.at_two_delta) / reference


def extract_cos_phase(
    rec: BeatnoteRecord,
    i_p: float,
    gain: float,
    i_s_in: float,
    *,
    clamp_tol: float = DEFAULT_CLAMP_TOL,
) -> float:
    """cos(dphi_out) from the signed delta-peak amplitude.

    Valid in the equal-input regime where the delta tone reads
    4*sqrt(i_p*gain*i_s_in)*cos(w t)*cos(dphi_out).  Values inside
    [-1-clamp_tol, 1+clamp_tol] are clamped to [-1, 1]; anything further
    out indicates inconsistent inputs and raises.
    """
    if not math.isfinite(i_p) or i_p <= 0.0:
        raise DomainError(f"no local oscillator: residual pump intensity must be > 0, got {i_p}")
    if not math.isfinite(gain) or gain <= 0.0:
        raise DomainError(f"gain must be finite and > 0, got {gain}")
    if not math.isfinite(i_s_in) or i_s_in <= 0.0:
        raise DomainError(f"input signal intensity must be > 0, got {i_s_in}")
    signed = spectrum_peaks(rec).at_delta.real
    value = signed / (4.0 * math.sqrt(i_p * gain * i_s_in))
    if abs(value) > 1.0 + clamp_tol:
        raise DomainError(
            f"extracted cos amplitude {value} exceeds the unit circle by more than {clamp_tol}"
        )
    return float(np.clip(value, -1.0, 1.0))


def reconstruct_phase(
    cos_phi: float,
    branch: str = "principal",
    previous: float | None = None,
) -> float:
    """Invert a cosine readout into a phase.

    ``principal`` returns acos(cos_phi) in [0, pi].  ``continuity`` picks
    the branch +-acos(cos_phi) + 2*pi*k closest to ``previous``, which is
    how a scan is unwrapped across transitions.
    """
    if not math.isfinite(cos_phi):
        raise DomainError(f"cos value must be finite, got {cos_phi}")
    if abs(cos_phi) > 1.0 + DEFAULT_CLAMP_TOL:
        raise DomainError(f"cos value {cos_phi} lies outside [-1, 1] beyond tolerance")
    principal = math.acos(min(1.0, max(-1.0, cos_phi)))
    if branch == "principal":
        return principal
    if branch != "continuity":
        raise DomainError(f"branch must be 'principal' or 'continuity', got {branch!r}")
    if previous is None:
        raise DomainError("continuity branch needs the previously reconstructed phase")
    best = None
    for candidate in (principal, -principal):
        k = round((previous - candidate) / (2.0 * math.pi))
        value = candidate + 2.0 * math.pi * k
        if best is None or abs(value - previous) < abs(best - previous):
            best = value
    return float(best)


def unwrap_cos_scan(cos_values: np.ndarray) -> np.ndarray:
    """Reconstruct a continuous phase trajectory from a scan of cosines.

    The first point anchors on the principal branch in [0, pi]; each later
    point picks the branch closest to the linear extrapolation of the two
    previous points.  Trend continuation (rather than bare previous-point
    distance) resolves the inherent cosine ambiguity where the phase
    crosses a multiple of pi: a monotone curve keeps descending instead of
    mirror-bouncing off the plateau.  A cosine readout stays blind to a
    global sign, so scans should start near a plateau for the branch to be
    physical, and the grid must keep consecutive phase steps well under
    pi/2.
    """
    values = np.asarray(cos_values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DomainError("cosine scan must be a non-empty 1-D sequence")
    out = np.empty_like(values)
    out[0] = reconstruct_phase(float(values[0]), "principal")
    for k in range(1, values.size):
        predicted = out[k - 1] if k == 1 else 2.0 * out[k - 1] - out[k - 2]
        out[k] = reconstruct_phase(float(values[k]), "continuity", previous=float(predicted))
    return out


def phase_histogram(
    points: list[TransferPoint] | np.ndarray, n_bins: int
) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of wrapped output phases over [-pi, pi).

    Accepts TransferPoints or raw phases; total count equals the number of
    points.  Returns (bin_edges, counts).
    """
    if int(n_bins) != n_bins or n_bins < 2:
        raise DomainError(f"n_bins must be an integer >= 2, got {n_bins}")
    edges = np.linspace(-math.pi, math.pi, int(n_bins) + 1)
    if isinstance(points, np.ndarray) or (points and isinstance(points[0], (int, float))):
        phases = np.asarray(points, dtype=np.float64)
    else:
        phases = np.array([p.phi_out for p in points], dtype=np.float64)
    if phases.size == 0:
        return edges, np.zeros(int(n_bins), dtype=np.int64)
    counts, _ = np.histogram(wrap_phase(phases), bins=edges)
    return edges, counts.astype(np.int64)
