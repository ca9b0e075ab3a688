"""Synthesis of the detected three-beam beatnote time series.

The photodiode after the cell sees the residual pump plus the signal at
+delta and the idler at -delta relative to the pump frequency:

    E(t) = sqrt(I_p)*exp(j*phi_p) + s_out*exp(+2j*pi*delta*t)
                                  + i_out*exp(-2j*pi*delta*t)

and records I(t) = |E(t)|^2, which expands into DC, delta and 2*delta
tones.  For equal gains and equal signal/idler output phases this reduces
exactly to

    I = 2*G*I_s + 2*G*I_s*cos(2w t) + I_p
        + 4*sqrt(I_p*G*I_s)*cos(w t)*cos(dphi_out),      w = 2*pi*delta.

Records are sampled over an integer number of delta periods so that the
delta and 2*delta tones land on exact FFT bins (rectangular window, no
leakage); the time origin is t = 0, which makes the delta tone a pure
cosine whose signed amplitude carries cos(dphi_out).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .fields import FieldAmplitude

# Nyquist margin: the 2*delta beat must sit at or below sample_rate / 10.
NYQUIST_MARGIN = 10.0
MIN_PERIODS = 4

# Seed streams so cell-on and cell-off records of one acquisition draw
# independent noise from the same configured seed.
_STREAM_CELL_ON = 0
_STREAM_CELL_OFF = 1


@dataclass(frozen=True)
class DetectionConfig:
    """Sampling and noise model of the detection photodiode.

    ``sample_rate`` is in kHz, so sample k sits at t_k = k/sample_rate
    milliseconds.  ``noise_sigma`` is the standard deviation of additive
    Gaussian intensity noise per sample; ``residual_pump_intensity`` is the
    pump leakage used as the heterodyne local oscillator.
    """

    sample_rate: float = 100.0
    n_samples: int = 2000
    noise_sigma: float = 0.0
    rng_seed: int = 0
    residual_pump_intensity: float = 0.25

    def __post_init__(self) -> None:
        sr = float(self.sample_rate)
        if not math.isfinite(sr) or sr <= 0.0:
            raise DomainError(f"sample_rate must be finite and > 0 kHz, got {self.sample_rate}")
        object.__setattr__(self, "sample_rate", sr)
        n = int(self.n_samples)
        if n != self.n_samples or n < 2:
            raise DomainError(f"n_samples must be an integer >= 2, got {self.n_samples}")
        object.__setattr__(self, "n_samples", n)
        sig = float(self.noise_sigma)
        if not math.isfinite(sig) or sig < 0.0:
            raise DomainError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        object.__setattr__(self, "noise_sigma", sig)
        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            raise DomainError(f"rng_seed must be a non-negative integer, got {self.rng_seed}")
        object.__setattr__(self, "rng_seed", int(self.rng_seed))
        ip = float(self.residual_pump_intensity)
        if not math.isfinite(ip) or ip < 0.0:
            raise DomainError(
                f"residual_pump_intensity must be finite and >= 0, got {self.residual_pump_intensity}"
            )
        object.__setattr__(self, "residual_pump_intensity", ip)

    def validate_for_delta(self, delta: float) -> None:
        """Check the sampling invariants against a concrete beat frequency."""
        if not math.isfinite(delta) or delta <= 0.0:
            raise DomainError(f"beatnote synthesis needs detuning > 0 kHz, got {delta}")
        if self.sample_rate < NYQUIST_MARGIN * 2.0 * delta:
            raise DomainError(
                f"sample_rate {self.sample_rate} kHz violates the Nyquist margin: "
                f"need >= {NYQUIST_MARGIN * 2.0 * delta} kHz for delta = {delta} kHz"
            )
        periods = self.n_samples * delta / self.sample_rate
        if abs(periods - round(periods)) > 1e-9 * max(1.0, periods):
            raise DomainError(
                f"record must span an integer number of delta periods: "
                f"n_samples*delta/sample_rate = {periods} is not an integer"
            )
        if round(periods) < MIN_PERIODS:
            raise DomainError(
                f"record must span at least {MIN_PERIODS} delta periods, got {round(periods)}"
            )


@dataclass(frozen=True, eq=False)
class BeatnoteRecord:
    """One simulated oscilloscope trace plus its sampling metadata."""

    samples: np.ndarray
    sample_rate: float
    delta: float
    config_echo: DetectionConfig = field(default_factory=DetectionConfig)

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.float64).copy()
        if arr.ndim != 1:
            raise DomainError(f"record samples must be a 1-D array, got shape {arr.shape}")
        if arr.size != self.config_echo.n_samples:
            raise DomainError(
                f"record length {arr.size} does not match configured n_samples "
                f"{self.config_echo.n_samples}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def n_samples(self) -> int:
        return int(self.samples.size)

    @property
    def times(self) -> np.ndarray:
        """Sample times in milliseconds."""
        return np.arange(self.n_samples) / self.sample_rate


def _rng_for(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def _synthesize(
    s_out: FieldAmplitude,
    i_out: FieldAmplitude,
    pump_phase: float,
    delta: float,
    cfg: DetectionConfig,
    stream: int,
) -> BeatnoteRecord:
    cfg.validate_for_delta(delta)
    t = np.arange(cfg.n_samples) / cfg.sample_rate
    w = 2.0 * math.pi * delta * t
    lo = math.sqrt(cfg.residual_pump_intensity) * np.exp(1j * pump_phase)
    field_total = lo + s_out.as_complex * np.exp(1j * w) + i_out.as_complex * np.exp(-1j * w)
    trace = np.abs(field_total) ** 2
    if cfg.noise_sigma > 0.0:
        trace = trace + _rng_for(cfg.rng_seed, stream).normal(0.0, cfg.noise_sigma, cfg.n_samples)
    return BeatnoteRecord(trace, cfg.sample_rate, delta, cfg)


def synthesize_beatnote(
    s_out: FieldAmplitude,
    i_out: FieldAmplitude,
    pump_phase: float,
    delta: float,
    cfg: DetectionConfig,
) -> BeatnoteRecord:
    """Detected intensity trace for given amplified output amplitudes."""
    if not math.isfinite(pump_phase):
        raise DomainError(f"pump_phase must be finite, got {pump_phase}")
    return _synthesize(s_out, i_out, pump_phase, delta, cfg, _STREAM_CELL_ON)


def cell_off_record(
    s_in: FieldAmplitude,
    i_in: FieldAmplitude,
    pump_phase: float,
    delta: float,
    cfg: DetectionConfig,
) -> BeatnoteRecord:
    """Reference trace with the cell inactive: unamplified pass-through.

    Uses the same noise model as ``synthesize_beatnote`` but a distinct
    seed stream, so on/off pairs of one acquisition have independent noise.
    """
    if not math.isfinite(pump_phase):
        raise DomainError(f"pump_phase must be finite, got {pump_phase}")
    return _synthesize(s_in, i_in, pump_phase, delta, cfg, _STREAM_CELL_OFF)

