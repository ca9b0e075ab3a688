"""Campaign runners that produce the figure-shaped datasets.

Each runner walks an ordered grid (input phase, pump power or detuning),
evaluates the amplifier plus detection chain at every point, and collects
named columns into a SweepResult whose metadata suffices to reproduce it
bit for bit.  Grid points are independent work items: every point derives
its own RNG seed from (master seed, point index), so results cannot
depend on evaluation order.

Two pipelines are supported.  ``model_exact`` evaluates the measurement
equations in closed form; ``full_beatnote`` synthesizes cell-on/cell-off
records and pushes them through the FFT analyzer.  Noiseless, the two
agree on every reported series, which is the central cross-module check.

The measured gain is the 2*delta peak ratio: for unequal seeds that equals
sqrt(G_s * G_i), so the transfer-curve runner reports the signal gain G_s
separately and restricts the beatnote pipeline to equal seeds, where the
cosine readout of the output phase is exact.  Phase-insensitive gain is
read from the delta-peak ratio rho = |on|/|off| (pump-signal beat, the
only beat present without an idler seed) inverted through the two-mode
constraint cosh^2 - sinh^2 = 1: g_pia = ((rho + 1/rho)/2)**2, which makes
the implied maximum gain rho**2 agree exactly with the seeded measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .analyzer import extract_cos_phase, extract_gain, spectrum_peaks, unwrap_cos_scan
from .beatnote import BeatnoteRecord, DetectionConfig, cell_off_record, synthesize_beatnote
from .calibration import CalibrationMap, default_calibration, effective_r, resolve_amplifier
from .errors import DomainError
from .fields import FieldAmplitude
from .squeezer import AmplifierParams, evolve_two_mode, psa_max_from_pia, wrap_phase

SCAN_KINDS = (
    "phase_scan",
    "power_sweep",
    "pia_compare",
    "detuning_spectrum",
    "transfer_curve",
)
PIPELINES = ("model_exact", "full_beatnote")

# Pump-power range the amplifier cell is characterised over.
POWER_RANGE_MW = (0.0, 80.0)

# Inner search for gain extrema over the pump phase: coarse grid over
# [0, pi) followed by golden-section refinement of the phase to this width.
EXTREMA_COARSE_POINTS = 256
EXTREMA_PHASE_TOL = 1e-10

# A sweep point counts as "pure PSA" while |g_min - 1/g_max| stays within
# this fraction of 1/g_max; the largest such detuning is the bandwidth.
BANDWIDTH_TOLERANCE = 0.05

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScanSpec:
    """Complete, serialisable description of one campaign."""

    kind: str
    grid: tuple[float, ...]
    amplifier: AmplifierParams = field(default_factory=AmplifierParams)
    calibration: CalibrationMap = field(default_factory=default_calibration)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    input_ratio: float = 1.0
    pipeline: str = "model_exact"

    def __post_init__(self) -> None:
        if self.kind not in SCAN_KINDS:
            raise DomainError(f"scan kind must be one of {SCAN_KINDS}, got {self.kind!r}")
        if self.pipeline not in PIPELINES:
            raise DomainError(f"pipeline must be one of {PIPELINES}, got {self.pipeline!r}")
        grid = tuple(float(x) for x in self.grid)
        if not grid:
            raise DomainError("scan grid must be non-empty")
        if any(not math.isfinite(x) for x in grid):
            raise DomainError("scan grid values must be finite")
        steps = np.diff(grid)
        if len(grid) > 1 and not (np.all(steps > 0.0) or np.all(steps < 0.0)):
            raise DomainError("scan grid must be strictly monotone")
        object.__setattr__(self, "grid", grid)
        ratio = float(self.input_ratio)
        if not math.isfinite(ratio) or ratio <= 0.0:
            raise DomainError(f"input_ratio must be finite and > 0, got {self.input_ratio}")
        object.__setattr__(self, "input_ratio", ratio)
        self._validate_kind()

    def _validate_kind(self) -> None:
        lo, hi = min(self.grid), max(self.grid)
        if self.kind == "phase_scan":
            if hi - lo < 2.0 * math.pi - 1e-9:
                raise DomainError(
                    f"phase_scan grid must cover at least 2*pi radians, got span {hi - lo}"
                )
        elif self.kind in ("power_sweep", "pia_compare"):
            if lo < POWER_RANGE_MW[0] or hi > POWER_RANGE_MW[1]:
                raise DomainError(
                    f"power grid must lie within {POWER_RANGE_MW} mW, got [{lo}, {hi}]"
                )
            if self.amplifier.r is not None:
                raise DomainError(
                    f"{self.kind} derives r from the calibration map per grid power; "
                    "leave amplifier.r unset"
                )
        elif self.kind == "detuning_spectrum":
            if lo < 0.0:
                raise DomainError(f"detuning grid must be >= 0 kHz, got minimum {lo}")
            if self.amplifier.r is not None or self.amplifier.pump_power is None:
                raise DomainError(
                    "detuning_spectrum needs a power-driven amplifier "
                    "(set amplifier.pump_power, leave amplifier.r unset)"
                )
        if self.pipeline == "full_beatnote":
            if self.kind == "transfer_curve" and self.input_ratio != 1.0:
                raise DomainError(
                    "full_beatnote transfer curves need equal signal/idler seeds "
                    "(input_ratio = 1); the cosine phase readout assumes the reduced "
                    "beatnote form.  Run mixed seeds through model_exact."
                )
            if self.kind == "pia_compare" and self.detection.residual_pump_intensity <= 0.0:
                raise DomainError(
                    "full_beatnote pia_compare needs residual_pump_intensity > 0 "
                    "(the pump-signal beat is the only observable without an idler seed)"
                )
            if self.kind == "detuning_spectrum":
                if self.amplifier.detuning <= 0.0:
                    raise DomainError(
                        "full_beatnote detuning_spectrum scales the sampling from "
                        "amplifier.detuning, which must be > 0"
                    )
            else:
                self.detection.validate_for_delta(self.amplifier.detuning)

    @property
    def master_seed(self) -> int:
        return self.detection.rng_seed

    def input_fields(self) -> tuple[FieldAmplitude, FieldAmplitude]:
        """Unit signal seed plus idler seed at 1/sqrt(input_ratio)."""
        return FieldAmplitude(1.0), FieldAmplitude(1.0 / math.sqrt(self.input_ratio))


@dataclass
class SweepResult:
    """Tabular sweep output: x, named columns and reproduction metadata."""

    x: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=np.float64)
        self.columns = {k: np.asarray(v, dtype=np.float64) for k, v in self.columns.items()}
        for name, col in self.columns.items():
            if col.shape != self.x.shape:
                raise DomainError(f"column {name!r} length {col.size} != grid length {self.x.size}")


def point_seed(master_seed: int, index: int) -> int:
    """Per-grid-point seed derived from the master seed and point index."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _golden_section(fun, a: float, b: float, tol: float) -> float:
    """Argmin of a unimodal function on [a, b] by golden-section search."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fun(x2)
    return 0.5 * (a + b)


def _attenuated(amp: FieldAmplitude, loss: float) -> FieldAmplitude:
    scale = math.sqrt(loss)
    return FieldAmplitude(amp.re * scale, amp.im * scale)


class _ModelPipeline:
    """Closed-form evaluation of the noiseless measurement chain."""

    def __init__(self, spec: ScanSpec):
        self.spec = spec
        self.a_s, self.a_i = spec.input_fields()

    def _outputs(self, r: float, loss: float, pump_phase: float) -> tuple[complex, complex]:
        params = AmplifierParams(r=r, pump_phase=pump_phase, detuning=self.spec.amplifier.detuning)
        s_out, i_out = evolve_two_mode(self.a_s, self.a_i, params)
        scale = math.sqrt(loss)
        return s_out.as_complex * scale, i_out.as_complex * scale

    def measured_gain(
        self, r: float, loss: float, pump_phase: float, index: int = 0, delta: float | None = None
    ) -> float:
        """2*delta peak ratio, equal to loss * sqrt(G_s * G_i)."""
        s_out, i_out = self._outputs(r, loss, pump_phase)
        return abs(s_out) * abs(i_out) / (self.a_s.magnitude * self.a_i.magnitude)

    def gain_extrema(
        self, r: float, loss: float, index: int = 0, delta: float | None = None
    ) -> tuple[float, float]:
        if self.spec.input_ratio == 1.0:
            return loss * math.exp(2.0 * r), loss * math.exp(-2.0 * r)
        c, s = math.cosh(r), math.sinh(r)
        kappa = self.a_i.magnitude / self.a_s.magnitude
        top = (c + s * kappa) * (c + s / kappa)
        bottom = abs(c - s * kappa) * abs(c - s / kappa)
        return loss * top, loss * bottom

    def transfer_point(
        self, r: float, loss: float, pump_phase: float, index: int = 0
    ) -> tuple[float, float, float]:
        s_out, i_out = self._outputs(r, loss, pump_phase)
        phi_out = float(wrap_phase(np.angle(s_out) - pump_phase))
        gain = abs(s_out) ** 2 / self.a_s.intensity
        gain_idler = abs(i_out) ** 2 / self.a_i.intensity
        return gain, gain_idler, math.cos(phi_out)

    def pia_rho(self, r: float, loss: float, index: int = 0, delta: float | None = None) -> float:
        """delta-peak on/off amplitude ratio with an unseeded idler."""
        return math.sqrt(loss) * (math.cosh(r) + math.sinh(r))


class _BeatnotePipeline:
    """Record synthesis plus FFT extraction, seeded per grid point."""

    def __init__(self, spec: ScanSpec):
        self.spec = spec
        self.a_s, self.a_i = spec.input_fields()

    def _config(self, index: int, delta: float) -> DetectionConfig:
        cfg = self.spec.detection
        seed = point_seed(self.spec.master_seed, index)
        if delta != self.spec.amplifier.detuning:
            # Detuning sweeps keep samples-per-period constant by scaling
            # the sample rate with the beat frequency.
            scale = cfg.sample_rate / self.spec.amplifier.detuning
            return replace(cfg, sample_rate=scale * delta, rng_seed=seed)
        return replace(cfg, rng_seed=seed)

    def _records(
        self, r: float, loss: float, pump_phase: float, index: int, delta: float | None
    ) -> tuple[BeatnoteRecord, BeatnoteRecord]:
        delta = self.spec.amplifier.detuning if delta is None else delta
        cfg = self._config(index, delta)
        params = AmplifierParams(r=r, pump_phase=pump_phase, detuning=delta)
        s_out, i_out = evolve_two_mode(self.a_s, self.a_i, params)
        on = synthesize_beatnote(
            _attenuated(s_out, loss), _attenuated(i_out, loss), pump_phase, delta, cfg
        )
        off = cell_off_record(self.a_s, self.a_i, pump_phase, delta, cfg)
        return on, off

    def measured_gain(
        self, r: float, loss: float, pump_phase: float, index: int = 0, delta: float | None = None
    ) -> float:
        on, off = self._records(r, loss, pump_phase, index, delta)
        return extract_gain(on, off)

    def gain_extrema(
        self, r: float, loss: float, index: int = 0, delta: float | None = None
    ) -> tuple[float, float]:
        """Locate the extremal measured gains by scanning the pump phase.

        The gain is pi-periodic in the pump phase, so a coarse scan of
        [0, pi) plus golden-section refinement around the best coarse
        points pins both extrema.
        """
        phases = np.linspace(0.0, math.pi, EXTREMA_COARSE_POINTS, endpoint=False)
        gains = [self.measured_gain(r, loss, p, index, delta) for p in phases]
        step = math.pi / EXTREMA_COARSE_POINTS

        def refine(best: int, sign: float) -> float:
            center = phases[best]
            fun = lambda p: sign * self.measured_gain(r, loss, p, index, delta)
            phi = _golden_section(fun, center - step, center + step, EXTREMA_PHASE_TOL)
            return self.measured_gain(r, loss, phi, index, delta)

        g_max = refine(int(np.argmax(gains)), -1.0)
        g_min = refine(int(np.argmin(gains)), +1.0)
        return g_max, g_min

    def transfer_point(
        self, r: float, loss: float, pump_phase: float, index: int = 0
    ) -> tuple[float, float, float]:
        on, off = self._records(r, loss, pump_phase, index, None)
        gain = extract_gain(on, off)
        cfg = on.config_echo
        clamp_tol = 1e-6
        if cfg.noise_sigma > 0.0:
            # 3-sigma propagated bin-amplitude noise on the cosine readout.
            scale = 4.0 * math.sqrt(cfg.residual_pump_intensity * gain * self.a_s.intensity)
            clamp_tol = max(
                clamp_tol, 3.0 * cfg.noise_sigma * math.sqrt(2.0 / cfg.n_samples) / scale
            )
        cos_out = extract_cos_phase(
            on, cfg.residual_pump_intensity, gain, self.a_s.intensity, clamp_tol=clamp_tol
        )
        return gain, gain, cos_out

    def pia_rho(self, r: float, loss: float, index: int = 0, delta: float | None = None) -> float:
        delta = self.spec.amplifier.detuning if delta is None else delta
        cfg = self._config(index, delta)
        params = AmplifierParams(r=r, pump_phase=0.0, detuning=delta)
        idler_vacuum = FieldAmplitude(0.0)
        s_out, i_out = evolve_two_mode(self.a_s, idler_vacuum, params)
        on = synthesize_beatnote(
            _attenuated(s_out, loss), _attenuated(i_out, loss), 0.0, delta, cfg
        )
        off = cell_off_record(self.a_s, idler_vacuum, 0.0, delta, cfg)
        reference = abs(spectrum_peaks(off).at_delta)
        if reference <= 0.0:
            raise DomainError("no pump-signal reference beat in the cell-off record")
        return abs(spectrum_peaks(on).at_delta) / reference


def _pipeline(spec: ScanSpec):
    return _ModelPipeline(spec) if spec.pipeline == "model_exact" else _BeatnotePipeline(spec)


def _base_metadata(spec: ScanSpec, x_name: str) -> dict:
    from .serialize import scan_spec_to_dict

    return {
        "kind": spec.kind,
        "x_name": x_name,
        "scan_spec": scan_spec_to_dict(spec),
        "master_seed": spec.master_seed,
        "version": __version__,
    }


def _pia_gain_from_rho(rho: float) -> float:
    """Invert the delta-peak ratio through cosh^2 - sinh^2 = 1."""
    c = 0.5 * (rho + 1.0 / rho)
    return c * c


def run_phase_scan(spec: ScanSpec) -> SweepResult:
    """Gain versus the scanned pump-signal input phase (piezo emulation)."""
    if spec.kind != "phase_scan":
        raise DomainError(f"run_phase_scan needs kind='phase_scan', got {spec.kind!r}")
    r, loss = resolve_amplifier(spec.amplifier, spec.calibration)
    pipe = _pipeline(spec)
    gains = [pipe.measured_gain(r, loss, phi_in, idx) for idx, phi_in in enumerate(spec.grid)]
    return SweepResult(
        np.asarray(spec.grid), {"gain": np.asarray(gains)}, _base_metadata(spec, "phi_in")
    )


def run_power_sweep(spec: ScanSpec) -> SweepResult:
    """Extremal gains versus pump power through the calibration map."""
    if spec.kind != "power_sweep":
        raise DomainError(f"run_power_sweep needs kind='power_sweep', got {spec.kind!r}")
    pipe = _pipeline(spec)
    g_max, g_min = [], []
    for idx, power in enumerate(spec.grid):
        r, loss = effective_r(power, spec.amplifier.detuning, spec.calibration)
        top, bottom = pipe.gain_extrema(r, loss, idx)
        g_max.append(top)
        g_min.append(bottom)
    g_max = np.asarray(g_max)
    g_min = np.asarray(g_min)
    columns = {"g_max": g_max, "g_min": g_min, "inv_g_max": 1.0 / g_max}
    return SweepResult(np.asarray(spec.grid), columns, _base_metadata(spec, "power_mw"))


def run_pia_compare(spec: ScanSpec) -> SweepResult:
    """Seeded-idler maximum gain versus unseeded (phase-insensitive) gain."""
    if spec.kind != "pia_compare":
        raise DomainError(f"run_pia_compare needs kind='pia_compare', got {spec.kind!r}")
    pipe = _pipeline(spec)
    g_max, g_pia, g_from_pia = [], [], []
    for idx, power in enumerate(spec.grid):
        r, loss = effective_r(power, spec.amplifier.detuning, spec.calibration)
        top, _ = pipe.gain_extrema(r, loss, idx)
        pia = _pia_gain_from_rho(pipe.pia_rho(r, loss, idx))
        g_max.append(top)
        g_pia.append(pia)
        g_from_pia.append(psa_max_from_pia(pia))
    columns = {
        "g_max": np.asarray(g_max),
        "g_pia": np.asarray(g_pia),
        "g_max_from_pia": np.asarray(g_from_pia),
    }
    return SweepResult(np.asarray(spec.grid), columns, _base_metadata(spec, "power_mw"))


def run_detuning_spectrum(spec: ScanSpec) -> SweepResult:
    """Extremal gains versus pump-signal detuning, plus the bandwidth.

    The bandwidth is the largest grid detuning for which g_min stays within
    BANDWIDTH_TOLERANCE of its pure-squeezer value 1/g_max; it is stored in
    the metadata.  The detuning response is a calibrated, phenomenological
    reproduction and the metadata flags it as such.
    """
    if spec.kind != "detuning_spectrum":
        raise DomainError(
            f"run_detuning_spectrum needs kind='detuning_spectrum', got {spec.kind!r}"
        )
    pipe = _pipeline(spec)
    power = spec.amplifier.pump_power
    g_max, g_min = [], []
    for idx, delta in enumerate(spec.grid):
        r, loss = effective_r(power, delta, spec.calibration)
        top, bottom = pipe.gain_extrema(r, loss, idx, delta)
        g_max.append(top)
        g_min.append(bottom)
    g_max = np.asarray(g_max)
    g_min = np.asarray(g_min)
    ideal = 1.0 / g_max
    pure = np.abs(g_min - ideal) <= BANDWIDTH_TOLERANCE * ideal
    deltas = np.asarray(spec.grid)
    metadata = _base_metadata(spec, "delta_khz")
    metadata["bandwidth_khz"] = float(deltas[pure].max()) if pure.any() else None
    metadata["bandwidth_tolerance"] = BANDWIDTH_TOLERANCE
    metadata["detuning_model"] = "phenomenological (Lorentzian window + Gaussian loss)"
    columns = {"g_max": g_max, "g_min": g_min, "inv_g_max": ideal}
    return SweepResult(deltas, columns, metadata)


def run_transfer_curve(spec: ScanSpec) -> SweepResult:
    """Phase-to-phase transfer: signal gain and output phase per input phase.

    The output phase is reconstructed from the cosine readout with branch
    continuity along the scan (anchored on the principal branch at the
    first point) and reported both unwrapped and wrapped to [-pi, pi).
    """
    if spec.kind != "transfer_curve":
        raise DomainError(f"run_transfer_curve needs kind='transfer_curve', got {spec.kind!r}")
    r, loss = resolve_amplifier(spec.amplifier, spec.calibration)
    pipe = _pipeline(spec)
    gains, gains_idler, cosines = [], [], []
    for idx, phi_in in enumerate(spec.grid):
        gain, gain_idler, cos_out = pipe.transfer_point(r, loss, phi_in, idx)
        gains.append(gain)
        gains_idler.append(gain_idler)
        cosines.append(cos_out)
    cosines = np.asarray(cosines)
    unwrapped = unwrap_cos_scan(cosines)
    columns = {
        "gain": np.asarray(gains),
        "gain_idler": np.asarray(gains_idler),
        "cos_phi_out": cosines,
        "phi_out_wrapped": wrap_phase(unwrapped),
        "phi_out_unwrapped": unwrapped,
    }
    return SweepResult(np.asarray(spec.grid), columns, _base_metadata(spec, "phi_in"))


_RUNNERS = {
    "phase_scan": run_phase_scan,
    "power_sweep": run_power_sweep,
    "pia_compare": run_pia_compare,
    "detuning_spectrum": run_detuning_spectrum,
    "transfer_curve": run_transfer_curve,
}


def run_scan(spec: ScanSpec) -> SweepResult:
    """Dispatch a ScanSpec to its runner."""
    return _RUNNERS[spec.kind](spec)
