"""Waveform measurements: peak crosstalk, 50% delay, 10-90% rise time.

Two trace kinds are measured. A "signal" trace (a driven line's output)
references its settled final value: delay is the 50% crossing of the
output minus the 50% crossing of the source, rise time runs between the
10% and 90% crossings of the final value. A "noise" trace (a quiet
victim) has no settled high level, so its thresholds reference the peak
of the excursion from baseline instead.

All crossings are linearly interpolated between samples and use
first-crossing semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import WaveformSet
from .errors import ParameterError

KINDS = ("signal", "noise")


@dataclass(frozen=True)
class TraceMeasurement:
    """Measured quantities of one trace; absent ones are None."""

    kind: str
    peak_v: float | None = None
    t_peak: float | None = None
    delay: float | None = None
    rise_time: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"unknown trace kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "peak_v": self.peak_v, "t_peak": self.t_peak,
                "delay": self.delay, "rise_time": self.rise_time}


@dataclass(frozen=True)
class ScenarioResult:
    """Summary bundle for one scenario run."""

    scenario: str
    params: dict = field(default_factory=dict)
    measurements: dict[str, TraceMeasurement] = field(default_factory=dict)
    waveform_files: tuple[str, ...] = ()
    version: str = ""

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "params": self.params,
            "measurements": {k: m.to_dict() for k, m in self.measurements.items()},
            "waveform_files": list(self.waveform_files),
            "version": self.version,
        }


def first_crossing(times: np.ndarray, values: np.ndarray,
                   level: float) -> float | None:
    """First upward crossing of ``level``, linearly interpolated.

    A trace that starts at or above the level counts as crossing at the
    first sample. Returns None when the level is never reached.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) == 0:
        raise ParameterError("empty trace")
    if values[0] >= level:
        return float(times[0])
    below = values[:-1] < level
    above = values[1:] >= level
    hits = np.nonzero(below & above)[0]
    if hits.size == 0:
        return None
    i = int(hits[0])
    frac = (level - values[i]) / (values[i + 1] - values[i])
    return float(times[i] + frac * (times[i + 1] - times[i]))


def peak_noise(times: np.ndarray, trace: np.ndarray,
               baseline: float = 0.0) -> tuple[float, float]:
    """Largest excursion from baseline and the first time it occurs."""
    times = np.asarray(times, dtype=float)
    trace = np.asarray(trace, dtype=float)
    if len(trace) == 0 or len(times) != len(trace):
        raise ParameterError("peak_noise needs matching non-empty times/trace")
    dev = np.abs(trace - baseline)
    i = int(np.argmax(dev))              # argmax returns the first maximum
    return float(dev[i]), float(times[i])


def _reference(trace: np.ndarray, kind: str, baseline: float) -> float:
    """Level that thresholds are measured against: settled final value
    for signals, peak excursion for noise pulses."""
    if kind == "signal":
        return float(trace[-1])
    dev = np.abs(np.asarray(trace) - baseline)
    return float(np.max(dev))


def _oriented(trace: np.ndarray, kind: str, baseline: float) -> tuple[np.ndarray, float]:
    """Trace rectified so thresholds are upward crossings of a positive
    reference; returns (oriented trace, positive reference)."""
    trace = np.asarray(trace, dtype=float)
    ref = _reference(trace, kind, baseline)
    if kind == "noise":
        return np.abs(trace - baseline), ref
    if ref < 0:
        return -trace, -ref
    return trace, ref


def propagation_delay(times: np.ndarray, source_trace: np.ndarray,
                      output_trace: np.ndarray, threshold: float = 0.5,
                      kind: str = "signal", baseline: float = 0.0
                      ) -> float | None:
    """Threshold crossing of the output minus that of the source.

    The source is treated as a signal (threshold times its settled
    final); the output threshold references its settled final for
    signal kind or its peak excursion for noise kind. None when either
    trace never crosses, or when the output reference is zero (a flat
    trace has no delay).
    """
    if not 0.0 < threshold < 1.0:
        raise ParameterError("threshold must lie in (0, 1)")
    if kind not in KINDS:
        raise ParameterError(f"unknown trace kind {kind!r}")
    src, src_ref = _oriented(source_trace, "signal", 0.0)
    out, out_ref = _oriented(output_trace, kind, baseline)
    if src_ref == 0.0 or out_ref == 0.0:
        return None
    t_src = first_crossing(times, src, threshold * src_ref)
    t_out = first_crossing(times, out, threshold * out_ref)
    if t_src is None or t_out is None:
        return None
    return t_out - t_src


def rise_time(times: np.ndarray, trace: np.ndarray, lo: float = 0.10,
              hi: float = 0.90, kind: str = "signal",
              baseline: float = 0.0) -> float | None:
    """Time between the first lo- and hi-fraction crossings."""
    if not 0.0 <= lo < hi <= 1.0:
        raise ParameterError("need 0 <= lo < hi <= 1")
    if kind not in KINDS:
        raise ParameterError(f"unknown trace kind {kind!r}")
    tr, ref = _oriented(trace, kind, baseline)
    if ref == 0.0:
        return None
    t_lo = first_crossing(times, tr, lo * ref)
    t_hi = first_crossing(times, tr, hi * ref)
    if t_lo is None or t_hi is None:
        return None
    return t_hi - t_lo


def measure_scenario(waves: WaveformSet, roles: dict[str, str]) -> ScenarioResult:
    """Bundle the aggressor signal metrics and victim noise metrics.

    ``roles`` maps "source", "aggressor", and "victim" to node labels
    (the stimulus entry node, the aggressor load node, and the victim
    load node). The victim baseline is its own initial sample.
    """
    for role in ("source", "aggressor", "victim"):
        if role not in roles:
            raise ParameterError(f"missing role {role!r} "
                                 f"(got {sorted(roles)})")
    t = waves.times
    src = waves.trace(roles["source"])
    agg = waves.trace(roles["aggressor"])
    vic = waves.trace(roles["victim"])

    agg_peak, agg_tpk = peak_noise(t, agg, baseline=0.0)
    agg_m = TraceMeasurement(
        kind="signal", peak_v=agg_peak, t_peak=agg_tpk,
        delay=propagation_delay(t, src, agg, kind="signal"),
        rise_time=rise_time(t, agg, kind="signal"))

    vic_base = float(vic[0])
    vic_peak, vic_tpk = peak_noise(t, vic, baseline=vic_base)
    vic_m = TraceMeasurement(
        kind="noise", peak_v=vic_peak, t_peak=vic_tpk,
        delay=propagation_delay(t, src, vic, kind="noise", baseline=vic_base),
        rise_time=rise_time(t, vic, kind="noise", baseline=vic_base))

    return ScenarioResult(
        scenario=str(waves.metadata.get("scenario", "")),
        measurements={"aggressor": agg_m, "victim": vic_m})
