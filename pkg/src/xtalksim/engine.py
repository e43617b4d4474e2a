"""Modified nodal analysis and implicit transient integration.

The unknown vector is [non-ground node voltages, inductor branch
currents]. Nodes held by an ideal voltage source are not unknowns:
their known voltage u(t) moves to the right-hand side through a source
injection matrix, so the system reads G x + C dx/dt = B u(t). Shield
nodes tied to ground through a 0-ohm tie are merged with ground during
assembly.

Each ladder segment's series resistance rides on its inductor branch
(the branch equation is v_a - v_b - R_s i - L di/dt - sum_j M_ij di_j/dt
= 0), which keeps the unknown count at one node plus one branch per
segment.

Integration is fixed-step implicit: trapezoidal (default) or backward
Euler, with the first step always backward Euler to damp the spurious
transient a discontinuous source derivative would otherwise feed into
the trapezoidal rule. The system matrices are factored once per run and
reused every step.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import AssemblyError, ParameterError, SolverError
from .network import GROUND, CoupledNetwork

METHODS = ("trapezoidal", "backward-euler")


@dataclass(frozen=True)
class Stimulus:
    """Drive waveform for the driven sources of a network.

    Kinds: ``step`` switches from 0 to amplitude just after ``delay_s``
    (the sample at exactly t = delay is still 0, which is also what the
    DC initial condition sees); ``ramp`` rises linearly over
    ``rise_time_s``; ``pwl`` interpolates the given (time, value) points
    linearly, scaled by ``amplitude_v`` and shifted by ``delay_s``,
    holding the first/last value outside the covered span.
    """

    kind: str = "ramp"
    amplitude_v: float = 1.0
    rise_time_s: float = 1e-9
    delay_s: float = 0.0
    points: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("step", "ramp", "pwl"):
            raise ParameterError(f"unknown stimulus kind {self.kind!r}")
        if not math.isfinite(self.amplitude_v):
            raise ParameterError("stimulus amplitude must be finite")
        if self.rise_time_s < 0:
            raise ParameterError("rise_time_s must be >= 0")
        if self.kind == "pwl":
            if not self.points or len(self.points) < 2:
                raise ParameterError("pwl stimulus needs at least two points")
            pts = tuple((float(t), float(v)) for t, v in self.points)
            object.__setattr__(self, "points", pts)
            times = [p[0] for p in pts]
            if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
                raise ParameterError("pwl point times must be strictly increasing")
            if not all(math.isfinite(t) and math.isfinite(v) for t, v in pts):
                raise ParameterError("pwl points must be finite")
        elif self.points is not None:
            raise ParameterError(f"points are only valid for kind='pwl'")

    def values(self, times: np.ndarray) -> np.ndarray:
        """Waveform sampled at the given times (vectorized)."""
        t = np.asarray(times, dtype=float) - self.delay_s
        if self.kind == "step":
            return np.where(t > 0.0, self.amplitude_v, 0.0)
        if self.kind == "ramp":
            if self.rise_time_s == 0.0:
                return np.where(t > 0.0, self.amplitude_v, 0.0)
            return self.amplitude_v * np.clip(t / self.rise_time_s, 0.0, 1.0)
        tk = np.array([p[0] for p in self.points])
        vk = np.array([p[1] for p in self.points])
        return self.amplitude_v * np.interp(t, tk, vk)

    def value(self, t: float) -> float:
        return float(self.values(np.array([t]))[0])


def smooth_edge(rise_time_s: float, amplitude_v: float = 1.0,
                delay_s: float = 0.0, samples: int = 64) -> Stimulus:
    """Smooth 0-to-amplitude edge as a piecewise-linear stimulus.

    Samples the S-curve 3s^2 - 2s^3 over the rise. A plain ramp has
    slope discontinuities at both corners which ring the artificial
    cutoff resonance of a lumped ladder; that ringing does not converge
    away with more segments, so small difference signals (shielded
    victim noise) keep shifting as n grows. The smooth edge carries
    negligible energy at those frequencies and makes peak readings
    stable under segment-count refinement.
    """
    if rise_time_s <= 0:
        raise ParameterError("smooth_edge needs a positive rise time")
    if samples < 2:
        raise ParameterError("smooth_edge needs at least 2 samples")
    s = np.linspace(0.0, 1.0, samples + 1)
    v = 3.0 * s ** 2 - 2.0 * s ** 3
    pts = tuple((float(rise_time_s * si), float(vi)) for si, vi in zip(s, v))
    return Stimulus(kind="pwl", amplitude_v=amplitude_v, delay_s=delay_s,
                    rise_time_s=rise_time_s, points=pts)


@dataclass(frozen=True)
class SimConfig:
    dt: float
    t_end: float
    method: str = "trapezoidal"
    dt_init_policy: str = "backward-euler-start"
    output_nodes: str | tuple[str, ...] = "all"

    def __post_init__(self) -> None:
        if not (0.0 < self.dt < self.t_end and math.isfinite(self.t_end)):
            raise ParameterError(f"need 0 < dt < t_end, got dt={self.dt!r} "
                                 f"t_end={self.t_end!r}")
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r}; "
                                 f"choose one of {', '.join(METHODS)}")
        if self.dt_init_policy != "backward-euler-start":
            raise ParameterError(
                f"unknown dt_init_policy {self.dt_init_policy!r}")
        if self.output_nodes != "all":
            object.__setattr__(self, "output_nodes",
                               tuple(str(x) for x in self.output_nodes))


@dataclass(frozen=True)
class WaveformSet:
    """Uniformly sampled traces from one transient run."""

    times: np.ndarray
    node_traces: dict[str, np.ndarray]
    branch_currents: dict[str, np.ndarray] = field(default_factory=dict)
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.times)
        for label, tr in list(self.node_traces.items()) + list(self.branch_currents.items()):
            if len(tr) != n:
                raise ParameterError(f"trace {label!r} length {len(tr)} != "
                                     f"time axis length {n}")
            if not np.all(np.isfinite(tr)):
                raise ParameterError(f"trace {label!r} contains non-finite samples")

    def trace(self, label: str) -> np.ndarray:
        try:
            return self.node_traces[label]
        except KeyError:
            raise ParameterError(f"no node trace labeled {label!r}") from None

    def allclose(self, other: "WaveformSet", rtol: float = 1e-8,
                 atol: float = 1e-12) -> bool:
        """Node-trace equality up to tolerance (what the CSV round-trips)."""
        if self.times.shape != other.times.shape:
            return False
        if not np.allclose(self.times, other.times, rtol=rtol, atol=atol):
            return False
        if set(self.node_traces) != set(other.node_traces):
            return False
        return all(np.allclose(tr, other.node_traces[k], rtol=rtol, atol=atol)
                   for k, tr in self.node_traces.items())


@dataclass(frozen=True)
class MnaSystem:
    """Assembled descriptor: G x + C dx/dt = B u(t). Reusable across runs."""

    G: np.ndarray
    C: np.ndarray
    B: np.ndarray
    unknown_labels: tuple[str, ...]
    n_node_unknowns: int
    source_names: tuple[str, ...]
    source_driven: tuple[bool, ...]
    source_labels: tuple[str, ...]        # node labels of the source nodes
    grounded_labels: tuple[str, ...]      # labels merged with ground (0-ohm ties)
    branch_labels: tuple[str, ...]


def assemble(network: CoupledNetwork) -> MnaSystem:
    """Stamp the MNA matrices for a network.

    Raises AssemblyError when the structure cannot produce a solvable
    system (an unknown appears in no equation, or an element would need
    the derivative of a known source voltage).
    """
    aliased = {t.node for t in network.ties if t.ohms == 0.0}
    source_node = {}
    for s in network.sources:
        if s.node in source_node:
            raise AssemblyError(f"two sources drive node "
                                f"{network.label(s.node)!r}")
        if s.node in aliased:
            raise AssemblyError(f"source {s.name} drives a ground-tied node")
        source_node[s.node] = s

    kind: dict[int, tuple[str, int]] = {GROUND: ("gnd", 0)}
    for nid in aliased:
        kind[nid] = ("gnd", 0)
    sources = list(network.sources)
    for j, s in enumerate(sources):
        kind[s.node] = ("src", j)
    unknown_nodes = [nd.nid for nd in network.nodes
                     if nd.nid != GROUND and nd.nid not in kind]
    for i, nid in enumerate(unknown_nodes):
        kind[nid] = ("unk", i)

    nv = len(unknown_nodes)
    nb = len(network.inductors)
    n = nv + nb
    ns = len(sources)
    G = np.zeros((n, n))
    C = np.zeros((n, n))
    B = np.zeros((n, ns))

    def stamp_two_terminal(M: np.ndarray, a: int, b: int, val: float,
                           name: str, allow_source: bool) -> None:
        ka, kb = kind[a], kind[b]
        for (k1, k2) in ((ka, kb), (kb, ka)):
            if k1[0] != "unk":
                continue
            i = k1[1]
            M[i, i] += val
            if k2[0] == "unk":
                M[i, k2[1]] -= val
            elif k2[0] == "src":
                if not allow_source:
                    raise AssemblyError(
                        f"{name} connects to source node; its equation would "
                        f"need the source-voltage derivative, which this "
                        f"formulation does not carry. Put a resistor between.")
                B[i, k2[1]] += val
        if ka[0] == "src" and kb[0] == "src" and not allow_source:
            raise AssemblyError(f"{name} connects two source nodes")

    for r in network.resistors:
        if r.ohms <= 0:
            raise AssemblyError(f"{r.name}: resistor needs a positive value, "
                                f"got {r.ohms!r}")
        stamp_two_terminal(G, r.a, r.b, 1.0 / r.ohms, r.name, allow_source=True)
    for t in network.ties:
        if t.ohms > 0.0:
            stamp_two_terminal(G, t.node, GROUND, 1.0 / t.ohms, t.name,
                               allow_source=True)
    for c in network.capacitors:
        stamp_two_terminal(C, c.a, c.b, c.farads, c.name, allow_source=False)

    for ind in network.inductors:
        row = nv + ind.branch
        for node, sign in ((ind.a, 1.0), (ind.b, -1.0)):
            k = kind[node]
            if k[0] == "unk":
                G[k[1], row] += sign      # KCL: branch current into the node
                G[row, k[1]] += sign      # KVL: node voltage along the branch
            elif k[0] == "src":
                B[row, k[1]] -= sign      # known voltage goes to the RHS
        G[row, row] -= ind.r_series_ohm
        C[row, row] -= ind.l_h
    for m in network.mutuals:
        C[nv + m.branch_i, nv + m.branch_j] -= m.m_h
        C[nv + m.branch_j, nv + m.branch_i] -= m.m_h

    labels = tuple([network.label(nid) for nid in unknown_nodes]
                   + [ind.name for ind in network.inductors])
    # structural screen: an unknown with an all-zero row or column can
    # never be solved for; name it rather than failing inside LU
    zero_rows = ~(np.any(G != 0.0, axis=1) | np.any(C != 0.0, axis=1))
    zero_cols = ~(np.any(G != 0.0, axis=0) | np.any(C != 0.0, axis=0))
    bad = np.nonzero(zero_rows | zero_cols)[0]
    if bad.size:
        raise AssemblyError("structurally singular system; culprit: "
                            + ", ".join(labels[i] for i in bad))

    return MnaSystem(
        G=G, C=C, B=B, unknown_labels=labels, n_node_unknowns=nv,
        source_names=tuple(s.name for s in sources),
        source_driven=tuple(s.driven for s in sources),
        source_labels=tuple(network.label(s.node) for s in sources),
        grounded_labels=tuple(sorted(network.label(nid) for nid in aliased)),
        branch_labels=tuple(ind.name for ind in network.inductors),
    )


def _name_floating(network: CoupledNetwork) -> str:
    from .network import validate_network

    for finding in validate_network(network):
        if finding.code == "floating-node":
            return " (" + finding.message + ")"
    return ""


def dc_operating_point(network: CoupledNetwork,
                       source_values: dict[str, float] | None = None
                       ) -> dict[str, float]:
    """Resistive DC solution: capacitors open, inductors shorted.

    ``source_values`` maps source names to voltages; by default driven
    sources sit at 1 V and quiet ones at 0 V. Returns a voltage for
    every non-ground node label.
    """
    sys = assemble(network)
    u = np.array([1.0 if d else 0.0 for d in sys.source_driven])
    if source_values:
        for name, val in source_values.items():
            if name not in sys.source_names:
                raise ParameterError(f"unknown source {name!r}")
            u[sys.source_names.index(name)] = float(val)
    try:
        x = np.linalg.solve(sys.G, sys.B @ u)
    except np.linalg.LinAlgError:
        raise SolverError("singular DC system; a subnetwork floats with no "
                          "resistive path to ground" + _name_floating(network))
    out = {lbl: float(x[i]) for i, lbl in
           enumerate(sys.unknown_labels[:sys.n_node_unknowns])}
    for lbl, val in zip(sys.source_labels, u):
        out[lbl] = float(val)
    for lbl in sys.grounded_labels:
        out[lbl] = 0.0
    return out


def _config_hash(network: CoupledNetwork, stimulus: Stimulus,
                 sim: SimConfig) -> str:
    blob = "|".join((repr(network), repr(stimulus),
                     repr((sim.dt, sim.t_end, sim.method, sim.dt_init_policy))))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def run_transient(network: CoupledNetwork, stimulus: Stimulus,
                  sim: SimConfig) -> WaveformSet:
    """Integrate the network response to the stimulus.

    The initial condition is the DC solution with every source at its
    t = 0 value (0 for the step/ramp/pwl-from-zero presets). The first
    step is always backward Euler; subsequent steps use the configured
    method. Deterministic for fixed inputs.
    """
    sys = assemble(network)
    steps = int(round(sim.t_end / sim.dt))
    if steps < 1:
        raise ParameterError("t_end shorter than one timestep")
    times = np.arange(steps + 1) * sim.dt

    drive = stimulus.values(times)
    u_all = np.zeros((len(sys.source_names), steps + 1))
    for j, driven in enumerate(sys.source_driven):
        if driven:
            u_all[j] = drive
    bu = sys.B @ u_all                                    # (n, steps+1)

    try:
        x = np.linalg.solve(sys.G, bu[:, 0])
    except np.linalg.LinAlgError:
        raise SolverError("singular DC system at t=0; a subnetwork floats "
                          "with no resistive path to ground"
                          + _name_floating(network))

    dt = sim.dt
    Cdt = sys.C / dt
    try:
        lu_be = sla.lu_factor(Cdt + sys.G)
        if sim.method == "trapezoidal":
            lu_tr = sla.lu_factor(Cdt + sys.G / 2.0)
            A_tr = Cdt - sys.G / 2.0
    except (ValueError, sla.LinAlgError) as exc:
        raise SolverError(f"LU factorization failed: {exc}")

    out = np.empty((steps + 1, len(x)))
    out[0] = x
    for k in range(steps):
        if k == 0 or sim.method == "backward-euler":
            x = sla.lu_solve(lu_be, Cdt @ x + bu[:, k + 1])
        else:
            x = sla.lu_solve(lu_tr, A_tr @ x + (bu[:, k + 1] + bu[:, k]) / 2.0)
        if not np.all(np.isfinite(x)):
            raise SolverError(f"divergence: non-finite sample at "
                              f"t={times[k + 1]:.6g} s")
        out[k + 1] = x

    node_traces: dict[str, np.ndarray] = {}
    for i, lbl in enumerate(sys.unknown_labels[:sys.n_node_unknowns]):
        node_traces[lbl] = out[:, i]
    for j, lbl in enumerate(sys.source_labels):
        node_traces[lbl] = u_all[j].copy()
    zeros = np.zeros(steps + 1)
    for lbl in sys.grounded_labels:
        node_traces[lbl] = zeros.copy()
    if sim.output_nodes != "all":
        missing = [lbl for lbl in sim.output_nodes if lbl not in node_traces]
        if missing:
            raise ParameterError(f"output_nodes not in network: {missing}")
        node_traces = {lbl: node_traces[lbl] for lbl in sim.output_nodes}
    else:
        # deterministic column order: network node order
        order = [nd.label for nd in network.nodes if nd.label in node_traces]
        node_traces = {lbl: node_traces[lbl] for lbl in order}

    branch_currents = {lbl: out[:, sys.n_node_unknowns + j]
                       for j, lbl in enumerate(sys.branch_labels)}
    meta = {"scenario": network.scenario,
            "config_hash": _config_hash(network, stimulus, sim)}
    return WaveformSet(times=times, node_traces=node_traces,
                       branch_currents=branch_currents, metadata=meta)
