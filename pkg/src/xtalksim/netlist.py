"""SPICE-dialect netlist export for external cross-validation.

Targets the classic card subset (R/L/C/K/V, .tran, .end) that any
mainstream simulator reads. Mutual inductance is emitted as K cards
with the coupling coefficient k = M / sqrt(L_i * L_j); a network whose
coupling reaches k >= 1 is refused rather than emitted, since no
passive deck can represent it. Ideal (0 ohm) shield ground ties become
tiny 1e-9 ohm resistors so dialects that reject zero-resistance loops
still accept the deck.

Each ladder segment's series resistance is split back out of its
inductor branch into a separate R card through an internal node named
``<line>_m<seg>``; every node label that appears in a WaveformSet
appears verbatim in the deck, with ground as node 0.

Output is byte-stable: the same network, stimulus, and sim config
always serialize to the identical text.
"""

from __future__ import annotations

import math

from .engine import SimConfig, Stimulus
from .errors import ParameterError
from .network import CoupledNetwork

TIE_OHMS_FLOOR = 1e-9
STEP_EDGE_S = 1e-15


def _f(x: float) -> str:
    return f"{x:.9g}"


def _pwl_points(stimulus: Stimulus) -> list[tuple[float, float]]:
    """Breakpoints of the source voltage as a PWL card understands them
    (value held flat after the last point)."""
    amp = stimulus.amplitude_v
    t0 = stimulus.delay_s
    if stimulus.kind == "pwl":
        pts = [(t0 + t, amp * v) for t, v in stimulus.points]
    elif stimulus.kind == "ramp" and stimulus.rise_time_s > 0.0:
        pts = [(t0, 0.0), (t0 + stimulus.rise_time_s, amp)]
    else:                                 # step, or a zero-rise ramp
        pts = [(t0, 0.0), (t0 + STEP_EDGE_S, amp)]
    if pts[0][0] > 0.0:
        pts.insert(0, (0.0, pts[0][1]))
    out = []
    for t, v in pts:
        if out and t <= out[-1][0]:
            continue
        out.append((t, v))
    return out


def export_netlist(network: CoupledNetwork, stimulus: Stimulus,
                   sim_config: SimConfig) -> str:
    """Serialize a network plus drive and analysis window to deck text."""
    title = network.scenario or "custom"
    name = {nd.nid: nd.label for nd in network.nodes}

    lines = [
        f"* coupled-interconnect ladder: {title}",
        f"* {network.n_segments} segments per line; series resistance split from",
        f"* each inductor branch through internal <line>_m<seg> nodes",
        f"* mutual coupling: K cards, k = M / sqrt(L_i * L_j)",
        f"* shield ground ties: explicit resistors, {_f(TIE_OHMS_FLOOR)} ohm floor",
        f"* node names match simulator waveform labels; ground is node 0",
    ]

    for src in network.sources:
        if src.driven:
            pw = " ".join(f"{_f(t)} {_f(v)}" for t, v in _pwl_points(stimulus))
            lines.append(f"{src.name} {name[src.node]} 0 PWL({pw})")
        else:
            lines.append(f"{src.name} {name[src.node]} 0 DC 0")

    for r in network.resistors:
        lines.append(f"{r.name} {name[r.a]} {name[r.b]} {_f(r.ohms)}")

    for ind in network.inductors:
        seg_label = ind.name[1:]          # "L<line>_<seg>" -> "<line>_<seg>"
        if ind.r_series_ohm > 0.0:
            line_name, _, seg = seg_label.rpartition("_")
            mid = f"{line_name}_m{seg}"
            lines.append(f"R{seg_label} {name[ind.a]} {mid} {_f(ind.r_series_ohm)}")
            lines.append(f"{ind.name} {mid} {name[ind.b]} {_f(ind.l_h)}")
        else:
            lines.append(f"{ind.name} {name[ind.a]} {name[ind.b]} {_f(ind.l_h)}")

    by_branch = {ind.branch: ind for ind in network.inductors}
    for m in network.mutuals:
        li = by_branch[m.branch_i]
        lj = by_branch[m.branch_j]
        k = m.m_h / math.sqrt(li.l_h * lj.l_h)
        if not abs(k) < 1.0:
            raise ParameterError(
                f"cannot export {m.name}: coupling coefficient k = {k:.6g} "
                f"is not < 1, no passive deck represents it")
        lines.append(f"{m.name} {li.name} {lj.name} {_f(k)}")

    for c in network.capacitors:
        lines.append(f"{c.name} {name[c.a]} {name[c.b]} {_f(c.farads)}")

    for tie in network.ties:
        ohms = max(tie.ohms, TIE_OHMS_FLOOR)
        lines.append(f"{tie.name} {name[tie.node]} 0 {_f(ohms)}")

    lines.append(f".tran {_f(sim_config.dt)} {_f(sim_config.t_end)}")
    lines.append(".end")
    return "\n".join(lines) + "\n"
