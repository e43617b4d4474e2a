"""Run the three scenario presets and compare the crosstalk numbers.

Same stimulus everywhere: a 1 V smooth edge with a 200 ns ramp into the
aggressor driver. Prints a measurement table and drops the waveform CSV
and summary JSON for each preset into an output directory, same files
the CLI `run` command writes.
"""

import argparse
import pathlib

from xtalksim import (preset_config, run_scenario, write_summary_json,
                      write_waveforms_csv)
from xtalksim.config import summary_filename, waveforms_filename

PRESETS = ("no-shield", "shield", "shield-3taps")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="demo_out", help="where to put the "
                    "waveform/summary files (default: demo_out)")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    print(f"{'preset':<14} {'victim peak':>12} {'vs no-shield':>13} "
          f"{'agg delay':>10} {'agg rise':>10}")
    base_peak = None
    for name in PRESETS:
        result, waves, resolved = run_scenario(preset_config(name))
        vic = result.measurements["victim"]
        agg = result.measurements["aggressor"]
        if base_peak is None:
            base_peak = vic.peak_v
        rel = "" if vic.peak_v == base_peak else (
            f"{1 - vic.peak_v / base_peak:+.1%}"[1:] + " lower"
            if vic.peak_v < base_peak else
            f"{vic.peak_v / base_peak - 1:.1%} higher")
        print(f"{name:<14} {vic.peak_v * 1e3:>9.4f} mV {rel:>13} "
              f"{agg.delay * 1e9:>7.2f} ns {agg.rise_time * 1e9:>7.2f} ns")
        write_waveforms_csv(outdir / waveforms_filename(name), waves)
        write_summary_json(outdir / summary_filename(name), result)

    print()
    print("the shield buys a ~74% reduction in far-end victim noise; the")
    print("extra ground taps speed the aggressor up slightly but do NOT")
    print("lower the victim peak further (it rises by ~1%), because what")
    print("is left after shielding is mutual-inductance noise between the")
    print("signal lines themselves. files written to", outdir)


if __name__ == "__main__":
    main()
