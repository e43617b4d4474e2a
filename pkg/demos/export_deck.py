"""Export a SPICE deck for one of the presets.

Writes the same netlist the CLI `export-netlist` command produces:
segment R/L/C cards, K cards for every mutual-inductance pair, the
shield ground ties, PWL sources for the stimulus, and a .tran line
matching the sim settings. Pipe to a file or pass --out.
"""

import argparse
import sys

from xtalksim import export_netlist, preset_config, resolve

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("preset", nargs="?", default="shield-3taps",
                choices=("no-shield", "shield", "shield-3taps"))
ap.add_argument("--out", help="write the deck here instead of stdout")
args = ap.parse_args()

resolved = resolve(preset_config(args.preset))
deck = export_netlist(resolved.network, resolved.stimulus, resolved.sim)

if args.out:
    with open(args.out, "w") as fh:
        fh.write(deck)
    cards = sum(1 for ln in deck.splitlines()
                if ln and not ln.startswith(("*", ".")))
    print(f"wrote {args.out}: {cards} element cards", file=sys.stderr)
else:
    sys.stdout.write(deck)
