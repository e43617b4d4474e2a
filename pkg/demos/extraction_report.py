"""Print the extracted line parameters for the stock geometry.

Runs the closed-form formulas at the built-in defaults (5000 um lines,
2 um wide, 2 um thick, 2 um above the plane, eps_r = 3.9) and shows the
side-by-side report the CLI `extract` command prints, once per built-in
coefficient set. Then tabulates how the pair quantities fall off with
separation.
"""

from xtalksim import (apply_set_overrides, coupling_capacitance,
                      extraction_report, mutual_inductance_bracket,
                      preset_config)
from xtalksim.extraction import PAPER_LITERAL, TABLE_COMPAT

config = preset_config("no-shield")

for coeffs in ("table-compat", "paper-literal"):
    cfg = apply_set_overrides(config, [f"geometry.coefficients={coeffs}"])
    print(extraction_report(cfg).render())

print("pair quantities vs separation (w=t=h=2 um, l=5000 um):")
print(f"{'d [um]':>8} {'M bracket [uH]':>16} "
      f"{'C_m compat [pF/m]':>18} {'C_m literal [pF/m]':>19}")
for d in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0):
    m = mutual_inductance_bracket(5000.0, d)
    cc = coupling_capacitance(2.0, 2.0, 2.0, d, 3.9, TABLE_COMPAT) * 1e12
    cl = coupling_capacitance(2.0, 2.0, 2.0, d, 3.9, PAPER_LITERAL) * 1e12
    print(f"{d:>8g} {m:>16.4f} {cc:>18.4f} {cl:>19.4f}")

print()
print("note the inductive coupling decays only logarithmically while the")
print("capacitive coupling falls off as a power of d: at d=1 um the")
print("inductive coupling coefficient k = M/L is still ~0.099, and that is")
print("what sets the far-end noise floor a grounded shield cannot remove.")
