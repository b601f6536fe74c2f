"""Cut the centered unit square into pieces that reassemble into a sheared cell.

Run:  python3 demos/shear_pieces.py [output_dir]
"""
import sys
from pathlib import Path

from latticetile import Lattice, equidecompose, render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

Z2 = Lattice.integer(2)
shear = Lattice(((1, 1), (0, 1)))   # basis vectors (1,1) and (0,1)

e = equidecompose(Z2, shear)
print(f"{len(e.pieces)} pieces")
for p in e.pieces:
    cells = f"{len(p.cells)} convex cell" + ("s" if len(p.cells) > 1 else "")
    print(f"  move by g = {tuple(map(str, p.g))}   volume {p.volume()}   ({cells})")
print("total volume:", sum(p.volume() for p in e.pieces))

(out / "shear_pieces.svg").write_text(render_svg([Z2, e]))
print("wrote", out / "shear_pieces.svg")
