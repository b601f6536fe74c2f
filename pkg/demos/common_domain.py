"""Two routes to one bounded set that tiles the plane by two different lattices.

L = Z^2 and M = <(1/2,0),(0,2)> have the same covolume.  The first route
glues translated copies of a cell of L+M; the second moves the pieces of an
equidecomposition back by their L-parts.  Both results are checked exactly
and by sampling against L and M.

A rotation by arctan(3/4) is rational (cos = 4/5, sin = 3/5), so the rotated
integer lattice is commensurable with Z^2 and the exact route applies too.

Run:  python3 demos/common_domain.py [output_dir]
"""
import sys
from fractions import Fraction as F
from pathlib import Path

from latticetile import (Lattice, common_fd_commensurable, common_fd_from_equidecomposition, equidecompose,
                         index, intersect, render_svg, verify_exact_tiling, verify_monte_carlo_tiling)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)


def check(name, domain, lattices):
    print(f"{name}: volume {domain.volume()}")
    for label, lat in lattices:
        ex = verify_exact_tiling(domain, lat)
        mc = verify_monte_carlo_tiling(domain, lat, n=5000, seed=1)
        print(f"  against {label}: exact {ex.verdict} ({ex.method}), sampled {mc.verdict} {mc.histogram}")


Z2 = Lattice.integer(2)
M = Lattice(((F(1, 2), 0), (0, 2)))

glued = common_fd_commensurable(Z2, M)
print("offsets:", [tuple(map(str, o)) for o in glued.offsets])
check("glued cells", glued, [("Z^2", Z2), ("M", M)])

moved = common_fd_from_equidecomposition(equidecompose(Z2, M))
check("moved pieces", moved, [("Z^2", Z2), ("M", M)])

(out / "glued.svg").write_text(render_svg([Z2, glued]))
(out / "moved.svg").write_text(render_svg([Z2, moved]))

rot = Lattice(((F(4, 5), F(3, 5)), (F(-3, 5), F(4, 5))))
H = intersect(Z2, rot)
print(f"rotated lattice: [Z^2 : Z^2 ∩ R] = {index(Z2, H)}")
check("rotation domain", common_fd_commensurable(Z2, rot), [("Z^2", Z2), ("R", rot)])
(out / "rotation.svg").write_text(render_svg([Z2, common_fd_commensurable(Z2, rot)]))
print("wrote SVGs to", out)
