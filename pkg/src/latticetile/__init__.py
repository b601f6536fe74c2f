"""Bounded common fundamental domains of pairs of full-rank lattices."""
from .domains import (
    FundamentalDomainSet,
    HalfOpenParallelepiped,
    common_fd_commensurable,
    fundamental_parallelepiped,
    reduce_mod,
)
from .equidecomposition import (
    Equidecomposition,
    Piece,
    common_fd_from_equidecomposition,
    equidecompose,
    piece_volume,
)
from .errors import *  # noqa: F401,F403
from .lattice import (
    Lattice,
    LatticePoint,
    SublatticeDecomposition,
    adapted_basis,
    contains,
    coset_representatives,
    index,
    intersect,
    lattice_sum,
    volume,
)
from .matching import (
    BoundedBijection,
    GUniformityReport,
    PointWindow,
    bottleneck_matching,
    case3_common_fd_window,
    direct_sum_common_fd_window,
    g_uniform_probe,
    hall_deficiency,
    lattice_points_in_box,
)
from .polytope import Interval, Polytope
from .render import RenderSpec, render_svg
from .tiling import TilingReport, verify_exact_tiling, verify_monte_carlo_tiling

__version__ = "0.1.0"
