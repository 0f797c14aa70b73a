"""Congestion-weighted distance-to-exit potential on the graph.

The potential u solves, at every interior vertex x,

    max over neighbors y of { -(u(y) - u(x)) / w_yx - 1 / (1 - rho(y)) } = 0,

with u = 0 pinned on the boundary.  Equivalently u(x) is the cheapest path
cost to the boundary when stepping onto vertex y costs w_yx / (1 - rho(y)).
Two independent routes compute it: synchronous value iteration (the
production solver, warm-startable) and a label-setting shortest-path oracle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import DomainError, NoConvergence
from .graph import WeightedGraph

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_DENSITY_FLOOR = 1e-9


@dataclass
class EikonalOptions:
    """Solver knobs.

    ``max_iterations`` defaults to 10 |V| at call time; positive edge costs
    give exact convergence in at most |V| sweeps from an upper-bound start,
    and the headroom guards against tolerance-level cycling.
    """

    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int | None = None
    warm_start: np.ndarray | None = None
    density_floor: float = DEFAULT_DENSITY_FLOOR

    def __post_init__(self):
        if self.tolerance < 0.0:
            raise ValueError("tolerance must be nonnegative")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not (0.0 < self.density_floor < 1.0):
            raise ValueError("density_floor must lie strictly between 0 and 1")


@dataclass
class EikonalResult:
    u: np.ndarray
    iterations: int


def vertex_cost(rho, density_floor: float = DEFAULT_DENSITY_FLOOR):
    """Cost of stepping onto a vertex of density rho: 1 / max(1 - rho, floor).

    The floor removes the singularity at rho = 1; valid coupled runs keep
    rho < 1 strictly, so an active cap signals data outside the model's
    hypotheses and is logged by the solvers.
    """
    r = np.asarray(rho, dtype=float)
    if r.size and (np.min(r) < 0.0 or np.max(r) > 1.0):
        raise DomainError("density must lie in [0, 1]")
    out = 1.0 / np.maximum(1.0 - r, density_floor)
    return out if out.ndim else float(out)


def _arc_costs(g: WeightedGraph, rho: np.ndarray, density_floor: float) -> np.ndarray:
    costs = vertex_cost(rho, density_floor)
    if np.any(1.0 - np.asarray(rho, dtype=float) < density_floor):
        logger.warning("density cost floor active: some vertex has rho >= 1 - %g", density_floor)
    return g.arc_weight * np.asarray(costs)[g.arc_src]


def value_iteration(g: WeightedGraph, rho, opts: EikonalOptions | None = None) -> EikonalResult:
    """Solve for the potential by synchronous Bellman sweeps.

    Each sweep replaces v(x) with min over neighbors y of v(y) + w_yx * cost(y),
    reading only the previous iterate (Jacobi update, ascending vertex order),
    and re-pins v = 0 on the boundary.  Iteration stops when the sup-norm
    change drops to ``opts.tolerance``.  Without a warm start the sweep begins
    from +inf off the boundary, which converges monotonically from above in
    at most |V| sweeps.
    """
    opts = opts or EikonalOptions()
    n = g.vertex_count
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (n,):
        raise ValueError(f"density must have shape ({n},)")

    if g.arc_src.size == 0:
        return EikonalResult(np.zeros(n), 0)

    arc_cost = _arc_costs(g, rho, opts.density_floor)
    if opts.warm_start is not None:
        v = np.array(opts.warm_start, dtype=float, copy=True)
        if v.shape != (n,):
            raise ValueError(f"warm start must have shape ({n},)")
    else:
        v = np.full(n, np.inf)
    v[g.boundary] = 0.0

    max_iter = opts.max_iterations if opts.max_iterations is not None else 10 * n
    for iteration in range(1, max_iter + 1):
        cand = v[g.arc_src] + arc_cost
        new = np.minimum.reduceat(cand, g.arc_starts)
        new[g.boundary] = 0.0
        # inf - inf is nan; vertices still at inf on both sides count as unchanged
        with np.errstate(invalid="ignore"):
            change = np.where(new == v, 0.0, np.abs(new - v))
        v = new
        if float(np.max(change)) <= opts.tolerance:
            return EikonalResult(v, iteration)
    raise NoConvergence(
        f"value iteration did not reach tolerance {opts.tolerance:g} "
        f"within {max_iter} sweeps"
    )


def eikonal_oracle(g: WeightedGraph, rho, density_floor: float = DEFAULT_DENSITY_FLOOR) -> np.ndarray:
    """Exact potential by multi-source label-setting shortest paths.

    Runs Dijkstra from the boundary set over the directed arc costs
    w_yx * cost(rho(y)); exact because all arc costs are positive.  Serves as
    the independent check on value_iteration.
    """
    n = g.vertex_count
    rho = np.asarray(rho, dtype=float)
    if g.arc_src.size == 0:
        return np.zeros(n)
    arc_cost = _arc_costs(g, rho, density_floor)
    mat = csr_matrix((arc_cost, (g.arc_src, g.arc_dst)), shape=(n, n))
    dist = dijkstra(mat, directed=True, indices=g.boundary, min_only=True)
    dist[g.boundary] = 0.0
    return dist


def check_eikonal_residual(g: WeightedGraph, rho, u, density_floor: float = DEFAULT_DENSITY_FLOOR) -> float:
    """Max over interior vertices of |max_y { -(u(y)-u(x))/w_yx - cost(y) }|.

    Zero (to rounding) exactly when u solves the potential equation; used as
    the solver's correctness certificate.
    """
    u = np.asarray(u, dtype=float)
    if g.arc_src.size == 0 or g.interior.size == 0:
        return 0.0
    costs = np.asarray(vertex_cost(rho, density_floor))
    terms = -(u[g.arc_src] - u[g.arc_dst]) / g.arc_weight - costs[g.arc_src]
    per_vertex = np.maximum.reduceat(terms, g.arc_starts)
    return float(np.max(np.abs(per_vertex[g.interior])))
