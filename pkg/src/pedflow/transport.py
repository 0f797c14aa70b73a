"""One explicit step of the density conservation law on the graph.

Each edge carries flux from its higher-potential endpoint toward its
lower-potential endpoint.  With delta_yx = sgn(u(y) - u(x)) the update reads

    rho'(x) = rho(x) + lam * sum over y ~ x of delta_yx * h(rho_down, rho_up),

where (up, down) are the higher- and lower-potential endpoints of the edge.
Per edge the two endpoint contributions cancel exactly, so the update is
conservative; under the CFL bound lam * D * ||m|| <= 1 it is also monotone
and [0, 1]-preserving for the Godunov and Engquist-Osher fluxes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BoundsViolation, CflViolation, DiffusionCflViolation, DomainError
from .fluxes import MNORM, FluxScheme
from .graph import WeightedGraph

BOUNDS_BAND = 1e-12
"""Tolerated floating dust outside [0, 1] before an update counts as a bug."""


class BoundaryMode(enum.Enum):
    """What happens to density at the target vertices.

    NO_FLUX lets mass pile up at the targets (a stage, a point of interest)
    and conserves the total.  DIRICHLET zeroes the targets after every step,
    modeling exits of unbounded capacity.
    """

    NO_FLUX = "no-flux"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class StepParams:
    """Ratios and switches for one transport step.

    lam = dt/dx, lam_d = dt/dx^2.  eps scales the optional graph-Laplacian
    diffusion applied after transport; ``diffusion_mode`` "unsigned" is the
    plain Laplacian, "oriented" restricts it to edges with nonzero flow
    orientation.
    """

    lam: float
    scheme: FluxScheme
    bc: BoundaryMode = BoundaryMode.NO_FLUX
    eps: float = 0.0
    lam_d: float = 0.0
    diffusion_mode: str = "unsigned"

    def __post_init__(self):
        if not self.lam > 0.0:
            raise ValueError("lam must be positive")
        if self.eps < 0.0:
            raise ValueError("eps must be nonnegative")
        if self.eps > 0.0 and not self.lam_d > 0.0:
            raise ValueError("diffusion needs a positive lam_d")
        if self.diffusion_mode not in ("unsigned", "oriented"):
            raise ValueError("diffusion_mode must be 'unsigned' or 'oriented'")


def orientation_from_potential(g: WeightedGraph, u) -> np.ndarray:
    """Per-arc orientation delta_{src,dst} = sgn(u(src) - u(dst)), sgn(0) = 0.

    Antisymmetric by construction; arcs out of the boundary into the interior
    always carry delta >= 0 since u > 0 off the boundary, so transport is
    directed toward the exits.
    """
    u = np.asarray(u, dtype=float)
    return np.sign(u[g.arc_src] - u[g.arc_dst])


def _check_density(rho, n):
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (n,):
        raise ValueError(f"density must have shape ({n},)")
    if rho.size and (np.min(rho) < 0.0 or np.max(rho) > 1.0):
        raise DomainError("density must lie in [0, 1]")
    return rho


def _enforce_bounds(values: np.ndarray) -> np.ndarray:
    lo, hi = float(np.min(values)), float(np.max(values))
    if lo < -BOUNDS_BAND or hi > 1.0 + BOUNDS_BAND:
        worst = int(np.argmin(values)) if lo < -BOUNDS_BAND else int(np.argmax(values))
        raise BoundsViolation(
            f"updated density leaves [0, 1] at vertex {worst} "
            f"(value {values[worst]!r})"
        )
    np.clip(values, 0.0, 1.0, out=values)
    return values


def check_cfl(g: WeightedGraph, lam: float) -> None:
    """Refuse a step whose monotonicity cannot be guaranteed."""
    if lam * g.max_degree * MNORM > 1.0:
        raise CflViolation(
            f"lam * D * ||m|| = {lam * g.max_degree * MNORM:g} exceeds 1 "
            f"(lam = {lam:g}, D = {g.max_degree})"
        )


def advect(g: WeightedGraph, rho, params: StepParams, orientation: np.ndarray) -> np.ndarray:
    """Conservative transport update before any boundary treatment."""
    rho = _check_density(rho, g.vertex_count)
    check_cfl(g, params.lam)
    if g.arc_src.size == 0:
        return rho.copy()
    rho_src = rho[g.arc_src]
    rho_dst = rho[g.arc_dst]
    # delta = +1 means the src side sits at higher potential and feeds dst
    toward_dst = orientation == 1.0
    v_arg = np.where(toward_dst, rho_dst, rho_src)   # downstream density
    u_arg = np.where(toward_dst, rho_src, rho_dst)   # upstream density
    h = params.scheme.h(v_arg, u_arg)
    new = rho + np.add.reduceat(params.lam * orientation * h, g.arc_starts)
    return _enforce_bounds(new)


def transport_update(g: WeightedGraph, rho, u, params: StepParams,
                     orientation: np.ndarray | None = None) -> np.ndarray:
    """One transport step; Dirichlet boundaries are zeroed after the update."""
    if np.any(np.asarray(u, dtype=float)[g.boundary] != 0.0):
        raise ValueError("potential must vanish on the boundary")
    if orientation is None:
        orientation = orientation_from_potential(g, u)
    new = advect(g, rho, params, orientation)
    if params.bc is BoundaryMode.DIRICHLET:
        new[g.boundary] = 0.0
    return new


def diffuse(g: WeightedGraph, rho, params: StepParams,
            orientation: np.ndarray | None = None) -> np.ndarray:
    """Explicit graph-heat update before any boundary zeroing.

    Under NO_FLUX, edges touching the boundary are excluded so target mass
    stays put and the total is conserved; under DIRICHLET all edges take
    part and the caller (or apply_diffusion) re-zeroes the boundary.
    """
    rho = _check_density(rho, g.vertex_count)
    if params.eps == 0.0:
        return rho.copy()
    coeff = params.eps * params.lam_d
    if coeff * g.max_degree > 0.5:
        raise DiffusionCflViolation(
            f"eps * lam_d * D = {coeff * g.max_degree:g} exceeds 1/2 "
            f"(eps = {params.eps:g}, lam_d = {params.lam_d:g}, D = {g.max_degree})"
        )
    if g.arc_src.size == 0:
        return rho.copy()
    jump = rho[g.arc_src] - rho[g.arc_dst]
    if params.bc is BoundaryMode.NO_FLUX:
        jump = np.where(g.arc_touches_boundary, 0.0, jump)
    if params.diffusion_mode == "oriented":
        if orientation is None:
            raise ValueError("oriented diffusion needs an orientation")
        jump = np.where(orientation == 0.0, 0.0, jump)
    new = rho + coeff * np.add.reduceat(jump, g.arc_starts)
    return _enforce_bounds(new)


def apply_diffusion(g: WeightedGraph, rho, params: StepParams,
                    orientation: np.ndarray | None = None) -> np.ndarray:
    """Diffusion step with the boundary mode applied."""
    new = diffuse(g, rho, params, orientation)
    if params.eps > 0.0 and params.bc is BoundaryMode.DIRICHLET:
        new[g.boundary] = 0.0
    return new
