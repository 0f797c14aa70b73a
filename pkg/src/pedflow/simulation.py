"""The coupled time loop: solve the potential, transport density, record diagnostics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .eikonal import EikonalOptions, check_eikonal_residual, eikonal_oracle, value_iteration
from .graph import WeightedGraph
from .transport import (
    BoundaryMode,
    StepParams,
    advect,
    diffuse,
    orientation_from_potential,
)

logger = logging.getLogger(__name__)

TV_REPORT_BAND = 1e-12


@dataclass
class StopRules:
    """When a run may end before t_end.

    Thresholds left as None resolve at run start to the scale-free defaults
    1e-6 * initial mass (evacuation) and 1e-8 * |V| (steady state).
    """

    on_evacuation: bool = True
    on_steady_state: bool = True
    evacuation_threshold: float | None = None
    steady_state_threshold: float | None = None


@dataclass
class SimState:
    """Coupled state at one time step: density plus the potential it induces."""

    n: int
    t: float
    rho: np.ndarray
    u: np.ndarray
    eikonal_iterations: int


@dataclass
class Trajectory:
    """Per-step diagnostic series, strided snapshots, and run metadata.

    ``exit_mass`` is the density currently sitting on boundary vertices;
    ``exit_outflow`` row n holds, per boundary vertex, the mass that arrived
    there during step n (the mass removed there under Dirichlet).
    ``l1_increment`` row n is sum |rho^n - rho^(n-1)| (0 at row 0).
    """

    dt: float
    steps: np.ndarray
    times: np.ndarray
    total_mass: np.ndarray
    interior_mass: np.ndarray
    exit_mass: np.ndarray
    max_density: np.ndarray
    l1_increment: np.ndarray
    eikonal_iterations: np.ndarray
    exit_outflow: np.ndarray
    boundary: np.ndarray
    snapshots: list[SimState]
    stop_rule: str
    evacuation_step: int | None
    steady_state_step: int | None
    tv_violation_steps: np.ndarray
    max_residual: float
    initial_mass: float
    evacuation_threshold: float
    steady_state_threshold: float
    metadata: dict = field(default_factory=dict)

    @property
    def evacuation_time(self) -> float | None:
        return None if self.evacuation_step is None else self.evacuation_step * self.dt

    @property
    def step_count(self) -> int:
        return int(self.steps[-1])


def initial_state(g: WeightedGraph, rho0: np.ndarray, eik: EikonalOptions) -> SimState:
    """State at n = 0: the potential comes from the exact shortest-path solve.

    Warm starts only make sense from step one on, so the first potential is
    computed by the label-setting oracle at the current costs.
    """
    u0 = eikonal_oracle(g, rho0, eik.density_floor)
    return SimState(0, 0.0, np.asarray(rho0, dtype=float).copy(), u0, 0)


def step(g: WeightedGraph, state: SimState, params: StepParams, eik: EikonalOptions,
         dt: float, orientation: np.ndarray | None = None) -> tuple[SimState, np.ndarray]:
    """Advance one step; returns the new state and the per-exit arrivals.

    Order within the step: orient from the current potential, transport,
    diffuse (if eps > 0), apply the boundary mode, then re-solve the
    potential warm-started from the previous one.
    """
    delta = orientation if orientation is not None else orientation_from_potential(g, state.u)
    moved = advect(g, state.rho, params, delta)
    if params.eps > 0.0:
        moved = diffuse(g, moved, params, delta)
    if params.bc is BoundaryMode.DIRICHLET:
        arrivals = moved[g.boundary].copy()
        moved[g.boundary] = 0.0
    else:
        arrivals = moved[g.boundary] - state.rho[g.boundary]
    solve = value_iteration(
        g, moved,
        EikonalOptions(
            tolerance=eik.tolerance,
            max_iterations=eik.max_iterations,
            warm_start=state.u,
            density_floor=eik.density_floor,
        ),
    )
    new_state = SimState(state.n + 1, (state.n + 1) * dt, moved, solve.u, solve.iterations)
    return new_state, arrivals


def run(scenario) -> Trajectory:
    """Run a scenario to its stop rule and collect the full trajectory.

    Accepts a ScenarioConfig (anything with a ``prepare()``) or an already
    prepared scenario.  Stop precedence: error > t_end > evacuation > steady
    state.  Identical scenarios produce bit-identical trajectories.
    """
    prepared = scenario.prepare() if hasattr(scenario, "prepare") else scenario
    g: WeightedGraph = prepared.graph
    params: StepParams = prepared.step_params
    eik: EikonalOptions = prepared.eikonal_options
    stop: StopRules = prepared.stop
    dt = prepared.dt
    stride = max(1, int(prepared.snapshot_stride))

    rho = np.asarray(prepared.rho0, dtype=float).copy()
    initial_arrivals = np.zeros(g.boundary.size)
    if params.bc is BoundaryMode.DIRICHLET and np.any(rho[g.boundary] != 0.0):
        initial_arrivals = rho[g.boundary].copy()
        rho[g.boundary] = 0.0

    state = initial_state(g, rho, eik)
    frozen = None
    if getattr(prepared, "orientation_mode", "live") == "frozen":
        frozen = orientation_from_potential(g, state.u)

    initial_mass = float(state.rho.sum())
    evac_thr = stop.evacuation_threshold
    if evac_thr is None:
        evac_thr = 1e-6 * initial_mass
    steady_thr = stop.steady_state_threshold
    if steady_thr is None:
        steady_thr = 1e-8 * g.vertex_count

    max_steps = int(np.ceil(prepared.t_end / dt)) + 1

    totals, interiors, exits, maxima, l1s, iters = [], [], [], [], [], []
    outflow_rows = [initial_arrivals]
    snapshots = [state]
    evacuation_step: int | None = None
    steady_state_step: int | None = None
    stop_rule = "t_end"
    max_residual = 0.0
    log_every = max(1, max_steps // 20)

    def record(s: SimState, l1: float) -> None:
        totals.append(float(s.rho.sum()))
        interiors.append(float(s.rho[g.interior].sum()))
        exits.append(float(s.rho[g.boundary].sum()))
        maxima.append(float(s.rho.max()))
        l1s.append(l1)
        iters.append(s.eikonal_iterations)

    record(state, 0.0)
    max_residual = check_eikonal_residual(g, state.rho, state.u, eik.density_floor)

    while True:
        if evacuation_step is None and interiors[-1] <= evac_thr:
            evacuation_step = state.n
        if steady_state_step is None and state.n >= 1 and l1s[-1] < steady_thr:
            steady_state_step = state.n - 1
        if state.t >= prepared.t_end - 1e-12:
            stop_rule = "t_end"
            break
        if stop.on_evacuation and evacuation_step is not None:
            stop_rule = "evacuation"
            break
        if stop.on_steady_state and steady_state_step is not None:
            stop_rule = "steady_state"
            break

        new_state, arrivals = step(g, state, params, eik, dt, orientation=frozen)
        l1 = float(np.abs(new_state.rho - state.rho).sum())
        state = new_state
        record(state, l1)
        outflow_rows.append(arrivals)
        residual = check_eikonal_residual(g, state.rho, state.u, eik.density_floor)
        max_residual = max(max_residual, residual)
        if state.n % stride == 0:
            snapshots.append(state)
        if state.n % log_every == 0:
            logger.info("step %d / t = %.4f: interior mass %.6g", state.n, state.t, interiors[-1])

    if snapshots[-1].n != state.n:
        snapshots.append(state)

    l1_arr = np.asarray(l1s)
    if l1_arr.size > 1:
        reference = l1_arr[1]
        tv_violations = np.flatnonzero(l1_arr[1:] > reference + TV_REPORT_BAND) + 1
    else:
        tv_violations = np.zeros(0, dtype=np.int64)
    if tv_violations.size:
        logger.warning(
            "time-increment bound exceeded at %d step(s), first at step %d",
            tv_violations.size, int(tv_violations[0]),
        )

    n_steps = len(totals)
    return Trajectory(
        dt=dt,
        steps=np.arange(n_steps, dtype=np.int64),
        times=np.arange(n_steps, dtype=float) * dt,
        total_mass=np.asarray(totals),
        interior_mass=np.asarray(interiors),
        exit_mass=np.asarray(exits),
        max_density=np.asarray(maxima),
        l1_increment=l1_arr,
        eikonal_iterations=np.asarray(iters, dtype=np.int64),
        exit_outflow=np.vstack(outflow_rows),
        boundary=g.boundary.copy(),
        snapshots=snapshots,
        stop_rule=stop_rule,
        evacuation_step=evacuation_step,
        steady_state_step=steady_state_step,
        tv_violation_steps=tv_violations,
        max_residual=float(max_residual),
        initial_mass=initial_mass,
        evacuation_threshold=float(evac_thr),
        steady_state_threshold=float(steady_thr),
        metadata={"name": getattr(prepared, "name", None)},
    )


def detect_steady_state(traj: Trajectory, threshold: float) -> int | None:
    """First step n with sum |rho^(n+1) - rho^n| below threshold, else None."""
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    hits = np.flatnonzero(traj.l1_increment[1:] < threshold)
    return int(hits[0]) if hits.size else None
