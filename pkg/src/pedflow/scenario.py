"""Scenario files: parsing, validation, and assembly into runnable pieces.

A scenario is one YAML document.  Field names are load-bearing and documented
in the README; unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .eikonal import DEFAULT_DENSITY_FLOOR, DEFAULT_TOLERANCE, EikonalOptions
from .errors import ParseError, ScenarioInvalid
from .fluxes import SCHEME_NAMES, flux_scheme
from .graph import WeightedGraph
from .network import DensityExpr, NetworkSpec, discretize, sample_density, stadium_network, validate_stability
from .simulation import StopRules
from .transport import BoundaryMode, StepParams

_TOP_KEYS = {
    "name", "network", "initial_density", "scheme", "bc", "dt", "t_end",
    "epsilon", "diffusion_mode", "eikonal", "stop", "orientation",
    "snapshot_stride", "output_dir",
}
_NETWORK_KEYS = {"nodes", "edges", "targets", "dx", "generator", "params"}
_EIKONAL_KEYS = {"tolerance", "max_iterations", "density_floor"}
_STOP_KEYS = {"on_evacuation", "on_steady_state", "evacuation_threshold", "steady_state_threshold"}
_DENSITY_KEYS = {"expression", "values"}


@dataclass
class PreparedScenario:
    """Everything run() needs, assembled and validated."""

    name: str
    graph: WeightedGraph
    coords: np.ndarray
    rho0: np.ndarray
    step_params: StepParams
    eikonal_options: EikonalOptions
    dt: float
    t_end: float
    snapshot_stride: int
    stop: StopRules
    orientation_mode: str
    output_dir: str
    config_echo: dict = field(default_factory=dict)


@dataclass
class ScenarioConfig:
    """Parsed scenario, still symbolic (network not yet discretized)."""

    name: str
    network: NetworkSpec
    initial_density: DensityExpr | list[float]
    scheme_name: str
    bc: BoundaryMode
    dt: float
    t_end: float
    epsilon: float = 0.0
    diffusion_mode: str = "unsigned"
    eikonal_tolerance: float = DEFAULT_TOLERANCE
    eikonal_max_iterations: int | None = None
    density_floor: float = DEFAULT_DENSITY_FLOOR
    stop: StopRules = field(default_factory=StopRules)
    orientation_mode: str = "live"
    snapshot_stride: int = 50
    output_dir: str | None = None
    config_echo: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scheme_name not in SCHEME_NAMES:
            raise ScenarioInvalid(f"unknown scheme {self.scheme_name!r}; expected one of {SCHEME_NAMES}")
        if not self.dt > 0.0 or not self.t_end > 0.0:
            raise ScenarioInvalid("dt and t_end must be positive")
        if self.epsilon < 0.0:
            raise ScenarioInvalid("epsilon must be nonnegative")
        if self.orientation_mode not in ("live", "frozen"):
            raise ScenarioInvalid("orientation must be 'live' or 'frozen'")
        if self.diffusion_mode not in ("unsigned", "oriented"):
            raise ScenarioInvalid("diffusion_mode must be 'unsigned' or 'oriented'")
        if self.snapshot_stride < 1:
            raise ScenarioInvalid("snapshot_stride must be at least 1")

    def prepare(self) -> PreparedScenario:
        """Discretize, sample the initial density, and check stability."""
        graph, coords = discretize(self.network)
        rho0 = sample_density(self.initial_density, coords)
        lam, lam_d = validate_stability(self.network.dx, self.dt, graph.max_degree, self.epsilon)
        scheme = flux_scheme(self.scheme_name, lam)
        params = StepParams(
            lam=lam,
            scheme=scheme,
            bc=self.bc,
            eps=self.epsilon,
            lam_d=lam_d,
            diffusion_mode=self.diffusion_mode,
        )
        eik = EikonalOptions(
            tolerance=self.eikonal_tolerance,
            max_iterations=self.eikonal_max_iterations,
            density_floor=self.density_floor,
        )
        return PreparedScenario(
            name=self.name,
            graph=graph,
            coords=coords,
            rho0=rho0,
            step_params=params,
            eikonal_options=eik,
            dt=self.dt,
            t_end=self.t_end,
            snapshot_stride=self.snapshot_stride,
            stop=self.stop,
            orientation_mode=self.orientation_mode,
            output_dir=self.output_dir or os.path.join("out", self.name),
            config_echo=self.config_echo,
        )


def _require_mapping(obj, what) -> dict:
    if not isinstance(obj, dict):
        raise ScenarioInvalid(f"{what} must be a mapping")
    return obj


def _reject_unknown(mapping: dict, allowed: set, what: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioInvalid(f"unknown key(s) in {what}: {sorted(unknown)}")


def _parse_network(section) -> NetworkSpec:
    data = _require_mapping(section, "network")
    _reject_unknown(data, _NETWORK_KEYS, "network")
    if "dx" not in data:
        raise ScenarioInvalid("network.dx is required")
    dx = float(data["dx"])
    if "generator" in data:
        if data["generator"] != "stadium":
            raise ScenarioInvalid(f"unknown network generator {data['generator']!r}")
        params = _require_mapping(data.get("params", {}), "network.params")
        return stadium_network(dx=dx, **{k: v for k, v in params.items()})
    for key in ("nodes", "edges", "targets"):
        if key not in data:
            raise ScenarioInvalid(f"network.{key} is required for an explicit network")
    nodes = []
    for entry in data["nodes"]:
        entry = _require_mapping(entry, "network.nodes entry")
        _reject_unknown(entry, {"id", "x", "y"}, "network node")
        nodes.append((str(entry["id"]), float(entry["x"]), float(entry["y"])))
    edges = []
    for entry in data["edges"]:
        entry = _require_mapping(entry, "network.edges entry")
        _reject_unknown(entry, {"a", "b", "length"}, "network edge")
        length = entry.get("length")
        edges.append((str(entry["a"]), str(entry["b"]), None if length is None else float(length)))
    targets = [str(t) for t in data["targets"]]
    return NetworkSpec(nodes=nodes, edges=edges, targets=targets, dx=dx)


def _parse_density(section):
    data = _require_mapping(section, "initial_density")
    _reject_unknown(data, _DENSITY_KEYS, "initial_density")
    has_expr = "expression" in data
    has_values = "values" in data
    if has_expr == has_values:
        raise ScenarioInvalid("initial_density needs exactly one of 'expression' or 'values'")
    if has_expr:
        return DensityExpr(str(data["expression"]))
    return [float(v) for v in data["values"]]


def scenario_from_dict(data: dict, name_fallback: str = "scenario") -> ScenarioConfig:
    data = _require_mapping(data, "scenario")
    _reject_unknown(data, _TOP_KEYS, "scenario")
    for key in ("network", "initial_density", "scheme", "bc", "dt", "t_end"):
        if key not in data:
            raise ScenarioInvalid(f"scenario key {key!r} is required")

    bc_name = str(data["bc"])
    try:
        bc = BoundaryMode(bc_name)
    except ValueError:
        raise ScenarioInvalid(
            f"bc must be 'no-flux' or 'dirichlet', got {bc_name!r}"
        ) from None

    eik = _require_mapping(data.get("eikonal", {}), "eikonal")
    _reject_unknown(eik, _EIKONAL_KEYS, "eikonal")
    stop_data = _require_mapping(data.get("stop", {}), "stop")
    _reject_unknown(stop_data, _STOP_KEYS, "stop")
    stop = StopRules(
        on_evacuation=bool(stop_data.get("on_evacuation", True)),
        on_steady_state=bool(stop_data.get("on_steady_state", True)),
        evacuation_threshold=(
            None if stop_data.get("evacuation_threshold") is None
            else float(stop_data["evacuation_threshold"])
        ),
        steady_state_threshold=(
            None if stop_data.get("steady_state_threshold") is None
            else float(stop_data["steady_state_threshold"])
        ),
    )

    max_iter = eik.get("max_iterations")
    return ScenarioConfig(
        name=str(data.get("name", name_fallback)),
        network=_parse_network(data["network"]),
        initial_density=_parse_density(data["initial_density"]),
        scheme_name=str(data["scheme"]),
        bc=bc,
        dt=float(data["dt"]),
        t_end=float(data["t_end"]),
        epsilon=float(data.get("epsilon", 0.0)),
        diffusion_mode=str(data.get("diffusion_mode", "unsigned")),
        eikonal_tolerance=float(eik.get("tolerance", DEFAULT_TOLERANCE)),
        eikonal_max_iterations=None if max_iter is None else int(max_iter),
        density_floor=float(eik.get("density_floor", DEFAULT_DENSITY_FLOOR)),
        stop=stop,
        orientation_mode=str(data.get("orientation", "live")),
        snapshot_stride=int(data.get("snapshot_stride", 50)),
        output_dir=data.get("output_dir"),
        config_echo=data,
    )


def load_scenario(path) -> ScenarioConfig:
    """Parse a scenario file; ParseError for bad YAML, ScenarioInvalid for bad content."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        raise ParseError(f"{path} is empty")
    return scenario_from_dict(data, name_fallback=path.stem)
