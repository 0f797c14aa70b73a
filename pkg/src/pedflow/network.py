"""Geometric network descriptions and their discretization into graphs."""

from __future__ import annotations

import ast
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CflViolation,
    DegenerateEdge,
    DensityOutOfRange,
    DiffusionCflViolation,
    ParseError,
    ScenarioInvalid,
)
from .fluxes import MNORM
from .graph import WeightedGraph, build_graph

logger = logging.getLogger(__name__)


@dataclass
class NetworkSpec:
    """Planar network: named nodes with coordinates, edges with lengths.

    Edge lengths default to the Euclidean distance between node coordinates;
    edges are straight segments.  ``targets`` are the exit nodes.  ``dx`` is
    the uniform discretization step and may not exceed the shortest edge.
    """

    nodes: list[tuple[str, float, float]]
    edges: list[tuple[str, str, float | None]]
    targets: list[str]
    dx: float

    def __post_init__(self):
        if not self.nodes:
            raise ScenarioInvalid("network has no nodes")
        ids = [n[0] for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ScenarioInvalid("duplicate node id in network")
        if not self.targets:
            raise ScenarioInvalid("network has no target nodes")
        known = set(ids)
        for t in self.targets:
            if t not in known:
                raise ScenarioInvalid(f"target {t!r} is not a network node")
        if not self.dx > 0.0:
            raise ScenarioInvalid("dx must be positive")

    def edge_length(self, a: str, b: str, given: float | None) -> float:
        if given is not None:
            if not given > 0.0:
                raise ScenarioInvalid(f"edge ({a}, {b}) has non-positive length {given}")
            return float(given)
        coord = {n[0]: (n[1], n[2]) for n in self.nodes}
        ax, ay = coord[a]
        bx, by = coord[b]
        length = math.hypot(bx - ax, by - ay)
        if not length > 0.0:
            raise ScenarioInvalid(f"edge ({a}, {b}) connects coincident nodes")
        return length


def discretize(spec: NetworkSpec) -> tuple[WeightedGraph, np.ndarray]:
    """Subdivide every edge uniformly and assemble the simulation graph.

    An edge of length l becomes k = round(l / dx) >= 1 segments of equal
    weight l / k, so the weights along the edge sum back to l and geodesics
    stay faithful to the network.  Shared nodes map to single vertices; the
    boundary is the set of vertices at target node positions.  Returns the
    graph and the (n, 2) array of vertex coordinates.
    """
    lengths = [spec.edge_length(a, b, l) for a, b, l in spec.edges]
    if lengths and spec.dx > min(lengths):
        raise ScenarioInvalid(
            f"dx = {spec.dx:g} exceeds the shortest edge length {min(lengths):g}"
        )

    index = {node_id: i for i, (node_id, _, _) in enumerate(spec.nodes)}
    coords = [(x, y) for _, x, y in spec.nodes]
    edges: list[tuple[int, int, float]] = []

    for (a, b, _), length in zip(spec.edges, lengths):
        k = round(length / spec.dx)
        if k == 0:
            raise DegenerateEdge(f"edge ({a}, {b}) of length {length:g} yields 0 segments")
        w = length / k
        ax, ay = coords[index[a]]
        bx, by = coords[index[b]]
        chain = [index[a]]
        for j in range(1, k):
            t = j / k
            coords.append((ax + t * (bx - ax), ay + t * (by - ay)))
            chain.append(len(coords) - 1)
        chain.append(index[b])
        for p, q in zip(chain[:-1], chain[1:]):
            edges.append((p, q, w))

    boundary = [index[t] for t in spec.targets]
    graph = build_graph(len(coords), edges, boundary)
    return graph, np.asarray(coords, dtype=float)


_ALLOWED_NAMES = {"x1", "x2", "x", "y"}


class DensityExpr:
    """A closed-form initial density over the plane coordinates (x1, x2).

    The grammar is deliberately tiny for determinism and safety: numeric
    constants, +, -, *, integer powers, and max(...).  ``x`` and ``y`` are
    aliases for ``x1`` and ``x2``.
    """

    def __init__(self, source: str):
        self.source = source
        try:
            tree = ast.parse(source, mode="eval")
        except SyntaxError as exc:
            raise ParseError(f"bad density expression: {exc}") from exc
        _validate_expr(tree.body)
        self._tree = tree.body

    def __call__(self, x1, x2):
        env = {
            "x1": np.asarray(x1, dtype=float),
            "x2": np.asarray(x2, dtype=float),
        }
        env["x"] = env["x1"]
        env["y"] = env["x2"]
        return _eval_expr(self._tree, env)

    def __repr__(self):
        return f"DensityExpr({self.source!r})"


def _validate_expr(node: ast.expr) -> None:
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ParseError("only numeric constants are allowed")
        return
    if isinstance(node, ast.Name):
        if node.id not in _ALLOWED_NAMES:
            raise ParseError(f"unknown name {node.id!r}; use x1, x2 (or x, y)")
        return
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _validate_expr(node.operand)
        return
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Pow)):
        if isinstance(node.op, ast.Pow):
            exp = node.right
            if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int)
                    and not isinstance(exp.value, bool) and exp.value >= 0):
                raise ParseError("exponents must be literal nonnegative integers")
            _validate_expr(node.left)
            return
        _validate_expr(node.left)
        _validate_expr(node.right)
        return
    if isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id == "max") or node.keywords:
            raise ParseError("the only allowed function is max(...)")
        if not node.args:
            raise ParseError("max() needs at least one argument")
        for arg in node.args:
            _validate_expr(arg)
        return
    raise ParseError(f"unsupported syntax in density expression: {ast.dump(node)}")


def _eval_expr(node: ast.expr, env: dict):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.UnaryOp):
        value = _eval_expr(node.operand, env)
        return -value if isinstance(node.op, ast.USub) else +value
    if isinstance(node, ast.BinOp):
        left = _eval_expr(node.left, env)
        if isinstance(node.op, ast.Pow):
            return left ** int(node.right.value)
        right = _eval_expr(node.right, env)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        return left * right
    # validated Call: max(...)
    args = [_eval_expr(a, env) for a in node.args]
    out = args[0]
    for a in args[1:]:
        out = np.maximum(out, a)
    return out


def sample_density(expr, coords: np.ndarray) -> np.ndarray:
    """Evaluate an expression (or take an explicit list) at every vertex.

    Rejects any value outside [0, 1), naming the offending vertex; the
    conservation law needs strictly subcritical initial data.
    """
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    if isinstance(expr, DensityExpr):
        values = np.broadcast_to(np.asarray(expr(coords[:, 0], coords[:, 1]), dtype=float), (n,)).copy()
    else:
        values = np.asarray(list(expr), dtype=float)
        if values.shape != (n,):
            raise ScenarioInvalid(
                f"explicit density lists {values.shape[0]} values for {n} vertices"
            )
    if values.size:
        worst = int(np.argmin(values))
        if values[worst] < 0.0:
            raise DensityOutOfRange(
                f"initial density {values[worst]!r} < 0 at vertex {worst} "
                f"(coords {tuple(coords[worst])})"
            )
        worst = int(np.argmax(values))
        if values[worst] >= 1.0:
            raise DensityOutOfRange(
                f"initial density {values[worst]!r} >= 1 at vertex {worst} "
                f"(coords {tuple(coords[worst])})"
            )
    return values


def validate_stability(dx: float, dt: float, max_deg: int, eps: float = 0.0) -> tuple[float, float]:
    """Check the step ratios against both stability bounds.

    Returns (lam, lam_d) = (dt/dx, dt/dx^2).  Transport needs
    lam * D * ||m|| <= 1; with diffusion additionally eps * lam_d * D <= 1/2.
    Equality is accepted but logged, since the strict bounds are what keep
    the density strictly below 1.
    """
    if not dx > 0.0 or not dt > 0.0:
        raise ScenarioInvalid("dx and dt must be positive")
    lam = dt / dx
    lam_d = dt / (dx * dx)
    transport = lam * max_deg * MNORM
    if transport > 1.0:
        max_dt = dx / (max_deg * MNORM) if max_deg else math.inf
        raise CflViolation(
            f"lam * D * ||m|| = {transport:g} > 1; largest admissible dt is {max_dt:g}",
            max_dt=max_dt,
        )
    if transport == 1.0:
        logger.warning(
            "lam * D * ||m|| = 1 exactly; accepted, but the strict density "
            "bound rho < 1 needs strict inequality"
        )
    if eps > 0.0:
        diffusion = eps * lam_d * max_deg
        if diffusion > 0.5:
            max_dt = dx * dx / (2.0 * eps * max_deg) if max_deg else math.inf
            raise DiffusionCflViolation(
                f"eps * lam_d * D = {diffusion:g} > 1/2; largest admissible dt is {max_dt:g}",
                max_dt=max_dt,
            )
    return lam, lam_d


def star_network(dx: float = 0.01) -> NetworkSpec:
    """The five-node, four-edge star fixture: one degree-4 junction, two exits.

    Node coordinates reconstruct the demo geometry from its figure captions
    and are a reconstruction, not measured ground truth.
    """
    return NetworkSpec(
        nodes=[
            ("west", -1.0, 0.0),
            ("north", 0.2, 0.8),
            ("junction", 0.2, 0.0),
            ("south", 0.2, -0.8),
            ("east", 0.8, 0.0),
        ],
        edges=[
            ("west", "junction", None),
            ("north", "junction", None),
            ("south", "junction", None),
            ("east", "junction", None),
        ],
        targets=["south", "east"],
        dx=dx,
    )


def stadium_network(dx: float = 0.01, rings: int = 6, spokes: int = 32,
                    exits: int = 9, inner_radius: float = 0.4,
                    ring_spacing: float = 0.2, exit_stub: float = 0.25) -> NetworkSpec:
    """Synthetic stadium-like arena: concentric rings, radial spokes, exit stubs.

    Rings sit at inner_radius + k * ring_spacing; every ring/spoke crossing is
    a node, consecutive crossings are joined along rings and spokes, and
    ``exits`` stub edges lead outward from the outer ring to the target
    nodes.  Defaults produce roughly 7e3 vertices at dx = 0.01.
    """
    if rings < 1 or spokes < 3 or exits < 1 or exits > spokes:
        raise ScenarioInvalid("stadium generator needs rings >= 1, spokes >= 3, 1 <= exits <= spokes")
    nodes: list[tuple[str, float, float]] = []
    edges: list[tuple[str, str, float | None]] = []
    radii = [inner_radius + k * ring_spacing for k in range(rings)]

    def ring_node(k: int, j: int) -> str:
        return f"r{k}s{j}"

    for k, r in enumerate(radii):
        for j in range(spokes):
            a = 2.0 * math.pi * j / spokes
            nodes.append((ring_node(k, j), r * math.cos(a), r * math.sin(a)))
    for k in range(rings):
        for j in range(spokes):
            edges.append((ring_node(k, j), ring_node(k, (j + 1) % spokes), None))
    for k in range(rings - 1):
        for j in range(spokes):
            edges.append((ring_node(k, j), ring_node(k + 1, j), None))

    targets = []
    outer = rings - 1
    exit_radius = radii[-1] + exit_stub
    for e in range(exits):
        j = (e * spokes) // exits
        a = 2.0 * math.pi * j / spokes
        name = f"exit{e}"
        nodes.append((name, exit_radius * math.cos(a), exit_radius * math.sin(a)))
        edges.append((ring_node(outer, j), name, None))
        targets.append(name)

    return NetworkSpec(nodes=nodes, edges=edges, targets=targets, dx=dx)
