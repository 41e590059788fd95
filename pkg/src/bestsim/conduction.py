"""Wall conduction as per-unit-area RC networks.

Node 0 of every network is the exterior surface and the last node the
interior surface. Capacitances are J/m2K, conductances W/m2K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

TWO_NODE = "two_node"
DISCRETIZED = "discretized"
MODELS = (TWO_NODE, DISCRETIZED)


class SingularNetwork(ValueError):
    pass


class UnstableStep(ValueError):
    def __init__(self, dt_max: float):
        super().__init__(f"explicit step unstable, dt must not exceed {dt_max:.6g} s")
        self.dt_max = dt_max


@dataclass(frozen=True)
class Layer:
    thickness: float
    conductivity: float
    density: float = 0.0
    specific_heat: float = 0.0

    def __post_init__(self):
        if not self.thickness > 0 or not self.conductivity > 0:
            raise ValueError("layer thickness and conductivity must be positive")
        if self.density < 0 or self.specific_heat < 0:
            raise ValueError("layer density and specific heat must be non-negative")

    @property
    def resistance(self) -> float:
        return self.thickness / self.conductivity

    @property
    def capacitance(self) -> float:
        return self.density * self.specific_heat * self.thickness


@dataclass(frozen=True)
class Construction:
    layers: tuple[Layer, ...]
    exterior_solar_absorptance: float = 0.6
    interior_solar_absorptance: float = 0.6

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("a construction needs at least one layer")
        for a in (self.exterior_solar_absorptance, self.interior_solar_absorptance):
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"absorptance must lie in [0, 1], got {a}")

    @property
    def resistance(self) -> float:
        return math.fsum(layer.resistance for layer in self.layers)

    @property
    def capacitance(self) -> float:
        return math.fsum(layer.capacitance for layer in self.layers)

    @property
    def thickness(self) -> float:
        return math.fsum(layer.thickness for layer in self.layers)


@dataclass(frozen=True)
class RcNetwork:
    node_capacitances: tuple[float, ...]
    conductances: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "node_capacitances", tuple(float(c) for c in self.node_capacitances))
        object.__setattr__(self, "conductances",
                           tuple((int(a), int(b), float(g)) for a, b, g in self.conductances))
        n = len(self.node_capacitances)
        if n < 2:
            raise ValueError("a network needs at least two terminal nodes")
        if any(c < 0 for c in self.node_capacitances):
            raise ValueError("node capacitances must be non-negative")
        for a, b, g in self.conductances:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise ValueError(f"bad conductance endpoints ({a}, {b})")
            if not g > 0:
                raise ValueError("conductances must be positive")

    @property
    def n_nodes(self) -> int:
        return len(self.node_capacitances)

    @property
    def exterior_node(self) -> int:
        return 0

    @property
    def interior_node(self) -> int:
        return self.n_nodes - 1

    @property
    def total_capacitance(self) -> float:
        return math.fsum(self.node_capacitances)

    def laplacian(self) -> np.ndarray:
        """Conductance matrix K with (K @ T)_i = sum_j g_ij (T_i - T_j)."""
        k = np.zeros((self.n_nodes, self.n_nodes))
        for a, b, g in self.conductances:
            k[a, a] += g
            k[b, b] += g
            k[a, b] -= g
            k[b, a] -= g
        return k

    def is_connected(self) -> bool:
        adj: dict[int, set[int]] = {i: set() for i in range(self.n_nodes)}
        for a, b, _ in self.conductances:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            for j in adj[stack.pop()] - seen:
                seen.add(j)
                stack.append(j)
        return len(seen) == self.n_nodes

    def terminal_resistance(self) -> float:
        """Series resistance between the two surface terminals, m2K/W.

        Chains (every builder's output) reduce exactly to a sum of 1/g;
        other topologies fall back to a unit-difference steady solve.
        """
        chain = sorted(self.conductances, key=lambda e: min(e[0], e[1]))
        if len(chain) == self.n_nodes - 1 and all(
                {a, b} == {i, i + 1} for i, (a, b, _) in enumerate(chain)):
            return math.fsum(1.0 / g for _, _, g in chain)
        return 1.0 / steady_flux(self, 1.0, 0.0)


def two_node_network(c: Construction) -> RcNetwork:
    """Surface-lumped model: half the wall's capacitance on each surface."""
    half = c.capacitance / 2.0
    return RcNetwork((half, half), ((0, 1, 1.0 / c.resistance),))


def discretized_network(c: Construction) -> RcNetwork:
    """Layer-discretized model with 2n+1 nodes for n layers.

    Nodes alternate interface/centre: 0 is the exterior surface, 2i+1 the
    centre of layer i, 2n the interior surface. Each half layer is one
    conductance 2/r; a layer's capacitance goes 1/4, 1/2, 1/4 to its
    interface, centre and interface nodes.
    """
    n = len(c.layers)
    caps = [0.0] * (2 * n + 1)
    conductances = []
    for i, layer in enumerate(c.layers):
        left, mid, right = 2 * i, 2 * i + 1, 2 * i + 2
        cap = layer.capacitance
        caps[left] += cap / 4.0
        caps[mid] += cap / 2.0
        caps[right] += cap / 4.0
        g = 2.0 / layer.resistance
        conductances.append((left, mid, g))
        conductances.append((mid, right, g))
    return RcNetwork(tuple(caps), tuple(conductances))


def build_network(c: Construction, model: str) -> RcNetwork:
    if model == TWO_NODE:
        return two_node_network(c)
    if model == DISCRETIZED:
        return discretized_network(c)
    raise ValueError(f"unknown conduction model {model!r}; expected one of {MODELS}")


def steady_flux(net: RcNetwork, t_exterior: float, t_interior: float) -> float:
    """Steady heat flux from exterior to interior terminal, W/m2."""
    if not net.is_connected():
        raise SingularNetwork("network is not connected")
    k = net.laplacian()
    ext, inn = net.exterior_node, net.interior_node
    free = [i for i in range(net.n_nodes) if i not in (ext, inn)]
    temps = np.zeros(net.n_nodes)
    temps[ext] = t_exterior
    temps[inn] = t_interior
    if free:
        kff = k[np.ix_(free, free)]
        rhs = -k[np.ix_(free, [ext, inn])] @ np.array([t_exterior, t_interior])
        try:
            temps[free] = np.linalg.solve(kff, rhs)
        except np.linalg.LinAlgError:
            raise SingularNetwork("free-node conductance matrix is singular") from None
    return float(k[ext] @ temps)


def fine_grid_network(c: Construction, nodes: int) -> RcNetwork:
    """Uniform-grid network across the whole wall thickness.

    Conductance between neighbours integrates dx/k exactly across layer
    boundaries and each node's capacitance integrates rho*c_p over its
    control volume, so totals match the construction exactly.
    """
    if nodes < 2:
        raise ValueError("fine grid needs at least two nodes")
    edges = np.concatenate([[0.0], np.cumsum([layer.thickness for layer in c.layers])])
    length = edges[-1]
    x = np.linspace(0.0, length, nodes)

    def integrate(a: float, b: float, prop) -> float:
        total = 0.0
        for layer, lo, hi in zip(c.layers, edges[:-1], edges[1:]):
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0:
                total += overlap * prop(layer)
        return total

    conductances = []
    for i in range(nodes - 1):
        r = integrate(x[i], x[i + 1], lambda layer: 1.0 / layer.conductivity)
        conductances.append((i, i + 1, 1.0 / r))
    half = length / (nodes - 1) / 2.0
    caps = [integrate(max(xi - half, 0.0), min(xi + half, length),
                      lambda layer: layer.density * layer.specific_heat) for xi in x]
    return RcNetwork(tuple(caps), tuple(conductances))


Boundary = Callable[[float], tuple[float, float]]


def _initial_state(net: RcNetwork, boundary: Boundary, h_ext: float, h_int: float,
                   initial) -> np.ndarray:
    if initial is not None:
        return np.broadcast_to(np.asarray(initial, dtype=float), (net.n_nodes,)).copy()
    t_out, t_in = boundary(0.0)
    k = net.laplacian()
    k[0, 0] += h_ext
    k[-1, -1] += h_int
    rhs = np.zeros(net.n_nodes)
    rhs[0] += h_ext * t_out
    rhs[-1] += h_int * t_in
    return np.linalg.solve(k, rhs)


def wall_response(
    net: RcNetwork,
    boundary: Boundary,
    horizon: float,
    dt: float,
    h_ext: float = 25.0,
    h_int: float = 8.0,
    initial=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Implicit-Euler response of a wall between two film-coupled air temperatures.

    ``boundary(t)`` returns (exterior air, interior air) temperatures. The
    initial state defaults to the steady profile for ``boundary(0)``.
    Returns (times, interior-surface temperatures), times from dt to horizon.
    """
    steps = int(round(horizon / dt))
    k = net.laplacian()
    k[0, 0] += h_ext
    k[-1, -1] += h_int
    cap = np.array(net.node_capacitances) / dt
    lu = lu_factor(k + np.diag(cap))
    temps = _initial_state(net, boundary, h_ext, h_int, initial)
    times = dt * np.arange(1, steps + 1)
    out = np.empty(steps)
    rhs_b = np.zeros(net.n_nodes)
    for i, t in enumerate(times):
        t_out, t_in = boundary(t)
        rhs_b[0] = h_ext * t_out
        rhs_b[-1] = h_int * t_in
        temps = lu_solve(lu, cap * temps + rhs_b)
        out[i] = temps[-1]
    return times, out


def fine_grid_oracle(
    c: Construction,
    nodes: int,
    dt: float,
    boundary: Boundary,
    horizon: float,
    h_ext: float = 25.0,
    h_int: float = 8.0,
    initial=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Explicit finite-difference reference solution on a uniform grid.

    Same boundary treatment and return value as :func:`wall_response`.
    Massless layers are not supported (every node must carry capacitance).
    """
    if nodes < 11:
        raise ValueError("the oracle needs at least 11 nodes")
    net = fine_grid_network(c, nodes)
    caps = np.array(net.node_capacitances)
    k = net.laplacian()
    k[0, 0] += h_ext
    k[-1, -1] += h_int
    diag = np.diag(k)
    if np.any(caps <= 0):
        raise UnstableStep(0.0)
    dt_max = float(np.min(caps / diag))
    if dt > dt_max:
        raise UnstableStep(dt_max)

    steps = int(round(horizon / dt))
    temps = _initial_state(net, boundary, h_ext, h_int, initial)
    # tridiagonal update written out to keep the inner loop cheap
    g = np.array([gg for _, _, gg in net.conductances])
    inv_c = dt / caps
    times = dt * np.arange(1, steps + 1)
    out = np.empty(steps)
    flow = np.empty(nodes)
    for i, t in enumerate(times):
        t_out, t_in = boundary(t)
        q = g * (temps[:-1] - temps[1:])
        flow[:] = 0.0
        flow[:-1] -= q
        flow[1:] += q
        flow[0] += h_ext * (t_out - temps[0])
        flow[-1] += h_int * (t_in - temps[-1])
        temps = temps + inv_c * flow
        out[i] = temps[-1]
    return times, out


def step_boundary(t_before: Sequence[float], t_after: Sequence[float]) -> Boundary:
    """Boundary switching from one (exterior, interior) pair to another at t = 0+."""
    before = (float(t_before[0]), float(t_before[1]))
    after = (float(t_after[0]), float(t_after[1]))
    return lambda t: before if t <= 0 else after
