"""Time dilation across layers, Hamiltonian-norm schedules and velocity profiles.

All O(1) constants are set to 1, so times and velocities are in scaling units.
"""
from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .entropy_bounds import FlowGraph
from .errors import HoloError, InsufficientLayersError
from .hyperbolic_network import LayeredNetwork


@dataclass(frozen=True)
class DilationParams:
    tau: float
    R: int
    n: int = 1
    m: int = 1

    def __post_init__(self):
        if not self.tau > 1:
            raise HoloError("tau must exceed 1")
        if self.R < 0:
            raise HoloError("R must be >= 0")
        if self.n < 1 or self.m < 1:
            raise HoloError("n and m must be >= 1")


@dataclass(frozen=True)
class NormSchedule:
    norms: tuple[float, ...]      # ||h_x|| for x = 0..R

    def __post_init__(self):
        if not self.norms or any(not h > 0 for h in self.norms):
            raise HoloError("norms must be positive")

    @property
    def R(self) -> int:
        return len(self.norms) - 1


@dataclass(frozen=True)
class LRParams:
    k: int
    s: float
    mu: float

    def __post_init__(self):
        if self.k < 1 or self.s < 0:
            raise HoloError("need k >= 1 and s >= 0")
        if not self.mu > 0:
            raise HoloError("mu must be positive")


@dataclass(frozen=True)
class ConeRow:
    layer: int
    bulk_time: float
    cone_qubits: float
    velocity: float


@dataclass(frozen=True)
class ConeProfile:
    rows: tuple[ConeRow, ...]
    widths: tuple[float, ...]                 # mean cone width q(x), x = 0..R
    per_direction: tuple[tuple[int, ...], ...]

    @property
    def velocities(self) -> np.ndarray:
        return np.array([r.velocity for r in self.rows])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["layer", "bulk_time", "cone_qubits", "velocity"])
            for r in self.rows:
                w.writerow([r.layer, repr(float(r.bulk_time)), repr(float(r.cone_qubits)), repr(float(r.velocity))])


def layer_radius(x: int, tau: float, n: int) -> float:
    """Radial coordinate of layer x: x ln(tau) + ln(n)."""
    if x < 0 or not tau > 1 or n < 1:
        raise HoloError("need x >= 0, tau > 1, n >= 1")
    return x * math.log(tau) + math.log(n)


def dilation_factor(x: int, params: DilationParams, exact: bool = False) -> float:
    """dt_x / dt_R; the exact variant is cosh(rho_R)/cosh(rho_x)."""
    if not 0 <= x <= params.R:
        raise HoloError(f"layer {x} outside [0, {params.R}]")
    if not exact:
        return params.tau ** (params.R - x)
    top = params.n * params.tau ** params.R
    here = params.n * params.tau ** x
    return (top + 1 / top) / (here + 1 / here)


def norm_schedule(params: DilationParams) -> NormSchedule:
    return NormSchedule(tuple(params.tau ** (x - params.R) for x in range(params.R + 1)))


def uniform_schedule(R: int) -> NormSchedule:
    return NormSchedule((1.0,) * (R + 1))


def transit_times(params: DilationParams) -> tuple[float, float, float]:
    """Bulk crossing time T1, boundary circuit time T2 and their ratio."""
    tau, R = params.tau, params.R
    T1 = 2 * params.n * (tau ** (R + 1) - 1) / (tau - 1)
    T2 = params.m * tau ** R
    return T1, T2, T1 / T2


def lr_velocity(p: LRParams) -> float:
    return 2 * p.k * p.s / p.mu


def bulk_lr_profile(schedule: NormSchedule) -> tuple[float, ...]:
    return tuple(2 * h for h in schedule.norms)


def interaction_distance(supports: Iterable[Iterable[int]], X: Iterable[int], Y: Iterable[int]) -> float:
    """Fewest interaction terms linking a qubit of X to a qubit of Y (0 if they overlap)."""
    X, Y = set(X), set(Y)
    if X & Y:
        return 0
    adj: dict[int, set[int]] = {}
    for sup in supports:
        sup = list(sup)
        for a in sup:
            adj.setdefault(a, set()).update(b for b in sup if b != a)
    dist = {x: 0 for x in X}
    dq = deque(X)
    while dq:
        u = dq.popleft()
        for v in adj.get(u, ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                if v in Y:
                    return dist[v]
                dq.append(v)
    return math.inf


# ---------------------------------------------------------------- butterfly profile

def _angle_gap(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def _falling_path(net: LayeredNetwork, theta: float, R: int) -> list[int]:
    outer = [t for t in net.tensors if t.layer == R]
    seed = min(outer, key=lambda t: (_angle_gap(t.angle, theta), t.id))
    path = [seed.id]
    while net.tensors[path[-1]].parent is not None:
        path.append(net.tensors[path[-1]].parent)
    return path[::-1]                     # path[x] sits in layer x


def _cone_widths(net: LayeredNetwork, graph: FlowGraph, path: Sequence[int], centre: int) -> list[int]:
    """Smallest centred boundary arc (in legs) whose wedge holds path[x..R], per x."""
    B = len(net.boundary_legs)
    R = len(path) - 1
    memo: dict[int, np.ndarray] = {}

    def wedge(L: int) -> np.ndarray:
        if L not in memo:
            memo[L] = graph.solve(net.boundary_arc(centre - L // 2, L))[2]
        return memo[L]

    widths = [0] * (R + 1)
    lo = 1
    for x in range(R, -1, -1):
        need = path[x:]
        hi = B
        a = lo
        while a < hi:
            mid = (a + hi) // 2
            if all(wedge(mid)[t] for t in need):
                hi = mid
            else:
                a = mid + 1
        widths[x] = a
        lo = a
    return widths


def butterfly_profile(net: LayeredNetwork, schedule: NormSchedule, directions: int = 8,
                      n: int | None = None) -> ConeProfile:
    """Boundary cone growth while a perturbation falls from layer R to the centre.

    Per layer x the bulk crossing time is n / v_bulk(x) and the cone grows by the
    boundary qubits needed to extend the entanglement wedge from layer x+1 to x.
    Rows run x = R-1 .. 0 in time order. Widths are averaged over `directions`
    radial paths.
    """
    R = len(net.layer_counts) - 1
    if R < 1 or net.spec is None:
        raise InsufficientLayersError("butterfly profile needs a layered tessellation with R >= 1")
    if schedule.R != R:
        raise HoloError(f"schedule has {schedule.R + 1} layers, network {R + 1}")
    if n is None:
        n = net.spec.n if net.spec is not None else 1
    m = net.legs[net.boundary_legs[0]].qubits
    graph = FlowGraph(net)
    angles = np.array([net.legs[l].angle for l in net.boundary_legs])
    per_dir = []
    for j in range(directions):
        theta = 2 * math.pi * j / directions + 0.1
        path = _falling_path(net, theta, R)
        a = net.tensors[path[-1]].angle
        centre = int(np.argmin([_angle_gap(a, b) for b in angles]))
        per_dir.append(tuple(_cone_widths(net, graph, path, centre)))
    widths = np.mean(np.array(per_dir, dtype=float), axis=0) * m
    v_bulk = bulk_lr_profile(schedule)
    rows = []
    for x in range(R - 1, -1, -1):
        t_x = n / v_bulk[x]
        dq = widths[x] - widths[x + 1]
        rows.append(ConeRow(x, t_x, float(dq), float(dq / t_x)))
    return ConeProfile(tuple(rows), tuple(float(w) for w in widths), tuple(per_dir))
