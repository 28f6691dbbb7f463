"""Minimal cuts, greedy geodesics and entanglement bounds on layered networks.

Capacities are qubit counts, so every cut value below is in bits for a
network of perfect tensors.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import DimensionMismatchError, HoloError
from .hyperbolic_network import BOUNDARY, CONTRACTED, BoundaryState, LayeredNetwork


@dataclass(frozen=True)
class Region:
    legs: tuple[int, ...]

    @classmethod
    def parse(cls, text: str) -> "Region":
        text = text.strip()
        return cls(tuple(int(t) for t in text.split(",")) if text else ())


@dataclass(frozen=True)
class CutResult:
    legs: tuple[int, ...]            # severed legs, sorted
    capacity: int
    region_side: frozenset[int]      # tensors on the region's side
    other_side: frozenset[int]


@dataclass(frozen=True)
class GreedyResult:
    cut_a: tuple[int, ...]
    cut_complement: tuple[int, ...]
    overlap: tuple[int, ...]
    overlap_capacity: int
    absorbed_a: frozenset[int]
    absorbed_complement: frozenset[int]
    converged: bool


@dataclass(frozen=True)
class MIBudget:
    upper_bits: float
    gamma_v: int
    gamma_w: int
    overlap: int
    c1_bits_per_n: float


def _region_legs(net: LayeredNetwork, region) -> tuple[int, ...]:
    legs = region.legs if isinstance(region, Region) else tuple(region)
    bset = set(net.boundary_legs)
    for l in legs:
        if l not in bset:
            raise HoloError(f"leg {l} is not a boundary leg")
    if len(set(legs)) != len(legs):
        raise HoloError("region lists a leg twice")
    return tuple(sorted(legs))


class FlowGraph:
    """Reusable max-flow structure: tensors, one terminal per boundary (and bulk) leg."""

    def __init__(self, net: LayeredNetwork, include_bulk: bool = False):
        self.net = net
        self.include_bulk = include_bulk
        N = len(net.tensors)
        self.terminal = {}
        for lid in net.boundary_legs:
            self.terminal[lid] = N + len(self.terminal)
        if include_bulk:
            for lid in net.bulk_legs:
                self.terminal[lid] = N + len(self.terminal)
        self.N = N
        self.S = N + len(self.terminal)
        self.T = self.S + 1
        rows, cols, caps = [], [], []
        for leg in net.legs:
            if leg.kind == CONTRACTED:
                u, v = leg.a[0], leg.b[0]
            elif leg.id in self.terminal:
                u, v = leg.a[0], self.terminal[leg.id]
            else:
                continue
            rows += [u, v]
            cols += [v, u]
            caps += [leg.qubits, leg.qubits]
        self._base = (rows, cols, caps)
        self.total = sum(l.qubits for l in net.legs) + 1

    def solve(self, region_legs: Iterable[int]) -> tuple[int, np.ndarray, np.ndarray]:
        """Flow value and the minimal / maximal source-side masks over all nodes."""
        region = set(region_legs)
        rows, cols, caps = (list(x) for x in self._base)
        big = self.total
        for lid, node in self.terminal.items():
            if lid in region:
                rows.append(self.S), cols.append(node), caps.append(big)
            else:
                rows.append(node), cols.append(self.T), caps.append(big)
        size = self.T + 1
        M = csr_matrix((np.asarray(caps, dtype=np.int32), (rows, cols)), shape=(size, size))
        M.sum_duplicates()
        res = maximum_flow(M, self.S, self.T)
        F = res.flow if hasattr(res, "flow") else res.residual
        resid = (M - F).tocsr()
        resid.data = np.maximum(resid.data, 0)
        resid.eliminate_zeros()
        return int(res.flow_value), _reach(resid, self.S), ~_reach(resid.T.tocsr(), self.T)


def _reach(A, start: int) -> np.ndarray:
    seen = np.zeros(A.shape[0], dtype=bool)
    seen[start] = True
    dq = deque([start])
    indptr, indices = A.indptr, A.indices
    while dq:
        u = dq.popleft()
        for v in indices[indptr[u]:indptr[u + 1]]:
            if not seen[v]:
                seen[v] = True
                dq.append(v)
    return seen


def _severed(net: LayeredNetwork, inside: set[int], region: set[int], include_bulk: bool) -> tuple[int, ...]:
    out = []
    for leg in net.legs:
        if leg.kind == CONTRACTED:
            if (leg.a[0] in inside) != (leg.b[0] in inside):
                out.append(leg.id)
        elif leg.kind == BOUNDARY:
            if (leg.a[0] in inside) != (leg.id in region):
                out.append(leg.id)
        elif include_bulk and leg.a[0] in inside:
            out.append(leg.id)
    return tuple(out)


def min_cut(net: LayeredNetwork, region, include_bulk: bool = False, side: str = "min",
            graph: FlowGraph | None = None) -> CutResult:
    """Minimum-capacity leg cut separating `region` from the other boundary legs.

    With include_bulk the bulk legs may be cut too (they sit on the complement's
    side). `side` selects the min cut closest to ("min") or farthest from ("max")
    the region.
    """
    legs = _region_legs(net, region)
    g = graph or FlowGraph(net, include_bulk)
    value, smin, smax = g.solve(legs)
    mask = smin if side == "min" else smax
    inside = {t for t in range(g.N) if mask[t]}
    severed = _severed(net, inside, set(legs), g.include_bulk)
    cap = sum(net.legs[l].qubits for l in severed)
    if cap != value:
        raise HoloError(f"cut capacity {cap} disagrees with flow value {value}")
    return CutResult(severed, cap, frozenset(inside), frozenset(range(g.N)) - frozenset(inside))


def _tensor_distance(net: LayeredNetwork, seeds: set[int]) -> list[float]:
    dist = [math.inf] * len(net.tensors)
    dq = deque()
    for s in sorted(seeds):
        dist[s] = 0
        dq.append(s)
    nbrs = _neighbours(net)
    while dq:
        u = dq.popleft()
        for v in nbrs[u]:
            if dist[v] == math.inf:
                dist[v] = dist[u] + 1
                dq.append(v)
    return dist


def _neighbours(net: LayeredNetwork) -> list[list[int]]:
    out = [[] for _ in net.tensors]
    for lid in net.contracted_legs:
        leg = net.legs[lid]
        out[leg.a[0]].append(leg.b[0])
        out[leg.b[0]].append(leg.a[0])
    return out


def _greedy_from(net: LayeredNetwork, region: set[int]) -> tuple[set[int], tuple[int, ...], bool]:
    """Absorb tensors whose legs are at least half in the current cut."""
    seeds = {net.legs[l].a[0] for l in region}
    dist = _tensor_distance(net, seeds)
    order = sorted(range(len(net.tensors)), key=lambda t: (dist[t], t))
    inside: set[int] = set()

    def crossing(t: int) -> int:
        c = 0
        for lid in net.tensors[t].legs:
            leg = net.legs[lid]
            if leg.kind == BOUNDARY:
                c += leg.id in region
            elif leg.kind == CONTRACTED:
                other = leg.b[0] if leg.a[0] == t else leg.a[0]
                c += other in inside
        return c

    changed = True
    rounds = 0
    limit = len(net.tensors) + 1
    while changed and rounds < limit:
        changed = False
        rounds += 1
        for t in order:
            if t in inside or dist[t] == math.inf:
                continue
            if 2 * crossing(t) >= len(net.tensors[t].legs):
                inside.add(t)
                changed = True
                break
    return inside, _severed(net, inside, region, False), not changed


def greedy_geodesic(net: LayeredNetwork, region) -> GreedyResult:
    """Greedy cuts grown from the region and from its complement, and their overlap."""
    legs = set(_region_legs(net, region))
    comp = set(net.boundary_legs) - legs
    in_a, cut_a, ok_a = _greedy_from(net, legs)
    in_c, cut_c, ok_c = _greedy_from(net, comp)
    overlap = tuple(sorted(set(cut_a) & set(cut_c)))
    cap = sum(net.legs[l].qubits for l in overlap)
    return GreedyResult(tuple(sorted(cut_a)), tuple(sorted(cut_c)), overlap, cap,
                        frozenset(in_a), frozenset(in_c), ok_a and ok_c)


def entropy_bounds(net: LayeredNetwork, region) -> tuple[int, int]:
    """(greedy overlap, min cut): lower and upper bounds on the region's entropy in bits."""
    upper = min_cut(net, region).capacity
    lower = greedy_geodesic(net, region).overlap_capacity
    return lower, upper


def entropy_of_qubits(amplitudes: np.ndarray, qubits: Iterable[int], n_qubits: int | None = None) -> float:
    """Von Neumann entropy (bits) of the listed qubits of a pure state."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    nq = n_qubits if n_qubits is not None else int(round(math.log2(psi.size)))
    if 2 ** nq != psi.size:
        raise DimensionMismatchError("state length is not 2**qubits")
    A = sorted(set(qubits))
    if any(q < 0 or q >= nq for q in A):
        raise DimensionMismatchError("region exceeds the state's qubits")
    if not A or len(A) == nq:
        return 0.0
    rest = [q for q in range(nq) if q not in A]
    M = psi.reshape((2,) * nq).transpose(A + rest).reshape(2 ** len(A), -1)
    # pure state: both sides share a spectrum, so diagonalise the smaller one
    rho = M @ M.conj().T if M.shape[0] <= M.shape[1] else M.conj().T @ M
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-14]
    return float(-(w * np.log2(w)).sum())


def exact_region_entropy(state: BoundaryState, region) -> float:
    legs = region.legs if isinstance(region, Region) else tuple(region)
    return entropy_of_qubits(state.amplitudes, state.qubits_of(legs), state.qubits)


def mutual_info_budget(net: LayeredNetwork, region_v, region_w) -> MIBudget:
    """Upper bound |gamma_V| + |gamma_W| - |overlap(V u W)| on I(V:W), in bits."""
    v = set(_region_legs(net, region_v))
    w = set(_region_legs(net, region_w))
    if v & w:
        raise HoloError("regions V and W must be disjoint")
    g = FlowGraph(net)
    gv = min_cut(net, v, graph=g).capacity
    gw = min_cut(net, w, graph=g).capacity
    ov = greedy_geodesic(net, v | w).overlap_capacity
    m = max(net.legs[l].qubits for l in net.boundary_legs)
    return MIBudget(float(gv + gw - ov), gv, gw, ov, 2.0 * (gv + gw) / m)


def qpv_total_entanglement(R: int, n: int, gamma_v: int | None = None,
                           gamma_w: int | None = None) -> tuple[float, float]:
    """(per-round, two-round total) entanglement bound in bits; Gamma counts default to 2R bundles."""
    if R < 0 or n < 1:
        raise HoloError("need R >= 0 and n >= 1")
    gv = 2 * R if gamma_v is None else gamma_v
    gw = 2 * R if gamma_w is None else gamma_w
    per_round = float((gv + gw) * n)
    return per_round, 2 * per_round
