"""Layered {p,q} tensor networks with perfect tensors.

Cells of the {p,q} tiling are generated as SU(1,1) Moebius maps of a central
polygon in the Poincare disk. Each cell holds one tensor with a bulk leg
(index 0) followed by its p edge legs in counter-clockwise order, starting
from the edge that faces the cell it was discovered from. Layers are
breadth-first edge-adjacency distance from the central cell.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import (DimensionMismatchError, HoloError, InsufficientLayersError,
                     SizeLimitError, UnsupportedTensorError)

DEFAULT_DENSE_LIMIT = 20
DEFAULT_MAX_TENSORS = 200_000

BULK, CONTRACTED, BOUNDARY = "bulk", "contracted", "boundary"


@dataclass(frozen=True)
class TessellationSpec:
    p: int
    q: int
    R: int
    n: int = 1  # bulk qubits per tensor
    m: int = 1  # qubits per contracted/boundary leg

    def __post_init__(self):
        if self.p < 3 or self.q < 3:
            raise HoloError("need p, q >= 3")
        if (self.p - 2) * (self.q - 2) <= 4:
            raise HoloError(f"{{{self.p},{self.q}}} is not hyperbolic: need (p-2)(q-2) > 4")
        if self.R < 0:
            raise HoloError("R must be >= 0")
        if self.n < 1 or self.m < 1:
            raise HoloError("n and m must be >= 1")


@dataclass(frozen=True)
class Leg:
    id: int
    kind: str
    qubits: int
    a: tuple[int, int]                  # (tensor id, position in that tensor's legs)
    b: tuple[int, int] | None = None    # second end, contracted legs only
    angle: float | None = None          # angular position of boundary legs


@dataclass(frozen=True)
class TensorNode:
    id: int
    layer: int
    legs: tuple[int, ...]
    parent: int | None = None
    angle: float | None = None


@dataclass(frozen=True, eq=False)
class LayeredNetwork:
    tensors: tuple[TensorNode, ...]
    legs: tuple[Leg, ...]
    spec: TessellationSpec | None = None
    tensor_kind: str | None = None
    arrays: dict = field(default_factory=dict)   # tensor id -> ndarray, custom networks

    @cached_property
    def boundary_legs(self) -> tuple[int, ...]:
        """Boundary leg ids in angular order (leg id order if no geometry)."""
        bl = [l for l in self.legs if l.kind == BOUNDARY]
        if all(l.angle is not None for l in bl):
            bl.sort(key=lambda l: (l.angle, l.id))
        return tuple(l.id for l in bl)

    @cached_property
    def bulk_legs(self) -> tuple[int, ...]:
        return tuple(l.id for l in self.legs if l.kind == BULK)

    @cached_property
    def contracted_legs(self) -> tuple[int, ...]:
        return tuple(l.id for l in self.legs if l.kind == CONTRACTED)

    @cached_property
    def layer_counts(self) -> tuple[int, ...]:
        if not self.tensors:
            return ()
        counts = [0] * (max(t.layer for t in self.tensors) + 1)
        for t in self.tensors:
            counts[t.layer] += 1
        return tuple(counts)

    @cached_property
    def boundary_position(self) -> dict[int, int]:
        return {lid: i for i, lid in enumerate(self.boundary_legs)}

    @property
    def boundary_qubits(self) -> int:
        return sum(self.legs[l].qubits for l in self.boundary_legs)

    @property
    def bulk_qubits(self) -> int:
        return sum(self.legs[l].qubits for l in self.bulk_legs)

    def boundary_arc(self, start: int, length: int) -> tuple[int, ...]:
        """`length` consecutive boundary legs starting at angular position `start`."""
        B = len(self.boundary_legs)
        if not 0 <= length <= B:
            raise HoloError(f"arc length {length} outside [0, {B}]")
        return tuple(self.boundary_legs[(start + i) % B] for i in range(length))

    def to_edge_list(self) -> str:
        """One line per leg: tensor_a leg_a tensor_b|BOUNDARY|BULK leg_b qubits."""
        lines = []
        for leg in self.legs:
            ta, ia = leg.a
            if leg.kind == CONTRACTED:
                tb, ib = leg.b
                lines.append(f"{ta} {ia} {tb} {ib} {leg.qubits}")
            else:
                lines.append(f"{ta} {ia} {leg.kind.upper()} - {leg.qubits}")
        return "\n".join(lines) + "\n"


def network_from_legs(layers: Sequence[int], legs: Iterable[tuple], arrays: dict | None = None,
                      tensor_kind: str | None = None) -> LayeredNetwork:
    """Build an arbitrary network.

    `legs` holds tuples (kind, tensor_a, tensor_b_or_None, qubits); leg positions
    within each tensor follow the order in which legs are listed.
    """
    slots = [[] for _ in layers]
    built = []
    for lid, (kind, ta, tb, qubits) in enumerate(legs):
        if kind not in (BULK, CONTRACTED, BOUNDARY):
            raise HoloError(f"unknown leg kind {kind!r}")
        if (kind == CONTRACTED) != (tb is not None):
            raise HoloError("contracted legs need two ends, others exactly one")
        a = (ta, len(slots[ta]))
        slots[ta].append(lid)
        b = None
        if tb is not None:
            b = (tb, len(slots[tb]))
            slots[tb].append(lid)
        built.append(Leg(lid, kind, int(qubits), a, b))
    tensors = tuple(TensorNode(i, int(layers[i]), tuple(s)) for i, s in enumerate(slots))
    return LayeredNetwork(tensors, tuple(built), None, tensor_kind, dict(arrays or {}))


def single_tensor_network(array: np.ndarray, kinds: Sequence[str]) -> LayeredNetwork:
    """One tensor whose legs are all bulk or boundary, e.g. an identity or a Bell pair."""
    arr = np.asarray(array, dtype=complex)
    if arr.ndim != len(kinds):
        raise DimensionMismatchError("array rank must match the number of legs")
    legs = []
    for k, d in zip(kinds, arr.shape):
        qb = int(round(math.log2(d)))
        if 2 ** qb != d:
            raise DimensionMismatchError("leg dimensions must be powers of two")
        legs.append((k, 0, None, qb))
    return network_from_legs([0], legs, {0: arr})


def parse_edge_list(text: str) -> LayeredNetwork:
    """Inverse of LayeredNetwork.to_edge_list (graph only, no layers or geometry)."""
    rows = []
    n_tensors = 0
    for ln in text.strip().splitlines():
        f = ln.split()
        if len(f) != 5:
            raise HoloError(f"bad edge-list line: {ln!r}")
        ta, ia = int(f[0]), int(f[1])
        if f[2] in ("BOUNDARY", "BULK"):
            rows.append((f[2].lower(), (ta, ia), None, int(f[4])))
        else:
            rows.append((CONTRACTED, (ta, ia), (int(f[2]), int(f[3])), int(f[4])))
        n_tensors = max(n_tensors, ta + 1, (rows[-1][2] or (0, 0))[0] + 1)
    slots: list[dict[int, int]] = [dict() for _ in range(n_tensors)]
    legs = []
    for lid, (kind, a, b, qb) in enumerate(rows):
        slots[a[0]][a[1]] = lid
        if b is not None:
            slots[b[0]][b[1]] = lid
        legs.append(Leg(lid, kind, qb, a, b))
    tensors = tuple(TensorNode(i, 0, tuple(s[k] for k in sorted(s))) for i, s in enumerate(slots))
    return LayeredNetwork(tensors, tuple(legs))


# ---------------------------------------------------------------- geometry

def _moebius(g: np.ndarray, z: complex) -> complex:
    return (g[0, 0] * z + g[0, 1]) / (g[1, 0] * z + g[1, 1])


class _CellIndex:
    """Lookup of cells by the hyperboloid coordinate of their centre."""

    def __init__(self):
        self.keys: list[complex] = []
        self.buckets: dict[tuple[int, int], list[int]] = {}

    @staticmethod
    def key(g: np.ndarray) -> complex:
        # 2ab = 2z/(1-|z|^2) for centre z = g(0); independent of the cell's rotation
        return complex(2 * g[0, 0] * g[0, 1])

    _NA = math.ceil(2 * math.pi * 1e4)

    @classmethod
    def _bucket(cls, X: complex) -> tuple[int, int]:
        ang = math.atan2(X.imag, X.real) + math.pi
        return (math.floor(math.log1p(abs(X)) * 1e4), math.floor(ang * 1e4) % cls._NA)

    def find(self, X: complex) -> int | None:
        bx, by = self._bucket(X)
        tol = 1e-7 * (1 + abs(X))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self.buckets.get((bx + dx, (by + dy) % self._NA), ()):
                    if abs(self.keys[idx] - X) < tol:
                        return idx
        return None

    def add(self, X: complex) -> int:
        idx = len(self.keys)
        self.keys.append(X)
        self.buckets.setdefault(self._bucket(X), []).append(idx)
        return idx


def _generators(p: int, q: int):
    inradius = math.acosh(math.cos(math.pi / q) / math.sin(math.pi / p))
    rho = math.tanh(inradius / 2)          # Euclidean radius of edge midpoints
    mids = [rho * complex(math.cos(2 * math.pi * k / p), math.sin(2 * math.pi * k / p)) for k in range(p)]
    half = np.array([[1j, 0], [0, -1j]])
    gens = []
    for w in mids:
        T = np.array([[1, w], [np.conj(w), 1]]) / math.sqrt(1 - abs(w) ** 2)
        gens.append(T @ half @ np.linalg.inv(T))
    return gens, mids


def build_tessellation(spec: TessellationSpec, tensor_kind: str | None = "auto",
                       max_tensors: int = DEFAULT_MAX_TENSORS) -> LayeredNetwork:
    """Cells within edge-distance R of the centre, one tensor per cell.

    tensor_kind "auto" picks the six-leg five-qubit-code tensor for p=5 and
    leaves other tilings as bare graphs.
    """
    p, q, R = spec.p, spec.q, spec.R
    if tensor_kind == "auto":
        tensor_kind = "five_qubit" if p == 5 else None
    if tensor_kind == "five_qubit" and p != 5:
        raise UnsupportedTensorError("the five-qubit-code tensor has 6 legs and needs p=5")
    if tensor_kind is not None and tensor_kind != "five_qubit":
        raise UnsupportedTensorError(f"unknown tensor kind {tensor_kind!r}")
    if tensor_kind == "five_qubit" and spec.n > spec.m:
        raise UnsupportedTensorError("bulk legs cannot carry more qubits than edge legs (n > m)")

    gens, mids = _generators(p, q)
    cells = [np.eye(2, dtype=complex)]
    layer = [0]
    parent: list[int | None] = [None]
    entry = [0]                      # local edge index facing the parent
    index = _CellIndex()
    index.add(index.key(cells[0]))
    nbr: dict[tuple[int, int], tuple[int, int]] = {}
    queue = deque([0])
    step = math.pi / p
    while queue:
        c = queue.popleft()
        g = cells[c]
        for k in range(p):
            if (c, k) in nbr:
                continue
            h = g @ gens[k]
            X = index.key(h)
            d = index.find(X)
            if d is None:
                if layer[c] + 1 > R:
                    continue
                if len(cells) >= max_tensors:
                    raise SizeLimitError(f"tessellation exceeds {max_tensors} tensors")
                d = index.add(X)
                cells.append(h)
                layer.append(layer[c] + 1)
                parent.append(c)
                entry.append(k)
                queue.append(d)
                j = k
            else:
                # g s_k = h_d rot^s with rot a 2pi/p turn; the shared edge is k+s on d
                M = np.linalg.inv(cells[d]) @ h
                s = round(math.atan2(M[0, 0].imag, M[0, 0].real) / step) % (2 * p)
                j = (k + s) % p
            nbr[(c, k)] = (d, j)
            nbr[(d, j)] = (c, k)

    # legs: per tensor the bulk leg, then edges counter-clockwise from the entry edge
    N = len(cells)
    tensor_legs: list[list[int]] = [[] for _ in range(N)]
    legs: list[Leg] = []
    edge_leg: dict[tuple[int, int], int] = {}
    centres = []
    for c in range(N):
        z = _moebius(cells[c], 0)
        centres.append(math.atan2(z.imag, z.real) % (2 * math.pi) if abs(z) > 1e-12 else None)
        lid = len(legs)
        legs.append(Leg(lid, BULK, spec.n, (c, 0)))
        tensor_legs[c].append(lid)
        for pos in range(1, p + 1):
            k = (entry[c] + pos - 1) % p
            if (c, k) in edge_leg:
                tensor_legs[c].append(edge_leg[(c, k)])
                continue
            lid = len(legs)
            if (c, k) in nbr:
                edge_leg[nbr[(c, k)]] = lid
                legs.append(Leg(lid, CONTRACTED, spec.m, (c, pos)))
            else:
                w = _moebius(cells[c], mids[k])
                legs.append(Leg(lid, BOUNDARY, spec.m, (c, pos),
                                angle=math.atan2(w.imag, w.real) % (2 * math.pi)))
            edge_leg[(c, k)] = lid
            tensor_legs[c].append(lid)
    # fill in the second end of contracted legs
    for c in range(N):
        for pos, lid in enumerate(tensor_legs[c]):
            leg = legs[lid]
            if leg.kind == CONTRACTED and leg.a[0] != c:
                legs[lid] = Leg(lid, CONTRACTED, leg.qubits, leg.a, (c, pos))
    tensors = tuple(TensorNode(c, layer[c], tuple(tensor_legs[c]), parent[c], centres[c]) for c in range(N))
    return LayeredNetwork(tensors, tuple(legs), spec, tensor_kind)


def measure_growth_rate(net: LayeredNetwork) -> float:
    """Least-squares growth rate of tensors per layer over the outer half of layers."""
    counts = net.layer_counts
    R = len(counts) - 1
    if R < 2:
        raise InsufficientLayersError("need R >= 2 to fit a growth rate")
    lo = max(1, math.ceil(R / 2))
    if R - lo < 1:
        lo = 1
    xs = np.arange(lo, R + 1)
    ys = np.log(np.asarray(counts[lo:], dtype=float))
    slope = np.polyfit(xs, ys, 1)[0]
    return float(math.exp(slope))


# ---------------------------------------------------------------- perfect tensors

@dataclass(frozen=True, eq=False)
class PerfectTensorData:
    legs: int
    nu: int
    amplitudes: np.ndarray      # shape (nu,)*legs, unit norm


def _pauli_string(s: str) -> np.ndarray:
    paulis = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]),
              "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}
    out = np.ones((1, 1))
    for ch in s:
        out = np.kron(out, paulis[ch])
    return out


def _five_qubit_tensor() -> np.ndarray:
    gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    proj = np.eye(32, dtype=complex)
    for gstr in gens:
        proj = proj @ (np.eye(32) + _pauli_string(gstr)) / 2
    zero = proj[:, 0] / np.linalg.norm(proj[:, 0])
    one = _pauli_string("XXXXX") @ zero
    T = np.stack([zero, one]) / math.sqrt(2)       # T[b, c1..c5]
    return T.reshape((2,) * 6)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, int(n ** 0.5) + 1))


def make_perfect_tensor(legs: int, nu: int) -> PerfectTensorData:
    """Perfect tensors for (6 legs, qubits), (4 legs, prime nu >= 3) and (2 legs, any nu)."""
    if legs == 6 and nu == 2:
        amps = _five_qubit_tensor()
    elif legs == 4 and nu >= 3 and _is_prime(nu):
        amps = np.zeros((nu,) * 4, dtype=complex)
        for i in range(nu):
            for j in range(nu):
                amps[i, j, (i + j) % nu, (i + 2 * j) % nu] = 1 / nu
    elif legs == 2 and nu >= 2:
        amps = np.eye(nu, dtype=complex) / math.sqrt(nu)
    else:
        raise UnsupportedTensorError(f"no perfect tensor construction for {legs} legs of dimension {nu}")
    return PerfectTensorData(legs, nu, amps)


def tensor_power(t: PerfectTensorData, k: int) -> PerfectTensorData:
    """k copies side by side, leg i of every copy bundled into one leg of dimension nu**k."""
    if k < 1:
        raise HoloError("bundle size must be >= 1")
    amps, L = t.amplitudes, t.legs
    full = amps
    for _ in range(k - 1):
        full = np.multiply.outer(full, amps)
    # axis (copy c, leg i) sits at c*L + i; group per leg, copy-major inside the leg
    perm = [c * L + i for i in range(L) for c in range(k)]
    out = full.transpose(perm).reshape((t.nu ** k,) * L)
    return PerfectTensorData(L, t.nu ** k, out)


@dataclass(frozen=True)
class IsometryReport:
    deviations: dict           # bipartition A (|A| <= |A^c|) -> ||M M^dag - c I||
    max_deviation: float
    worst: tuple[int, ...]

    @property
    def perfect(self) -> bool:
        return self.max_deviation <= 1e-10


def check_perfect_isometry(t: PerfectTensorData) -> IsometryReport:
    """Per-bipartition deviation of M M^dag from a multiple of the identity."""
    amps = t.amplitudes / np.linalg.norm(t.amplitudes)
    L = t.legs
    devs = {}
    for size in range(1, L // 2 + 1):
        for A in combinations(range(L), size):
            rest = [i for i in range(L) if i not in A]
            M = amps.transpose(list(A) + rest).reshape(t.nu ** size, -1)
            G = M @ M.conj().T
            c = np.trace(G).real / G.shape[0]
            devs[A] = float(np.linalg.norm(G - c * np.eye(G.shape[0]), 2))
    worst = max(devs, key=lambda A: (devs[A], [-i for i in A])) if devs else ()
    return IsometryReport(devs, devs.get(worst, 0.0), worst)


# ---------------------------------------------------------------- contraction

@dataclass(frozen=True, eq=False)
class BoundaryState:
    qubits: int
    amplitudes: np.ndarray
    norm: float
    legs: tuple[int, ...] = ()           # boundary leg ids in qubit order
    leg_qubits: tuple[int, ...] = ()

    def qubits_of(self, region: Iterable[int]) -> list[int]:
        offsets = np.concatenate([[0], np.cumsum(self.leg_qubits)]).astype(int)
        pos = {lid: i for i, lid in enumerate(self.legs)}
        out = []
        for lid in region:
            if lid not in pos:
                raise DimensionMismatchError(f"leg {lid} is not a boundary leg of this state")
            i = pos[lid]
            out.extend(range(offsets[i], offsets[i + 1]))
        return out


def _tensor_array(net: LayeredNetwork, tid: int, cache: dict) -> np.ndarray:
    if tid in net.arrays:
        return np.asarray(net.arrays[tid], dtype=complex)
    if net.tensor_kind != "five_qubit":
        raise UnsupportedTensorError("network has no tensor data to contract")
    spec = net.spec
    if "base" not in cache:
        cache["base"] = tensor_power(make_perfect_tensor(6, 2), spec.m).amplitudes
    arr = cache["base"]
    if spec.n < spec.m:
        # bulk input |b> embedded as |b>|0...0> inside the m-qubit bulk slot
        arr = arr[:: 2 ** (spec.m - spec.n)]
    return arr


def _contract(net: LayeredNetwork, bulk_vectors: dict | None, dense_limit: int) -> np.ndarray:
    """Contract tensors in id (layer) order; open bulk legs stay as trailing axes."""
    cache: dict = {}
    open_legs: list[int] = []
    psi = np.ones((), dtype=complex)
    margin = dense_limit + 8
    for t in net.tensors:
        arr = _tensor_array(net, t.id, cache)
        labels = list(t.legs)
        if arr.ndim != len(labels):
            raise DimensionMismatchError(f"tensor {t.id} has {arr.ndim} axes but {len(labels)} legs")
        # feed bulk states in first
        if bulk_vectors is not None:
            for pos in reversed(range(len(labels))):
                lid = labels[pos]
                if net.legs[lid].kind == BULK:
                    vec = bulk_vectors[lid]
                    if vec.shape[0] != arr.shape[pos]:
                        raise DimensionMismatchError(f"bulk state for leg {lid} has wrong dimension")
                    arr = np.tensordot(arr, vec, axes=([pos], [0]))
                    labels.pop(pos)
        shared = [lid for lid in labels if lid in open_legs]
        ax_psi = [open_legs.index(l) for l in shared]
        ax_t = [labels.index(l) for l in shared]
        psi = np.tensordot(psi, arr, axes=(ax_psi, ax_t))
        open_legs = [l for l in open_legs if l not in shared] + [l for l in labels if l not in shared]
        if sum(net.legs[l].qubits for l in open_legs) > margin:
            raise SizeLimitError("intermediate contraction exceeds the dense limit")
    front = list(net.boundary_legs)
    back = [l for l in open_legs if net.legs[l].kind == BULK]
    if sorted(front + back) != sorted(open_legs):
        raise HoloError("contraction left dangling contracted legs")
    perm = [open_legs.index(l) for l in front + back]
    return psi.transpose(perm) if perm else psi


def _check_dense(net: LayeredNetwork, dense_limit: int, qubits: int):
    if not net.tensors:
        raise HoloError("network has no tensors")
    if qubits > dense_limit:
        raise SizeLimitError(f"{qubits} qubits exceeds dense limit {dense_limit}")


def contract_to_boundary_state(net: LayeredNetwork, bulk_assignment: dict | Sequence | None = None,
                               dense_limit: int = DEFAULT_DENSE_LIMIT) -> BoundaryState:
    """Dense boundary state for given bulk input states (default |0> on every bulk leg)."""
    _check_dense(net, dense_limit, net.boundary_qubits)
    vectors: dict[int, np.ndarray] = {}
    bulk = net.bulk_legs
    if bulk_assignment is None:
        bulk_assignment = {}
    elif not isinstance(bulk_assignment, dict):
        bulk_assignment = dict(zip(bulk, bulk_assignment))
    for lid in bulk:
        d = 2 ** net.legs[lid].qubits
        v = bulk_assignment.get(lid)
        if v is None:
            v = np.zeros(d, dtype=complex)
            v[0] = 1
        vectors[lid] = np.asarray(v, dtype=complex)
    psi = _contract(net, vectors, dense_limit).reshape(-1)
    nrm = float(np.linalg.norm(psi))
    if nrm == 0:
        raise HoloError("contraction produced the zero vector")
    psi = psi / nrm
    legs = net.boundary_legs
    return BoundaryState(net.boundary_qubits, psi, float(np.linalg.norm(psi)), legs,
                         tuple(net.legs[l].qubits for l in legs))


def bulk_to_boundary_isometry(net: LayeredNetwork, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Matrix (2^boundary x 2^bulk) of the network map, scaled so M^dag M = I when it is an isometry."""
    _check_dense(net, dense_limit, net.boundary_qubits + net.bulk_qubits)
    M = _contract(net, None, dense_limit).reshape(2 ** net.boundary_qubits, 2 ** net.bulk_qubits)
    G = M.conj().T @ M
    scale = math.sqrt(np.trace(G).real / G.shape[0])
    if scale == 0:
        raise HoloError("network map is zero")
    return M / scale


def load_network_config(path_or_dict) -> tuple[TessellationSpec, str | None, int]:
    """Read {p, q, R, n, m, tensor_kind, dense_limit} from a JSON file or dict."""
    if isinstance(path_or_dict, dict):
        cfg = path_or_dict
    else:
        with open(path_or_dict) as fh:
            cfg = json.load(fh)
    spec = TessellationSpec(int(cfg["p"]), int(cfg["q"]), int(cfg["R"]),
                            int(cfg.get("n", 1)), int(cfg.get("m", 1)))
    return spec, cfg.get("tensor_kind", "auto"), int(cfg.get("dense_limit", DEFAULT_DENSE_LIMIT))
