"""Exact swap dynamics and end-to-end state transfer on uniform Heisenberg chains.

Each link carries tau/2 (II + XX + YY + ZZ) = tau * SWAP. A chain of L qubits has
L - 1 links. Starting from |psi>|0...0> only the zero- and one-excitation sectors
are populated, so the evolution is exact in an (L+1)-dimensional space; the dense
2^L construction is kept as an oracle for small chains.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import HoloError, SizeLimitError

MAX_CHAIN = 14
GRID_STEP = 1.01
PROBE_STATES = {
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "+i": np.array([1, 1j], dtype=complex) / math.sqrt(2),
}

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def _qubit(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (2,) or abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise HoloError("psi must be a normalised single-qubit state")
    return psi


def swap_exact_evolution(psi, t: float) -> np.ndarray:
    """exp(-i t SWAP) |psi>|0> by diagonalising SWAP (eigenvalues +1 and -1)."""
    psi = _qubit(psi)
    w, U = np.linalg.eigh(SWAP)
    e0 = np.array([1, 0], dtype=complex)
    return (U * np.exp(-1j * w * t)) @ U.conj().T @ np.kron(psi, e0)


def swap_closed_form(psi, t: float) -> np.ndarray:
    psi = _qubit(psi)
    e0 = np.array([1, 0], dtype=complex)
    return math.cos(t) * np.kron(psi, e0) - 1j * math.sin(t) * np.kron(e0, psi)


@dataclass(frozen=True)
class ChainSpec:
    L: int
    tau: float

    def __post_init__(self):
        if self.L < 2:
            raise HoloError("a chain needs at least 2 qubits")
        if self.L > MAX_CHAIN:
            raise SizeLimitError(f"chain of {self.L} qubits exceeds the dense limit {MAX_CHAIN}")
        if self.tau < 0:
            raise HoloError("tau must be >= 0")

    @property
    def links(self) -> int:
        return self.L - 1


@dataclass(frozen=True, eq=False)
class TransferResult:
    fidelity: float
    state: np.ndarray       # full 2^L final state
    amplitude: complex      # transfer amplitude for the excitation, 0 -> L-1


def chain_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Dense 2^L Hamiltonian, qubit 0 the most significant."""
    L = spec.L
    H = np.zeros((2 ** L, 2 ** L), dtype=complex)
    for i in range(L - 1):
        H += np.kron(np.kron(np.eye(2 ** i), SWAP), np.eye(2 ** (L - i - 2)))
    return spec.tau * H


def _laplacian(L: int) -> np.ndarray:
    lap = np.diag([1.0] + [2.0] * (L - 2) + [1.0])
    for i in range(L - 1):
        lap[i, i + 1] = lap[i + 1, i] = -1
    return lap


def _transfer_amplitude(L: int, tau: float, t: float) -> complex:
    """<e_{L-1}| exp(i tau t Lap) |e_0>: the one-excitation block with the
    common phase exp(-i tau (L-1) t) taken out."""
    w, U = np.linalg.eigh(_laplacian(L))
    return complex((U[-1] * U[0] * np.exp(1j * tau * t * w)).sum())


def chain_transfer_fidelity(spec: ChainSpec, psi, t: float = math.pi / 2) -> TransferResult:
    """Fidelity of |psi>|0..0> -> |0..0>|psi>, maximised over a global phase."""
    psi = _qubit(psi)
    L = spec.L
    f = _transfer_amplitude(L, spec.tau, t)
    w, U = np.linalg.eigh(_laplacian(L))
    row = (U * np.exp(1j * spec.tau * t * w)) @ U[0]        # excitation amplitudes over sites
    phase = np.exp(-1j * spec.tau * (L - 1) * t)
    state = np.zeros(2 ** L, dtype=complex)
    state[0] = phase * psi[0]
    for site in range(L):
        state[1 << (L - 1 - site)] = phase * psi[1] * row[site]
    overlap = abs(psi[0]) ** 2 + abs(psi[1]) ** 2 * f
    return TransferResult(float(min(1.0, abs(overlap) ** 2)), state, f)


def dense_transfer_fidelity(spec: ChainSpec, psi, t: float = math.pi / 2) -> TransferResult:
    """Same quantity from the full 2^L matrix exponential."""
    psi = _qubit(psi)
    L = spec.L
    zeros = np.zeros(2 ** (L - 1))
    zeros[0] = 1
    final = expm(-1j * t * chain_hamiltonian(spec)) @ np.kron(psi, zeros)
    target = np.kron(zeros, psi)
    amp = complex("nan")
    if abs(psi[1]) > 1e-12:
        amp = complex(final[1] / psi[1] * np.exp(1j * spec.tau * (L - 1) * t))
    return TransferResult(float(abs(np.vdot(target, final)) ** 2), final, amp)


def worst_infidelity(L: int, tau: float, t: float = math.pi / 2) -> float:
    spec = ChainSpec(L, tau)
    return max(1 - chain_transfer_fidelity(spec, psi, t).fidelity for psi in PROBE_STATES.values())


@dataclass(frozen=True)
class CouplingSearch:
    L: int
    eps: float
    found: bool
    tau: float | None
    infidelity: float | None
    steps: int
    cap: float


def min_coupling_search(L: int, eps: float, cap: float = 1000.0, t: float = math.pi / 2) -> CouplingSearch:
    """Smallest tau = 1.01^k (k >= 0) whose worst-case infidelity is <= eps."""
    if not 0 < eps < 1:
        raise HoloError("eps must lie in (0, 1)")
    ChainSpec(L, 1.0)
    k_max = int(math.floor(math.log(cap) / math.log(GRID_STEP)))
    for k in range(k_max + 1):
        tau = GRID_STEP ** k
        err = worst_infidelity(L, tau, t)
        if err <= eps:
            return CouplingSearch(L, eps, True, tau, err, k, cap)
    return CouplingSearch(L, eps, False, None, None, k_max + 1, cap)


def heuristic_chain_error(links: int, tau: float) -> float:
    if links < 1:
        raise HoloError("links must be >= 1")
    return math.cos(tau * math.pi / (2 * links)) ** (2 * links)


def transfer_scan(lengths, taus, t: float = math.pi / 2) -> list[tuple[int, float, float, float]]:
    """Rows (L, tau, exact worst-case infidelity, heuristic error)."""
    rows = []
    for L in lengths:
        for tau in taus:
            rows.append((int(L), float(tau), worst_infidelity(L, tau, t), heuristic_chain_error(L - 1, tau)))
    return rows


def write_scan_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["L", "tau", "exact_infidelity", "heuristic_error"])
        for r in rows:
            w.writerow([r[0], repr(float(r[1])), repr(float(r[2])), repr(float(r[3]))])
