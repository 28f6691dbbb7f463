"""Subdivision gadget, second-order simulation checks and the perturbative recursion.

In the recursion log(n) is base 2: it counts rounds of halving the locality.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import HoloError, PreconditionError
from .logscale import LogScaled
from .sim_framework import EncodingData, SimulationCertificate, verify_simulation

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(label: str) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for ch in label.upper():
        out = np.kron(out, PAULI[ch])
    return out


@dataclass(frozen=True, eq=False)
class GadgetInstance:
    P_A: np.ndarray
    P_B: np.ndarray
    delta0: float
    Delta: float
    p: int
    H0: np.ndarray          # Delta * Pi_+
    H1: np.ndarray
    H2: np.ndarray
    H_target: np.ndarray

    @property
    def H_tilde(self) -> np.ndarray:
        return self.H0 + self.H1 + math.sqrt(self.Delta) * self.H2

    @property
    def W(self) -> np.ndarray:
        """|psi> -> |psi>|0>_w."""
        d = self.H_target.shape[0]
        e0 = np.zeros((self.p, 1))
        e0[0] = 1
        return np.kron(np.eye(d), e0)

    def pi_plus(self) -> np.ndarray:
        d = self.H_target.shape[0]
        return np.kron(np.eye(d), np.diag([0.0] + [1.0] * (self.p - 1)))


def _check_unitary(U: np.ndarray, name: str):
    if U.ndim != 2 or U.shape[0] != U.shape[1] or np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > 1e-10:
        raise HoloError(f"{name} is not unitary")


def build_subdivision_gadget(P_A, P_B, delta0: float, Delta: float, p: int = 3,
                             include_h1: bool = True) -> GadgetInstance:
    """Mediator gadget on A (x) B (x) w simulating delta0 (P_A P_B + h.c.).

    Needs p >= 3: at p = 2 the two mediator paths |1> and |p-1> coincide and
    the second-order terms no longer cancel.
    """
    P_A = pauli(P_A) if isinstance(P_A, str) else np.asarray(P_A, dtype=complex)
    P_B = pauli(P_B) if isinstance(P_B, str) else np.asarray(P_B, dtype=complex)
    if p < 3:
        raise HoloError("mediator dimension p must be >= 3; at p=2 the paths |1> and |p-1> interfere")
    if delta0 < 0 or Delta <= 0:
        raise HoloError("need delta0 >= 0 and Delta > 0")
    _check_unitary(P_A, "P_A")
    _check_unitary(P_B, "P_B")
    dA, dB = P_A.shape[0], P_B.shape[0]
    IA, IB = np.eye(dA), np.eye(dB)
    shift = np.roll(np.eye(p), 1, axis=0)          # |w> -> |w+1 mod p>
    pi_plus = np.diag([0.0] + [1.0] * (p - 1))
    d = dA * dB
    H0 = Delta * np.kron(np.eye(d), pi_plus)
    H1 = (2 * delta0 if include_h1 else 0.0) * np.eye(d * p, dtype=complex)
    A, Ad = np.kron(P_A, IB), np.kron(P_A.conj().T, IB)
    B, Bd = np.kron(IA, P_B), np.kron(IA, P_B.conj().T)
    H2 = math.sqrt(delta0 / 2) * (-np.kron(A, shift) - np.kron(Ad, shift.T)
                                  + np.kron(B, shift.T) + np.kron(Bd, shift))
    target = delta0 * (np.kron(P_A, P_B) + np.kron(P_A.conj().T, P_B.conj().T))
    return GadgetInstance(P_A, P_B, float(delta0), float(Delta), p, H0, H1, H2, target)


def _blocks(g: GadgetInstance, M: np.ndarray):
    Pp = g.pi_plus()
    Pm = np.eye(Pp.shape[0]) - Pp
    return Pm @ M @ Pm, Pm @ M @ Pp, Pp @ M @ Pm, Pp @ M @ Pp


def second_order_residual(g: GadgetInstance) -> float:
    """|| W H_target W^dag - (H1)_-- + (H2)_-+ H0^-1 (H2)_+- || with H0^-1 the unit-gap inverse Pi_+."""
    W = g.W
    mm1, *_ = _blocks(g, g.H1)
    _, mp2, pm2, _ = _blocks(g, g.H2)
    combo = W @ g.H_target @ W.conj().T - mm1 + mp2 @ g.pi_plus() @ pm2
    return float(np.linalg.norm(combo, 2))


@dataclass(frozen=True)
class SecondOrderReport:
    certificate: SimulationCertificate
    Lambda: float
    required_Delta: float
    condition_met: bool


def verify_second_order(g: GadgetInstance, eps: float, eta: float) -> SecondOrderReport:
    """Block checks, the Delta >= Lambda^6/eps^2 + Lambda^2/eta^2 flag, and a measured certificate at Delta/2."""
    mm2 = _blocks(g, g.H2)[0]
    if np.abs(mm2).max() > 1e-12:
        raise HoloError("(H2)_-- must vanish")
    _, mp1, pm1, _ = _blocks(g, g.H1)
    if max(np.abs(mp1).max(), np.abs(pm1).max()) > 1e-12:
        raise HoloError("H1 must be block diagonal")
    Lam = max(np.linalg.norm(g.H1, 2), np.linalg.norm(g.H2, 2))
    need = Lam ** 6 / eps ** 2 + Lam ** 2 / eta ** 2
    enc = EncodingData(g.W, np.eye(1), np.zeros((1, 1)))
    cert = verify_simulation(g.H_tilde, g.H_target, enc, g.Delta / 2)
    return SecondOrderReport(cert, float(Lam), float(need), bool(g.Delta >= need))


def delta_sequence(x: int, delta0) -> tuple[Fraction, Fraction]:
    """(recursive, closed-form) delta_x in exact rationals."""
    if x < 0:
        raise HoloError("x must be >= 0")
    d0 = Fraction(delta0)
    seq = [d0]
    for k in range(1, x + 1):
        seq.append(4 * sum(seq[l] / Fraction(2) ** (k - l) for l in range(k)))
    closed = d0 if x == 0 else Fraction(5) ** (x - 1) / Fraction(2) ** (x - 2) * d0
    return seq[x], closed


@dataclass(frozen=True)
class RecursionSchedule:
    delta0: float
    r_max: int
    tau: float
    R: int
    n: int
    b: float

    def __post_init__(self):
        if not self.delta0 > 0 or not self.tau > 1 or not self.b > 0:
            raise HoloError("need delta0 > 0, tau > 1, b > 0")
        if self.r_max < 0 or self.R < 0 or self.n < 1:
            raise HoloError("need r_max >= 0, R >= 0, n >= 1")


@dataclass(frozen=True)
class RecursionRow:
    round: int
    h_target: LogScaled
    eps: LogScaled
    eta: LogScaled


@dataclass(frozen=True)
class RecursionReport:
    rows: tuple[RecursionRow, ...]
    eps: LogScaled
    eta: LogScaled
    Delta: LogScaled
    h_sim: LogScaled
    identity_holds: bool
    degenerate: bool

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["round", "log_tau_ht", "log_tau_eps", "log_tau_eta"])
            for r in self.rows:
                w.writerow([r.round, repr(float(r.h_target.log_tau)), repr(float(r.eps.log_tau)), repr(float(r.eta.log_tau))])


def recursion_report(s: RecursionSchedule) -> RecursionReport:
    """Per-round target norms and errors, and the final simulation scales, in base-tau logs."""
    tau = s.tau
    L = s.R * math.log2(s.n)                 # R log(n)
    d0 = Fraction(s.delta0)
    log_b = math.log(s.b) / math.log(tau)
    seq = [d0]
    for k in range(1, s.r_max + 1):
        seq.append(4 * sum(seq[l] / Fraction(2) ** (k - l) for l in range(k)))
    identity = all(sum(seq[l] / Fraction(2) ** (r - l) for l in range(r + 1)) == Fraction(5, 2) ** r * d0
                   for r in range(s.r_max + 1))
    rows = []
    for r in range(s.r_max + 1):
        if r == 0:
            ht = log_b
            e = log_b - L / 2 * float(d0)
            h = -L / 2 * float(d0)
        else:
            grow = float(Fraction(5, 2) ** (r - 1) * d0)
            ht = log_b + L * grow
            e = log_b - L / 4 * grow
            h = -L / 2 * grow
        rows.append(RecursionRow(r, LogScaled(1, ht, tau), LogScaled(1, e, tau), LogScaled(1, h, tau)))
    pre = LogScaled.from_value(L, tau)
    eps = pre * LogScaled(1, log_b - L * float(d0) / 4, tau)
    eta = pre * LogScaled(1, -L * float(d0) / 2, tau)
    Delta = LogScaled(1, log_b + float(d0) * L, tau) - eps
    h_sim = LogScaled(1, log_b + s.R * s.n * math.log2(s.n) * 2.5 ** s.R * float(d0), tau)
    return RecursionReport(tuple(rows), eps, eta, Delta, h_sim, identity, s.n == 1)


def perturbative_budget(tau: float, n: int, R: int) -> tuple[LogScaled, bool]:
    """Largest bulk norm b keeping ||H_sim|| = O(1): tau^(-n R log(n) (5/2)^R); flag n=1 as degenerate."""
    if not tau > 1 or n < 1 or R < 1:
        raise PreconditionError("need tau > 1, n >= 1, R >= 1")
    return LogScaled(1, -n * R * math.log2(n) * 2.5 ** R, tau), n == 1
