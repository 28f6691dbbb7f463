"""Cost models: history-state simulation, the attack error budget and worked scenarios.

Every O(1) constant is 1 ("scaling units"). Logs are natural unless noted and
floored at 1 inside the cost formulas so log / loglog factors stay positive.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import HoloError, PreconditionError
from .logscale import LogScaled
from .sim_framework import ExponentTuple

Scalar = Union[float, int, LogScaled]


def _ls(v: Scalar) -> LogScaled:
    out = v if isinstance(v, LogScaled) else LogScaled.from_value(float(v))
    return out.rebase(math.e)


def _lg(v: LogScaled) -> LogScaled:
    """max(ln v, 1) as a LogScaled."""
    return LogScaled.from_value(max(v.ln, 1.0))


def _pos(name: str, v: LogScaled):
    if v.sign <= 0:
        raise HoloError(f"{name} must be positive")


@dataclass(frozen=True)
class QPEParams:
    d: Scalar
    N: Scalar
    h_norm: Scalar
    eps_prime: Scalar
    t_u: Scalar = 1.0


@dataclass(frozen=True)
class QPEResult:
    T_U: LogScaled
    T_PE: LogScaled
    coarse: bool           # eps' >= ||H||: accuracy coarser than the spectrum


def qpe_runtime(p: QPEParams) -> QPEResult:
    """T_U = d (1 + N + log^{5/2} K) log K / loglog K with K = d ||H|| / eps', and T_PE = (||H||/eps') T_U."""
    d, N, h, e = (_ls(v) for v in (p.d, p.N, p.h_norm, p.eps_prime))
    for name, v in (("d", d), ("N", N), ("||H||", h), ("eps'", e)):
        _pos(name, v)
    K = d * h / e
    lk = _lg(K)
    T_U = d * (LogScaled.from_value(1.0) + N + lk ** 2.5) * lk / _lg(lk)
    return QPEResult(T_U, (h / e) * T_U, e >= h)


@dataclass(frozen=True)
class HistoryStateModel:
    J: Scalar
    T_PE: Scalar
    lam: float = 1.0               # idling multiple, L = lam * T_PE

    def __post_init__(self):
        if self.lam < 1:
            raise HoloError("idling multiple lambda must be >= 1")

    @property
    def L(self) -> LogScaled:
        return _ls(self.T_PE) * self.lam

    @property
    def T(self) -> LogScaled:
        return _ls(self.T_PE) * (1 + self.lam)


def history_state_errors(m: HistoryStateModel, h_norm: Scalar, eps_prime: Scalar):
    """(eta, eps, Delta) = (T^3 H/J + T_PE/T, eps' + T^4 H^2/J, J/(2T^2))."""
    J, h, e = _ls(m.J), _ls(h_norm), _ls(eps_prime)
    T, T_PE = m.T, _ls(m.T_PE)
    eta = T ** 3 * h / J + T_PE / T
    eps = e + T ** 4 * h ** 2 / J
    Delta = J / (2 * T ** 2)
    return eta, eps, Delta


def required_heavy_norm_J(Delta: Scalar, T: Scalar, h_norm: Scalar, eta: Scalar, eps: Scalar) -> LogScaled:
    """Delta T^2 + T^3 ||H|| / eta + T^4 ||H|| / eps."""
    D, T, h, et, ep = (_ls(v) for v in (Delta, T, h_norm, eta, eps))
    return D * T ** 2 + T ** 3 * h / et + T ** 4 * h / ep


def heavy_norm_for_targets(m_T_PE: Scalar, lam: float, h_norm: Scalar, eps_prime: Scalar,
                           eta: Scalar, eps: Scalar, Delta: Scalar) -> LogScaled:
    """Smallest J meeting each target of history_state_errors exactly (binding one with equality)."""
    T_PE, h, ep0, et, ep, D = (_ls(v) for v in (m_T_PE, h_norm, eps_prime, eta, eps, Delta))
    T = T_PE * (1 + lam)
    idle = T_PE / T
    if et <= idle:
        raise PreconditionError("eta target is below the idling floor T_PE/T")
    if ep <= ep0:
        raise PreconditionError("eps target is below eps'")
    cands = [T ** 3 * h / (et - idle), T ** 4 * h ** 2 / (ep - ep0), 2 * D * T ** 2]
    return max(cands)


# ---------------------------------------------------------------- exponent bookkeeping

class Monomial(dict):
    """Product of symbols with rational exponents, e.g. {'N': 1, 'eps': -1}."""

    def __mul__(self, other: "Monomial") -> "Monomial":
        out = Monomial(self)
        for k, v in other.items():
            out[k] = out.get(k, Fraction(0)) + Fraction(v)
        return Monomial({k: v for k, v in out.items() if v != 0})

    def __pow__(self, k) -> "Monomial":
        return Monomial({s: Fraction(v) * Fraction(k) for s, v in self.items()})


def sparse_history_exponents() -> ExponentTuple:
    """(a, b, x, y, z) of the heavy norm J for d-sparse targets, read off the full model.

    With T ~ T_PE ~ d N ||H|| / eps (dominant N term, logs dropped), the eps- and
    eta-limited terms T^4 ||H||^2 / eps and T^3 ||H|| / eta are rewritten as
    (N^a / eps^b ||H||)^k and (N^x / (eps^y eta^z) ||H||)^k.
    """
    T = Monomial({"d": 1, "N": 1, "H": 1, "eps": -1})
    eps_term = (T ** 4) * Monomial({"H": 2, "eps": -1})
    eta_term = (T ** 3) * Monomial({"H": 1, "eta": -1})

    def normalise(mono: Monomial) -> Monomial:
        return mono ** (1 / mono["H"])

    e1 = normalise(eps_term)
    e2 = normalise(eta_term)
    return ExponentTuple(e1["N"], -e1["eps"], e2["N"], -e2.get("eps", Fraction(0)),
                         -e2.get("eta", Fraction(0)), locality="sparse")


# ---------------------------------------------------------------- scenarios

@dataclass(frozen=True)
class ScenarioReport:
    kind: str
    inputs: dict
    T_PE: LogScaled
    h_target: LogScaled
    eta: LogScaled
    eps: LogScaled
    Delta: LogScaled
    budget: LogScaled
    final_error: LogScaled
    eta_dominates: bool
    eps_good: bool           # eps << ||H_target||
    delta_good: bool         # Delta >> ||H_target||

    def to_dict(self) -> dict:
        return {"inputs": self.inputs, "kind": self.kind, "log_T_PE": self.T_PE.ln,
                "log_eta": self.eta.ln, "log_eps": self.eps.ln, "log_delta": self.Delta.ln,
                "log_budget": self.budget.ln, "log_final_error": self.final_error.ln,
                "log_h_target": self.h_target.ln, "eta_dominates": self.eta_dominates,
                "eps_good": self.eps_good, "delta_good": self.delta_good, "units": "scaling units, natural log"}


def _P(x: float) -> LogScaled:
    return LogScaled.from_value(float(x))


def _E(ln: float) -> LogScaled:
    return LogScaled.from_ln(float(ln))


def scenario_report(kind: str, n: int, R: int, tau: float, alpha: float, beta: float | None = None,
                    alpha_p: float | None = None, beta_p: float | None = None, k: int = 2,
                    J: Scalar = 1.0) -> ScenarioReport:
    """Worked history-state scenarios with T = T_PE and bulk time n tau^R.

    general: N = n tau^R, d = 4^n, ||H|| = tau^{-alpha R} 4^{-alpha n}, eps' = tau^{-beta R} 4^{-beta n}.
    k_local: ||H|| = tau^{-alpha R} n^{-alpha' k}, eps' = tau^{-beta R} n^{-beta' k}.
    """
    beta = alpha if beta is None else beta
    if not (alpha > 0 and beta >= alpha):
        raise PreconditionError("need beta >= alpha > 0")
    if n < 2 or R < 0 or not tau > 1:
        raise PreconditionError("need n >= 2, R >= 0, tau > 1")
    lt, ln_n = math.log(tau), math.log(n)
    lg = lambda z: max(math.log(z), 1.0) if z > 0 else 1.0
    inputs = {"kind": kind, "n": n, "R": R, "tau": tau, "alpha": alpha, "beta": beta, "k": k}
    if kind == "general":
        da = beta - alpha
        h = _E(-alpha * R * lt - alpha * n * math.log(4))
        inner = _P(n) * _E(R * lt) + _P(((da + 1) * n) ** 2.5) + _P((da * R * lt) ** 2.5)
        arg = (da + 1) * n + da * R * lt
        T_PE = _E((da + 1) * n * math.log(4) + da * R * lt) * inner * _P(arg) / _P(lg(arg))
    elif kind == "k_local":
        alpha_p = 7.0 if alpha_p is None else alpha_p
        beta_p = alpha_p if beta_p is None else beta_p
        if not (alpha_p > 0 and beta_p >= alpha_p):
            raise PreconditionError("need beta' >= alpha' > 0")
        dp, da = beta_p - alpha_p, beta - alpha
        inputs.update(alpha_p=alpha_p, beta_p=beta_p)
        h = _E(-alpha * R * lt - alpha_p * k * ln_n)
        inner = _P(n) * _E(R * lt) + _P(((dp + 1) * k * ln_n) ** 2.5) + _P((da * R * lt) ** 2.5)
        arg = (dp + 1) * ln_n + da * R * lt
        T_PE = _E((dp + 1) * k * ln_n + da * R * lt) * inner * _P(max(arg, 1.0)) / _P(lg(arg))
    else:
        raise HoloError(f"unknown scenario kind {kind!r}")
    Jl = _ls(J)
    T = T_PE
    eta = T ** 3 * h / Jl
    eps = T ** 4 * h ** 2 / Jl
    Delta = Jl / T ** 2
    t_bulk = _P(n) * _E(R * lt)
    budget = h * t_bulk
    final = 2 * eps * t_bulk + 4 * eta
    return ScenarioReport(kind, inputs, T_PE, h, eta, eps, Delta, budget, final,
                          eta > budget, eps < h, Delta > h)


# ---------------------------------------------------------------- attack budget

@dataclass(frozen=True)
class AttackSchedule:
    eps_in: tuple[float, ...]
    eta_in: tuple[float, ...]
    t_in: tuple[float, ...]
    eps_out: tuple[float, ...]
    eta_out: tuple[float, ...]
    t_out: tuple[float, ...]
    eps_u: float
    eta_u: float
    t_u: float
    window: float | None = None      # n tau^R / 4 when built from (tau, R, n)

    def __post_init__(self):
        lens = {len(v) for v in (self.eps_in, self.eta_in, self.t_in, self.eps_out, self.eta_out, self.t_out)}
        if len(lens) != 1:
            raise HoloError("per-layer schedules must all have R+1 entries")
        vals = self.eps_in + self.eta_in + self.t_in + self.eps_out + self.eta_out + self.t_out
        if any(not v > 0 for v in vals + (self.eps_u, self.eta_u, self.t_u)):
            raise HoloError("schedule entries must be positive")
        if self.window is not None and not self.t_u < self.window:
            raise HoloError("central unitary time must be below n tau^R / 4")


@dataclass(frozen=True)
class AttackBudget:
    inbound: float
    outbound: float
    central: float

    @property
    def swap_chain(self) -> float:
        return self.inbound + self.outbound

    @property
    def total(self) -> float:
        return self.inbound + self.outbound + self.central


def canonical_attack_schedule(tau: float, R: int, n: int, t_u: float | None = None) -> AttackSchedule:
    """eps_r = tau^{2(r-R)}/n^2, eta_r = tau^{r-R}/n, t_r = n tau^{R-r}; central values from r = R.

    t_u defaults to n tau^R / 8, the middle of the admissible window.
    """
    if not tau > 1 or R < 0 or n < 1:
        raise HoloError("need tau > 1, R >= 0, n >= 1")
    eps = tuple(tau ** (2 * (r - R)) / n ** 2 for r in range(R + 1))
    eta = tuple(tau ** (r - R) / n for r in range(R + 1))
    t = tuple(n * tau ** (R - r) for r in range(R + 1))
    window = n * tau ** R / 4
    return AttackSchedule(eps, eta, t, eps, eta, t, eps[-1], eta[-1],
                          window / 2 if t_u is None else t_u, window)


def attack_error_budget(s: AttackSchedule) -> AttackBudget:
    """Inbound and outbound sums of 2 eps_r t_r + eta_r, plus the central 2 eps_U t_U + eta_U."""
    inb = math.fsum(2 * e * t + h for e, t, h in zip(s.eps_in, s.t_in, s.eta_in))
    out = math.fsum(2 * e * t + h for e, t, h in zip(s.eps_out, s.t_out, s.eta_out))
    return AttackBudget(inb, out, 2 * s.eps_u * s.t_u + s.eta_u)


@dataclass(frozen=True)
class NormExponent:
    first: LogScaled         # L^a / eps^b * ||H_r||
    second: LogScaled        # L^x / (eps^y eta^z) * ||H_r||
    first_power: float       # a + 2b - 1
    second_power: float      # x + 2y + z - 1


def attack_norm_exponent(a, b, x, y, z, r: int, n: int, tau: float, R: int) -> NormExponent:
    """Simulator interaction strength for layer r given the simulator's (a, b, x, y, z)."""
    L = _P(n) * LogScaled.from_ln((R - r) * math.log(tau))
    eta = LogScaled.from_ln((r - R) * math.log(tau)) / n
    eps = eta ** 2
    h = eta
    first = L ** float(a) / eps ** float(b) * h
    second = L ** float(x) / (eps ** float(y) * eta ** float(z)) * h
    return NormExponent(first, second, float(a + 2 * b - 1), float(x + 2 * y + z - 1))


def write_attack_table(path, tau: float, n: int, Rs) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["R", "inbound", "outbound", "central", "n_times_swap_chain", "n_times_total"])
        for R in Rs:
            b = attack_error_budget(canonical_attack_schedule(tau, R, n))
            w.writerow([R, repr(float(b.inbound)), repr(float(b.outbound)), repr(float(b.central)),
                        repr(float(n * b.swap_chain)), repr(float(n * b.total))])
