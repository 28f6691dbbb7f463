"""Approximate Hamiltonian simulation: encodings, measured certificates, physical property checks."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np
from scipy.special import logsumexp

from .errors import (DimensionMismatchError, HoloError, IllConditionedError, PreconditionError,
                     StructuralMismatchError)

Number = Union[float, Fraction]


def _rank(proj: np.ndarray) -> int:
    return int(round(np.trace(proj).real))


@dataclass(frozen=True, eq=False)
class EncodingData:
    V: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        V, P, Q = (np.asarray(a, dtype=complex) for a in (self.V, self.P, self.Q))
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)
        if P.shape != Q.shape or P.shape[0] != P.shape[1]:
            raise DimensionMismatchError("P and Q must be square and equal in size")
        if V.shape[1] % P.shape[0]:
            raise DimensionMismatchError("V's input dimension must be a multiple of the ancilla size")
        if np.abs(V.conj().T @ V - np.eye(V.shape[1])).max() > 1e-10:
            raise HoloError("V is not an isometry")
        for name, X in (("P", P), ("Q", Q)):
            if np.abs(X - X.conj().T).max() > 1e-10 or np.abs(X @ X - X).max() > 1e-10:
                raise HoloError(f"{name} is not an orthogonal projector")
        if np.abs(P @ Q).max() > 1e-10:
            raise HoloError("P and Q must be orthogonal")

    @property
    def p(self) -> int:
        return _rank(self.P)

    @property
    def q(self) -> int:
        return _rank(self.Q)

    @property
    def target_dim(self) -> int:
        return self.V.shape[1] // self.P.shape[0]

    @classmethod
    def trivial(cls, d: int) -> "EncodingData":
        return cls(np.eye(d), np.eye(1), np.zeros((1, 1)))


@dataclass(frozen=True)
class SimulationCertificate:
    delta: float
    eta: float
    eps: float
    measured: bool = False

    def __post_init__(self):
        if not self.delta > 0:
            raise HoloError("cutoff must be positive")
        if self.eta < 0 or self.eps < 0:
            raise HoloError("errors must be non-negative")

    def to_json(self) -> str:
        return json.dumps({"delta": self.delta, "eta": self.eta, "eps": self.eps,
                           "measured": self.measured}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SimulationCertificate":
        d = json.loads(text)
        return cls(float(d["delta"]), float(d["eta"]), float(d["eps"]), bool(d.get("measured", False)))


@dataclass(frozen=True)
class ExponentTuple:
    a: Number
    b: Number
    x: Number
    y: Number
    z: Number
    locality: str | None = None
    target_norm: float | None = None

    def __post_init__(self):
        if any(v < 0 for v in (self.a, self.b, self.x, self.y, self.z)):
            raise HoloError("exponents must be non-negative")


@dataclass(frozen=True)
class VeryGoodReport:
    ok: bool
    first_sum: Number       # a + 2b
    second_sum: Number      # x + 2y + z
    first_slack: Number
    second_slack: Number


def apply_encoding(enc: EncodingData, M: np.ndarray) -> np.ndarray:
    """V (M (x) P + conj(M) (x) Q) V^dag."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (enc.target_dim, enc.target_dim):
        raise DimensionMismatchError(f"operator is {M.shape}, encoding expects dimension {enc.target_dim}")
    inner = np.kron(M, enc.P) + np.kron(M.conj(), enc.Q)
    return enc.V @ inner @ enc.V.conj().T


def _code_basis(enc: EncodingData) -> np.ndarray:
    """Columns spanning C^d (x) range(P+Q), inside V's input space."""
    w, U = np.linalg.eigh(enc.P + enc.Q)
    anc = U[:, w > 0.5]
    return np.kron(np.eye(enc.target_dim), anc)


def _low_space(H_sim: np.ndarray, cutoff: float):
    w, U = np.linalg.eigh(H_sim)
    if len(w) and np.min(np.abs(w - cutoff)) <= 1e-8:
        raise IllConditionedError(f"an eigenvalue lies within 1e-8 of the cutoff {cutoff}")
    low = w < cutoff
    return w, U, low


def _aligned(enc, H_sim, cutoff):
    C = _code_basis(enc)
    K = C.shape[1]
    w, U, low = _low_space(H_sim, cutoff)
    if low.sum() != K:
        raise StructuralMismatchError(f"low-energy subspace has dimension {int(low.sum())}, expected {K}")
    U_low = U[:, low]
    B = enc.V @ C
    X, _, Yh = np.linalg.svd(U_low.conj().T @ B)
    V_t = U_low @ (X @ Yh)
    return C, w[low], U_low, B, V_t


def verify_simulation(H_sim: np.ndarray, H_target: np.ndarray, enc: EncodingData,
                      cutoff: float) -> SimulationCertificate:
    """Measured (cutoff, eta, eps) for H_sim simulating H_target under `enc`.

    V-tilde is the isometry onto the low-energy eigenspace closest to V on the
    code subspace (orthogonal Procrustes), so eta is the smallest achievable
    with that subspace.
    """
    H_sim = np.asarray(H_sim, dtype=complex)
    H_target = np.asarray(H_target, dtype=complex)
    if H_sim.shape[0] != enc.V.shape[0]:
        raise DimensionMismatchError("H_sim does not match V's output dimension")
    C, w_low, U_low, B, V_t = _aligned(enc, H_sim, cutoff)
    inner = np.kron(H_target, enc.P) + np.kron(H_target.conj(), enc.Q)
    E_tilde = V_t @ (C.conj().T @ inner @ C) @ V_t.conj().T
    H_low = (U_low * w_low) @ U_low.conj().T
    eps = float(np.linalg.norm(H_low - E_tilde, 2))
    eta = float(np.linalg.norm(V_t - B, 2))
    return SimulationCertificate(float(cutoff), eta, eps, measured=True)


@dataclass(frozen=True)
class PropertyReport:
    eigen_max_dev: float
    eigen_ok: bool
    partition_lhs: float
    partition_rhs: float
    partition_ok: bool
    dynamics_dev: float
    dynamics_bound: float
    dynamics_ok: bool

    @property
    def ok(self) -> bool:
        return self.eigen_ok and self.partition_ok and self.dynamics_ok


def _trace_norm(A: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh((A + A.conj().T) / 2)).sum())


def physical_property_checks(H_sim, H_target, cert: SimulationCertificate, enc: EncodingData,
                             beta: float, t: float, rho: np.ndarray | None = None,
                             seed: int = 0, tol: float = 1e-9) -> PropertyReport:
    """Eigenvalue pairing, partition-function and dynamics bounds for a certificate."""
    H_sim = np.asarray(H_sim, dtype=complex)
    H_target = np.asarray(H_target, dtype=complex)
    d = H_target.shape[0]
    pq = enc.p + enc.q
    D = H_sim.shape[0]
    eps, eta = cert.eps, cert.eta
    lam = np.linalg.eigvalsh(H_target)
    lam_s = np.linalg.eigvalsh(H_sim)
    # (i): block i of p+q simulator levels pairs with the i-th target level
    dev = 0.0
    for i in range(d):
        block = lam_s[i * pq:(i + 1) * pq]
        dev = max(dev, float(np.max(np.abs(block - lam[i]))))
    eigen_ok = dev <= eps + tol

    # (ii) in log space
    lz_s = logsumexp(-beta * lam_s)
    lz_t = logsumexp(-beta * lam) + math.log(pq)
    lhs = abs(math.expm1(lz_s - lz_t))
    hnorm = float(np.max(np.abs(lam)))
    rhs = math.exp(math.log(D) - beta * cert.delta - math.log(pq) - math.log(d) + beta * hnorm) \
        + math.expm1(eps * beta)
    partition_ok = lhs <= rhs + tol

    # (iii)
    if rho is None:
        rng = np.random.default_rng(seed)
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi /= np.linalg.norm(psi)
        _, anc_U = np.linalg.eigh(enc.P if enc.p else enc.Q)
        a = anc_U[:, -1]
        vec = enc.V @ np.kron(psi, a)
        rho = np.outer(vec, vec.conj())
    rho = np.asarray(rho, dtype=complex)
    E1 = apply_encoding(enc, np.eye(d))
    if np.abs(E1 @ rho - rho).max() > 1e-8:
        raise HoloError("rho is not supported on the encoded subspace")
    EH = apply_encoding(enc, H_target)

    def evolve(H):
        w, U = np.linalg.eigh(H)
        Ut = (U * np.exp(-1j * w * t)) @ U.conj().T
        return Ut @ rho @ Ut.conj().T

    dyn = _trace_norm(evolve(H_sim) - evolve(EH))
    bound = 2 * eps * t + 4 * eta
    return PropertyReport(dev, eigen_ok, lhs, rhs, partition_ok, dyn, bound, dyn <= bound + tol)


def concat_certificates(cert_a: SimulationCertificate, cert_b: SimulationCertificate,
                        norm_c: float) -> SimulationCertificate:
    """Certificate for A simulating C when A simulates B and B simulates C (constants 1).

    cert_a is the A->B stage, cert_b the B->C stage.
    """
    ea, eb, ha, hb, db = cert_a.eps, cert_b.eps, cert_a.eta, cert_b.eta, cert_b.delta
    if ea > norm_c:
        raise PreconditionError(f"eps_A = {ea} exceeds ||C|| = {norm_c}")
    if eb > norm_c:
        raise PreconditionError(f"eps_B = {eb} exceeds ||C|| = {norm_c}")
    if db < norm_c + 2 * ea + eb:
        raise PreconditionError(f"Delta_B = {db} below ||C|| + 2 eps_A + eps_B = {norm_c + 2 * ea + eb}")
    gap = db - norm_c + eb
    return SimulationCertificate(db - ea, ha + hb + ea / gap, ea + eb + ea * norm_c / gap,
                                 measured=cert_a.measured and cert_b.measured)


def very_good_check(e: ExponentTuple) -> VeryGoodReport:
    s1 = e.a + 2 * e.b
    s2 = e.x + 2 * e.y + e.z
    return VeryGoodReport(s1 <= 1 and s2 <= 1, s1, s2, 1 - s1, 1 - s2)


# ---------------------------------------------------------------- matrix text format

def write_hermitian(M: np.ndarray) -> str:
    M = np.asarray(M, dtype=complex)
    lines = [str(M.shape[0])]
    for row in M:
        lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def read_hermitian(text: str, tol: float = 1e-10) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    d = int(lines[0])
    if len(lines) != d + 1:
        raise DimensionMismatchError(f"header says {d} rows, found {len(lines) - 1}")
    M = np.zeros((d, d), dtype=complex)
    for i, ln in enumerate(lines[1:]):
        toks = ln.split()
        if len(toks) != d:
            raise DimensionMismatchError(f"row {i} has {len(toks)} entries, expected {d}")
        for j, tok in enumerate(toks):
            re, im = tok.split(",")
            M[i, j] = complex(float(re), float(im))
    if np.abs(M - M.conj().T).max() > tol:
        raise HoloError("matrix is not Hermitian")
    return M
