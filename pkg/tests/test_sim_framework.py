from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from holoqpv.errors import (DimensionMismatchError, HoloError, IllConditionedError, PreconditionError,
                            StructuralMismatchError)
from holoqpv.sim_framework import (EncodingData, ExponentTuple, SimulationCertificate, apply_encoding,
                                   concat_certificates, physical_property_checks, read_hermitian,
                                   verify_simulation, very_good_check, write_hermitian)


def rand_herm(rng, d, scale=1.0):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = (A + A.conj().T) / 2
    return scale * H / np.linalg.norm(H, 2)


def rand_isometry(rng, D, d):
    return unitary_group.rvs(D, random_state=rng)[:, :d]


def encoded_instance(rng, d, D, Delta, pert):
    """V H V^dag plus a heavy penalty off the code space and a small random perturbation."""
    H = rand_herm(rng, d)
    V = rand_isometry(rng, D, d)
    H_sim = V @ H @ V.conj().T + Delta * (np.eye(D) - V @ V.conj().T) + rand_herm(rng, D, pert)
    return H, H_sim, EncodingData(V, np.eye(1), np.zeros((1, 1)))


def test_identity_encoding_is_exact(rng):
    H = rand_herm(rng, 8)
    cert = verify_simulation(H, H, EncodingData.trivial(8), 5.0)
    assert cert.delta == 5.0
    assert cert.eta <= 1e-9 and cert.eps <= 1e-9
    assert cert.measured


def test_small_commuting_perturbation(rng):
    H = rand_herm(rng, 4)
    w, U = np.linalg.eigh(H)
    K = U @ np.diag(rng.choice([-1.0, 1.0], size=4)) @ U.conj().T
    cert = verify_simulation(H + 1e-3 * K, H, EncodingData.trivial(4), 10.0)
    assert cert.eps <= 1e-3 + 1e-9


def test_apply_encoding_examples(rng):
    M = rand_herm(rng, 3).real
    M = (M + M.T) / 2
    assert np.allclose(apply_encoding(EncodingData.trivial(3), M), M)
    P, Q = np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 0.0])
    V = rand_isometry(rng, 12, 9)
    enc = EncodingData(V, P, Q)
    E1 = apply_encoding(enc, np.eye(3))
    assert np.allclose(E1, V @ np.kron(np.eye(3), P + Q) @ V.conj().T)
    with pytest.raises(DimensionMismatchError):
        apply_encoding(enc, np.eye(4))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2), st.integers(0, 10 ** 6))
def test_apply_encoding_repeats_spectrum(d, extra, seed):
    rng = np.random.default_rng(seed)
    M = rand_herm(rng, d)
    P, Q = np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 0.0])
    D = 3 * d + extra
    enc = EncodingData(rand_isometry(rng, D, 3 * d), P, Q)
    got = np.sort(np.linalg.eigvalsh(apply_encoding(enc, M)))
    lam = np.linalg.eigvalsh(M)
    want = np.sort(np.concatenate([lam, lam, np.zeros(D - 2 * d)]))
    assert np.allclose(got, want, atol=1e-9)


def test_encoding_validation(rng):
    with pytest.raises(HoloError):
        EncodingData(np.ones((4, 2)), np.eye(1), np.zeros((1, 1)))
    with pytest.raises(HoloError):
        EncodingData(np.eye(2), np.eye(2), np.eye(2))
    with pytest.raises(DimensionMismatchError):
        EncodingData(np.eye(3), np.eye(2), np.zeros((2, 2)))


def test_structural_and_ill_conditioned_errors(rng):
    H = np.diag([0.0, 1.0, 2.0, 3.0])
    with pytest.raises(StructuralMismatchError):
        verify_simulation(H, np.diag([0.0, 1.0]), EncodingData(np.eye(4)[:, :2], np.eye(1), np.zeros((1, 1))), 2.5)
    with pytest.raises(IllConditionedError):
        verify_simulation(H, H, EncodingData.trivial(4), 2.0)


def test_conjugate_encoding_exact(rng):
    d = 3
    H = rand_herm(rng, d)
    P, Q = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    V = rand_isometry(rng, 8, 2 * d)
    enc = EncodingData(V, P, Q)
    H_sim = apply_encoding(enc, H) + 50 * (np.eye(8) - V @ V.conj().T)
    cert = verify_simulation(H_sim, H, enc, 25.0)
    assert cert.eps < 1e-9 and cert.eta < 1e-9
    rep = physical_property_checks(H_sim, H, cert, enc, beta=0.0, t=3.0)
    assert rep.ok
    assert rep.eigen_max_dev < 1e-9


def test_exact_simulation_saturates(rng):
    H = rand_herm(rng, 4)
    enc = EncodingData.trivial(4)
    cert = verify_simulation(H, H, enc, 10.0)
    rep = physical_property_checks(H, H, cert, enc, beta=1.0, t=2.0)
    assert rep.eigen_max_dev < 1e-12 and rep.dynamics_dev < 1e-9 and rep.partition_lhs < 1e-12
    # beta = 0: Z counts dimensions
    rep0 = physical_property_checks(H, H, cert, enc, beta=0.0, t=2.0)
    assert rep0.partition_lhs < 1e-12


def test_dynamics_bound_example(rng):
    H = rand_herm(rng, 4)
    w, U = np.linalg.eigh(H)
    K = U @ np.diag([1.0, -1.0, 1.0, -1.0]) @ U.conj().T
    enc = EncodingData.trivial(4)
    cert = verify_simulation(H + 1e-3 * K, H, enc, 10.0)
    rep = physical_property_checks(H + 1e-3 * K, H, cert, enc, beta=1.0, t=10.0)
    assert rep.dynamics_dev <= 0.02 + 4 * cert.eta + 1e-12
    assert rep.ok


def test_rho_outside_code_rejected(rng):
    H, H_sim, enc = encoded_instance(rng, 2, 6, 20, 0.01)
    cert = verify_simulation(H_sim, H, enc, 10)
    v = np.zeros(6)
    v[0] = 1
    perp = (np.eye(6) - enc.V @ enc.V.conj().T) @ v
    perp /= np.linalg.norm(perp)
    with pytest.raises(HoloError):
        physical_property_checks(H_sim, H, cert, enc, 1.0, 1.0, rho=np.outer(perp, perp.conj()))


def test_property_bounds_on_random_certificates():
    rng = np.random.default_rng(77)
    for trial in range(24):
        nq = int(rng.integers(2, 9))
        D = 2 ** nq
        d = int(rng.integers(1, min(8, D)))
        Delta = float(rng.uniform(10, 60))
        H, H_sim, enc = encoded_instance(rng, d, D, Delta, float(rng.uniform(1e-3, 0.2)))
        cert = verify_simulation(H_sim, H, enc, Delta / 2)
        rep = physical_property_checks(H_sim, H, cert, enc, beta=float(rng.uniform(0, 2)),
                                       t=float(rng.uniform(0.1, 10)), seed=trial)
        assert rep.eigen_ok, (trial, rep)
        assert rep.dynamics_ok, (trial, rep)


def test_certificate_json_round_trip():
    c = SimulationCertificate(3.0, 0.25, 1e-7, True)
    assert SimulationCertificate.from_json(c.to_json()) == c
    with pytest.raises(HoloError):
        SimulationCertificate(0.0, 0.0, 0.0)
    with pytest.raises(HoloError):
        SimulationCertificate(1.0, -1.0, 0.0)


def test_concat_examples():
    exact = concat_certificates(SimulationCertificate(100, 0, 0), SimulationCertificate(50, 0, 0), 1.0)
    assert (exact.delta, exact.eta, exact.eps) == (50, 0, 0)
    c = concat_certificates(SimulationCertificate(100, 0.001, 0.01), SimulationCertificate(10, 0.001, 0.01), 1.0)
    assert c.eps == pytest.approx(0.02 + 0.01 / 9.01, abs=1e-15)
    assert c.eps == pytest.approx(0.02111, abs=1e-5)
    assert c.eta == pytest.approx(0.002 + 0.01 / 9.01)
    assert c.delta == pytest.approx(9.99)


def test_concat_preconditions_named():
    with pytest.raises(PreconditionError, match="Delta_B"):
        concat_certificates(SimulationCertificate(100, 0, 0.1), SimulationCertificate(1.1, 0, 0.1), 1.0)
    with pytest.raises(PreconditionError, match="eps_A"):
        concat_certificates(SimulationCertificate(100, 0, 2.0), SimulationCertificate(10, 0, 0.1), 1.0)
    with pytest.raises(PreconditionError, match="eps_B"):
        concat_certificates(SimulationCertificate(100, 0, 0.1), SimulationCertificate(10, 0, 2.0), 1.0)


errs = st.floats(0, 0.3)


@settings(max_examples=100, deadline=None)
@given(errs, errs, errs, errs, st.floats(0, 0.2))
def test_concat_monotone(ea, ha, eb, hb, bump):
    # increasing eps_B lowers the eps_A/(Delta_B - ||C|| + eps_B) term, so only these three are monotone
    def go(ea, ha, eb, hb):
        return concat_certificates(SimulationCertificate(100, ha, ea), SimulationCertificate(20, hb, eb), 1.0)
    base = go(ea, ha, eb, hb)
    for bumped in (go(ea + bump, ha, eb, hb), go(ea, ha + bump, eb, hb), go(ea, ha, eb, hb + bump)):
        assert bumped.eps >= base.eps - 1e-15
        assert bumped.eta >= base.eta - 1e-15


def test_very_good_examples():
    assert very_good_check(ExponentTuple(0, 0, 0, 0, 0)).ok
    r = very_good_check(ExponentTuple(Fraction(1, 3), 1, 0, 0, 0))
    assert not r.ok and r.first_sum == Fraction(7, 3)
    edge = very_good_check(ExponentTuple(1, 0, 1, 0, 0))
    assert edge.ok and edge.first_slack == 0 and edge.second_slack == 0
    with pytest.raises(HoloError):
        ExponentTuple(-1, 0, 0, 0, 0)


def test_hermitian_text_round_trip(rng):
    H = rand_herm(rng, 5)
    back = read_hermitian(write_hermitian(H))
    assert np.array_equal(back, H)
    with pytest.raises(DimensionMismatchError):
        read_hermitian("3\n1,0 0,0\n")
    with pytest.raises(HoloError):
        read_hermitian("2\n0,0 1,0\n0,0 0,0\n")
