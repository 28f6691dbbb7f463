import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import tessellation
from holoqpv.entropy_bounds import (FlowGraph, Region, entropy_bounds, entropy_of_qubits,
                                    exact_region_entropy, greedy_geodesic, min_cut, mutual_info_budget,
                                    qpv_total_entanglement)
from holoqpv.errors import DimensionMismatchError, HoloError
from holoqpv.hyperbolic_network import (BOUNDARY, BULK, CONTRACTED, contract_to_boundary_state,
                                        network_from_legs, single_tensor_network)


def brute_force_cut(net, region, include_bulk=False):
    """Minimum over every tensor subset placed on the region's side."""
    region = set(region)
    best = math.inf
    N = len(net.tensors)
    for mask in range(2 ** N):
        inside = {t for t in range(N) if mask >> t & 1}
        cost = 0
        for leg in net.legs:
            if leg.kind == CONTRACTED:
                cost += leg.qubits * ((leg.a[0] in inside) != (leg.b[0] in inside))
            elif leg.kind == BOUNDARY:
                cost += leg.qubits * ((leg.a[0] in inside) != (leg.id in region))
            elif include_bulk:
                cost += leg.qubits * (leg.a[0] in inside)
        best = min(best, cost)
    return best


@st.composite
def small_networks(draw):
    N = draw(st.integers(1, 4))
    legs = []
    for t in range(N):
        legs.append((BULK, t, None, 1))
    n_edges = draw(st.integers(0, 4))
    for _ in range(n_edges):
        a = draw(st.integers(0, N - 1))
        b = draw(st.integers(0, N - 1))
        if a != b:
            legs.append((CONTRACTED, a, b, draw(st.integers(1, 3))))
    n_bdy = draw(st.integers(1, max(1, 12 - len(legs))))
    for _ in range(n_bdy):
        legs.append((BOUNDARY, draw(st.integers(0, N - 1)), None, draw(st.integers(1, 2))))
    legs = legs[:12]
    net = network_from_legs([0] * N, legs)
    b = list(net.boundary_legs)
    region = draw(st.lists(st.sampled_from(b), unique=True)) if b else []
    return net, region


@settings(max_examples=200, deadline=None)
@given(small_networks(), st.booleans())
def test_min_cut_matches_enumeration(case, include_bulk):
    net, region = case
    assert len(net.legs) <= 12
    for side in ("min", "max"):
        cut = min_cut(net, region, include_bulk=include_bulk, side=side)
        assert cut.capacity == brute_force_cut(net, region, include_bulk)
        assert cut.region_side | cut.other_side == frozenset(range(len(net.tensors)))


def test_single_cell_cuts_enumerated():
    net = tessellation(5, 4, 0)
    b = net.boundary_legs
    for k in range(6):
        for region in itertools.combinations(b, k):
            assert min_cut(net, region).capacity == brute_force_cut(net, region)
            assert min_cut(net, region, include_bulk=True).capacity == brute_force_cut(net, region, True)


def test_min_cut_examples():
    net = tessellation(5, 4, 0)
    b = net.boundary_legs
    assert min_cut(net, []).capacity == 0
    assert min_cut(net, [b[0]]).capacity == 1
    assert min_cut(net, b, include_bulk=True).capacity == 1
    assert min_cut(net, Region.parse(",".join(map(str, b[:2])))).capacity == 2


def test_min_cut_rejects_unknown_leg():
    net = tessellation(5, 4, 0)
    with pytest.raises(HoloError):
        min_cut(net, [net.bulk_legs[0]])
    with pytest.raises(HoloError):
        min_cut(net, [999])
    with pytest.raises(HoloError):
        min_cut(net, [net.boundary_legs[0]] * 2)


def test_min_cut_sides_bracket():
    net = tessellation(5, 4, 2)
    b = net.boundary_legs
    region = b[:17]
    lo = min_cut(net, region, side="min")
    hi = min_cut(net, region, side="max")
    assert lo.capacity == hi.capacity
    assert lo.region_side <= hi.region_side


def test_region_parse():
    assert Region.parse("3, 1,2").legs == (3, 1, 2)
    assert Region.parse("").legs == ()


# ---------------------------------------------------------------- greedy

def test_greedy_empty_region():
    g = greedy_geodesic(tessellation(5, 4, 1), [])
    assert g.overlap_capacity == 0
    assert g.cut_a == ()


def test_greedy_single_cell():
    net = tessellation(5, 4, 0)
    b = net.boundary_legs
    # 3 of 6 legs crossing meets the half rule, so the tensor is absorbed from the region side
    g = greedy_geodesic(net, b[:3])
    assert 0 in g.absorbed_a
    assert g.converged
    assert entropy_bounds(net, b[:1]) == (1, 1)
    assert entropy_bounds(net, []) == (0, 0)


def test_greedy_is_a_halted_local_rule():
    net = tessellation(5, 4, 1)
    rng = np.random.default_rng(5)
    b = list(net.boundary_legs)
    for _ in range(20):
        region = set(rng.choice(b, size=int(rng.integers(1, len(b))), replace=False).tolist())
        g = greedy_geodesic(net, region)
        assert g.converged
        inside = g.absorbed_a
        for t in net.tensors:
            if t.id in inside:
                continue
            crossing = 0
            for lid in t.legs:
                leg = net.legs[lid]
                if leg.kind == BOUNDARY:
                    crossing += lid in region
                elif leg.kind == CONTRACTED:
                    other = leg.b[0] if leg.a[0] == t.id else leg.a[0]
                    crossing += other in inside
            if crossing:
                assert 2 * crossing < len(t.legs)
        cap_a = sum(net.legs[l].qubits for l in g.cut_a)
        cap_c = sum(net.legs[l].qubits for l in g.cut_complement)
        assert g.overlap_capacity <= min(cap_a, cap_c)
        assert greedy_geodesic(net, region) == g


def test_disconnected_region_defeats_greedy():
    net = tessellation(5, 4, 1)
    rng = np.random.default_rng(0)
    b = list(net.boundary_legs)
    gaps = []
    for _ in range(200):
        region = rng.choice(b, size=int(rng.integers(2, len(b) - 1)), replace=False).tolist()
        lo, hi = entropy_bounds(net, region)
        gaps.append(hi - lo)
    assert max(gaps) > 0
    assert min(gaps) >= 0


# ---------------------------------------------------------------- exact entropies

def test_entropy_of_simple_states():
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert entropy_of_qubits(bell, [0]) == pytest.approx(1.0, abs=1e-12)
    prod = np.kron([1, 0], [0.6, 0.8])
    assert entropy_of_qubits(prod, [1]) == pytest.approx(0.0, abs=1e-12)
    assert entropy_of_qubits(bell, []) == 0.0
    with pytest.raises(DimensionMismatchError):
        entropy_of_qubits(bell, [2])


def test_single_leg_of_codeword_is_maximally_mixed():
    net = tessellation(5, 4, 0)
    state = contract_to_boundary_state(net)
    for lid in net.boundary_legs:
        assert exact_region_entropy(state, [lid]) == pytest.approx(1.0, abs=1e-10)


def _sandwich(net, region, state):
    lo, hi = entropy_bounds(net, region)
    exact = exact_region_entropy(state, region)
    assert lo - 1e-8 <= exact <= hi + 1e-8, (region, lo, exact, hi)
    return lo, exact, hi


def test_sandwich_single_cell_all_regions():
    net = tessellation(5, 4, 0)
    state = contract_to_boundary_state(net)
    for k in range(6):
        for region in itertools.combinations(net.boundary_legs, k):
            _sandwich(net, region, state)


def test_sandwich_first_ring_random_regions():
    net = tessellation(5, 4, 1)
    state = contract_to_boundary_state(net)
    rng = np.random.default_rng(11)
    b = list(net.boundary_legs)
    for _ in range(40):
        region = rng.choice(b, size=int(rng.integers(1, len(b))), replace=False).tolist()
        _sandwich(net, region, state)


def test_bell_pair_budget():
    net = single_tensor_network(np.eye(2) / math.sqrt(2), [BOUNDARY, BOUNDARY])
    a, b = net.boundary_legs
    state = contract_to_boundary_state(net)
    exact_mi = 2 * exact_region_entropy(state, [a]) - exact_region_entropy(state, [a, b])
    assert exact_mi == pytest.approx(2.0, abs=1e-12)
    mi = mutual_info_budget(net, [a], [b])
    assert mi.upper_bits >= exact_mi - 1e-12


def test_budget_with_empty_region():
    net = tessellation(5, 4, 1)
    b = net.boundary_legs
    V = b[:4]
    mi = mutual_info_budget(net, V, [])
    assert mi.gamma_w == 0
    assert mi.upper_bits <= min_cut(net, V).capacity


def test_budget_rejects_overlap():
    net = tessellation(5, 4, 1)
    b = net.boundary_legs
    with pytest.raises(HoloError):
        mutual_info_budget(net, b[:3], b[2:5])


def test_antipodal_quarters():
    R = 2
    net = tessellation(5, 4, R)
    b = net.boundary_legs
    q = len(b) // 4
    mi = mutual_info_budget(net, b[:q], b[2 * q:3 * q])
    # measured cut sizes exceed the loose 2R estimate on this tiling (frozen)
    assert (mi.gamma_v, mi.gamma_w, mi.overlap) == (6, 4, 3)
    assert 0 <= mi.upper_bits <= (mi.gamma_v + mi.gamma_w)
    assert mi.c1_bits_per_n == 2.0 * (mi.gamma_v + mi.gamma_w)


def test_exact_mutual_information_within_budget():
    net = tessellation(5, 4, 1)
    state = contract_to_boundary_state(net)
    rng = np.random.default_rng(3)
    b = list(net.boundary_legs)
    for _ in range(15):
        perm = rng.permutation(b).tolist()
        kv, kw = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        V, W = perm[:kv], perm[kv:kv + kw]
        S = lambda r: exact_region_entropy(state, r)
        exact = S(V) + S(W) - S(V + W)
        assert exact >= -1e-9
        assert exact <= mutual_info_budget(net, V, W).upper_bits + 1e-8


def test_qpv_totals():
    assert qpv_total_entanglement(3, 2, 0, 0) == (0.0, 0.0)
    per, total = qpv_total_entanglement(3, 2)
    assert total == 8 * 3 * 2 == 48
    assert per == 24


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(1, 5), st.integers(0, 12), st.integers(0, 12))
def test_qpv_totals_monotone(R, n, gv, gw):
    base = qpv_total_entanglement(R, n, gv, gw)[1]
    assert qpv_total_entanglement(R, n + 1, gv, gw)[1] >= base
    assert qpv_total_entanglement(R, n, gv + 1, gw)[1] >= base
    assert qpv_total_entanglement(R, n, gv, gw + 1)[1] >= base
    assert qpv_total_entanglement(R + 1, n)[1] >= qpv_total_entanglement(R, n)[1]


def test_flow_graph_reuse():
    net = tessellation(5, 4, 2)
    g = FlowGraph(net)
    b = net.boundary_legs
    for k in (1, 5, 9):
        assert min_cut(net, b[:k], graph=g).capacity == min_cut(net, b[:k]).capacity
