import csv
import json
import os
import sys

import numpy as np
import pytest

from holoqpv import cli
from holoqpv.causal_geometry import ConeProfile
from holoqpv.cli import COMMANDS, RunConfig, emit_plot_data, main, run
from holoqpv.errors import HoloError
from holoqpv.sim_framework import write_hermitian

# every public operation the library exposes, by module
OPERATIONS = {
    "hyperbolic_network": ["build_tessellation", "measure_growth_rate", "make_perfect_tensor",
                           "check_perfect_isometry", "contract_to_boundary_state", "bulk_to_boundary_isometry"],
    "entropy_bounds": ["min_cut", "greedy_geodesic", "entropy_bounds", "exact_region_entropy",
                       "mutual_info_budget", "qpv_total_entanglement"],
    "causal_geometry": ["layer_radius", "dilation_factor", "norm_schedule", "transit_times", "lr_velocity",
                        "bulk_lr_profile", "butterfly_profile"],
    "sim_framework": ["apply_encoding", "verify_simulation", "physical_property_checks", "concat_certificates",
                      "very_good_check"],
    "gadget_lab": ["build_subdivision_gadget", "second_order_residual", "verify_second_order", "delta_sequence",
                   "recursion_report", "perturbative_budget"],
    "budget_calculators": ["qpe_runtime", "history_state_errors", "required_heavy_norm_J", "scenario_report",
                           "attack_error_budget", "attack_norm_exponent"],
    "causality_probe": ["swap_exact_evolution", "chain_transfer_fidelity", "min_coupling_search",
                        "heuristic_chain_error"],
    "cli": ["run", "emit_plot_data"],
}


def _configs(tmp_path):
    H = np.diag([0.0, 1.0, 2.0])
    (tmp_path / "hs.txt").write_text(write_hermitian(H))
    (tmp_path / "ht.txt").write_text(write_hermitian(H))
    return {
        "build-network": {"p": 5, "q": 4, "R": 0, "isometry": True},
        "entropy-bounds": {"R": 1, "regions": ["9,10,12"], "random_regions": 3},
        "mi-budget": {"R": 2, "qpv_n": 2},
        "causal-check": {"tau": 2.0, "R": 3, "n": 2, "m": 3, "supports": [[0, 1], [1, 2]], "X": [0], "Y": [2],
                         "butterfly": {"R": 3, "directions": 4}},
        "verify-gadget": {"Delta_sweep": [1e3, 1e4, 1e5], "H_sim_file": str(tmp_path / "hs.txt"),
                          "H_target_file": str(tmp_path / "ht.txt"), "cutoff": 10.0},
        "recursion-report": {"r_max": 3, "x_max": 10},
        "budget-history": {"targets": {"eta": 0.9, "eps": 0.02, "Delta": 1.0},
                           "exponents": {"a": "1", "b": "0", "x": "1", "y": "0", "z": "0"}},
        "budget-attack": {"R_max": 4},
        "causality-probe": {"lengths": [2, 3, 4], "scan_taus": [1, 2]},
        "scenario": {"kind": "k_local", "n": 10, "R": 3},
    }


def test_every_command_runs(tmp_path):
    cfgs = _configs(tmp_path)
    assert set(cfgs) == set(COMMANDS)
    for name, params in cfgs.items():
        out = tmp_path / name
        rep = run(name, RunConfig(name, params, str(out)))
        assert rep["command"] == name and "digest" in rep
        saved = json.loads((out / f"{name}.json").read_text())
        assert saved["outputs"] == rep["outputs"]


def test_causal_check_report():
    rep = run("causal-check", RunConfig("causal-check", {"tau": 2, "R": 3, "n": 2, "m": 3}))
    assert rep["outputs"]["T1"] == 60.0 and rep["outputs"]["T2"] == 24.0


def test_verify_gadget_default(tmp_path):
    rep = run("verify-gadget", RunConfig("verify-gadget", {}, str(tmp_path)))
    o = rep["outputs"]
    assert o["residual"] <= 1e-10
    for key in ("delta0", "Delta", "p", "measured_eps", "measured_eta", "slope"):
        assert key in o
    assert (tmp_path / "gadget_target.txt").exists()


def test_unknown_command_exits_nonzero(capsys):
    assert main(["no-such-command"]) != 0
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["type"] == "HoloError"
    with pytest.raises(HoloError):
        run("nope", RunConfig("nope"))


def test_invalid_config_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"tau": 0.5}')
    assert main(["causal-check", "--config", str(bad)]) == 2
    assert "error" in json.loads(capsys.readouterr().err)
    bad.write_text("[1, 2]")
    assert main(["scenario", "--config", str(bad)]) == 2


def test_main_with_flags(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"params": {"R": 1}, "seed": 5}))
    assert main(["entropy-bounds", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", "9",
                 "--dense-limit", "22"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["inputs"]["seed"] == 9 and rep["inputs"]["dense_limit"] == 22
    assert rep["outputs"]["exact"]


def test_determinism(tmp_path):
    params = {"R": 1, "random_regions": 6}
    a = run("entropy-bounds", RunConfig("entropy-bounds", params, str(tmp_path / "a"), seed=3))
    b = run("entropy-bounds", RunConfig("entropy-bounds", params, str(tmp_path / "b"), seed=3))
    assert a["digest"] == b["digest"]
    strip = lambda r: {k: v for k, v in r.items() if k != "wall_clock"}
    assert json.dumps(strip(a), sort_keys=True) == json.dumps(strip(b), sort_keys=True)
    c = run("entropy-bounds", RunConfig("entropy-bounds", params, None, seed=4))
    assert c["digest"] != a["digest"]


def test_emit_plot_data(tmp_path):
    with pytest.raises(HoloError):
        emit_plot_data({}, str(tmp_path))
    with pytest.raises(HoloError):
        emit_plot_data([], str(tmp_path))
    with pytest.raises(HoloError):
        emit_plot_data(ConeProfile((), (), ()), str(tmp_path))
    rep = run("causal-check", RunConfig("causal-check", {"butterfly": {"R": 4}}, str(tmp_path)))
    assert rep["outputs"]["butterfly"]["csv"] == ["butterfly_canonical.csv", "butterfly_uniform.csv"]
    read = lambda name: [float(r["velocity"]) for r in csv.DictReader(open(tmp_path / name))]
    canon, uni = read("butterfly_canonical.csv"), read("butterfly_uniform.csv")
    assert np.std(canon) / np.mean(canon) <= 0.3
    assert all(b > a for a, b in zip(uni, uni[1:]))


def test_every_operation_reachable(tmp_path):
    """Profile a run of every command and check each library operation was entered."""
    import holoqpv
    wanted = {}
    for mod, names in OPERATIONS.items():
        module = getattr(holoqpv, mod) if mod != "cli" else cli
        for name in names:
            fn = getattr(module, name)
            wanted[(fn.__code__.co_filename, fn.__code__.co_name)] = f"{mod}.{name}"
    seen = set()

    def hook(frame, event, arg):
        if event == "call":
            seen.add((frame.f_code.co_filename, frame.f_code.co_name))

    sys.setprofile(hook)
    try:
        for name, params in _configs(tmp_path).items():
            run(name, RunConfig(name, params, str(tmp_path / name)))
    finally:
        sys.setprofile(None)
    missing = sorted(v for k, v in wanted.items() if k not in seen)
    assert not missing, missing
