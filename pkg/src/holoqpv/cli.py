"""Command-line front end: one JSON config in, a JSON report (plus CSV data) out.

    holoqpv <command> [--config cfg.json] [--out DIR] [--seed N] [--dense-limit N]

The config is either a flat parameter object or {"params": {...}, "seed": .., "dense_limit": ..};
command-line flags win over the file. Reports have sorted keys and a sha256 digest of
everything except wall-clock time, so a fixed config and seed give identical digests.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from . import budget_calculators as bc
from . import causal_geometry as cg
from . import causality_probe as cp
from . import entropy_bounds as eb
from . import gadget_lab as gl
from . import hyperbolic_network as hn
from . import sim_framework as sf
from .errors import HoloError
from .logscale import LogScaled

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    seed: int = 0
    dense_limit: int | None = None


def _plain(x):
    """JSON-ready copy of report values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        seq = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in seq]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, LogScaled):
        return x.to_dict()
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator, "value": float(x)}
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _digest(report: dict) -> str:
    body = {k: v for k, v in report.items() if k not in ("wall_clock", "digest")}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def _scalar(v):
    """Number, or {"ln": x} / {"log_tau": x, "tau": t} for values beyond float range."""
    if isinstance(v, dict):
        if "ln" in v:
            return LogScaled.from_ln(float(v["ln"]))
        return LogScaled(1, float(v["log_tau"]), float(v["tau"]))
    return float(v)


def emit_plot_data(data, out_dir: str, stem: str = "profile") -> list[str]:
    """CSV files for a cone profile, a {panel: profile} mapping, or scan rows.

    A mapping writes one file per panel, `<stem>_<panel>.csv`.
    """
    os.makedirs(out_dir, exist_ok=True)
    if isinstance(data, cg.ConeProfile):
        data = {"": data}
    if isinstance(data, dict):
        if not data:
            raise HoloError("nothing to emit")
        paths = []
        for name in sorted(data):
            prof = data[name]
            if not prof.rows:
                raise HoloError(f"profile {name!r} is empty")
            path = os.path.join(out_dir, f"{stem}_{name}.csv" if name else f"{stem}.csv")
            prof.to_csv(path)
            paths.append(path)
        return paths
    rows = list(data)
    if not rows:
        raise HoloError("nothing to emit")
    path = os.path.join(out_dir, f"{stem}.csv")
    cp.write_scan_csv(rows, path)
    return [path]


# ---------------------------------------------------------------- commands

def _network(params: dict):
    if "edge_list" in params:
        with open(params["edge_list"]) as fh:
            return hn.parse_edge_list(fh.read()), None
    spec, kind, _ = hn.load_network_config({"p": 5, "q": 4, "R": 1, **params})
    net = hn.build_tessellation(spec, kind)
    return net, net.tensor_kind


def _dense_limit(cfg: RunConfig) -> int:
    if cfg.dense_limit is not None:
        return cfg.dense_limit
    return int(cfg.params.get("dense_limit", hn.DEFAULT_DENSE_LIMIT))


def _cmd_build_network(cfg: RunConfig, out: str | None) -> dict:
    p = cfg.params
    net, kind = _network(p)
    res = {"tensors": len(net.tensors), "layer_counts": net.layer_counts,
           "boundary_qubits": net.boundary_qubits, "bulk_qubits": net.bulk_qubits,
           "contracted_legs": len(net.contracted_legs), "tensor_kind": kind}
    if net.spec is not None and net.spec.R >= 2:
        res["growth_rate"] = hn.measure_growth_rate(net)
    tensor = p.get("perfect_tensor", {"legs": 6, "nu": 2} if kind == "five_qubit" else None)
    if tensor:
        t = hn.make_perfect_tensor(int(tensor["legs"]), int(tensor["nu"]))
        k = int(tensor.get("power", 1))
        if k > 1:
            t = hn.tensor_power(t, k)
        rep = hn.check_perfect_isometry(t)
        res["perfect_tensor"] = {"legs": t.legs, "nu": t.nu, "max_deviation": rep.max_deviation,
                                 "bipartitions": len(rep.deviations), "perfect": rep.perfect}
    limit = _dense_limit(cfg)
    if p.get("isometry") and net.boundary_qubits + net.bulk_qubits <= limit:
        M = hn.bulk_to_boundary_isometry(net, limit)
        res["isometry"] = {"shape": M.shape,
                           "deviation": float(np.abs(M.conj().T @ M - np.eye(M.shape[1])).max())}
    if out:
        path = os.path.join(out, "network.edges")
        with open(path, "w") as fh:
            fh.write(net.to_edge_list())
        res["edge_list_file"] = os.path.basename(path)
    return res


def _regions(net, params: dict, seed: int) -> list[tuple[int, ...]]:
    regions = [eb.Region.parse(r).legs if isinstance(r, str) else tuple(r) for r in params.get("regions", [])]
    count = int(params.get("random_regions", 0 if regions else 5))
    rng = np.random.default_rng(seed)
    b = list(net.boundary_legs)
    for _ in range(count):
        size = int(rng.integers(1, len(b)))
        regions.append(tuple(sorted(int(x) for x in rng.choice(b, size=size, replace=False))))
    return regions


def _cmd_entropy_bounds(cfg: RunConfig, out: str | None) -> dict:
    net, _ = _network(cfg.params)
    limit = _dense_limit(cfg)
    state = None
    if net.boundary_qubits <= limit and (net.tensor_kind == "five_qubit" or net.arrays):
        state = hn.contract_to_boundary_state(net, dense_limit=limit)
    graph = eb.FlowGraph(net)
    rows = []
    for legs in _regions(net, cfg.params, cfg.seed):
        region = eb.Region(legs)
        cut = eb.min_cut(net, region, graph=graph)
        greedy = eb.greedy_geodesic(net, region)
        lower, upper = eb.entropy_bounds(net, region)
        row = {"region": legs, "lower_bits": lower, "upper_bits": upper, "min_cut_legs": cut.legs,
               "greedy_overlap_legs": greedy.overlap, "greedy_converged": greedy.converged}
        if state is not None:
            exact = eb.exact_region_entropy(state, region)
            row["exact_bits"] = exact
            row["sandwich_ok"] = lower - 1e-8 <= exact <= upper + 1e-8
        rows.append(row)
    res = {"regions": rows, "boundary_legs": len(net.boundary_legs), "exact": state is not None}
    if state is not None:
        # single-qubit sanity value straight from the amplitudes
        res["first_qubit_entropy"] = eb.entropy_of_qubits(state.amplitudes, [0], state.qubits)
    return res


def _cmd_mi_budget(cfg: RunConfig, out: str | None) -> dict:
    p = cfg.params
    net, _ = _network(p)
    b = list(net.boundary_legs)
    quarter = max(1, len(b) // 4)
    V = eb.Region.parse(p["V"]).legs if "V" in p else tuple(b[:quarter])
    W = eb.Region.parse(p["W"]).legs if "W" in p else tuple(b[2 * quarter:3 * quarter])
    mi = eb.mutual_info_budget(net, V, W)
    R = int(p.get("qpv_R", net.spec.R if net.spec else 1))
    n = int(p.get("qpv_n", 1))
    per_round, total = eb.qpv_total_entanglement(R, n, p.get("gamma_v"), p.get("gamma_w"))
    return {"V": V, "W": W, "upper_bits": mi.upper_bits, "gamma_v": mi.gamma_v, "gamma_w": mi.gamma_w,
            "overlap": mi.overlap, "c1_bits_per_n": mi.c1_bits_per_n,
            "qpv": {"R": R, "n": n, "per_round_bits": per_round, "total_bits": total}}


def _cmd_causal_check(cfg: RunConfig, out: str | None) -> dict:
    p = cfg.params
    params = cg.DilationParams(float(p.get("tau", 2.0)), int(p.get("R", 3)), int(p.get("n", 1)), int(p.get("m", 1)))
    T1, T2, ratio = cg.transit_times(params)
    sched = cg.norm_schedule(params)
    res = {"T1": T1, "T2": T2, "ratio": ratio,
           "dilation": [cg.dilation_factor(x, params) for x in range(params.R + 1)],
           "dilation_exact": [cg.dilation_factor(x, params, exact=True) for x in range(params.R + 1)],
           "radius": [cg.layer_radius(x, params.tau, params.n) for x in range(params.R + 1)],
           "norms": sched.norms, "bulk_velocity": cg.bulk_lr_profile(sched)}
    lr = p.get("lieb_robinson", {"k": 2, "s": 1.0, "mu": 1.0})
    res["lr_velocity"] = cg.lr_velocity(cg.LRParams(int(lr["k"]), float(lr["s"]), float(lr["mu"])))
    if "supports" in p:
        res["interaction_distance"] = cg.interaction_distance(p["supports"], p["X"], p["Y"])
    bf = p.get("butterfly")
    if bf:
        spec = hn.TessellationSpec(int(bf.get("p", 5)), int(bf.get("q", 4)), int(bf.get("R", 4)))
        net = hn.build_tessellation(spec, None)
        tau_fit = hn.measure_growth_rate(net) if spec.R >= 2 else params.tau
        canon = cg.butterfly_profile(net, cg.norm_schedule(cg.DilationParams(tau_fit, spec.R)),
                                     int(bf.get("directions", 8)))
        uni = cg.butterfly_profile(net, cg.uniform_schedule(spec.R), int(bf.get("directions", 8)))
        v = canon.velocities
        res["butterfly"] = {"tau_fit": tau_fit, "canonical_velocity": v, "uniform_velocity": uni.velocities,
                            "canonical_cv": float(np.std(v) / np.mean(v)), "widths": canon.widths}
        if out:
            paths = emit_plot_data({"canonical": canon, "uniform": uni}, out, "butterfly")
            res["butterfly"]["csv"] = [os.path.basename(x) for x in paths]
    return res


def _cmd_verify_gadget(cfg: RunConfig, out: str | None) -> dict:
    p = cfg.params
    pa, pb = p.get("P_A", "X"), p.get("P_B", "Z")
    delta0, Delta, mediator = float(p.get("delta0", 0.01)), float(p.get("Delta", 1e6)), int(p.get("p", 3))
    eps, eta = float(p.get("eps", 1e-3)), float(p.get("eta", 1e-2))
    g = gl.build_subdivision_gadget(pa, pb, delta0, Delta, mediator, include_h1=bool(p.get("include_h1", True)))
    rep = gl.verify_second_order(g, eps, eta)
    cert = rep.certificate
    enc = sf.EncodingData(g.W, np.eye(1), np.zeros((1, 1)))
    props = sf.physical_property_checks(g.H_tilde, g.H_target, cert, enc, float(p.get("beta", 1.0)),
                                        float(p.get("t", 1.0)), seed=cfg.seed)
    E = sf.apply_encoding(enc, g.H_target)
    # second stage: the target simulates itself exactly; chain the two certificates
    norm_c = float(np.linalg.norm(g.H_target, 2))
    stage_b = sf.verify_simulation(g.H_target, g.H_target, sf.EncodingData.trivial(g.H_target.shape[0]),
                                   norm_c + 2 * cert.eps + 1.0)
    chain = sf.concat_certificates(cert, stage_b, norm_c)
    res = {"delta0": delta0, "Delta": Delta, "p": mediator, "residual": gl.second_order_residual(g),
           "measured_eps": cert.eps, "measured_eta": cert.eta, "certificate": json.loads(cert.to_json()),
           "Lambda": rep.Lambda, "required_Delta": rep.required_Delta, "condition_met": rep.condition_met,
           "encoded_target_norm": float(np.linalg.norm(E, 2)),
           "properties": {"eigen_max_dev": props.eigen_max_dev, "eigen_ok": props.eigen_ok,
                          "partition_ok": props.partition_ok, "dynamics_dev": props.dynamics_dev,
                          "dynamics_bound": props.dynamics_bound, "dynamics_ok": props.dynamics_ok},
           "chained": json.loads(chain.to_json())}
    sweep = [float(D) for D in p.get("Delta_sweep", [1e3, 1e4, 1e5, 1e6, 1e7])]
    if sweep:
        measured = [gl.verify_second_order(gl.build_subdivision_gadget(pa, pb, delta0, D, mediator), eps, eta)
                    .certificate.eps for D in sweep]
        res["sweep"] = [{"Delta": D, "eps": e} for D, e in zip(sweep, measured)]
        if len(sweep) >= 2:
            res["slope"] = float(np.polyfit(np.log(sweep), np.log(measured), 1)[0])
    if "H_sim_file" in p:
        with open(p["H_sim_file"]) as fh:
            Hs = sf.read_hermitian(fh.read())
        with open(p["H_target_file"]) as fh:
            Ht = sf.read_hermitian(fh.read())
        c = sf.verify_simulation(Hs, Ht, sf.EncodingData.trivial(Ht.shape[0]), float(p.get("cutoff", 1e3)))
        res["file_certificate"] = json.loads(c.to_json())
    if out:
        with open(os.path.join(out, "gadget_target.txt"), "w") as fh:
            fh.write(sf.write_hermitian(g.H_target))
    return res


def _cmd_recursion_report(cfg: RunConfig, out: str | None) -> dict:
    p = cfg.params
    s = gl.RecursionSchedule(float(p.get("delta0", 1.0)), int(p.get("r_max", 4)), float(p.get("tau", 2.0)),
                             int(p.get("R", 1)), int(p.get("n", 2)), float(p.get("b", 1.0)))
    rep = gl.recursion_report(s)
    x_max = int(p.get("x_max", 30))
    seq_ok = all(a == b for a, b in (gl.delta_sequence(x, p.get("delta0", 1)) for x in range(x_max + 1)))
    budget, degenerate = gl.perturbative_budget(s.tau, s.n, max(s.R, 1))
    res = {"rows": [{"round": r.round, "log_tau_ht": r.h_target.log_tau, "log_tau_eps": r.eps.log_tau,
                     "log_tau_eta": r.eta.log_tau} for r in rep.rows],
           "eps": rep.eps, "eta": rep.eta, "Delta": rep.Delta, "h_sim": rep.h_sim,
           "identity_holds": rep.identity_holds, "degenerate": rep.degenerate,
           "delta_closed_form_ok": seq_ok, "x_max": x_max,
           "budget_log2": budget.log2, "budget_degenerate": degenerate}
    if out:
        rep.to_csv(os.path.join(out, "recursion.csv"))
    return res


def _cmd_budget_history(cfg: RunConfig, out: str | None) -> dict:
    p = cfg.params
    q = bc.qpe_runtime(bc.QPEParams(_scalar(p.get("d", 16)), _scalar(p.get("N", 100)), _scalar(p.get("h_norm", 1)),
                                    _scalar(p.get("eps_prime", 0.01)), _scalar(p.get("t_u", 1))))
    model = bc.HistoryStateModel(_scalar(p.get("J", {"ln": 200})), q.T_PE, float(p.get("lam", 1.0)))
    eta, eps, Delta = bc.history_state_errors(model, _scalar(p.get("h_norm", 1)), _scalar(p.get("eps_prime", 0.01)))
    J_req = bc.required_heavy_norm_J(Delta, model.T, _scalar(p.get("h_norm", 1)), eta, eps)
    exps = bc.sparse_history_exponents()
    vg = sf.very_good_check(exps)
    res = {"T_U": q.T_U, "T_PE": q.T_PE, "coarse": q.coarse, "eta": eta, "eps": eps, "Delta": Delta,
           "required_J": J_req,
           "sparse_exponents": {"a": exps.a, "b": exps.b, "x": exps.x, "y": exps.y, "z": exps.z},
           "very_good": {"ok": vg.ok, "first_sum": vg.first_sum, "second_sum": vg.second_sum}}
    if "targets" in p:
        t = p["targets"]
        res["J_for_targets"] = bc.heavy_norm_for_targets(q.T_PE, model.lam, _scalar(p.get("h_norm", 1)),
                                                         _scalar(p.get("eps_prime", 0.01)), _scalar(t["eta"]),
                                                         _scalar(t["eps"]), _scalar(t["Delta"]))
    if "exponents" in p:
        e = {k: Fraction(str(v)) for k, v in p["exponents"].items()}
        r = sf.very_good_check(sf.ExponentTuple(e["a"], e["b"], e["x"], e["y"], e["z"]))
        res["custom_very_good"] = {"ok": r.ok, "first_sum": r.first_sum, "second_sum": r.second_sum}
    return res


def _cmd_budget_attack(cfg: RunConfig, out: str | None) -> dict:
    p = cfg.params
    n = int(p.get("n", 4))
    taus = [float(t) for t in p.get("taus", [1.5, 2.0, 3.0])]
    Rs = list(range(1, int(p.get("R_max", 10)) + 1))
    table = {}
    for tau in taus:
        rows = []
        for R in Rs:
            b = bc.attack_error_budget(bc.canonical_attack_schedule(tau, R, n))
            rows.append({"R": R, "n_swap_chain": n * b.swap_chain, "n_central": n * b.central, "n_total": n * b.total})
        table[repr(tau)] = rows
        if out:
            bc.write_attack_table(os.path.join(out, f"attack_tau{tau:g}.csv"), tau, n, Rs)
    ex = p.get("exponents", {"a": 1, "b": 1, "x": 1, "y": 1, "z": 1})
    r, R = int(p.get("r", 0)), int(p.get("R", 3))
    ne = bc.attack_norm_exponent(ex["a"], ex["b"], ex["x"], ex["y"], ex["z"], r, n, taus[0], R)
    return {"n": n, "budgets": table,
            "swap_chain_bound": {k: max(row["n_swap_chain"] for row in v) for k, v in table.items()},
            "norm_exponent": {"first": ne.first, "second": ne.second, "first_power": ne.first_power,
                              "second_power": ne.second_power}}


def _cmd_causality_probe(cfg: RunConfig, out: str | None) -> dict:
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(int(p.get("swap_trials", 20))):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        t = float(rng.uniform(0, 2 * math.pi))
        worst = max(worst, float(np.abs(cp.swap_exact_evolution(psi, t) - cp.swap_closed_form(psi, t)).max()))
    Ls = [int(L) for L in p.get("lengths", range(2, 9))]
    eps = float(p.get("eps", 0.9))
    cap = float(p.get("cap", 1000.0))
    searches = [cp.min_coupling_search(L, eps, cap) for L in Ls]
    tau2 = cp.min_coupling_search(2, 1e-4, cap)
    # cross-check the sector evolution against the dense 2^L propagator on the smallest chains
    dense_dev = max(abs(cp.chain_transfer_fidelity(cp.ChainSpec(L, 1.3), cp.PROBE_STATES["+"]).fidelity
                        - cp.dense_transfer_fidelity(cp.ChainSpec(L, 1.3), cp.PROBE_STATES["+"]).fidelity)
                    for L in Ls if L <= 6)
    taus = [float(t) for t in p.get("scan_taus", [1, 2, 4, 8])]
    rows = cp.transfer_scan(Ls, taus)
    res = {"swap_max_error": worst, "eps": eps, "dense_cross_check": dense_dev,
           "tau_star": [{"L": s.L, "found": s.found, "tau": s.tau, "infidelity": s.infidelity} for s in searches],
           "tau_star_two_qubits": tau2.tau,
           "heuristic": [{"links": L - 1, "tau": L - 1, "error": cp.heuristic_chain_error(L - 1, L - 1)} for L in Ls]}
    if out:
        res["csv"] = [os.path.basename(x) for x in emit_plot_data(rows, out, "transfer_scan")]
    return res


def _cmd_scenario(cfg: RunConfig, out: str | None) -> dict:
    p = dict(cfg.params)
    kind = p.pop("kind", "k_local")
    args = {k: p[k] for k in ("beta", "alpha_p", "beta_p", "k") if k in p}
    if "J" in p:
        args["J"] = _scalar(p["J"])
    rep = bc.scenario_report(kind, int(p.get("n", 16)), int(p.get("R", 3)), float(p.get("tau", 2.0)),
                             float(p.get("alpha", 5.0)), **args)
    return rep.to_dict()


COMMANDS: dict[str, Callable[[RunConfig, str | None], dict]] = {
    "build-network": _cmd_build_network,
    "entropy-bounds": _cmd_entropy_bounds,
    "mi-budget": _cmd_mi_budget,
    "causal-check": _cmd_causal_check,
    "verify-gadget": _cmd_verify_gadget,
    "recursion-report": _cmd_recursion_report,
    "budget-history": _cmd_budget_history,
    "budget-attack": _cmd_budget_attack,
    "causality-probe": _cmd_causality_probe,
    "scenario": _cmd_scenario,
}


def run(command: str, config: RunConfig) -> dict:
    """Dispatch, write `<out>/<command>.json` when an output directory is set, return the report."""
    if command not in COMMANDS:
        raise HoloError(f"unknown command {command!r}; choose from {sorted(COMMANDS)}")
    if not isinstance(config.params, dict):
        raise HoloError("config params must be a JSON object")
    np.random.seed(config.seed)
    if config.out:
        os.makedirs(config.out, exist_ok=True)
    start = time.perf_counter()
    outputs = COMMANDS[command](config, config.out)
    report = {"schema_version": SCHEMA_VERSION, "command": command, "tool_version": __version__,
              "inputs": _plain({"params": config.params, "seed": config.seed, "dense_limit": config.dense_limit}),
              "outputs": _plain(outputs)}
    report["digest"] = _digest(report)
    report["wall_clock"] = time.perf_counter() - start
    if config.out:
        with open(os.path.join(config.out, f"{command}.json"), "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return report


def load_config(command: str, path: str | None, out: str | None, seed: int | None,
                dense_limit: int | None) -> RunConfig:
    raw = {}
    if path:
        with open(path) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise HoloError("config file must hold a JSON object")
    params = raw.get("params", {k: v for k, v in raw.items() if k not in ("seed", "dense_limit", "out")})
    return RunConfig(command, params, out if out is not None else raw.get("out"),
                     seed if seed is not None else int(raw.get("seed", 0)),
                     dense_limit if dense_limit is not None else raw.get("dense_limit"))


def _error(command: str | None, exc: BaseException) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "tool_version": __version__,
            "error": {"type": type(exc).__name__, "message": str(exc)}}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="holoqpv", description=__doc__.splitlines()[0])
    parser.add_argument("command")
    parser.add_argument("--config")
    parser.add_argument("--out")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--dense-limit", type=int)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.out, args.seed, args.dense_limit)
        report = run(args.command, cfg)
    except (HoloError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps(_error(args.command, exc), sort_keys=True), file=sys.stderr)
        return 2
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
