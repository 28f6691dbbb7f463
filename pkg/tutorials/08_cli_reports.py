"""
Reports from the command line
=============================

Every command reads one JSON config and writes `<command>.json` plus CSV data.
The same runs are available from Python through `holoqpv.cli.run`.
"""
# %%
import json
import tempfile

from holoqpv.cli import RunConfig, run

out = tempfile.mkdtemp()
rep = run("causal-check", RunConfig("causal-check", {"tau": 2, "R": 3, "n": 2, "m": 3,
                                                      "butterfly": {"R": 3}}, out))
print(json.dumps({k: rep["outputs"][k] for k in ("T1", "T2", "ratio")}))
print("digest:", rep["digest"])

# %% Equivalent shell call:
#   holoqpv causal-check --config cfg.json --out reports/
rep = run("verify-gadget", RunConfig("verify-gadget", {"Delta": 1e5}, out))
print("residual", rep["outputs"]["residual"], "slope", rep["outputs"]["slope"])
