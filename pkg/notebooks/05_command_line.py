"""
Runs, reports and experiments from the command line interface
=============================================================

The same entry points the ``monodromy`` command uses, called from Python.
"""

import tempfile
from pathlib import Path

from monodromy.cli import RunConfig, cmd_experiment, cmd_stats, experiment_csv, main, run_solve

config = RunConfig(family="crn-small", stop="stabilization:10", seed=3)
report = run_solve(config)
print("crn-small:", len(report.solutions), "solutions, stop", report.stop_reason)
print("path counts:", report.counts)

# Configs round-trip through JSON so a run can be replayed exactly.
again = run_solve(RunConfig.from_json(config.to_json()))
print("replay identical:", again.solutions == report.solutions)

rows = cmd_experiment(RunConfig(family="katsura:5", graph="complete:3,2", seed=0), 5)
print(experiment_csv(rows))

print(cmd_stats(5))

# Exit status 0: the known count was reached.  The report goes to --out.
out = Path(tempfile.mkdtemp()) / "report.json"
print("exit status:", main(["solve", "--family", "nash:3x3", "--seed", "1", "--out", str(out)]))
print("report size:", out.stat().st_size, "bytes")
