# %% [markdown]
# The same pipeline through the command line entry point.

# %%
import csv
import json
import tempfile
from pathlib import Path

from bundlex.cli import run_command

tmp = Path(tempfile.mkdtemp())
spec, report, layout = tmp / "d2.json", tmp / "r.json", tmp / "layout.csv"

# %%
print("example:", run_command(["example", "demailly", "--k", "2", "--out", str(spec)]))
print("verify: ", run_command(["verify", "--spec", str(spec), "--report", str(report)]))
print("layout: ", run_command(["layout", "--spec", str(spec), "--out", str(layout)]))
print("k=1:    ", run_command(["example", "demailly", "--k", "1", "--out", str(tmp / "x.json")]))

# %%
rep = json.loads(report.read_text())
print(rep["tool"], rep["version"], "seed", rep["seed"], "passed", rep["report"]["passed"])
print(rep["report"]["structure"])

# %%
for row in csv.DictReader(layout.open()):
    print(row)
