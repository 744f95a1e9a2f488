"""
Running scenarios from a config
===============================

The harness turns a small INI file into a CSV row.  The same config always
gives the same bytes, so CSVs can be diffed across runs.
"""

import os
import tempfile

from opsample import harness

text = """
[experiment]
scenario = uniform
seed = 7

[model]
spacing = 1.25
lattice_min = -64
lattice_max = 64
n_t = 8
"""

cfg = harness.parse_config(text)
out_dir = tempfile.mkdtemp(prefix="opsample-")
cfg.out_dir = out_dir
cfg.svg = "sweep.svg"

rows = harness.sweep(cfg, "pad", [16, 32, 64, 128])
for r in rows:
    print(r.params, r.max_error)

print(open(os.path.join(out_dir, "results.csv")).read())
print("plot:", os.path.join(out_dir, "sweep.svg"))
