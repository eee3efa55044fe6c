"""
A small verification campaign
=============================

The harness draws seeded random instances for every suite, exponent and
algebra, and collects one report per checked statement.  The same seed gives
the same report bodies, byte for byte.
"""

import tempfile
from pathlib import Path

from lpflow.harness import default_config, run_suite

cfg = default_config(
    suites=["bks", "thm03i", "id_corners", "chern"],
    p_values=[1.5, 3.0],
    algebras=[[{"size": 4}], [{"size": 2, "weight": 0.5}, {"size": 2, "weight": 2.5}]],
    trials=10,
)

with tempfile.TemporaryDirectory() as tmp:
    bundle = run_suite(cfg, tmp)
    print(f"{len(bundle.reports)} reports, all pass: {bundle.all_pass}")
    for row in bundle.summary():
        print(f"{row['name']:16s} p={str(row['p']):4s} {row['algebra']:12s} "
              f"pass rate {row['pass_rate']:.2f}  max ratio {row['max_ratio']:.3f}")
    first = Path(tmp, "reports.jsonl").read_bytes()
    run_suite(cfg, tmp)
    print("rerun byte-identical:", first == Path(tmp, "reports.jsonl").read_bytes())
