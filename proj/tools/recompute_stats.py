# Copyright 2026 The qabias Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Recompute stats.json from runs.csv and compare every statistic.

usage: recompute_stats.py SWEEP_DIR [SWEEP_DIR ...]

Exit status 0 when every value agrees to 1e-12, 1 otherwise.
"""

import csv
import json
import math
import sys
from collections import OrderedDict
from pathlib import Path

TOL = 1e-12


def mean_std(xs):
    n = len(xs)
    if n == 0:
        return {"mean": 0.0, "std": 0.0, "stderr": 0.0}
    mean = math.fsum(xs) / n
    std = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / n)
    return {"mean": mean, "std": std, "stderr": std / math.sqrt(n)}


def load_runs(path):
    """Per cell (n, protocol, d): ordered instance_id -> list of rows."""
    cells = OrderedDict()
    m_of = {}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            n = int(row["n"])
            d = None if row["d"] == "-" else int(row["d"])
            key = (n, row["protocol"], d)
            m_of[n] = int(row["m"])
            cells.setdefault(key, OrderedDict()).setdefault(row["instance_id"], []).append(row)
    return cells, m_of


def cell_stats(results, standard, fraction):
    ids = list(standard)
    if list(results) != ids:
        raise ValueError("cell and standard runs cover different instances")
    p_st, p_f, p_avg, steps = [], [], [], []
    ham_st, ham_f, cost_st, cost_f = [], [], [], []
    seeds = []
    counts = {"exact_st": 0, "exact_f": 0, "cap": 0, "up": 0}
    inv = []
    for i in ids:
        runs = results[i]
        st = standard[i][-1]
        fin = runs[-1]
        seeds.append(int(st["instance_seed"]))
        p_st.append(float(st["success_prob"]))
        p_f.append(float(fin["success_prob"]))
        p_avg.append(math.fsum(float(r["success_prob"]) for r in runs) / len(runs))
        steps.append(float(len(runs)))
        ham_st.append(float(st["hamming"]))
        ham_f.append(float(fin["hamming"]))
        cost_st.append(float(st["cost"]))
        cost_f.append(float(fin["cost"]))
        counts["exact_st"] += int(st["hamming"]) == 0
        counts["exact_f"] += int(fin["hamming"]) == 0
        counts["cap"] += fin["terminated_by"] == "step-cap"
        counts["up"] += int(fin["cost"]) > int(st["cost"])
        inv.append(1.0 / p_st[-1] if p_st[-1] > 0 else math.inf)

    n = len(ids)
    ps = mean_std(p_st)
    pf = mean_std(p_f)
    tau = math.fsum(inv) / n if all(math.isfinite(v) for v in inv) else math.inf
    order = sorted(range(n), key=lambda k: (p_st[k], seeds[k]))
    k = max(1, math.floor(fraction * n + 0.5)) if n else 0
    hard = order[:k]
    return {
        "instances": n,
        "p_standard": ps,
        "p_final": pf,
        "p_bar": mean_std(p_avg)["mean"],
        "gamma": pf["mean"] / ps["mean"] if ps["mean"] > 0 else math.inf,
        "tau_standard": tau,
        "tau_standard_infinite": not math.isfinite(tau),
        "steps": mean_std(steps),
        "hamming_standard": mean_std(ham_st),
        "hamming_final": mean_std(ham_f),
        "cost_standard": mean_std(cost_st),
        "cost_final": mean_std(cost_f),
        "exact_matches_standard": counts["exact_st"],
        "exact_matches_final": counts["exact_f"],
        "step_cap_count": counts["cap"],
        "cost_increases": counts["up"],
        "hardest": {
            "fraction": fraction,
            "count": len(hard),
            "p_standard": math.fsum(p_st[j] for j in hard) / len(hard),
            "p_bar": math.fsum(p_avg[j] for j in hard) / len(hard),
            "p_final": math.fsum(p_f[j] for j in hard) / len(hard),
        },
    }


def compare(expected, actual, where, problems):
    if isinstance(expected, dict):
        for key, value in expected.items():
            if key not in actual:
                problems.append(f"{where}.{key}: missing in stats.json")
            else:
                compare(value, actual[key], f"{where}.{key}", problems)
        return
    if isinstance(expected, bool) or isinstance(expected, int):
        if expected != actual:
            problems.append(f"{where}: expected {expected}, found {actual}")
        return
    if actual is None:
        actual = math.inf
    if math.isinf(expected) or math.isinf(actual):
        if expected != actual:
            problems.append(f"{where}: expected {expected}, found {actual}")
    elif abs(expected - actual) > TOL * max(1.0, abs(expected)):
        problems.append(f"{where}: expected {expected!r}, found {actual!r}")


def check_dir(directory):
    directory = Path(directory)
    stats = json.loads((directory / "stats.json").read_text())
    fraction = stats["metadata"]["spec"]["hardest_fraction"]
    cells, m_of = load_runs(directory / "runs.csv")
    problems = []
    published = {(c["n"], c["protocol"], c["d"]): c for c in stats["cells"]}
    if set(published) != set(cells):
        problems.append(f"cell sets differ: {sorted(map(str, published))} vs {sorted(map(str, cells))}")
    for key, results in cells.items():
        n = key[0]
        expected = cell_stats(results, cells[(n, "standard", None)], fraction)
        expected["m"] = m_of[n]
        if key in published:
            compare(expected, published[key], f"{directory.name} n={n} {key[1]} d={key[2]}", problems)
    return len(cells), problems


def main(argv):
    if len(argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    failed = False
    for directory in argv[1:]:
        count, problems = check_dir(directory)
        for p in problems:
            print(p)
        print(f"{directory}: {count} cells, {len(problems)} mismatches")
        failed = failed or bool(problems)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
