#!/usr/bin/env python3
# Copyright 2026 The Tunescape Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent centrality oracle for the bundled fixtures.

Builds the fitness flow graph with plain Python, solves the PageRank fixed
point with a dense numpy linear solve and prints the centrality proportion for
several margins as JSON. The output is committed next to the fixture and the
CLI test compares against it.

usage: centrality_oracle.py SPACE_JSON DATA_CSV [adjacent1|hamming1]
"""

import csv
import json
import sys

import numpy as np

DAMPING = 0.85
MARGINS = [0.0, 0.05, 0.1, 0.2, 0.5]


def main():
    space_path, data_path = sys.argv[1], sys.argv[2]
    policy = sys.argv[3] if len(sys.argv) > 3 else "adjacent1"
    with open(space_path) as f:
        space = json.load(f)
    params = space["parameters"]
    position = [{v: k for k, v in enumerate(p["values"])} for p in params]

    ords, fitness = [], []
    with open(data_path) as f:
        for row in csv.DictReader(f):
            if row["status"] != "ok":
                continue
            ords.append(tuple(position[i][int(row[p["name"]])] for i, p in enumerate(params)))
            fitness.append(float(row["objective_ms"]))
    n = len(ords)
    node_of = {o: i for i, o in enumerate(ords)}

    succ = [[] for _ in range(n)]
    for a, oa in enumerate(ords):
        for dim in range(len(params)):
            size = len(params[dim]["values"])
            if policy == "adjacent1":
                moves = [oa[dim] - 1, oa[dim] + 1]
            else:
                moves = [v for v in range(size) if v != oa[dim]]
            for v in moves:
                if not 0 <= v < size:
                    continue
                ob = oa[:dim] + (v,) + oa[dim + 1:]
                b = node_of.get(ob)
                if b is not None and fitness[b] < fitness[a]:
                    succ[a].append(b)

    # Column-stochastic transition matrix; dangling columns spread uniformly.
    m = np.zeros((n, n))
    for a in range(n):
        if succ[a]:
            for b in succ[a]:
                m[b, a] += 1.0 / len(succ[a])
        else:
            m[:, a] = 1.0 / n
    rank = np.linalg.solve(np.eye(n) - DAMPING * m, np.full(n, (1.0 - DAMPING) / n))
    rank /= rank.sum()

    minima = [a for a in range(n) if not succ[a]]
    optimum = min(fitness)
    out = {"nodes": n, "edges": sum(len(s) for s in succ), "minima": len(minima),
           "neighborhood": policy, "proportion": {}}
    total = sum(rank[a] for a in minima)
    for p in MARGINS:
        good = sum(rank[a] for a in minima
                   if fitness[a] < (1.0 + p) * optimum or fitness[a] == optimum)
        out["proportion"][repr(p)] = good / total
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
