#!/usr/bin/env python3
"""Generate the checked-in oracle fixtures and golden reference values.

Run from the repository root:

    python3 tools/gen_golden.py

Writes tests/data/{ring6,ladder8,random10,hexpair12}.json and
tests/data/golden_ed.json.  Every golden number is reproducible through the
CLI, e.g.

    hexsse oracle ed --graph tests/data/ring6.json --beta 3.3 --g 0.5
    hexsse oracle classical --graph tests/data/hexpair12.json --beta 1.0
"""
import json
import os
import sys

sys.path.insert(0, "src")

from hexsse.oracle import (  # noqa: E402
    SpinGraph,
    classical_enumerate,
    double_hexagon_graph,
    exact_thermal,
    ladder_graph,
    random_spin_graph,
    ring_graph,
)

OUT = "tests/data"
BETAS = (1.0, 3.3)
FIELDS = (0.1, 0.5, 1.0)


def main():
    os.makedirs(OUT, exist_ok=True)
    graphs = {
        "ring6": ring_graph(6, 1),
        "ladder8": ladder_graph(4),
        "random10": random_spin_graph(10),
        "hexpair12": double_hexagon_graph(),
    }
    for name, g in graphs.items():
        with open(f"{OUT}/{name}.json", "w", encoding="utf-8") as fh:
            fh.write(g.to_json())

    golden = {
        "generated_by": "python3 tools/gen_golden.py",
        "reproduce_ed": "hexsse oracle ed --graph tests/data/<graph>.json --beta <beta> --g <g>",
        "reproduce_classical": "hexsse oracle classical --graph tests/data/hexpair12.json --beta 1.0",
        "ed": {},
    }
    for name in ("ring6", "ladder8", "random10"):
        g0 = graphs[name]
        for beta in BETAS:
            for g in FIELDS:
                gg = SpinGraph(n=g0.n, bonds=g0.bonds, g=g)
                e = exact_thermal(gg, beta).energy_density
                golden["ed"][f"{name}|beta={beta}|g={g}"] = e
                print(f"{name} beta={beta} g={g}: e = {e:.12f}")

    res = classical_enumerate(graphs["hexpair12"], 1.0)
    golden["classical_hexpair12_beta1"] = {
        "energy_density": res.energy_density,
        "abs_mH": res.abs_mH,
        "abs_psiH": res.abs_psiH,
        "ground_degeneracy": res.report.degeneracy,
    }
    print("hexpair12 classical beta=1:", golden["classical_hexpair12_beta1"])

    with open(f"{OUT}/golden_ed.json", "w", encoding="utf-8") as fh:
        json.dump(golden, fh, indent=1)
    print(f"wrote {OUT}/golden_ed.json")


if __name__ == "__main__":
    main()
