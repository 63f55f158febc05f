"""Generate the bundled synthetic calibration files.

Error rates are drawn from log-normal distributions with a fixed seed so the
files are reproducible. Topologies follow the 27-qubit and 65-qubit heavy-hex
coupling maps.
"""
import json
import math
import random
import sys
from pathlib import Path

FALCON_27 = [
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10),
    (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14),
    (14, 16), (15, 18), (16, 19), (17, 18), (18, 21), (19, 20), (19, 22),
    (21, 23), (22, 25), (23, 24), (24, 25), (25, 26),
]


def hummingbird_65():
    rows = [list(range(0, 10)), list(range(13, 24)), list(range(27, 38)),
            list(range(41, 52)), list(range(55, 65))]
    edges = []
    for row in rows:
        edges += [(a, b) for a, b in zip(row, row[1:])]
    bridges = [
        (0, 10, 13), (4, 11, 17), (8, 12, 21),
        (15, 24, 29), (19, 25, 33), (23, 26, 37),
        (27, 38, 41), (31, 39, 45), (35, 40, 49),
        (43, 52, 56), (47, 53, 60), (51, 54, 64),
    ]
    for a, m, b in bridges:
        edges += [(a, m), (m, b)]
    return sorted(edges)


def lognormal(rng, median, sigma, lo, hi):
    return min(hi, max(lo, median * math.exp(rng.gauss(0.0, sigma))))


def device(n, edges, seed):
    rng = random.Random(seed)
    links = [[a, b, round(lognormal(rng, 0.011, 0.55, 0.003, 0.09), 6)]
             for a, b in edges]
    # a handful of degraded couplers, as seen on real calibrations
    for idx in rng.sample(range(len(links)), max(1, len(links) // 12)):
        links[idx][2] = round(min(0.2, links[idx][2] * rng.uniform(3.0, 6.0)), 6)
    qubit = [round(lognormal(rng, 3.0e-4, 0.5, 1e-4, 3e-3), 7) for _ in range(n)]
    readout = [round(lognormal(rng, 0.018, 0.6, 0.004, 0.12), 6) for _ in range(n)]
    return {"num_qubits": n, "links": links, "qubit_errors": qubit,
            "readout_errors": readout}


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "heavy_hex_27.json").write_text(
        json.dumps(device(27, FALCON_27, 27), indent=1) + "\n")
    (out / "heavy_hex_65.json").write_text(
        json.dumps(device(65, hummingbird_65(), 65), indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/devices")
