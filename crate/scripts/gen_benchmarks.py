"""Generate the bundled 30-program benchmark suite.

Programs are small-scale textbook circuits written against the restricted
OpenQASM 2 subset the parser accepts: multi-controlled gates are expanded into
cx + single-qubit gates and every program ends with terminal measurements.
"""
import math
import sys
from pathlib import Path

PI = math.pi


class Prog:
    def __init__(self, n, nc=None):
        self.n = n
        self.nc = n if nc is None else nc
        self.lines = []

    def g(self, name, *qs, params=None):
        args = ",".join(f"q[{q}]" for q in qs)
        if params is None:
            self.lines.append(f"{name} {args};")
        else:
            ps = ",".join(params)
            self.lines.append(f"{name}({ps}) {args};")

    def cx(self, a, b):
        self.g("cx", a, b)

    def u1(self, lam, q):
        self.g("u1", q, params=[lam])

    def ccx(self, a, b, c):
        self.g("h", c); self.cx(b, c); self.g("tdg", c); self.cx(a, c)
        self.g("t", c); self.cx(b, c); self.g("tdg", c); self.cx(a, c)
        self.g("t", b); self.g("t", c); self.g("h", c); self.cx(a, b)
        self.g("t", a); self.g("tdg", b); self.cx(a, b)

    def cz(self, a, b):
        self.g("h", b); self.cx(a, b); self.g("h", b)

    def ch(self, a, b):
        self.g("s", b); self.g("h", b); self.g("t", b); self.cx(a, b)
        self.g("tdg", b); self.g("h", b); self.g("sdg", b)

    def cu1(self, lam, a, b):
        self.u1(f"{lam}/2", a); self.cx(a, b); self.u1(f"-{lam}/2", b)
        self.cx(a, b); self.u1(f"{lam}/2", b)

    def cu1f(self, lam, a, b):
        self.g("u1", a, params=[f"{lam / 2:.10f}"]); self.cx(a, b)
        self.g("u1", b, params=[f"{-lam / 2:.10f}"]); self.cx(a, b)
        self.g("u1", b, params=[f"{lam / 2:.10f}"])

    def rzz(self, theta, a, b):
        self.cx(a, b); self.g("rz", b, params=[theta]); self.cx(a, b)

    def cswap(self, a, b, c):
        self.cx(c, b); self.ccx(a, b, c); self.cx(c, b)

    def barrier(self):
        self.lines.append("barrier q;")

    def measure_all(self):
        for i in range(self.n):
            self.lines.append(f"measure q[{i}] -> c[{i}];")

    def measure(self, pairs):
        for q, c in pairs:
            self.lines.append(f"measure q[{q}] -> c[{c}];")

    def text(self):
        head = ["OPENQASM 2.0;", 'include "qelib1.inc";',
                f"qreg q[{self.n}];", f"creg c[{self.nc}];"]
        return "\n".join(head + self.lines) + "\n"


def maj(p, a, b, c):
    p.cx(c, b); p.cx(c, a); p.ccx(a, b, c)


def uma(p, a, b, c):
    p.ccx(a, b, c); p.cx(c, a); p.cx(a, b)


def adder_n10():
    # cin=0, a=1..4, b=5..8, cout=9
    p = Prog(10, 5)
    for q in (1, 3, 5, 6, 8):
        p.g("x", q)
    maj(p, 0, 5, 1)
    maj(p, 1, 6, 2)
    maj(p, 2, 7, 3)
    maj(p, 3, 8, 4)
    p.cx(4, 9)
    uma(p, 3, 8, 4)
    uma(p, 2, 7, 3)
    uma(p, 1, 6, 2)
    uma(p, 0, 5, 1)
    p.measure([(5, 0), (6, 1), (7, 2), (8, 3), (9, 4)])
    return p


def adder_n4():
    p = Prog(4)
    p.g("x", 0); p.g("x", 1); p.g("h", 3); p.cx(2, 3)
    p.g("t", 0); p.g("t", 1); p.g("t", 2); p.g("tdg", 3)
    p.cx(0, 1); p.cx(2, 3); p.cx(3, 0); p.cx(1, 2); p.cx(0, 1); p.cx(2, 3)
    p.g("tdg", 0); p.g("tdg", 1); p.g("tdg", 2); p.g("t", 3)
    p.cx(0, 1); p.cx(2, 3); p.g("s", 3); p.cx(3, 0); p.g("h", 3)
    p.measure_all()
    return p


def basis_change_n3():
    p = Prog(3)
    p.g("x", 0)
    angles = [0.3, -1.1, 0.7, 0.25, -0.6, 1.3]
    for i, th in enumerate(angles):
        a, b = (0, 1) if i % 2 == 0 else (1, 2)
        p.g("rz", a, params=[f"{th}"]); p.g("rx", b, params=["pi/2"])
        p.cx(a, b); p.g("rx", a, params=[f"{th / 2}"]); p.g("rz", b, params=[f"{-th / 2}"])
        p.cx(a, b); p.g("rx", b, params=["-pi/2"])
    p.measure_all()
    return p


def basis_trotter_n4():
    p = Prog(4)
    p.g("x", 0); p.g("x", 1)
    for step in range(3):
        for a, b in ((0, 1), (2, 3), (1, 2)):
            p.g("h", a); p.g("h", b); p.rzz(f"{0.21 + 0.05 * step:.2f}", a, b)
            p.g("h", a); p.g("h", b)
            p.g("rx", a, params=["pi/2"]); p.g("rx", b, params=["pi/2"])
            p.rzz(f"{0.17 + 0.03 * step:.2f}", a, b)
            p.g("rx", a, params=["-pi/2"]); p.g("rx", b, params=["-pi/2"])
        for q in range(4):
            p.g("rz", q, params=[f"{0.1 * (q + 1):.1f}"])
    p.measure_all()
    return p


def cat_state_n4():
    p = Prog(4)
    p.g("h", 0)
    for i in range(3):
        p.cx(i, i + 1)
    p.measure_all()
    return p


def deutsch_n2():
    p = Prog(2, 1)
    p.g("x", 1); p.g("h", 0); p.g("h", 1); p.cx(0, 1); p.g("h", 0)
    p.measure([(0, 0)])
    return p


def dnn(n, layers):
    p = Prog(n)
    k = 0
    for layer in range(layers):
        for q in range(n):
            k += 1
            p.g("ry", q, params=[f"{0.37 * k % 3.1:.4f}"])
            p.g("rz", q, params=[f"{0.53 * k % 2.9:.4f}"])
        for q in range(n - 1):
            p.cx(q, q + 1)
        if n > 2:
            p.cx(n - 1, 0)
    for q in range(n):
        p.g("ry", q, params=[f"{0.11 * (q + 1):.2f}"])
    p.measure_all()
    return p


def error_correctiond3_n5():
    p = Prog(5)
    p.g("h", 0); p.g("t", 0); p.g("h", 0)
    p.cx(0, 1); p.cx(0, 2)
    p.g("x", 1)
    p.barrier()
    p.cx(0, 3); p.cx(1, 3); p.cx(1, 4); p.cx(2, 4)
    p.ccx(3, 4, 1)
    p.g("x", 4); p.ccx(3, 4, 0); p.g("x", 4)
    p.g("x", 3); p.ccx(3, 4, 2); p.g("x", 3)
    p.measure_all()
    return p


def fredkin_n3():
    p = Prog(3)
    p.g("x", 0); p.g("x", 1)
    p.cswap(0, 1, 2)
    p.measure_all()
    return p


def grover_n2():
    p = Prog(2)
    p.g("h", 0); p.g("h", 1)
    p.cz(0, 1)
    p.g("h", 0); p.g("h", 1); p.g("x", 0); p.g("x", 1)
    p.cz(0, 1)
    p.g("x", 0); p.g("x", 1); p.g("h", 0); p.g("h", 1)
    p.measure_all()
    return p


def hhl_n7():
    # 1 ancilla (0), 4 clock qubits (1..4), 2-qubit b register (5,6)
    p = Prog(7)
    p.g("h", 5); p.g("x", 6)
    for c in range(1, 5):
        p.g("h", c)
    for i, c in enumerate(range(1, 5)):
        p.cu1f(PI / (2 ** i), c, 5)
        p.cu1f(PI / (2 ** (i + 1)), c, 6)
    iqft(p, [1, 2, 3, 4])
    for i, c in enumerate(range(1, 5)):
        p.g("ry", 0, params=[f"{0.4 / (i + 1):.4f}"])
        p.cx(c, 0)
        p.g("ry", 0, params=[f"{-0.4 / (i + 1):.4f}"])
        p.cx(c, 0)
    qft(p, [1, 2, 3, 4])
    for i, c in enumerate(range(1, 5)):
        p.cu1f(-PI / (2 ** i), c, 5)
        p.cu1f(-PI / (2 ** (i + 1)), c, 6)
    for c in range(1, 5):
        p.g("h", c)
    p.measure_all()
    return p


def hs4_n4():
    p = Prog(4)
    for q in range(4):
        p.g("h", q)
    p.cz(0, 2); p.cz(1, 3)
    for q in range(4):
        p.g("h", q)
    p.cz(0, 1); p.cz(2, 3)
    for q in range(4):
        p.g("h", q)
    p.measure_all()
    return p


def ising_n10():
    p = Prog(10)
    for q in range(10):
        p.g("h", q)
    for step in range(2):
        for q in range(0, 9, 2):
            p.rzz(f"{0.3 + 0.1 * step:.1f}", q, q + 1)
        for q in range(1, 9, 2):
            p.rzz(f"{0.3 + 0.1 * step:.1f}", q, q + 1)
        for q in range(10):
            p.g("rx", q, params=[f"{0.55 - 0.1 * step:.2f}"])
    p.measure_all()
    return p


def iswap_n2():
    p = Prog(2)
    p.g("x", 0)
    p.g("s", 0); p.g("s", 1); p.g("h", 0); p.cx(0, 1); p.cx(1, 0); p.g("h", 1)
    p.g("rx", 0, params=["pi/3"])
    p.measure_all()
    return p


def linearsolver_n3():
    p = Prog(3)
    p.g("h", 0); p.g("x", 2)
    p.cx(0, 1); p.g("ry", 2, params=["pi/8"]); p.cx(1, 2)
    p.g("ry", 2, params=["-pi/8"]); p.cx(1, 2); p.g("h", 1)
    p.cx(2, 0); p.g("u3", 0, params=["pi/4", "0", "pi"]); p.cx(0, 1)
    p.g("h", 0)
    p.measure_all()
    return p


def lpn_n5():
    p = Prog(5)
    p.g("x", 4); p.g("h", 4)
    for q in range(4):
        p.g("h", q)
    p.cx(0, 4); p.cx(2, 4); p.cx(3, 4)
    for q in range(4):
        p.g("h", q)
    p.g("h", 4)
    p.measure_all()
    return p


def qft(p, qs):
    n = len(qs)
    for i in range(n):
        p.g("h", qs[i])
        for j in range(i + 1, n):
            p.cu1f(PI / (2 ** (j - i)), qs[j], qs[i])


def iqft(p, qs):
    n = len(qs)
    for i in reversed(range(n)):
        for j in reversed(range(i + 1, n)):
            p.cu1f(-PI / (2 ** (j - i)), qs[j], qs[i])
        p.g("h", qs[i])


def pea(n_count, phase):
    n = n_count + 1
    p = Prog(n, n_count)
    t = n_count
    p.g("x", t)
    for c in range(n_count):
        p.g("h", c)
    for c in range(n_count):
        p.cu1f(2 * PI * phase * (2 ** c), c, t)
    iqft(p, list(reversed(range(n_count))))
    p.measure([(c, c) for c in range(n_count)])
    return p


def qaoa_n6():
    p = Prog(6)
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]
    for q in range(6):
        p.g("h", q)
    for gamma, beta in ((0.4, 0.7), (0.8, 0.35)):
        for a, b in edges:
            p.rzz(f"{gamma}", a, b)
        for q in range(6):
            p.g("rx", q, params=[f"{2 * beta}"])
    p.measure_all()
    return p


def qec_en_n5():
    p = Prog(5)
    p.g("ry", 0, params=["pi/3"])
    p.cx(0, 1); p.cx(1, 2); p.cx(2, 3); p.cx(3, 4)
    p.g("h", 4); p.cx(4, 2); p.g("h", 4)
    p.measure_all()
    return p


def qft_n4():
    p = Prog(4)
    p.g("x", 0); p.g("x", 2)
    qft(p, [0, 1, 2, 3])
    p.measure_all()
    return p


def qrng_n4():
    p = Prog(4)
    for q in range(4):
        p.g("h", q)
    p.measure_all()
    return p


def quantumwalks_n2():
    p = Prog(2)
    for _ in range(3):
        p.g("h", 1)
        p.cx(1, 0)
        p.g("x", 1)
        p.g("u3", 0, params=["pi/5", "0", "0"])
        p.cx(1, 0)
        p.g("x", 1)
    p.measure_all()
    return p


def shor_n5():
    # order finding for a=4 mod 15 with 3 counting qubits, 2 work qubits
    p = Prog(5, 3)
    for c in range(3):
        p.g("h", c)
    p.g("x", 4)
    p.cx(0, 3); p.cx(0, 4)
    p.cswap(1, 3, 4)
    p.cx(2, 3)
    iqft(p, [2, 1, 0])
    p.measure([(0, 0), (1, 1), (2, 2)])
    return p


def simon_n6():
    p = Prog(6, 3)
    for q in range(3):
        p.g("h", q)
    p.cx(0, 3); p.cx(1, 4); p.cx(2, 5)
    p.cx(0, 4); p.cx(0, 5)
    for q in range(3):
        p.g("h", q)
    p.measure([(0, 0), (1, 1), (2, 2)])
    return p


def teleportation_n3():
    p = Prog(3)
    p.g("u3", 0, params=["0.3", "0.2", "0.1"])
    p.g("h", 1); p.cx(1, 2)
    p.cx(0, 1); p.g("h", 0)
    p.cx(1, 2); p.cz(0, 2)
    p.measure_all()
    return p


def toffoli_n3():
    p = Prog(3)
    p.g("x", 0); p.g("x", 1)
    p.ccx(0, 1, 2)
    p.measure_all()
    return p


def variational_n4():
    p = Prog(4)
    p.g("x", 0); p.g("x", 1)
    for layer in range(2):
        for q in range(4):
            p.g("ry", q, params=[f"{0.2 * (q + 1) + 0.1 * layer:.2f}"])
        for a in ((0, 2, 1) if layer == 0 else (1, 0, 2)):
            p.cz(a, a + 1)
            p.g("swap", a, a + 1)
    p.measure_all()
    return p


def wstate_n3():
    p = Prog(3)
    p.g("ry", 0, params=["1.9106332362"])
    p.ch(0, 1)
    p.cx(1, 2); p.cx(0, 1); p.g("x", 0)
    p.measure_all()
    return p


SUITE = [
    ("adder_n10", adder_n10), ("adder_n4", adder_n4),
    ("basis_change_n3", basis_change_n3), ("basis_trotter_n4", basis_trotter_n4),
    ("cat_state_n4", cat_state_n4), ("deutsch_n2", deutsch_n2),
    ("dnn_n2", lambda: dnn(2, 3)), ("dnn_n8", lambda: dnn(8, 3)),
    ("error_correctiond3_n5", error_correctiond3_n5), ("fredkin_n3", fredkin_n3),
    ("grover_n2", grover_n2), ("hhl_n7", hhl_n7), ("hs4_n4", hs4_n4),
    ("ising_n10", ising_n10), ("iswap_n2", iswap_n2),
    ("linearsolver_n3", linearsolver_n3), ("lpn_n5", lpn_n5),
    ("pea_n5", lambda: pea(4, 0.3125)), ("qaoa_n6", qaoa_n6),
    ("qec_en_n5", qec_en_n5), ("qft_n4", qft_n4),
    ("qpe_n9", lambda: pea(8, 0.1875)), ("qrng_n4", qrng_n4),
    ("quantumwalks_n2", quantumwalks_n2), ("shor_n5", shor_n5),
    ("simon_n6", simon_n6), ("teleportation_n3", teleportation_n3),
    ("toffoli_n3", toffoli_n3), ("variational_n4", variational_n4),
    ("wstate_n3", wstate_n3),
]


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for name, build in SUITE:
        (out / f"{name}.qasm").write_text(build().text())


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/benchmarks")
