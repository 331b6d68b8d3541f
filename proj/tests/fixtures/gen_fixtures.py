#!/usr/bin/env python3
"""Regenerates the committed fixture files in this directory.

Each network is small enough to reason about by hand; traces are built so
junction continuity and tank volume balances close exactly.
"""
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def area(d):
    return 0.25 * math.pi * d * d


def fmt(x):
    return "%.12g" % x


def write(name, text):
    with open(os.path.join(HERE, name), "w") as f:
        f.write(text)
    print("wrote", name)


def trace_text(dt, steps, cols, rows):
    out = "dt %s\nsteps %d\ncolumns %s\n" % (fmt(dt), steps, " ".join(cols))
    for k, row in enumerate(rows):
        out += str(k) + " " + " ".join(fmt(v) for v in row) + "\n"
    return out


# ---------------------------------------------------------------- single_pipe
def single_pipe():
    d = 0.3
    v = 0.1
    q = v * area(d)
    net = """[junctions]
J1
[reservoirs]
R1 cl=1.0 fr=0 thm=0
[pipes]
P1 from=R1 to=J1 length=1000 diameter=0.3 kb=1e-4 kw=0 kf=0 dm=1.3e-9
"""
    write("single_pipe.net", net)
    cols = ["v:P1", "q:P1", "d:J1"]
    rows = [[v, q, q] for _ in range(24)]
    write("single_pipe.hyd", trace_text(3600, 24, cols, rows))
    write("single_pipe.init", "[chlorine]\nJ1 0\nP1 0\n")


# ------------------------------------------------------------------- mpc_pipe
# one booster feeding a downstream junction; used for the naive-baseline
# cost comparison
def mpc_pipe():
    d1, d2 = 0.3, 0.2
    v1, v2 = 0.1, 0.05
    q1, q2 = v1 * area(d1), v2 * area(d2)
    qb = 1e-4
    dem2 = q2
    dem1 = q1 + qb - q2
    net = """[junctions]
J1
J2
[reservoirs]
R1 cl=0.25 fr=0 thm=0
[pipes]
P1 from=R1 to=J1 length=600 diameter=0.3 kb=2e-5 kw=0 kf=0 dm=1.3e-9
P2 from=J1 to=J2 length=400 diameter=0.2 kb=2e-5 kw=0 kf=0 dm=1.3e-9
[boosters]
B1 node=J1 umax=4 species=chlorine
"""
    write("mpc_pipe.net", net)
    cols = ["v:P1", "v:P2", "q:P1", "q:P2", "d:J1", "d:J2", "qb:B1"]
    rows = [[v1, v2, q1, q2, dem1, dem2, qb] for _ in range(24)]
    write("mpc_pipe.hyd", trace_text(3600, 24, cols, rows))
    write("mpc_pipe.init", "[chlorine]\nJ1 0.3\nJ2 0.3\nP1 0.3\nP2 0.3\n")


# ---------------------------------------------------------------------- gauss
def gauss():
    d = 0.1
    v = 5e-4
    q = v * area(d)
    net = """[junctions]
J1
[reservoirs]
R1 cl=0 fr=0 thm=0
[pipes]
P1 from=R1 to=J1 length=2000 diameter=0.1 kb=0 kw=0 kf=0 dm=1.3e-9
"""
    write("gauss.net", net)
    cols = ["v:P1", "q:P1", "d:J1"]
    rows = [[v, q, q] for _ in range(24)]
    write("gauss.hyd", trace_text(3600, 24, cols, rows))


# ----------------------------------------------------------------------- loop
def loop():
    d = 0.15
    q = 2e-3
    v = q / area(d)
    net = """[junctions]
J1
J2
J3
J4
[pipes]
P1 from=J1 to=J2 length=500 diameter=0.15 kb=0 kw=0 kf=0 dm=1.3e-9
P2 from=J2 to=J3 length=500 diameter=0.15 kb=0 kw=0 kf=0 dm=1.3e-9
P3 from=J3 to=J4 length=500 diameter=0.15 kb=0 kw=0 kf=0 dm=1.3e-9
P4 from=J4 to=J1 length=500 diameter=0.15 kb=0 kw=0 kf=0 dm=1.3e-9
"""
    write("loop.net", net)
    cols = ["v:P1", "v:P2", "v:P3", "v:P4", "q:P1", "q:P2", "q:P3", "q:P4",
            "d:J1", "d:J2", "d:J3", "d:J4"]
    rows = [[v] * 4 + [q] * 4 + [0.0] * 4 for _ in range(24)]
    write("loop.hyd", trace_text(3600, 24, cols, rows))
    write("loop.init", "[chlorine]\nP1 0.5\nP2 1.0\nP3 0.2\nP4 0.8\n")


# -------------------------------------------------------------------- deadend
# laminar terminal pipe; three traces with decreasing terminal Peclet
def deadend():
    d1, d2, d3 = 0.3, 0.2, 0.05
    net = """[junctions]
J1
J2
J3
[reservoirs]
R1 cl=2.0 fr=0.3 thm=0.01
[pipes]
P1 from=R1 to=J1 length=600 diameter=0.3 kb=1e-5 kw=0 kf=0 dm=1.3e-9
P2 from=J1 to=J2 length=400 diameter=0.2 kb=1e-5 kw=0 kf=0 dm=1.3e-9
P3 from=J2 to=J3 length=50 diameter=0.05 kb=1e-5 kw=0 kf=0 dm=1.3e-9
"""
    write("deadend.net", net)
    v1, v2 = 0.1, 0.05
    q1, q2 = v1 * area(d1), v2 * area(d2)
    for tag, v3 in (("v1", 2.5e-4), ("v2", 5e-4), ("v3", 1e-3)):
        q3 = v3 * area(d3)
        dem1 = q1 - q2
        dem2 = q2 - q3
        dem3 = q3
        cols = ["v:P1", "v:P2", "v:P3", "q:P1", "q:P2", "q:P3",
                "d:J1", "d:J2", "d:J3"]
        rows = [[v1, v2, v3, q1, q2, q3, dem1, dem2, dem3] for _ in range(24)]
        write("deadend_%s.hyd" % tag, trace_text(3600, 24, cols, rows))
    write("deadend.init", "[chlorine]\nJ1 0\nJ2 0\nJ3 0\n")


# -------------------------------------------------------------------- mpc_net
# two boosters, dead-end with a reactant intrusion
def mpc_net():
    d1, d2, d3 = 0.3, 0.2, 0.05
    v2, v3 = 0.05, 1.5e-3
    q2, q3 = v2 * area(d2), v3 * area(d3)
    qb = 1e-4
    net = """[junctions]
J1
J2
J3
[reservoirs]
R1 cl=0.5 fr=0 thm=0.005
[pipes]
P1 from=R1 to=J1 length=600 diameter=0.3 kb=1e-5 kw=0 kf=0 dm=1.3e-9
P2 from=J1 to=J2 length=400 diameter=0.2 kb=1e-5 kw=0 kf=0 dm=1.3e-9
P3 from=J2 to=J3 length=15 diameter=0.05 kb=1e-5 kw=0 kf=0 dm=1.3e-9
[boosters]
B1 node=J1 umax=4 species=chlorine
B2 node=J2 umax=4 species=chlorine
"""
    write("mpc_net.net", net)
    cols = ["v:P1", "v:P2", "v:P3", "q:P1", "q:P2", "q:P3",
            "d:J1", "d:J2", "d:J3", "qb:B1", "qb:B2"]
    rows = []
    for k in range(24):
        scale = 1.0 + 0.1 * math.sin(2 * math.pi * k / 24.0)
        q1 = 0.1 * area(d1) * scale
        dem1 = q1 + qb - q2
        dem2 = q2 + qb - q3
        dem3 = q3
        rows.append([q1 / area(d1), v2, v3, q1, q2, q3, dem1, dem2, dem3, qb, qb])
    write("mpc_net.hyd", trace_text(3600, 24, cols, rows))
    init = """[chlorine]
J1 0.4
J2 0.4
J3 0.35
P1 0.4
P2 0.4
P3 0.35
[reactant]
J3 0.5
P3 0.5
[thm]
J1 0.01
J2 0.01
J3 0.01
P1 0.01
P2 0.01
P3 0.01
"""
    write("mpc_net.init", init)
    tgt = """[target]
id T1
eta 5
category dead-end
members J3
[target]
id T2
eta 2
category high-contaminant
members J2,J3
[target]
id T3
eta 0.5
category elevated-THMs
members J3
"""
    write("mpc_net.tgt", tgt)
    cfg = """network mpc_net.net
hydraulics mpc_net.hyd
initial mpc_net.init
targets mpc_net.tgt
outdir out/mpc_net
family explicit
pe_threshold 1000
dt_cap 300
kr 5e-5
y_fr 1.0
y_thms 0.05
horizon 48
cadence 12
move_block 3
constraint_stride 2
q_scale 1e-4
r_scale 1.0
eps_cost 1.0
slack_penalty 1e7
"""
    write("mpc_net.cfg", cfg)


# ------------------------------------------------------------------- tank_net
# pump feeding a tank through a pipe, valve draining it; tank booster
def tank_net():
    d2 = 0.2
    net = """[junctions]
J1
J2
[reservoirs]
R1 cl=1.0 fr=0.05 thm=0.002
[tanks]
TK1 vmin=10 vmax=100 v0=50 kb=1e-5
[pipes]
P2 from=J1 to=TK1 length=300 diameter=0.2 kb=1e-5 kw=1e-5 kf=1e-4 dm=1.3e-9
[pumps]
M1 from=R1 to=J1
[valves]
V1 from=TK1 to=J2
[boosters]
B1 node=TK1 umax=4 species=chlorine
"""
    write("tank_net.net", net)
    cols = ["v:P2", "q:P2", "q:M1", "q:V1", "d:J1", "d:J2", "vol:TK1", "vb:B1"]
    rows = []
    vol = 50.0
    vb = 0.01  # m^3 injected per hydraulic step
    for k in range(24):
        s = math.sin(2 * math.pi * k / 24.0)
        q_in = 2e-3 * (1 + 0.5 * s)
        q_out = 2e-3 * (1 - 0.5 * s)
        d1 = 1e-3
        q_m1 = q_in + d1
        rows.append([q_in / area(d2), q_in, q_m1, q_out, d1, q_out, vol, vb])
        vol = vol + (q_in - q_out) * 3600 + vb
    write("tank_net.hyd", trace_text(3600, 24, cols, rows))
    write("tank_net.init",
          "[chlorine]\nJ1 0.5\nJ2 0.5\nTK1 0.5\nP2 0.5\nM1 0.5\nV1 0.5\n"
          "[reactant]\nTK1 0.05\n[thm]\nTK1 0.005\n")
    write("tank_net.tgt",
          "[target]\nid T1\neta 3\ncategory dead-end\nmembers TK1,J2\n")


# ----------------------------------------------------------------------- blam
# 30 junctions / 30 pipes / 1 reservoir tree with dead-end branches
def blam():
    # edges: (pipe, from, to, length, class) where class sets the design velocity
    edges = [
        ("P1", "R1", "J1", 800, "trunk"), ("P2", "J1", "J2", 700, "trunk"),
        ("P3", "J2", "J3", 700, "trunk"), ("P4", "J3", "J4", 600, "trunk"),
        ("P5", "J4", "J5", 600, "trunk"), ("P6", "J5", "J6", 500, "trunk"),
        ("P7", "J6", "J7", 500, "trunk"), ("P8", "J7", "J8", 500, "trunk"),
        ("P9", "J2", "J9", 400, "mid"), ("P10", "J9", "J10", 300, "mid"),
        ("P11", "J10", "J11", 150, "tip"),
        ("P12", "J3", "J12", 400, "mid"), ("P13", "J12", "J13", 200, "tip"),
        ("P14", "J4", "J14", 400, "mid"), ("P15", "J14", "J15", 300, "mid"),
        ("P16", "J15", "J16", 250, "mid"), ("P17", "J16", "J17", 150, "tip"),
        ("P18", "J5", "J18", 350, "mid"), ("P19", "J18", "J19", 200, "tip"),
        ("P20", "J6", "J20", 400, "mid"), ("P21", "J20", "J21", 300, "mid"),
        ("P22", "J21", "J22", 150, "tip"),
        ("P23", "J7", "J23", 300, "mid"), ("P24", "J23", "J24", 200, "tip"),
        ("P25", "J8", "J25", 350, "mid"), ("P26", "J25", "J26", 250, "mid"),
        ("P27", "J26", "J27", 150, "tip"),
        ("P28", "J10", "J28", 300, "mid"), ("P29", "J28", "J29", 150, "tip"),
        ("P30", "J13", "J30", 150, "tip"),
    ]
    vclass = {"trunk": 0.35, "mid": 0.06, "tip": 6e-4}
    children = {}
    for p, a, b, L, c in edges:
        children.setdefault(a, []).append((p, b))
    # leaf demand: tip pipes sized at d=0.05
    tip_d = 0.05
    leaf_q = {}
    for p, a, b, L, c in edges:
        if c == "tip":
            leaf_q[b] = vclass["tip"] * area(tip_d)

    demand = {}
    flows = {}
    diam = {}

    def subtree_flow(node):
        q = demand.get(node, 0.0)
        for p, child in children.get(node, []):
            q += subtree_flow(child)
        return q

    # base demands: leaves plus a share at every internal junction
    juncs = ["J%d" % i for i in range(1, 31)]
    for j in juncs:
        demand[j] = leaf_q.get(j, 0.0)
    for j in juncs:
        if j not in leaf_q:
            demand[j] = 2e-4  # internal draw keeps trunk flows up

    booster_hosts = {"J1": 2e-4, "J9": 1e-4}  # booster water inflow
    for j, qb in booster_hosts.items():
        demand[j] += qb  # rebalance so continuity closes with the booster inflow

    def compute_flow(node):
        for p, child in children.get(node, []):
            compute_flow(child)
        for p, child in children.get(node, []):
            flows[p] = subtree_flow(child)

    compute_flow("R1")
    for p, a, b, L, c in edges:
        if c == "tip":
            diam[p] = tip_d
        else:
            diam[p] = math.sqrt(4 * flows[p] / (math.pi * vclass[c]))

    lines = ["[junctions]"] + juncs
    lines.append("[reservoirs]")
    lines.append("R1 cl=2.0 fr=0.3 thm=0.01")
    lines.append("[pipes]")
    for p, a, b, L, c in edges:
        kw = " kw=1e-5 kf=1e-4" if c == "trunk" else " kw=0 kf=0"
        lines.append("%s from=%s to=%s length=%d diameter=%s kb=1e-5%s dm=1.3e-9"
                     % (p, a, b, L, fmt(diam[p]), kw))
    lines.append("[boosters]")
    lines.append("B1 node=J1 umax=4 species=chlorine")
    lines.append("B2 node=J9 umax=4 species=chlorine")
    write("blam.net", "\n".join(lines) + "\n")

    def make_trace(name, phase, sharpen):
        cols = (["v:%s" % p for p, *_ in edges] + ["q:%s" % p for p, *_ in edges] +
                ["d:%s" % j for j in juncs] + ["qb:B1", "qb:B2"])
        rows = []
        for k in range(24):
            s = 1.0 + 0.2 * math.sin(2 * math.pi * (k + phase) / 24.0) * sharpen
            row_v, row_q, row_d = [], [], []
            for p, a, b, L, c in edges:
                q = flows[p] * s
                row_q.append(q)
                row_v.append(q / area(diam[p]))
            for j in juncs:
                row_d.append(demand[j] * s)
            # booster flows scale with the pattern so continuity still closes
            rows.append(row_v + row_q + row_d + [2e-4 * s, 1e-4 * s])
        write(name, trace_text(3600, 24, cols, rows))

    make_trace("blam.hyd", 0, 1.0)
    make_trace("blam_hyd2.hyd", 9, 0.8)

    init = ["[chlorine]"]
    for j in juncs:
        init.append("%s 0.5" % j)
    for p, *_ in edges:
        init.append("%s 0.5" % p)
    init.append("[reactant]")
    for j in juncs:
        init.append("%s 0.1" % j)
    for p, *_ in edges:
        init.append("%s 0.1" % p)
    init.append("[thm]")
    for j in juncs:
        init.append("%s 0.01" % j)
    for p, *_ in edges:
        init.append("%s 0.01" % p)
    write("blam.init", "\n".join(init) + "\n")

    tgt = """[target]
id T1
eta 5
category dead-end
members J11,J29
[target]
id T2
eta 2
category low-initial-chlorine
members J27
[target]
id T3
eta 0.5
category elevated-THMs
members J13
"""
    write("blam.tgt", tgt)
    cfg = """network blam.net
hydraulics blam.hyd
initial blam.init
targets blam.tgt
outdir out/blam
family explicit
pe_threshold 1000
dt_cap 300
kr 5e-5
y_fr 1.0
y_thms 0.05
"""
    write("blam.cfg", cfg)


if __name__ == "__main__":
    single_pipe()
    mpc_pipe()
    gauss()
    loop()
    deadend()
    mpc_net()
    tank_net()
    blam()
