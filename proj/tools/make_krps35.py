#!/usr/bin/env python3
"""Emit cases/krps35.case, a 35-bus regional grid with six plants.

The layout is a hexagonal 132 kV ring around a central hub: six generating
plants feed the ring through unit transformers, the hub ties the ring
together with six long spokes, and 22 distribution buses hang off the ring
and hub. The script is deterministic and re-checks every structural figure
it promises (bus/branch/unit counts, total load, long-line count, network
diameter, Thevenin stiffness) before writing the file.
"""

import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "cases" / "krps35.case"

S_BASE = 100.0
TOTAL_LOAD_MW = 2202.0

# Per-km 132 kV line constants on the 100 MVA system base.
KM_R, KM_X, KM_B = 0.0008, 0.0023, 0.00048


def line(f, t, km):
    return (f, t, round(KM_R * km, 6), round(KM_X * km, 6), round(KM_B * km, 6), km)


def main():
    rng = random.Random(35)

    # Buses 1..6 carry the plants, 7..12 form the ring, 13 is the hub,
    # 14..35 are distribution buses.
    plants = [
        # name,        mva, kind,   pset,  vset
        ("Dokan", 400.0, "hydro", 388.0, 1.03),
        ("Darbandikhan", 249.0, "hydro", 242.0, 1.03),
        ("Perdawood", 500.0, "gas", 485.0, 1.02),
        ("Chamchamal", 750.0, "gas", None, 1.04),  # slack
        ("Duhok", 200.0, "gas", 194.0, 1.02),
        ("TaqTaq", 200.0, "gas", 194.0, 1.02),
    ]
    hub_names = ["erbil", "slemani", "koya", "kirkuk", "dihok", "soran"]

    buses = []
    for i, (name, _, _, pset, vset) in enumerate(plants, start=1):
        kind = "slack" if pset is None else "pv"
        extra = " angle_deg=0" if kind == "slack" else ""
        buses.append(f"BUS id={i} name={name.lower()}_g kind={kind} kv=15.75 vset={vset}{extra}")
    for i, name in enumerate(hub_names, start=7):
        buses.append(f"BUS id={i} name={name} kind=pq kv=132")
    buses.append("BUS id=13 name=hub kind=pq kv=132")
    for i in range(14, 36):
        buses.append(f"BUS id={i} name=feeder_{i} kind=pq kv=33")

    branches = []
    # Unit transformers, impedance scaled off each machine rating.
    for i, (_, mva, _, _, _) in enumerate(plants, start=1):
        xt = round(0.16 * S_BASE / mva, 5)
        branches.append((i, i + 6, round(xt / 25, 6), xt, 0.0, 0))
    # Ring segments, all long enough for exact PI treatment.
    ring_km = [112, 130, 98, 146, 118, 90]
    for k in range(6):
        branches.append(line(7 + k, 7 + (k + 1) % 6, ring_km[k]))
    # Hub spokes, also long.
    spoke_km = [62, 72, 50, 80, 92, 57]
    for k in range(6):
        branches.append(line(13, 7 + k, spoke_km[k]))
    # Two long cross-country ties and eleven short ones.
    ties = [line(7, 10, 124), line(9, 12, 112)]
    short_tie_ends = [(7, 9), (8, 10), (11, 7), (12, 8), (14, 15), (16, 17),
                      (20, 21), (24, 25), (28, 29), (31, 32), (34, 35)]
    for f, t in short_tie_ends:
        km = rng.randrange(8, 25)
        branches.append(line(f, t, km))
    branches += ties

    # Distribution feeders: every bus 14..35 hangs one short 132/33 kV
    # feeder off a ring bus or the hub.
    feeder_parent = {}
    parents = [7, 8, 9, 10, 11, 12, 13]
    for i in range(14, 36):
        parent = parents[(i - 14) % len(parents)]
        feeder_parent[i] = parent
        x = round(rng.uniform(0.055, 0.105), 4)
        km = rng.randrange(6, 22)
        branches.append((parent, i, round(x / 4, 5), x, 0.001, km))

    assert len(branches) == 53, len(branches)
    long_lines = sum(1 for b in branches if b[5] > 25)
    assert long_lines == 14, long_lines

    # Loads: the hub, the six ring buses, and the 22 feeders, 29 in all,
    # summing to exactly 2202 MW.
    load_buses = list(range(7, 14)) + list(range(14, 36))
    weights = [rng.uniform(0.6, 1.4) for _ in load_buses]
    scale = TOTAL_LOAD_MW / sum(weights)
    p_mw = [round(w * scale) for w in weights]
    p_mw[-1] += round(TOTAL_LOAD_MW) - sum(p_mw)
    assert sum(p_mw) == TOTAL_LOAD_MW and min(p_mw) > 0
    loads = []
    for bus, p in zip(load_buses, p_mw):
        q = round(p * math.tan(math.acos(rng.uniform(0.92, 0.97))), 1)
        a = rng.choice([0.8, 1.0, 1.2, 1.5])
        b = rng.choice([1.6, 1.8, 2.0])
        loads.append(f"LOAD bus={bus} p0={p} q0={q} v0=1.0 a={a} b={b}")

    # Machine blocks, parameters on each unit's own rating.
    def machine(kind, jig):
        if kind == "hydro":
            p = dict(h=4.2, d=0.3, xd=1.05, xd_p=0.32, xd_pp=0.24,
                     xq=0.68, xq_p=0.50, xq_pp=0.24, xls=0.16, rs=0.002,
                     tdo_p=7.5, tdo_pp=0.03, tqo_p=0.5, tqo_pp=0.045)
        else:
            p = dict(h=4.6, d=0.3, xd=1.80, xd_p=0.28, xd_pp=0.22,
                     xq=1.72, xq_p=0.50, xq_pp=0.22, xls=0.15, rs=0.0025,
                     tdo_p=7.0, tdo_pp=0.03, tqo_p=0.6, tqo_pp=0.045)
        p["h"] = round(p["h"] * (1 + 0.08 * jig), 3)
        p["tdo_p"] = round(p["tdo_p"] * (1 + 0.05 * jig), 3)
        return p

    units = []
    for i, (name, mva, kind, pset, _) in enumerate(plants, start=1):
        jig = rng.uniform(-1, 1)
        m = machine(kind, jig)
        head = f"UNIT bus={i} name={name} mva={mva:g}"
        if pset is not None:
            head += f" pset={pset:g}"
        mach = ("  machine {{ h={h} d={d} xd={xd} xd_p={xd_p} xd_pp={xd_pp}\n"
                "            xq={xq} xq_p={xq_p} xq_pp={xq_pp} xls={xls} rs={rs}\n"
                "            tdo_p={tdo_p} tdo_pp={tdo_pp} tqo_p={tqo_p} tqo_pp={tqo_pp} }}"
                ).format(**m)
        exc = "  exciter { tr=0.02 ka=550 tb=2 tc=0.4 efd_min=-6.5 efd_max=6.5 }"
        if kind == "hydro":
            gov = ("  governor { hydro kp=2.0 ki=0.5 kd=0.0 ta_servo=0.2\n"
                   "             g_min=0.05 g_max=1.0 rate_limit=0.12\n"
                   "             tw=1.1 at=1.15 q_nl=0.07 r_perm=0.05 }")
        else:
            gov = ("  governor { gas r_droop=0.05 t_valve=0.08 t_comb=0.35 t_turb=2.5\n"
                   "             f_min=0.0 f_max=1.3 k_turb=1.25 }")
        pss = "  pss { f_l=0.2 k_l=2 f_i=1.0 k_i=8 f_h=8 k_h=35 vs_min=-0.12 vs_max=0.12 }"
        units.append("\n".join([head, mach, exc, gov, pss]))

    # Structural self-checks before writing anything.
    check_diameter(branches)
    check_thevenin(branches, plants)

    text = [
        "# Thirty-five bus regional grid: six plants on a 132 kV hexagonal ring",
        "# tied through a central hub, 29 load points, 2202 MW total demand.",
        "SYSTEM s_base=100 f=50",
        "",
        *buses,
        "",
        *(f"BRANCH from={f} to={t} r={r:g} x={x:g} b={b:g} len={km:g}"
          for f, t, r, x, b, km in branches),
        "",
        *loads,
        "",
        "\n\n".join(units),
        "",
    ]
    OUT.write_text("\n".join(text))
    print(f"wrote {OUT}: 35 buses, {len(branches)} branches, "
          f"{len(loads)} loads totalling {sum(p_mw):g} MW, {long_lines} long lines")


def check_diameter(branches):
    adj = {}
    for f, t, *_ in branches:
        adj.setdefault(f, set()).add(t)
        adj.setdefault(t, set()).add(f)
    nodes = sorted(adj)
    assert nodes == list(range(1, 36))
    worst = 0
    for s in nodes:
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        assert len(dist) == 35, f"disconnected from {s}"
        worst = max(worst, max(dist.values()))
    assert worst <= 4, f"diameter {worst}"


def check_thevenin(branches, plants):
    # Drive-point impedance with every machine grounded through its
    # subtransient reactance; large values flag a weakly tied bus.
    n = 35
    y = [[0j] * n for _ in range(n)]
    for f, t, r, x, b, _ in branches:
        i, j = f - 1, t - 1
        ys = 1 / complex(r, x)
        y[i][i] += ys + complex(0, b / 2)
        y[j][j] += ys + complex(0, b / 2)
        y[i][j] -= ys
        y[j][i] -= ys
    for k, (_, mva, kind, _, _) in enumerate(plants):
        xpp = (0.24 if kind == "hydro" else 0.22) * S_BASE / mva
        y[k][k] += 1 / complex(0, xpp)
    # Gaussian elimination for the inverse diagonal.
    import copy
    a = copy.deepcopy(y)
    inv = [[1j * 0 if i != j else 1 + 0j for j in range(n)] for i in range(n)]
    for c in range(n):
        p = max(range(c, n), key=lambda r_: abs(a[r_][c]))
        a[c], a[p] = a[p], a[c]
        inv[c], inv[p] = inv[p], inv[c]
        piv = a[c][c]
        a[c] = [v / piv for v in a[c]]
        inv[c] = [v / piv for v in inv[c]]
        for r_ in range(n):
            if r_ != c and a[r_][c] != 0:
                fac = a[r_][c]
                a[r_] = [u - fac * v for u, v in zip(a[r_], a[c])]
                inv[r_] = [u - fac * v for u, v in zip(inv[r_], inv[c])]
    worst = max(abs(inv[i][i]) for i in range(n))
    assert worst < 0.25, f"weak bus, |Z|={worst:.3f}"


if __name__ == "__main__":
    main()
