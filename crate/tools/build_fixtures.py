#!/usr/bin/env python3
"""Regenerate the shipped fixtures under data/.

Outputs:
  data/reference_stats.csv      published distribution statistics
  data/reference_goalposts.csv  published goalposts (G1/G2) with trace
  data/reference_scores.csv     published normalized scores and composite values
  data/panel_big4.csv           raw panel FR/DE/IT/ES 2014-2021
  data/pnrr_catalog.json        record-level PNRR mapping catalog

The raw panel is obtained by inverting the published normalized scores through
the published goalposts. The 2014 and 2021 columns are exact inversions; the
intermediate years are reconstructed by log-linear interpolation of the
normalized scores along a per-country progress profile, so they are
illustrative rather than observed data. C3 and C12 have no 2021 value: their
2020 value equals the published 2021 score (the last-value carry forward).

The catalog is synthetic at record level. It is built so that its group-level
tallies reproduce the published tables on measures per mission/component and
per administration, common-indicator occurrences per mission/component, goals
per mission, amounts per mission and amounts per prevalent goal.

Run from the repository root: python3 tools/build_fixtures.py
"""

import csv
import json
import math
import os

import numpy as np
from scipy.optimize import linprog

DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")

INDICATORS = ["C1", "C2", "C3", "C5", "C7", "C8", "C10", "C11", "C12", "C13", "C14"]
NEGATIVE = {"C1", "C11"}

# indicator: (min, q1, median, q3, max, g1, g2)
REF_STATS = {
    "C1": (40.9, 118.7, 163.5, 248.9, 769.6, 0.0, 769.6),
    "C2": (0.1, 8.6, 16.9, 27.9, 85.8, 0.0, 85.8),
    "C3": (0.0, 0.0, 0.0, 0.5, 51.6, 0.0, 51.6),
    "C5": (3.8, 40.7, 69.3, 85.9, 98.6, 0.0, 100.0),
    "C7": (4.9, 28.1, 48.1, 62.9, 94.2, 0.0, 100.0),
    "C8": (0.2, 0.8, 1.3, 2.1, 3.9, 0.0, 4.2),
    "C10": (0.9, 5.0, 8.1, 17.1, 37.3, 0.0, 37.3),
    "C11": (2.0, 6.1, 8.0, 10.6, 27.8, 0.0, 27.8),
    "C12": (205.4, 364.9, 536.0, 667.9, 911.6, 0.0, 1122.5),
    "C13": (0.0, 11.8, 25.7, 39.3, 78.0, 0.0, 80.6),
    "C14": (13.9, 31.5, 35.9, 40.0, 45.8, 13.9, 52.7),
}

# Published trace of each endpoint, as read off the statistics above.
TRACE = {
    "C1": ("natural_bound_clip", "observed_extremum"),
    "C2": ("natural_bound_clip", "observed_extremum"),
    "C3": ("natural_bound_clip", "observed_extremum"),
    "C5": ("natural_bound_clip", "natural_bound_clip"),
    "C7": ("natural_bound_clip", "natural_bound_clip"),
    "C8": ("natural_bound_clip", "tukey_fence"),
    "C10": ("natural_bound_clip", "observed_extremum"),
    "C11": ("natural_bound_clip", "observed_extremum"),
    "C12": ("natural_bound_clip", "tukey_fence"),
    "C13": ("natural_bound_clip", "tukey_fence"),
    "C14": ("observed_extremum", "tukey_fence"),
}

GEOS = ["FR", "DE", "IT", "ES"]
# indicator: {geo: (2014, 2021)}
REF_SCORES = {
    "C1": {"FR": (83.9, 85.8), "DE": (84.9, 86.9), "IT": (87.2, 87.2), "ES": (84.1, 85.3)},
    "C2": {"FR": (16.7, 22.5), "DE": (16.8, 22.3), "IT": (19.9, 22.2), "ES": (18.5, 24.2)},
    "C3": {"FR": (1.2, 13.0), "DE": (0.6, 12.4), "IT": (0.2, 4.5), "ES": (0.2, 4.1)},
    "C5": {"FR": (76.7, 88.1), "DE": (86.6, 88.8), "IT": (71.1, 88.5), "ES": (73.0, 95.9)},
    "C7": {"FR": (63.8, 80.7), "DE": (52.7, 50.3), "IT": (23.0, 33.9), "ES": (49.0, 68.7)},
    "C8": {"FR": (52.8, 52.3), "DE": (68.2, 74.1), "IT": (31.7, 35.0), "ES": (29.3, 33.8)},
    "C10": {"FR": (49.3, 29.5), "DE": (21.4, 20.6), "IT": (21.7, 26.5), "ES": (27.1, 38.6)},
    "C11": {"FR": (62.9, 71.6), "DE": (83.1, 86.7), "IT": (53.6, 65.8), "ES": (11.9, 46.8)},
    "C12": {"FR": (55.2, 51.2), "DE": (73.3, 69.6), "IT": (28.6, 28.3), "ES": (26.4, 26.3)},
    "C13": {"FR": (49.0, 70.9), "DE": (34.1, 39.0), "IT": (28.4, 41.5), "ES": (45.8, 68.7)},
    "C14": {"FR": (74.5, 72.2), "DE": (73.5, 69.4), "IT": (71.2, 73.0), "ES": (66.3, 69.1)},
}
COMPOSITE13 = {"FR": (38.4, 50.3), "DE": (34.6, 47.4), "IT": (23.4, 36.1), "ES": (22.7, 40.0)}

YEARS = list(range(2014, 2022))
CARRIED = {"C3", "C12"}
# Share of the 2014->2021 log change reached in each year.
PROFILE = {
    "FR": [0.0, 0.08, 0.18, 0.32, 0.47, 0.63, 0.88, 1.0],
    "DE": [0.0, 0.10, 0.22, 0.35, 0.50, 0.66, 0.90, 1.0],
    "IT": [0.0, 0.01, 0.02, 0.03, 0.28, 0.55, 0.90, 1.0],
    "ES": [0.0, 0.10, 0.24, 0.39, 0.54, 0.70, 0.92, 1.0],
}


def invert(code, score):
    _, _, _, _, _, g1, g2 = REF_STATS[code]
    if code in NEGATIVE:
        return g2 - score / 100.0 * (g2 - g1)
    return g1 + score / 100.0 * (g2 - g1)


def fmt(x):
    return ("%.6f" % x).rstrip("0").rstrip(".")


def write_index_fixtures():
    with open(os.path.join(DATA, "reference_stats.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["indicator", "n", "min", "q1", "median", "q3", "max"])
        for c in INDICATORS:
            mn, q1, md, q3, mx, _, _ = REF_STATS[c]
            w.writerow([c, "", mn, q1, md, q3, mx])
    with open(os.path.join(DATA, "reference_goalposts.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["indicator", "g1", "g2", "g1_trace", "g2_trace"])
        for c in INDICATORS:
            w.writerow([c, REF_STATS[c][5], REF_STATS[c][6], TRACE[c][0], TRACE[c][1]])
    with open(os.path.join(DATA, "reference_scores.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["indicator", "geo", "year", "score"])
        for c in INDICATORS:
            for g in GEOS:
                for i, y in enumerate((2014, 2021)):
                    w.writerow([c, g, y, REF_SCORES[c][g][i]])
        for g in GEOS:
            for i, y in enumerate((2014, 2021)):
                w.writerow(["INDEX", g, y, COMPOSITE13[g][i]])
    with open(os.path.join(DATA, "panel_big4.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["indicator", "geo", "year", "value"])
        for c in INDICATORS:
            for g in GEOS:
                s14, s21 = REF_SCORES[c][g]
                prof = PROFILE[g]
                for k, y in enumerate(YEARS):
                    if c in CARRIED:
                        if y == 2021:
                            w.writerow([c, g, y, ""])
                            continue
                        p = prof[k] / prof[YEARS.index(2020)]
                    else:
                        p = prof[k]
                    s = s14 * math.exp(p * math.log(s21 / s14))
                    w.writerow([c, g, y, fmt(invert(c, s))])


# ---------------------------------------------------------------------------
# PNRR catalog

# (component, investments, reforms, investments with IC, reforms with IC)
MEASURES_BY_COMPONENT = [
    ("M1C1", 30, 20, 20, 0), ("M1C2", 18, 2, 12, 0), ("M1C3", 36, 2, 28, 0),
    ("M2C1", 8, 3, 6, 0), ("M2C2", 24, 5, 18, 0), ("M2C3", 4, 1, 4, 0),
    ("M2C4", 15, 4, 7, 0), ("M3C1", 14, 4, 0, 0), ("M3C2", 6, 6, 6, 0),
    ("M4C1", 13, 10, 13, 2), ("M4C2", 11, 1, 11, 0), ("M5C1", 5, 2, 5, 1),
    ("M5C2", 13, 2, 9, 0), ("M5C3", 8, 1, 2, 0), ("M6C1", 5, 1, 2, 0),
    ("M6C2", 10, 1, 9, 0),
]

MEASURES_BY_ADMIN = [
    ("Giust. Amministrativa", 1, 0, 1, 0), ("MAECI - Min Aff Est", 1, 0, 1, 0),
    ("MEF - Min Eco e Fin", 1, 6, 1, 0), ("MG - MIN GIUSTIZIA", 2, 5, 2, 0),
    ("MI - Min Istruzione", 10, 6, 10, 1), ("MIC - Min Cultura", 23, 0, 21, 0),
    ("MIMS - Min Infr Mob Sost", 35, 11, 12, 0), ("MINT - Min Interno", 5, 0, 5, 0),
    ("MIPAAF - Min Pol Agr", 4, 0, 3, 0), ("MISE - Min Svil Eco", 16, 1, 16, 0),
    ("MITD - Min Inn Trans Dig", 28, 4, 16, 0), ("MITE - Min Trans Eco", 28, 12, 18, 0),
    ("MiTur - Min Turismo", 13, 1, 7, 0), ("MLPS - Min Lav Pol S", 9, 3, 5, 1),
    ("MS - Min Salute", 15, 2, 11, 0), ("MUR - Min Uni e Ric", 11, 5, 11, 1),
    ("PCM - Dip Prot Civil", 1, 0, 1, 0), ("PCM - Dip Sport", 1, 0, 1, 0),
    ("PCM - Min Aff Reg", 1, 0, 1, 0), ("PCM - Min Pari Opp", 1, 0, 1, 0),
    ("PCM - Min Pol Giov", 1, 0, 1, 0), ("PCM - Min Pub Amm", 9, 5, 5, 0),
    ("PCM - Min Sud", 4, 1, 2, 0), ("PCM-DISAB", 0, 1, 0, 0),
    ("PCM-SEGR_GEN", 0, 2, 0, 0),
]

PREFERRED = {
    "M1C1": ["MITD", "PCM - Min Pub Amm", "Giust.", "MG", "MEF", "PCM-SEGR_GEN", "MAECI", "MINT"],
    "M1C2": ["MISE", "MAECI", "MITD"],
    "M1C3": ["MIC", "MiTur"],
    "M2C1": ["MITE", "MIPAAF"],
    "M2C2": ["MITE", "MIMS", "MISE"],
    "M2C3": ["MITE", "MINT"],
    "M2C4": ["MITE", "MINT", "MIPAAF", "PCM - Dip Prot"],
    "M3C1": ["MIMS"],
    "M3C2": ["MIMS"],
    "M4C1": ["MI", "MUR"],
    "M4C2": ["MUR", "MISE"],
    "M5C1": ["MLPS", "PCM - Min Pol Giov", "PCM - Min Pari Opp"],
    "M5C2": ["MLPS", "MINT", "PCM - Dip Sport", "PCM-DISAB"],
    "M5C3": ["PCM - Min Sud", "PCM - Min Aff Reg"],
    "M6C1": ["MS"],
    "M6C2": ["MS"],
}

CI = ["C%d" % i for i in range(1, 15)]
OCCURRENCES_BY_COMPONENT = {
    "M1C1": {"C7": 13, "C10": 88, "C14": 16},
    "M1C2": {"C5": 3, "C6": 3, "C7": 1, "C9": 27},
    "M1C3": {"C1": 9, "C7": 15, "C9": 33, "C10": 16, "C14": 4},
    "M2C1": {"C1": 2, "C2": 3, "C6": 6, "C9": 9, "C10": 8, "C14": 2},
    "M2C2": {"C1": 3, "C2": 6, "C3": 8, "C9": 33},
    "M2C3": {"C1": 4, "C13": 1},
    "M2C4": {"C1": 1, "C2": 1, "C4": 5, "C7": 2},
    "M3C1": {},
    "M3C2": {"C1": 1, "C3": 2, "C7": 5},
    "M4C1": {"C1": 2, "C7": 2, "C8": 2, "C10": 56, "C13": 3, "C14": 16},
    "M4C2": {"C6": 12, "C8": 18, "C9": 24, "C14": 4},
    "M5C1": {"C1": 1, "C7": 1, "C9": 6, "C10": 24, "C11": 8, "C14": 6},
    "M5C2": {"C1": 6, "C7": 1, "C9": 3, "C10": 24, "C14": 4},
    "M5C3": {"C9": 3, "C10": 8, "C14": 2},
    "M6C1": {"C12": 2},
    "M6C2": {"C7": 2, "C8": 2, "C10": 64, "C12": 2, "C14": 8},
}

MISSION_GOALS = {
    1: [4, 7, 8, 9, 10, 11, 12, 13, 16],
    2: [1, 6, 7, 9, 11, 12, 13, 14],
    3: [9, 11, 13],
    4: [3, 4, 5, 7, 8, 9],
    5: [1, 3, 4, 5, 7, 8, 9, 10, 11, 13, 16],
    6: [1, 3, 4, 7, 9],
}
# Millions of euro; mission 1 is 40,290 in the published table, trimmed by the
# 10 million rounding difference so missions and goals share one total.
MISSION_AMOUNT = {1: 40280, 2: 59460, 3: 25400, 4: 30880, 5: 19850, 6: 15630}
MISSION_SDG_OCCURRENCES = {1: 16, 2: 23, 3: 7, 4: 23, 5: 29, 6: 8}
GOAL_AMOUNT = {
    1: 2650, 2: 0, 3: 13506, 4: 16738, 5: 85, 6: 2380, 7: 34314, 8: 8648,
    9: 57444, 10: 800, 11: 20726, 12: 3925, 13: 19711, 14: 400, 15: 0,
    16: 10173, 17: 0,
}


def admin_lookup(prefix):
    for row in MEASURES_BY_ADMIN:
        if row[0].startswith(prefix):
            return row[0]
    raise KeyError(prefix)


def assign_administrations():
    """Per (kind, has_ic) stratum, fill component cells from administration margins."""
    # capacity[(kind, ic)][admin]
    cap = {}
    for name, i, r, ii, ri in MEASURES_BY_ADMIN:
        cap.setdefault(("I", True), {})[name] = ii
        cap.setdefault(("I", False), {})[name] = i - ii
        cap.setdefault(("R", True), {})[name] = ri
        cap.setdefault(("R", False), {})[name] = r - ri
    out = {}
    for comp, i, r, ii, ri in MEASURES_BY_COMPONENT:
        need = {("I", True): ii, ("I", False): i - ii, ("R", True): ri, ("R", False): r - ri}
        for stratum, n in need.items():
            admins = []
            prefs = [admin_lookup(p) for p in PREFERRED[comp]]
            order = prefs + [a for a, _, _, _, _ in MEASURES_BY_ADMIN if a not in prefs]
            for a in order:
                while n > 0 and cap[stratum][a] > 0:
                    admins.append(a)
                    cap[stratum][a] -= 1
                    n -= 1
            assert n == 0, (comp, stratum)
            out[(comp, stratum)] = admins
    for stratum in cap:
        assert all(v == 0 for v in cap[stratum].values()), stratum
    return out


def solve_amounts():
    """Mission x goal amounts honoring both margins and the allowed goals."""
    cells = [(m, g) for m in MISSION_GOALS for g in MISSION_GOALS[m] if GOAL_AMOUNT[g] > 0]
    n = len(cells)
    a_eq, b_eq = [], []
    for m in MISSION_GOALS:
        a_eq.append([1.0 if c[0] == m else 0.0 for c in cells])
        b_eq.append(MISSION_AMOUNT[m])
    for g in GOAL_AMOUNT:
        if GOAL_AMOUNT[g] == 0:
            continue
        a_eq.append([1.0 if c[1] == g else 0.0 for c in cells])
        b_eq.append(GOAL_AMOUNT[g])
    # Prefer spreading: minimize the largest cell share deviation via a small
    # quadratic-free proxy (maximize the minimum cell amount).
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.zeros((n, n + 1))
    for k in range(n):
        a_ub[k, k] = -1.0
        a_ub[k, -1] = 1.0
    a_eq = np.hstack([np.array(a_eq), np.zeros((len(a_eq), 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n), A_eq=a_eq, b_eq=np.array(b_eq),
                  bounds=[(0, None)] * n + [(0, 1000)], method="highs")
    assert res.success, res.message
    # Transport constraints are totally unimodular: with an integral lower
    # bound a simplex vertex is integral.
    floor = math.floor(res.x[-1])
    res = linprog(np.zeros(n), A_eq=a_eq[:, :n], b_eq=np.array(b_eq),
                  bounds=[(floor, None)] * n, method="highs-ds")
    assert res.success, res.message
    amounts = {cells[k]: int(round(res.x[k])) for k in range(n)}
    assert all(abs(res.x[k] - amounts[cells[k]]) < 1e-6 for k in range(n))
    for m in MISSION_GOALS:
        got = sum(v for k, v in amounts.items() if k[0] == m)
        assert got == MISSION_AMOUNT[m], (m, got)
    return amounts


def build_sdg_indicators():
    """Synthetic SDG indicator ids per mission, covering each mission's goals."""
    goal_of = {}
    per_mission = {}
    counter = {}
    reuse_pool = []

    def new_id(goal):
        counter[goal] = counter.get(goal, 0) + 1
        ident = "SDG-G%02d-%02d" % (goal, counter[goal])
        goal_of[ident] = goal
        return ident

    base = {}
    for m, goals in MISSION_GOALS.items():
        ids = []
        for g in goals:
            if g not in base:
                base[g] = new_id(g)
            ids.append(base[g])
        per_mission[m] = ids
    reuses_left = 106 - 64 - (sum(len(v) for v in MISSION_GOALS.values()) - len(base))
    for m, goals in MISSION_GOALS.items():
        extra = MISSION_SDG_OCCURRENCES[m] - len(goals)
        k = 0
        while extra > 0:
            g = goals[k % len(goals)]
            candidates = [i for i in reuse_pool if goal_of[i] == g and i not in per_mission[m]]
            if reuses_left > 0 and candidates:
                ident = candidates[0]
                reuses_left -= 1
            else:
                ident = new_id(g)
                reuse_pool.append(ident)
            per_mission[m].append(ident)
            extra -= 1
            k += 1
    assert reuses_left == 0, reuses_left
    assert len(goal_of) == 64, len(goal_of)
    return goal_of, per_mission


def write_catalog():
    admins = assign_administrations()
    amounts = solve_amounts()
    goal_of, sdg_by_mission = build_sdg_indicators()

    records = []
    for comp, n_i, n_r, ic_i, ic_r in MEASURES_BY_COMPONENT:
        mission, component = int(comp[1]), int(comp[3])
        comp_records = []
        for kind, total, with_ic in (("I", n_i, ic_i), ("R", n_r, ic_r)):
            with_adm = admins[(comp, (kind, True))]
            without_adm = admins[(comp, (kind, False))]
            for k in range(total):
                measure, sub = k // 4 + 1, k % 4 + 1
                code = "M%dC%d%s%d.%d" % (mission, component, kind, measure, sub)
                has_ic = k < with_ic
                adm = with_adm[k] if has_ic else without_adm[k - with_ic]
                comp_records.append({
                    "code": code,
                    "administration": adm,
                    "kind": kind,
                    "has_ic": has_ic,
                    "common_indicators": {},
                    "sdg_indicators": [],
                })
        # common indicator occurrences, round robin over records with IC
        ic_records = [r for r in comp_records if r["has_ic"]]
        occ = [c for c in CI for _ in range(OCCURRENCES_BY_COMPONENT[comp].get(c, 0))]
        for j, c in enumerate(occ):
            r = ic_records[j % len(ic_records)]
            r["common_indicators"][c] = r["common_indicators"].get(c, 0) + 1
        records.extend(comp_records)

    by_mission = {}
    for r in records:
        by_mission.setdefault(int(r["code"][1]), []).append(r)
    for m, recs in by_mission.items():
        invs = [r for r in recs if r["kind"] == "I"]
        refs = [r for r in recs if r["kind"] == "R"]
        # split each mission x goal amount across investments
        cells = sorted((g, v) for (mm, g), v in amounts.items() if mm == m and v > 0)
        slots = [[] for _ in cells]
        for j, r in enumerate(invs):
            slots[j % len(cells)].append(r)
        for (g, v), rs in zip(cells, slots):
            assert rs, (m, g)
            base, rem = divmod(v, len(rs))
            for j, r in enumerate(rs):
                r["amount"] = base + (1 if j < rem else 0)
                r["prevalent_goal"] = g
        goals = MISSION_GOALS[m]
        for j, r in enumerate(refs):
            r["amount"] = 0
            r["prevalent_goal"] = goals[j % len(goals)]
        # SDG indicators: one of the prevalent goal, then spread the rest
        ids = sdg_by_mission[m]
        used = set()
        for r in recs:
            ident = next(i for i in ids if goal_of[i] == r["prevalent_goal"])
            r["sdg_indicators"].append(ident)
            used.add(ident)
        rest = [i for i in ids if i not in used]
        for j, ident in enumerate(rest):
            r = recs[j % len(recs)]
            if ident not in r["sdg_indicators"]:
                r["sdg_indicators"].append(ident)
    for r in records:
        r["sdg_indicators"].sort()
        del r["kind"]
        del r["has_ic"]

    catalog = {
        "sdg_indicators": {k: goal_of[k] for k in sorted(goal_of)},
        "records": [
            {
                "code": r["code"],
                "administration": r["administration"],
                "amount": r["amount"],
                "common_indicators": {k: r["common_indicators"][k]
                                      for k in sorted(r["common_indicators"], key=lambda c: int(c[1:]))},
                "sdg_indicators": r["sdg_indicators"],
                "prevalent_goal": r["prevalent_goal"],
            }
            for r in records
        ],
    }
    with open(os.path.join(DATA, "pnrr_catalog.json"), "w") as f:
        json.dump(catalog, f, indent=2, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    write_index_fixtures()
    write_catalog()
