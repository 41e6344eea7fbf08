#!/usr/bin/env python3
"""Reference external LP solver: reads a fixed-format MPS file, solves it
with scipy (HiGHS), and writes one "<column> <value>" line per column.

Usage: mps_solve.py problem.mps solution.txt
Exit codes: 0 optimal, 2 infeasible, 3 unbounded, 1 anything else.
"""
import sys

import numpy as np
from scipy.optimize import linprog


def parse_mps(path):
    section = None
    maximize = False
    rows = {}          # name -> sense
    order = []         # constraint names in order
    obj_row = None
    cols = {}          # name -> {row: coef}
    rhs = {}
    bounds = {}        # name -> [lo, up]
    with open(path) as f:
        for raw in f:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0]
                continue
            fields = line.split()
            if section == "OBJSENSE":
                maximize = fields[0].upper() == "MAX"
            elif section == "ROWS":
                sense, name = fields[0], fields[1]
                if sense == "N":
                    obj_row = name
                else:
                    rows[name] = sense
                    order.append(name)
            elif section == "COLUMNS":
                name = fields[0]
                col = cols.setdefault(name, {})
                for k in range(1, len(fields) - 1, 2):
                    col[fields[k]] = float(fields[k + 1])
            elif section == "RHS":
                for k in range(1, len(fields) - 1, 2):
                    rhs[fields[k]] = float(fields[k + 1])
            elif section == "BOUNDS":
                btype, _, name = fields[0], fields[1], fields[2]
                lo, up = bounds.get(name, (0.0, None))
                if btype == "FR":
                    lo, up = None, None
                elif btype == "LO":
                    lo = float(fields[3])
                elif btype == "UP":
                    up = float(fields[3])
                elif btype == "FX":
                    lo = up = float(fields[3])
                bounds[name] = (lo, up)
    return maximize, rows, order, obj_row, cols, rhs, bounds


def main():
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    maximize, rows, order, obj_row, cols, rhs, bounds = parse_mps(sys.argv[1])
    names = sorted(cols)
    n = len(names)
    idx = {nm: j for j, nm in enumerate(names)}

    c = np.zeros(n)
    for nm in names:
        c[idx[nm]] = cols[nm].get(obj_row, 0.0)
    if maximize:
        c = -c

    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for rname in order:
        coef = np.zeros(n)
        for nm in names:
            coef[idx[nm]] = cols[nm].get(rname, 0.0)
        beta = rhs.get(rname, 0.0)
        sense = rows[rname]
        if sense == "L":
            a_ub.append(coef)
            b_ub.append(beta)
        elif sense == "G":
            a_ub.append(-coef)
            b_ub.append(-beta)
        else:
            a_eq.append(coef)
            b_eq.append(beta)

    bnds = [bounds.get(nm, (0.0, None)) for nm in names]
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bnds,
        method="highs",
    )
    if res.status == 2:
        return 2
    if res.status == 3:
        return 3
    if not res.success:
        print(res.message, file=sys.stderr)
        return 1
    with open(sys.argv[2], "w") as out:
        for nm in names:
            out.write(f"{nm} {res.x[idx[nm]]:.17g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
