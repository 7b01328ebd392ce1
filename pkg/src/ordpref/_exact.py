"""Exact-rational LP solving for small regression instances.

Two-phase primal simplex over Fractions with Bland's rule.  Meant for
hand-sized problems where floating-point round-off could muddy a
regression; it mirrors the result shape of the floating-point path.
"""

from __future__ import annotations

from fractions import Fraction


def solve_exact(problem):
    from ordpref.lp_engine import LpOutcome, LpStatus, SolverError  # deferred: avoids an import cycle

    minimize = problem.sense == "min"
    sense = 1 if minimize else -1

    # Column layout: every variable becomes one or two nonnegative columns.
    # (kind, data): ("pm", plus_col, minus_col) for free vars, ("shift", col, lower).
    col_of: list[tuple] = []
    cols = 0
    for v in problem.variables:
        if v.lower is None:
            col_of.append(("pm", cols, cols + 1))
            cols += 2
        else:
            col_of.append(("shift", cols, Fraction(v.lower)))
            cols += 1

    def expand(coeffs):
        row = [Fraction(0)] * cols
        shift_total = Fraction(0)
        for coeff, spec in zip(coeffs, col_of):
            c = Fraction(coeff)
            if c == 0:
                continue
            if spec[0] == "pm":
                row[spec[1]] += c
                row[spec[2]] -= c
            else:
                row[spec[1]] += c
                shift_total += c * spec[2]
        return row, shift_total

    rows: list[list[Fraction]] = []
    rels: list[str] = []
    rhss: list[Fraction] = []
    for con in problem.constraints:
        row, shift = expand(con.coeffs)
        rows.append(row)
        rels.append(con.relation)
        rhss.append(Fraction(con.rhs) - shift)
    for v, spec in zip(problem.variables, col_of):
        if v.upper is None:
            continue
        row = [Fraction(0)] * cols
        if spec[0] == "pm":
            row[spec[1]], row[spec[2]] = Fraction(1), Fraction(-1)
            bound = Fraction(v.upper)
        else:
            row[spec[1]] = Fraction(1)
            bound = Fraction(v.upper) - spec[2]
        rows.append(row)
        rels.append("<=")
        rhss.append(bound)

    for i in range(len(rows)):
        if rhss[i] < 0:
            rows[i] = [-c for c in rows[i]]
            rhss[i] = -rhss[i]
            if rels[i] == "<=":
                rels[i] = ">="
            elif rels[i] == ">=":
                rels[i] = "<="

    m = len(rows)
    n_slack = sum(1 for r in rels if r in ("<=", ">="))
    slack_start = cols
    art_start = cols + n_slack
    n_art = sum(1 for r in rels if r in (">=", "=="))
    width = art_start + n_art

    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    s_at, a_at = slack_start, art_start
    for i in range(m):
        row = rows[i] + [Fraction(0)] * (width - cols) + [rhss[i]]
        if rels[i] == "<=":
            row[s_at] = Fraction(1)
            basis.append(s_at)
            s_at += 1
        elif rels[i] == ">=":
            row[s_at] = Fraction(-1)
            row[a_at] = Fraction(1)
            basis.append(a_at)
            s_at += 1
            a_at += 1
        else:
            row[a_at] = Fraction(1)
            basis.append(a_at)
            a_at += 1
        tableau.append(row)

    def reduced_costs(cost):
        red = list(cost) + [Fraction(0)]
        for r, bv in enumerate(basis):
            cb = cost[bv]
            if cb:
                row = tableau[r]
                for j in range(width + 1):
                    red[j] -= cb * row[j]
        return red

    def pivot(r, j):
        row = tableau[r]
        piv = row[j]
        tableau[r] = [c / piv for c in row]
        row = tableau[r]
        for rr in range(m):
            if rr != r and tableau[rr][j]:
                factor = tableau[rr][j]
                tableau[rr] = [c - factor * d for c, d in zip(tableau[rr], row)]
        basis[r] = j

    def iterate(red, allowed):
        while True:
            enter = next((j for j in range(width) if allowed[j] and red[j] < 0), None)
            if enter is None:
                return "optimal"
            best = None
            for r in range(m):
                a = tableau[r][enter]
                if a > 0:
                    ratio = tableau[r][-1] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                        best = (ratio, r)
            if best is None:
                return "unbounded"
            r = best[1]
            factor = red[enter]
            pivot(r, enter)
            row = tableau[r]
            for j in range(width + 1):
                red[j] -= factor * row[j]

    if n_art:
        cost1 = [Fraction(0)] * width
        for j in range(art_start, width):
            cost1[j] = Fraction(1)
        red = reduced_costs(cost1)
        outcome = iterate(red, [True] * width)
        if outcome != "optimal":
            raise SolverError("phase-1 objective cannot be unbounded")
        if -red[-1] > 0:
            return LpOutcome(LpStatus.INFEASIBLE, None, None)
        drop = []
        for r in range(m):
            if basis[r] >= art_start:
                j = next((jj for jj in range(art_start) if tableau[r][jj] != 0), None)
                if j is None:
                    drop.append(r)
                else:
                    pivot(r, j)
        if drop:
            for r in sorted(drop, reverse=True):
                del tableau[r]
                del basis[r]
            m = len(tableau)

    cost2 = [Fraction(0)] * width
    for coeff, spec in zip(problem.objective, col_of):
        c = Fraction(coeff) * sense
        if spec[0] == "pm":
            cost2[spec[1]] += c
            cost2[spec[2]] -= c
        else:
            cost2[spec[1]] += c
    allowed = [j < art_start for j in range(width)]
    red = reduced_costs(cost2)
    if iterate(red, allowed) == "unbounded":
        return LpOutcome(LpStatus.UNBOUNDED, None, None)

    values = [Fraction(0)] * width
    for r, bv in enumerate(basis):
        values[bv] = tableau[r][-1]
    xs: list[Fraction] = []
    for spec in col_of:
        if spec[0] == "pm":
            xs.append(values[spec[1]] - values[spec[2]])
        else:
            xs.append(values[spec[1]] + spec[2])
    objective = sum(
        (Fraction(c) * x for c, x in zip(problem.objective, xs)), Fraction(0)
    )
    return LpOutcome(LpStatus.OPTIMAL, float(objective), tuple(float(x) for x in xs))
