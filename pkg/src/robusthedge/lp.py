"""Self-contained LP kernel: dense two-phase simplex over exact rationals.

Every optimization in the engine goes through `solve`. The exact mode pivots
on `fractions.Fraction` and returns certificates that re-verify exactly:
an Optimal outcome carries a dual vector satisfying complementary slackness,
an Infeasible outcome carries a Farkas certificate (constraint and bound
multipliers that aggregate to 0 >= positive), and an Unbounded outcome
carries a feasible base point plus an improving ray. Bland's rule guarantees
termination and, together with fixed variable/constraint ordering, makes
outcomes deterministic. Float mode runs the same pivoting with tolerance
comparisons; callers retry in exact mode on NumericalBreakdown.

Dual sign conventions (what `verify_optimal` checks):
  minimize: y_i >= 0 on ">=" rows, y_i <= 0 on "<=" rows, free on "=";
            reduced cost r_j = c_j - y.A_j is >= 0 at a lower bound,
            <= 0 at an upper bound, 0 strictly between.
  maximize: all of the above with signs flipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

_MAX_PIVOTS = 200_000


class NumericalBreakdown(Exception):
    """Float-mode pivoting lost too much accuracy; retry in exact mode."""


@dataclass(frozen=True)
class Mode:
    exact: bool
    tolerance: float = 0.0


EXACT = Mode(exact=True, tolerance=0.0)


def float_mode(tolerance: float = 1e-9) -> Mode:
    return Mode(exact=False, tolerance=tolerance)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str  # "<=", "=", ">="
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple[Fraction, ...]
    maximize: bool
    constraints: tuple[Constraint, ...]
    lower: tuple[Fraction | None, ...]  # None = -inf
    upper: tuple[Fraction | None, ...]  # None = +inf

    @property
    def n(self) -> int:
        return len(self.objective)


def linear_program(
    objective,
    *,
    maximize: bool,
    constraints,
    lower=None,
    upper=None,
) -> LinearProgram:
    """Convenience constructor; default bounds are x >= 0 with no upper."""
    obj = tuple(Fraction(c) for c in objective)
    n = len(obj)
    rows = []
    for coeffs, relation, rhs in constraints:
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != n:
            raise ValueError(f"constraint width {len(coeffs)} != {n} variables")
        if relation not in ("<=", "=", ">="):
            raise ValueError(f"bad relation {relation!r}")
        rows.append(Constraint(coeffs, relation, Fraction(rhs)))
    lo = tuple(Fraction(0) for _ in range(n)) if lower is None else tuple(
        None if b is None else Fraction(b) for b in lower
    )
    up = tuple(None for _ in range(n)) if upper is None else tuple(
        None if b is None else Fraction(b) for b in upper
    )
    if len(lo) != n or len(up) != n:
        raise ValueError("bounds must match the number of variables")
    return LinearProgram(obj, maximize, tuple(rows), lo, up)


@dataclass(frozen=True)
class Optimal:
    value: Fraction | float
    primal: tuple
    dual: tuple


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers aggregating the system to an impossible inequality.

    rows[i] multiplies constraint i (<= rows need rows[i] <= 0, >= rows
    need rows[i] >= 0, = rows are free); lower[j] >= 0 multiplies x_j >= l_j
    and upper[j] >= 0 multiplies -x_j >= -u_j. Validity: the aggregated
    left-hand side vanishes coordinatewise while the aggregated right-hand
    side is strictly positive.
    """

    rows: tuple
    lower: tuple
    upper: tuple


@dataclass(frozen=True)
class Infeasible:
    certificate: FarkasCertificate


@dataclass(frozen=True)
class Unbounded:
    ray: tuple
    base: tuple


LpOutcome = Optimal | Infeasible | Unbounded

_dump_path: str | None = None


def set_dump_file(path: str | None) -> None:
    """Debug hook: append every solved LP to `path` as plain text."""
    global _dump_path
    _dump_path = path


def lp_to_text(lp: LinearProgram) -> str:
    sense = "max" if lp.maximize else "min"
    lines = [f"{sense} " + " ".join(str(c) for c in lp.objective)]
    for con in lp.constraints:
        lines.append(
            " ".join(str(c) for c in con.coeffs) + f" {con.relation} {con.rhs}"
        )
    lines.append(
        "lower " + " ".join("-inf" if b is None else str(b) for b in lp.lower)
    )
    lines.append(
        "upper " + " ".join("+inf" if b is None else str(b) for b in lp.upper)
    )
    return "\n".join(lines) + "\n"


def solve(lp: LinearProgram, mode: Mode = EXACT) -> LpOutcome:
    """Solve the LP; outcome certificates satisfy the module conventions."""
    if _dump_path is not None:
        with open(_dump_path, "a", encoding="utf-8") as handle:
            handle.write(lp_to_text(lp))
            handle.write("\n")
    return _Simplex(lp, mode).run()


# --------------------------------------------------------------------------
# solver internals
# --------------------------------------------------------------------------


class _Simplex:
    """Two-phase tableau simplex on sparse dict rows.

    Standard form: minimize over x~ >= 0 with equality rows; general bounds
    become shifts (finite lower), reflections (finite upper only) or split
    pairs (free), plus one internal row per two-sided variable.
    """

    def __init__(self, lp: LinearProgram, mode: Mode):
        self.lp = lp
        self.mode = mode
        self.eps = 0 if mode.exact else mode.tolerance
        self.drop = 0 if mode.exact else 1e-13
        self._zero = Fraction(0) if mode.exact else 0.0
        self._one = Fraction(1) if mode.exact else 1.0
        self._standardize()

    def _num(self, x: Fraction):
        return x if self.mode.exact else float(x)

    def _standardize(self) -> None:
        lp = self.lp
        self.var_map: list[tuple] = []
        ncols = 0
        ubound_rows: list[tuple[int, Fraction]] = []  # (struct col, cap)
        self.ubound_owner: list[int] = []  # var index per ubound row
        for j in range(lp.n):
            lo, up = lp.lower[j], lp.upper[j]
            if lo is not None:
                self.var_map.append(("shift", ncols, lo))
                if up is not None:
                    ubound_rows.append((ncols, up - lo))
                    self.ubound_owner.append(j)
                ncols += 1
            elif up is not None:
                self.var_map.append(("flip", ncols, up))
                ncols += 1
            else:
                self.var_map.append(("free", ncols, ncols + 1))
                ncols += 2
        self.nstruct = ncols

        # objective in min form over structural columns
        sense = -1 if lp.maximize else 1
        cost: dict[int, Fraction] = {}
        for j, entry in enumerate(self.var_map):
            cj = sense * lp.objective[j]
            if cj == 0:
                continue
            if entry[0] == "shift":
                cost[entry[1]] = cost.get(entry[1], Fraction(0)) + cj
            elif entry[0] == "flip":
                cost[entry[1]] = cost.get(entry[1], Fraction(0)) - cj
            else:
                cost[entry[1]] = cost.get(entry[1], Fraction(0)) + cj
                cost[entry[2]] = cost.get(entry[2], Fraction(0)) - cj

        rows: list[dict[int, Fraction]] = []
        rhs: list[Fraction] = []
        rels: list[str] = []
        self.row_origin: list[tuple[str, int]] = []
        for i, con in enumerate(lp.constraints):
            row: dict[int, Fraction] = {}
            b = con.rhs
            for j, a in enumerate(con.coeffs):
                if a == 0:
                    continue
                entry = self.var_map[j]
                if entry[0] == "shift":
                    row[entry[1]] = row.get(entry[1], Fraction(0)) + a
                    b -= a * entry[2]
                elif entry[0] == "flip":
                    row[entry[1]] = row.get(entry[1], Fraction(0)) - a
                    b -= a * entry[2]
                else:
                    row[entry[1]] = row.get(entry[1], Fraction(0)) + a
                    row[entry[2]] = row.get(entry[2], Fraction(0)) - a
            rows.append({k: v for k, v in row.items() if v != 0})
            rhs.append(b)
            rels.append(con.relation)
            self.row_origin.append(("user", i))
        for k, (col, cap) in enumerate(ubound_rows):
            rows.append({col: Fraction(1)})
            rhs.append(cap)
            rels.append("<=")
            self.row_origin.append(("ubound", k))

        m = len(rows)
        self.flipped = [False] * m
        self.slack_col: list[int | None] = [None] * m
        col = self.nstruct
        for r in range(m):
            if rels[r] == "<=":
                rows[r][col] = Fraction(1)
                self.slack_col[r] = col
                col += 1
            elif rels[r] == ">=":
                rows[r][col] = Fraction(-1)
                self.slack_col[r] = col
                col += 1
        for r in range(m):
            if rhs[r] < 0:
                rows[r] = {k: -v for k, v in rows[r].items()}
                rhs[r] = -rhs[r]
                self.flipped[r] = True

        self.art_col: list[int | None] = [None] * m
        basis: list[int] = []
        for r in range(m):
            sc = self.slack_col[r]
            if sc is not None and rows[r][sc] == 1:
                basis.append(sc)
            else:
                rows[r][col] = Fraction(1)
                self.art_col[r] = col
                basis.append(col)
                col += 1
        self.ncols = col
        self.artificials = {c for c in self.art_col if c is not None}

        # pristine copy for dual extraction at the end
        self.A0 = [dict(row) for row in rows]

        if self.mode.exact:
            self.tab = [dict(row) for row in rows]
            self.rhs = list(rhs)
            self.cost = cost
        else:
            self.tab = [
                {k: float(v) for k, v in row.items()} for row in rows
            ]
            self.rhs = [float(v) for v in rhs]
            self.cost = {k: float(v) for k, v in cost.items()}
        self.basis = basis
        self.m = m

    # -- pivoting ----------------------------------------------------------

    def _pivot(self, r: int, col: int, z: dict) -> None:
        row = self.tab[r]
        piv = row[col]
        if piv != 1:
            for k in list(row):
                row[k] /= piv
            self.rhs[r] /= piv
            row[col] = self._one
        items = list(row.items())
        rr = self.rhs[r]
        for i in range(self.m):
            if i == r:
                continue
            other = self.tab[i]
            f = other.get(col)
            if f is None or self._is_zero(f):
                other.pop(col, None)
                continue
            for k, v in items:
                nv = other.get(k, self._zero) - f * v
                if self._is_zero(nv):
                    other.pop(k, None)
                else:
                    other[k] = nv
            other.pop(col, None)
            nb = self.rhs[i] - f * rr
            self.rhs[i] = self._zero if self._is_zero(nb) else nb
        f = z.get(col)
        if f is not None and not self._is_zero(f):
            for k, v in items:
                nv = z.get(k, self._zero) - f * v
                if self._is_zero(nv):
                    z.pop(k, None)
                else:
                    z[k] = nv
        z.pop(col, None)
        self.basis[r] = col

    def _is_zero(self, x) -> bool:
        if self.mode.exact:
            return x == 0
        return abs(x) <= self.drop

    def _enter(self, z: dict, barred: set[int]) -> int | None:
        for col in range(self.ncols):
            if col in barred:
                continue
            zv = z.get(col)
            if zv is not None and zv < -self.eps:
                return col
        return None

    def _leave(self, col: int) -> int | None:
        best_row = None
        best_ratio = None
        for r in range(self.m):
            d = self.tab[r].get(col)
            if d is None or d <= self.eps:
                continue
            ratio = self.rhs[r] / d
            if best_ratio is None or ratio < best_ratio or (
                ratio == best_ratio and self.basis[r] < self.basis[best_row]
            ):
                best_ratio = ratio
                best_row = r
        return best_row

    def _run_phase(self, z: dict, barred: set[int]) -> int | None:
        """Bland loop; returns the entering column on unboundedness."""
        for _ in range(_MAX_PIVOTS):
            col = self._enter(z, barred)
            if col is None:
                return None
            r = self._leave(col)
            if r is None:
                return col
            self._pivot(r, col, z)
        if self.mode.exact:
            raise RuntimeError("pivot limit exceeded in exact mode (bug)")
        raise NumericalBreakdown("pivot limit exceeded")

    def _z_row(self, cost: dict) -> dict:
        z = dict(cost)
        for r in range(self.m):
            cb = cost.get(self.basis[r])
            if cb is None or self._is_zero(cb):
                continue
            for k, v in self.tab[r].items():
                nv = z.get(k, self._zero) - cb * v
                if self._is_zero(nv):
                    z.pop(k, None)
                else:
                    z[k] = nv
        return z

    # -- solution assembly --------------------------------------------------

    def _std_values(self) -> dict[int, Fraction]:
        vals: dict[int, Fraction] = {}
        for r in range(self.m):
            vals[self.basis[r]] = self.rhs[r]
        return vals

    def _to_user_point(self, std: dict) -> list:
        out = []
        for j, entry in enumerate(self.var_map):
            if entry[0] == "shift":
                out.append(entry[2] + std.get(entry[1], self._zero))
            elif entry[0] == "flip":
                out.append(entry[2] - std.get(entry[1], self._zero))
            else:
                out.append(
                    std.get(entry[1], self._zero) - std.get(entry[2], self._zero)
                )
        return out

    def _to_user_ray(self, std: dict) -> list:
        out = []
        for entry in self.var_map:
            if entry[0] == "shift":
                out.append(std.get(entry[1], self._zero))
            elif entry[0] == "flip":
                out.append(-std.get(entry[1], self._zero))
            else:
                out.append(
                    std.get(entry[1], self._zero) - std.get(entry[2], self._zero)
                )
        return out

    def _basis_duals(self, cost: dict) -> list:
        """Solve y'B = c_B against the pristine matrix (dead rows get 0)."""
        m = self.m
        mat = [[self._num(Fraction(0))] * m for _ in range(m)]
        vec = []
        for e in range(m):
            var = self.basis[e]
            for r in range(m):
                a = self.A0[r].get(var)
                if a is not None:
                    mat[e][r] = self._num(a)
            cv = cost.get(var)
            vec.append(cv if cv is not None else self._zero)
        return _solve_square(mat, vec, self.mode)

    # -- main ---------------------------------------------------------------

    def run(self) -> LpOutcome:
        # phase 1
        c1 = {c: self._one for c in self.artificials}
        z1 = self._z_row(c1)
        unb = self._run_phase(z1, set())
        if unb is not None:
            raise RuntimeError("phase 1 cannot be unbounded (bug)")
        infeas = self._zero
        for r in range(self.m):
            if self.basis[r] in self.artificials:
                infeas += self.rhs[r]
        feas_tol = 0 if self.mode.exact else self.mode.tolerance
        if infeas > feas_tol:
            return self._extract_infeasible(c1)

        # drive basic artificials out on any nonzero structural/slack entry
        for r in range(self.m):
            if self.basis[r] not in self.artificials:
                continue
            target = None
            for col in range(self.ncols):
                if col in self.artificials:
                    continue
                v = self.tab[r].get(col)
                if v is not None and not self._is_zero(v):
                    target = col
                    break
            if target is not None:
                self._pivot(r, target, z1)
            # else: redundant row; its artificial stays basic at zero

        # phase 2
        z2 = self._z_row(self.cost)
        unb = self._run_phase(z2, self.artificials)
        if unb is not None:
            direction: dict[int, Fraction] = {unb: self._one}
            for r in range(self.m):
                d = self.tab[r].get(unb)
                if d is not None and not self._is_zero(d):
                    direction[self.basis[r]] = -d
            ray = self._to_user_ray(direction)
            base = self._to_user_point(self._std_values())
            return Unbounded(tuple(ray), tuple(base))

        primal = self._to_user_point(self._std_values())
        value = sum(
            (self._num(c) * x for c, x in zip(self.lp.objective, primal)),
            self._zero,
        )
        y = self._basis_duals(self.cost)
        sense = -1 if self.lp.maximize else 1
        dual = [self._zero] * len(self.lp.constraints)
        for r in range(self.m):
            kind, idx = self.row_origin[r]
            if kind != "user":
                continue
            yr = -y[r] if self.flipped[r] else y[r]
            dual[idx] = sense * yr
        if not self.mode.exact:
            self._float_sanity(primal)
        return Optimal(value, tuple(primal), tuple(dual))

    def _float_sanity(self, primal: list) -> None:
        scale = 1.0 + max((abs(float(x)) for x in primal), default=0.0)
        tol = max(self.mode.tolerance, 1e-9) * 1e3 * scale
        for con in self.lp.constraints:
            lhs = sum(float(a) * float(x) for a, x in zip(con.coeffs, primal))
            gap = lhs - float(con.rhs)
            if con.relation == "<=" and gap > tol:
                raise NumericalBreakdown("primal feasibility lost")
            if con.relation == ">=" and gap < -tol:
                raise NumericalBreakdown("primal feasibility lost")
            if con.relation == "=" and abs(gap) > tol:
                raise NumericalBreakdown("primal feasibility lost")

    def _extract_infeasible(self, c1: dict) -> Infeasible:
        y = self._basis_duals(c1)
        n = self.lp.n
        srow = [self._zero] * len(self.lp.constraints)
        mrow: dict[int, object] = {}  # var index -> upper-row multiplier
        for r in range(self.m):
            yr = -y[r] if self.flipped[r] else y[r]
            kind, idx = self.row_origin[r]
            if kind == "user":
                srow[idx] = yr
            else:
                mrow[self.ubound_owner[idx]] = yr
        lower_mult = [self._zero] * n
        upper_mult = [self._zero] * n
        for j in range(n):
            lo, up = self.lp.lower[j], self.lp.upper[j]
            g = self._zero
            for i, con in enumerate(self.lp.constraints):
                a = con.coeffs[j]
                if a != 0:
                    g += srow[i] * self._num(a)
            if lo is not None:
                mj = mrow.get(j, self._zero)
                upper_mult[j] = -mj if up is not None else self._zero
                lower_mult[j] = -(g + mj)
            elif up is not None:
                upper_mult[j] = g
        return Infeasible(
            FarkasCertificate(tuple(srow), tuple(lower_mult), tuple(upper_mult))
        )


def _solve_square(mat: list[list], vec: list, mode: Mode) -> list:
    """Gaussian elimination with partial pivoting; exact over Fractions."""
    m = len(vec)
    a = [list(row) + [vec[i]] for i, row in enumerate(mat)]
    for col in range(m):
        pivot_row = None
        best = None
        for r in range(col, m):
            v = a[r][col]
            if v == 0:
                continue
            mag = abs(v) if not mode.exact else 1
            if pivot_row is None or (not mode.exact and mag > best):
                pivot_row = r
                best = mag
                if mode.exact:
                    break
        if pivot_row is None or (not mode.exact and abs(a[pivot_row][col]) < 1e-12):
            raise (
                RuntimeError("singular basis (bug)")
                if mode.exact
                else NumericalBreakdown("singular basis in dual extraction")
            )
        a[col], a[pivot_row] = a[pivot_row], a[col]
        piv = a[col][col]
        for r in range(m):
            if r == col:
                continue
            f = a[r][col]
            if f == 0:
                continue
            ratio = f / piv
            for k in range(col, m + 1):
                a[r][k] -= ratio * a[col][k]
    return [a[i][m] / a[i][i] for i in range(m)]


# --------------------------------------------------------------------------
# certificate verification
# --------------------------------------------------------------------------


def _close(x, y, atol: float) -> bool:
    if atol == 0:
        return x == y
    return abs(float(x) - float(y)) <= atol * (1.0 + abs(float(x)) + abs(float(y)))


def _ge(x, y, atol: float) -> bool:
    if atol == 0:
        return x >= y
    return float(x) >= float(y) - atol * (1.0 + abs(float(x)) + abs(float(y)))


def verify_optimal(lp: LinearProgram, out: Optimal, mode: Mode = EXACT) -> list[str]:
    """Return a list of violations (empty list = certificate checks out)."""
    atol = 0.0 if mode.exact else mode.tolerance * 1e3
    bad: list[str] = []
    x = out.primal
    y = out.dual
    for j in range(lp.n):
        lo, up = lp.lower[j], lp.upper[j]
        if lo is not None and not _ge(x[j], lo, atol):
            bad.append(f"x[{j}] below lower bound")
        if up is not None and not _ge(up, x[j], atol):
            bad.append(f"x[{j}] above upper bound")
    for i, con in enumerate(lp.constraints):
        lhs = sum(a * xv for a, xv in zip(con.coeffs, x))
        if con.relation == "<=" and not _ge(con.rhs, lhs, atol):
            bad.append(f"row {i} violated")
        if con.relation == ">=" and not _ge(lhs, con.rhs, atol):
            bad.append(f"row {i} violated")
        if con.relation == "=" and not _close(lhs, con.rhs, atol):
            bad.append(f"row {i} violated")
        if not _close(y[i] * (lhs - con.rhs), 0, atol):
            bad.append(f"row {i} complementary slackness violated")
        hi_sign = y[i] >= 0 if mode.exact else float(y[i]) >= -atol
        lo_sign = y[i] <= 0 if mode.exact else float(y[i]) <= atol
        want_nonneg = (con.relation == ">=") != lp.maximize
        if con.relation != "=":
            if want_nonneg and not hi_sign:
                bad.append(f"row {i} dual sign violated")
            if not want_nonneg and not lo_sign:
                bad.append(f"row {i} dual sign violated")
    reduced = []
    for j in range(lp.n):
        r = lp.objective[j] - sum(
            y[i] * lp.constraints[i].coeffs[j] for i in range(len(lp.constraints))
        )
        reduced.append(r)
        lo, up = lp.lower[j], lp.upper[j]
        at_lo = lo is not None and _close(x[j], lo, atol)
        at_up = up is not None and _close(x[j], up, atol)
        if at_lo and at_up:
            continue
        sign_lo = r >= 0 if mode.exact else float(r) >= -atol  # min sense
        sign_up = r <= 0 if mode.exact else float(r) <= atol
        if lp.maximize:
            sign_lo, sign_up = sign_up, sign_lo
        if at_lo and not sign_lo:
            bad.append(f"reduced cost sign at lower bound of x[{j}]")
        elif at_up and not sign_up:
            bad.append(f"reduced cost sign at upper bound of x[{j}]")
        elif not at_lo and not at_up and not _close(r, 0, atol):
            bad.append(f"reduced cost of interior x[{j}] not zero")
    if not _close(out.value, sum(c * xv for c, xv in zip(lp.objective, x)), atol):
        bad.append("reported value differs from objective at primal")
    dual_value = sum(y[i] * lp.constraints[i].rhs for i in range(len(lp.constraints)))
    dual_value += sum(reduced[j] * x[j] for j in range(lp.n))
    if not _close(out.value, dual_value, atol):
        bad.append("strong duality identity violated")
    return bad


def verify_infeasible(lp: LinearProgram, out: Infeasible, mode: Mode = EXACT) -> list[str]:
    atol = 0.0 if mode.exact else mode.tolerance * 1e3
    cert = out.certificate
    bad: list[str] = []
    for i, con in enumerate(lp.constraints):
        s = cert.rows[i]
        if con.relation == "<=" and not _ge(0, s, atol):
            bad.append(f"multiplier sign on <= row {i}")
        if con.relation == ">=" and not _ge(s, 0, atol):
            bad.append(f"multiplier sign on >= row {i}")
    for j in range(lp.n):
        if not _ge(cert.lower[j], 0, atol) or not _ge(cert.upper[j], 0, atol):
            bad.append(f"bound multiplier sign for x[{j}]")
        if lp.lower[j] is None and cert.lower[j] != 0:
            bad.append(f"lower multiplier on unbounded-below x[{j}]")
        if lp.upper[j] is None and cert.upper[j] != 0:
            bad.append(f"upper multiplier on unbounded-above x[{j}]")
        combo = sum(
            cert.rows[i] * lp.constraints[i].coeffs[j]
            for i in range(len(lp.constraints))
        )
        combo += cert.lower[j] - cert.upper[j]
        if not _close(combo, 0, atol):
            bad.append(f"aggregated coefficient of x[{j}] does not vanish")
    total = sum(
        cert.rows[i] * lp.constraints[i].rhs for i in range(len(lp.constraints))
    )
    for j in range(lp.n):
        if cert.lower[j] != 0:
            total += cert.lower[j] * lp.lower[j]
        if cert.upper[j] != 0:
            total -= cert.upper[j] * lp.upper[j]
    strict = total > 0 if mode.exact else float(total) > atol
    if not strict:
        bad.append("aggregated right-hand side not positive")
    return bad


def verify_unbounded(lp: LinearProgram, out: Unbounded, mode: Mode = EXACT) -> list[str]:
    atol = 0.0 if mode.exact else mode.tolerance * 1e3
    bad: list[str] = []
    x, r = out.base, out.ray
    for j in range(lp.n):
        lo, up = lp.lower[j], lp.upper[j]
        if lo is not None and (not _ge(x[j], lo, atol) or not _ge(r[j], 0, atol)):
            bad.append(f"base/ray violates lower bound of x[{j}]")
        if up is not None and (not _ge(up, x[j], atol) or not _ge(0, r[j], atol)):
            bad.append(f"base/ray violates upper bound of x[{j}]")
    for i, con in enumerate(lp.constraints):
        lhs = sum(a * xv for a, xv in zip(con.coeffs, x))
        step = sum(a * rv for a, rv in zip(con.coeffs, r))
        if con.relation == "<=" and (not _ge(con.rhs, lhs, atol) or not _ge(0, step, atol)):
            bad.append(f"ray leaves <= row {i}")
        if con.relation == ">=" and (not _ge(lhs, con.rhs, atol) or not _ge(step, 0, atol)):
            bad.append(f"ray leaves >= row {i}")
        if con.relation == "=" and (
            not _close(lhs, con.rhs, atol) or not _close(step, 0, atol)
        ):
            bad.append(f"ray leaves = row {i}")
    gain = sum(c * rv for c, rv in zip(lp.objective, r))
    improving = gain > 0 if lp.maximize else gain < 0
    if mode.exact:
        if not improving:
            bad.append("ray does not improve the objective")
    elif (float(gain) <= atol if lp.maximize else float(gain) >= -atol):
        bad.append("ray does not improve the objective")
    return bad


def verify(lp: LinearProgram, out: LpOutcome, mode: Mode = EXACT) -> list[str]:
    if isinstance(out, Optimal):
        return verify_optimal(lp, out, mode)
    if isinstance(out, Infeasible):
        return verify_infeasible(lp, out, mode)
    return verify_unbounded(lp, out, mode)


# --------------------------------------------------------------------------
# relative interior of a finite convex hull
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RelativeInteriorResult:
    inside: bool
    min_weight: Fraction | None  # best uniform lower weight when 0 is in the hull
    separator: tuple | None  # y with y.v >= 0 for all v, > 0 for some v


def zero_in_relative_interior(
    vectors: list[tuple[Fraction, ...]], mode: Mode = EXACT
) -> RelativeInteriorResult:
    """Decide 0 in ri(conv(vectors)) by the max-min-weight LP.

    0 lies in the relative interior of the hull of finitely many points iff
    some convex combination with all weights strictly positive vanishes; the
    LP maximizes the smallest weight. On failure the dual (or the Farkas
    vector when 0 is outside the hull) separates: y.v >= 0 for every vector
    with at least one strict inequality.
    """
    if not vectors:
        raise ValueError("need at least one vector")
    d = len(vectors[0])
    k = len(vectors)
    nvar = k + 1  # weights q_0..q_{k-1}, then t
    objective = [Fraction(0)] * k + [Fraction(1)]
    constraints = []
    for i in range(d):
        coeffs = [vectors[v][i] for v in range(k)] + [Fraction(0)]
        constraints.append((coeffs, "=", Fraction(0)))
    constraints.append(([Fraction(1)] * k + [Fraction(0)], "=", Fraction(1)))
    for v in range(k):
        coeffs = [Fraction(0)] * nvar
        coeffs[v] = Fraction(1)
        coeffs[k] = Fraction(-1)
        constraints.append((coeffs, ">=", Fraction(0)))
    lower: list[Fraction | None] = [Fraction(0)] * k + [None]
    lp_obj = linear_program(
        objective, maximize=True, constraints=constraints, lower=lower
    )
    out = solve(lp_obj, mode)
    if isinstance(out, Infeasible):
        y = tuple(-out.certificate.rows[i] for i in range(d))
        return RelativeInteriorResult(False, None, y)
    assert isinstance(out, Optimal)
    positive = out.value > 0 if mode.exact else float(out.value) > mode.tolerance
    if positive:
        return RelativeInteriorResult(True, out.value, None)
    y = tuple(out.dual[i] for i in range(d))
    return RelativeInteriorResult(False, out.value, y)
