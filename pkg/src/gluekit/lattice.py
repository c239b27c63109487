"""Linear algebra over the discrete valuation ring R and its residue field.

Matrices are lists of rows with entries in K = R[1/pi] (``mpq`` or Q(t)
elements).  Pivots are always chosen with minimal pi-adic valuation, so
every elimination ratio is integral and all transformations stay in
GL(R).
"""

from __future__ import annotations

from dataclasses import dataclass

from .ring.base import INF, BasePair


@dataclass
class SmithData:
    """``U * M * V = diag(pi^e_0 u_0, ..., pi^e_{r-1} u_{r-1}, 0, ...)``.

    U and V are invertible over R.  ``diag`` holds the nonzero pivots.
    """

    U: list
    V: list
    diag: list
    valuations: list

    @property
    def rank(self) -> int:
        return len(self.diag)


def identity(n: int, base: BasePair) -> list:
    return [[base.one if i == j else base.zero for j in range(n)] for i in range(n)]


def smith(M: list, base: BasePair, ncols: int | None = None, track_u: bool = True) -> SmithData:
    m = len(M)
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    W = [list(row) for row in M]
    U = identity(m, base) if track_u else None
    V = identity(n, base)
    val = base.valuation
    diag, vals = [], []
    k = 0
    while k < min(m, n):
        best, bv = None, INF
        for i in range(k, m):
            row = W[i]
            for j in range(k, n):
                c = row[j]
                if c:
                    v = val(c)
                    if v < bv:
                        best, bv = (i, j), v
        if best is None:
            break
        i, j = best
        if i != k:
            W[i], W[k] = W[k], W[i]
            if track_u:
                U[i], U[k] = U[k], U[i]
        if j != k:
            for row in W:
                row[j], row[k] = row[k], row[j]
            for row in V:
                row[j], row[k] = row[k], row[j]
        piv = W[k][k]
        for i in range(k + 1, m):
            c = W[i][k]
            if c:
                q = c / piv
                Wi, Wk = W[i], W[k]
                for j in range(k, n):
                    if Wk[j]:
                        Wi[j] = Wi[j] - q * Wk[j]
                if track_u:
                    Ui, Uk = U[i], U[k]
                    for j in range(m):
                        if Uk[j]:
                            Ui[j] = Ui[j] - q * Uk[j]
        for j in range(k + 1, n):
            c = W[k][j]
            if c:
                q = c / piv
                for row in W:
                    if row[k]:
                        row[j] = row[j] - q * row[k]
                for row in V:
                    if row[k]:
                        row[j] = row[j] - q * row[k]
        diag.append(piv)
        vals.append(bv)
        k += 1
    return SmithData(U, V, diag, vals)


def smith_invariants(M: list, base: BasePair, ncols: int | None = None) -> list:
    """Valuations of the Smith diagonal (the elementary divisors pi^e)."""
    return sorted(smith(M, base, ncols, track_u=False).valuations)


def integral_preimage(M: list, base: BasePair, ncols: int) -> tuple[list, list]:
    """The set {c in K^n : M c in R^m} as ``(lattice_basis, kernel_basis)``.

    The set is the direct sum of the R-span of ``lattice_basis`` and the
    K-span of ``kernel_basis`` (the kernel of M).
    """
    sd = smith(M, base, ncols, track_u=False)
    V = sd.V
    lat = []
    for i, e in enumerate(sd.valuations):
        s = base.pi_power(-e) / base.unit_part(sd.diag[i])
        lat.append([V[r][i] * s for r in range(ncols)])
    ker = [[V[r][i] for r in range(ncols)] for i in range(sd.rank, ncols)]
    return lat, ker


def solve_integral(columns: list, target: list, base: BasePair):
    """Coefficients c in R^k with sum c_i * columns[i] = target, or None."""
    k = len(columns)
    n = len(target)
    if k == 0:
        return [] if all(not t for t in target) else None
    M = [[columns[j][i] for j in range(k)] for i in range(n)]
    sd = smith(M, base, k)
    Ut = [sum((sd.U[i][j] * target[j] for j in range(n) if sd.U[i][j] and target[j]), base.zero)
          for i in range(n)]
    y = [base.zero] * k
    for i in range(n):
        if i < sd.rank:
            q = Ut[i] / sd.diag[i]
            if q and base.valuation(q) < 0:
                return None
            y[i] = q
        elif Ut[i]:
            return None
    return [sum((sd.V[r][i] * y[i] for i in range(k) if y[i]), base.zero) for r in range(k)]


def solve_field(columns: list, target: list, base: BasePair):
    """Coefficients over K with sum c_i * columns[i] = target, or None."""
    k = len(columns)
    n = len(target)
    if k == 0:
        return [] if all(not t for t in target) else None
    M = [[columns[j][i] for j in range(k)] for i in range(n)]
    sd = smith(M, base, k)
    Ut = [sum((sd.U[i][j] * target[j] for j in range(n) if sd.U[i][j] and target[j]), base.zero)
          for i in range(n)]
    y = [base.zero] * k
    for i in range(n):
        if i < sd.rank:
            y[i] = Ut[i] / sd.diag[i]
        elif Ut[i]:
            return None
    return [sum((sd.V[r][i] * y[i] for i in range(k) if y[i]), base.zero) for r in range(k)]


def echelon(vectors: list, coord_order: list, base: BasePair) -> list[tuple[int, list]]:
    """Echelon basis of the R-span of ``vectors``.

    Coordinates are eliminated in ``coord_order``; returns pairs
    (pivot coordinate, vector).  The R-span of the vectors whose pivots
    come after position ``i`` of ``coord_order`` is exactly the part of the
    lattice vanishing on the first ``i`` coordinates.
    """
    pool = [list(v) for v in vectors if any(v)]
    out = []
    val = base.valuation
    for coord in coord_order:
        best, bv = None, INF
        for idx, v in enumerate(pool):
            c = v[coord]
            if c:
                cv = val(c)
                if cv < bv:
                    best, bv = idx, cv
        if best is None:
            continue
        piv = pool.pop(best)
        pc = piv[coord]
        piv = [x / base.unit_part(pc) for x in piv]
        pc = piv[coord]
        for v in pool:
            c = v[coord]
            if c:
                q = c / pc
                for i, x in enumerate(piv):
                    if x:
                        v[i] = v[i] - q * x
        pool = [v for v in pool if any(v)]
        out.append((coord, piv))
    return out


def lattice_contains(basis: list, vector: list, base: BasePair) -> bool:
    return solve_integral(basis, vector, base) is not None


def same_lattice(a: list, b: list, base: BasePair) -> bool:
    return all(lattice_contains(b, v, base) for v in a) and all(lattice_contains(a, v, base) for v in b)


# residue-field linear algebra ------------------------------------------------

class ResidueField:
    """Arithmetic in R/pi through canonical residues."""

    def __init__(self, base: BasePair):
        self.base = base

    def red(self, c):
        return self.base.residue(c, 1) if c else self.base.zero

    def div(self, a, b):
        return self.red(a / b)


def residue_rank_solve(columns: list, target: list, base: BasePair):
    """Solve sum c_i * columns[i] = target over R/pi.

    Entries must be integral; returns residue coefficients or None.
    """
    F = ResidueField(base)
    k = len(columns)
    n = len(target)
    rows = [[F.red(columns[j][i]) for j in range(k)] + [F.red(target[i])] for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c]
        rows[r] = [F.div(x, inv) for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c]:
                q = rows[i][c]
                rows[i] = [F.red(x - q * y) for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][k] for i in range(r, n)):
        return None
    sol = [base.zero] * k
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][k]
    return sol
