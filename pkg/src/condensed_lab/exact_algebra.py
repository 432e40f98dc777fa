"""Exact integer linear algebra.

Everything downstream (bar complexes, Cech complexes, Koszul complexes,
window models) funnels into this module: sparse arbitrary-precision integer
matrices, Smith normal form with unimodular transforms, homology of bounded
chain complexes of free Z-modules, canonical forms of finitely generated
abelian groups, and Pontrjagin duals of finite groups.

All values are immutable after construction and every operation is a pure
function.  No floating point, no modular shortcuts: Python ints throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd


class StructuralError(ValueError):
    """Shape or invariant violation in matrix/complex data."""


# ---------------------------------------------------------------------------
# sparse integer matrices

# Entries denser than this are eliminated on a dense list-of-lists copy;
# sparser ones stay in dict-of-dicts form.
DENSIFY_FILL = 0.25


class IntMatrix:
    """Immutable sparse matrix over Z.

    Entries are stored as a dict ``(row, col) -> nonzero int``; absent keys
    are zero.  Matrices act on column vectors from the left.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows, cols, entries=()):
        if rows < 0 or cols < 0:
            raise StructuralError("negative matrix dimensions")
        self.rows = rows
        self.cols = cols
        data = {}
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise StructuralError(f"entry ({r},{c}) out of range {rows}x{cols}")
            if (r, c) in data:
                raise StructuralError(f"duplicate entry at ({r},{c})")
            if v:
                data[r, c] = int(v)
        self._data = data

    @classmethod
    def from_rows(cls, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        entries = []
        for r, row in enumerate(rows_list):
            if len(row) != cols:
                raise StructuralError("ragged rows")
            for c, v in enumerate(row):
                if v:
                    entries.append((r, c, v))
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [(i, i, 1) for i in range(n)])

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def diagonal(cls, diag, rows=None, cols=None):
        n = len(diag)
        rows = n if rows is None else rows
        cols = n if cols is None else cols
        return cls(rows, cols, [(i, i, d) for i, d in enumerate(diag) if d])

    def entry(self, r, c):
        return self._data.get((r, c), 0)

    def items(self):
        return self._data.items()

    @property
    def nnz(self):
        return len(self._data)

    def fill_ratio(self):
        cells = self.rows * self.cols
        return self.nnz / cells if cells else 0.0

    def is_zero(self):
        return not self._data

    def to_rows(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._data.items():
            out[r][c] = v
        return out

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         [(c, r, v) for (r, c), v in self._data.items()])

    def column(self, c):
        return [self.entry(r, c) for r in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (self.rows, self.cols, self._data) == (other.rows, other.cols, other._data)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._data.items())))

    def __neg__(self):
        return IntMatrix(self.rows, self.cols,
                         [(r, c, -v) for (r, c), v in self._data.items()])

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise StructuralError("shape mismatch in addition")
        data = dict(self._data)
        for key, v in other._data.items():
            w = data.get(key, 0) + v
            if w:
                data[key] = w
            else:
                data.pop(key, None)
        return IntMatrix(self.rows, self.cols,
                         [(r, c, v) for (r, c), v in data.items()])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        if k == 0:
            return IntMatrix.zero(self.rows, self.cols)
        return IntMatrix(self.rows, self.cols,
                         [(r, c, k * v) for (r, c), v in self._data.items()])

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise StructuralError(
                f"shape mismatch in product: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        # sparse row-times-column accumulation
        rows_of_other = {}
        for (r, c), v in other._data.items():
            rows_of_other.setdefault(r, []).append((c, v))
        acc = {}
        for (r, k), v in self._data.items():
            for c, w in rows_of_other.get(k, ()):
                key = (r, c)
                s = acc.get(key, 0) + v * w
                if s:
                    acc[key] = s
                else:
                    del acc[key]
        return IntMatrix(self.rows, other.cols,
                         [(r, c, v) for (r, c), v in acc.items()])

    def apply(self, vec):
        """Matrix times column vector (a sequence of ints)."""
        if len(vec) != self.cols:
            raise StructuralError("vector length mismatch")
        out = [0] * self.rows
        for (r, c), v in self._data.items():
            if vec[c]:
                out[r] += v * vec[c]
        return out

    def hstack(self, other):
        if self.rows != other.rows:
            raise StructuralError("row mismatch in hstack")
        entries = [(r, c, v) for (r, c), v in self._data.items()]
        entries += [(r, c + self.cols, v) for (r, c), v in other._data.items()]
        return IntMatrix(self.rows, self.cols + other.cols, entries)

    def vstack(self, other):
        if self.cols != other.cols:
            raise StructuralError("column mismatch in vstack")
        entries = [(r, c, v) for (r, c), v in self._data.items()]
        entries += [(r + self.rows, c, v) for (r, c), v in other._data.items()]
        return IntMatrix(self.rows + other.rows, self.cols, entries)

    def submatrix(self, row_indices, col_indices):
        rmap = {r: i for i, r in enumerate(row_indices)}
        cmap = {c: j for j, c in enumerate(col_indices)}
        entries = [(rmap[r], cmap[c], v) for (r, c), v in self._data.items()
                   if r in rmap and c in cmap]
        return IntMatrix(len(rmap), len(cmap), entries)

    def determinant(self):
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise StructuralError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": sorted([r, c, v] for (r, c), v in self._data.items()),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(obj["rows"], obj["cols"],
                   [(r, c, v) for r, c, v in obj["entries"]])

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


# ---------------------------------------------------------------------------
# Smith normal form

def _xgcd(a, b):
    # returns (g, x, y) with g = xa + yb, g >= 0
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


def smith_normal_form(M: IntMatrix):
    """Return ``(U, D, V)`` with ``D = U @ M @ V`` in Smith normal form.

    U and V are unimodular, D is diagonal with nonnegative entries satisfying
    ``d_1 | d_2 | ...``.  Pivots are chosen by smallest nonzero absolute
    value, which keeps coefficient growth tame; correctness is certified by
    the returned identity, not the strategy.
    """
    a = M.to_rows()
    nr, nc = M.rows, M.cols
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_op(i, j, q):  # row_i -= q*row_j
        ai, aj = a[i], a[j]
        for k in range(nc):
            ai[k] -= q * aj[k]
        ui, uj = u[i], u[j]
        for k in range(nr):
            ui[k] -= q * uj[k]

    def col_op(i, j, q):  # col_i -= q*col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(nr, nc)
    while t < limit:
        # smallest nonzero |entry| in the trailing block
        pivot = None
        best = None
        for i in range(t, nr):
            row = a[i]
            for j in range(t, nc):
                val = row[j]
                if val:
                    if best is None or abs(val) < best:
                        best = abs(val)
                        pivot = (i, j)
                        if best == 1:
                            break
            if best == 1:
                break
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        # Clear row and column t.  A nonzero remainder is strictly smaller
        # than the pivot, so swapping it into the pivot slot and retrying
        # terminates.  Afterwards, force the pivot to divide the whole
        # trailing block (this is what yields the divisibility chain).
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_op(i, t, a[i][t] // p)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_op(j, t, a[t][j] // p)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
                        break
            if dirty:
                continue
            p = a[t][t]
            offender = None
            for i in range(t + 1, nr):
                row = a[i]
                for j in range(t + 1, nc):
                    if row[j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(t, offender, -1)  # row_t += row_offender, then re-clear
        t += 1

    for i in range(limit):
        if a[i][i] < 0:
            negate_row(i)

    U = IntMatrix.from_rows(u)
    D = IntMatrix.from_rows(a)
    V = IntMatrix.from_rows(v)
    return U, D, V


def diagonal_invariants(M: IntMatrix):
    """Invariant factors of M (diagonal of its Smith form), transform-free.

    Unit pivots are eliminated on the sparse structure first; whatever is
    left densifies into the tracked Smith routine.  Matrices that are dense
    to begin with (> DENSIFY_FILL) skip the sparse pass.
    """
    if M.rows == 0 or M.cols == 0 or M.is_zero():
        return []
    ones = 0
    residual = M
    if M.fill_ratio() <= DENSIFY_FILL:
        ones, residual = _sparse_unit_elimination(M)
    if residual is None:
        factors = []
    else:
        _, D, _ = smith_normal_form(residual)
        factors = [D.entry(i, i) for i in range(min(D.rows, D.cols))]
        factors = [d for d in factors if d]
    return [1] * ones + factors


def _sparse_unit_elimination(M: IntMatrix):
    """Split off invariant factors equal to 1 using +-1 pivots.

    Returns (count_of_unit_factors, residual IntMatrix or None).  Candidate
    +-1 cells sit in a lazily-validated queue; each step picks the cheapest
    (Markowitz cost) among a small deterministic batch, which keeps fill low
    without rescanning the whole matrix per pivot.
    """
    from collections import deque

    rows = {}
    cols = {}
    queue = deque()
    for (r, c), v in sorted(M.items()):
        rows.setdefault(r, {})[c] = v
        cols.setdefault(c, set()).add(r)
        if v == 1 or v == -1:
            queue.append((r, c))
    ones = 0
    BATCH = 32
    while queue:
        batch = []
        while queue and len(batch) < BATCH:
            r, c = queue.popleft()
            v = rows.get(r, {}).get(c, 0)
            if v == 1 or v == -1:
                batch.append((r, c))
        if not batch:
            continue
        pr, pc = min(batch,
                     key=lambda rc: ((len(rows[rc[0]]) - 1) * (len(cols[rc[1]]) - 1), rc))
        for other in batch:
            if other != (pr, pc):
                queue.append(other)
        pv = rows[pr][pc]
        prow = rows.pop(pr)
        for c in prow:
            cols[c].discard(pr)
            if not cols[c]:
                del cols[c]
        targets = sorted(cols.get(pc, ()))
        for r in targets:
            row = rows[r]
            factor = row[pc] * pv  # pv in {1,-1}: row -= factor*prow
            for c, v in prow.items():
                w = row.get(c, 0) - factor * v
                if w:
                    if c not in row:
                        cols.setdefault(c, set()).add(r)
                    row[c] = w
                    if w == 1 or w == -1:
                        queue.append((r, c))
                else:
                    if c in row:
                        del row[c]
                        colset = cols.get(c)
                        if colset is not None:
                            colset.discard(r)
                            if not colset:
                                del cols[c]
            if not row:
                del rows[r]
        ones += 1
        if not rows:
            return ones, None
    if not rows:
        return ones, None
    # densify the residual
    rmap = {r: i for i, r in enumerate(sorted(rows))}
    cset = sorted({c for row in rows.values() for c in row})
    cmap = {c: j for j, c in enumerate(cset)}
    entries = [(rmap[r], cmap[c], v) for r, row in rows.items() for c, v in row.items()]
    return ones, IntMatrix(len(rmap), len(cmap), entries)


def matrix_rank(M: IntMatrix):
    return len(diagonal_invariants(M))


def kernel_basis(M: IntMatrix):
    """Columns spanning ker(M) over Z (a saturated sublattice basis)."""
    _, D, V = smith_normal_form(M)
    r = sum(1 for i in range(min(D.rows, D.cols)) if D.entry(i, i))
    cols = list(range(r, M.cols))
    return V.submatrix(range(M.cols), cols)


class SNFSolver:
    """Repeated exact solves M x = b against a fixed matrix."""

    def __init__(self, M: IntMatrix):
        self.M = M
        self.U, self.D, self.V = smith_normal_form(M)
        self._d = [self.D.entry(i, i) for i in range(min(M.rows, M.cols))]

    def solve(self, b):
        """A particular integer solution of M x = b, or None."""
        if len(b) != self.M.rows:
            raise StructuralError("rhs length mismatch")
        y = self.U.apply(b)
        z = [0] * self.M.cols
        for i, yi in enumerate(y):
            d = self._d[i] if i < len(self._d) else 0
            if d == 0:
                if yi != 0:
                    return None
            else:
                if yi % d:
                    return None
                z[i] = yi // d
        return self.V.apply(z)


# ---------------------------------------------------------------------------
# integer lattices (for span-membership tests)

class Lattice:
    """Mutable sublattice of Z^n kept in row-echelon (Hermite-style) form.

    The one stateful helper in the module; used for integer span-membership
    questions.  Rows are reduced with exact gcd steps, so membership answers
    integral (not rational) span.
    """

    def __init__(self, ambient_dim):
        self.n = ambient_dim
        self.basis = []  # rows, echelon by pivot column
        self._pivots = []  # pivot column of each basis row

    def add(self, vec):
        vec = list(vec)
        if len(vec) != self.n:
            raise StructuralError("vector dimension mismatch")
        i = 0
        while True:
            j = next((k for k, x in enumerate(vec) if x), None)
            if j is None:
                return
            while i < len(self._pivots) and self._pivots[i] < j:
                i += 1
            if i == len(self._pivots) or self._pivots[i] > j:
                if vec[j] < 0:
                    vec = [-x for x in vec]
                self.basis.insert(i, vec)
                self._pivots.insert(i, j)
                return
            row = self.basis[i]
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                vec = [x - q * y for x, y in zip(vec, row)]
            else:
                g, x, y = _xgcd(a, b)
                new_row = [x * p + y * q_ for p, q_ in zip(row, vec)]
                vec = [(-(b // g)) * p + (a // g) * q_ for p, q_ in zip(row, vec)]
                self.basis[i] = new_row

    def __contains__(self, vec):
        vec = list(vec)
        i = 0
        for row, piv in zip(self.basis, self._pivots):
            j = next((k for k, x in enumerate(vec) if x), None)
            if j is None:
                return True
            if j < piv:
                return False
            if j == piv:
                if vec[j] % row[j]:
                    return False
                q = vec[j] // row[j]
                vec = [x - q * y for x, y in zip(vec, row)]
        return not any(vec)

    @property
    def rank(self):
        return len(self.basis)

    def contains_lattice(self, other):
        return all(row in self for row in other.basis)

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.contains_lattice(other) and other.contains_lattice(self)


# ---------------------------------------------------------------------------
# finitely generated abelian groups

@dataclass(frozen=True)
class FgAbGroup:
    """Canonical form of a finitely generated abelian group.

    rank counts Z-summands; torsion is the invariant-factor chain
    d_1 | d_2 | ... with every d_i >= 2.  Two groups are isomorphic iff
    their FgAbGroup values are equal.
    """

    rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise StructuralError("negative rank")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        prev = 1
        for d in self.torsion:
            if d < 2:
                raise StructuralError("invariant factors must be >= 2")
            if d % prev:
                raise StructuralError("divisibility chain violated")
            prev = d

    @classmethod
    def from_orders(cls, orders):
        """Canonicalize an arbitrary list of cyclic orders (0 meaning Z)."""
        orders = [abs(int(n)) for n in orders]
        rank = sum(1 for n in orders if n == 0)
        torsion_orders = [n for n in orders if n >= 2]
        if not torsion_orders:
            return cls(rank, ())
        _, D, _ = smith_normal_form(IntMatrix.diagonal(torsion_orders))
        k = len(torsion_orders)
        factors = [D.entry(i, i) for i in range(k)]
        return cls(rank, tuple(d for d in factors if d >= 2))

    @classmethod
    def trivial(cls):
        return cls(0, ())

    def is_trivial(self):
        return self.rank == 0 and not self.torsion

    def order(self):
        """Group order (None if infinite)."""
        if self.rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def direct_sum(self, other):
        return FgAbGroup.from_orders(
            [0] * (self.rank + other.rank) + list(self.torsion) + list(other.torsion))

    def primary_decomposition(self):
        """Elementary divisors p^e (display helper; trial-division factoring)."""
        out = []
        for d in self.torsion:
            n = d
            p = 2
            while p * p <= n:
                if n % p == 0:
                    e = 0
                    while n % p == 0:
                        n //= p
                        e += 1
                    out.append(p ** e)
                p += 1
            if n > 1:
                out.append(n)
        return sorted(out)

    def to_json(self):
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["rank"], tuple(obj["torsion"]))

    def __str__(self):
        parts = ["Z"] * self.rank + [f"C{d}" for d in self.torsion]
        return " x ".join(parts) if parts else "0"


class FinAbGroup:
    """Finite abelian group as a product of cyclic groups.

    Elements are tuples of residues; the group law is componentwise addition
    mod the cyclic orders.
    """

    __slots__ = ("orders",)

    def __init__(self, orders):
        orders = tuple(int(n) for n in orders)
        if any(n < 1 for n in orders):
            raise StructuralError("cyclic orders must be >= 1")
        self.orders = orders

    @property
    def size(self):
        out = 1
        for n in self.orders:
            out *= n
        return out

    @property
    def zero(self):
        return (0,) * len(self.orders)

    def elements(self):
        return [tuple(t) for t in itertools.product(*(range(n) for n in self.orders))]

    def add(self, x, y):
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x):
        return tuple((-a) % n for a, n in zip(x, self.orders))

    def scale(self, k, x):
        return tuple((k * a) % n for a, n in zip(x, self.orders))

    def canonical(self):
        return FgAbGroup.from_orders(self.orders)

    def __eq__(self, other):
        return isinstance(other, FinAbGroup) and self.orders == other.orders

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        if not self.orders:
            return "FinAbGroup(())"
        return "FinAbGroup((%s))" % ", ".join(map(str, self.orders))


def pontrjagin_dual_finite(A: FinAbGroup) -> FgAbGroup:
    """Hom(A, Q/Z) in canonical form.

    A character is determined by its values on the cyclic generators; the
    value on a generator of order n ranges over (1/n)Z/Z = Z/n, and characters
    add pointwise, so the dual is the product of the same cyclic groups.
    """
    return FgAbGroup.from_orders(A.orders)


# ---------------------------------------------------------------------------
# chain complexes

class ChainComplex:
    """Bounded complex of free Z-modules with explicit differentials.

    Degrees run over [lo, hi]; the differential d_i maps degree i to degree
    i-1.  Basis labels are optional bookkeeping (bar complexes and Cech
    complexes attach their simplices).  ``degenerate`` optionally marks, per
    degree, which basis indices are degenerate simplices; it is consumed by
    simplicial.normalized_chains.

    Cochain complexes are stored upside down: degree -i holds the i-th
    cochain group, so the homological convention covers both.
    """

    def __init__(self, lo, hi, ranks, differentials, labels=None, degenerate=None,
                 check=True):
        if hi < lo:
            raise StructuralError("empty degree range")
        self.lo = lo
        self.hi = hi
        self._ranks = dict(ranks)
        for i in range(lo, hi + 1):
            if i not in self._ranks or self._ranks[i] < 0:
                raise StructuralError(f"missing or negative rank at degree {i}")
        self._diff = dict(differentials)
        self.labels = dict(labels) if labels else {}
        self.degenerate = dict(degenerate) if degenerate else None
        for i, M in self._diff.items():
            if not (lo + 1 <= i <= hi):
                raise StructuralError(f"differential at out-of-range degree {i}")
            if (M.rows, M.cols) != (self.rank(i - 1), self.rank(i)):
                raise StructuralError(
                    f"d_{i} has shape {M.rows}x{M.cols}, expected "
                    f"{self.rank(i - 1)}x{self.rank(i)}")
        if check:
            for i in range(lo + 2, hi + 1):
                prod = self.differential(i - 1) @ self.differential(i)
                if not prod.is_zero():
                    raise StructuralError(f"d_{i-1} o d_{i} != 0")

    def rank(self, i):
        return self._ranks.get(i, 0)

    def ranks(self):
        return [self.rank(i) for i in range(self.lo, self.hi + 1)]

    def differential(self, i):
        M = self._diff.get(i)
        if M is None:
            return IntMatrix.zero(self.rank(i - 1), self.rank(i))
        return M

    def homology(self, i):
        """H_i = ker(d_i)/im(d_{i+1}) in canonical form.

        The free rank is nullity(d_i) - rank(d_{i+1}); since ker(d_i) is a
        saturated sublattice containing im(d_{i+1}), the torsion equals the
        nontrivial invariant factors of d_{i+1}.
        """
        if not (self.lo - 1 <= i <= self.hi + 1):
            raise StructuralError(f"degree {i} not adjacent to [{self.lo}, {self.hi}]")
        n_i = self.rank(i)
        if n_i == 0:
            return FgAbGroup.trivial()
        r_out = matrix_rank(self.differential(i)) if self.rank(i - 1) else 0
        inv_in = diagonal_invariants(self.differential(i + 1)) if self.rank(i + 1) else []
        free = n_i - r_out - len(inv_in)
        torsion = [d for d in inv_in if d > 1]
        return FgAbGroup.from_orders([0] * free + torsion)

    def euler_characteristic(self):
        return sum((-1) ** i * self.rank(i) for i in range(self.lo, self.hi + 1))

    def direct_sum(self, other):
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        ranks = {i: self.rank(i) + other.rank(i) for i in range(lo, hi + 1)}
        diffs = {}
        for i in range(lo + 1, hi + 1):
            a = self.differential(i)
            b = other.differential(i)
            entries = [(r, c, v) for (r, c), v in a.items()]
            entries += [(r + a.rows, c + a.cols, v) for (r, c), v in b.items()]
            diffs[i] = IntMatrix(ranks[i - 1], ranks[i], entries)
        return ChainComplex(lo, hi, ranks, diffs, check=False)

    def dualize(self):
        """RHom(-, Z) as a complex: degree i becomes -i, matrices transpose."""
        ranks = {-i: self.rank(i) for i in range(self.lo, self.hi + 1)}
        diffs = {}
        for i in range(self.lo + 1, self.hi + 1):
            diffs[-(i - 1)] = self.differential(i).transpose()
        return ChainComplex(-self.hi, -self.lo, ranks, diffs, check=False)

    def to_json(self):
        return {
            "degrees": [self.lo, self.hi],
            "ranks": self.ranks(),
            "differentials": [
                {"degree": i,
                 "entries": sorted([r, c, v] for (r, c), v in self._diff[i].items())}
                for i in sorted(self._diff)
            ],
        }

    @classmethod
    def from_json(cls, obj):
        lo, hi = obj["degrees"]
        ranks = {lo + k: r for k, r in enumerate(obj["ranks"])}
        diffs = {}
        for d in obj["differentials"]:
            i = d["degree"]
            diffs[i] = IntMatrix(ranks.get(i - 1, 0), ranks.get(i, 0),
                                 [(r, c, v) for r, c, v in d["entries"]])
        return cls(lo, hi, ranks, diffs)

    def __repr__(self):
        return f"ChainComplex([{self.lo},{self.hi}], ranks={self.ranks()})"


def cochain_complex(matrices, ranks=None):
    """Build a cochain complex C^0 -> C^1 -> ... (stored in degrees <= 0).

    ``matrices[k]`` is the map C^k -> C^{k+1}.  Cohomology H^i is then
    ``result.homology(-i)``.
    """
    if ranks is None:
        if not matrices:
            raise StructuralError("need ranks for an empty cochain complex")
        ranks = [matrices[0].cols] + [M.rows for M in matrices]
    n = len(ranks)
    cc_ranks = {-i: ranks[i] for i in range(n)}
    diffs = {}
    for k, M in enumerate(matrices):
        if (M.rows, M.cols) != (ranks[k + 1], ranks[k]):
            raise StructuralError("cochain matrix shape mismatch")
        diffs[-k] = M
    return ChainComplex(-(n - 1), 0, cc_ranks, diffs)
