"""The explicit two-step partial resolution of an abelian group.

For a finite abelian group A this module materializes

    Z[A^3] (+) Z[A^2]  -->  Z[A^2]  -->  Z[A]  -->  A  -->  0

with d_1[a,b] = [a+b] - [a] - [b], the associativity differential
[b,c] - [a+b,c] + [a,b+c] - [a,b] on the Z[A^3] summand and the symmetry
differential [a,b] - [b,a] on the Z[A^2] summand.  The degree-2 formulas are
fixed here once; bd_exactness_check is the arbiter that they present the
right thing.

Universal maps (formal integer combinations of integer matrices acting on
power bases) implement every differential, so functoriality in A is
structural rather than accidental.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .exact_algebra import (
    ChainComplex,
    FgAbGroup,
    FinAbGroup,
    IntMatrix,
    Lattice,
    SNFSolver,
    StructuralError,
    diagonal_invariants,
    kernel_basis,
    matrix_rank,
)


def power_basis(A: FinAbGroup, r):
    """Sorted basis of Z[A^r]: tuples of r group elements."""
    return sorted(itertools.product(A.elements(), repeat=r))


class UniversalMap:
    """Formal sum of integer matrices M, acting Z[A^src] -> Z[A^tgt].

    A term (c, M) sends a generator [v], v in A^src, to c * [M v], where
    (M v)_i = sum_j M[i][j] * v_j is computed in A.  These are exactly the
    natural transformations between power functors, so the induced matrices
    commute with any group homomorphism.
    """

    def __init__(self, src, tgt, terms):
        self.src = src
        self.tgt = tgt
        self.terms = []
        for coeff, rows in terms:
            rows = tuple(tuple(int(x) for x in row) for row in rows)
            if len(rows) != tgt or any(len(row) != src for row in rows):
                raise StructuralError("universal map term has wrong shape")
            self.terms.append((int(coeff), rows))

    def apply_generator(self, A: FinAbGroup, v):
        """List of (coeff, w) with w = M v in A^tgt, one per term."""
        out = []
        for coeff, rows in self.terms:
            w = []
            for row in rows:
                acc = A.zero
                for m, x in zip(row, v):
                    if m:
                        acc = A.add(acc, A.scale(m, x))
                w.append(acc)
            out.append((coeff, tuple(w)))
        return out

    def matrix_on(self, A: FinAbGroup) -> IntMatrix:
        src_basis = power_basis(A, self.src)
        tgt_index = {w: i for i, w in enumerate(power_basis(A, self.tgt))}
        entries = {}
        for col, v in enumerate(src_basis):
            for coeff, w in self.apply_generator(A, v):
                key = (tgt_index[w], col)
                s = entries.get(key, 0) + coeff
                if s:
                    entries[key] = s
                else:
                    del entries[key]
        return IntMatrix(len(tgt_index), len(src_basis),
                         [(r, c, v) for (r, c), v in entries.items()])


D1 = UniversalMap(2, 1, [
    (1, [[1, 1]]),    # [a+b]
    (-1, [[1, 0]]),   # -[a]
    (-1, [[0, 1]]),   # -[b]
])

D2_ASSOC = UniversalMap(3, 2, [
    (1, [[0, 1, 0], [0, 0, 1]]),    # [b, c]
    (-1, [[1, 1, 0], [0, 0, 1]]),   # -[a+b, c]
    (1, [[1, 0, 0], [0, 1, 1]]),    # [a, b+c]
    (-1, [[1, 0, 0], [0, 1, 0]]),   # -[a, b]
])

D2_SYM = UniversalMap(2, 2, [
    (1, [[1, 0], [0, 1]]),    # [a, b]
    (-1, [[0, 1], [1, 0]]),   # -[b, a]
])


def induced_map_matrix(A: FinAbGroup, B: FinAbGroup, f, r) -> IntMatrix:
    """Matrix of Z[A^r] -> Z[B^r], [v] -> [f(v_1), ..., f(v_r)].

    ``f`` maps elements of A to elements of B (must be a homomorphism for
    the functoriality statements to hold; this is not checked here).
    """
    src = power_basis(A, r)
    tgt_index = {w: i for i, w in enumerate(power_basis(B, r))}
    entries = []
    for col, v in enumerate(src):
        w = tuple(f(x) for x in v)
        entries.append((tgt_index[w], col, 1))
    return IntMatrix(len(tgt_index), len(src), entries)


@dataclass(frozen=True)
class BdComplex:
    """The materialized partial resolution for one finite group."""

    group: FinAbGroup
    chain: ChainComplex            # degrees 0..2: Z[A] <- Z[A^2] <- Z[A^3]+Z[A^2]
    augmentation: IntMatrix        # lift of Z[A] -> A to Z^k (k = len(orders))

    def augment(self, vector):
        """Image in A of an integer vector in Z[A]."""
        A = self.group
        acc = A.zero
        for coeff, a in zip(vector, A.elements()):
            if coeff:
                acc = A.add(acc, A.scale(coeff, a))
        return acc


def bd_complex(A: FinAbGroup) -> BdComplex:
    """Build the explicit partial resolution of a finite abelian group."""
    d1 = D1.matrix_on(A)
    d2 = D2_ASSOC.matrix_on(A).hstack(D2_SYM.matrix_on(A))
    size = A.size
    ranks = {0: size, 1: size ** 2, 2: size ** 3 + size ** 2}
    chain = ChainComplex(0, 2, ranks, {1: d1, 2: d2},
                         labels={0: power_basis(A, 1),
                                 1: power_basis(A, 2)})
    k = len(A.orders)
    aug_entries = []
    for col, (a,) in enumerate(power_basis(A, 1)):
        for row, residue in enumerate(a):
            if residue:
                aug_entries.append((row, col, residue))
    augmentation = IntMatrix(k, size, aug_entries)
    return BdComplex(A, chain, augmentation)


def _augmentation_kernel_basis(bd: BdComplex) -> IntMatrix:
    """Columns spanning ker(Z[A] -> A) as a full-rank sublattice of Z^|A|."""
    A = bd.group
    size = A.size
    k = len(A.orders)
    if k == 0:
        return IntMatrix.identity(size)
    # x in ker iff L x = N y for some y, with N = diag(orders):
    # project ker([L | -N]) onto the x block.
    L = bd.augmentation
    N = IntMatrix.diagonal([-n for n in A.orders])
    K = kernel_basis(L.hstack(N))
    entries = [(r, c, v) for (r, c), v in K.items() if r < size]
    return IntMatrix(size, K.cols, entries)


@dataclass(frozen=True)
class ExactnessReport:
    group: FinAbGroup
    homology_at_za: FgAbGroup      # ker(aug)/im(d_1), expected 0
    homology_at_za2: FgAbGroup     # ker(d_1)/im(d_2), expected 0
    cokernel_of_d1: FgAbGroup      # Z[A]/im(d_1), expected isomorphic to A
    exact: bool

    def to_json(self):
        return {
            "orders": list(self.group.orders),
            "homology_at_ZA": self.homology_at_za.to_json(),
            "homology_at_ZA2": self.homology_at_za2.to_json(),
            "cokernel_of_d1": self.cokernel_of_d1.to_json(),
            "expected_group": self.group.canonical().to_json(),
            "exact": self.exact,
        }


def bd_exactness_check(A: FinAbGroup) -> ExactnessReport:
    """Brute-force exactness at the Z[A] and Z[A^2] spots.

    At Z[A^2]: H = ker(d_1)/im(d_2); since ker(d_1) is saturated, the free
    part is nullity(d_1) - rank(d_2) and the torsion comes from the invariant
    factors of d_2.  At Z[A]: the quotient ker(aug)/im(d_1), computed by
    rewriting the d_1 image in a kernel-lattice basis.
    """
    bd = bd_complex(A)
    d1 = bd.chain.differential(1)
    d2 = bd.chain.differential(2)

    nullity_d1 = d1.cols - matrix_rank(d1)
    inv_d2 = diagonal_invariants(d2)
    free = nullity_d1 - len(inv_d2)
    torsion = [d for d in inv_d2 if d > 1]
    h_za2 = FgAbGroup.from_orders([0] * free + torsion)

    K = _augmentation_kernel_basis(bd)
    solver = SNFSolver(K)
    coords = []
    for j in range(d1.cols):
        x = solver.solve(d1.column(j))
        if x is None:
            raise StructuralError("d_1 image escaped the augmentation kernel")
        coords.append(x)
    X = IntMatrix(K.cols, len(coords),
                  [(r, c, v) for c, col in enumerate(coords)
                   for r, v in enumerate(col) if v])
    inv_x = diagonal_invariants(X)
    h_za = FgAbGroup.from_orders(
        [0] * (K.cols - len(inv_x)) + [d for d in inv_x if d > 1])

    inv_d1 = diagonal_invariants(d1)
    coker = FgAbGroup.from_orders(
        [0] * (d1.rows - len(inv_d1)) + [d for d in inv_d1 if d > 1])

    exact = (h_za.is_trivial() and h_za2.is_trivial()
             and coker == A.canonical())
    return ExactnessReport(A, h_za, h_za2, coker, exact)


class HomotopyInfeasibleError(ValueError):
    """The integer homotopy system has no solution at this truncation."""


@dataclass(frozen=True)
class HomotopyCertificate:
    group: FinAbGroup
    n: int
    h0: IntMatrix   # Z[A] -> Z[A^2]
    h1: IntMatrix   # Z[A^2] -> Z[A^3] (+) Z[A^2]

    def verify(self):
        bd = bd_complex(self.group)
        d1 = bd.chain.differential(1)
        d2 = bd.chain.differential(2)
        t0 = _mult_vs_functorial(self.group, self.n, 1)
        t1 = _mult_vs_functorial(self.group, self.n, 2)
        if d1 @ self.h0 != t0:
            return False
        return d2 @ self.h1 == t1 - self.h0 @ d1

    def to_json(self):
        return {
            "orders": list(self.group.orders),
            "n": self.n,
            "h0": self.h0.to_json(),
            "h1": self.h1.to_json(),
        }


def _mult_vs_functorial(A: FinAbGroup, n, r) -> IntMatrix:
    """Matrix of n*id - [n] on Z[A^r] ([n] = map induced by a -> n a)."""
    basis = power_basis(A, r)
    index = {v: i for i, v in enumerate(basis)}
    entries = {}
    for col, v in enumerate(basis):
        entries[col, col] = entries.get((col, col), 0) + n
        w = tuple(A.scale(n, x) for x in v)
        key = (index[w], col)
        s = entries.get(key, 0) - 1
        if s:
            entries[key] = s
        else:
            del entries[key]
    return IntMatrix(len(basis), len(basis),
                     [(r_, c, v) for (r_, c), v in entries.items()])


_SOLVER_CACHE = {}


def _bd_solvers(A: FinAbGroup):
    # The Smith decompositions of d_1 and d_2 depend only on A; keep them
    # around so sweeps over many n values pay for them once.
    key = A.orders
    if key not in _SOLVER_CACHE:
        bd = bd_complex(A)
        d1 = bd.chain.differential(1)
        d2 = bd.chain.differential(2)
        _SOLVER_CACHE[key] = (d1, d2, SNFSolver(d1), SNFSolver(d2))
        if len(_SOLVER_CACHE) > 32:
            _SOLVER_CACHE.pop(next(iter(_SOLVER_CACHE)))
    return _SOLVER_CACHE[key]


def multiplication_homotopy(A: FinAbGroup, n: int) -> HomotopyCertificate:
    """Explicit integer homotopy between n*id and [n] on the resolution.

    Solves d_1 h_0 = n*id - [n] on Z[A], then
    d_2 h_1 = (n*id - [n]) - h_0 d_1 on Z[A^2], column by column through one
    Smith decomposition each.  Infeasibility would falsify the homotopy
    proposition at this truncation and raises HomotopyInfeasibleError.
    """
    d1, d2, solver1, solver2 = _bd_solvers(A)

    t0 = _mult_vs_functorial(A, n, 1)
    h0_cols = []
    for j in range(t0.cols):
        x = solver1.solve(t0.column(j))
        if x is None:
            raise HomotopyInfeasibleError(
                f"degree-0 homotopy system infeasible for A={A}, n={n}")
        h0_cols.append(x)
    h0 = IntMatrix(d1.cols, t0.cols,
                   [(r, c, v) for c, col in enumerate(h0_cols)
                    for r, v in enumerate(col) if v])

    t1 = _mult_vs_functorial(A, n, 2) - h0 @ d1
    h1_cols = []
    for j in range(t1.cols):
        x = solver2.solve(t1.column(j))
        if x is None:
            raise HomotopyInfeasibleError(
                f"degree-1 homotopy system infeasible for A={A}, n={n}")
        h1_cols.append(x)
    h1 = IntMatrix(d2.cols, t1.cols,
                   [(r, c, v) for c, col in enumerate(h1_cols)
                    for r, v in enumerate(col) if v])
    return HomotopyCertificate(A, n, h0, h1)


def abelian_groups_of_order_at_most(bound):
    """One FinAbGroup per isomorphism class, orders as prime-power products."""
    def partitions(n):
        if n == 0:
            yield ()
            return
        for first in range(n, 0, -1):
            for rest in partitions(n - first):
                if not rest or rest[0] <= first:
                    yield (first,) + rest

    def prime_factors(n):
        out = {}
        p = 2
        while p * p <= n:
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
            p += 1
        if n > 1:
            out[n] = out.get(n, 0) + 1
        return out

    groups = []
    for order in range(1, bound + 1):
        factorization = prime_factors(order)
        per_prime = []
        for p, e in sorted(factorization.items()):
            per_prime.append([tuple(p ** part for part in parts)
                              for parts in partitions(e)])
        if not per_prime:
            groups.append(FinAbGroup(()))
            continue
        for combo in itertools.product(*per_prime):
            orders = tuple(sorted(x for tup in combo for x in tup))
            groups.append(FinAbGroup(orders))
    return groups
