"""Constructive bases for continuous integer functions on cube subsets.

For a nonempty S inside a finite cube {0,1}^n, the functions S -> Z form a
free abelian group.  A basis is found greedily: order the products
e_{mu_1} *** e_{mu_r} of coordinate idempotents (mu_1 > ... > mu_r) and keep
each product whose evaluation vector on S is not an integer combination of
the evaluation vectors of previously kept products.

Ordering convention: decreasing index strings are compared lexicographically
with the natural coordinate order 0 < 1 < ... < n-1 and shorter-prefix-
smaller ties, which is exactly the numeric order of the bit masks
sum(2^mu_i); the empty product (the constant function 1) comes first.  The
unimodularity certificate makes the computation self-checking regardless of
the convention.

Span membership is integer-span membership (Hermite-style elimination over
Z), not rational span.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact_algebra import IntMatrix, Lattice, SNFSolver, StructuralError


@dataclass(frozen=True)
class CubeSubset:
    """A set of distinct 0/1 points in a fixed-dimension cube."""

    dimension: int
    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(int(x) for x in p) for p in self.points)
        if len(set(pts)) != len(pts):
            raise StructuralError("duplicate points")
        for p in pts:
            if len(p) != self.dimension:
                raise StructuralError("point dimension mismatch")
            if any(x not in (0, 1) for x in p):
                raise StructuralError("points must have 0/1 coordinates")
        object.__setattr__(self, "points", pts)

    @property
    def size(self):
        return len(self.points)

    def project(self, k):
        """Image in the first k coordinates."""
        return CubeSubset(k, tuple(sorted({p[:k] for p in self.points})))

    def to_json(self):
        return {"dimension": self.dimension, "points": [list(p) for p in self.points]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["dimension"], tuple(tuple(p) for p in obj["points"]))


@dataclass(frozen=True, order=True)
class IdempotentProduct:
    """e_{mu_1} *** e_{mu_r} with mu_1 > ... > mu_r; () is the constant 1."""

    mask: int  # bit mu set iff e_mu occurs; numeric order == product order

    def __post_init__(self):
        if self.mask < 0:
            raise StructuralError("negative mask")

    @classmethod
    def from_indices(cls, indices):
        indices = tuple(indices)
        if list(indices) != sorted(indices, reverse=True) or len(set(indices)) != len(indices):
            raise StructuralError("indices must be strictly decreasing")
        return cls(sum(1 << i for i in indices))

    @property
    def indices(self):
        out = []
        m = self.mask
        i = 0
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return tuple(reversed(out))

    @property
    def top_index(self):
        return self.mask.bit_length() - 1 if self.mask else None

    def evaluate(self, point):
        out = 1
        for i in self.indices:
            out *= point[i]
            if not out:
                return 0
        return out

    def __str__(self):
        if not self.mask:
            return "1"
        return "".join(f"e{i}" for i in self.indices)


def evaluation_vector(product: IdempotentProduct, S: CubeSubset):
    return [product.evaluate(p) for p in S.points]


def noebeling_basis(S: CubeSubset):
    """Lexicographically minimal idempotent products forming a basis on S.

    Products are scanned in increasing order; one is kept iff its evaluation
    vector lies outside the integer span of the previously kept vectors.
    """
    if S.size == 0:
        raise StructuralError("empty point set has no basis")
    span = Lattice(S.size)
    kept = []
    for mask in range(1 << S.dimension):
        product = IdempotentProduct(mask)
        vec = evaluation_vector(product, S)
        if vec not in span:
            span.add(vec)
            kept.append(product)
            if len(kept) == S.size:
                break
    return kept


@dataclass(frozen=True)
class BasisCertificate:
    evaluation_matrix: IntMatrix   # rows: points of S, cols: products of E
    determinant: int | None
    ok: bool
    witness: str | None = None

    def to_json(self):
        return {
            "matrix": self.evaluation_matrix.to_json(),
            "determinant": self.determinant,
            "ok": self.ok,
            "witness": self.witness,
        }


def basis_certificate(S: CubeSubset, E) -> BasisCertificate:
    """Unimodularity certificate: the evaluation matrix has determinant +-1."""
    M = IntMatrix(S.size, len(E),
                  [(r, c, v)
                   for c, prod in enumerate(E)
                   for r, v in enumerate(evaluation_vector(prod, S)) if v])
    if M.rows != M.cols:
        return BasisCertificate(M, None, False,
                                witness=f"non-square: {M.rows} points vs {M.cols} products")
    det = M.determinant()
    if det in (1, -1):
        return BasisCertificate(M, det, True)
    return BasisCertificate(M, det, False, witness=f"determinant {det} is not a unit")


def express_function(S: CubeSubset, E, values):
    """Integer coordinates of an arbitrary f: S -> Z in the basis E.

    Solves the (unimodular) evaluation system exactly; raises if E is not a
    basis for S.
    """
    M = IntMatrix(S.size, len(E),
                  [(r, c, v)
                   for c, prod in enumerate(E)
                   for r, v in enumerate(evaluation_vector(prod, S)) if v])
    coords = SNFSolver(M).solve(list(values))
    if coords is None:
        raise StructuralError("E does not span the functions on S over Z")
    return coords


def tower_extend(tower):
    """Bases for a projection tower of cube subsets, nested along pullback.

    ``tower`` lists cube subsets of strictly increasing dimension such that
    each stage is the coordinate-projection image of the next.  Returns one
    basis per stage; stage k's basis is exactly the sub-list of stage k+1's
    basis using no coordinate beyond stage k's dimension (the successor step
    of the construction), which is verified, not assumed.
    """
    if not tower:
        return []
    for earlier, later in zip(tower, tower[1:]):
        if earlier.dimension >= later.dimension:
            raise StructuralError("tower dimensions must strictly increase")
        if later.project(earlier.dimension).points != tuple(sorted(earlier.points)):
            raise StructuralError(
                f"stage of dimension {earlier.dimension} is not the projection "
                f"image of the next stage")
    bases = [noebeling_basis(S) for S in tower]
    for k in range(len(tower) - 1):
        dim = tower[k].dimension
        restricted = [p for p in bases[k + 1] if p.mask < (1 << dim)]
        if restricted != bases[k]:
            raise StructuralError(
                f"successor step failed: stage-{dim} basis is not the "
                f"low-coordinate part of the next basis")
    return bases


class ProfiniteTower:
    """A profinite set presented as finite stages with surjective transitions.

    ``transitions[k]`` maps stage k+1 onto stage k (a list of target indices,
    one per element of stage k+1).  Stage sizes are implicit.
    """

    def __init__(self, first_size, transitions=()):
        if first_size < 0:
            raise StructuralError("negative stage size")
        self.first_size = first_size
        self.transitions = tuple(tuple(int(x) for x in t) for t in transitions)
        size = first_size
        for k, t in enumerate(self.transitions):
            if any(not (0 <= x < size) for x in t):
                raise StructuralError(f"transition {k} maps outside stage {k}")
            if set(t) != set(range(size)) and size > 0:
                raise StructuralError(f"transition {k} is not surjective")
            size = len(t)

    @property
    def stage_sizes(self):
        sizes = [self.first_size]
        for t in self.transitions:
            sizes.append(len(t))
        return sizes

    @property
    def stages(self):
        return len(self.transitions) + 1

    def eventually_constant(self):
        """True if the final transition is a bijection (tower has stabilized)."""
        if not self.transitions:
            return True
        last = self.transitions[-1]
        prev_size = self.stage_sizes[-2]
        return len(last) == prev_size and len(set(last)) == prev_size

    @classmethod
    def constant(cls, size, stages=2):
        return cls(size, tuple(tuple(range(size)) for _ in range(stages - 1)))

    @classmethod
    def cantor(cls, depth):
        """Stages {0,1}^k for k = 0..depth with coordinate-forgetting maps."""
        transitions = []
        for k in range(depth):
            transitions.append(tuple(i >> 1 for i in range(2 ** (k + 1))))
        return cls(1, tuple(transitions))

    def to_json(self):
        return {"first_size": self.first_size,
                "transitions": [list(t) for t in self.transitions]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["first_size"], tuple(tuple(t) for t in obj["transitions"]))
