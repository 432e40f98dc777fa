"""Cech complexes of finite covers and hypercovers, and finite torus models.

A FiniteHypercover is an augmented semisimplicial finite set S_* -> S,
optionally split.  Splitting data is a system of maps eta_n: S_{n-1} -> S_n
(with eta_0: S -> S_0) satisfying d_0 eta = id and d_{i+1} eta = eta d_i;
pulling cochains back along eta is the Dold-Kan contracting homotopy, and
since it is a pullback its sup-norm is at most 1.  That is the quantitative
content checked by split_homotopy_norm.

Torus cohomology uses a finite simplicial-complex model: each circle factor
is the triangle boundary (3 vertices, 3 edges), and products are triangulated
by chains in the coordinatewise partial order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
import random

from .exact_algebra import (
    ChainComplex,
    FgAbGroup,
    IntMatrix,
    StructuralError,
    cochain_complex,
)
from .noebeling import ProfiniteTower


class FiniteHypercover:
    """Augmented semisimplicial finite sets with optional splitting.

    levels[n] is the size of S_n; faces[n][i] (0 <= i <= n) tabulates
    d_i: S_n -> S_{n-1}; augmentation tabulates S_0 -> S.  All identities
    are checked exhaustively at construction (the sets are finite).
    """

    def __init__(self, base_size, levels, faces, augmentation, splitting=None):
        self.base_size = base_size
        self.levels = list(levels)
        # faces may start with a None placeholder for level 0 or begin at level 1
        if len(faces) == len(self.levels) and (not faces or faces[0] is None):
            tail = faces[1:]
        elif len(faces) == len(self.levels) - 1:
            tail = faces
        else:
            raise StructuralError("face data does not match level count")
        self.faces = [None] + [[list(m) for m in fs] for fs in tail]
        self.augmentation = list(augmentation)
        self.splitting = [list(m) for m in splitting] if splitting is not None else None
        self._validate()

    @property
    def depth(self):
        return len(self.levels) - 1

    def face(self, n, i):
        return self.faces[n][i]

    def _validate(self):
        if len(self.augmentation) != self.levels[0]:
            raise StructuralError("augmentation size mismatch")
        if self.base_size and set(self.augmentation) != set(range(self.base_size)):
            raise StructuralError("augmentation is not surjective")
        for n in range(1, self.depth + 1):
            fs = self.faces[n]
            if len(fs) != n + 1:
                raise StructuralError(f"level {n} needs {n + 1} face maps")
            for m in fs:
                if len(m) != self.levels[n]:
                    raise StructuralError(f"face map size mismatch at level {n}")
                if any(not (0 <= x < self.levels[n - 1]) for x in m):
                    raise StructuralError(f"face map range error at level {n}")
        # augmentation identity a d_0 = a d_1
        if self.depth >= 1:
            a = self.augmentation
            d0, d1 = self.faces[1][0], self.faces[1][1]
            for x in range(self.levels[1]):
                if a[d0[x]] != a[d1[x]]:
                    raise StructuralError("augmentation identity fails on S_1")
        # semisimplicial identities d_i d_j = d_{j-1} d_i for i < j
        for n in range(2, self.depth + 1):
            for j in range(n + 1):
                for i in range(j):
                    di_low = self.faces[n - 1][i]
                    dj_high = self.faces[n][j]
                    dj_low = self.faces[n - 1][j - 1]
                    di_high = self.faces[n][i]
                    for x in range(self.levels[n]):
                        if di_low[dj_high[x]] != dj_low[di_high[x]]:
                            raise StructuralError(
                                f"simplicial identity d_{i} d_{j} fails at level {n}")
        # level-1 hypercover condition: S_1 covers S_0 x_S S_0
        if self.depth >= 1:
            pairs = {(self.faces[1][0][x], self.faces[1][1][x])
                     for x in range(self.levels[1])}
            for y in range(self.levels[0]):
                for z in range(self.levels[0]):
                    if self.augmentation[y] == self.augmentation[z] and (y, z) not in pairs:
                        raise StructuralError("S_1 does not cover the fibered square")
        if self.splitting is not None:
            self._validate_splitting()

    def _validate_splitting(self):
        eta = self.splitting
        if len(eta) != self.depth + 1:
            raise StructuralError("splitting needs one map per level")
        if len(eta[0]) != self.base_size:
            raise StructuralError("splitting eta_0 has wrong source")
        for s in range(self.base_size):
            if self.augmentation[eta[0][s]] != s:
                raise StructuralError("aug o eta_0 != id")
        for n in range(1, self.depth + 1):
            if len(eta[n]) != self.levels[n - 1]:
                raise StructuralError(f"splitting eta_{n} has wrong source")
            d0 = self.faces[n][0]
            for x in range(self.levels[n - 1]):
                if d0[eta[n][x]] != x:
                    raise StructuralError(f"d_0 eta_{n} != id")
            for i in range(n):
                lhs = self.faces[n][i + 1]
                for x in range(self.levels[n - 1]):
                    if n - 1 >= 1:
                        rhs = eta[n - 1][self.faces[n - 1][i][x]]
                    else:
                        rhs = eta[0][self.augmentation[x]]
                    if lhs[eta[n][x]] != rhs:
                        raise StructuralError(f"d_{i+1} eta_{n} != eta d_{i}")

    @classmethod
    def cech_nerve(cls, cover_map, depth, section=None):
        """Nerve of a surjection S' -> S through level ``depth``.

        ``cover_map[x]`` is the image of x; level n holds the (n+1)-tuples
        with a common image.  ``section`` (image point -> chosen preimage)
        supplies the splitting; pass section="first" to take least preimages.
        """
        size = len(cover_map)
        if size == 0:
            raise StructuralError("empty cover")
        base = max(cover_map) + 1
        if set(cover_map) != set(range(base)):
            raise StructuralError("cover map is not surjective onto its range")
        fibers = {}
        for x, s in enumerate(cover_map):
            fibers.setdefault(s, []).append(x)
        levels = []
        index = []
        tuples_by_level = []
        for n in range(depth + 1):
            tuples_n = []
            for s in range(base):
                tuples_n.extend(itertools.product(fibers[s], repeat=n + 1))
            tuples_n.sort()
            tuples_by_level.append(tuples_n)
            index.append({t: i for i, t in enumerate(tuples_n)})
            levels.append(len(tuples_n))
        faces = [None]
        for n in range(1, depth + 1):
            maps = []
            for i in range(n + 1):
                drop = [index[n - 1][t[:i] + t[i + 1:]] for t in tuples_by_level[n]]
                maps.append(drop)
            faces.append(maps)
        augmentation = [cover_map[t[0]] for t in tuples_by_level[0]]
        splitting = None
        if section is not None:
            if section == "first":
                section = [min(fibers[s]) for s in range(base)]
            if len(section) != base or any(cover_map[section[s]] != s for s in range(base)):
                raise StructuralError("section does not split the cover map")
            eta = [list(section)]
            for n in range(1, depth + 1):
                eta.append([
                    index[n][(section[cover_map[t[0]]],) + t]
                    for t in tuples_by_level[n - 1]
                ])
            splitting = eta
        return cls(base, levels, faces, augmentation, splitting=splitting)

    @classmethod
    def point_cover(cls, depth):
        return cls.cech_nerve([0], depth, section="first")

    def coboundary(self, n):
        """Matrix of delta_n: C(S_{n-1}) -> C(S_n), alternating face pullbacks."""
        entries = {}
        for i in range(n + 1):
            sign = 1 if i % 2 == 0 else -1
            for x, y in enumerate(self.faces[n][i]):
                key = (x, y)
                s = entries.get(key, 0) + sign
                if s:
                    entries[key] = s
                else:
                    del entries[key]
        return IntMatrix(self.levels[n], self.levels[n - 1],
                         [(r, c, v) for (r, c), v in entries.items()])

    def augmentation_pullback(self):
        return IntMatrix(self.levels[0], self.base_size,
                         [(x, s, 1) for x, s in enumerate(self.augmentation)])


def cech_complex(H: FiniteHypercover) -> ChainComplex:
    """Cochain complex 0 -> Gamma(S_0, Z) -> Gamma(S_1, Z) -> ...

    Stored in homological degrees <= 0 (H^i is homology(-i)); the augmentation
    term is not included, so H^0 recovers Gamma(S, Z) exactly when the cover
    satisfies the sheaf condition.
    """
    return cochain_complex([H.coboundary(n) for n in range(1, H.depth + 1)],
                           ranks=H.levels)


@dataclass(frozen=True)
class NormedCochain:
    level: int
    values: tuple

    @property
    def norm(self):
        return max((abs(v) for v in self.values), default=0)


def contracting_homotopy(H: FiniteHypercover, f: NormedCochain) -> NormedCochain:
    """h(f) = f o eta, the splitting-induced contraction; norm ratio <= 1."""
    if H.splitting is None:
        raise StructuralError("hypercover carries no splitting data")
    n = f.level
    eta = H.splitting[n]
    return NormedCochain(n - 1, tuple(f.values[eta[x]] for x in range(len(eta))))


@dataclass(frozen=True)
class HomotopyNormReport:
    trials: int
    max_ratio: Fraction
    ratios: tuple

    def to_json(self):
        return {
            "trials": self.trials,
            "max_ratio": str(self.max_ratio),
            "bound_holds": self.max_ratio <= 1,
        }


def split_homotopy_norm(H: FiniteHypercover, trials, seed, max_degree=None) -> HomotopyNormReport:
    """Random-cocycle verification that d(h(f)) = f with ||h(f)|| <= ||f||.

    Cocycles in positive degree i are sampled as coboundaries of random
    integer cochains (entries uniform in [-100, 100]); on a split hypercover
    those are all the cocycles.  A violation of d(h(f)) = f is a hard error.
    """
    if H.splitting is None:
        raise StructuralError("hypercover carries no splitting data")
    if H.depth < 2:
        raise StructuralError("need at least two levels above the base")
    top = max_degree if max_degree is not None else H.depth - 1
    top = min(top, H.depth - 1)
    rng = random.Random(seed)
    ratios = []
    for _ in range(trials):
        i = rng.randrange(1, top + 1)
        g = [rng.randint(-100, 100) for _ in range(H.levels[i - 1])]
        delta_i = H.coboundary(i)
        f = NormedCochain(i, tuple(delta_i.apply(g)))
        hf = contracting_homotopy(H, f)
        if tuple(delta_i.apply(list(hf.values))) != f.values:
            raise StructuralError(
                f"homotopy failed to contract a degree-{i} cocycle")
        ratio = Fraction(0) if f.norm == 0 else Fraction(hf.norm, f.norm)
        ratios.append(ratio)
    return HomotopyNormReport(trials, max(ratios, default=Fraction(0)), tuple(ratios))


# ---------------------------------------------------------------------------
# profinite towers of surjections

@dataclass(frozen=True)
class StageReport:
    stage: int
    h0_rank: int
    positive_degrees: tuple          # H^1..H^max as FgAbGroup
    exact: bool

    def to_json(self):
        return {
            "stage": self.stage,
            "h0_rank": self.h0_rank,
            "positive": [g.to_json() for g in self.positive_degrees],
            "exact": self.exact,
        }


def profinite_stage_acyclicity(base: ProfiniteTower, cover: ProfiniteTower,
                               stage_maps, max_degree=2):
    """Per-stage exactness for a compatible tower of surjections S'_j -> S_j.

    ``stage_maps[j]`` maps elements of cover stage j onto base stage j; the
    squares against both towers' transitions must commute.  At every finite
    stage the Cech complex of the surjection is exact in positive degrees
    (through ``max_degree``), with H^0 free of rank |S_j|.
    """
    if base.stages != cover.stages:
        raise StructuralError("towers have different lengths")
    sizes_b = base.stage_sizes
    sizes_c = cover.stage_sizes
    if len(stage_maps) != base.stages:
        raise StructuralError("need one stage map per stage")
    for j, m in enumerate(stage_maps):
        if len(m) != sizes_c[j]:
            raise StructuralError(f"stage map {j} has wrong source size")
        if set(m) != set(range(sizes_b[j])):
            raise StructuralError(f"stage map {j} is not surjective")
    for j in range(base.stages - 1):
        tb = base.transitions[j]
        tc = cover.transitions[j]
        for x in range(sizes_c[j + 1]):
            if tb[stage_maps[j + 1][x]] != stage_maps[j][tc[x]]:
                raise StructuralError(f"tower squares do not commute at stage {j}")
    reports = []
    all_exact = True
    for j, m in enumerate(stage_maps):
        nerve = FiniteHypercover.cech_nerve(list(m), max_degree + 1, section="first")
        cx = cech_complex(nerve)
        positive = tuple(cx.homology(-i) for i in range(1, max_degree + 1))
        h0 = cx.homology(0)
        exact = all(g.is_trivial() for g in positive) and h0 == FgAbGroup(sizes_b[j])
        all_exact = all_exact and exact
        reports.append(StageReport(j, h0.rank, positive, exact))
    return reports, all_exact


# ---------------------------------------------------------------------------
# torus cohomology via the triangle-boundary product model

_CIRCLE_FACES = [frozenset({0}), frozenset({1}), frozenset({2}),
                 frozenset({0, 1}), frozenset({1, 2}), frozenset({0, 2})]


def _torus_simplices(factors):
    """All simplices of the product triangulation of (triangle boundary)^k.

    A simplex is a chain in the coordinatewise partial order whose projection
    to every coordinate is a vertex or an edge of the triangle boundary.
    """
    if factors == 0:
        return {0: [((),)]}
    simplices = set()
    for cell in itertools.product(_CIRCLE_FACES, repeat=factors):
        verts = sorted(itertools.product(*[sorted(f) for f in cell]))
        # chains in the product order within this cell
        stack = [(v,) for v in verts]
        while stack:
            chain = stack.pop()
            simplices.add(chain)
            last = chain[-1]
            for v in verts:
                if v > last and all(a <= b for a, b in zip(last, v)):
                    stack.append(chain + (v,))
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    for d in by_dim:
        by_dim[d].sort()
    return by_dim


_TORUS_CACHE = {}


def torus_complex(factors) -> ChainComplex:
    """Simplicial chain complex of the product-of-circles model."""
    if factors in _TORUS_CACHE:
        return _TORUS_CACHE[factors]
    by_dim = _torus_simplices(factors)
    top = max(by_dim)
    index = {d: {s: i for i, s in enumerate(by_dim[d])} for d in by_dim}
    ranks = {d: len(by_dim[d]) for d in range(top + 1)}
    diffs = {}
    for d in range(1, top + 1):
        entries = []
        for col, s in enumerate(by_dim[d]):
            for i in range(d + 1):
                face = s[:i] + s[i + 1:]
                entries.append((index[d - 1][face], col, 1 if i % 2 == 0 else -1))
        diffs[d] = IntMatrix(ranks[d - 1], ranks[d], entries)
    cx = ChainComplex(0, top, ranks, diffs, labels=by_dim)
    _TORUS_CACHE[factors] = cx
    return cx


def torus_cohomology(factors, degree, factor_bound=3) -> FgAbGroup:
    """H^degree of the |J|-torus with integer coefficients.

    Computed from the finite simplicial model; the contract is that the
    answer is free of rank C(|J|, degree) (wedge powers of H^1).
    """
    if factors < 0 or factors > factor_bound:
        raise StructuralError(f"factor count {factors} beyond bound {factor_bound}")
    if degree < 0:
        return FgAbGroup.trivial()
    cx = torus_complex(factors)
    dual = cx.dualize()
    if degree > cx.hi:
        return FgAbGroup.trivial()
    return dual.homology(-degree)
