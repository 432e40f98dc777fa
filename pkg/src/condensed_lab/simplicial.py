"""Bar constructions and Eilenberg-MacLane homology.

The n-fold bar construction of an abelian group P is the n-fold simplicial
abelian group whose (i_1, ..., i_n) level is P^(i_1 * ... * i_n), realized
here as shaped integer arrays.  Faces along axis j drop or merge adjacent
slices; degeneracies insert zero slices.  The associated total chain complex
computes the homology of the Eilenberg-MacLane space K(P, n).

Conventions baked in here:

* Total differential: direction j contributes its alternating face sum with
  the extra sign (-1)^(i_1 + ... + i_{j-1}).
* ``reduced=True`` (default) uses reduced coefficient modules: the all-zero
  array of each level is dropped.  This makes every chain group in degrees
  < n vanish.  ``reduced=False`` keeps them (so degree i of the single bar
  of P has rank |P|^i).
* For lattices the bar construction is infinite rank per degree; a window
  bound m materializes the sub-simplicial set generated by all arrays with
  entries in [-m, m] through the degree cap, and homology is trusted only
  after results at windows m and m+1 agree.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .exact_algebra import (
    ChainComplex,
    FgAbGroup,
    FinAbGroup,
    IntMatrix,
    StructuralError,
)


class WindowUnderflowError(ValueError):
    """The configured entry bound cannot close the bar sub-simplicial set."""


DEFAULT_DEGREE_CAP_MARGIN = 2  # configured cap defaults to n + 2


class LatticeGroup:
    """The lattice Z^k as a coefficient group for windowed bar complexes."""

    __slots__ = ("dim",)

    def __init__(self, dim=1):
        if dim < 1:
            raise StructuralError("lattice rank must be >= 1")
        self.dim = dim

    @property
    def zero(self):
        return (0,) * self.dim

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def window_elements(self, m):
        return [tuple(t) for t in
                itertools.product(range(-m, m + 1), repeat=self.dim)]

    def __eq__(self, other):
        return isinstance(other, LatticeGroup) and self.dim == other.dim

    def __hash__(self):
        return hash(("LatticeGroup", self.dim))

    def __repr__(self):
        return f"LatticeGroup({self.dim})"


# ---------------------------------------------------------------------------
# shaped arrays over a coefficient group
#
# A bar simplex of multidegree (i_1, ..., i_n) is a flat tuple of group
# elements in row-major order for the shape (i_1, ..., i_n).

def _strides(shape):
    out = [1] * len(shape)
    for j in range(len(shape) - 2, -1, -1):
        out[j] = out[j + 1] * shape[j + 1]
    return out


def axis_slices(flat, shape, axis):
    """Split a row-major flat array into its slices along one axis."""
    size = shape[axis]
    if size == 0:
        return []
    if not flat:  # some other axis is empty: all slices are empty arrays
        return [()] * size
    strides = _strides(shape)
    step = strides[axis]
    block = step * size  # length of one full cycle along this axis
    slices = []
    for l in range(size):
        piece = []
        start = l * step
        for base in range(0, len(flat), block):
            piece.extend(flat[base + start: base + start + step])
        slices.append(tuple(piece))
    return slices


def from_axis_slices(slices, shape, axis):
    """Inverse of axis_slices for a shape whose ``axis`` size is len(slices)."""
    new_shape = list(shape)
    new_shape[axis] = len(slices)
    strides = _strides(new_shape)
    step = strides[axis]
    total = 1
    for s in new_shape:
        total *= s
    if total == 0:
        return ()
    out = [None] * total
    block = step * len(slices)
    for l, piece in enumerate(slices):
        start = l * step
        idx = 0
        for base in range(0, total, block):
            out[base + start: base + start + step] = piece[idx: idx + step]
            idx += step
    return tuple(out)


def _add_slices(group, s1, s2):
    return tuple(group.add(a, b) for a, b in zip(s1, s2))


def bar_face(group, flat, shape, axis, k):
    """Face d_k along ``axis``: drop an end slice or merge adjacent slices."""
    size = shape[axis]
    slices = axis_slices(flat, shape, axis)
    if k == 0:
        new_slices = slices[1:]
    elif k == size:
        new_slices = slices[:-1]
    elif 0 < k < size:
        new_slices = (slices[:k - 1]
                      + [_add_slices(group, slices[k - 1], slices[k])]
                      + slices[k + 1:])
    else:
        raise StructuralError(f"face index {k} out of range for size {size}")
    new_shape = tuple(s if j != axis else size - 1 for j, s in enumerate(shape))
    return from_axis_slices(new_slices, shape, axis), new_shape


def bar_degeneracy(group, flat, shape, axis, l):
    """Degeneracy s_l along ``axis``: insert a zero slice at position l."""
    size = shape[axis]
    if not (0 <= l <= size):
        raise StructuralError(f"degeneracy index {l} out of range for size {size}")
    slices = axis_slices(flat, shape, axis)
    volume = len(flat) // size if size else None
    if volume is None:
        # inserting into an empty axis: the slice volume comes from the shape
        volume = 1
        for j, s in enumerate(shape):
            if j != axis:
                volume *= s
    zero_slice = (group.zero,) * volume
    new_slices = slices[:l] + [zero_slice] + slices[l:]
    return from_axis_slices(new_slices, shape, axis), \
        tuple(s if j != axis else size + 1 for j, s in enumerate(shape))


def is_degenerate(group, flat, shape):
    """True iff some slice along some axis is entirely zero."""
    zero = group.zero
    for axis, size in enumerate(shape):
        if size == 0:
            continue
        for piece in axis_slices(flat, shape, axis):
            if all(x == zero for x in piece):
                return True
    return False


def is_zero_array(group, flat):
    zero = group.zero
    return all(x == zero for x in flat)


# ---------------------------------------------------------------------------
# the total complex

def _multidegrees(n, total):
    """All (i_1..i_n) with nonnegative parts summing to ``total``."""
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _multidegrees(n - 1, total - first):
            yield (first,) + rest


def _direction_sign(shape, axis):
    return -1 if sum(shape[:axis]) % 2 else 1


def _differential_terms(group, flat, shape):
    """All (face_flat, face_shape, coefficient) terms of d on one simplex."""
    terms = []
    for axis, size in enumerate(shape):
        if size == 0:
            continue
        dsign = _direction_sign(shape, axis)
        for k in range(size + 1):
            face, fshape = bar_face(group, flat, shape, axis, k)
            coeff = dsign * (1 if k % 2 == 0 else -1)
            terms.append((face, fshape, coeff))
    return terms


def _finite_level_basis(P: FinAbGroup, shape, reduced):
    volume = 1
    for s in shape:
        volume *= s
    elements = P.elements()
    basis = sorted(itertools.product(elements, repeat=volume))
    if reduced:
        zero_flat = (P.zero,) * volume
        basis = [b for b in basis if b != zero_flat]
    return basis


def bar_complex(P, n, degree_cap, window=None, max_entry=None, reduced=True):
    """Chain complex of Z[B^n P] through degree ``degree_cap + 1``.

    ``P`` is a FinAbGroup or a LatticeGroup; in the lattice case ``window``
    bounds seed entries and the generated sub-simplicial set is materialized
    (entries of iterated faces stay below (degree_cap + 2) * window; a
    stricter ``max_entry`` raises WindowUnderflowError if faces escape it).

    Basis labels are (multidegree, flat array); the ``degenerate`` metadata
    marks simplices with a zero slice, ready for normalized_chains.
    """
    if n < 1:
        raise StructuralError("bar iteration count must be >= 1")
    if degree_cap < 0:
        raise StructuralError("degree cap must be >= 0")
    hi = degree_cap + 1

    if isinstance(P, FinAbGroup):
        group = P
        basis_by_level = {}
        for total in range(hi + 1):
            for shape in _multidegrees(n, total):
                basis_by_level[shape] = _finite_level_basis(P, shape, reduced)
    elif isinstance(P, LatticeGroup):
        if window is None:
            raise StructuralError("lattice bar complexes require a window bound")
        group = P
        bound = max_entry if max_entry is not None else (hi + 1) * window
        basis_by_level = _windowed_levels(P, n, hi, window, bound, reduced)
    else:
        raise StructuralError(f"unsupported coefficient group {P!r}")

    # assemble per total degree, deterministically ordered
    labels = {}
    index = {}
    ranks = {}
    for i in range(hi + 1):
        lab = []
        for shape in sorted(_multidegrees(n, i)):
            for flat in basis_by_level.get(shape, ()):
                index[shape, flat] = (i, len(lab))
                lab.append((shape, flat))
        labels[i] = lab
        ranks[i] = len(lab)

    diffs = {}
    for i in range(1, hi + 1):
        entries = {}
        for col, (shape, flat) in enumerate(labels[i]):
            for face, fshape, coeff in _differential_terms(group, flat, shape):
                key = index.get((fshape, face))
                if key is None:
                    if reduced and is_zero_array(group, face):
                        continue  # reduced convention: [0] is truncated away
                    raise WindowUnderflowError(
                        f"face of a materialized simplex escaped the window at "
                        f"multidegree {fshape}")
                _, row = key
                cell = (row, col)
                s = entries.get(cell, 0) + coeff
                if s:
                    entries[cell] = s
                else:
                    del entries[cell]
        diffs[i] = IntMatrix(ranks[i - 1], ranks[i],
                             [(r, c, v) for (r, c), v in entries.items()])

    degenerate = {
        i: frozenset(j for j, (shape, flat) in enumerate(labels[i])
                     if is_degenerate(group, flat, shape))
        for i in range(hi + 1)
    }
    return ChainComplex(0, hi, ranks, diffs, labels=labels, degenerate=degenerate)


def _windowed_levels(P: LatticeGroup, n, hi, window, bound, reduced):
    """Materialize the face-closure of the window seeds through degree hi."""
    seeds = P.window_elements(window)
    levels = {}
    queue = deque()

    def register(shape, flat):
        bucket = levels.setdefault(shape, set())
        if flat not in bucket:
            bucket.add(flat)
            queue.append((shape, flat))

    for total in range(hi + 1):
        for shape in _multidegrees(n, total):
            volume = 1
            for s in shape:
                volume *= s
            for flat in itertools.product(seeds, repeat=volume):
                register(shape, flat)

    while queue:
        shape, flat = queue.popleft()
        for face, fshape, _ in _differential_terms(P, flat, shape):
            if reduced and is_zero_array(P, face):
                continue
            if any(abs(x) > bound for coord in face for x in coord):
                raise WindowUnderflowError(
                    f"window {window} cannot close under faces within entry "
                    f"bound {bound}")
            register(fshape, face)

    out = {}
    for shape, bucket in levels.items():
        basis = sorted(bucket)
        if reduced:
            basis = [b for b in basis if not is_zero_array(P, b)]
        out[shape] = basis
    return out


def normalized_chains(C: ChainComplex) -> ChainComplex:
    """Quotient by degenerate simplices.

    Requires the ``degenerate`` tagging produced by bar_complex.  The
    degenerate simplices span a subcomplex with vanishing homology, so the
    quotient (basis: nondegenerate simplices; differential: the original one
    with degenerate targets dropped) has the same homology in every degree.
    """
    if C.degenerate is None:
        raise StructuralError("complex carries no degeneracy tags")
    keep = {}
    ranks = {}
    labels = {}
    for i in range(C.lo, C.hi + 1):
        dead = C.degenerate.get(i, frozenset())
        kept = [j for j in range(C.rank(i)) if j not in dead]
        keep[i] = {j: pos for pos, j in enumerate(kept)}
        ranks[i] = len(kept)
        if C.labels:
            lab = C.labels.get(i)
            labels[i] = [lab[j] for j in kept] if lab else None
    diffs = {}
    for i in range(C.lo + 1, C.hi + 1):
        M = C.differential(i)
        entries = [(keep[i - 1][r], keep[i][c], v) for (r, c), v in M.items()
                   if r in keep[i - 1] and c in keep[i]]
        diffs[i] = IntMatrix(ranks[i - 1], ranks[i], entries)
    return ChainComplex(C.lo, C.hi, ranks, diffs,
                        labels=labels if C.labels else None)


# ---------------------------------------------------------------------------
# Eilenberg-MacLane homology

@dataclass(frozen=True)
class EmResult:
    group: FgAbGroup
    stable: bool
    window: int | None = None

    def to_json(self):
        out = dict(self.group.to_json())
        out["stable"] = self.stable
        if self.window is not None:
            out["window"] = self.window
        return out


def em_homology(P, n, i, window=None, degree_cap=None, max_auto_window=3):
    """H_i of K(P, n) in canonical form.

    Finite P: exact, always stable.  Lattice P: computed on the windowed
    sub-simplicial set; the result is accepted only when windows m and m+1
    agree, otherwise it is returned flagged unstable (never silently).
    """
    cap = degree_cap if degree_cap is not None else n + DEFAULT_DEGREE_CAP_MARGIN
    if i < 0 or i > cap:
        raise StructuralError(f"degree {i} beyond configured cap {cap}")

    if isinstance(P, FinAbGroup):
        cx = normalized_chains(bar_complex(P, n, i, reduced=False))
        return EmResult(cx.homology(i), stable=True)

    if not isinstance(P, LatticeGroup):
        raise StructuralError(f"unsupported coefficient group {P!r}")

    def value_at(m):
        cx = normalized_chains(bar_complex(P, n, i, window=m, reduced=False))
        return cx.homology(i)

    if window is not None:
        a = value_at(window)
        b = value_at(window + 1)
        return EmResult(b if a != b else a, stable=(a == b), window=window)

    prev = value_at(1)
    m = 1
    while m < max_auto_window + 1:
        nxt = value_at(m + 1)
        if nxt == prev:
            return EmResult(prev, stable=True, window=m)
        prev = nxt
        m += 1
    return EmResult(prev, stable=False, window=m)


# ---------------------------------------------------------------------------
# simplicial identity checks (exhaustive on small instances)

def check_bar_simplicial_identities(P, n, through_degree, window=None):
    """Exhaustively verify the simplicial identities on stored simplices.

    Checks, per axis: d_a d_b = d_{b-1} d_a (a < b), s_a s_b = s_{b+1} s_a
    (a <= b), and the mixed face/degeneracy relations.  Returns the number
    of simplices checked; raises StructuralError on any violation.
    """
    if isinstance(P, FinAbGroup):
        pool = {}
        for total in range(through_degree + 1):
            for shape in _multidegrees(n, total):
                pool[shape] = _finite_level_basis(P, shape, reduced=False)
        group = P
    else:
        bound = (through_degree + 2) * (window or 1)
        pool = _windowed_levels(P, n, through_degree, window or 1, bound,
                                reduced=False)
        group = P

    def faces_equal(x, shape, ops1, ops2):
        y1, s1 = x, shape
        for kind, axis, idx in ops1:
            y1, s1 = (bar_face if kind == "d" else bar_degeneracy)(group, y1, s1, axis, idx)
        y2, s2 = x, shape
        for kind, axis, idx in ops2:
            y2, s2 = (bar_face if kind == "d" else bar_degeneracy)(group, y2, s2, axis, idx)
        return y1 == y2 and s1 == s2

    checked = 0
    for shape, basis in pool.items():
        for axis, size in enumerate(shape):
            if size == 0:
                continue
            for x in basis:
                checked += 1
                for b in range(size + 1):
                    for a in range(b):
                        if not faces_equal(x, shape,
                                           [("d", axis, b), ("d", axis, a)],
                                           [("d", axis, a), ("d", axis, b - 1)]):
                            raise StructuralError(
                                f"d_{a} d_{b} failed at {shape} axis {axis}")
                for l in range(size + 1):
                    for k in range(size + 2):
                        lhs = [("s", axis, l), ("d", axis, k)]
                        if k < l:
                            rhs = [("d", axis, k), ("s", axis, l - 1)]
                        elif k in (l, l + 1):
                            rhs = []
                        else:
                            rhs = [("d", axis, k - 1), ("s", axis, l)]
                        if not faces_equal(x, shape, lhs, rhs):
                            raise StructuralError(
                                f"d_{k} s_{l} failed at {shape} axis {axis}")
                for b in range(size + 1):
                    for a in range(b + 1):
                        if not faces_equal(x, shape,
                                           [("s", axis, b), ("s", axis, a)],
                                           [("s", axis, a), ("s", axis, b + 1)]):
                            raise StructuralError(
                                f"s_{a} s_{b} failed at {shape} axis {axis}")
    return checked
