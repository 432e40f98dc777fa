"""Symbolic calculus of solid modules with truncated concrete oracles.

Expressions are trees over the basic solid modules (products of copies of Z,
p-adic integers, power-series rings, Laurent-boundary quotients, the reals,
the unit Z) under tensor, direct sum, shift and Z-linear dual.  ``normalize``
rewrites by the tensor identity table:

    prod_I Z (x) prod_J Z  =  prod_{IxJ} Z
    Z_p (x) Z_p            =  Z_p
    Z_p (x) Z_l            =  0            (distinct primes)
    Z_p (x) Z[[T]]         =  Z_p[[T]]
    Z[[U]] (x) Z[[T]]      =  Z[[U,T]]
    R                      =  0            (derived solidification)

Unknown atom pairs stay symbolic: the calculus is openly partial.

``truncated_realization`` is the independent numeric oracle: it interprets
an expression tree structurally as a finitely presented abelian group at a
truncation level N (Z_p becomes Z/p^N, Z[[T]] becomes Z[T]/T^N with one
degree bound per variable, the Laurent boundary becomes the free module on
T^-1..T^-N) and never consults the rewrite table.  ``identity_check``
demands agreement of both routes.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .exact_algebra import (
    FgAbGroup,
    IntMatrix,
    StructuralError,
    diagonal_invariants,
)
from .noebeling import CubeSubset, ProfiniteTower, tower_extend


class NotRealizableError(ValueError):
    """Expression has no finite truncated model (Real atom, symbolic index)."""


# ---------------------------------------------------------------------------
# expression trees

@dataclass(frozen=True)
class SolidExpr:
    def __rmatmul__(self, other):
        return Tensor(other, self)


@dataclass(frozen=True)
class Zero(SolidExpr):
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Unit(SolidExpr):
    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class Real(SolidExpr):
    def __str__(self):
        return "R"


@dataclass(frozen=True)
class Series(SolidExpr):
    """Z_p[[variables]]; prime None means Z coefficients, no variables = Z_p."""

    prime: int | None
    variables: tuple = ()

    def __post_init__(self):
        if self.prime is not None and self.prime < 2:
            raise StructuralError("prime must be >= 2")
        object.__setattr__(self, "variables",
                           tuple(str(v) for v in self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise StructuralError("repeated power-series variable")

    def __str__(self):
        head = f"Zp({self.prime})" if self.prime is not None else "Z"
        if not self.variables:
            return head if self.prime is not None else "Z"
        return f"{head}[[{','.join(self.variables)}]]"


def PAdic(p):
    return Series(p, ())


def PowerSeries(*variables):
    return Series(None, tuple(variables))


@dataclass(frozen=True)
class ProdZ(SolidExpr):
    """prod_I Z with I = (finite count) x (product of named index sets)."""

    count: int = 1
    names: tuple = ()

    def __post_init__(self):
        if self.count < 0:
            raise StructuralError("negative index-set size")
        object.__setattr__(self, "names", tuple(sorted(str(n) for n in self.names)))

    @property
    def symbolic(self):
        return bool(self.names)

    def __str__(self):
        parts = ([str(self.count)] if self.count != 1 or not self.names else []) \
            + list(self.names)
        return f"Prod({'x'.join(parts) if parts else '1'})"


@dataclass(frozen=True)
class Laurent(SolidExpr):
    """The Laurent-boundary quotient Z((T^-1))/Z[T] in the variable given."""

    variable: str

    def __str__(self):
        return f"Laurent({self.variable})"


@dataclass(frozen=True)
class Tensor(SolidExpr):
    left: SolidExpr
    right: SolidExpr

    def __str__(self):
        return f"({self.left})(x)({self.right})"


@dataclass(frozen=True)
class DirectSum(SolidExpr):
    left: SolidExpr
    right: SolidExpr

    def __str__(self):
        return f"({self.left})(+)({self.right})"


@dataclass(frozen=True)
class Shift(SolidExpr):
    amount: int
    inner: SolidExpr

    def __str__(self):
        return f"({self.inner})[{self.amount}]"


@dataclass(frozen=True)
class DualToZ(SolidExpr):
    inner: SolidExpr

    def __str__(self):
        return f"Dual({self.inner})"


def _sort_key(e: SolidExpr):
    if isinstance(e, Zero):
        return (0,)
    if isinstance(e, Unit):
        return (1,)
    if isinstance(e, Series):
        return (2, e.prime or 0, e.variables)
    if isinstance(e, ProdZ):
        return (3, e.count, e.names)
    if isinstance(e, Laurent):
        return (4, e.variable)
    if isinstance(e, Real):
        return (5,)
    if isinstance(e, Tensor):
        return (6, _sort_key(e.left), _sort_key(e.right))
    if isinstance(e, DirectSum):
        return (7, _sort_key(e.left), _sort_key(e.right))
    if isinstance(e, Shift):
        return (8, e.amount, _sort_key(e.inner))
    if isinstance(e, DualToZ):
        return (9, _sort_key(e.inner))
    raise StructuralError(f"not a solid expression: {e!r}")


# ---------------------------------------------------------------------------
# normalization

def _merge_series(a: Series, b: Series):
    if a.prime is not None and b.prime is not None and a.prime != b.prime:
        return Zero()
    prime = a.prime if a.prime is not None else b.prime
    merged = list(a.variables)
    for v in b.variables:
        fresh = v
        while fresh in merged:
            fresh += "'"
        merged.append(fresh)
    return Series(prime, tuple(merged))


def _combine_atoms(a: SolidExpr, b: SolidExpr):
    """Rule table for a tensor of two atoms; None = no rule, stay symbolic.

    May return Zero, Unit, an atom, or a DirectSum (finite free factors
    distribute); the caller re-normalizes in the DirectSum case.
    """
    if isinstance(a, Series) and isinstance(b, Series):
        return _merge_series(a, b)
    if isinstance(a, ProdZ) and isinstance(b, ProdZ):
        return ProdZ(a.count * b.count, a.names + b.names)
    for x, y in ((a, b), (b, a)):
        if isinstance(x, ProdZ) and not x.symbolic:
            if x.count == 0:
                return Zero()
            out = y
            for _ in range(x.count - 1):
                out = DirectSum(out, y)
            return out
    return None


def _summands(e: SolidExpr):
    if isinstance(e, DirectSum):
        return _summands(e.left) + _summands(e.right)
    return [e]


def _factors(e: SolidExpr):
    if isinstance(e, Tensor):
        return _factors(e.left) + _factors(e.right)
    return [e]


def _resum(terms):
    terms = sorted(terms, key=_sort_key)
    if not terms:
        return Zero()
    out = terms[0]
    for t in terms[1:]:
        out = DirectSum(out, t)
    return out


def _retensor(factors):
    factors = sorted(factors, key=_sort_key)
    if not factors:
        return Unit()
    out = factors[0]
    for f in factors[1:]:
        out = Tensor(out, f)
    return out


def _wrap_shift(amount, e):
    if amount == 0 or isinstance(e, Zero):
        return e
    return Shift(amount, e)


def normalize(e: SolidExpr) -> SolidExpr:
    """Confluent normal form under the identity table; idempotent.

    Normal forms are direct sums (sorted) of optionally shifted tensor
    chains (sorted, flattened) of atoms with no applicable rule left.
    """
    if isinstance(e, (Zero, Unit, Laurent)):
        return e
    if isinstance(e, Real):
        return Zero()  # derived solidification of R vanishes
    if isinstance(e, Series):
        if e.prime is None and not e.variables:
            return Unit()
        return Series(e.prime, tuple(sorted(e.variables)))
    if isinstance(e, ProdZ):
        if e.count == 0:
            return Zero()
        if e.count == 1 and not e.names:
            return Unit()
        return e
    if isinstance(e, Shift):
        inner = normalize(e.inner)
        if isinstance(inner, Zero):
            return Zero()
        if isinstance(inner, Shift):
            return _wrap_shift(e.amount + inner.amount, inner.inner)
        if isinstance(inner, DirectSum):
            return _resum([normalize(Shift(e.amount, t)) for t in _summands(inner)])
        return _wrap_shift(e.amount, inner)
    if isinstance(e, DualToZ):
        inner = normalize(e.inner)
        if isinstance(inner, (Zero, Unit)):
            return inner
        if isinstance(inner, ProdZ) and not inner.symbolic:
            return inner  # finite free modules are self-dual
        if isinstance(inner, Shift):
            return normalize(Shift(-inner.amount, DualToZ(inner.inner)))
        if isinstance(inner, DirectSum):
            return _resum([normalize(DualToZ(t)) for t in _summands(inner)])
        return DualToZ(inner)
    if isinstance(e, DirectSum):
        terms = []
        for t in _summands(e):
            nt = normalize(t)
            if not isinstance(nt, Zero):
                terms.extend(_summands(nt))
        return _resum(terms)
    if isinstance(e, Tensor):
        factors = []
        for f in _factors(e):
            nf = normalize(f)
            if isinstance(nf, Zero):
                return Zero()
            factors.extend(_factors(nf))
        # hoist shifts out of the chain
        shift = 0
        flat = []
        for f in factors:
            if isinstance(f, Shift):
                shift += f.amount
                flat.extend(_factors(f.inner))
            else:
                flat.append(f)
        # distribute over direct sums: one product per choice of summands
        if any(isinstance(f, DirectSum) for f in flat):
            choice_lists = [_summands(f) for f in flat]
            terms = [normalize(_retensor(list(choice)))
                     for choice in itertools.product(*choice_lists)]
            return normalize(Shift(shift, _resum([t for t in terms
                                                  if not isinstance(t, Zero)])))
        flat = [f for f in flat if not isinstance(f, Unit)]
        # pairwise combination to a fixpoint
        changed = True
        while changed:
            changed = False
            for i in range(len(flat)):
                for j in range(i + 1, len(flat)):
                    combined = _combine_atoms(flat[i], flat[j])
                    if combined is None:
                        continue
                    rest = [flat[k] for k in range(len(flat)) if k not in (i, j)]
                    if isinstance(combined, Zero):
                        return Zero()
                    if isinstance(combined, DirectSum):
                        return normalize(
                            Shift(shift, _retensor(rest + [combined])))
                    combined = normalize(combined)
                    if isinstance(combined, Zero):
                        return Zero()
                    if not isinstance(combined, Unit):
                        rest.append(combined)
                    flat = rest
                    changed = True
                    break
                if changed:
                    break
        return _wrap_shift(shift, _retensor(flat))
    raise StructuralError(f"not a solid expression: {e!r}")


# ---------------------------------------------------------------------------
# truncated realizations

@dataclass(frozen=True)
class TruncatedModule:
    """Finite presentation of a solid expression at a truncation level.

    Generators are labelled by monomials: tuples of (variable-id, exponent)
    pairs, where variable ids carry the tree path so distinct atom instances
    never collide.  ``relations`` columns span the relation submodule.
    """

    level: int
    generators: tuple
    relations: IntMatrix
    ring: str = "Z"

    def __post_init__(self):
        if self.level < 1:
            raise StructuralError("truncation level must be >= 1")
        if self.relations.rows != len(self.generators):
            raise StructuralError("presentation dimensions inconsistent")

    def canonical(self) -> FgAbGroup:
        inv = diagonal_invariants(self.relations)
        free = len(self.generators) - len(inv)
        return FgAbGroup.from_orders([0] * free + [d for d in inv if d > 1])

    def reduce(self, to_level) -> "TruncatedModule":
        """Reduction to a smaller level: drop out-of-window monomials and
        lower the coefficient modulus."""
        if not (1 <= to_level <= self.level):
            raise StructuralError("can only reduce to a smaller positive level")

        def survives(label):
            for _, exp in label:
                if exp >= 0 and exp >= to_level:
                    return False
                if exp < 0 and -exp > to_level:
                    return False
            return True

        keep = [i for i, g in enumerate(self.generators) if survives(g)]
        keep_index = {g: pos for pos, g in enumerate(keep)}
        entries = []
        ncols = 0
        for j in range(self.relations.cols):
            col = self.relations.column(j)
            for i, v in enumerate(col):
                if v and i in keep_index:
                    entries.append((keep_index[i], ncols, v))
            ncols += 1
        # new modulus relations from the ring reduction Z/p^N -> Z/p^N'
        if self.ring.startswith("Z/"):
            p = int(self.ring.split("^")[0][2:])
            for pos in range(len(keep)):
                entries.append((pos, ncols, p ** to_level))
                ncols += 1
            ring = f"Z/{p}^{to_level}"
        else:
            ring = self.ring
        return TruncatedModule(
            to_level,
            tuple(self.generators[i] for i in keep),
            IntMatrix(len(keep), ncols, entries),
            ring,
        )

    def to_json(self):
        return {
            "level": self.level,
            "ring": self.ring,
            "generators": [list(map(list, g)) for g in self.generators],
            "relations": self.relations.to_json(),
            "canonical": self.canonical().to_json(),
        }


def _tensor_modules(A: TruncatedModule, B: TruncatedModule) -> TruncatedModule:
    gens = tuple(tuple(sorted(ga + gb)) for ga in A.generators for gb in B.generators)
    nb = len(B.generators)
    entries = []
    ncols = 0
    # relations of A tensored with each generator of B
    for j in range(A.relations.cols):
        col = A.relations.column(j)
        for k in range(nb):
            for i, v in enumerate(col):
                if v:
                    entries.append((i * nb + k, ncols, v))
            ncols += 1
    # generators of A tensored with relations of B
    for i in range(len(A.generators)):
        for j in range(B.relations.cols):
            col = B.relations.column(j)
            for k, v in enumerate(col):
                if v:
                    entries.append((i * nb + k, ncols, v))
            ncols += 1
    ring = A.ring if B.ring == "Z" else (B.ring if A.ring == "Z" else "Z")
    return TruncatedModule(A.level, gens,
                           IntMatrix(len(gens), ncols, entries), ring)


def _direct_sum_modules(A: TruncatedModule, B: TruncatedModule) -> TruncatedModule:
    gens = A.generators + B.generators
    entries = [(r, c, v) for (r, c), v in A.relations.items()]
    entries += [(r + len(A.generators), c + A.relations.cols, v)
                for (r, c), v in B.relations.items()]
    ring = A.ring if A.ring == B.ring else "Z"
    return TruncatedModule(A.level, gens,
                           IntMatrix(len(gens), A.relations.cols + B.relations.cols,
                                     entries), ring)


def _realize(e: SolidExpr, N, path, real_as_zero):
    if isinstance(e, Zero):
        return TruncatedModule(N, (), IntMatrix.zero(0, 0))
    if isinstance(e, Unit):
        return TruncatedModule(N, ((),), IntMatrix.zero(1, 0))
    if isinstance(e, Real):
        if real_as_zero:
            return TruncatedModule(N, (), IntMatrix.zero(0, 0))
        raise NotRealizableError("the real atom has no finite truncation")
    if isinstance(e, Series):
        var_ids = [f"{path}:{v}" for v in e.variables]
        gens = []
        for exps in itertools.product(range(N), repeat=len(var_ids)):
            gens.append(tuple(sorted((vid, x) for vid, x in zip(var_ids, exps) if x)))
        gens = tuple(sorted(gens))
        if e.prime is None:
            return TruncatedModule(N, gens, IntMatrix.zero(len(gens), 0))
        modulus = e.prime ** N
        rel = IntMatrix(len(gens), len(gens),
                        [(i, i, modulus) for i in range(len(gens))])
        return TruncatedModule(N, gens, rel, ring=f"Z/{e.prime}^{N}")
    if isinstance(e, ProdZ):
        if e.symbolic:
            raise NotRealizableError(
                f"symbolic only: infinite index set {e.names}")
        gens = tuple(((f"{path}:e", i),) for i in range(e.count))
        return TruncatedModule(N, gens, IntMatrix.zero(e.count, 0))
    if isinstance(e, Laurent):
        vid = f"{path}:{e.variable}"
        gens = tuple(((vid, -k),) for k in range(1, N + 1))
        return TruncatedModule(N, gens, IntMatrix.zero(N, 0))
    if isinstance(e, Tensor):
        return _tensor_modules(_realize(e.left, N, path + "L", real_as_zero),
                               _realize(e.right, N, path + "R", real_as_zero))
    if isinstance(e, DirectSum):
        return _direct_sum_modules(_realize(e.left, N, path + "l", real_as_zero),
                                   _realize(e.right, N, path + "r", real_as_zero))
    if isinstance(e, Shift):
        if e.amount != 0:
            raise NotRealizableError("graded shifts have no ungraded truncation")
        return _realize(e.inner, N, path + "s", real_as_zero)
    if isinstance(e, DualToZ):
        raise NotRealizableError("Z-linear duals stay symbolic")
    raise StructuralError(f"not a solid expression: {e!r}")


def truncated_realization(e: SolidExpr, N) -> TruncatedModule:
    """Structural finite model at level N (never consults the rewrite rules)."""
    return _realize(e, N, "", real_as_zero=False)


def identity_check(lhs: SolidExpr, rhs: SolidExpr, N) -> bool:
    """Both routes must agree: symbolic normal forms and truncated models.

    The Real atom is realized as the zero module here (its derived
    solidification), so the full identity table is checkable by one path;
    truncated_realization itself refuses Real.
    """
    if normalize(lhs) != normalize(rhs):
        return False
    left = _realize(lhs, N, "", real_as_zero=True)
    right = _realize(rhs, N, "", real_as_zero=True)
    return left.canonical() == right.canonical()


# ---------------------------------------------------------------------------
# measures on profinite towers

@dataclass(frozen=True)
class MeasuresReport:
    expression: SolidExpr
    stage_ranks: tuple
    basis_sizes: tuple = ()

    def to_json(self):
        return {
            "expression": str(self.expression),
            "stage_ranks": list(self.stage_ranks),
            "basis_sizes": list(self.basis_sizes),
        }


def measures_module(tower) -> MeasuresReport:
    """The free solid module on a profinite tower: lim of free stages.

    For an eventually constant tower this is a finite product of copies of
    Z; otherwise the product stays symbolic over the inverse-limit index.
    For a tower of cube subsets the nested bases are computed and their
    sizes reported alongside.
    """
    if isinstance(tower, ProfiniteTower):
        ranks = tuple(tower.stage_sizes)
        if tower.eventually_constant():
            return MeasuresReport(normalize(ProdZ(ranks[-1])), ranks)
        return MeasuresReport(ProdZ(1, (f"lim[{ 'x'.join(map(str, ranks)) }]",)), ranks)
    if isinstance(tower, (list, tuple)) and all(isinstance(s, CubeSubset) for s in tower):
        bases = tower_extend(list(tower))
        sizes = tuple(len(b) for b in bases)
        ranks = tuple(s.size for s in tower)
        if len(tower) >= 2 and tower[-1].size == tower[-2].size:
            return MeasuresReport(normalize(ProdZ(ranks[-1])), ranks, sizes)
        return MeasuresReport(ProdZ(1, ("noebeling-union",)), ranks, sizes)
    raise StructuralError("expected a ProfiniteTower or a tower of cube subsets")


# ---------------------------------------------------------------------------
# expression grammar:  Zp(5)  PS(T,U)  Prod(I)  Prod(4)  Laurent(T)  R  Z  0
# operators:  (x) tensor   (+) direct sum   [k] shift   Dual(...)

_TOKEN = re.compile(r"""
    (?P<tensor>\(x\))
  | (?P<sum>\(\+\))
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<lbracket>\[)
  | (?P<rbracket>\])
  | (?P<comma>,)
  | (?P<int>-?\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9']*)
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise StructuralError(f"bad character in expression at {text[pos:]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group()))
    return out


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None):
        tok = self.peek()
        if tok[0] is None or (kind is not None and tok[0] != kind):
            raise StructuralError(f"unexpected token {tok[1]!r} in expression")
        self.pos += 1
        return tok

    def parse(self):
        e = self.sum_expr()
        if self.peek()[0] is not None:
            raise StructuralError(f"trailing input {self.peek()[1]!r}")
        return e

    def sum_expr(self):
        e = self.tensor_expr()
        while self.peek()[0] == "sum":
            self.take()
            e = DirectSum(e, self.tensor_expr())
        return e

    def tensor_expr(self):
        e = self.postfix()
        while self.peek()[0] == "tensor":
            self.take()
            e = Tensor(e, self.postfix())
        return e

    def postfix(self):
        e = self.atom()
        while self.peek()[0] == "lbracket":
            self.take()
            k = int(self.take("int")[1])
            self.take("rbracket")
            e = Shift(k, e)
        return e

    def atom(self):
        kind, text = self.peek()
        if kind == "lparen":
            self.take()
            e = self.sum_expr()
            self.take("rparen")
            return e
        if kind == "int":
            self.take()
            if text == "0":
                return Zero()
            raise StructuralError(f"unexpected number {text!r}")
        if kind == "name":
            self.take()
            if text == "R":
                return Real()
            if text == "Z":
                return Unit()
            if text == "Zp":
                self.take("lparen")
                p = int(self.take("int")[1])
                self.take("rparen")
                return PAdic(p)
            if text == "PS":
                self.take("lparen")
                vars_ = [self.take("name")[1]]
                while self.peek()[0] == "comma":
                    self.take()
                    vars_.append(self.take("name")[1])
                self.take("rparen")
                return PowerSeries(*vars_)
            if text == "Prod":
                self.take("lparen")
                kind2, text2 = self.peek()
                if kind2 == "int":
                    self.take()
                    out = ProdZ(int(text2))
                else:
                    out = ProdZ(1, (self.take("name")[1],))
                self.take("rparen")
                return out
            if text == "Laurent":
                self.take("lparen")
                v = self.take("name")[1]
                self.take("rparen")
                return Laurent(v)
            if text == "Dual":
                self.take("lparen")
                inner = self.sum_expr()
                self.take("rparen")
                return DualToZ(inner)
            raise StructuralError(f"unknown atom {text!r}")
        raise StructuralError(f"unexpected token {text!r}")


def parse_expression(text) -> SolidExpr:
    return _Parser(_tokenize(text)).parse()
