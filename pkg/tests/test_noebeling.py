import itertools
import random

import pytest

from condensed_lab.exact_algebra import StructuralError
from condensed_lab.noebeling import (
    BasisCertificate,
    CubeSubset,
    IdempotentProduct,
    ProfiniteTower,
    basis_certificate,
    evaluation_vector,
    express_function,
    noebeling_basis,
    tower_extend,
)


def full_cube(n):
    return CubeSubset(n, tuple(itertools.product((0, 1), repeat=n)))


def random_subset(rng, n):
    pts = [p for p in itertools.product((0, 1), repeat=n) if rng.random() < 0.5]
    if not pts:
        pts = [tuple(rng.randrange(2) for _ in range(n))]
    return CubeSubset(n, tuple(pts))


def test_product_ordering_is_mask_order():
    # lexicographic on decreasing index strings, highest index first,
    # shorter prefix smaller: 1 < e0 < e1 < e1e0 < e2 < e2e0 < ...
    p = [IdempotentProduct(m) for m in range(8)]
    assert [str(x) for x in p] == ["1", "e0", "e1", "e1e0", "e2", "e2e0", "e2e1", "e2e1e0"]
    assert IdempotentProduct.from_indices((2, 1)) == IdempotentProduct(6)
    assert sorted(p) == p
    with pytest.raises(StructuralError):
        IdempotentProduct.from_indices((1, 2))


def test_single_point_basis():
    S = CubeSubset(0, ((),))
    E = noebeling_basis(S)
    assert E == [IdempotentProduct(0)]
    cert = basis_certificate(S, E)
    assert cert.ok and cert.determinant in (1, -1)


def test_two_point_segment():
    S = full_cube(1)
    E = noebeling_basis(S)
    assert E == [IdempotentProduct(0), IdempotentProduct(1)]  # {1, e0}
    assert basis_certificate(S, E).ok


def test_diagonal_of_square():
    # S = {(0,0), (1,1)}: e1 and e1e0 evaluate like e0, so both are rejected
    S = CubeSubset(2, ((0, 0), (1, 1)))
    E = noebeling_basis(S)
    assert E == [IdempotentProduct(0), IdempotentProduct(1)]
    assert evaluation_vector(IdempotentProduct(2), S) == \
        evaluation_vector(IdempotentProduct(1), S)
    assert evaluation_vector(IdempotentProduct(3), S) == \
        evaluation_vector(IdempotentProduct(1), S)


def test_full_cube_n2_certificate():
    S = full_cube(2)
    E = noebeling_basis(S)
    assert len(E) == 4
    cert = basis_certificate(S, E)
    assert cert.ok and cert.determinant in (1, -1)


def test_certificate_failure_non_square():
    S = CubeSubset(2, ((0, 0), (0, 1), (1, 0)))
    E = noebeling_basis(S)[:-1]  # drop one element
    cert = basis_certificate(S, E)
    assert not cert.ok
    assert "non-square" in cert.witness


def test_random_subsets_basis_size_and_unimodularity():
    rng = random.Random(42)
    for _ in range(40):
        S = random_subset(rng, rng.randrange(1, 6))
        E = noebeling_basis(S)
        assert len(E) == S.size
        assert basis_certificate(S, E).ok


def test_monotonicity_under_projection():
    # the sub-list of E avoiding the top coordinate is the basis downstairs
    rng = random.Random(9)
    for _ in range(25):
        n = rng.randrange(2, 6)
        S = random_subset(rng, n)
        E = noebeling_basis(S)
        Sbar = S.project(n - 1)
        expected = [p for p in E if p.mask < (1 << (n - 1))]
        assert noebeling_basis(Sbar) == expected


def test_integer_coefficient_recovery():
    rng = random.Random(17)
    for _ in range(20):
        S = random_subset(rng, rng.randrange(1, 6))
        E = noebeling_basis(S)
        values = [rng.randrange(-50, 51) for _ in range(S.size)]
        coords = express_function(S, E, values)
        rebuilt = [0] * S.size
        for coeff, prod in zip(coords, E):
            for i, v in enumerate(evaluation_vector(prod, S)):
                rebuilt[i] += coeff * v
        assert rebuilt == values


def test_tower_extend_constant_point():
    tower = [CubeSubset(k, ((0,) * k,)) for k in range(1, 4)]
    bases = tower_extend(tower)
    assert all(b == [IdempotentProduct(0)] for b in bases)


def test_tower_extend_full_cubes():
    tower = [full_cube(k) for k in range(1, 5)]
    bases = tower_extend(tower)
    assert [len(b) for b in bases] == [2, 4, 8, 16]
    for small, big in zip(bases, bases[1:]):
        assert set(small) <= set(big)


def test_tower_extend_diagonal_example():
    tower = [CubeSubset(1, ((0,), (1,))), CubeSubset(2, ((0, 0), (1, 1)))]
    bases = tower_extend(tower)
    assert bases[0] == [IdempotentProduct(0), IdempotentProduct(1)]
    assert set(bases[0]) <= set(bases[1])


def test_tower_extend_rejects_bad_tower():
    with pytest.raises(StructuralError):
        tower_extend([CubeSubset(1, ((0,),)),
                      CubeSubset(2, ((1, 0), (1, 1)))])  # projection is {1}, not {0}


def test_profinite_tower_validation():
    t = ProfiniteTower(2, ((0, 1, 1),))
    assert t.stage_sizes == [2, 3]
    with pytest.raises(StructuralError):
        ProfiniteTower(2, ((0, 0),))  # not surjective


def test_profinite_tower_cantor():
    t = ProfiniteTower.cantor(3)
    assert t.stage_sizes == [1, 2, 4, 8]
    assert not t.eventually_constant()
    assert ProfiniteTower.constant(3).eventually_constant()
