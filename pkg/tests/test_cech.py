import random
from fractions import Fraction
from math import comb

import pytest

from condensed_lab.exact_algebra import FgAbGroup, StructuralError
from condensed_lab.noebeling import ProfiniteTower
from condensed_lab.cech import (
    FiniteHypercover,
    NormedCochain,
    cech_complex,
    contracting_homotopy,
    profinite_stage_acyclicity,
    split_homotopy_norm,
    torus_cohomology,
    torus_complex,
)


def random_split_cover(rng, base_size, max_fiber, depth=3):
    cover_map = []
    for s in range(base_size):
        cover_map.extend([s] * rng.randrange(1, max_fiber + 1))
    rng.shuffle(cover_map)
    return FiniteHypercover.cech_nerve(cover_map, depth, section="first")


# --- cech complexes -----------------------------------------------------------

def test_point_cover_cohomology():
    H = FiniteHypercover.point_cover(4)
    cx = cech_complex(H)
    assert cx.homology(0) == FgAbGroup(1)          # H^0 = Z
    for i in range(1, 4):
        assert cx.homology(-i).is_trivial()        # H^{>0} = 0


def test_two_to_one_nerve_cohomology():
    # {0,1,2,3} -> {0,1} with fibers of size 2: H^0 = Z^2, H^{>0} = 0
    H = FiniteHypercover.cech_nerve([0, 0, 1, 1], 3, section="first")
    cx = cech_complex(H)
    assert cx.homology(0) == FgAbGroup(2)
    assert cx.homology(-1).is_trivial()
    assert cx.homology(-2).is_trivial()


def test_disjoint_union_cover_of_two_points():
    # identity cover of a 2-point set: sheaf condition gives H^0 rank 2
    H = FiniteHypercover.cech_nerve([0, 1], 3, section="first")
    cx = cech_complex(H)
    assert cx.homology(0) == FgAbGroup(2)


def test_nerve_validation_catches_broken_faces():
    H = FiniteHypercover.cech_nerve([0, 0, 1], 2, section="first")
    bad_faces = [[list(m) for m in H.faces[n]] for n in range(1, H.depth + 1)]
    bad_faces[1][0][0] = (bad_faces[1][0][0] + 1) % H.levels[0]
    with pytest.raises(StructuralError):
        FiniteHypercover(H.base_size, H.levels, bad_faces, H.augmentation)


# --- split contracting homotopy ------------------------------------------------

def test_contracting_homotopy_point_cover():
    H = FiniteHypercover.point_cover(3)
    f = NormedCochain(1, (7,))
    hf = contracting_homotopy(H, f)
    assert hf.level == 0
    assert hf.norm <= f.norm


def test_split_homotopy_norm_three_to_two():
    # nerve of the split surjection {0,1,2} -> {0,1}
    H = FiniteHypercover.cech_nerve([0, 0, 1], 4, section="first")
    report = split_homotopy_norm(H, trials=100, seed=7)
    assert report.trials == 100
    assert report.max_ratio <= 1


def test_split_homotopy_zero_cocycle_ratio():
    H = FiniteHypercover.cech_nerve([0], 3, section="first")
    f = NormedCochain(1, (0,))
    hf = contracting_homotopy(H, f)
    assert hf.norm == 0  # ratio defined as 0


def test_split_homotopy_random_covers():
    rng = random.Random(23)
    for _ in range(8):
        H = random_split_cover(rng, rng.randrange(1, 4), 3)
        report = split_homotopy_norm(H, trials=30, seed=rng.randrange(1000))
        assert report.max_ratio <= 1


def test_homotopy_requires_splitting():
    H = FiniteHypercover.cech_nerve([0, 0], 3)
    with pytest.raises(StructuralError):
        split_homotopy_norm(H, trials=5, seed=1)


def test_split_cover_positive_cohomology_vanishes():
    rng = random.Random(31)
    for _ in range(6):
        H = random_split_cover(rng, rng.randrange(1, 4), 3, depth=3)
        cx = cech_complex(H)
        assert cx.homology(0) == FgAbGroup(H.base_size)
        for i in range(1, 3):
            assert cx.homology(-i).is_trivial()


# --- profinite stage acyclicity -------------------------------------------------

def test_stage_acyclicity_constant_identity_tower():
    base = ProfiniteTower.constant(2, stages=3)
    reports, ok = profinite_stage_acyclicity(
        base, base, [list(range(2))] * 3, max_degree=2)
    assert ok
    assert all(r.exact for r in reports)


def test_stage_acyclicity_cantor_projections():
    # stage j: {0,1}^{j+1} -> {0,1}^j, compatible with the cantor towers
    depth = 3
    base = ProfiniteTower.cantor(depth)
    cover = ProfiniteTower(2, tuple(
        tuple(i >> 1 for i in range(2 ** (k + 2))) for k in range(depth)))
    stage_maps = [[i >> 1 for i in range(2 ** (j + 1))] for j in range(depth + 1)]
    reports, ok = profinite_stage_acyclicity(base, cover, stage_maps, max_degree=2)
    assert ok


def test_stage_acyclicity_three_to_one():
    base = ProfiniteTower.constant(1, stages=1)
    cover = ProfiniteTower.constant(3, stages=1)
    reports, ok = profinite_stage_acyclicity(base, cover, [[0, 0, 0]], max_degree=2)
    assert ok
    assert reports[0].h0_rank == 1


def test_stage_acyclicity_rejects_incompatible_tower():
    base = ProfiniteTower.constant(2, stages=2)
    cover = ProfiniteTower(4, ((0, 1, 2, 3),))
    bad = [[0, 0, 1, 1], [0, 1, 0, 1]]  # squares do not commute
    with pytest.raises(StructuralError):
        profinite_stage_acyclicity(base, cover, bad)


# --- torus cohomology ------------------------------------------------------------

def test_torus_complex_is_a_torus():
    # Euler characteristic 0 and the right Betti numbers for the 2-torus
    cx = torus_complex(2)
    assert cx.euler_characteristic() == 0
    assert cx.homology(0) == FgAbGroup(1)
    assert cx.homology(1) == FgAbGroup(2)
    assert cx.homology(2) == FgAbGroup(1)


def test_torus_cohomology_wedge_ranks():
    for j in range(4):
        for i in range(j + 2):
            got = torus_cohomology(j, i)
            assert got == FgAbGroup(comb(j, i)), (j, i)


def test_torus_total_rank_is_two_to_j():
    for j in range(4):
        total = sum(torus_cohomology(j, i).rank for i in range(j + 1))
        assert total == 2 ** j


def test_torus_factor_bound():
    with pytest.raises(StructuralError):
        torus_cohomology(4, 1)
