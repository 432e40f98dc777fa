import pytest

from condensed_lab.exact_algebra import FgAbGroup, FinAbGroup, IntMatrix
from condensed_lab.breen_deligne import (
    D1,
    D2_ASSOC,
    D2_SYM,
    abelian_groups_of_order_at_most,
    bd_complex,
    bd_exactness_check,
    induced_map_matrix,
    multiplication_homotopy,
    power_basis,
)


def test_bd_complex_trivial_group():
    bd = bd_complex(FinAbGroup(()))
    assert bd.chain.ranks() == [1, 1, 2]
    report = bd_exactness_check(FinAbGroup(()))
    assert report.exact
    assert report.cokernel_of_d1 == FgAbGroup.trivial()


def test_d1_formula_z2():
    # d_1[1,1] = [0] - 2[1]
    A = FinAbGroup((2,))
    bd = bd_complex(A)
    basis1 = power_basis(A, 2)
    col = basis1.index(((1,), (1,)))
    d1 = bd.chain.differential(1)
    assert d1.entry(0, col) == 1    # [0]
    assert d1.entry(1, col) == -2   # -2[1]


def test_h0_of_unaugmented_complex_is_a():
    for orders in [(2,), (3,), (2, 2), (4,)]:
        report = bd_exactness_check(FinAbGroup(orders))
        assert report.cokernel_of_d1 == FinAbGroup(orders).canonical()


def test_exactness_small_groups():
    for orders in [(2,), (3,), (2, 2)]:
        report = bd_exactness_check(FinAbGroup(orders))
        assert report.exact
        assert report.homology_at_za.is_trivial()
        assert report.homology_at_za2.is_trivial()


def test_exactness_all_orders_at_most_eight():
    for A in abelian_groups_of_order_at_most(8):
        assert bd_exactness_check(A).exact, A


def test_functoriality_of_universal_maps():
    # chain maps induced by group homomorphisms commute with d_1 and d_2
    cases = [
        (FinAbGroup((4,)), FinAbGroup((2,)), lambda x: (x[0] % 2,)),   # reduction
        (FinAbGroup((2,)), FinAbGroup((4,)), lambda x: (2 * x[0],)),   # injection
        (FinAbGroup((2, 2)), FinAbGroup((2,)), lambda x: (x[0],)),     # projection
        (FinAbGroup((6,)), FinAbGroup((6,)), lambda x: ((5 * x[0]) % 6,)),  # automorphism
        (FinAbGroup((3,)), FinAbGroup((2,)), lambda x: (0,)),          # zero map
    ]
    for A, B, f in cases:
        for umap in (D1, D2_ASSOC, D2_SYM):
            left = umap.matrix_on(B) @ induced_map_matrix(A, B, f, umap.src)
            right = induced_map_matrix(A, B, f, umap.tgt) @ umap.matrix_on(A)
            assert left == right, (A, B, umap.src, umap.tgt)


def test_homotopy_n1_is_zero():
    cert = multiplication_homotopy(FinAbGroup((3,)), 1)
    assert cert.h0.is_zero()
    assert cert.h1.is_zero()
    assert cert.verify()


def test_homotopy_z2_n0():
    cert = multiplication_homotopy(FinAbGroup((2,)), 0)
    assert cert.verify()


def test_homotopy_z3_n2():
    cert = multiplication_homotopy(FinAbGroup((3,)), 2)
    assert cert.verify()
    assert not cert.h0.is_zero()


def test_homotopy_negative_n():
    cert = multiplication_homotopy(FinAbGroup((2, 2)), -2)
    assert cert.verify()


def test_abelian_group_enumeration():
    groups = abelian_groups_of_order_at_most(16)
    # 1,2,3,4(x2),5,6,7,8(x3),9(x2),10,11,12(x2),13,14,15,16(x5)
    assert len(groups) == 1 + 1 + 1 + 2 + 1 + 1 + 1 + 3 + 2 + 1 + 1 + 2 + 1 + 1 + 1 + 5
    canon = {g.canonical() for g in groups}
    assert len(canon) == len(groups)
    assert FgAbGroup(0, (2, 8)) in canon
