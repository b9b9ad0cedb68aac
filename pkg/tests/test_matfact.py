import pytest

from colored_sln.complexes import local_resolution
from colored_sln.matfact import (DegreewiseVS, FiniteMF, GradedVS, KoszulMF, MFError, Reduction, Row,
                                 empty_mf, exclude_row_a, exclude_row_b, hom_dimension, hom_solve,
                                 homology, reduce_to_finite, specialize_B, tensor, to_finite,
                                 unique_map)
from colored_sln.moy import build_mf, circle, disjoint_union, graded_dimension, theta
from colored_sln.polyring import RingSpec
from colored_sln.qpoly import qbinom, qint
from colored_sln.symfunc import BParams, roots_to_b


def _ring(*names):
    return RingSpec(list(names), [2] * len(names))


def test_tensor_concatenates_rows():
    R = _ring("x", "y")
    x, y = R.var("x"), R.var("y")
    M1 = KoszulMF(_ring("x"), [Row(_ring("x").var("x"), _ring("x").var("x") ** 2, 4)], 2,
                  potential=_ring("x").var("x") ** 3)
    M2 = KoszulMF(_ring("y"), [Row(_ring("y").var("y") ** 2, _ring("y").one(), 0)], 2,
                  potential=_ring("y").var("y") ** 2)
    T = tensor(M1, M2)
    assert T.nrows == 2
    assert T.potential.to_str() == (x ** 3 + y ** 2).map_to(T.ring, [T.ring.index[n] for n in R.names]).to_str()
    T.check_potential(T.potential)


def test_tensor_with_empty_is_identity():
    R = _ring("x")
    x = R.var("x")
    M = KoszulMF(R, [Row(x, x * x, 4)], 2, potential=x ** 3)
    T = tensor(M, empty_mf(R, 2))
    assert [(r.a, r.b) for r in T.rows] == [(x, x * x)]


def test_potential_mismatch_is_rejected():
    R = _ring("x")
    x = R.var("x")
    with pytest.raises(ValueError):
        KoszulMF(R, [Row(x, x, 2)], 2, potential=x ** 3)
    other = KoszulMF(R, [], 3)
    with pytest.raises(ValueError):
        tensor(KoszulMF(R, [], 2), other)


def test_square_of_differential_is_potential():
    M = build_mf(theta(1, 1), 3, BParams.symbolic(3))
    for E, t in M.generators():
        x = {(E, t): M.ring.one()}
        dd = M.d(M.d(x))
        want = {(E, t): M.potential} if M.potential else {}
        assert {k: v for k, v in dd.items() if v} == want


def test_empty_and_single_row_models():
    R = RingSpec([], [])
    F = to_finite(empty_mf(R, 2))
    assert F.dim == 1 and F.cols == [{}]
    M = KoszulMF(R, [Row(R.zero(), R.zero(), 3)], 2)
    F = to_finite(M)
    assert F.dim == 2
    assert set(F.parity) == {0, 1}
    assert all(not c for c in F.cols)
    H = GradedVS(F)
    assert H.dim == 2


def test_infinite_base_needs_exclusions():
    M = specialize_B(build_mf(circle(1), 2, BParams.symbolic(2)))
    with pytest.raises(MFError):
        to_finite(M)


def test_circle_exclusion_by_a_entries():
    # N=2, m=1, b=0: quotient by 3x^2, shift q^-1, z2 degree 1
    M = build_mf(circle(1), 2, BParams.zero(2))
    K = exclude_row_a(M, [0])
    H = GradedVS(FiniteMF(K))
    dims, z2 = graded_dimension(H)
    assert dims == qint(2)
    assert z2 == {1}
    assert exclude_row_a(M, []) is M


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_circle_homology(N, m):
    if m > N:
        pytest.skip("width cap")
    H, _ = homology(build_mf(circle(m), N, BParams.zero(N)))
    dims, z2 = graded_dimension(H)
    assert dims == qbinom(N, m)
    assert z2 == {m % 2}


def test_exclude_b_substitutes_linear_entry():
    # two marked points on one circle: the arc row has b = X1 - Y1
    from colored_sln.moy import Marking
    G = circle(1)
    mk = Marking({0: 2})
    M = build_mf(G, 2, BParams.zero(2), marking=mk)
    assert M.nrows == 2
    lin = [i for i, r in enumerate(M.rows) if r.b and r.b.degree() == 2]
    K = exclude_row_b(M, lin[0])
    assert K.ideal.contains(M.rows[lin[0]].b)
    H, _ = homology(M)
    assert graded_dimension(H)[0] == qint(2)


def test_unit_entry_makes_factorization_zero():
    R = _ring("x")
    x = R.var("x")
    M = KoszulMF(R, [Row(x ** 3, R.one(), 0)], 2, potential=x ** 3)
    K = exclude_row_b(M, 0)
    assert K.is_zero
    assert to_finite(K).dim == 0


def test_exclusion_order_does_not_matter():
    G = disjoint_union(circle(1), circle(2))
    M = build_mf(G, 3, BParams.zero(3))
    H1, _ = homology(M)
    reordered = M.with_changes(rows=list(reversed(M.rows)), potential=M.potential, check=True)
    H2, _ = homology(reordered)
    assert H1.dims() == H2.dims()


def test_monomial_order_does_not_matter():
    M = build_mf(theta(1, 1), 3, BParams.zero(3))
    names = list(reversed(M.ring.names))
    R2 = RingSpec(names, [M.ring.degrees[M.ring.index[n]] for n in names])
    idx = [R2.index[n] for n in M.ring.names]
    rows = [Row(r.a.map_to(R2, idx), r.b.map_to(R2, idx), r.deg_b) for r in M.rows]
    M2 = KoszulMF(R2, rows, 3, q_shift=M.q_shift, potential=M.potential.map_to(R2, idx))
    assert homology(M)[0].dims() == homology(M2)[0].dims()


def test_specialize_B_errors_and_values():
    M = build_mf(circle(1), 2, BParams.symbolic(2))
    with pytest.raises(ValueError):
        specialize_B(M, [1])
    S = specialize_B(M, [0, 0])
    with pytest.raises(ValueError):
        specialize_B(S)
    assert S.potential.is_zero()
    # roots 1, -1: a-entry is 3(x^2 - 1)
    b = roots_to_b([1, -1])
    D = specialize_B(M, list(b.values))
    x = D.ring.var(D.ring.names[0])
    assert D.rows[0].a == (x * x - 1) * 3


def test_deformed_circle_is_filtered():
    M = build_mf(circle(1), 2, roots_to_b([1, -1]))
    H, _ = homology(M, graded=False)
    assert H.dim == 2
    assert sorted(H.rep_tags) == [-1, 1]


@pytest.mark.parametrize("G,N", [(theta(1, 1), 3), (theta(1, 2), 4), (circle(2), 3)])
@pytest.mark.parametrize("cut", [1, 2])
def test_degreewise_homology_matches_finite_model(G, N, cut):
    # stop the exclusion chain early and finish degree by degree
    M = build_mf(G, N, BParams.zero(N))
    H, red = homology(M)
    part = Reduction(M, red.steps[:-cut]).end
    assert not part.ideal or not part.ideal.is_zero_dimensional()
    assert DegreewiseVS(part).dims() == H.dims()


def test_partial_reduction_is_flagged():
    M = build_mf(circle(2), 3, BParams.zero(3))
    red = reduce_to_finite(M, partial=True)
    assert red.finite
    with pytest.raises(MFError):
        reduce_to_finite(M, max_branch=0)
    red = reduce_to_finite(M, max_branch=0, partial=True)
    assert not red.finite


def test_lift_and_project_round_trip():
    M = build_mf(theta(1, 1), 3, BParams.zero(3))
    H, red = homology(M)
    for n in range(H.dim):
        z = H.rep_elem(n)
        full = red.lift(z)
        assert not M.d(full)
        assert H.elem_coordinates(red.project(full)) == {n: 1}


def test_hom_solve_identity_and_uniqueness():
    B = BParams.zero(3)
    src = local_resolution(1, 1, 1, 3, B).model
    tgt = local_resolution(1, 1, 0, 3, B).model
    assert hom_dimension(src, src, 0) >= 1
    maps = hom_solve(src, tgt, 1)
    assert len(maps) == 1
    phi = unique_map(src, tgt, 1)
    assert phi.check_chain_map()
    assert hom_dimension(src, tgt, -1) == 0
