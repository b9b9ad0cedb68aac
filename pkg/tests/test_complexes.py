from fractions import Fraction

import pytest
from flint import fmpq
from hypothesis import given, settings, strategies as st

from colored_sln import complexes
from colored_sln.complexes import (Crossing, DiagramError, ForkVertex, LinkDiagram, ResolutionCube, VSComplex,
                                   assemble_complex, braid_closure, crossing_map,
                                   crossing_resolutions, deformed_homology, euler_characteristic,
                                   gaussian_eliminate, hat_tc, link_homology, normalization,
                                   null_homotopic_closure, purity_check, reconstruct_differential,
                                   resolution_range, resolved_graph, spectral_E1, tc)
from colored_sln.matfact import MFError
from colored_sln.moy import moy_poly
from colored_sln.qpoly import LaurentPoly, Poincare, qbinom
from colored_sln.symfunc import BParams, roots_to_b
from tests.corpus import as_tuples, diagram
from tests.oracles.khovanov import khovanov

SMALL = ["unknot", "unknot2", "unlink2", "kink_pos", "kink_neg", "hopf_pos", "hopf_neg",
         "trefoil_right", "trefoil_left", "r2a", "r2b"]


def test_resolution_ranges():
    assert resolution_range(1, 1) == [0, 1]
    assert resolution_range(2, 1) == [1, 2]
    assert resolution_range(1, 3) == [0, 1]
    with pytest.raises(ValueError):
        crossing_resolutions(1, 3, 1, 2)


def test_crossing_resolution_degrees():
    pos = [(shift, t, k) for _, shift, t, k in crossing_resolutions(1, 1, 1, 2)]
    neg = [(shift, t, k) for _, shift, t, k in crossing_resolutions(-1, 1, 1, 2)]
    assert pos == [(-1, 1, 0), (0, 0, 1)]
    assert neg == [(1, -1, 0), (0, 0, 1)]
    for G, _, _, k in crossing_resolutions(1, 2, 1, 3):
        cols = sorted(e.color for e in G.edges)
        assert 0 not in cols and max(cols) <= 1 + k


def test_normalization_values():
    assert normalization(1, 1, 1, 2) == (2, -1, 1)
    assert normalization(-1, 2, 2, 4) == (-6, 2, 0)
    assert normalization(1, 2, 1, 3) == (0, 0, 0)


def test_roots_to_b_examples():
    assert tuple(roots_to_b([1, -1]).values) == (0, -1)
    assert tuple(roots_to_b([0, 1, 2]).values) == (3, 2, 0)


@pytest.mark.parametrize("N", [2, 3])
def test_unknots_are_grassmannians(N):
    for name, m in (("unknot", 1), ("unknot2", 2)):
        P = link_homology(diagram(name), N)
        assert P.q_part() == qbinom(N, m)
        assert P.z2_support() == {m % 2}
        assert {t for (_, t, _) in P.coeffs} == {0}


def test_kinks_match_unknot():
    want = link_homology(diagram("unknot"), 2)
    assert link_homology(diagram("kink_pos"), 2) == want
    assert link_homology(diagram("kink_neg"), 2) == want


@pytest.mark.parametrize("name", ["trefoil_right", "hopf_neg", "r2b"])
def test_agrees_with_khovanov_oracle(name):
    D = diagram(name)
    z = D.total_color() % 2
    want = Poincare({(q, t, z): n for (q, t), n in khovanov(D.arcs, as_tuples(D)).items()})
    assert link_homology(D, 2) == want


def test_mirror_reverses_gradings():
    R = link_homology(diagram("trefoil_right"), 2)
    L = link_homology(diagram("trefoil_right").mirror(), 2)
    assert L == Poincare({(-q, -t, z): n for (q, t, z), n in R.coeffs.items()})
    assert L == link_homology(diagram("trefoil_left"), 2)


@pytest.mark.parametrize("name", SMALL)
def test_gaussian_elimination_keeps_homology(name):
    C = assemble_complex(diagram(name), 2)
    G = gaussian_eliminate(C)
    assert G.check_square_zero()
    assert G.homology() == C.homology()
    assert G.total_dim() == G.homology().total_dim()


def test_gaussian_elimination_on_a_small_complex():
    one = fmpq(1)
    # V --id--> V --0--> W, one (z2, q) block each
    C = VSComplex({0: [(0, 0)], 1: [(0, 0)], 2: [(0, 2)]}, {0: [{0: one}], 1: [{}], 2: [{}]})
    G = gaussian_eliminate(C)
    assert G.total_dim() == 1
    assert G.homology() == Poincare({(2, 2, 0): 1})


def _rescaled_edges(monkeypatch, scales):
    orig = ResolutionCube.edge_matrix

    def scaled(self, ks, ci):
        res = orig(self, ks, ci)
        if res is None:
            return None
        ks2, cols = res
        c = fmpq(*scales[ci % len(scales)])
        return ks2, [{i: c * v for i, v in col.items()} for col in cols]

    monkeypatch.setattr(ResolutionCube, "edge_matrix", scaled)


@settings(max_examples=8, deadline=None)
@given(scales=st.lists(st.tuples(st.integers(-5, 5).filter(bool), st.integers(1, 4)),
                       min_size=3, max_size=3))
def test_rescaling_edge_maps_keeps_homology(scales):
    D = diagram("trefoil_right")
    want = link_homology(D, 2)
    with pytest.MonkeyPatch.context() as mp:
        _rescaled_edges(mp, scales)
        assert link_homology(D, 2) == want


def test_dropping_koszul_signs_breaks_the_complex(monkeypatch):
    orig = ResolutionCube.edge_matrix

    def unsigned(self, ks, ci):
        res = orig(self, ks, ci)
        if res is None:
            return None
        ks2, cols = res
        if sum(self.hdeg(j, ks[j]) for j in range(ci)) % 2:
            cols = [{i: -v for i, v in col.items()} for col in cols]
        return ks2, cols

    monkeypatch.setattr(ResolutionCube, "edge_matrix", unsigned)
    with pytest.raises(MFError):
        assemble_complex(diagram("hopf_pos"), 2)


def test_euler_characteristic_is_poincare_at_minus_one():
    for name in ("trefoil_right", "hopf_pos", "unknot2"):
        D = diagram(name)
        for N in (2, 3):
            assert euler_characteristic(D, N) == link_homology(D, N).at_t(-1), (name, N)


def test_zero_crossing_diagrams():
    D = LinkDiagram({"a": 1, "b": 2}, [])
    assert euler_characteristic(D, 3) == qbinom(3, 1) * qbinom(3, 2)
    assert link_homology(D, 3).q_part() == qbinom(3, 1) * qbinom(3, 2)
    assert resolved_graph(D, ()).edges[0].color == 1
    assert moy_poly(resolved_graph(D, ()), 3) == qbinom(3, 1) * qbinom(3, 2)


def test_kink_complex_has_two_terms():
    C = assemble_complex(diagram("kink_pos"), 2)
    assert sorted(t for t, g in C.grades.items() if g) == [-1, 0]
    assert C.total_dim() == 6


def test_diagram_validation():
    with pytest.raises(DiagramError):
        LinkDiagram({"a": 1}, [Crossing(2, "a", "a", "a", "a")])
    with pytest.raises(DiagramError):
        LinkDiagram({"a": 1}, [Crossing(1, "a", "b", "a", "b")])
    with pytest.raises(DiagramError):
        LinkDiagram({"a": 1, "b": 2}, [Crossing(1, "a", "b", "a", "b")])
    with pytest.raises(DiagramError):
        LinkDiagram({"a": 0}, [])
    with pytest.raises(DiagramError):
        LinkDiagram.from_json({"format": 2, "arcs": {}, "crossings": []})
    with pytest.raises(DiagramError):
        LinkDiagram.from_json({"format": 1, "arcs": {}, "crossings": [], "extra": 1})
    with pytest.raises(DiagramError):
        braid_closure([3], 2)


def test_colors_outside_width_are_rejected():
    with pytest.raises(DiagramError):
        link_homology(braid_closure([1], 2, color=3), 2)


def test_diagram_json_round_trip():
    for name in SMALL:
        D = diagram(name)
        assert LinkDiagram.from_json(D.to_json()).to_json() == D.to_json()


def test_braid_closure_reproduces_fixture():
    assert braid_closure([1, 1, 1], 2).to_json() == diagram("trefoil_right").to_json()
    assert len(braid_closure([1, -2, 1, -2], 3).components()) == 1


@pytest.mark.parametrize("name", SMALL + ["kink_pos_c2", "r2a_c2", "figure_eight"])
def test_cable_parity_equals_total_color(name):
    D = diagram(name)
    assert hat_tc(D) == tc(D)


def test_components_and_total_color():
    assert len(diagram("hopf_pos").components()) == 2
    assert diagram("unlink2_c2").total_color() == 4
    assert diagram("trefoil_right").total_color() == 1


def test_local_maps_are_chain_maps():
    B = BParams.zero(3)
    for sign in (1, -1):
        for k in resolution_range(1, 1):
            phi = crossing_map(sign, 1, 1, k, 3, B)
            if phi is not None:
                assert phi.check_chain_map()
    assert crossing_map(1, 1, 1, 0, 3, B) is None
    assert crossing_map(-1, 1, 1, 1, 3, B) is None
    phi = reconstruct_differential(1, 1, 1, 1, 2, BParams.zero(2))
    assert phi is not None and phi.check_chain_map()


def test_null_homotopic_closure_is_acyclic_after_elimination():
    C = null_homotopic_closure(1, 1, 1, 1, 3)
    assert C.check_square_zero()
    assert gaussian_eliminate(C).total_dim() == 0


# fork sliding ------------------------------------------------------------
# Strands a, b merge into a doubled edge which a third strand s crosses; the
# edge then splits and everything closes up like a braid.  Sliding the
# crossing below the merge gives two crossings with the thin strands.

def fork_crossed_after_merge(sign):
    return LinkDiagram({"a": 1, "b": 1, "s": 1, "e": 2, "e2": 2},
                       [Crossing(sign, "e", "s", "a", "e2")],
                       [ForkVertex(("a", "b"), ("e",)), ForkVertex(("e2",), ("b", "s"))])


def fork_crossed_before_merge(sign1, sign2):
    return LinkDiagram({"a": 1, "b": 1, "s": 1, "s1": 1, "a1": 1, "b1": 1, "e": 2},
                       [Crossing(sign1, "b", "s", "s1", "b1"), Crossing(sign2, "a", "s1", "a", "a1")],
                       [ForkVertex(("a1", "b1"), ("e",)), ForkVertex(("e",), ("b", "s"))])


@pytest.mark.parametrize("sign,N", [(1, 2), (-1, 2), (1, 3)])
def test_fork_sliding(sign, N):
    before = link_homology(fork_crossed_after_merge(sign), N, normalized=False)
    after = link_homology(fork_crossed_before_merge(sign, sign), N, normalized=False)
    assert before == after
    assert before.total_dim() > 0


def test_fork_sliding_comparison_is_not_vacuous():
    before = link_homology(fork_crossed_after_merge(1), 2, normalized=False)
    assert link_homology(fork_crossed_before_merge(1, 1), 2) != before
    assert link_homology(fork_crossed_before_merge(1, -1), 2, normalized=False) != before


def test_vertex_diagrams():
    D = fork_crossed_after_merge(1)
    assert LinkDiagram.from_json(D.to_json()).to_json() == D.to_json()
    assert D.free_circles == []
    with pytest.raises(DiagramError):
        D.components()
    with pytest.raises(DiagramError):
        hat_tc(D)
    with pytest.raises(DiagramError):
        LinkDiagram({"a": 1, "e": 2}, [], [ForkVertex(("a",), ("e",)), ForkVertex(("e",), ("a",))])
    with pytest.raises(DiagramError):
        LinkDiagram({"a": 1}, [], [ForkVertex(("a",), ())])
    # a merge followed by a split, with no crossings, is a theta graph
    theta11 = LinkDiagram({"a": 1, "b": 1, "e": 2},
                          [], [ForkVertex(("a", "b"), ("e",)), ForkVertex(("e",), ("a", "b"))])
    assert link_homology(theta11, 3).q_part() == qbinom(2, 1) * qbinom(3, 2)


# deformations -------------------------------------------------------------

ROOTS2 = [1, -1]


def test_deformed_unknot_and_hopf():
    U = deformed_homology(diagram("unknot"), 2, ROOTS2)
    assert U.total_dim() == 2
    assert U.profiles == {(1, 0): {-1: 1, 1: 2}}
    assert deformed_homology(diagram("hopf_pos"), 2, ROOTS2).total_dim() == 4


def test_deformed_needs_n_roots():
    with pytest.raises(ValueError):
        deformed_homology(diagram("unknot"), 2, [1])


@pytest.mark.parametrize("name", ["trefoil_right", "hopf_neg", "figure_eight", "r2b"])
def test_deformed_is_bounded_by_e1(name):
    D = diagram(name)
    H = deformed_homology(D, 2, ROOTS2)
    E1 = spectral_E1(D, 2)
    for z in (0, 1):
        for t in {t for (_, t, _) in E1.coeffs} | {t for (_, t) in H.profiles}:
            e1 = sum(n for (_, tt, zz), n in E1.coeffs.items() if tt == t and zz == z)
            assert H.dim(z2=z, t=t) <= e1


def test_deformed_profiles_survive_r2():
    assert deformed_homology(diagram("r2a"), 2, ROOTS2).profiles == \
        deformed_homology(diagram("unlink2"), 2, ROOTS2).profiles


@pytest.mark.parametrize("name", ["unknot", "trefoil_right", "hopf_pos", "figure_eight", "r2a"])
def test_purity(name):
    assert purity_check(diagram(name), 2, ROOTS2)


def test_purity_check_can_fail(monkeypatch):
    monkeypatch.setattr(complexes, "tc", lambda D: (D.total_color() + 1) % 2)
    assert not purity_check(diagram("unknot"), 2, ROOTS2)


def test_deformed_json_shape():
    data = deformed_homology(diagram("unknot"), 2, [Fraction(1), Fraction(-1)]).to_json()
    assert data == {"format": 1, "profiles": [{"z2": 1, "t": 0, "fil": [[-1, 1], [1, 2]]}]}
    assert deformed_homology(diagram("unknot"), 2, ROOTS2).associated_graded() == \
        Poincare({(-1, 0, 1): 1, (1, 0, 1): 1})


def test_zero_crossing_euler_of_empty_diagram():
    assert euler_characteristic(LinkDiagram({}, []), 2) == LaurentPoly({0: 1})
