import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plasmic import plasma as pl
from plasmic._bits import BudgetExceeded, mask_of

from conftest import brute_force_morphisms, plasmas, strict_plasmas


def S(p, *labels):
    return sum(1 << p.index(x) for x in labels)


class TestBuilders:
    def test_krasner(self, K):
        assert K.labels == ("0", "1")
        assert K.sum(1, 1) == S(K, "0", "1")
        assert K.sum(0, 1) == S(K, "1")

    def test_psi_f1(self, F1):
        assert F1.sum(1, 1) == 0
        assert F1.sum(0, 1) == S(F1, "1")

    def test_power_set_2_matrix(self):
        P = pl.power_set(2)
        expected = [
            [{0}, {1}, {2}, {3}],
            [{1}, set(), {3}, set()],
            [{2}, {3}, set(), set()],
            [{3}, set(), set(), set()],
        ]
        for i, j in itertools.product(range(4), repeat=2):
            assert P.sum(i, j) == mask_of(expected[i][j])

    @pytest.mark.parametrize("n", range(4))
    def test_power_set_is_disjoint_union(self, n):
        P = pl.power_set(n)
        for X, Y in itertools.product(range(1 << n), repeat=2):
            assert P.sum(X, Y) == (0 if X & Y else 1 << (X | Y))

    def test_linear_tree_intervals(self):
        T = pl.linear_tree(3)
        assert T.sum(1, 3) == S(T, "1", "2", "3")
        assert T.sum(2, 2) == S(T, "2")

    def test_poset_interval_sums(self):
        P = pl.poset([("a", "b"), ("b", "c"), ("a", "d")])
        assert P.labels[0] == "a"
        assert P.sum(P.index("a"), P.index("c")) == S(P, "a", "b", "c")
        assert P.sum(P.index("b"), P.index("d")) == 0

    def test_poset_without_least_element(self):
        with pytest.raises(pl.PlasmaError):
            pl.poset([("a", "b"), ("c", "b")])

    def test_poset_order_round_trip(self):
        rel = {("a", "b"), ("b", "c"), ("a", "d"), ("d", "e"), ("a", "c")}
        P = pl.poset(rel)
        closure = {(x, x) for x in "abcde"} | rel | {("a", "e")}
        assert pl.recover_order(P) == closure

    def test_tree_paths(self):
        T = pl.tree([("r", "x"), ("x", "y"), ("r", "z")], "r")
        assert T.sum(T.index("y"), T.index("z")) == S(T, "r", "x", "y", "z")
        assert T.sum(T.index("x"), T.index("y")) == S(T, "x", "y")

    @pytest.mark.parametrize(
        "edges",
        [
            [("r", "x"), ("x", "r")],
            [("r", "x"), ("y", "z")],
            [("r", "x"), ("x", "y"), ("y", "r")],
        ],
    )
    def test_tree_rejects_non_trees(self, edges):
        with pytest.raises(pl.PlasmaError):
            pl.tree(edges, "r")

    def test_monoid_from_table(self):
        M = pl.monoid([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
        assert M == pl.z_mod(3)

    def test_asymmetric_table_rejected(self):
        with pytest.raises(pl.PlasmaError, match="symmetric"):
            pl.Plasma(["0", "1"], [[1, 2], [0, 3]])

    def test_weak_unit_required(self):
        with pytest.raises(pl.PlasmaError, match="unital"):
            pl.Plasma(["0", "1"], [[1, 0], [0, 3]])

    @pytest.mark.parametrize("desc", ["krasner", "psi_f1", "boolean", "power_set(2)", "power_set:2", "linear_tree(3)", "z_mod(2)"])
    def test_descriptors(self, desc):
        assert isinstance(pl.build_plasma(desc), pl.Plasma)

    def test_bad_descriptor(self):
        with pytest.raises(pl.PlasmaError):
            pl.build_plasma("nonsense(3)")

    def test_dict_descriptors(self):
        P = pl.build_plasma({"kind": "poset", "relation": [["0", "1"]]})
        assert len(P) == 2
        T = pl.build_plasma({"kind": "tree", "edges": [["r", "a"]], "root": "r"})
        assert T.sum(0, 1) == 0b11


class TestJson:
    def test_round_trip(self, K):
        assert pl.from_json(json.dumps(K.to_json())) == K

    def test_strict_unit_autocomplete(self):
        P = pl.from_json({"elements": ["e", "x"], "unit": "e", "strict_unit": True, "sum": {"x,x": ["e"]}})
        assert P.sum(0, 1) == 0b10 and P.sum(1, 1) == 0b01

    def test_missing_unit_pair(self):
        with pytest.raises(pl.PlasmaError):
            pl.from_json({"elements": ["e", "x"], "unit": "e", "sum": {"e,e": ["e"], "x,x": []}})

    def test_pair_given_twice(self):
        with pytest.raises(pl.PlasmaError):
            pl.from_json({"elements": ["e", "x"], "unit": "e", "strict_unit": True, "sum": {"x,e": ["x"], "e,x": ["x"]}})

    def test_unit_moves_to_front(self):
        P = pl.from_json({"elements": ["x", "e"], "unit": "e", "strict_unit": True, "sum": {}})
        assert P.labels == ("e", "x")


class TestProperties:
    def test_krasner(self, K):
        r = pl.check_properties(K)
        assert r.total and not r.deterministic and r.associative and r.mosaic
        assert r.inverse == (0, 1)
        assert r.witnesses["deterministic"][:2] == ("1", "1")

    def test_psi_f1(self, F1):
        r = pl.check_properties(F1)
        assert r.deterministic and not r.total and r.strictly_unital
        assert not r.monoid

    def test_power_set_2_is_associative_under_union_comparison(self):
        # (1*2)*3 = {3}*3 = {} and 1*(2*3) = 1*{} = {}: both sides are empty
        r = pl.check_properties(pl.power_set(2))
        assert r.associative
        assert not r.total and r.deterministic and r.strictly_unital

    def test_z_mod_is_monoid(self):
        r = pl.check_properties(pl.z_mod(4))
        assert r.monoid and r.mosaic
        assert r.inverse == (0, 3, 2, 1)

    def test_non_associative_witness(self):
        # 1+1 = {2}, 1+2 = {}, 2+2 = {1}: (1+1)+2 = {1} but 1+(1+2) = {}
        P = pl.Plasma(["0", "1", "2"], {(0, 0): 1, (1, 0): 2, (2, 0): 4, (1, 1): 4, (2, 1): 0, (2, 2): 2})
        r = pl.check_properties(P)
        assert not r.associative
        assert r.witnesses["associative"][:3] == ("1", "1", "2")

    def test_reversibility_brute_force(self):
        for p in [pl.krasner(), pl.psi_f1(), pl.power_set(2), pl.z_mod(3), pl.boolean(), pl.linear_tree(2)]:
            k = len(p)
            brute = []
            for inv in itertools.product(range(k), repeat=k):
                good = True
                for a, b, c in itertools.product(range(k), repeat=3):
                    if p.sum(b, c) >> a & 1:
                        if not (p.sum(a, inv[c]) >> b & 1 and p.sum(inv[b], a) >> c & 1):
                            good = False
                            break
                if good:
                    brute.append(inv)
            assert list(pl.inverse_assignments(p)) == brute
            assert pl.check_properties(p).reversible == bool(brute)

    @settings(max_examples=60, deadline=None)
    @given(plasmas(3))
    def test_inverse_search_matches_brute_force(self, p):
        k = len(p)
        brute = [
            inv
            for inv in itertools.product(range(k), repeat=k)
            if all(
                p.sum(a, inv[c]) >> b & 1 and p.sum(inv[b], a) >> c & 1
                for a, b, c in itertools.product(range(k), repeat=3)
                if p.sum(b, c) >> a & 1
            )
        ]
        assert list(pl.inverse_assignments(p)) == brute

    @settings(max_examples=100, deadline=None)
    @given(strict_plasmas())
    def test_mosaic_inverse_is_unique(self, p):
        r = pl.check_properties(p)
        if r.mosaic:
            assert r.inverse_count == 1
            assert len(list(pl.inverse_assignments(p))) == 1

    @settings(max_examples=100, deadline=None)
    @given(plasmas())
    def test_derived_flags(self, p):
        r = pl.check_properties(p)
        assert r.commutative and r.weakly_unital
        assert r.mosaic == (r.strictly_unital and r.reversible)
        assert r.monoid == (r.total and r.deterministic and r.associative)


class TestMorphisms:
    def test_power_set_2_to_1(self):
        homs = pl.enumerate_morphisms(pl.power_set(2), pl.power_set(1))
        assert [f.map for f in homs] == [(0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1)]

    @pytest.mark.parametrize("m,n", [(m, n) for m in range(4) for n in range(4)])
    def test_power_set_hom_counts(self, m, n):
        assert len(pl.enumerate_morphisms(pl.power_set(m), pl.power_set(n))) == (m + 1) ** n

    def test_krasner_endomorphisms(self, K):
        maps = [f.map for f in pl.enumerate_morphisms(K, K)]
        assert (0, 1) in maps and (0, 0) in maps

    def test_psi_f1_to_krasner(self, F1, K):
        assert [f.map for f in pl.enumerate_morphisms(F1, K)] == [(0, 0), (0, 1)]

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            pl.enumerate_morphisms(pl.power_set(3), pl.power_set(3), budget=10)

    def test_invalid_morphism_rejected(self, K, F1):
        with pytest.raises(pl.PlasmaError):
            pl.PlasmaMorphism(K, F1, (0, 1))

    @settings(max_examples=60, deadline=None)
    @given(plasmas(3), plasmas(3))
    def test_search_matches_brute_force(self, p, q):
        assert [f.map for f in pl.enumerate_morphisms(p, q)] == brute_force_morphisms(p, q)

    @settings(max_examples=40, deadline=None)
    @given(plasmas(3), plasmas(3), plasmas(3))
    def test_composition_closed_and_associative(self, p, q, r):
        pq = pl.enumerate_morphisms(p, q)
        qr = pl.enumerate_morphisms(q, r)
        for f in pq:
            assert pl.PlasmaMorphism.identity(q).compose(f).map == f.map
            for g in qr:
                h = g.compose(f)
                assert pl.is_morphism(p, r, h.map)
                rr = pl.PlasmaMorphism.identity(r)
                assert rr.compose(g).compose(f).map == rr.compose(g.compose(f)).map

    def test_isomorphism_search(self):
        a = pl.poset([("0", "x"), ("0", "y")])
        b = pl.poset([("0", "y"), ("0", "x")])
        assert a.is_isomorphic_to(b)
        assert not pl.krasner().is_isomorphic_to(pl.psi_f1())


class TestLinearTreeMaps:
    def test_identity_partition(self):
        parts = pl.classify_maps_to_linear_tree(pl.linear_tree(1), 1)
        assert (frozenset({0}), frozenset({1})) in parts

    def test_krasner_has_only_the_trivial_map(self, K):
        # 1+1 = {0,1} would have to sit inside U_1 = {1}
        assert pl.classify_maps_to_linear_tree(K, 1) == [(frozenset({0, 1}), frozenset())]

    def test_psi_f1_into_t2(self, F1):
        assert len(pl.classify_maps_to_linear_tree(F1, 2)) == 3

    @settings(max_examples=40, deadline=None)
    @given(plasmas(3), st.integers(1, 3))
    def test_partitions_match_morphisms(self, p, n):
        parts = pl.classify_maps_to_linear_tree(p, n)
        assert len(parts) == len(pl.enumerate_morphisms(p, pl.linear_tree(n)))
