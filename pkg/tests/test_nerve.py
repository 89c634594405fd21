import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from plasmic import f1mod as fm
from plasmic import finstar as fs
from plasmic import nerve as nv
from plasmic import plasma as pl
from plasmic._bits import BudgetExceeded, subset_order

from conftest import plasmas

# Printed subset order: 1,2,12 at level 2 and 1,2,3,12,13,23,123 at level 3.
KRASNER_2 = {(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1), (1, 1, 0)}
KRASNER_3 = {
    (0, 0, 0, 0, 0, 0, 0), (0, 0, 1, 0, 1, 1, 1), (0, 1, 0, 1, 0, 1, 1), (1, 0, 0, 1, 1, 0, 1),
    (0, 1, 1, 1, 1, 0, 0), (0, 1, 1, 1, 1, 1, 1), (1, 0, 1, 1, 0, 1, 0), (1, 0, 1, 1, 1, 1, 1),
    (1, 1, 0, 0, 1, 1, 0), (1, 1, 0, 1, 1, 1, 1), (1, 1, 1, 0, 0, 0, 1), (1, 1, 1, 1, 0, 0, 1),
    (1, 1, 1, 0, 1, 0, 1), (1, 1, 1, 0, 0, 1, 1), (1, 1, 1, 1, 1, 0, 1), (1, 1, 1, 1, 0, 1, 1),
    (1, 1, 1, 0, 1, 1, 1), (1, 1, 1, 1, 1, 1, 0), (1, 1, 1, 1, 1, 1, 1),
}  # fmt: skip
FREE_3 = {(0, 0, 0, 0, 0, 0, 0), (0, 0, 1, 0, 1, 1, 1), (0, 1, 0, 1, 0, 1, 1), (1, 0, 0, 1, 1, 0, 1)}


def printed(x):
    n = (len(x) - 1).bit_length()
    return tuple(x[S] for S in subset_order(n)[1:])


def brute_force_level(M, n):
    """Filter every vector with x_empty = unit by the coherence condition."""
    out = []
    for rest in itertools.product(range(len(M)), repeat=(1 << n) - 1):
        x = (0,) + rest
        if all(
            M.sum(x[S], x[T]) >> x[S | T] & 1
            for S in range(1, 1 << n)
            for T in range(1, 1 << n)
            if not S & T
        ):
            out.append(x)
    return out


class TestLevels:
    def test_krasner_counts(self, K):
        assert [len(nv.nerve_level(K, n)) for n in range(5)] == [1, 2, 5, 19, 137]

    def test_krasner_listings(self, K):
        assert {printed(x) for x in nv.nerve_level(K, 2)} == KRASNER_2
        assert {printed(x) for x in nv.nerve_level(K, 3)} == KRASNER_3

    def test_free_plasma_level_three(self, F1):
        assert {printed(x) for x in nv.nerve_level(F1, 3)} == FREE_3

    @pytest.mark.parametrize("n", range(6))
    def test_z2_levels_are_powers(self, n):
        assert len(nv.nerve_level(pl.z_mod(2), n)) == 2**n

    @pytest.mark.parametrize("n", range(4))
    def test_matches_brute_force(self, n):
        for M in [pl.krasner(), pl.psi_f1(), pl.boolean(), pl.linear_tree(2)]:
            assert nv.nerve_level(M, n) == brute_force_level(M, n)

    @settings(max_examples=40, deadline=None)
    @given(plasmas(3))
    def test_random_plasmas_match_brute_force(self, p):
        for n in range(3):
            assert nv.nerve_level(p, n) == brute_force_level(p, n)

    def test_sorted_and_unique(self, K):
        level = nv.nerve_level(K, 4)
        assert level == sorted(set(level))

    def test_budget(self, K):
        with pytest.raises(BudgetExceeded):
            nv.nerve_level(K, 5, budget=50)

    def test_printing_suppresses_empty_set(self, K):
        assert nv.format_tuple(K, (0, 1, 1, 0)) == "1,1,0"

    def test_partial_monoid_levels_are_defined_tuples(self):
        for M in [pl.psi_f1(), pl.power_set(1), pl.z_mod(3)]:
            for n in range(4):
                expected = 0
                for t in itertools.product(range(len(M)), repeat=n):
                    acc = 1  # mask of {unit}
                    for a in t:
                        acc = M.sum_sets(acc, 1 << a)
                    expected += acc != 0
                assert len(nv.nerve_level(M, n)) == expected

    def test_strict_injection_gives_injection_on_levels(self, F1, K):
        f = pl.PlasmaMorphism(F1, K, (0, 1))
        for n in range(4):
            images = {tuple(f.map[v] for v in x) for x in nv.nerve_level(F1, n)}
            assert len(images) == len(nv.nerve_level(F1, n))
            assert images <= set(nv.nerve_level(K, n))


class TestActions:
    @pytest.mark.parametrize("name", ["krasner", "psi_f1", "power_set(2)", "z_mod(2)"])
    def test_level_two_identifications(self, name):
        M = pl.build_plasma(name)
        X = nv.nerve_module(M, 2)
        assert X.size(0) == 1
        assert [x[1] for x in X.sets[1]] == list(range(len(M)))
        triples = {(x[1], x[2], x[3]) for x in X.sets[2]}
        assert triples == {(a, b, c) for a in range(len(M)) for b in range(len(M)) for c in range(len(M)) if M.sum(a, b) >> c & 1}
        for phi, pick in [(fs.rho(2, 1), 1), (fs.rho(2, 2), 2), (fs.ALPHA, 3)]:
            got = [X.sets[1][i][1] for i in X.act(phi)]
            assert got == [x[pick] for x in X.sets[2]]

    def test_tau_swaps(self, K):
        for x in nv.nerve_level(K, 2):
            assert nv.nerve_action(K, fs.TAU, x) == (0, x[2], x[1], x[3])

    def test_identity_acts_trivially(self, K):
        for x in nv.nerve_level(K, 3):
            assert nv.nerve_action(K, fs.identity(3), x) == x

    def test_module_is_functorial(self, K):
        assert fm.check_functoriality(nv.nerve_module(K, 4))

    @settings(max_examples=15, deadline=None)
    @given(plasmas(3))
    def test_random_nerves_are_functorial(self, p):
        assert fm.check_functoriality(nv.nerve_module(p, 3))

    def test_vector_table_matches_scalar_action(self, K):
        X = nv.nerve_module(K, 3)
        for phi in fs.enumerate_pointed_maps(3, 2):
            expected = [X.index(2, nv.nerve_action(K, phi, x)) for x in X.sets[3]]
            assert X.act(phi).tolist() == expected

    def test_truncation_of_nerve_is_identity(self):
        for M in [pl.krasner(), pl.psi_f1(), pl.power_set(2), pl.linear_tree(2)]:
            assert fm.psi_truncate(nv.nerve_module(M, 2)) == M


class TestMorphisms:
    def test_identity(self, K):
        X = nv.nerve_module(K, 3)
        f = nv.nerve_of_morphism(pl.PlasmaMorphism.identity(K), 3, X, X)
        assert f == fm.ModuleMorphism.identity(X)

    def test_zero_map(self, K):
        f = nv.nerve_of_morphism(pl.PlasmaMorphism(K, K, (0, 0)), 3)
        assert all(set(c) == {0} for c in f.components)

    def test_free_into_krasner_level_two(self, F1, K):
        f = nv.nerve_of_morphism(pl.PlasmaMorphism(F1, K, (0, 1)), 2)
        assert len(f[2]) == 3 and len(set(f[2])) == 3
        assert f.target.size(2) == 5
        assert fm.is_natural(f)


class TestAdjunction:
    @pytest.mark.parametrize("M", ["krasner", "psi_f1", "boolean"])
    def test_f1_source(self, M):
        rep = nv.adjunction_check(fm.f1_module(3), pl.build_plasma(M))
        assert rep.ok and rep.plas_count == rep.mod_count == 2

    def test_corepresented_into_free(self):
        rep = nv.adjunction_check(fm.corepresented_module(2, 3), pl.psi_f1())
        assert rep.ok and rep.plas_count == 3

    def test_nerve_source_counit(self, K):
        rep = nv.adjunction_check(nv.nerve_module(K, 3), K)
        assert rep.ok and rep.counit_identity and rep.triangle_plasma and rep.triangle_module

    @pytest.mark.parametrize("X", [lambda: fm.f1_module(3), lambda: fm.corepresented_module(2, 3)])
    def test_unit_is_natural(self, X):
        X = X()
        assert fm.is_natural(nv.adjunction_unit(X))

    def test_unit_on_nerve_is_identity(self, K):
        H = nv.nerve_module(K, 3)
        assert nv.adjunction_unit(H, H) == fm.ModuleMorphism.identity(H)


class TestCorepresentability:
    @pytest.mark.parametrize("M", ["krasner", "psi_f1", "power_set(1)", "z_mod(2)"])
    @pytest.mark.parametrize("n", range(4))
    def test_bijection(self, M, n):
        M = pl.build_plasma(M)
        rep = nv.corepresentability_check(M, n)
        assert rep.ok
        assert rep.hom_count == rep.nerve_count == len(nv.nerve_level(M, n))

    def test_power_set_1_at_level_2(self):
        rep = nv.corepresentability_check(pl.power_set(1), 2)
        assert rep.hom_count == rep.nerve_count == 3

    def test_level_zero(self, K):
        rep = nv.corepresentability_check(K, 0)
        assert rep.hom_count == rep.nerve_count == 1

    @settings(max_examples=20, deadline=None)
    @given(plasmas(3))
    def test_random(self, p):
        assert nv.corepresentability_check(p, 2).ok


class TestSegal:
    @pytest.mark.parametrize("M", ["krasner", "psi_f1", "power_set(2)"])
    def test_nerves_pass(self, M):
        rep = nv.segal_check(nv.nerve_module(pl.build_plasma(M), 3))
        assert rep.ok and rep.agree

    @pytest.mark.parametrize("A", ["z_mod(2)", "boolean"])
    def test_eilenberg_maclane_passes(self, A):
        rep = nv.segal_check(nv.eilenberg_maclane(pl.build_plasma(A), 4))
        assert rep.ok and rep.agree

    def test_patched_level_three_fails(self):
        X = fm.f1_module(4)
        sets = list(X.sets)
        sets[3] = tuple(range(5))
        tables = {}
        for n in range(5):
            for m in range(5):
                t = X.table(n, m)
                if n == 3:
                    t = np.concatenate([t, np.zeros((t.shape[0], 1), dtype=np.int64)], axis=1)
                tables[(n, m)] = t
        bad = fm.TabulatedModule(sets, tables)
        rep = nv.segal_check(bad)
        assert not rep.iso_form and not rep.pullback_form and rep.agree
        assert rep.iso_form.witness

    def test_submodule_generated_by_level_two_fails(self, K):
        # a genuine module sharing levels 1 and 2 with the nerve, but too small above
        X = fm.generated_submodule(nv.nerve_module(K, 3), 2)
        assert X.sizes() == (1, 2, 5, 10)
        assert fm.check_functoriality(X)
        assert fm.psi_truncate(X) == K
        rep = nv.segal_check(X)
        assert not rep.iso_form and not rep.pullback_form and rep.agree
        assert "9 of 19" in rep.iso_form.witness

    def test_f1_is_segal(self):
        # F1 is the nerve of the free plasma
        rep = nv.segal_check(fm.f1_module(4))
        assert rep.ok

    def test_wedge_of_f1_is_a_nerve(self):
        # two free generators whose sum is empty
        W = fm.wedge_sum(fm.f1_module(3), 2)
        rep = nv.segal_check(W)
        assert rep.ok
        P = fm.psi_truncate(W)
        assert len(P) == 3 and P.sum(1, 2) == 0

    def test_corepresented_is_segal(self):
        rep = nv.segal_check(fm.corepresented_module(2, 3))
        assert rep.ok and rep.agree


class TestEilenbergMacLane:
    def test_sizes(self):
        assert nv.eilenberg_maclane(pl.z_mod(2), 4).sizes() == (1, 2, 4, 8, 16)

    def test_alpha_adds(self):
        Z = pl.z_mod(3)
        X = nv.eilenberg_maclane(Z, 2)
        for i, (a, b) in enumerate(X.sets[2]):
            assert X.sets[1][X.apply(fs.ALPHA, i)] == ((a + b) % 3,)

    def test_functorial(self):
        assert fm.check_functoriality(nv.eilenberg_maclane(pl.z_mod(3), 3))

    def test_truncation_recovers_monoid(self):
        for A in [pl.z_mod(2), pl.z_mod(3), pl.boolean()]:
            assert fm.psi_truncate(nv.eilenberg_maclane(A, 2)) == A

    def test_rejects_non_monoids(self, K):
        with pytest.raises(fm.ModuleError):
            nv.eilenberg_maclane(K, 2)

    @pytest.mark.parametrize("A", ["z_mod(2)", "z_mod(3)", "boolean"])
    def test_matches_nerve(self, A):
        assert nv.compare_em_nerve(pl.build_plasma(A), 4 if A != "z_mod(3)" else 3)


def test_nerve_of_free_plasma_is_f1():
    f, res = nv.f1_nerve_isomorphism(4)
    assert res
    assert f.source.sizes() == (1, 2, 3, 4, 5)
