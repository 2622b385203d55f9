import numpy as np
import pytest

from gct.groups import FiniteAbelianGroup
from gct.laws import (ObservablePair, check_coherence, check_complementarity,
                      check_enough_classical_points, check_exponent_law,
                      check_frobenius, check_sharpness_implies_sc,
                      check_strong_complementarity, coherify,
                      gray_subgroup_table, group_algebra_pair,
                      max_two_sc_check, qubit_pair, scaled_gray_points)
from gct.observables import ObservableStructure
from gct.service.ops import frel2_pair


def y_basis_observable() -> ObservableStructure:
    s = 1 / np.sqrt(2)
    return ObservableStructure.from_copy_basis(
        "black", [np.array([s, 1j * s]), np.array([s, -1j * s])])


class TestFrobenius:
    def test_qubit_copy_structures(self, zx):
        assert check_frobenius(zx.white).passed
        assert check_frobenius(zx.gray).passed

    def test_frel_gray_structure(self):
        pair = frel2_pair()
        rep = check_frobenius(pair.gray)
        assert rep.passed
        assert all(r.max_deviation == 0.0 for r in rep.results)

    def test_group_algebra_white(self):
        for factors in ((2,), (3,), (2, 2)):
            pair = group_algebra_pair(FiniteAbelianGroup(factors))
            assert check_frobenius(pair.white).passed


class TestCoherence:
    def test_qubit_scalar_is_sqrt2(self, zx):
        rep = check_coherence(zx)
        assert rep.passed
        scalar = rep.result("unit-overlap-cancellable").scalar
        assert abs(scalar - np.sqrt(2)) <= 1e-9

    def test_misaligned_pair_fails_and_names_unit(self, zx):
        # rotate the gray basis so its unit no longer copies
        theta = 0.4
        c, s = np.cos(theta), np.sin(theta)
        rot = ObservableStructure.from_copy_basis(
            "gray", [np.array([c, s]) / 1.0, np.array([-s, c])])
        rep = check_coherence(ObservablePair(zx.white, rot))
        assert not rep.passed
        failing = [r.name for r in rep.results if not r.passed]
        assert any("unit" in name for name in failing)

    def test_spek_pair_coherent(self, spek):
        assert check_coherence(spek.extras["pair"]).passed


class TestComplementarity:
    def test_zx_pair(self, zx):
        rep = check_complementarity(zx)
        assert rep.passed
        assert rep.result("mutually-unbiased-points").passed

    def test_zz_fails_hopf(self, zx):
        rep = check_complementarity(ObservablePair(zx.white, zx.white))
        assert not rep.result("hopf-law").passed

    def test_frel2_exact(self):
        rep = check_complementarity(frel2_pair())
        assert rep.passed
        assert all(r.max_deviation == 0.0 for r in rep.results)

    def test_spek_pair(self, spek):
        assert check_complementarity(spek.extras["pair"]).passed


class TestStrongComplementarity:
    def test_qubit_pair(self, zx):
        assert check_strong_complementarity(zx).passed

    def test_antipode_is_identity_for_qubit_pair(self, zx):
        assert np.allclose(zx.antipode().data, np.eye(2), atol=1e-12)

    def test_group_algebra_pairs(self):
        for factors in ((2,), (3,), (4,), (2, 2)):
            pair = group_algebra_pair(FiniteAbelianGroup(factors))
            rep = check_strong_complementarity(pair)
            assert rep.passed, rep.to_text()
            assert rep.result("implies-complementarity").passed

    def test_perturbed_pair_flagged_not_sc(self, zx):
        # a complementarity-preserving basis rephasing that breaks coherence
        eps = 0.1
        s = 1 / np.sqrt(2)
        gray = ObservableStructure.from_copy_basis(
            "gray", [np.array([s, s * np.exp(1j * eps)]),
                     np.array([s, -s * np.exp(1j * eps)])])
        rep = check_strong_complementarity(ObservablePair(zx.white, gray))
        assert not rep.passed

    def test_spek_pair_strongly_complementary(self, spek):
        assert check_strong_complementarity(spek.extras["pair"]).passed


class TestSubgroup:
    def test_scaled_gray_points_reproduce_group_table(self):
        for factors in ((2,), (3,), (4,), (2, 2)):
            g = FiniteAbelianGroup(factors)
            pair = group_algebra_pair(g)
            table = gray_subgroup_table(pair)
            elems = list(g.elements())
            want = [[(a + b).index() for b in elems] for a in elems]
            assert table == want

    def test_scaled_points_are_phases(self):
        from gct.observables import is_phase

        pair = group_algebra_pair(FiniteAbelianGroup((3,)))
        for p in scaled_gray_points(pair):
            assert is_phase(pair.white, p)


class TestExponentLaw:
    def test_qubit_k2(self, zx):
        assert check_exponent_law(zx, 2).passed

    def test_z3(self):
        pair = group_algebra_pair(FiniteAbelianGroup((3,)))
        assert check_exponent_law(pair, 3).passed
        assert not check_exponent_law(pair, 2).passed

    def test_group_order_always_works(self):
        for factors in ((2,), (3,), (4,), (2, 2)):
            g = FiniteAbelianGroup(factors)
            pair = group_algebra_pair(g)
            assert check_exponent_law(pair, g.order).passed
            assert check_exponent_law(pair, g.exponent).passed


class TestMaxTwo:
    def test_triple_triggers_rank_contradiction(self, zx):
        rep = max_two_sc_check([zx.white, zx.gray, y_basis_observable()])
        assert not rep.passed
        note = rep.results[0].note
        assert "rank" in note

    def test_pair_alone_consistent(self, zx):
        assert max_two_sc_check([zx.white, zx.gray]).passed

    def test_dimension_one_vacuous(self):
        one = ObservableStructure.from_copy_basis("w", [np.array([1.0])])
        rep = max_two_sc_check([one, one, one])
        assert rep.passed
        assert "dimension 1" in rep.results[0].note


class TestEnoughClassicalPoints:
    def test_qubit_copy_has_enough(self, zx):
        assert check_enough_classical_points(zx.white)

    def test_single_point_not_enough(self):
        obs = ObservableStructure.from_copy_basis(
            "w", [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        obs.points = obs.points[:1]
        assert not check_enough_classical_points(obs)

    def test_spek_white_decided_exhaustively(self, spek):
        w = spek.models["spek"].observables["white"]
        # two classical points cannot separate all relations out of a 4-set
        assert check_enough_classical_points(w, max_target=2) is False

    def test_frel2_copy_has_enough(self):
        pair = frel2_pair()
        assert check_enough_classical_points(pair.white, max_target=2)


class TestCoherify:
    def test_standard_zx_bases(self):
        z = [np.array([1.0, 0]), np.array([0, 1.0])]
        s = 1 / np.sqrt(2)
        x = [np.array([s, s]), np.array([s, -s])]
        pair = coherify(z, x)
        assert check_coherence(pair).passed

    def test_idempotent_on_coherent_input(self, zx):
        z = [p.data.reshape(-1) for p in zx.white.points]
        x = [p.data.reshape(-1) for p in zx.gray.points]
        pair = coherify(z, x)
        for built, orig in ((pair.white, zx.white), (pair.gray, zx.gray)):
            assert built.mult.max_deviation(orig.mult) <= 1e-12

    def test_z_and_y_bases(self):
        z = [np.array([1.0, 0]), np.array([0, 1.0])]
        s = 1 / np.sqrt(2)
        y = [np.array([s, 1j * s]), np.array([s, -1j * s])]
        pair = coherify(z, y)
        rep = check_coherence(pair)
        assert rep.passed, rep.to_text()

    def test_rejects_biased_bases(self):
        z = [np.array([1.0, 0]), np.array([0, 1.0])]
        with pytest.raises(ValueError):
            coherify(z, z)


class TestSharpness:
    def test_qubit_pair(self, zx):
        rep = check_sharpness_implies_sc(zx)
        assert rep.passed
        assert rep.result("implies-strong-complementarity").passed

    def test_group_pairs(self):
        for factors in ((3,), (2, 2)):
            pair = group_algebra_pair(FiniteAbelianGroup(factors))
            assert check_sharpness_implies_sc(pair).passed

    def test_non_coherent_pair_reports_precondition(self, zx):
        eps = 0.7
        s = 1 / np.sqrt(2)
        gray = ObservableStructure.from_copy_basis(
            "gray", [np.array([s, s * np.exp(1j * eps)]),
                     np.array([s, -s * np.exp(1j * eps)])])
        rep = check_sharpness_implies_sc(ObservablePair(zx.white, gray))
        assert not rep.passed
        assert not rep.result("precondition-coherence").passed
