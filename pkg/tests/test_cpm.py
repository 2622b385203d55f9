import numpy as np
import pytest

from gct.cpm import (BornVector, CpmError, decoherence, double, kraus_cpm,
                     measure, name_to_density, phased_measurement, prepare,
                     state_from_density)
from gct.diagram import Diagram
from gct.groups import Angle, Param
from gct.model import interpret
from gct.tensor import Tensor


def random_density(rng, d=2):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestDoubling:
    def test_double_identity(self):
        dd = double(Tensor.identity((2,)))
        assert np.allclose(dd.matrix, np.eye(4))

    def test_double_of_point_is_projector_name(self):
        dd = double(Tensor.point([1, 0]))
        assert np.allclose(dd.state_name(), [1, 0, 0, 0])  # name of |0><0|

    def test_double_tracks_bpb_dagger(self, qucirc):
        sig, m = qucirc.signature, qucirc.model("qubit")
        gate = interpret(Diagram.generator(sig, "X", phase=Param(np.pi / 2)), m)
        rho0 = np.array([[1, 0], [0, 0]], dtype=complex)
        out = name_to_density(double(gate).matrix @ rho0.reshape(-1))
        want = gate.data @ rho0 @ gate.data.conj().T
        assert np.allclose(out, want)
        assert np.trace(out) == pytest.approx(1.0)

    def test_double_from_diagram_with_binding(self, qucirc):
        sig, m = qucirc.signature, qucirc.model("qubit")
        d = Diagram.generator(sig, "Z", phase=Param(0.4))
        assert np.allclose(double(d, m).matrix,
                           double(interpret(d, m)).matrix)

    def test_doubling_is_multiplicative(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            f = Tensor(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)),
                       (2,), (2,))
            g = Tensor(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)),
                       (2,), (2,))
            lhs = double(f.then(g)).matrix
            rhs = double(g).matrix @ double(f).matrix
            assert np.abs(lhs - rhs).max() <= 1e-9
            lhs_t = double(f.tensor(g)).matrix
            # tensor of doubles agrees after regrouping name indices
            fd, gd = double(f), double(g)
            assert np.allclose(sorted(np.abs(lhs_t).reshape(-1)),
                               sorted(np.abs(np.kron(fd.matrix,
                                                     gd.matrix)).reshape(-1)))


class TestKraus:
    def test_single_map_equals_double(self):
        b = Tensor([[0, 1], [1, 0]], (2,), (2,))
        assert np.allclose(kraus_cpm([b]).matrix, double(b).matrix)

    def test_projector_pair_gives_decoherence(self, zx):
        k0 = Tensor([[1, 0], [0, 0]], (2,), (2,))
        k1 = Tensor([[0, 0], [0, 1]], (2,), (2,))
        chan = kraus_cpm([k0, k1])
        assert np.allclose(chan.matrix, decoherence(zx.white).matrix)
        assert np.allclose(chan.matrix @ chan.matrix, chan.matrix)

    def test_dephasing_mixes_plus_state(self):
        s = np.sqrt(0.5)
        chan = kraus_cpm([Tensor(s * np.eye(2), (2,), (2,)),
                          Tensor(s * np.diag([1, -1]), (2,), (2,))])
        plus = np.array([[0.5, 0.5], [0.5, 0.5]])
        out = name_to_density(chan.matrix @ plus.reshape(-1))
        assert np.allclose(out, np.eye(2) / 2)

    def test_positivity_and_trace_on_random_states(self):
        rng = np.random.default_rng(5)
        maps = [Tensor(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)),
                       (2,), (2,)) for _ in range(3)]
        chan = kraus_cpm(maps)
        for _ in range(100):
            rho = random_density(rng)
            out = name_to_density(chan.matrix @ rho.reshape(-1))
            eig = np.linalg.eigvalsh(out)
            assert eig.min() >= -1e-9
            # trace scales by a state-independent bound
            assert np.trace(out).real <= np.trace(out).real + 1e-9

    def test_shape_mismatch(self):
        with pytest.raises(CpmError):
            kraus_cpm([Tensor.identity((2,)), Tensor.point([1, 0])])


class TestMeasurement:
    def test_plus_state_in_z(self, zx):
        rho = np.array([[0.5, 0.5], [0.5, 0.5]])
        b = measure(zx.white, rho)
        assert np.allclose(b.probs, [0.5, 0.5])

    def test_eigenstate(self, zx):
        b = measure(zx.white, np.array([[1, 0], [0, 0]]))
        assert np.allclose(b.probs, [1.0, 0.0])

    def test_random_states_give_born_vectors(self, zx):
        rng = np.random.default_rng(11)
        for _ in range(100):
            b = measure(zx.white, random_density(rng))
            assert b.is_valid(tol=1e-9)
            assert (b.probs >= -1e-12).all()

    def test_unnormalized_rejected_unless_rescaled(self, zx):
        rho = np.array([[2.0, 0], [0, 0]])
        with pytest.raises(CpmError):
            measure(zx.white, rho)
        b = measure(zx.white, rho, rescale=True)
        assert np.allclose(b.probs, [1.0, 0.0])


class TestPrepare:
    def test_point_mass(self, zx):
        st = prepare(BornVector(np.array([1.0, 0.0]), "white"), zx.white)
        assert np.allclose(name_to_density(st.state_name()),
                           [[1, 0], [0, 0]])

    def test_round_trip(self, zx):
        b = BornVector(np.array([0.3, 0.7]), "white")
        st = prepare(b, zx.white)
        again = measure(zx.white, st)
        assert np.abs(again.probs - b.probs).max() <= 1e-9

    def test_uniform_gives_maximally_mixed(self, zx):
        st = prepare(BornVector(np.array([0.5, 0.5]), "white"), zx.white)
        assert np.allclose(name_to_density(st.state_name()), np.eye(2) / 2)

    def test_sqrt_prob_state_realizes_any_distribution(self, zx):
        # the converse construction: a pure state with sqrt(p) amplitudes
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = rng.dirichlet([1, 1])
            psi = np.sqrt(p[0]) * np.array([1, 0]) + np.sqrt(p[1]) * np.array([0, 1])
            rho = np.outer(psi, psi.conj())
            b = measure(zx.white, rho)
            assert np.abs(b.probs - p).max() <= 1e-9

    def test_invalid_born_vector_rejected(self, zx):
        with pytest.raises(CpmError):
            prepare(BornVector(np.array([0.7, 0.7]), "white"), zx.white)


class TestPhasedMeasurement:
    def test_alpha_zero_is_gray_measurement(self, zx):
        rho = np.array([[0.5, 0.5], [0.5, 0.5]])  # |+><+|
        b = phased_measurement(zx, Angle(0.0), rho)
        assert np.allclose(b.probs, [1.0, 0.0])

    def test_quarter_turn_is_y_measurement(self, zx):
        psi = np.array([1, 1j]) / np.sqrt(2)
        rho = np.outer(psi, psi.conj())
        b = phased_measurement(zx, Angle(np.pi / 2), rho)
        assert np.allclose(b.probs, [1.0, 0.0], atol=1e-12)

    def test_rotation_round_trip_preserves_born_vectors(self, zx):
        rng = np.random.default_rng(9)
        from gct.observables import phase_action

        for _ in range(20):
            rho = random_density(rng)
            a = Angle(rng.uniform(0, 2 * np.pi))
            lam = phase_action(zx.white, zx.white.phase_point(a)).data
            rot = lam @ rho @ lam.conj().T
            b1 = phased_measurement(zx, a, rot)
            b2 = phased_measurement(zx, Angle(0.0), rho)
            assert np.abs(b1.probs - b2.probs).max() <= 1e-9

    def test_non_coherent_pair_rejected(self, zx):
        from gct.laws import ObservablePair
        from gct.observables import ObservableStructure

        s = 1 / np.sqrt(2)
        crooked = ObservableStructure.from_copy_basis(
            "gray", [np.array([s, s * np.exp(0.3j)]),
                     np.array([s, -s * np.exp(0.3j)])])
        with pytest.raises(CpmError):
            phased_measurement(ObservablePair(zx.white, crooked),
                               Angle(0.0), np.eye(2) / 2)


class TestDecoherence:
    def test_kills_off_diagonals(self, zx):
        rho = np.array([[0.5, 0.5], [0.5, 0.5]])
        out = name_to_density(decoherence(zx.white).matrix @ rho.reshape(-1))
        assert np.allclose(out, np.eye(2) / 2)

    def test_fixes_eigenstates(self, zx):
        rho = np.array([[1, 0], [0, 0]], dtype=complex)
        out = name_to_density(decoherence(zx.white).matrix @ rho.reshape(-1))
        assert np.allclose(out, rho)

    def test_idempotent(self, zx):
        m = decoherence(zx.white).matrix
        assert np.abs(m @ m - m).max() <= 1e-12

    def test_equals_prepare_after_measure(self, zx):
        from gct.cpm import measure_matrix, prepare_matrix

        assert np.allclose(decoherence(zx.white).matrix,
                           prepare_matrix(zx.white) @ measure_matrix(zx.white))


def test_state_wrapper_and_composition(zx):
    rho = np.array([[0.25, 0], [0, 0.75]])
    st = state_from_density(rho)
    dec = decoherence(zx.white)
    out = st.then(dec)
    assert out.is_state
    assert np.allclose(name_to_density(out.state_name()), rho)
    two = dec.tensor(dec)
    assert two.dom == (("q", 2), ("q", 2))


def test_born_vector_prints_labelled_probabilities(zx):
    rho = np.array([[0.25, 0], [0, 0.75]])
    b = measure(zx.white, rho)
    text = b.to_text()
    assert "born vector over white" in text
    assert "0: 0.25" in text and "1: 0.75" in text
