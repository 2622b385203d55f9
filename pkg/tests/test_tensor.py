import numpy as np
import pytest

from gct.tensor import (ShapeMismatch, Tensor, equal_tensors, global_scalar,
                        proportional_to)


def test_compose_is_matrix_product():
    a = Tensor([[1, 2], [3, 4]], (2,), (2,))
    b = Tensor([[0, 1], [1, 0]], (2,), (2,))
    assert np.allclose(a.then(b).data, b.data @ a.data)


def test_tensor_is_kron_row_major():
    # wire 0 is the most significant index
    v = Tensor.point([1, 0])
    w = Tensor.point([0, 1])
    vw = v.tensor(w)
    assert vw.cod == (2, 2)
    assert np.allclose(vw.data.reshape(-1), [0, 1, 0, 0])  # |01>


def test_permutation_routing():
    # swap on dims (2, 3): |x, y> -> |y, x>
    p = Tensor.permutation((2, 3), (1, 0))
    src = np.zeros(6)
    src[1 * 3 + 2] = 1.0  # |x=1, y=2>
    out = p.data @ src
    assert out[2 * 2 + 1] == 1.0  # |y=2, x=1>
    assert p.dom == (2, 3) and p.cod == (3, 2)


def test_permutation_composes_with_inverse():
    p = Tensor.permutation((2, 3, 4), (2, 0, 1))
    q = Tensor.permutation((4, 2, 3), (1, 2, 0))
    assert np.allclose(p.then(q).data, np.eye(24))


def test_dagger_and_trace():
    a = Tensor([[1, 2j], [3, 4]], (2,), (2,))
    assert np.allclose(a.dagger().data, a.data.conj().T)
    assert a.trace_value() == pytest.approx(5 + 0j)


def test_cup_cap():
    cup = Tensor.cup(2)
    assert cup.cod == (2, 2)
    assert np.allclose(cup.data.reshape(-1), [1, 0, 0, 1])
    assert np.allclose(Tensor.cap(2).data, cup.data.T)


def test_bool_semiring_saturates():
    a = Tensor(np.array([[True, True]]), (2,), (1,))
    b = Tensor(np.array([[True], [True]]), (1,), (2,))
    # two paths from input to output saturate to a single truth value
    c = b.then(a)
    assert c.data.dtype == np.bool_
    assert c.data[0, 0]
    with pytest.raises(ShapeMismatch):
        a.scale(2.0)


def test_equal_tensors_modes():
    a = Tensor([[1, 0], [0, 1]], (2,), (2,))
    assert equal_tensors(a, a, mode="exact")
    b = Tensor([[1, 1e-12], [0, 1]], (2,), (2,))
    assert equal_tensors(a, b, mode="tolerance")
    assert not equal_tensors(a, b, mode="exact")
    assert equal_tensors(a.scale(2j), a, mode="up_to_global_scalar")


def test_no_single_scalar_matches_conjugate_phases():
    a = Tensor([[1, 0], [0, 1j]], (2,), (2,))
    b = Tensor([[1, 0], [0, -1j]], (2,), (2,))
    assert global_scalar(a, b) is None


def test_scaled_plus_state_matches_unit():
    s = np.sqrt(2)
    plus = Tensor.point([1 / s, 1 / s])
    unit = Tensor.point([1.0, 1.0])  # dagger of the erase-basis effect
    assert proportional_to(plus.scale(s), unit)
    lam = global_scalar(unit, plus)
    assert lam == pytest.approx(s)


def test_shape_mismatch_raises():
    a = Tensor([[1, 0]], (2,), (1,))
    b = Tensor([[1], [0]], (1,), (2,))
    with pytest.raises(ShapeMismatch):
        equal_tensors(a, b)


def test_to_text_formats():
    t = Tensor([[0.5, -1j]], (2,), (1,))
    text = t.to_text()
    assert "tensor complex" in text
    assert "(0.5,0)" in text and "(0,-1)" in text
    bt = Tensor(np.array([[True, False]]), (2,), (1,))
    assert bt.to_text().splitlines()[1] == "10"


def test_trace_cyclic_random_3x3():
    # direct matrix-computation oracle for cyclicity of the trace
    rng = np.random.default_rng(12)
    for _ in range(20):
        f = Tensor(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)),
                   (3,), (3,))
        g = Tensor(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)),
                   (3,), (3,))
        fg = f.then(g).trace_value()
        gf = g.then(f).trace_value()
        assert abs(fg - gf) <= 1e-9
