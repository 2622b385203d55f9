import itertools
import random

import numpy as np
import pytest

from gct.diagram import Diagram, compose, cup, tensor, tensor_many
from gct.groups import Param
from gct.model import (DimensionOverflow, ModelBinding, UnassignedGenerator,
                       check_soundness, interpret, scalar_monoid,
                       semantically_equal)
from gct.tensor import Tensor
from gct.theories import rep_binding

from conftest import random_qucirc_diagram


def gen(sig, name, **kw):
    return Diagram.generator(sig, name, **kw)


def test_headline_amplitude(qucirc):
    sig, m = qucirc.signature, qucirc.model("qubit")
    d = compose(compose(gen(sig, "ket0"), gen(sig, "X", phase=Param(np.pi / 2))),
                gen(sig, "bra1"))
    val = interpret(d, m).scalar_value()
    assert abs(val - (-1j / np.sqrt(2))) < 1e-12


def test_identity_interprets_to_identity(qucirc):
    m = qucirc.model("qubit")
    t = interpret(Diagram.identity(qucirc.signature, ("Q",)), m)
    assert np.allclose(t.data, np.eye(2))


def test_teleportation_is_identity(qucirc):
    sig, m = qucirc.signature, qucirc.model("qubit")
    wire = Diagram.identity(sig, ("Q",))
    from gct.diagram import cap
    tele = compose(tensor(wire, cup(sig, "Q")), tensor(cap(sig, "Q"), wire))
    assert np.allclose(interpret(tele, m).data, np.eye(2))
    # composing with a prepared state teleports it
    psi = compose(gen(sig, "ket0"), gen(sig, "X", phase=Param(0.77)))
    out = interpret(compose(psi, tele), m)
    assert out.max_deviation(interpret(psi, m)) < 1e-12


class TestFunctoriality:
    def test_compose_is_matmul_tensor_is_kron(self, qucirc):
        sig, m = qucirc.signature, qucirc.model("qubit")
        rng = random.Random(7)
        names = ["Z", "X", "CX", "ket0", "ket1", "bra0", "bra1"]
        checked = 0
        while checked < 200:
            a = rng.choice(names)
            b = rng.choice(names)
            da = gen(sig, a, phase=Param(rng.uniform(0, 6))
                     if sig.gen(a).phased else None)
            db = gen(sig, b, phase=Param(rng.uniform(0, 6))
                     if sig.gen(b).phased else None)
            ta, tb = interpret(da, m), interpret(db, m)
            tt = interpret(tensor(da, db), m)
            assert np.allclose(tt.data, np.kron(ta.data, tb.data))
            if da.cod == db.dom:
                tc = interpret(compose(da, db), m)
                assert np.allclose(tc.data, tb.data @ ta.data)
            checked += 1

    def test_dagger_is_conjugate_transpose(self, qucirc):
        from gct.diagram import dagger

        sig, m = qucirc.signature, qucirc.model("qubit")
        rng = random.Random(13)
        for _ in range(60):
            d = random_qucirc_diagram(sig, rng)
            td = interpret(dagger(d), m)
            t = interpret(d, m)
            assert np.allclose(td.data, t.data.conj().T, atol=1e-12)

    def test_dagger_is_relational_converse(self, spek):
        from gct.diagram import dagger

        sig, m = spek.signature, spek.model("spek")
        d = compose(gen(sig, "z0"), gen(sig, "p1230"))
        td = interpret(dagger(d), m)
        t = interpret(d, m)
        assert np.array_equal(td.data, t.data.T)


def test_partition_independence(qucirc):
    sig, m = qucirc.signature, qucirc.model("qubit")
    rng = random.Random(99)
    for _ in range(25):
        d = random_qucirc_diagram(sig, rng)
        ref = interpret(d, m)
        for seed in range(4):
            alt = interpret(d, m, rng=random.Random(seed))
            assert ref.max_deviation(alt) <= 1e-12


def test_unitarity_of_gates(qucirc):
    sig, m = qucirc.signature, qucirc.model("qubit")
    for name, phase in [("Z", Param(0.3)), ("X", Param(1.2)), ("CX", None)]:
        u = interpret(gen(sig, name, phase=phase), m).data
        assert np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=1e-12)
        assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12)


def test_frel_unitaries_are_exactly_permutations():
    # exhaustive over all relations on sets of size <= 4
    for size in (1, 2, 3, 4):
        eye = np.eye(size, dtype=np.bool_)
        count = 0
        for bits in itertools.product([False, True], repeat=size * size):
            r = np.array(bits, dtype=np.bool_).reshape(size, size)
            ri = (r.astype(np.uint8) @ r.T.astype(np.uint8)) > 0
            ir = (r.T.astype(np.uint8) @ r.astype(np.uint8)) > 0
            unitary = np.array_equal(ri, eye) and np.array_equal(ir, eye)
            is_perm = (r.sum(axis=0) == 1).all() and (r.sum(axis=1) == 1).all()
            assert unitary == is_perm
            count += 1
        assert count == 2 ** (size * size)


def test_frel_inner_product_zero_iff_disjoint(spek):
    # subsets of a 3-element set, exhaustively
    def subset_tensor(elems):
        v = np.zeros((3, 1), dtype=np.bool_)
        for e in elems:
            v[e, 0] = True
        return Tensor(v, (), (3,))

    universe = [set(s) for k in range(4) for s in itertools.combinations(range(3), k)]
    for a in universe:
        for b in universe:
            ip = subset_tensor(a).dagger().data.astype(np.uint8) @ \
                subset_tensor(b).data.astype(np.uint8)
            assert bool(ip[0, 0]) == bool(a & b)


def test_scalar_monoid(qucirc, spek):
    assert scalar_monoid(qucirc.model("qubit"))["name"] == "complex field"
    bool_desc = scalar_monoid(spek.model("spek"))
    assert bool_desc["carrier"] == [0, 1]
    assert bool_desc["table"]["1*1"] == 1
    # empty diagram evaluates to the multiplicative unit
    assert interpret(Diagram.empty(qucirc.signature),
                     qucirc.model("qubit")).scalar_value() == 1.0
    assert interpret(Diagram.empty(spek.signature),
                     spek.model("spek")).scalar_value() is True


def test_soundness_of_boolcirc_rules(boolcirc):
    rep_b = check_soundness(boolcirc.rules, boolcirc.model("B"))
    assert rep_b.all_sound
    rep_p = check_soundness(boolcirc.rules, boolcirc.model("P"))
    by_name = {e.rule_name: e for e in rep_p.entries}
    assert by_name["and-over-or"].sound
    assert not by_name["de-morgan"].sound
    assert by_name["de-morgan"].witness is not None
    # the witness names a concrete input where the two sides differ
    assert by_name["de-morgan"].witness["input"] in ([0, 1], [1, 0], [1, 1], [0, 0])


def test_soundness_spider_fusion_rule(psig, pbind):
    from gct.rewrite import RewriteRule
    from gct.groups import Angle

    a, b = Angle(0.4), Angle(1.1)
    lhs = compose(Diagram.spider(psig, "white", 1, 1, a),
                  Diagram.spider(psig, "white", 1, 1, b))
    rhs = Diagram.spider(psig, "white", 1, 1, a + b)
    rep = check_soundness([RewriteRule("fuse-sample", lhs, rhs)], pbind)
    assert rep.all_sound


def test_unassigned_generator_error(qucirc):
    sig = qucirc.signature
    m = ModelBinding("partial", "complex", {"Q": 2}, {})
    with pytest.raises(UnassignedGenerator):
        interpret(gen(sig, "ket0"), m)


def test_dimension_guard(qucirc):
    sig = qucirc.signature
    m = qucirc.model("qubit")
    small = ModelBinding(m.name, m.semiring, m.dims, m.gens,
                         observables=m.observables, dim_cap=4)
    wide = tensor_many(sig, [gen(sig, "ket0")] * 4)
    with pytest.raises(DimensionOverflow):
        interpret(wide, small)


def test_semantically_equal_up_to_scalar(qucirc):
    sig, m = qucirc.signature, qucirc.model("qubit")
    d1 = gen(sig, "Z", phase=Param(np.pi))
    # a full X turn is -identity: equal only up to the global scalar -1
    d2 = compose(gen(sig, "X", phase=Param(2 * np.pi)),
                 gen(sig, "Z", phase=Param(np.pi)))
    assert not semantically_equal(d1, d2, m)
    assert semantically_equal(d1, d2, m, mode="up_to_global_scalar")


def test_symgrp_representation_is_permutation_matrices():
    import itertools as it

    from gct.theories import symgrp_fixture

    fx = symgrp_fixture()
    sig = fx.signature
    m = rep_binding(2)
    for perm in it.permutations(range(3)):
        d = Diagram.permutation(sig, ("u",) * 3, list(perm))
        t = interpret(d, m).data
        # block permutation matrix acting on (C^2)^3
        vec = np.arange(8)
        digits = [(vec // 4) % 2, (vec // 2) % 2, vec % 2]
        for x in range(8):
            bits = [(x >> (2 - k)) & 1 for k in range(3)]
            out_bits = [bits[perm[j]] for j in range(3)]
            y = (out_bits[0] << 2) | (out_bits[1] << 1) | out_bits[2]
            assert t[y, x] == 1.0
    # composition of permutation diagrams = product of matrices
    s = Diagram.permutation(sig, ("u",) * 3, [1, 0, 2])
    c = Diagram.permutation(sig, ("u",) * 3, [0, 2, 1])
    lhs = interpret(compose(s, c), m).data
    rhs = interpret(c, m).data @ interpret(s, m).data
    assert np.allclose(lhs, rhs)
