"""Built-in theory fixtures: signatures, rules, and model bindings.

Provides the permutation theory, quantum circuits with their qubit
interpretation, boolean circuits with the B (truth table) and P (parity
polynomial) interpretations and their two rewrite rules, the stabilizer
and Spekkens toy fixtures, and the generic two-colour spider signature used
by the rewrite and non-locality machinery.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass, field
from typing import Callable, Optional

from .diagram import Diagram, compose, tensor
from .groups import Angle, FiniteAbelianGroup, GroupElement, Param
from .laws import ObservablePair, group_algebra_pair, qubit_pair
from .model import ModelBinding
from .observables import ObservableStructure
from .rewrite import RewriteRule
from .tensor import Tensor
from .types import (KIND_CAP, KIND_CUP, KIND_SPIDER, GeneratorDecl,
                    Signature, SystemType)


@dataclass
class TheoryFixture:
    signature: Signature
    rules: list[RewriteRule] = field(default_factory=list)
    models: dict[str, ModelBinding] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def model(self, name: Optional[str] = None) -> ModelBinding:
        if name is None:
            if len(self.models) != 1:
                raise KeyError(f"theory {self.signature.name} has models "
                               f"{sorted(self.models)}; pick one")
            return next(iter(self.models.values()))
        if name not in self.models:
            raise KeyError(f"theory {self.signature.name} has no model "
                           f"{name!r}; available: {sorted(self.models)}")
        return self.models[name]


def _dual_gens(type_name: str) -> list[GeneratorDecl]:
    return [
        GeneratorDecl(f"cup_{type_name}", (), (type_name, type_name),
                      kind=KIND_CUP, dagger=f"cap_{type_name}",
                      carrier=type_name),
        GeneratorDecl(f"cap_{type_name}", (type_name, type_name), (),
                      kind=KIND_CAP, dagger=f"cup_{type_name}",
                      carrier=type_name),
    ]


def _spider_gens(carrier: str) -> list[GeneratorDecl]:
    return [
        GeneratorDecl("white", kind=KIND_SPIDER, dagger="white",
                      colour="white", carrier=carrier),
        GeneratorDecl("gray", kind=KIND_SPIDER, dagger="gray",
                      colour="gray", carrier=carrier),
    ]


# -- the permutation theory -------------------------------------------------------


def symgrp_fixture() -> TheoryFixture:
    sig = Signature("symgrp", [SystemType("u")], [])
    return TheoryFixture(sig, models={
        "rep2": rep_binding(2),
        "rep3": rep_binding(3),
    })


def rep_binding(dim: int) -> ModelBinding:
    """The representation sending the basic system to C^dim."""
    return ModelBinding(f"rep{dim}", "complex", {"u": dim})


# -- quantum circuits ----------------------------------------------------------------


def qucirc_signature() -> Signature:
    gens = [
        GeneratorDecl("ket0", (), ("Q",), dagger="bra0"),
        GeneratorDecl("ket1", (), ("Q",), dagger="bra1"),
        GeneratorDecl("bra0", ("Q",), (), dagger="ket0"),
        GeneratorDecl("bra1", ("Q",), (), dagger="ket1"),
        GeneratorDecl("Z", ("Q",), ("Q",), dagger="Z", phased=True),
        GeneratorDecl("X", ("Q",), ("Q",), dagger="X", phased=True),
        GeneratorDecl("CX", ("Q", "Q"), ("Q", "Q"), dagger="CX"),
    ] + _dual_gens("Q") + _spider_gens("Q")
    return Signature("qucirc", [SystemType("Q")], gens)


def _angle_of(node) -> float:
    if node.phase is None:
        return 0.0
    if not isinstance(node.phase, (Angle, Param)):
        raise ValueError(f"{node.gen} takes a real rotation parameter")
    return node.phase.value


def qubit_binding() -> ModelBinding:
    pair = qubit_pair()

    def z_gate(node) -> Tensor:
        a = _angle_of(node)
        return Tensor([[1, 0], [0, np.exp(1j * a)]], (2,), (2,))

    def x_gate(node) -> Tensor:
        a = _angle_of(node)
        c, s = np.cos(a / 2), np.sin(a / 2)
        return Tensor([[c, -1j * s], [-1j * s, c]], (2,), (2,))

    cx = np.eye(4)[:, [0, 1, 3, 2]]
    gens = {
        "ket0": Tensor.point([1, 0]),
        "ket1": Tensor.point([0, 1]),
        "bra0": Tensor.point([1, 0]).dagger(),
        "bra1": Tensor.point([0, 1]).dagger(),
        "Z": z_gate,
        "X": x_gate,
        "CX": Tensor(cx, (2, 2), (2, 2)),
    }
    return ModelBinding("qubit", "complex", {"Q": 2}, gens,
                        observables={"white": pair.white, "gray": pair.gray})


def qucirc_fixture() -> TheoryFixture:
    sig = qucirc_signature()
    return TheoryFixture(sig, models={"qubit": qubit_binding()},
                         extras={"pair": qubit_pair()})


# -- boolean circuits -----------------------------------------------------------------


def boolcirc_signature() -> Signature:
    gens = [
        GeneratorDecl("and", ("b", "b"), ("b",)),
        GeneratorDecl("or", ("b", "b"), ("b",)),
        GeneratorDecl("not", ("b",), ("b",)),
        GeneratorDecl("fan", ("b",), ("b", "b")),
    ]
    return Signature("boolcirc", [SystemType("b")], gens)


def _function_tensor(n_in: int, n_out: int, fn: Callable) -> Tensor:
    """Boolean matrix of a function {0,1}^n -> {0,1}^m."""
    rows, cols = 2 ** n_out, 2 ** n_in
    data = np.zeros((rows, cols), dtype=np.bool_)
    for x in range(cols):
        bits = tuple((x >> (n_in - 1 - k)) & 1 for k in range(n_in))
        out = fn(*bits)
        out = out if isinstance(out, tuple) else (out,)
        y = 0
        for bit in out:
            y = (y << 1) | (bit & 1)
        data[y, x] = True
    return Tensor(data, (2,) * n_in, (2,) * n_out)


def bool_binding_B() -> ModelBinding:
    gens = {
        "and": _function_tensor(2, 1, lambda x, y: x & y),
        "or": _function_tensor(2, 1, lambda x, y: x | y),
        "not": _function_tensor(1, 1, lambda x: 1 - x),
        "fan": _function_tensor(1, 2, lambda x: (x, x)),
    }
    return ModelBinding("B", "bool", {"b": 2}, gens)


def bool_binding_P() -> ModelBinding:
    gens = {
        "and": _function_tensor(2, 1, lambda x, y: x & y),
        "or": _function_tensor(2, 1, lambda x, y: x ^ y),
        "not": _function_tensor(1, 1, lambda x: x),
        "fan": _function_tensor(1, 2, lambda x: (x, x)),
    }
    return ModelBinding("P", "bool", {"b": 2}, gens)


def _boolcirc_rules(sig: Signature) -> list[RewriteRule]:
    g = lambda name: Diagram.generator(sig, name)
    wire = Diagram.identity(sig, ("b",))

    # x AND (y OR z)  =>  (x AND y) OR (x AND z)
    lhs = compose(tensor(wire, g("or")), g("and"))
    spread = tensor(g("fan"), Diagram.identity(sig, ("b", "b")))
    route = Diagram.permutation(sig, ("b", "b", "b", "b"), (0, 2, 1, 3))
    rhs = compose(compose(spread, route), compose(tensor(g("and"), g("and")),
                                                  g("or")))
    distrib = RewriteRule("and-over-or", lhs, rhs)

    # NOT (x AND y)  =>  (NOT x) OR (NOT y)
    lhs2 = compose(g("and"), g("not"))
    rhs2 = compose(tensor(g("not"), g("not")), g("or"))
    demorgan = RewriteRule("de-morgan", lhs2, rhs2)
    return [distrib, demorgan]


def boolcirc_example_circuit(sig: Signature) -> Diagram:
    """(x AND NOT y) OR NOT (y AND z), with a fan-out on y."""
    g = lambda name: Diagram.generator(sig, name)
    wire = Diagram.identity(sig, ("b",))
    step1 = tensor(tensor(wire, g("fan")), wire)
    step2 = tensor(tensor(wire, g("not")), Diagram.identity(sig, ("b", "b")))
    step3 = tensor(g("and"), g("and"))
    step4 = tensor(wire, g("not"))
    return compose(compose(compose(step1, step2), step3), compose(step4, g("or")))


def boolcirc_fixture() -> TheoryFixture:
    sig = boolcirc_signature()
    rules = _boolcirc_rules(sig)
    return TheoryFixture(
        sig, rules=rules,
        models={"B": bool_binding_B(), "P": bool_binding_P()},
        extras={"example_circuit": boolcirc_example_circuit(sig)})


# -- stabilizer fixture -----------------------------------------------------------------


def _stab_points() -> dict[str, Tensor]:
    s = 1 / np.sqrt(2)
    return {
        "z0": Tensor.point([1, 0]),
        "z1": Tensor.point([0, 1]),
        "x0": Tensor.point([s, s]),
        "x1": Tensor.point([s, -s]),
        "y0": Tensor.point([s, 1j * s]),
        "y1": Tensor.point([s, -1j * s]),
    }


def stab_fixture() -> TheoryFixture:
    gens = []
    for p in ("z0", "z1", "x0", "x1", "y0", "y1"):
        gens.append(GeneratorDecl(p, (), ("Q",), dagger=p + "d"))
        gens.append(GeneratorDecl(p + "d", ("Q",), (), dagger=p))
    gens += [
        GeneratorDecl("Zhalf", ("Q",), ("Q",), dagger="Zhalf_dag"),
        GeneratorDecl("Zhalf_dag", ("Q",), ("Q",), dagger="Zhalf"),
        GeneratorDecl("Xhalf", ("Q",), ("Q",), dagger="Xhalf_dag"),
        GeneratorDecl("Xhalf_dag", ("Q",), ("Q",), dagger="Xhalf"),
    ] + _dual_gens("Q") + _spider_gens("Q")
    sig = Signature("stab", [SystemType("Q")], gens)

    points = _stab_points()
    zhalf = Tensor([[1, 0], [0, 1j]], (2,), (2,))
    xhalf = Tensor((np.exp(1j * np.pi / 4) / np.sqrt(2))
                   * np.array([[1, -1j], [-1j, 1]]), (2,), (2,))
    pair = qubit_pair()
    gen_tensors: dict = {"Zhalf": zhalf, "Zhalf_dag": zhalf.dagger(),
                         "Xhalf": xhalf, "Xhalf_dag": xhalf.dagger()}
    for name, t in points.items():
        gen_tensors[name] = t
        gen_tensors[name + "d"] = t.dagger()
    binding = ModelBinding("stab", "complex", {"Q": 2}, gen_tensors,
                           observables={"white": pair.white,
                                        "gray": pair.gray})
    return TheoryFixture(
        sig, models={"stab": binding},
        extras={
            "points": points,
            "pair": pair,
            "phase_candidates": [points[k] for k in
                                 ("x0", "x1", "y0", "y1")] + [pair.white.unit],
        })


# -- Spekkens toy fixture -----------------------------------------------------------------


def _spek_subset(elems) -> Tensor:
    v = np.zeros((4, 1), dtype=np.bool_)
    for e in elems:
        v[e, 0] = True
    return Tensor(v, (), (4,))


def _perm_relation(perm: tuple[int, ...]) -> Tensor:
    mat = np.zeros((4, 4), dtype=np.bool_)
    for i, j in enumerate(perm):
        mat[j, i] = True
    return Tensor(mat, (4,), (4,))


def spek_white_observable() -> ObservableStructure:
    mult = {(0, 0): 0, (1, 1): 0, (0, 1): 1, (1, 0): 1,
            (2, 2): 2, (3, 3): 2, (2, 3): 3, (3, 2): 3}
    obs = ObservableStructure.from_relations(
        "white", 4, mult, {0, 2},
        points=[_spek_subset({0, 1}), _spek_subset({2, 3})])
    klein = FiniteAbelianGroup((2, 2))
    table = {
        (0, 0): _spek_subset({0, 2}),   # x0 = the unit
        (1, 0): _spek_subset({1, 3}),   # x1
        (0, 1): _spek_subset({0, 3}),   # y0
        (1, 1): _spek_subset({1, 2}),   # y1
    }

    def phase_point(p):
        if not isinstance(p, GroupElement) or p.group != klein:
            raise ValueError("spek white phases are Z2xZ2 elements")
        return table[p.coords]

    obs.phase_points = phase_point
    return obs


def spek_gray_observable() -> ObservableStructure:
    """White conjugated by the permutation exchanging states 1 and 2, which
    carries the z-points onto the x-points."""
    white = spek_white_observable()
    p = _perm_relation((0, 2, 1, 3))
    mult = p.tensor(p).then(white.mult).then(p)
    unit = white.unit.then(p)
    return ObservableStructure(
        "gray", mult, unit, mult.dagger(), unit.dagger(),
        points=[_spek_subset({0, 2}), _spek_subset({1, 3})])


def spek_fixture() -> TheoryFixture:
    import itertools

    points = {
        "z0": _spek_subset({0, 1}), "z1": _spek_subset({2, 3}),
        "x0": _spek_subset({0, 2}), "x1": _spek_subset({1, 3}),
        "y0": _spek_subset({0, 3}), "y1": _spek_subset({1, 2}),
    }
    gens = []
    for p in points:
        gens.append(GeneratorDecl(p, (), ("T",), dagger=p + "d"))
        gens.append(GeneratorDecl(p + "d", ("T",), (), dagger=p))
    perms = list(itertools.permutations(range(4)))
    perm_names = {}
    for perm in perms:
        name = "p" + "".join(map(str, perm))
        inv = tuple(perm.index(k) for k in range(4))
        inv_name = "p" + "".join(map(str, inv))
        perm_names[name] = perm
        gens.append(GeneratorDecl(name, ("T",), ("T",), dagger=inv_name))
    gens += _dual_gens("T") + _spider_gens("T")
    sig = Signature("spek", [SystemType("T")], gens)

    white = spek_white_observable()
    gray = spek_gray_observable()
    gen_tensors: dict = {}
    for name, t in points.items():
        gen_tensors[name] = t
        gen_tensors[name + "d"] = t.dagger()
    for name, perm in perm_names.items():
        gen_tensors[name] = _perm_relation(perm)
    binding = ModelBinding("spek", "bool", {"T": 4}, gen_tensors,
                           observables={"white": white, "gray": gray})
    return TheoryFixture(
        sig, models={"spek": binding},
        extras={
            "points": points,
            "pair": ObservablePair(white, gray, name="spek (white, gray)"),
            "phase_candidates": [points[k] for k in ("x0", "x1", "y0", "y1")],
        })


def toy_fixture(group: FiniteAbelianGroup) -> TheoryFixture:
    """The formal four-state precursor theory, parametric in the choice of
    four-element phase group; that choice is exactly what separates the
    stabilizer realization (cyclic) from the Spekkens one (Klein four)."""
    if group.order != 4:
        raise ValueError("the toy theory needs a four-element phase group")
    gens = []
    for p in ("z0", "z1", "x0", "x1", "y0", "y1"):
        gens.append(GeneratorDecl(p, (), ("T",), dagger=p + "d"))
        gens.append(GeneratorDecl(p + "d", ("T",), (), dagger=p))
    gens += _dual_gens("T") + _spider_gens("T")
    sig = Signature("toy", [SystemType("T")], gens)
    realizations = {"Z4": "stab", "Z2xZ2": "spek"}
    key = "Z4" if group.factors in ((4,),) else "Z2xZ2"
    return TheoryFixture(sig, extras={
        "group": group,
        "classical_point_names": ["z0", "z1"],
        "phase_point_names": ["x0", "x1", "y0", "y1"],
        "realized_by": realizations[key],
    })


# -- two-colour spider playground -----------------------------------------------------


def pair_signature(carrier: str = "Q") -> Signature:
    return Signature("obspair", [SystemType(carrier)],
                     _spider_gens(carrier) + _dual_gens(carrier))


def hopf_rule(sig: Signature, carrier: str = "Q") -> RewriteRule:
    """Gray-copy then white-multiply collapses to delete-then-unit, up to a
    scalar (stated for pairs whose antipode is the identity)."""
    lhs = compose(Diagram.spider(sig, "gray", 1, 2),
                  Diagram.spider(sig, "white", 2, 1))
    rhs = compose(Diagram.spider(sig, "gray", 1, 0),
                  Diagram.spider(sig, "white", 0, 1))
    return RewriteRule("hopf", lhs, rhs, up_to_scalar=True)


def bialgebra_rule(sig: Signature, carrier: str = "Q") -> RewriteRule:
    """White-multiply then gray-copy commutes past each other, up to a
    scalar."""
    lhs = compose(Diagram.spider(sig, "white", 2, 1),
                  Diagram.spider(sig, "gray", 1, 2))
    copies = tensor(Diagram.spider(sig, "gray", 1, 2),
                    Diagram.spider(sig, "gray", 1, 2))
    route = Diagram.permutation(sig, (carrier,) * 4, (0, 2, 1, 3))
    mults = tensor(Diagram.spider(sig, "white", 2, 1),
                   Diagram.spider(sig, "white", 2, 1))
    rhs = compose(compose(copies, route), mults)
    return RewriteRule("bialgebra", lhs, rhs, up_to_scalar=True)


def pair_binding(pair: ObservablePair, name: str = "pair",
                 carrier: str = "Q") -> ModelBinding:
    return ModelBinding(
        name, pair.semiring, {carrier: pair.dim}, {},
        observables={"white": pair.white, "gray": pair.gray})


def qubit_pair_binding() -> ModelBinding:
    return pair_binding(qubit_pair(), name="qubit-pair")


def group_pair_binding(group: FiniteAbelianGroup) -> ModelBinding:
    return pair_binding(group_algebra_pair(group), name=f"pair-{group!r}")


def bialgebra_fragment_binding(group: FiniteAbelianGroup) -> ModelBinding:
    """Unscaled group bialgebra: gray multiplies group elements, white copies
    the group basis.  This 4-tuple is a strict bialgebra, so path-count
    arguments hold exactly."""
    d = group.order
    elems = list(group.elements())
    idx = {e: i for i, e in enumerate(elems)}
    mult = np.zeros((d, d * d), dtype=np.complex128)
    for g in elems:
        for h in elems:
            mult[idx[g + h], idx[g] * d + idx[h]] = 1.0
    unit = np.zeros((d, 1), dtype=np.complex128)
    unit[idx[group.zero()], 0] = 1.0
    mu = Tensor(mult, (d, d), (d,))
    eta = Tensor(unit, (), (d,))
    gray = ObservableStructure("gray", mu, eta, mu.dagger(), eta.dagger())
    white = ObservableStructure.from_copy_basis(
        "white", [np.eye(d)[i] for i in range(d)])
    return ModelBinding(f"bialg-{group!r}", "complex", {"Q": d}, {},
                        observables={"white": white, "gray": gray})


# -- registry ------------------------------------------------------------------------


_FIXTURES: dict[str, Callable[[], TheoryFixture]] = {
    "symgrp": symgrp_fixture,
    "qucirc": qucirc_fixture,
    "boolcirc": boolcirc_fixture,
    "stab": stab_fixture,
    "spek": spek_fixture,
}


def fixture(name: str) -> TheoryFixture:
    if name == "obspair":
        sig = pair_signature()
        return TheoryFixture(
            sig,
            rules=[hopf_rule(sig), bialgebra_rule(sig)],
            models={
                "qubit-pair": qubit_pair_binding(),
                "z2": group_pair_binding(FiniteAbelianGroup((2,))),
            })
    if name not in _FIXTURES:
        raise KeyError(f"unknown theory {name!r}; available: "
                       f"{sorted(_FIXTURES) + ['obspair']}")
    return _FIXTURES[name]()


def signature(name: str) -> Signature:
    return fixture(name).signature
