"""Semantic backends: interpret diagrams as dense tensors.

A ``ModelBinding`` assigns a dimension (or set size) to every system type
and a tensor to every generator.  Interpretation walks the port graph in
topological order, building the value as alternating permutations and
one-node layers; the interchange law guarantees the result is independent
of the order chosen, which the test suite exercises directly.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .diagram import IN_B, OUT_B, Diagram, Node, Wire
from .observables import ObservableStructure, spider
from .tensor import DEFAULT_TOL, Semiring, Tensor, equal_tensors
from .types import KIND_CAP, KIND_CUP, KIND_SPIDER, Signature

GenValue = Union[Tensor, Callable[[Node], Tensor]]

DEFAULT_DIM_CAP = 2 ** 20


class ModelError(ValueError):
    pass


class UnassignedGenerator(ModelError):
    pass


class DimensionOverflow(ModelError):
    pass


def default_tolerance() -> float:
    env = os.environ.get("GCT_TOLERANCE")
    return float(env) if env else DEFAULT_TOL


@dataclass
class ModelBinding:
    """A strict monoidal assignment of systems and generators to tensors."""

    name: str
    semiring: Semiring
    dims: dict[str, int]
    gens: dict[str, GenValue] = field(default_factory=dict)
    observables: dict[str, ObservableStructure] = field(default_factory=dict)
    dim_cap: int = DEFAULT_DIM_CAP

    def dim(self, type_name: str) -> int:
        if type_name == "I":
            return 1
        if type_name not in self.dims:
            raise ModelError(f"model {self.name} assigns no dimension to "
                             f"system {type_name}")
        return self.dims[type_name]

    def dims_of(self, types: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.dim(t) for t in types)

    def node_tensor(self, node: Node, sig: Signature) -> Tensor:
        decl = sig.gen(node.gen)
        if decl.kind == KIND_SPIDER:
            obs = self.observables.get(decl.colour or node.gen)
            if obs is None:
                raise UnassignedGenerator(
                    f"model {self.name} binds no observable for spider colour "
                    f"{decl.colour or node.gen}")
            return spider(obs, len(node.ins), len(node.outs), node.phase)
        if node.gen in self.gens:
            val = self.gens[node.gen]
            t = val(node) if callable(val) else val
        elif decl.kind in (KIND_CUP, KIND_CAP):
            # canonical basis cup/cap: the name of the identity
            d = self.dim(decl.outs[0] if decl.kind == KIND_CUP else decl.ins[0])
            t = Tensor.cup(d, self.semiring) if decl.kind == KIND_CUP \
                else Tensor.cap(d, self.semiring)
        else:
            raise UnassignedGenerator(
                f"model {self.name} assigns no tensor to generator {node.gen}")
        want_dom = self.dims_of(node.ins)
        want_cod = self.dims_of(node.outs)
        if t.dom != want_dom or t.cod != want_cod:
            raise ModelError(
                f"assignment for {node.gen} has shape {t.dom}->{t.cod}, "
                f"expected {want_dom}->{want_cod}")
        if t.semiring != self.semiring:
            raise ModelError(f"assignment for {node.gen} lives in the wrong "
                             "semiring")
        return t


def interpret(d: Diagram, m: ModelBinding,
              rng: Optional[random.Random] = None) -> Tensor:
    """Evaluate a diagram to its tensor.

    ``rng`` randomizes the topological traversal order; any choice yields
    the same tensor.
    """
    order = d.topological_order(rng)
    by_src = {w[0]: w for w in d.wires}
    by_dst = {w[1]: w for w in d.wires}

    def wire_dim(w: Wire) -> int:
        (sn, ss) = w[0]
        t = d.dom[ss] if sn == IN_B else d.nodes[sn].outs[ss]
        return m.dim(t)

    open_wires: list[Wire] = [by_src[(IN_B, i)] for i in range(len(d.dom))]
    value = Tensor.identity(m.dims_of(d.dom), m.semiring)

    def guard(dims: Sequence[int]) -> None:
        total = 1
        for x in dims:
            total *= x
        if total > m.dim_cap:
            raise DimensionOverflow(
                f"intermediate dimension {total} exceeds cap {m.dim_cap}")

    for nid in order:
        node = d.nodes[nid]
        t = m.node_tensor(node, d.sig)
        in_wires = [by_dst[(nid, k)] for k in range(len(node.ins))]
        positions = [open_wires.index(w) for w in in_wires]
        rest = [w for w in open_wires if w not in in_wires]
        # route consumed wires to the front, in slot order
        new_order = positions + [open_wires.index(w) for w in rest]
        dims = [wire_dim(w) for w in open_wires]
        if new_order != list(range(len(open_wires))):
            value = value.then(Tensor.permutation(dims, new_order, m.semiring))
        rest_dims = [wire_dim(w) for w in rest]
        guard(list(t.cod) + rest_dims)
        layer = t.tensor(Tensor.identity(rest_dims, m.semiring))
        value = value.then(layer)
        out_wires = [by_src[(nid, k)] for k in range(len(node.outs))]
        open_wires = out_wires + rest

    final = [by_dst[(OUT_B, j)] for j in range(len(d.cod))]
    if final != open_wires:
        dims = [wire_dim(w) for w in open_wires]
        new_order = [open_wires.index(w) for w in final]
        value = value.then(Tensor.permutation(dims, new_order, m.semiring))
    return Tensor(value.data, m.dims_of(d.dom), m.dims_of(d.cod))


def semantically_equal(d1: Diagram, d2: Diagram, m: ModelBinding,
                       mode: str = "tolerance",
                       tol: Optional[float] = None) -> bool:
    t1, t2 = interpret(d1, m), interpret(d2, m)
    if m.semiring == "bool" and mode == "tolerance":
        mode = "exact"
    return equal_tensors(t1, t2, mode=mode, tol=tol or default_tolerance())


def scalar_monoid(m: ModelBinding) -> dict:
    """Describe the model's scalar carrier."""
    if m.semiring == "bool":
        return {
            "name": "boolean monoid",
            "carrier": [0, 1],
            "table": {"0*0": 0, "0*1": 0, "1*0": 0, "1*1": 1},
        }
    return {"name": "complex field", "carrier": "C"}


# -- soundness ----------------------------------------------------------------


@dataclass
class RuleSoundness:
    rule_name: str
    sound: bool
    max_deviation: float
    witness: Optional[dict] = None

    def line(self) -> str:
        tag = "sound" if self.sound else "UNSOUND"
        out = f"{self.rule_name}: {tag} (max dev {self.max_deviation:.3g})"
        if self.witness is not None:
            out += f" witness={self.witness}"
        return out


@dataclass
class SoundnessReport:
    model: str
    entries: list[RuleSoundness]

    @property
    def all_sound(self) -> bool:
        return all(e.sound for e in self.entries)

    def to_text(self) -> str:
        lines = [f"soundness under model {self.model}:"]
        lines += ["  " + e.line() for e in self.entries]
        return "\n".join(lines)


def _basis_witness(lhs_t: Tensor, rhs_t: Tensor) -> Optional[dict]:
    """For boolean models: the first basis input/output where the two
    interpretations disagree."""
    import numpy as np

    diff = lhs_t.data != rhs_t.data
    if not diff.any():
        return None
    row, col = map(int, np.argwhere(diff)[0])
    def digits(flat: int, dims: tuple[int, ...]) -> list[int]:
        out = []
        for dmn in reversed(dims):
            out.append(flat % dmn)
            flat //= dmn
        return list(reversed(out))
    return {
        "input": digits(col, lhs_t.dom),
        "output": digits(row, lhs_t.cod),
        "lhs": int(lhs_t.data[row, col]),
        "rhs": int(rhs_t.data[row, col]),
    }


def check_soundness(rules: Sequence, m: ModelBinding, samples: int = 20,
                    tol: Optional[float] = None,
                    rng: Optional[random.Random] = None) -> SoundnessReport:
    """Interpret both sides of each rule and compare.

    Boolean models are compared exactly, entrywise (an exhaustive
    truth-table check, since columns enumerate all basis inputs), and an
    unsound rule gets a concrete input witness.  Complex models compare
    within tolerance and additionally spot-check ``samples`` random scalar
    closures.
    """
    from .tensor import global_scalar

    tol = tol or default_tolerance()
    rng = rng or random.Random(0)
    entries = []
    for rule in rules:
        lhs_t = interpret(rule.lhs, m)
        rhs_t = interpret(rule.rhs, m)
        if getattr(rule, "up_to_scalar", False) and m.semiring == "complex":
            lam = global_scalar(lhs_t, rhs_t, tol=tol)
            if lam is not None:
                rhs_t = rhs_t.scale(lam)
        dev = lhs_t.max_deviation(rhs_t)
        witness = None
        if m.semiring == "bool":
            sound = dev == 0.0
            if not sound:
                witness = _basis_witness(lhs_t, rhs_t)
        else:
            sound = dev <= tol
            if sound:
                dev = max(dev, _closure_deviation(lhs_t, rhs_t, samples, rng))
                sound = dev <= tol
        entries.append(RuleSoundness(rule.name, sound, dev, witness))
    return SoundnessReport(m.name, entries)


def _closure_deviation(a: Tensor, b: Tensor, samples: int,
                       rng: random.Random) -> float:
    """Close both sides with shared random states/effects and compare the
    resulting scalars."""
    import numpy as np

    worst = 0.0
    npr = np.random.default_rng(rng.getrandbits(32))
    for _ in range(samples):
        vin = npr.normal(size=(int(np.prod(a.dom or (1,))), 1)) \
            + 1j * npr.normal(size=(int(np.prod(a.dom or (1,))), 1))
        vout = npr.normal(size=(1, int(np.prod(a.cod or (1,))))) \
            + 1j * npr.normal(size=(1, int(np.prod(a.cod or (1,)))))
        sa = complex((vout @ a.data @ vin)[0, 0])
        sb = complex((vout @ b.data @ vin)[0, 0])
        worst = max(worst, abs(sa - sb))
    return worst
