"""Typed open string diagrams as boundary-anchored port graphs.

A diagram is a set of generator nodes plus a set of wires.  Each wire runs
from a *source* port (a node output, or an input-boundary slot) to a
*destination* port (a node input, or an output-boundary slot).  Crossings
are not nodes: the wiring is an unordered set, so the symmetry equations
hold definitionally.  Cups and caps are explicit nodes, which keeps the
node digraph acyclic; traces are expressed through them.

Diagrams are immutable values: every operation returns a new diagram.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .groups import Phase, phase_neg, phases_equal
from .types import (KIND_CAP, KIND_CUP, KIND_PLAIN, KIND_SPIDER, Signature,
                    SignatureError)

IN_B = -1   # pseudo-node for the input boundary (acts as a source)
OUT_B = -2  # pseudo-node for the output boundary (acts as a sink)

End = tuple[int, int]          # (node id or boundary marker, slot)
Wire = tuple[End, End]         # (source end, destination end)


class DiagramError(ValueError):
    pass


class CompositionTypeError(DiagramError):
    def __init__(self, index: int, expected: str, got: str):
        self.index = index
        super().__init__(
            f"type mismatch at boundary index {index}: cannot plug "
            f"{got} into {expected}")


class UnsupportedDagger(DiagramError):
    pass


@dataclass(frozen=True)
class Node:
    """One generator instance.  Spiders carry their own arity and a phase."""

    gen: str
    ins: tuple[str, ...]
    outs: tuple[str, ...]
    phase: Optional[Phase] = None

    def same_label(self, other: "Node") -> bool:
        return (self.gen == other.gen and self.ins == other.ins
                and self.outs == other.outs
                and phases_equal(self.phase, other.phase))


def _sorted_wires(wires: Iterable[Wire]) -> tuple[Wire, ...]:
    return tuple(sorted(wires))


class Diagram:
    __slots__ = ("sig", "dom", "cod", "nodes", "wires")

    def __init__(self, sig: Signature, dom: Sequence[str], cod: Sequence[str],
                 nodes: dict[int, Node], wires: Iterable[Wire],
                 check: bool = True):
        self.sig = sig
        self.dom = tuple(dom)
        self.cod = tuple(cod)
        self.nodes = dict(nodes)
        self.wires = _sorted_wires(wires)
        if check:
            self.validate()

    # -- construction ------------------------------------------------------

    @staticmethod
    def empty(sig: Signature) -> "Diagram":
        return Diagram(sig, (), (), {}, ())

    @staticmethod
    def identity(sig: Signature, types: Sequence[str]) -> "Diagram":
        wires = [((IN_B, i), (OUT_B, i)) for i in range(len(types))]
        return Diagram(sig, types, types, {}, wires)

    @staticmethod
    def permutation(sig: Signature, types: Sequence[str],
                    order: Sequence[int]) -> "Diagram":
        """Wire input ``order[j]`` to output ``j``."""
        if sorted(order) != list(range(len(types))):
            raise DiagramError(f"not a permutation: {order}")
        cod = [types[i] for i in order]
        wires = [((IN_B, order[j]), (OUT_B, j)) for j in range(len(order))]
        return Diagram(sig, types, cod, {}, wires)

    @staticmethod
    def generator(sig: Signature, name: str, phase: Optional[Phase] = None,
                  n_in: Optional[int] = None,
                  n_out: Optional[int] = None) -> "Diagram":
        decl = sig.gen(name)
        if decl.kind == KIND_SPIDER:
            if n_in is None or n_out is None:
                raise DiagramError(f"spider {name} needs explicit leg counts")
            carrier = decl.carrier or (decl.ins[0] if decl.ins else None)
            if carrier is None:
                raise SignatureError(f"spider {name} has no carrier type")
            node = Node(name, (carrier,) * n_in, (carrier,) * n_out, phase)
        else:
            if phase is not None and not decl.phased:
                raise DiagramError(f"generator {name} does not take a phase")
            node = Node(name, decl.ins, decl.outs, phase)
        wires = [((IN_B, i), (0, i)) for i in range(len(node.ins))]
        wires += [((0, j), (OUT_B, j)) for j in range(len(node.outs))]
        return Diagram(sig, node.ins, node.outs, {0: node}, wires)

    @staticmethod
    def spider(sig: Signature, colour: str, n_in: int, n_out: int,
               phase: Optional[Phase] = None) -> "Diagram":
        return Diagram.generator(sig, colour, phase=phase, n_in=n_in, n_out=n_out)

    # -- bookkeeping ---------------------------------------------------------

    def validate(self) -> None:
        seen_src: set[End] = set()
        seen_dst: set[End] = set()
        for (sn, ss), (dn, ds) in self.wires:
            if (sn, ss) in seen_src:
                raise DiagramError(f"source port used twice: {(sn, ss)}")
            if (dn, ds) in seen_dst:
                raise DiagramError(f"destination port used twice: {(dn, ds)}")
            seen_src.add((sn, ss))
            seen_dst.add((dn, ds))
            if self._src_type((sn, ss)) != self._dst_type((dn, ds)):
                raise DiagramError(
                    f"wire {(sn, ss)} -> {(dn, ds)} joins mismatched types "
                    f"{self._src_type((sn, ss))} vs {self._dst_type((dn, ds))}")
        for i in range(len(self.dom)):
            if (IN_B, i) not in seen_src:
                raise DiagramError(f"input boundary slot {i} is unwired")
        for j in range(len(self.cod)):
            if (OUT_B, j) not in seen_dst:
                raise DiagramError(f"output boundary slot {j} is unwired")
        for nid, node in self.nodes.items():
            for k in range(len(node.ins)):
                if (nid, k) not in seen_dst:
                    raise DiagramError(f"input port {k} of node {nid} is unwired")
            for k in range(len(node.outs)):
                if (nid, k) not in seen_src:
                    raise DiagramError(f"output port {k} of node {nid} is unwired")
        self.topological_order()  # raises on cycles

    def _src_type(self, end: End) -> str:
        n, s = end
        if n == IN_B:
            if not 0 <= s < len(self.dom):
                raise DiagramError(f"input boundary slot {s} out of range")
            return self.dom[s]
        if n not in self.nodes:
            raise DiagramError(f"wire references unknown node {n}")
        if not 0 <= s < len(self.nodes[n].outs):
            raise DiagramError(f"node {n} has no output slot {s}")
        return self.nodes[n].outs[s]

    def _dst_type(self, end: End) -> str:
        n, s = end
        if n == OUT_B:
            if not 0 <= s < len(self.cod):
                raise DiagramError(f"output boundary slot {s} out of range")
            return self.cod[s]
        if n not in self.nodes:
            raise DiagramError(f"wire references unknown node {n}")
        if not 0 <= s < len(self.nodes[n].ins):
            raise DiagramError(f"node {n} has no input slot {s}")
        return self.nodes[n].ins[s]

    def kind_of(self, nid: int) -> str:
        return self.sig.gen(self.nodes[nid].gen).kind

    def topological_order(self, rng: Optional[random.Random] = None) -> list[int]:
        """Kahn's algorithm; ties broken by node id, or randomly with ``rng``."""
        preds: dict[int, int] = {nid: 0 for nid in self.nodes}
        succs: dict[int, list[int]] = {nid: [] for nid in self.nodes}
        for (sn, _), (dn, _) in self.wires:
            if sn >= 0 and dn >= 0:
                preds[dn] += 1
                succs[sn].append(dn)
        ready = sorted(nid for nid, c in preds.items() if c == 0)
        order: list[int] = []
        while ready:
            k = rng.randrange(len(ready)) if rng else 0
            nid = ready.pop(k)
            order.append(nid)
            for m in sorted(succs[nid]):
                preds[m] -= 1
                if preds[m] == 0:
                    ready.append(m)
            if not rng:
                ready.sort()
        if len(order) != len(self.nodes):
            raise DiagramError("diagram contains a directed cycle; "
                               "express feedback through cup/cap nodes")
        return order

    def renumbered(self) -> "Diagram":
        """Canonical node ids 0..n-1 in increasing old-id order."""
        mapping = {old: new for new, old in enumerate(sorted(self.nodes))}
        return self._map_ids(mapping)

    def _map_ids(self, mapping: dict[int, int]) -> "Diagram":
        def m(end: End) -> End:
            n, s = end
            return (mapping.get(n, n) if n >= 0 else n, s)

        nodes = {mapping[nid]: nd for nid, nd in self.nodes.items()}
        wires = [(m(a), m(b)) for a, b in self.wires]
        return Diagram(self.sig, self.dom, self.cod, nodes, wires, check=False)

    def out_wire(self, end: End) -> Wire:
        for w in self.wires:
            if w[0] == end:
                return w
        raise DiagramError(f"no wire out of {end}")

    def in_wire(self, end: End) -> Wire:
        for w in self.wires:
            if w[1] == end:
                return w
        raise DiagramError(f"no wire into {end}")

    # -- the two composition operations -------------------------------------

    def then(self, other: "Diagram") -> "Diagram":
        return compose(self, other)

    def tensor(self, other: "Diagram") -> "Diagram":
        return tensor(self, other)

    # -- equality ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        """Structural equality on canonically renumbered diagrams."""
        if not isinstance(other, Diagram):
            return NotImplemented
        a, b = self.renumbered(), other.renumbered()
        if (a.sig.name != b.sig.name or a.dom != b.dom or a.cod != b.cod
                or set(a.nodes) != set(b.nodes) or a.wires != b.wires):
            return False
        return all(a.nodes[i].same_label(b.nodes[i]) for i in a.nodes)

    def __repr__(self) -> str:
        return (f"Diagram({self.sig.name}: {','.join(self.dom) or 'I'} -> "
                f"{','.join(self.cod) or 'I'}, {len(self.nodes)} nodes, "
                f"{len(self.wires)} wires)")

    # -- component analysis ----------------------------------------------------

    def components(self) -> list[set]:
        """Connected components over nodes and boundary slots.

        Elements are node ids (ints) and boundary ends (tuples).
        """
        parent: dict = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            parent.setdefault(x, x)
            parent.setdefault(y, y)
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for nid in self.nodes:
            parent.setdefault(nid, nid)
        for (sn, ss), (dn, ds) in self.wires:
            a = sn if sn >= 0 else (sn, ss)
            b = dn if dn >= 0 else (dn, ds)
            union(a, b)
        groups: dict = {}
        for x in parent:
            groups.setdefault(find(x), set()).add(x)
        return list(groups.values())

    def scalar_components(self) -> list[set]:
        return [c for c in self.components()
                if all(isinstance(x, int) for x in c)]


# -- composition -------------------------------------------------------------


def compose(d1: Diagram, d2: Diagram) -> Diagram:
    """Plug ``d1`` into ``d2`` (sequential composition, d2 after d1)."""
    if d1.sig is not d2.sig and d1.sig.name != d2.sig.name:
        raise DiagramError("cannot compose diagrams over different signatures")
    if len(d1.cod) != len(d2.dom):
        raise CompositionTypeError(min(len(d1.cod), len(d2.dom)),
                                   ",".join(d2.dom), ",".join(d1.cod))
    for i, (a, b) in enumerate(zip(d1.cod, d2.dom)):
        if a != b:
            raise CompositionTypeError(i, b, a)

    offset = (max(d1.nodes) + 1) if d1.nodes else 0
    nodes = dict(d1.nodes)
    for nid, nd in d2.nodes.items():
        nodes[nid + offset] = nd

    def sh(end: End) -> End:
        n, s = end
        return (n + offset if n >= 0 else n, s)

    upper_src: dict[int, End] = {}  # middle slot -> source end in d1
    wires: list[Wire] = []
    for (sn, ss), (dn, ds) in d1.wires:
        if dn == OUT_B:
            upper_src[ds] = (sn, ss)
        else:
            wires.append(((sn, ss), (dn, ds)))
    for (sn, ss), (dn, ds) in d2.wires:
        if sn == IN_B:
            wires.append((upper_src[ss], sh((dn, ds))))
        else:
            wires.append((sh((sn, ss)), sh((dn, ds))))
    return Diagram(d1.sig, d1.dom, d2.cod, nodes, wires).renumbered()


def tensor(d1: Diagram, d2: Diagram) -> Diagram:
    """Juxtapose ``d1`` (left) and ``d2`` (right)."""
    if d1.sig is not d2.sig and d1.sig.name != d2.sig.name:
        raise DiagramError("cannot tensor diagrams over different signatures")
    offset = (max(d1.nodes) + 1) if d1.nodes else 0
    din, dout = len(d1.dom), len(d1.cod)
    nodes = dict(d1.nodes)
    for nid, nd in d2.nodes.items():
        nodes[nid + offset] = nd

    def sh(end: End, is_src: bool) -> End:
        n, s = end
        if n == IN_B:
            return (IN_B, s + din)
        if n == OUT_B:
            return (OUT_B, s + dout)
        return (n + offset, s)

    wires = list(d1.wires)
    wires += [(sh(a, True), sh(b, False)) for a, b in d2.wires]
    return Diagram(d1.sig, d1.dom + d2.dom, d1.cod + d2.cod,
                   nodes, wires).renumbered()


def tensor_many(sig: Signature, ds: Sequence[Diagram]) -> Diagram:
    acc = Diagram.empty(sig)
    for d in ds:
        acc = tensor(acc, d)
    return acc


# -- dagger -------------------------------------------------------------------


def dagger(d: Diagram) -> Diagram:
    """Flip the diagram upside down, replacing each generator by its
    declared dagger partner (spider phases negate)."""
    nodes: dict[int, Node] = {}
    for nid, nd in d.nodes.items():
        decl = d.sig.gen(nd.gen)
        partner = decl.dagger_name()
        if partner is None:
            raise UnsupportedDagger(f"generator {nd.gen} has no dagger partner")
        phase = phase_neg(nd.phase) if (decl.kind == KIND_SPIDER or decl.phased) \
            else nd.phase
        nodes[nid] = Node(partner, nd.outs, nd.ins, phase)

    def flip(end: End, was_src: bool) -> End:
        n, s = end
        if n == IN_B:
            return (OUT_B, s)
        if n == OUT_B:
            return (IN_B, s)
        return (n, s)

    wires = [(flip(dst, False), flip(src, True)) for src, dst in d.wires]
    return Diagram(d.sig, d.cod, d.dom, nodes, wires).renumbered()


# -- cups, caps, transpose, trace ----------------------------------------------


def _cup_parts(sig: Signature, type_name: str) -> tuple[Node, int, int]:
    """The cup node producing dual(T) and T, with the out slots carrying
    them.  A dual pair shares one cup: the cup for T** = T is the declared
    one with crossed legs."""
    name = f"cup_{type_name}"
    if sig.has_gen(name):
        decl = sig.gen(name)
        return Node(decl.name, decl.ins, decl.outs), 0, 1
    alt = f"cup_{sig.dual(type_name)}"
    if sig.has_gen(alt):
        decl = sig.gen(alt)  # outs = (T, dual(T)); swap the attachments
        return Node(decl.name, decl.ins, decl.outs), 1, 0
    raise SignatureError(f"theory {sig.name} declares no dual (cup) for "
                         f"{type_name}")


def _cap_parts(sig: Signature, type_name: str) -> tuple[Node, int, int]:
    """The cap node consuming T and dual(T), with the in slots taking them."""
    name = f"cap_{type_name}"
    if sig.has_gen(name):
        decl = sig.gen(name)
        return Node(decl.name, decl.ins, decl.outs), 0, 1
    alt = f"cap_{sig.dual(type_name)}"
    if sig.has_gen(alt):
        decl = sig.gen(alt)  # ins = (dual(T), T); swap the attachments
        return Node(decl.name, decl.ins, decl.outs), 1, 0
    raise SignatureError(f"theory {sig.name} declares no dual (cap) for "
                         f"{type_name}")


def cup(sig: Signature, type_name: str) -> Diagram:
    """e_A : I -> A* (x) A."""
    node, dual_slot, plain_slot = _cup_parts(sig, type_name)
    wires = [((0, dual_slot), (OUT_B, 0)), ((0, plain_slot), (OUT_B, 1))]
    return Diagram(sig, (), (sig.dual(type_name), type_name), {0: node}, wires)


def cap(sig: Signature, type_name: str) -> Diagram:
    """d_A : A (x) A* -> I."""
    node, plain_slot, dual_slot = _cap_parts(sig, type_name)
    wires = [((IN_B, 0), (0, plain_slot)), ((IN_B, 1), (0, dual_slot))]
    return Diagram(sig, (type_name, sig.dual(type_name)), (), {0: node}, wires)


def cup_many(sig: Signature, types: Sequence[str]) -> Diagram:
    """Nested cups: I -> (A1...An)* (x) (A1...An), duals in reverse order."""
    n = len(types)
    nodes: dict[int, Node] = {}
    wires: list[Wire] = []
    for i, t in enumerate(types):
        node, dual_slot, plain_slot = _cup_parts(sig, t)
        nodes[i] = node
        wires.append(((i, dual_slot), (OUT_B, n - 1 - i)))  # reversed block
        wires.append(((i, plain_slot), (OUT_B, n + i)))
    cod = tuple(sig.dual(t) for t in reversed(types)) + tuple(types)
    return Diagram(sig, (), cod, nodes, wires)


def cap_many(sig: Signature, types: Sequence[str]) -> Diagram:
    """Nested caps: (A1...An) (x) (A1...An)* -> I."""
    n = len(types)
    nodes: dict[int, Node] = {}
    wires: list[Wire] = []
    for i, t in enumerate(types):
        node, plain_slot, dual_slot = _cap_parts(sig, t)
        nodes[i] = node
        wires.append(((IN_B, i), (i, plain_slot)))
        wires.append(((IN_B, n + (n - 1 - i)), (i, dual_slot)))
    dom = tuple(types) + tuple(sig.dual(t) for t in reversed(types))
    return Diagram(sig, dom, (), nodes, wires)


def transpose_upper(d: Diagram) -> Diagram:
    """Bend all wires: f : A -> B becomes f^T : B* -> A* (upper star)."""
    n_in, n_out = len(d.dom), len(d.cod)
    left = cup_many(d.sig, d.dom)      # I -> dom*rev (x) dom
    right = cap_many(d.sig, d.cod)     # cod (x) cod*rev -> I
    mid = tensor(Diagram.identity(d.sig, left.cod[:n_in]), d)
    mid = tensor(mid, Diagram.identity(d.sig, tuple(d.sig.dual(t)
                                                    for t in reversed(d.cod))))
    start = tensor(left, Diagram.identity(
        d.sig, tuple(d.sig.dual(t) for t in reversed(d.cod))))
    finish = tensor(Diagram.identity(d.sig, left.cod[:n_in]), right)
    return compose(compose(start, mid), finish)


def conjugate_lower(d: Diagram) -> Diagram:
    """Lower star: dagger then transpose (the two commute)."""
    return transpose_upper(dagger(d))


def partial_trace(d: Diagram, wire_index: int) -> Diagram:
    """Close output ``wire_index`` onto input ``wire_index`` with a cup/cap."""
    if wire_index < 0 or wire_index >= min(len(d.dom), len(d.cod)):
        raise DiagramError(f"trace index {wire_index} out of range")
    t = d.dom[wire_index]
    if d.cod[wire_index] != t:
        raise DiagramError(
            f"cannot trace: input type {t} differs from output type "
            f"{d.cod[wire_index]} at index {wire_index}")
    cup_node, cup_dual, cup_plain = _cup_parts(d.sig, t)
    cap_node, cap_plain, cap_dual = _cap_parts(d.sig, t)
    base = max(d.nodes) + 1 if d.nodes else 0
    nodes = dict(d.nodes)
    nodes[base] = cup_node
    nodes[base + 1] = cap_node

    wires: list[Wire] = []
    for (sn, ss), (dn, ds) in d.wires:
        src: End = (sn, ss)
        dst: End = (dn, ds)
        if src == (IN_B, wire_index):
            src = (base, cup_plain)               # cup's plain leg feeds input
        elif sn == IN_B and ss > wire_index:
            src = (IN_B, ss - 1)
        if dst == (OUT_B, wire_index):
            dst = (base + 1, cap_plain)           # output feeds cap
        elif dn == OUT_B and ds > wire_index:
            dst = (OUT_B, ds - 1)
        wires.append((src, dst))
    wires.append(((base, cup_dual), (base + 1, cap_dual)))  # close the loop
    dom = d.dom[:wire_index] + d.dom[wire_index + 1:]
    cod = d.cod[:wire_index] + d.cod[wire_index + 1:]
    return Diagram(d.sig, dom, cod, nodes, wires).renumbered()


def trace(d: Diagram) -> Diagram:
    """Full trace: close every input/output pair."""
    if len(d.dom) != len(d.cod):
        raise DiagramError("trace needs equally many inputs and outputs")
    out = d
    for _ in range(len(d.dom)):
        out = partial_trace(out, 0)
    return out


# -- yank normalization ---------------------------------------------------------


def _reaches(d: Diagram, start: int, goal: int) -> bool:
    if start == goal:
        return True
    succs: dict[int, list[int]] = {nid: [] for nid in d.nodes}
    for (sn, _), (dn, _) in d.wires:
        if sn >= 0 and dn >= 0:
            succs[sn].append(dn)
    stack, seen = [start], {start}
    while stack:
        x = stack.pop()
        for y in succs[x]:
            if y == goal:
                return True
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def yank_normalize(d: Diagram) -> Diagram:
    """Exhaustively straighten cup/cap zig-zags.

    A cup and a cap joined by exactly one wire are removed and the loose
    ends joined, unless that would create a directed cycle (i.e. the pair
    realises a genuine trace loop rather than a zig-zag).
    """
    current = d
    while True:
        redex = _find_zigzag(current)
        if redex is None:
            return current.renumbered()
        current = _eliminate_zigzag(current, *redex)


def _find_zigzag(d: Diagram):
    for (sn, ss), (dn, ds) in d.wires:
        if sn < 0 or dn < 0:
            continue
        if d.kind_of(sn) == KIND_CUP and d.kind_of(dn) == KIND_CAP:
            shared = [w for w in d.wires if w[0][0] == sn and w[1][0] == dn]
            if len(shared) != 1:
                continue
            # the loose ends that elimination would join
            other_cup_leg = 1 - ss
            other_cap_leg = 1 - ds
            producer = d.in_wire((dn, other_cap_leg))[0]
            consumer = d.out_wire((sn, other_cup_leg))[1]
            if producer[0] >= 0 and consumer[0] >= 0 \
                    and _reaches(d, consumer[0], producer[0]):
                continue  # genuine trace loop; not a zig-zag
            return sn, dn, producer, consumer
    return None


def _eliminate_zigzag(d: Diagram, cup_id: int, cap_id: int,
                      producer: End, consumer: End) -> Diagram:
    nodes = {nid: nd for nid, nd in d.nodes.items()
             if nid not in (cup_id, cap_id)}
    wires = [w for w in d.wires
             if w[0][0] not in (cup_id, cap_id) and w[1][0] not in (cup_id, cap_id)]
    wires.append((producer, consumer))
    return Diagram(d.sig, d.dom, d.cod, nodes, wires)


# -- isomorphism ------------------------------------------------------------------


def _node_key(d: Diagram, nid: int):
    nd = d.nodes[nid]
    if nd.phase is None or nd.phase.is_zero():
        pkey = ("0",)
    elif hasattr(nd.phase, "value"):
        # bucket for candidate grouping; final comparison is tolerant
        pkey = (type(nd.phase).__name__[0], round(nd.phase.value, 9))
    else:
        pkey = ("g", repr(nd.phase))
    return (nd.gen, len(nd.ins), len(nd.outs), pkey)


def _ordered_ports(d: Diagram, nid: int) -> bool:
    """Plain generators have ordered ports; spider/cup/cap legs commute."""
    return d.kind_of(nid) == KIND_PLAIN


def _wire_multiset(d: Diagram, node_map: dict[int, int], other: Diagram):
    """Translate d's wires through node_map into endpoint keys comparable
    against other's wires, erasing slot order on permutable legs."""

    def key(dia: Diagram, end: End, is_src: bool, mapped: Optional[int]):
        n, s = end
        if n < 0:
            return ("b", n, s, False)
        node = mapped if mapped is not None else n
        slot = s if _ordered_ports(dia, n) else -1
        return ("n", node, slot, is_src)

    ours = sorted(
        (key(d, src, True, node_map.get(src[0]) if src[0] >= 0 else None),
         key(d, dst, False, node_map.get(dst[0]) if dst[0] >= 0 else None))
        for src, dst in d.wires)
    theirs = sorted(
        (key(other, src, True, src[0] if src[0] >= 0 else None),
         key(other, dst, False, dst[0] if dst[0] >= 0 else None))
        for src, dst in other.wires)
    return ours == theirs


def iso_equal(d1: Diagram, d2: Diagram) -> bool:
    """Syntactic equality: label-, phase- and boundary-preserving graph
    isomorphism after yank normalization."""
    a, b = yank_normalize(d1), yank_normalize(d2)
    if a.sig.name != b.sig.name or a.dom != b.dom or a.cod != b.cod:
        return False
    if len(a.nodes) != len(b.nodes):
        return False
    akeys = sorted(_node_key(a, n) for n in a.nodes)
    bkeys = sorted(_node_key(b, n) for n in b.nodes)
    if akeys != bkeys:
        return False

    b_by_key: dict = {}
    for n in b.nodes:
        b_by_key.setdefault(_node_key(b, n), []).append(n)

    a_ids = sorted(a.nodes)

    def backtrack(i: int, node_map: dict[int, int], used: set[int]) -> bool:
        if i == len(a_ids):
            return _wire_multiset(a, node_map, b)
        nid = a_ids[i]
        for cand in b_by_key.get(_node_key(a, nid), []):
            if cand in used:
                continue
            node_map[nid] = cand
            if _compatible_so_far(a, b, node_map, nid):
                used.add(cand)
                if backtrack(i + 1, node_map, used):
                    return True
                used.remove(cand)
            del node_map[nid]
        return False

    return backtrack(0, {}, set())


def _compatible_so_far(a: Diagram, b: Diagram, node_map: dict[int, int],
                       nid: int) -> bool:
    """Cheap pruning when ``nid`` is tentatively mapped: boundary-incident
    wires and wires to already-mapped nodes must agree as multisets."""
    img = node_map[nid]
    mapped = set(node_map)
    mapped_img = set(node_map.values())

    def profile(d: Diagram, n: int, translate: Optional[dict[int, int]],
                known: set[int]):
        rows = []
        for (sn, ss), (dn, ds) in d.wires:
            if sn == n:
                myslot = ss if _ordered_ports(d, n) else -1
                if dn < 0:
                    rows.append(("o", myslot, "bnd", dn, ds))
                elif dn == n:
                    rows.append(("o", myslot, "self",
                                 ds if _ordered_ports(d, n) else -1, 0))
                elif dn in known:
                    peer = translate[dn] if translate else dn
                    rows.append(("o", myslot, "node", peer,
                                 ds if _ordered_ports(d, dn) else -1))
            if dn == n:
                myslot = ds if _ordered_ports(d, n) else -1
                if sn < 0:
                    rows.append(("i", myslot, "bnd", sn, ss))
                elif sn == n:
                    rows.append(("i", myslot, "self",
                                 ss if _ordered_ports(d, n) else -1, 0))
                elif sn in known:
                    peer = translate[sn] if translate else sn
                    rows.append(("i", myslot, "node", peer,
                                 ss if _ordered_ports(d, sn) else -1))
        return sorted(rows)

    return profile(a, nid, node_map, mapped) == profile(b, img, None, mapped_img)
