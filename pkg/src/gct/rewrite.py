"""Rule matching and application, spider fusion, and the bialgebra
characteristic-matrix normal form.

Matching is label- and phase-preserving and injective on nodes and wires.
Plain generators match with exact slot order; spider legs are unordered.
A rule flagged ``spider_aware`` may additionally match a host spider with
more legs than the pattern spider, provided the pattern spider touches the
rule boundary: the host spider is split first (legs regroup freely by the
spider law) and the residual legs stay behind.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .diagram import IN_B, OUT_B, Diagram, End, Node, Wire
from .groups import phase_add, phases_equal
from .types import KIND_PLAIN, KIND_SPIDER, Signature


class RewriteError(ValueError):
    pass


class UnsupportedFragment(RewriteError):
    pass


@dataclass
class RewriteRule:
    name: str
    lhs: Diagram
    rhs: Diagram
    spider_aware: bool = False
    # laws stated only up to a scalar factor declare it here; soundness
    # checking then compares the two sides up to a global scalar
    up_to_scalar: bool = False

    def __post_init__(self) -> None:
        if self.lhs.dom != self.rhs.dom or self.lhs.cod != self.rhs.cod:
            raise RewriteError(
                f"rule {self.name}: lhs and rhs must share boundary types")

    def reversed(self) -> "RewriteRule":
        return RewriteRule(self.name + "~", self.rhs, self.lhs,
                           spider_aware=self.spider_aware,
                           up_to_scalar=self.up_to_scalar)


@dataclass
class Matching:
    """An occurrence of a pattern in a host diagram.

    ``host`` is the diagram the node/wire maps refer to.  For spider-aware
    matches that required splitting a host spider, ``host`` is the split
    variant while ``origin`` stays the diagram handed to ``find_matchings``.
    """

    host: Diagram
    nodes: dict[int, int]
    wire_map: dict[Wire, Wire]
    origin: Optional[Diagram] = None

    def __post_init__(self) -> None:
        if self.origin is None:
            self.origin = self.host

    def key(self) -> tuple:
        return tuple(sorted(self.nodes.values()))


def _node_matches(pattern: Diagram, pid: int, host: Diagram, hid: int) -> bool:
    p, h = pattern.nodes[pid], host.nodes[hid]
    if p.gen != h.gen or not phases_equal(p.phase, h.phase):
        return False
    return len(p.ins) == len(h.ins) and len(p.outs) == len(h.outs)


def find_matchings(pattern: Diagram, host: Diagram,
                   spider_aware: bool = False) -> list[Matching]:
    """All injective occurrences of ``pattern`` in ``host``, sorted by the
    matched host node ids."""
    if not pattern.nodes:
        return []
    for (sn, _), (dn, _) in pattern.wires:
        if sn == IN_B and dn == OUT_B:
            raise RewriteError("patterns with straight-through boundary "
                               "wires are not supported")
    hosts = [host]
    if spider_aware:
        hosts += _split_variants(pattern, host)
    found: list[Matching] = []
    seen_keys: set = set()
    for h in hosts:
        for m in _exact_matchings(pattern, h):
            m.origin = host
            k = (id(h), m.key(), tuple(sorted(m.wire_map.values())))
            if k not in seen_keys:
                seen_keys.add(k)
                found.append(m)
    found.sort(key=lambda m: m.key())
    return found


def _exact_matchings(pattern: Diagram, host: Diagram) -> Iterator[Matching]:
    pids = sorted(pattern.nodes)

    def backtrack(i: int, nmap: dict[int, int], used: set[int]):
        if i == len(pids):
            yield from _assign_wires(pattern, host, nmap)
            return
        pid = pids[i]
        for hid in sorted(host.nodes):
            if hid in used or not _node_matches(pattern, pid, host, hid):
                continue
            nmap[pid] = hid
            used.add(hid)
            yield from backtrack(i + 1, nmap, used)
            used.remove(hid)
            del nmap[pid]

    yield from backtrack(0, {}, set())


def _assign_wires(pattern: Diagram, host: Diagram,
                  nmap: dict[int, int]) -> Iterator[Matching]:
    """Injectively map pattern wires to host wires consistent with ``nmap``."""
    pwires = list(pattern.wires)

    def end_candidates(end: End, is_src: bool, hw: Wire) -> bool:
        n, s = end
        hend = hw[0] if is_src else hw[1]
        if n < 0:
            # pattern boundary: the host end is a cut point; it must not be
            # a port of a matched node (that port needs its own wire image)
            return hend[0] < 0 or hend[0] not in nmap.values()
        if hend[0] != nmap[n]:
            return False
        ordered = pattern.kind_of(n) == KIND_PLAIN
        return (hend[1] == s) if ordered else True

    def backtrack(i: int, wmap: dict[Wire, Wire], used: set[Wire]):
        if i == len(pwires):
            yield Matching(host, dict(nmap), dict(wmap))
            return
        pw = pwires[i]
        for hw in host.wires:
            if hw in used:
                continue
            if end_candidates(pw[0], True, hw) and end_candidates(pw[1], False, hw):
                wmap[pw] = hw
                used.add(hw)
                yield from backtrack(i + 1, wmap, used)
                used.remove(hw)
                del wmap[pw]

    yield from backtrack(0, {}, set())


def _split_variants(pattern: Diagram, host: Diagram) -> list[Diagram]:
    """Hosts with one spider split so an over-sized host spider can match a
    boundary-legged pattern spider of smaller arity.

    The kept part gets exactly the pattern's arity, one of its legs being a
    fresh join wire to the residual spider; that leg can only be the image
    of a pattern boundary leg, so the pattern must have one on the join
    side.  All bounded leg subsets are enumerated.
    """
    variants: list[Diagram] = []
    for pid in sorted(pattern.nodes):
        if pattern.kind_of(pid) != KIND_SPIDER:
            continue
        p = pattern.nodes[pid]
        bnd_out = any(sn == pid and dn < 0 for (sn, _), (dn, _) in pattern.wires)
        bnd_in = any(dn == pid and sn < 0 for (sn, _), (dn, _) in pattern.wires)
        if not (bnd_out or bnd_in):
            continue
        p_in, p_out = len(p.ins), len(p.outs)
        for hid in sorted(host.nodes):
            h = host.nodes[hid]
            if host.kind_of(hid) != KIND_SPIDER or h.gen != p.gen:
                continue
            if not phases_equal(p.phase, h.phase):
                continue
            h_in, h_out = len(h.ins), len(h.outs)
            if h_in < p_in or h_out < p_out or (h_in, h_out) == (p_in, p_out):
                continue
            if h_in + h_out > 10:
                continue  # enumeration guard
            if bnd_out and p_out >= 1:
                for ins in itertools.combinations(range(h_in), p_in):
                    for outs in itertools.combinations(range(h_out), p_out - 1):
                        variants.append(
                            _split_spider(host, hid, ins, outs, "out"))
            if bnd_in and p_in >= 1:
                for ins in itertools.combinations(range(h_in), p_in - 1):
                    for outs in itertools.combinations(range(h_out), p_out):
                        variants.append(
                            _split_spider(host, hid, ins, outs, "in"))
    return variants


def _split_spider(host: Diagram, hid: int, keep_ins: tuple[int, ...],
                  keep_outs: tuple[int, ...], join: str) -> Diagram:
    """Split spider ``hid``: the kept part takes the listed host legs plus a
    join leg on the given side; the residual spider takes the rest."""
    node = host.nodes[hid]
    carrier = (node.ins + node.outs)[0]
    kept_id = max(host.nodes) + 1
    res_id = kept_id + 1
    rest_ins = [s for s in range(len(node.ins)) if s not in keep_ins]
    rest_outs = [s for s in range(len(node.outs)) if s not in keep_outs]
    if join == "out":
        kept = Node(node.gen, (carrier,) * len(keep_ins),
                    (carrier,) * (len(keep_outs) + 1), node.phase)
        resid = Node(node.gen, (carrier,) * (len(rest_ins) + 1),
                     (carrier,) * len(rest_outs), None)
        join_wire: Wire = ((kept_id, len(keep_outs)), (res_id, len(rest_ins)))
    else:
        kept = Node(node.gen, (carrier,) * (len(keep_ins) + 1),
                    (carrier,) * len(keep_outs), node.phase)
        resid = Node(node.gen, (carrier,) * len(rest_ins),
                     (carrier,) * (len(rest_outs) + 1), None)
        join_wire = ((res_id, len(rest_outs)), (kept_id, len(keep_ins)))
    in_map = {s: (kept_id, i) for i, s in enumerate(keep_ins)}
    in_map.update({s: (res_id, i) for i, s in enumerate(rest_ins)})
    out_map = {s: (kept_id, i) for i, s in enumerate(keep_outs)}
    out_map.update({s: (res_id, i) for i, s in enumerate(rest_outs)})

    nodes = {nid: nd for nid, nd in host.nodes.items() if nid != hid}
    nodes[kept_id] = kept
    nodes[res_id] = resid
    wires: list[Wire] = []
    for (sn, ss), (dn, ds) in host.wires:
        src: End = out_map[ss] if sn == hid else (sn, ss)
        dst: End = in_map[ds] if dn == hid else (dn, ds)
        wires.append((src, dst))
    wires.append(join_wire)
    return Diagram(host.sig, host.dom, host.cod, nodes, wires)


def apply_rule(rule: RewriteRule, host: Diagram, at: Matching) -> Diagram:
    """Boundary-preserving replacement of the matched occurrence."""
    if host is not at.origin and host != at.origin:
        raise RewriteError("stale matching: it was found on a different host")
    host = at.host
    for pid, hid in at.nodes.items():
        if hid not in host.nodes or not _node_matches(rule.lhs, pid, host, hid):
            raise RewriteError("stale matching: host no longer contains the "
                               "matched occurrence")
    matched = set(at.nodes.values())
    used_host_wires = set(at.wire_map.values())

    # surviving loose ends for each pattern boundary slot
    cut_src: dict[int, End] = {}
    cut_dst: dict[int, End] = {}
    for pw, hw in at.wire_map.items():
        (psn, pss), (pdn, pds) = pw
        if psn == IN_B:
            cut_src[pss] = hw[0]
        if pdn == OUT_B:
            cut_dst[pds] = hw[1]

    base = (max(host.nodes) + 1) if host.nodes else 0
    nodes = {nid: nd for nid, nd in host.nodes.items() if nid not in matched}
    for rid, nd in rule.rhs.nodes.items():
        nodes[base + rid] = nd

    wires: list[Wire] = []
    for hw in host.wires:
        if hw in used_host_wires:
            continue
        if hw[0][0] in matched or hw[1][0] in matched:
            raise RewriteError("stale matching: unmatched wire touches the "
                               "matched region")
        wires.append(hw)

    for (sn, ss), (dn, ds) in rule.rhs.wires:
        src: End = cut_src[ss] if sn == IN_B else (base + sn, ss)
        dst: End = cut_dst[ds] if dn == OUT_B else (base + dn, ds)
        wires.append((src, dst))

    return Diagram(host.sig, host.dom, host.cod, nodes, wires).renumbered()


def rewrite_to_fixpoint(d: Diagram, rules: Sequence[RewriteRule],
                        budget: int = 10_000) -> tuple[Diagram, int]:
    """Leftmost-innermost style strategy: repeatedly apply the first rule
    with the smallest matching until none applies or the budget runs out."""
    steps = 0
    current = d
    while steps < budget:
        progressed = False
        for rule in rules:
            ms = find_matchings(rule.lhs, current, spider_aware=rule.spider_aware)
            if ms:
                current = apply_rule(rule, current, ms[0])
                steps += 1
                progressed = True
                break
        if not progressed:
            return current, steps
    return current, steps


def equivalent_within(d1: Diagram, d2: Diagram, rules: Sequence[RewriteRule],
                      budget: int = 10_000) -> bool:
    """Bidirectional search for a rewrite path, using rules in both
    directions (the symmetric-reflexive-transitive closure), within a step
    budget."""
    from .textio import print_diagram

    both = list(rules) + [r.reversed() for r in rules]

    def canon(d: Diagram) -> str:
        return print_diagram(d)

    seen_a = {canon(d1): d1}
    seen_b = {canon(d2): d2}
    frontier_a, frontier_b = [d1], [d2]
    steps = 0
    while steps < budget and (frontier_a or frontier_b):
        if set(seen_a) & set(seen_b):
            return True
        for seen, frontier in ((seen_a, frontier_a), (seen_b, frontier_b)):
            next_front = []
            for d in frontier:
                for rule in both:
                    for m in find_matchings(rule.lhs, d,
                                            spider_aware=rule.spider_aware):
                        steps += 1
                        out = apply_rule(rule, d, m)
                        key = canon(out)
                        if key not in seen:
                            seen[key] = out
                            next_front.append(out)
                        if steps >= budget:
                            break
                    if steps >= budget:
                        break
                if steps >= budget:
                    break
            frontier[:] = next_front
    return bool(set(seen_a) & set(seen_b))


# -- spider fusion -----------------------------------------------------------------


def spider_fuse(d: Diagram) -> Diagram:
    """Merge same-colour adjacent spiders, adding phases, to fixpoint."""
    current = d
    while True:
        hit = _find_fusable(current)
        if hit is None:
            return current.renumbered()
        current = _fuse(current, *hit)


def _find_fusable(d: Diagram) -> Optional[tuple[int, int]]:
    for (sn, _), (dn, _) in d.wires:
        if sn >= 0 and dn >= 0 and sn != dn \
                and d.kind_of(sn) == KIND_SPIDER and d.kind_of(dn) == KIND_SPIDER \
                and d.nodes[sn].gen == d.nodes[dn].gen:
            return sn, dn
    return None


def _fuse(d: Diagram, a: int, b: int) -> Diagram:
    na, nb = d.nodes[a], d.nodes[b]
    carrier = (na.ins + na.outs)[0]
    shared = [w for w in d.wires
              if (w[0][0] == a and w[1][0] == b) or (w[0][0] == b and w[1][0] == a)]
    new_id = max(d.nodes) + 1

    in_ends: list[End] = []
    out_ends: list[End] = []
    remap_in: dict[End, int] = {}
    remap_out: dict[End, int] = {}
    for nid in (a, b):
        node = d.nodes[nid]
        for s in range(len(node.ins)):
            w = d.in_wire((nid, s))
            if w in shared:
                continue
            remap_in[(nid, s)] = len(in_ends)
            in_ends.append((nid, s))
        for s in range(len(node.outs)):
            w = d.out_wire((nid, s))
            if w in shared:
                continue
            remap_out[(nid, s)] = len(out_ends)
            out_ends.append((nid, s))

    merged = Node(na.gen, (carrier,) * len(in_ends), (carrier,) * len(out_ends),
                  phase_add(na.phase, nb.phase))
    nodes = {nid: nd for nid, nd in d.nodes.items() if nid not in (a, b)}
    nodes[new_id] = merged
    wires: list[Wire] = []
    for w in d.wires:
        if w in shared:
            continue
        (sn, ss), (dn, ds) = w
        src: End = (new_id, remap_out[(sn, ss)]) if sn in (a, b) else (sn, ss)
        dst: End = (new_id, remap_in[(dn, ds)]) if dn in (a, b) else (dn, ds)
        wires.append((src, dst))
    return _repair_feedback(d.sig, d.dom, d.cod, nodes, wires, new_id, carrier)


def _repair_feedback(sig: Signature, dom, cod, nodes: dict[int, Node],
                     wires: list[Wire], merged: int, carrier: str) -> Diagram:
    """Fusing two spiders with a path between them creates feedback into
    the merged node; reroute each such wire through a cup/cap pair so the
    node digraph stays acyclic (the bent pair is an identity wire)."""
    while True:
        cyclic = _cycle_wire_into(nodes, wires, merged)
        if cyclic is None:
            break
        cup_decl = sig.gen(f"cup_{carrier}")
        cap_decl = sig.gen(f"cap_{carrier}")
        cup_id = max(nodes) + 1
        cap_id = cup_id + 1
        nodes[cup_id] = Node(cup_decl.name, cup_decl.ins, cup_decl.outs)
        nodes[cap_id] = Node(cap_decl.name, cap_decl.ins, cap_decl.outs)
        src, dst = cyclic
        wires.remove(cyclic)
        wires.append((src, (cap_id, 0)))
        wires.append(((cup_id, 1), dst))
        wires.append(((cup_id, 0), (cap_id, 1)))
    return Diagram(sig, dom, cod, nodes, wires)


def _cycle_wire_into(nodes: dict[int, Node], wires: list[Wire],
                     merged: int) -> Optional[Wire]:
    succs: dict[int, set[int]] = {nid: set() for nid in nodes}
    for (sn, _), (dn, _) in wires:
        if sn >= 0 and dn >= 0:
            succs[sn].add(dn)
    # nodes reachable from the merged node
    reach, stack = set(), [merged]
    while stack:
        x = stack.pop()
        for y in succs.get(x, ()):  # noqa: B905
            if y not in reach:
                reach.add(y)
                stack.append(y)
    for w in sorted(wires):
        (sn, _), (dn, _) = w
        if dn == merged and sn >= 0 and sn in reach:
            return w
    return None


def remove_identity_spiders(d: Diagram) -> Diagram:
    """Drop phaseless (1,1) spiders, joining their two wires."""
    current = d
    changed = True
    while changed:
        changed = False
        for nid, nd in sorted(current.nodes.items()):
            if current.kind_of(nid) == KIND_SPIDER and len(nd.ins) == 1 \
                    and len(nd.outs) == 1 \
                    and (nd.phase is None or nd.phase.is_zero()):
                w_in = current.in_wire((nid, 0))
                w_out = current.out_wire((nid, 0))
                if w_in[0] == (nid, 0):
                    continue  # self-loop spider; leave alone
                nodes = {k: v for k, v in current.nodes.items() if k != nid}
                wires = [w for w in current.wires if w not in (w_in, w_out)]
                wires.append((w_in[0], w_out[1]))
                current = Diagram(current.sig, current.dom, current.cod,
                                  nodes, wires)
                changed = True
                break
    return current.renumbered()


# -- characteristic matrix and normal form ----------------------------------------


@dataclass
class CharacteristicMatrix:
    """Forward-path counts: entry (i, j) is the number of directed paths
    from input i to output j."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CharacteristicMatrix) and self.rows == other.rows

    def to_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def __repr__(self) -> str:
        return f"CharacteristicMatrix({self.rows})"


MONOID_COLOUR = "gray"     # multiplication-and-unit spiders in the fragment
COMONOID_COLOUR = "white"  # copy-and-delete spiders in the fragment


def _check_fragment(d: Diagram, monoid: str, comonoid: str) -> None:
    for nid, nd in d.nodes.items():
        if d.kind_of(nid) != KIND_SPIDER:
            raise UnsupportedFragment(
                f"node {nid} ({nd.gen}) is not a bialgebra-fragment generator")
        if nd.phase is not None and not nd.phase.is_zero():
            raise UnsupportedFragment("fragment spiders must be phaseless")
        if nd.gen == monoid:
            if len(nd.outs) != 1:
                raise UnsupportedFragment(
                    f"{monoid} spider {nid} must have exactly one output")
        elif nd.gen == comonoid:
            if len(nd.ins) != 1:
                raise UnsupportedFragment(
                    f"{comonoid} spider {nid} must have exactly one input")
        else:
            raise UnsupportedFragment(f"foreign spider colour {nd.gen}")


def characteristic_matrix(d: Diagram, monoid: str = MONOID_COLOUR,
                          comonoid: str = COMONOID_COLOUR) -> CharacteristicMatrix:
    _check_fragment(d, monoid, comonoid)
    n_in, n_out = len(d.dom), len(d.cod)
    by_dst = {w[1]: w for w in d.wires}
    counts: dict[Wire, np.ndarray] = {}

    def wire_vec(w: Wire) -> np.ndarray:
        return counts[w]

    for w in d.wires:
        if w[0][0] == IN_B:
            v = np.zeros(n_in, dtype=np.int64)
            v[w[0][1]] = 1
            counts[w] = v

    for nid in d.topological_order():
        node = d.nodes[nid]
        acc = np.zeros(n_in, dtype=np.int64)
        for s in range(len(node.ins)):
            acc = acc + wire_vec(by_dst[(nid, s)])
        for w in d.wires:
            if w[0][0] == nid:
                counts[w] = acc.copy()

    rows = []
    for i in range(n_in):
        row = []
        for j in range(n_out):
            w = by_dst[(OUT_B, j)]
            row.append(int(wire_vec(w)[i]))
        rows.append(tuple(row))
    return CharacteristicMatrix(tuple(rows))


def normal_form_from_matrix(sig: Signature, chi: CharacteristicMatrix,
                            carrier: str, monoid: str = MONOID_COLOUR,
                            comonoid: str = COMONOID_COLOUR) -> Diagram:
    """The canonical comonoid-below/monoid-above diagram for a path-count
    matrix: one copy spider per input, one multiply spider per output, with
    wire multiplicities read directly off the matrix."""
    n_in, n_out = chi.shape
    arr = chi.to_array()
    nodes: dict[int, Node] = {}
    wires: list[Wire] = []
    for i in range(n_in):
        fan = int(arr[i, :].sum()) if n_out else 0
        nodes[i] = Node(comonoid, (carrier,), (carrier,) * fan)
        wires.append(((IN_B, i), (i, 0)))
    for j in range(n_out):
        collect = int(arr[:, j].sum()) if n_in else 0
        nodes[n_in + j] = Node(monoid, (carrier,) * collect, (carrier,))
        wires.append(((n_in + j, 0), (OUT_B, j)))
    out_slot = [0] * n_in
    in_slot = [0] * n_out
    for i in range(n_in):
        for j in range(n_out):
            for _ in range(int(arr[i, j])):
                wires.append(((i, out_slot[i]), (n_in + j, in_slot[j])))
                out_slot[i] += 1
                in_slot[j] += 1
    return Diagram(sig, (carrier,) * n_in, (carrier,) * n_out, nodes, wires)


def bialg_normal_form(d: Diagram, monoid: str = MONOID_COLOUR,
                      comonoid: str = COMONOID_COLOUR) -> Diagram:
    chi = characteristic_matrix(d, monoid, comonoid)
    carrier = d.dom[0] if d.dom else (d.cod[0] if d.cod else None)
    if carrier is None:
        carrier = next(iter(d.nodes.values())).outs[0] if d.nodes else None
    if carrier is None:
        return d
    return normal_form_from_matrix(d.sig, chi, carrier, monoid, comonoid)


def collapse_bipartite(d: Diagram, pair=None, monoid: str = MONOID_COLOUR,
                       comonoid: str = COMONOID_COLOUR) -> Diagram:
    """Collapse a connected complete-bipartite copy/multiply region into the
    two-spider form: one multiply spider collecting all inputs feeding one
    copy spider emitting all outputs."""
    _check_fragment(d, monoid, comonoid)
    comps = d.components()
    if len(comps) != 1:
        raise RewriteError("region is not connected")
    for (sn, _), (dn, _) in d.wires:
        if sn >= 0 and dn >= 0 and d.nodes[sn].gen == d.nodes[dn].gen:
            raise RewriteError("region is not bipartite in the two colours")
    chi = characteristic_matrix(d, monoid, comonoid)
    if any(x != 1 for row in chi.rows for x in row):
        raise RewriteError("region is not complete bipartite "
                           f"(path counts {chi.rows})")
    n_in, n_out = chi.shape
    carrier = d.dom[0]
    nodes = {
        0: Node(monoid, (carrier,) * n_in, (carrier,)),
        1: Node(comonoid, (carrier,), (carrier,) * n_out),
    }
    wires: list[Wire] = [((0, 0), (1, 0))]
    for i in range(n_in):
        wires.append(((IN_B, i), (0, i)))
    for j in range(n_out):
        wires.append(((1, j), (OUT_B, j)))
    return Diagram(d.sig, d.dom, d.cod, nodes, wires)
