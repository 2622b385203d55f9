"""Versioned line-oriented text format for diagrams and rule files.

Diagram files (``.gct``)::

    gct 1
    signature qucirc
    inputs -
    outputs -
    node n0 ket0
    node n1 X phase=a1.5707963267948966
    node n2 bra1
    wire n0:o0 n1:i0
    wire n1:o0 n2:i0

Ends are ``in:<k>`` / ``out:<k>`` for boundary slots and ``n<id>:i<k>`` /
``n<id>:o<k>`` for node ports.  Spiders carry ``legs=<n>:<m>``.  Phases are
``a<float>`` (angle, radians) or ``g<c1>,<c2>@<d1>x<d2>`` (finite group
element).  ``print_diagram`` emits the canonical serialization; parsing it
back and reprinting is bit-exact.

Rule files hold one or more named rules, each with an ``lhs`` and ``rhs``
block in the same body syntax.
"""

from __future__ import annotations

from typing import Callable, Optional, Union

from .diagram import IN_B, OUT_B, Diagram, Node, End
from .groups import Angle, FiniteAbelianGroup, Param, Phase
from .types import KIND_SPIDER, Signature

FORMAT_VERSION = 1

SigResolver = Union[Signature, Callable[[str], Signature]]


class ParseError(ValueError):
    def __init__(self, line: int, col: int, msg: str):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {msg}")


def _resolve(resolver: SigResolver, name: str, line: int) -> Signature:
    if isinstance(resolver, Signature):
        if resolver.name != name:
            raise ParseError(line, 11, f"expected signature {resolver.name}, "
                                       f"file declares {name}")
        return resolver
    return resolver(name)


def format_phase(phase: Optional[Phase]) -> str:
    if phase is None:
        raise ValueError("no phase to format")
    if isinstance(phase, Angle):
        return f"a{phase.value!r}"
    if isinstance(phase, Param):
        return f"p{phase.value!r}"
    coords = ",".join(str(c) for c in phase.coords)
    dims = "x".join(str(d) for d in phase.group.factors)
    return f"g{coords}@{dims}"


def parse_phase(token: str, line: int, col: int) -> Phase:
    if token.startswith("a"):
        try:
            return Angle(float(token[1:]))
        except ValueError:
            raise ParseError(line, col, f"bad angle phase {token!r}") from None
    if token.startswith("p"):
        try:
            return Param(float(token[1:]))
        except ValueError:
            raise ParseError(line, col, f"bad parameter {token!r}") from None
    if token.startswith("g"):
        try:
            coords_s, dims_s = token[1:].split("@")
            coords = tuple(int(c) for c in coords_s.split(","))
            dims = tuple(int(d) for d in dims_s.split("x"))
            return FiniteAbelianGroup(dims).element(coords)
        except (ValueError, IndexError):
            raise ParseError(line, col, f"bad group phase {token!r}") from None
    raise ParseError(line, col, f"unknown phase syntax {token!r}")


def _parse_end(token: str, ids: dict[str, int], line: int, col: int) -> tuple[End, bool]:
    """Returns (end, is_source_side)."""
    if ":" not in token:
        raise ParseError(line, col, f"malformed port {token!r}")
    head, tail = token.split(":", 1)
    if head == "in":
        return (IN_B, _int(tail, line, col)), True
    if head == "out":
        return (OUT_B, _int(tail, line, col)), False
    if head not in ids:
        raise ParseError(line, col, f"unknown node {head!r}")
    if tail[:1] == "i":
        return (ids[head], _int(tail[1:], line, col)), False
    if tail[:1] == "o":
        return (ids[head], _int(tail[1:], line, col)), True
    raise ParseError(line, col, f"node port must be i<k> or o<k>, got {tail!r}")


def _int(s: str, line: int, col: int) -> int:
    try:
        return int(s)
    except ValueError:
        raise ParseError(line, col, f"expected integer, got {s!r}") from None


class _Body:
    """Accumulates the body lines of one diagram."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.dom: tuple[str, ...] = ()
        self.cod: tuple[str, ...] = ()
        self.nodes: dict[int, Node] = {}
        self.ids: dict[str, int] = {}
        self.wires: list = []

    def feed(self, line_no: int, parts: list[str]) -> None:
        sig = self.sig
        kw = parts[0]
        if kw in ("inputs", "outputs"):
            types = () if parts[1:] == ["-"] else tuple(parts[1:])
            for t in types:
                if t not in sig.systems:
                    raise ParseError(line_no, len(kw) + 2,
                                     f"unknown system type {t!r}")
            if kw == "inputs":
                self.dom = types
            else:
                self.cod = types
        elif kw == "node":
            if len(parts) < 3:
                raise ParseError(line_no, 1, "node needs an id and a generator")
            name, gen = parts[1], parts[2]
            if name in self.ids:
                raise ParseError(line_no, 6, f"duplicate node id {name!r}")
            phase: Optional[Phase] = None
            legs: Optional[tuple[int, int]] = None
            for extra in parts[3:]:
                if extra.startswith("phase="):
                    phase = parse_phase(extra[6:], line_no, 1)
                elif extra.startswith("legs="):
                    try:
                        n, m = extra[5:].split(":")
                        legs = (int(n), int(m))
                    except ValueError:
                        raise ParseError(line_no, 1,
                                         f"bad legs spec {extra!r}") from None
                else:
                    raise ParseError(line_no, 1, f"unknown node field {extra!r}")
            decl = sig.gens.get(gen)
            if decl is None:
                raise ParseError(line_no, 1, f"unknown generator {gen!r} "
                                             f"in theory {sig.name}")
            if decl.kind == KIND_SPIDER:
                if legs is None:
                    raise ParseError(line_no, 1, f"spider {gen!r} needs legs=n:m")
                carrier = decl.carrier or "?"
                node = Node(gen, (carrier,) * legs[0], (carrier,) * legs[1], phase)
            else:
                node = Node(gen, decl.ins, decl.outs, phase)
            nid = len(self.nodes)
            self.nodes[nid] = node
            self.ids[name] = nid
        elif kw == "wire":
            if len(parts) != 3:
                raise ParseError(line_no, 1, "wire needs exactly two ports")
            e1, src1 = _parse_end(parts[1], self.ids, line_no, 6)
            e2, src2 = _parse_end(parts[2], self.ids, line_no, 6)
            if src1 and not src2:
                self.wires.append((e1, e2))
            elif src2 and not src1:
                self.wires.append((e2, e1))
            else:
                raise ParseError(line_no, 6,
                                 "wire must join a source port to a destination port")
        else:
            raise ParseError(line_no, 1, f"unknown directive {kw!r}")

    def build(self, line_no: int) -> Diagram:
        try:
            return Diagram(self.sig, self.dom, self.cod, self.nodes, self.wires)
        except ValueError as exc:
            raise ParseError(line_no, 1, f"invalid diagram: {exc}") from None


def parse_diagram(text: str, resolver: SigResolver) -> Diagram:
    sig: Optional[Signature] = None
    body: Optional[_Body] = None
    last_line = 1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "gct":
            if parts[1:] != [str(FORMAT_VERSION)]:
                raise ParseError(line_no, 5, f"unsupported format version "
                                             f"{' '.join(parts[1:])!r}")
        elif parts[0] == "signature":
            if len(parts) != 2:
                raise ParseError(line_no, 11, "signature needs a name")
            sig = _resolve(resolver, parts[1], line_no)
            body = _Body(sig)
        else:
            if body is None:
                raise ParseError(line_no, 1, "missing signature header")
            body.feed(line_no, parts)
    if body is None:
        raise ParseError(last_line, 1, "empty diagram file")
    return body.build(last_line)


def _body_lines(d: Diagram) -> list[str]:
    d = d.renumbered()
    lines = [
        "inputs " + (" ".join(d.dom) if d.dom else "-"),
        "outputs " + (" ".join(d.cod) if d.cod else "-"),
    ]
    for nid in sorted(d.nodes):
        nd = d.nodes[nid]
        decl = d.sig.gen(nd.gen)
        line = f"node n{nid} {nd.gen}"
        if nd.phase is not None and not nd.phase.is_zero():
            line += f" phase={format_phase(nd.phase)}"
        if decl.kind == KIND_SPIDER:
            line += f" legs={len(nd.ins)}:{len(nd.outs)}"
        lines.append(line)

    def fmt(end: End, is_src: bool) -> str:
        n, s = end
        if n == IN_B:
            return f"in:{s}"
        if n == OUT_B:
            return f"out:{s}"
        return f"n{n}:{'o' if is_src else 'i'}{s}"

    for src, dst in d.wires:
        lines.append(f"wire {fmt(src, True)} {fmt(dst, False)}")
    return lines


def print_diagram(d: Diagram) -> str:
    lines = [f"gct {FORMAT_VERSION}", f"signature {d.sig.name}"]
    lines += _body_lines(d)
    return "\n".join(lines) + "\n"


# -- rule files ---------------------------------------------------------------


def print_rules(rules, sig: Signature) -> str:
    lines = [f"gct-rules {FORMAT_VERSION}", f"signature {sig.name}"]
    for rule in rules:
        head = f"rule {rule.name}"
        if getattr(rule, "spider_aware", False):
            head += " spider-aware"
        if getattr(rule, "up_to_scalar", False):
            head += " up-to-scalar"
        lines.append(head)
        lines.append("lhs")
        lines += _body_lines(rule.lhs)
        lines.append("rhs")
        lines += _body_lines(rule.rhs)
        lines.append("endrule")
    return "\n".join(lines) + "\n"


def parse_rules(text: str, resolver: SigResolver) -> list:
    from .rewrite import RewriteRule

    sig: Optional[Signature] = None
    rules: list = []
    name: Optional[str] = None
    spider_aware = False
    up_to_scalar = False
    section: Optional[str] = None
    bodies: dict[str, _Body] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw == "gct-rules":
            continue
        if kw == "signature":
            sig = _resolve(resolver, parts[1], line_no)
            continue
        if kw == "rule":
            if len(parts) < 2:
                raise ParseError(line_no, 1, "rule needs a name")
            name = parts[1]
            spider_aware = "spider-aware" in parts[2:]
            up_to_scalar = "up-to-scalar" in parts[2:]
            bodies = {}
            section = None
            continue
        if kw in ("lhs", "rhs"):
            if sig is None or name is None:
                raise ParseError(line_no, 1, "lhs/rhs outside of a rule")
            section = kw
            bodies[kw] = _Body(sig)
            continue
        if kw == "endrule":
            if "lhs" not in bodies or "rhs" not in bodies:
                raise ParseError(line_no, 1, f"rule {name!r} missing lhs or rhs")
            rules.append(RewriteRule(name, bodies["lhs"].build(line_no),
                                     bodies["rhs"].build(line_no),
                                     spider_aware=spider_aware,
                                     up_to_scalar=up_to_scalar))
            name, section, bodies = None, None, {}
            continue
        if section is None:
            raise ParseError(line_no, 1, f"directive {kw!r} outside lhs/rhs block")
        bodies[section].feed(line_no, parts)
    return rules
