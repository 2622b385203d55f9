"""System types, generator declarations, and theory signatures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

UNIT = "I"  # the distinguished empty system; self-dual


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class SystemType:
    """A basic system.  ``dual_of`` names the dual type; None means self-dual."""

    name: str
    dual_of: Optional[str] = None

    @property
    def dual_name(self) -> str:
        return self.dual_of if self.dual_of is not None else self.name


# Generator kinds.  ``swap`` is listed for completeness but never occurs as
# a node: wire crossings are absorbed into the (unordered) wiring itself.
KIND_PLAIN = "plain"
KIND_SPIDER = "spider"
KIND_CUP = "cup"
KIND_CAP = "cap"
KIND_SWAP = "swap"


@dataclass(frozen=True)
class GeneratorDecl:
    """Declaration of a basic process.

    Spiders are arity-flexible: ``ins``/``outs`` are ignored for them and the
    node itself carries the leg counts.  ``colour`` tags which observable
    structure a spider belongs to.  ``phased`` marks plain generators with an
    angle parameter whose dagger negates the parameter (e.g. Z/X rotations).
    """

    name: str
    ins: tuple[str, ...] = ()
    outs: tuple[str, ...] = ()
    kind: str = KIND_PLAIN
    dagger: Optional[str] = None  # partner generator name; None = undeclared
    colour: Optional[str] = None
    carrier: Optional[str] = None
    phased: bool = False

    def dagger_name(self) -> Optional[str]:
        return self.dagger


class Signature:
    """A theory's basic systems and generator declarations."""

    def __init__(self, name: str, systems: Sequence[SystemType],
                 gens: Sequence[GeneratorDecl]):
        self.name = name
        self.systems = {s.name: s for s in systems}
        if UNIT not in self.systems:
            self.systems[UNIT] = SystemType(UNIT)
        self.gens = {g.name: g for g in gens}
        self._check()

    def _check(self) -> None:
        for s in self.systems.values():
            d = self.dual(s.name)
            if self.dual(d) != s.name:
                raise SignatureError(f"dual of {s.name} is not involutive")
        for g in self.gens.values():
            for t in g.ins + g.outs:
                if t not in self.systems:
                    raise SignatureError(f"{g.name} uses undeclared system {t}")
            if g.dagger is not None:
                partner = self.gens.get(g.dagger)
                if partner is None:
                    raise SignatureError(f"{g.name}: unknown dagger partner {g.dagger}")
                if partner.dagger != g.name:
                    raise SignatureError(f"dagger pairing {g.name}/{g.dagger} "
                                         "is not involutive")
                if g.kind == KIND_PLAIN and not g.phased:
                    if partner.ins != g.outs or partner.outs != g.ins:
                        raise SignatureError(
                            f"dagger partner of {g.name} must swap inputs/outputs")
            if g.kind == KIND_CUP:
                if g.ins or len(g.outs) != 2:
                    raise SignatureError(f"cup {g.name} must have no inputs, 2 outputs")
                a, b = g.outs
                if self.dual(a) != b:
                    raise SignatureError(f"cup {g.name} legs must be dual-paired")
            if g.kind == KIND_CAP:
                if g.outs or len(g.ins) != 2:
                    raise SignatureError(f"cap {g.name} must have 2 inputs, no outputs")
                a, b = g.ins
                if self.dual(a) != b:
                    raise SignatureError(f"cap {g.name} legs must be dual-paired")

    def dual(self, type_name: str) -> str:
        s = self.systems.get(type_name)
        if s is None:
            raise SignatureError(f"unknown system type {type_name}")
        return s.dual_name

    def gen(self, name: str) -> GeneratorDecl:
        g = self.gens.get(name)
        if g is None:
            raise SignatureError(f"unknown generator {name} in theory {self.name}")
        return g

    def has_gen(self, name: str) -> bool:
        return name in self.gens

    def __repr__(self) -> str:
        return f"Signature({self.name!r}, {len(self.gens)} generators)"
