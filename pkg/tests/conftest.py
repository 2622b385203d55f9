import random

import numpy as np
import pytest

from gct.diagram import Diagram, compose, tensor_many
from gct.groups import Param
from gct.laws import qubit_pair
from gct.theories import (boolcirc_fixture, pair_signature,
                          qubit_pair_binding, qucirc_fixture, spek_fixture,
                          stab_fixture)


@pytest.fixture(scope="session")
def qucirc():
    return qucirc_fixture()


@pytest.fixture(scope="session")
def boolcirc():
    return boolcirc_fixture()


@pytest.fixture(scope="session")
def stab():
    return stab_fixture()


@pytest.fixture(scope="session")
def spek():
    return spek_fixture()


@pytest.fixture(scope="session")
def zx():
    return qubit_pair()


@pytest.fixture(scope="session")
def psig():
    return pair_signature()


@pytest.fixture(scope="session")
def pbind():
    return qubit_pair_binding()


def random_qucirc_diagram(sig, rng: random.Random, max_layers: int = 4,
                          max_width: int = 3) -> Diagram:
    """Random layered circuit over the quantum-circuit generators."""
    width = rng.randint(0, max_width)
    d = Diagram.identity(sig, ("Q",) * width)
    gens_by_arity = {
        0: ["ket0", "ket1"],
        1: ["Z", "X", "bra0", "bra1"],
        2: ["CX", "cap_Q"],
    }
    for _ in range(rng.randint(1, max_layers)):
        width = len(d.cod)
        items = []
        remaining = width
        while remaining > 0:
            arities = [a for a in (1, 2) if a <= remaining]
            a = rng.choice(arities)
            name = rng.choice(gens_by_arity[a] + ["id"])
            if name == "id":
                items.append(Diagram.identity(sig, ("Q",)))
                remaining -= 1
                continue
            phase = Param(rng.uniform(-2 * np.pi, 2 * np.pi)) \
                if sig.gen(name).phased else None
            items.append(Diagram.generator(sig, name, phase=phase))
            remaining -= a
        if rng.random() < 0.3 and len(d.cod) < max_width:
            items.append(Diagram.generator(sig, rng.choice(gens_by_arity[0])))
        layer = tensor_many(sig, items)
        if rng.random() < 0.4 and len(d.cod) > 1:
            order = list(range(len(d.cod)))
            rng.shuffle(order)
            d = compose(d, Diagram.permutation(sig, d.cod, order))
        d = compose(d, layer)
    return d


def random_spider_composite(sig, colour: str, rng: random.Random,
                            grow: int = 5, max_legs: int = 5) -> Diagram:
    """Random connected composite of (2,1)/(0,1)/(1,2)/(1,0) spiders."""
    seeds = [(2, 1), (0, 1), (1, 2), (1, 0)]
    d = Diagram.spider(sig, colour, *rng.choice(seeds))
    for _ in range(grow):
        n_in, n_out = len(d.dom), len(d.cod)
        moves = []
        if n_out >= 1 and n_out < max_legs:
            moves.append("top-delta")
        if n_out >= 1:
            moves.append("top-eps")
        if n_out >= 2:
            moves.append("top-mu")
        if n_in >= 1:
            moves.append("bot-eta")
        if n_in >= 1 and n_in < max_legs:
            moves.append("bot-mu")
        if n_in >= 2:
            moves.append("bot-delta")
        if not moves:
            break
        move = rng.choice(moves)
        if move.startswith("top"):
            legs = {"top-delta": (1, 2), "top-eps": (1, 0), "top-mu": (2, 1)}[move]
            g = Diagram.spider(sig, colour, *legs)
            pos = rng.randint(0, n_out - legs[0])
            layer = tensor_many(sig, [
                Diagram.identity(sig, d.cod[:pos]), g,
                Diagram.identity(sig, d.cod[pos + legs[0]:])])
            d = compose(d, layer)
        else:
            legs = {"bot-eta": (0, 1), "bot-mu": (2, 1), "bot-delta": (1, 2)}[move]
            g = Diagram.spider(sig, colour, *legs)
            pos = rng.randint(0, n_in - legs[1])
            layer = tensor_many(sig, [
                Diagram.identity(sig, d.dom[:pos]), g,
                Diagram.identity(sig, d.dom[pos + legs[1]:])])
            d = compose(layer, d)
    return d


def random_fragment_diagram(sig, rng: random.Random, max_width: int = 4,
                            layers: int = 3) -> Diagram:
    """Random acyclic diagram over the bialgebra fragment generators."""
    width = rng.randint(1, max_width)
    d = Diagram.identity(sig, ("Q",) * width)
    specs = [("gray", 2, 1), ("gray", 0, 1), ("white", 1, 2), ("white", 1, 0)]
    for _ in range(layers):
        width = len(d.cod)
        items = []
        remaining = width
        while remaining > 0:
            usable = [s for s in specs if s[1] <= remaining] + [None]
            s = rng.choice(usable)
            if s is None:
                items.append(Diagram.identity(sig, ("Q",)))
                remaining -= 1
            else:
                items.append(Diagram.spider(sig, s[0], s[1], s[2]))
                remaining -= s[1]
        if rng.random() < 0.3:
            items.append(Diagram.spider(sig, "gray", 0, 1))
        layer = tensor_many(sig, items)
        if len(layer.dom) != len(d.cod):
            continue
        if rng.random() < 0.4 and len(d.cod) > 1:
            order = list(range(len(d.cod)))
            rng.shuffle(order)
            d = compose(d, Diagram.permutation(sig, d.cod, order))
        d = compose(d, layer)
        if len(d.cod) > 2 * max_width:
            break
    return d
