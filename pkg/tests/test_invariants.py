"""Cross-module invariants that don't belong to a single unit."""

import random

import numpy as np
import pytest

from gct.diagram import Diagram, compose, iso_equal, tensor, yank_normalize
from gct.groups import Angle
from gct.model import check_soundness, interpret
from gct.rewrite import apply_rule, find_matchings
from gct.tensor import Tensor, global_scalar
from gct.theories import fixture, pair_signature


def test_scalar_mobility_preserves_iso_and_evaluation(qucirc):
    sig, m = qucirc.signature, qucirc.model("qubit")
    scalar = compose(Diagram.generator(sig, "ket0"),
                     Diagram.generator(sig, "bra1"))
    body = Diagram.generator(sig, "CX")
    placements = [tensor(scalar, body), tensor(body, scalar)]
    ref = interpret(placements[0], m)
    for d in placements[1:]:
        assert iso_equal(placements[0], d)
        assert interpret(d, m).max_deviation(ref) <= 1e-12


def test_yank_soundness_boolean_exact(spek):
    from gct.diagram import cap, cup

    sig, m = spek.signature, spek.model("spek")
    wire = Diagram.identity(sig, ("T",))
    zig = compose(tensor(wire, cup(sig, "T")), tensor(cap(sig, "T"), wire))
    d = compose(Diagram.generator(sig, "z0"), zig)
    y = yank_normalize(d)
    assert len(y.nodes) < len(d.nodes)
    assert interpret(d, m) == interpret(y, m)  # exact boolean equality


def test_partition_independence_boolean(spek):
    sig, m = spek.signature, spek.model("spek")
    d = compose(compose(Diagram.generator(sig, "z0"),
                        Diagram.generator(sig, "p1230")),
                Diagram.spider(sig, "white", 1, 2))
    ref = interpret(d, m)
    for seed in range(5):
        assert interpret(d, m, rng=random.Random(seed)) == ref


def test_builtin_rules_preserve_evaluation_on_random_hosts():
    """Hopf and bialgebra moves preserve the qubit-pair evaluation up to the
    declared scalar, with the redex planted in random spider contexts."""
    sig = pair_signature()
    fx = fixture("obspair")
    binding = fx.models["qubit-pair"]
    rng = random.Random(6)
    applied = 0
    for rule in fx.rules:
        for _ in range(50):
            host = _plant(sig, rule.lhs, rng)
            ms = find_matchings(rule.lhs, host)
            assert ms, f"planted redex for {rule.name} not found"
            out = apply_rule(rule, host, ms[0])
            lam = global_scalar(interpret(out, binding),
                                interpret(host, binding))
            assert lam is not None, f"{rule.name} broke evaluation"
            applied += 1
    assert applied == 100


def _plant(sig, redex, rng):
    """Wrap a redex in random phased-spider layers on both sides."""
    colours = ["white", "gray"]

    def layer(types, below):
        items = []
        for _ in types:
            c = rng.choice(colours)
            items.append(Diagram.spider(sig, c, 1, 1,
                                        Angle(rng.uniform(0, 6))))
        out = items[0]
        for it in items[1:]:
            out = tensor(out, it)
        return out

    host = redex
    if host.dom:
        host = compose(layer(host.dom, True), host)
    if host.cod:
        host = compose(host, layer(host.cod, False))
    # occasionally a spectator wire alongside
    if rng.random() < 0.5:
        host = tensor(host, Diagram.spider(sig, rng.choice(colours), 0, 1))
    return host


def test_builtin_rules_sound_under_bindings():
    fx = fixture("obspair")
    rep = check_soundness(fx.rules, fx.models["qubit-pair"])
    assert rep.all_sound, rep.to_text()
    rep_z2 = check_soundness(fx.rules, fx.models["z2"])
    assert rep_z2.all_sound, rep_z2.to_text()


def test_spider_sum_identities(zx):
    """Sums of outer-product spiders over the classical points rebuild the
    copy and erase maps."""
    pts = [p.data.reshape(-1) for p in zx.white.points]
    delta = sum(np.outer(np.kron(v, v), v.conj()) for v in pts)
    assert np.abs(delta - zx.white.comult.data).max() <= 1e-12
    eps = sum(v.conj() for v in pts)
    assert np.abs(eps - zx.white.counit.data.reshape(-1)).max() <= 1e-12
    # generalized: the (1, n)-legged spider is the sum of n-fold outer spiders
    from gct.observables import spider

    for n in (1, 2, 3):
        s = spider(zx.white, 1, n)
        direct = sum(np.outer(_kron_pow(v, n), v.conj()) for v in pts)
        assert np.abs(s.data - direct).max() <= 1e-12


def _kron_pow(v, n):
    acc = np.array([1.0 + 0j])
    for _ in range(n):
        acc = np.kron(acc, v)
    return acc


def test_possibilistic_outcomes_flag(spek):
    from gct.cpm import CpmError, possibilistic_outcomes

    w = spek.models["spek"].observables["white"]
    pts = spek.extras["points"]
    assert possibilistic_outcomes(w, pts["z0"]) == [True, False]
    assert possibilistic_outcomes(w, pts["x0"]) == [True, True]
    with pytest.raises(CpmError):
        possibilistic_outcomes(w, Tensor.point([1, 0]))


def test_yank_preserves_evaluation_100_random(qucirc):
    from conftest import random_qucirc_diagram

    sig, m = qucirc.signature, qucirc.model("qubit")
    rng = random.Random(77)
    for _ in range(100):
        d = random_qucirc_diagram(sig, rng)
        y = yank_normalize(d)
        assert interpret(d, m).max_deviation(interpret(y, m)) <= 1e-9
