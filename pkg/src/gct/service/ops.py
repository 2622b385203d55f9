"""The service operations, shared by the HTTP endpoints and the CLI."""

from __future__ import annotations

import numpy as np

from ..groups import Angle, FiniteAbelianGroup
from ..laws import (LawReport, ObservablePair, check_coherence,
                    check_complementarity, check_enough_classical_points,
                    check_exponent_law, check_frobenius,
                    check_sharpness_implies_sc, check_strong_complementarity,
                    group_algebra_pair, max_two_sc_check, qubit_pair)
from ..model import check_soundness, default_tolerance, interpret
from ..nonlocality import (classify_phase_sum, ghz_correlations,
                           mermin_report, parity)
from ..observables import ObservableStructure
from ..rewrite import bialg_normal_form, rewrite_to_fixpoint, spider_fuse
from ..tensor import Tensor
from ..textio import parse_diagram, parse_rules, print_diagram
from ..theories import fixture, signature
from . import schemas


class UsageError(ValueError):
    """Bad request parameters (unknown names, malformed input)."""


def _sig12(x: float) -> float:
    if abs(x) < 1e-12:
        return 0.0
    return float(format(x, ".12g"))


def frel2_pair() -> ObservablePair:
    copy = ObservableStructure.from_relations(
        "white", 2, {(0, 0): 0, (1, 1): 1}, {0, 1},
        points=[Tensor(np.array([[True], [False]]), (), (2,)),
                Tensor(np.array([[False], [True]]), (), (2,))])
    xor = ObservableStructure.from_relations(
        "gray", 2, {(0, 0): 0, (1, 1): 0, (0, 1): 1, (1, 0): 1}, {0},
        points=[Tensor(np.array([[True], [True]]), (), (2,))])
    return ObservablePair(copy, xor, name="frel2 (copy, xor)")


_GROUPS = {
    "z2": (2,), "z3": (3,), "z4": (4,), "z2x2": (2, 2),
}


def resolve_pair(name: str) -> ObservablePair:
    name = name.lower()
    if name in ("zx", "qubit", "stab"):
        return qubit_pair()
    if name == "zz":
        p = qubit_pair()
        return ObservablePair(p.white, p.white, name="degenerate (Z, Z)")
    if name in _GROUPS:
        return group_algebra_pair(FiniteAbelianGroup(_GROUPS[name]))
    if name == "frel2":
        return frel2_pair()
    if name == "spek":
        from ..theories import spek_fixture
        return spek_fixture().extras["pair"]
    raise UsageError(f"unknown pair {name!r}; available: zx, zz, z2, z3, z4, "
                     "z2x2, frel2, spek")


def _qubit_triple() -> list[ObservableStructure]:
    p = qubit_pair()
    s = 1 / np.sqrt(2)
    y = ObservableStructure.from_copy_basis(
        "black", [np.array([s, 1j * s]), np.array([s, -1j * s])])
    return [p.white, p.gray, y]


def _tensor_payload(t: Tensor) -> schemas.TensorPayload:
    if t.semiring == "bool":
        entries = [[int(bool(x)) for x in row] for row in t.data]
    else:
        entries = [[[float(x.real), float(x.imag)] for x in row]
                   for row in t.data]
    return schemas.TensorPayload(semiring=t.semiring, dom=list(t.dom),
                                 cod=list(t.cod), entries=entries,
                                 text=t.to_text())


def _pretty_tensor(t: Tensor) -> str:
    """Human-facing rendering at 12 significant digits (the 17-digit form
    stays in the tensor payload)."""
    if t.is_scalar:
        v = t.scalar_value()
        if t.semiring == "bool":
            return f"scalar {int(v)}"
        re, im = format(v.real + 0.0, ".12g"), format(v.imag + 0.0, ".12g")
        return f"scalar ({re}, {im})"
    if t.semiring == "bool":
        return t.to_text()
    head = (f"tensor complex dom={','.join(map(str, t.dom)) or '-'} "
            f"cod={','.join(map(str, t.cod)) or '-'}")
    rows = [" ".join(f"({format(x.real + 0.0, '.12g')},"
                     f"{format(x.imag + 0.0, '.12g')})" for x in row)
            for row in t.data]
    return "\n".join([head] + rows)


def op_eval(req: schemas.EvalRequest) -> schemas.EvalResponse:
    try:
        d = parse_diagram(req.diagram, signature)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    fx = fixture(d.sig.name)
    try:
        binding = fx.model(req.model)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    t = interpret(d, binding)
    return schemas.EvalResponse(theory=d.sig.name, model=binding.name,
                                tensor=_tensor_payload(t),
                                pretty=_pretty_tensor(t))


def op_rewrite(req: schemas.RewriteRequest) -> schemas.RewriteResponse:
    try:
        d = parse_diagram(req.diagram, signature)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    if req.strategy == "fuse":
        out, steps = spider_fuse(d), -1
        steps = len(d.nodes) - len(out.nodes)
    elif req.strategy == "nf":
        out = bialg_normal_form(d)
        steps = 1
    elif req.strategy == "steps":
        if not req.rules:
            raise UsageError("strategy 'steps' needs --rule (builtin theory "
                             "name or rule-file text)")
        if "\n" in req.rules:
            rules = parse_rules(req.rules, signature)
        else:
            fx = fixture(req.rules)
            rules = fx.rules
            if not rules:
                raise UsageError(f"theory {req.rules!r} ships no rules")
        out, steps = rewrite_to_fixpoint(d, rules, budget=req.max_steps)
    else:
        raise UsageError(f"unknown strategy {req.strategy!r}")
    return schemas.RewriteResponse(diagram=print_diagram(out), steps=steps,
                                   strategy=req.strategy)


def _law_lines(rep: LawReport) -> list[schemas.LawLine]:
    lines = []
    for r in rep.results:
        lines.append(schemas.LawLine(
            name=r.name, passed=bool(r.passed),
            max_deviation=float(r.max_deviation),
            scalar_re=None if r.scalar is None else _sig12(r.scalar.real),
            scalar_im=None if r.scalar is None else _sig12(r.scalar.imag),
            note=r.note))
    return lines


def op_check(req: schemas.CheckRequest) -> schemas.CheckResponse:
    tol = req.tolerance or default_tolerance()
    law = req.law.lower()
    reports: list[LawReport] = []
    if law == "max-two":
        obs = _qubit_triple() if req.pair.lower() in ("zxy", "zx", "qubit") \
            else [resolve_pair(req.pair).white, resolve_pair(req.pair).gray]
        reports.append(max_two_sc_check(obs, tol=tol))
    else:
        pair = resolve_pair(req.pair)
        if law in ("frobenius", "all"):
            reports.append(check_frobenius(pair.white, tol=tol))
            reports.append(check_frobenius(pair.gray, tol=tol))
        if law in ("coherence", "all"):
            reports.append(check_coherence(pair, tol=tol))
        if law in ("complementarity", "hopf", "all"):
            reports.append(check_complementarity(pair, tol=tol))
        if law in ("strong-complementarity", "all"):
            reports.append(check_strong_complementarity(pair, tol=tol))
        if law in ("exponent",):
            if req.k is None:
                raise UsageError("the exponent law needs --k")
            reports.append(check_exponent_law(pair, req.k, tol=tol))
        if law == "sharpness" or (law == "all" and pair.semiring == "complex"):
            reports.append(check_sharpness_implies_sc(pair, tol=tol))
        if law in ("enough-points",):
            rep = LawReport(f"enough classical points for {pair.name}")
            for obs in (pair.white, pair.gray):
                ok = check_enough_classical_points(obs, tol=tol)
                rep.add(f"enough-points-{obs.colour}", ok, 0.0)
            reports.append(rep)
        if not reports:
            raise UsageError(f"unknown law {req.law!r}")
    lines: list[schemas.LawLine] = []
    pretty = []
    for rep in reports:
        lines.extend(_law_lines(rep))
        pretty.append(rep.to_text())
    return schemas.CheckResponse(
        subject="; ".join(r.subject for r in reports),
        passed=all(r.passed for r in reports),
        lines=lines, pretty="\n".join(pretty))


def resolve_ghz_pair(name: str) -> ObservablePair:
    """The GHZ harness wants the white structure to be the state-preparing
    copy observable with angle phases; for Z2 that is the qubit (Z, X) pair."""
    if name.lower() in ("z2", "zx", "qubit", "stab"):
        return qubit_pair()
    raise UsageError(f"ghz supports angle-phased qubit pairs (z2); got "
                     f"{name!r}")


def op_ghz(req: schemas.GhzRequest) -> schemas.GhzResponse:
    pair = resolve_ghz_pair(req.pair)
    if len(req.angles_degrees) != req.parties:
        raise UsageError(f"need {req.parties} angles, got "
                         f"{len(req.angles_degrees)}")
    angles = [Angle.from_degrees(a) for a in req.angles_degrees]
    joint = ghz_correlations(pair, angles)
    z2 = FiniteAbelianGroup((2,))
    par = parity(joint, z2) if len(pair.gray.points or []) == 2 else None
    kind, idx = classify_phase_sum(pair, angles)
    cls = kind if idx is None else f"{kind}[{idx}]"

    lhv_feasible = lhv_sat = lhv_total = None
    pretty = [f"GHZ-{req.parties} with angles "
              f"{', '.join(format(a, 'g') for a in req.angles_degrees)} deg "
              f"on pair {pair.name}",
              "joint outcome distribution:"]
    for lab, p in zip(joint.labels or [], joint.probs):
        if p > 1e-12:
            pretty.append(f"  {lab}: {format(p, '.12g')}")
    parity_dict: dict[str, float] = {}
    if par is not None:
        parity_dict = {lab: _sig12(float(p))
                       for lab, p in zip(par.labels or [], par.probs)}
        pretty.append(f"parity distribution: {parity_dict}")
    pretty.append(f"summed phase lands on: {cls}")

    if req.parties == 3 and len(pair.gray.points or []) == 2:
        rep = mermin_report(pair)
        lhv_feasible = rep.lhv.feasible
        lhv_sat, lhv_total = rep.lhv.satisfying, rep.lhv.total
        pretty.append("")
        pretty.append(rep.to_text())
    return schemas.GhzResponse(
        distribution={lab: _sig12(float(p))
                      for lab, p in zip(joint.labels or [], joint.probs)},
        parity=parity_dict, phase_sum_class=cls, lhv_feasible=lhv_feasible,
        lhv_satisfying=lhv_sat, lhv_total=lhv_total,
        pretty="\n".join(pretty))


def op_soundness(req: schemas.SoundnessRequest) -> schemas.SoundnessResponse:
    try:
        fx = fixture(req.theory)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    if not fx.rules:
        raise UsageError(f"theory {req.theory!r} ships no rewrite rules")
    try:
        binding = fx.model(req.model)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    rep = check_soundness(fx.rules, binding, samples=req.samples)
    entries = [schemas.SoundnessEntry(rule=e.rule_name, sound=e.sound,
                                      max_deviation=e.max_deviation,
                                      witness=e.witness)
               for e in rep.entries]
    return schemas.SoundnessResponse(theory=req.theory, model=binding.name,
                                     all_sound=rep.all_sound, entries=entries,
                                     pretty=rep.to_text())


def list_theories() -> dict:
    names = ["symgrp", "qucirc", "boolcirc", "stab", "spek", "obspair"]
    out = {}
    for n in names:
        fx = fixture(n)
        out[n] = {
            "generators": sorted(fx.signature.gens),
            "models": sorted(fx.models),
            "rules": [r.name for r in fx.rules],
        }
    return out
