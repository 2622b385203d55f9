"""Mixed-state layer: doubling, Kraus maps, measurements, Born vectors.

Density matrices are carried around as *names*: a d x d matrix rho is the
column vector of length d^2 obtained by row-major flattening, so a pure map
B acts on names as kron(B, conj(B)).  Quantum wires therefore contribute
d^2 to a name's length and classical wires contribute d.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .model import ModelBinding, interpret
from .observables import ObservableStructure, phase_action
from .groups import Phase, phase_neg
from .tensor import DEFAULT_TOL, Tensor


class CpmError(ValueError):
    pass


WireSpec = tuple[str, int]  # ('q', d) doubled quantum wire | ('c', d) classical


def _width(spec: Sequence[WireSpec]) -> int:
    n = 1
    for kind, d in spec:
        n *= d * d if kind == "q" else d
    return n


@dataclass
class CpmMap:
    """A completely positive map in name form.

    ``matrix`` maps flattened input names to flattened output names; the
    wire specs record which factors are doubled quantum wires and which are
    single classical wires.
    """

    matrix: np.ndarray
    dom: tuple[WireSpec, ...]
    cod: tuple[WireSpec, ...]

    def __post_init__(self) -> None:
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        want = (_width(self.cod), _width(self.dom))
        if self.matrix.shape != want:
            raise CpmError(f"matrix shape {self.matrix.shape}, expected {want}")

    def then(self, other: "CpmMap") -> "CpmMap":
        if self.cod != other.dom:
            raise CpmError(f"cannot plug {self.cod} into {other.dom}")
        return CpmMap(other.matrix @ self.matrix, self.dom, other.cod)

    def tensor(self, other: "CpmMap") -> "CpmMap":
        return CpmMap(np.kron(self.matrix, other.matrix),
                      self.dom + other.dom, self.cod + other.cod)

    @property
    def is_state(self) -> bool:
        return self.dom == ()

    def state_name(self) -> np.ndarray:
        if not self.is_state:
            raise CpmError("not a state")
        return self.matrix[:, 0]


CpmDiagram = CpmMap  # states/effects/maps all share the doubled form


# -- conversions ---------------------------------------------------------------


def density_to_name(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    return rho.reshape(-1)


def name_to_density(name: np.ndarray) -> np.ndarray:
    name = np.asarray(name, dtype=np.complex128).reshape(-1)
    d = int(round(np.sqrt(name.size)))
    if d * d != name.size:
        raise CpmError("name length is not a perfect square")
    return name.reshape(d, d)


def state_from_density(rho: np.ndarray) -> CpmMap:
    rho = np.asarray(rho, dtype=np.complex128)
    d = rho.shape[0]
    return CpmMap(density_to_name(rho).reshape(-1, 1), (), (("q", d),))


def _base_tensor(d, m: Optional[ModelBinding]) -> Tensor:
    if isinstance(d, Tensor):
        return d
    if m is None:
        raise CpmError("doubling a diagram needs a model binding")
    t = interpret(d, m)
    if t.semiring != "complex":
        raise CpmError("the mixed-state layer is defined over the complex model")
    return t


# -- doubling and Kraus form ----------------------------------------------------


def double(d, m: Optional[ModelBinding] = None) -> CpmMap:
    """Selinger doubling of a pure map: rho -> B rho B^dagger on names."""
    b = _base_tensor(d, m)
    din = int(np.prod(b.dom)) if b.dom else 1
    dout = int(np.prod(b.cod)) if b.cod else 1
    mat = np.kron(b.data, b.data.conj())
    dom = (("q", din),) if b.dom else ()
    cod = (("q", dout),) if b.cod else ()
    return CpmMap(mat.reshape(_width(cod), _width(dom)), dom, cod)


def kraus_cpm(maps: Sequence[Tensor]) -> CpmMap:
    """CPM with the given Kraus maps, built through the ancilla encoding
    B' = sum_i |i> (x) B_i and tracing out the ancilla."""
    if not maps:
        raise CpmError("need at least one Kraus map")
    dom, cod = maps[0].dom, maps[0].cod
    if any(t.dom != dom or t.cod != cod for t in maps):
        raise CpmError("Kraus maps must share input/output shapes")
    k = len(maps)
    din = int(np.prod(dom)) if dom else 1
    dout = int(np.prod(cod)) if cod else 1
    bprime = np.zeros((k * dout, din), dtype=np.complex128)
    for i, t in enumerate(maps):
        sel = np.zeros((k, 1), dtype=np.complex128)
        sel[i, 0] = 1.0
        bprime += np.kron(sel, t.data)
    total = np.zeros((dout * dout, din * din), dtype=np.complex128)
    for c in range(k):
        bc = bprime[c * dout:(c + 1) * dout, :]
        total += np.kron(bc, bc.conj())
    dom_spec = (("q", din),) if dom else ()
    cod_spec = (("q", dout),) if cod else ()
    return CpmMap(total.reshape(_width(cod_spec), _width(dom_spec)),
                  dom_spec, cod_spec)


# -- measurements and Born vectors -----------------------------------------------


def _obs_basis(obs: ObservableStructure) -> list[np.ndarray]:
    if obs.semiring != "complex":
        raise CpmError("measurements are defined over the complex model")
    if not obs.points:
        raise CpmError(f"observable {obs.colour} has no stored classical points")
    return [p.data.reshape(-1) for p in obs.points]


def measure_matrix(obs: ObservableStructure) -> np.ndarray:
    """Names -> outcome coefficients in the observable's basis."""
    basis = _obs_basis(obs)
    return np.stack([np.kron(x.conj(), x) for x in basis])


def prepare_matrix(obs: ObservableStructure) -> np.ndarray:
    """Outcome coefficients -> names (the adjoint preparation map)."""
    basis = _obs_basis(obs)
    return np.stack([np.kron(x, x.conj()) for x in basis]).T


def decoherence_matrix(obs: ObservableStructure) -> np.ndarray:
    return prepare_matrix(obs) @ measure_matrix(obs)


@dataclass
class BornVector:
    """A probability distribution over the classical points of an observable."""

    probs: np.ndarray
    observable: str
    labels: Optional[list[str]] = None

    def __post_init__(self) -> None:
        self.probs = np.asarray(self.probs, dtype=np.float64).reshape(-1)

    def is_valid(self, tol: float = DEFAULT_TOL) -> bool:
        return bool((self.probs >= -1e-12).all()
                    and abs(self.probs.sum() - 1.0) <= tol)

    def to_text(self) -> str:
        labels = self.labels or [str(i) for i in range(self.probs.size)]
        rows = [f"  {lab}: {format(p, '.12g')}"
                for lab, p in zip(labels, self.probs)]
        return "\n".join([f"born vector over {self.observable}:"] + rows)


StateLike = Union[CpmMap, np.ndarray]


def _as_name(state: StateLike, d: int) -> np.ndarray:
    if isinstance(state, CpmMap):
        name = state.state_name()
    else:
        arr = np.asarray(state, dtype=np.complex128)
        name = arr.reshape(-1) if arr.ndim == 1 or 1 in arr.shape \
            else density_to_name(arr)
    if name.size != d * d:
        raise CpmError(f"state has {name.size} entries, expected {d * d}")
    return name.reshape(-1)


def measure(obs: ObservableStructure, state: StateLike,
            rescale: bool = False, tol: float = DEFAULT_TOL) -> BornVector:
    """Born-rule measurement: entry i is Tr(|x_i><x_i| rho)."""
    name = _as_name(state, obs.dim)
    coeffs = measure_matrix(obs) @ name
    if np.abs(coeffs.imag).max(initial=0.0) > 1e-9:
        raise CpmError("measurement produced non-real probabilities; "
                       "state is not a valid density matrix")
    probs = coeffs.real
    total = probs.sum()
    if abs(total - 1.0) > tol:
        if not rescale:
            raise CpmError(f"state is not normalized (trace {total:.6g}); "
                           "pass rescale=True to renormalize")
        probs = probs / total
    return BornVector(probs, obs.colour)


def prepare(b: BornVector, obs: ObservableStructure) -> CpmMap:
    """The probabilistic mixture sum_i p_i |x_i><x_i| as a state."""
    if not b.is_valid():
        raise CpmError("invalid Born vector")
    name = prepare_matrix(obs) @ b.probs.astype(np.complex128)
    return CpmMap(name.reshape(-1, 1), (), (("q", obs.dim),))


def phased_measurement(pair, alpha: Phase, state: StateLike,
                       tol: float = DEFAULT_TOL) -> BornVector:
    """Measure in the gray basis after undoing a white phase: the outcome
    basis is Lambda_white(alpha) applied to the gray points."""
    from .laws import check_coherence

    if not check_coherence(pair, tol=max(tol, 1e-9)).passed:
        raise CpmError("phased measurements need a coherent pair")
    lam = phase_action(pair.white, pair.white.phase_point(phase_neg(alpha)))
    rot = double(lam)
    name = _as_name(state, pair.white.dim)
    rotated = rot.matrix @ name
    return measure(pair.gray, rotated, tol=tol)


def decoherence(obs: ObservableStructure) -> CpmMap:
    """prepare after measure: projects onto basis-diagonal mixtures."""
    d = obs.dim
    return CpmMap(decoherence_matrix(obs), (("q", d),), (("q", d),))


def possibilistic_outcomes(obs: ObservableStructure, state: Tensor) -> list[bool]:
    """Experimental: which classical points a relational state overlaps.

    Whether this deserves to be called a possibilistic Born vector is left
    open; no normalization or single-outcome claim is made."""
    if obs.semiring != "bool" or state.semiring != "bool":
        raise CpmError("possibilistic outcomes are a boolean-model experiment")
    if not obs.points:
        raise CpmError(f"observable {obs.colour} has no stored classical points")
    if state.dom != () or state.cod != (obs.dim,):
        raise CpmError("state does not live on the observable's carrier")
    return [bool(state.then(p.dagger()).scalar_value()) for p in obs.points]
