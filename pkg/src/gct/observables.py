"""Observable structures: dagger-special commutative Frobenius algebras.

An ``ObservableStructure`` packages the four structure maps (multiplication,
unit, comultiplication, counit) as tensors over one carrier, together with a
colour tag used by spider nodes and an optional dictionary interpreting
abstract phase values as points.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .groups import FiniteAbelianGroup, Phase
from .tensor import DEFAULT_TOL, Tensor, equal_tensors, global_scalar


class ObservableError(ValueError):
    pass


@dataclass
class ObservableStructure:
    colour: str
    mult: Tensor       # X (x) X -> X
    unit: Tensor       # I -> X
    comult: Tensor     # X -> X (x) X
    counit: Tensor     # X -> I
    phase_points: Optional[Callable[[Phase], Tensor]] = None
    points: Optional[list[Tensor]] = None   # known classical points, if any

    def __post_init__(self) -> None:
        d = self.dim
        shapes = [(self.mult, (d, d), (d,)), (self.unit, (), (d,)),
                  (self.comult, (d,), (d, d)), (self.counit, (d,), ())]
        for t, dom, cod in shapes:
            if t.dom != dom or t.cod != cod:
                raise ObservableError(
                    f"structure map of {self.colour} has shape "
                    f"{t.dom}->{t.cod}, expected {dom}->{cod}")

    @property
    def dim(self) -> int:
        return self.mult.cod[0]

    @property
    def semiring(self) -> str:
        return self.mult.semiring

    def identity(self) -> Tensor:
        return Tensor.identity((self.dim,), self.semiring)

    def phase_point(self, phase: Optional[Phase]) -> Tensor:
        if phase is None or phase.is_zero():
            return self.unit
        if self.phase_points is None:
            raise ObservableError(
                f"observable {self.colour} has no phase interpretation")
        return self.phase_points(phase)

    def induced_cup(self) -> Tensor:
        """The self-duality cup fixed by this structure: comult after unit."""
        return self.unit.then(self.comult)

    def induced_cap(self) -> Tensor:
        return self.induced_cup().dagger()

    def point_transpose(self, point: Tensor) -> Tensor:
        """Transpose of a point in this structure's self-duality: X-effect."""
        cap = self.induced_cap()
        return Tensor.identity((self.dim,), self.semiring).tensor(point).then(cap)

    def point_conjugate(self, point: Tensor) -> Tensor:
        return self.point_transpose(point).dagger()

    # -- constructors -----------------------------------------------------

    @staticmethod
    def from_copy_basis(colour: str, basis: Sequence[np.ndarray]) -> "ObservableStructure":
        """Complex structure copying an orthonormal basis."""
        d = len(basis)
        vecs = [np.asarray(v, dtype=np.complex128).reshape(d) for v in basis]
        mult = np.zeros((d, d * d), dtype=np.complex128)
        comult = np.zeros((d * d, d), dtype=np.complex128)
        unit = np.zeros((d, 1), dtype=np.complex128)
        counit = np.zeros((1, d), dtype=np.complex128)
        for v in vecs:
            vv = np.kron(v, v)
            comult += np.outer(vv, v.conj())
            mult += np.outer(v, vv.conj())
            unit[:, 0] += v
            counit[0, :] += v.conj()
        return ObservableStructure(
            colour,
            Tensor(mult, (d, d), (d,)),
            Tensor(unit, (), (d,)),
            Tensor(comult, (d,), (d, d)),
            Tensor(counit, (d,), ()),
            points=[Tensor.point(v) for v in vecs],
        )

    @staticmethod
    def from_relations(colour: str, dim: int, mult_pairs, unit_set,
                       points: Optional[list[Tensor]] = None) -> "ObservableStructure":
        """Boolean structure from a multiplication relation and unit subset.

        ``mult_pairs`` maps (i, j) pairs to the related output element(s).
        """
        mult = np.zeros((dim, dim * dim), dtype=np.bool_)
        for (i, j), outs in mult_pairs.items():
            for k in (outs if isinstance(outs, (set, list, tuple)) else [outs]):
                mult[k, i * dim + j] = True
        unit = np.zeros((dim, 1), dtype=np.bool_)
        for i in unit_set:
            unit[i, 0] = True
        m = Tensor(mult, (dim, dim), (dim,))
        u = Tensor(unit, (), (dim,))
        return ObservableStructure(colour, m, u, m.dagger(), u.dagger(),
                                   points=points)


# -- spiders --------------------------------------------------------------


def _mult_power(obs: ObservableStructure, n: int) -> Tensor:
    """mu_n : X^n -> X; mu_0 = unit, mu_1 = id, mu_{n+1} = mu (mu_n (x) 1)."""
    if n == 0:
        return obs.unit
    if n == 1:
        return obs.identity()
    acc = obs.mult
    for _ in range(n - 2):
        acc = acc.tensor(obs.identity()).then(obs.mult)
    return acc


def _comult_power(obs: ObservableStructure, n: int) -> Tensor:
    """delta_n : X -> X^n; delta_0 = counit, delta_{n+1} = (delta_n (x) 1) delta."""
    if n == 0:
        return obs.counit
    if n == 1:
        return obs.identity()
    acc = obs.comult
    for _ in range(n - 2):
        acc = obs.comult.then(acc.tensor(obs.identity()))
    return acc


def spider(obs: ObservableStructure, n_in: int, n_out: int,
           phase: Optional[Phase] = None) -> Tensor:
    """The (n_in, n_out)-legged spider with an optional phase."""
    if n_in < 0 or n_out < 0:
        raise ObservableError("spider leg counts must be nonnegative")
    t = _mult_power(obs, n_in)
    if phase is not None and not phase.is_zero():
        t = t.then(phase_action(obs, obs.phase_point(phase)))
    return t.then(_comult_power(obs, n_out))


def phase_action(obs: ObservableStructure, point: Tensor) -> Tensor:
    """Left action of a point: mult after (point (x) id)."""
    if point.dom != () or point.cod != (obs.dim,):
        raise ObservableError("phase action needs a point of the carrier")
    return point.tensor(obs.identity()).then(obs.mult)


# -- classical points and phase groups --------------------------------------


def is_classical_point(obs: ObservableStructure, point: Tensor,
                       tol: float = DEFAULT_TOL) -> bool:
    """Copied by the comultiplication, deleted by the counit."""
    mode = "exact" if obs.semiring == "bool" else "tolerance"
    copied = equal_tensors(point.then(obs.comult), point.tensor(point),
                           mode=mode, tol=tol)
    one = Tensor.scalar(True if obs.semiring == "bool" else 1.0, obs.semiring)
    deleted = equal_tensors(point.then(obs.counit), one, mode=mode, tol=tol)
    return copied and deleted


def classical_points(obs: ObservableStructure, candidates: Sequence[Tensor],
                     tol: float = DEFAULT_TOL) -> list[Tensor]:
    return [p for p in candidates if is_classical_point(obs, p, tol=tol)]


def is_phase(obs: ObservableStructure, point: Tensor, tol: float = DEFAULT_TOL,
             up_to_scalar: bool = False) -> bool:
    """point +_obs point_conjugate = unit (strictly, or up to a scalar)."""
    lhs = point.tensor(obs.point_conjugate(point)).then(obs.mult)
    if up_to_scalar:
        return global_scalar(lhs, obs.unit, tol=tol) is not None
    mode = "exact" if obs.semiring == "bool" else "tolerance"
    return equal_tensors(lhs, obs.unit, mode=mode, tol=tol)


@dataclass
class PhaseGroup:
    """Finite phase group assembled from candidate points."""

    obs: ObservableStructure
    elements: list[Tensor]
    table: list[list[int]]                 # Cayley table over element indices
    identity_index: int
    iso_class: Optional[FiniteAbelianGroup]
    complete: bool                          # closed under the multiplication

    @property
    def order_multiset(self) -> tuple[int, ...]:
        orders = []
        n = len(self.elements)
        for i in range(n):
            k, acc = 1, i
            while acc != self.identity_index:
                acc = self.table[acc][i]
                k += 1
                if k > n + 1:
                    k = -1
                    break
            orders.append(k)
        return tuple(sorted(orders))


def phase_group(obs: ObservableStructure, candidates: Sequence[Tensor],
                tol: float = DEFAULT_TOL, up_to_scalar: bool = True) -> PhaseGroup:
    """Filter candidates to phases and build the addition table.

    Products are identified with candidates up to a global scalar, which is
    how a fixture's normalized points represent their phase classes.
    """
    filtered = [p for p in candidates
                if is_phase(obs, p, tol=tol, up_to_scalar=up_to_scalar)]
    phases: list[Tensor] = []
    for p in filtered:
        # one representative per proportionality class
        if not any(global_scalar(p, q, tol=tol) is not None for q in phases):
            phases.append(p)
    ident = None
    for i, p in enumerate(phases):
        if global_scalar(p, obs.unit, tol=tol) is not None:
            ident = i
            break
    if ident is None:
        phases.insert(0, obs.unit)
        ident = 0

    def identify(t: Tensor) -> Optional[int]:
        for j, q in enumerate(phases):
            if global_scalar(t, q, tol=tol) is not None:
                return j
        return None

    n = len(phases)
    table: list[list[int]] = []
    complete = True
    for i in range(n):
        row = []
        for j in range(n):
            prod = phases[i].tensor(phases[j]).then(obs.mult)
            k = identify(prod)
            if k is None:
                complete = False
                k = -1
            row.append(k)
        table.append(row)

    iso: Optional[FiniteAbelianGroup] = None
    if complete and n > 0:
        pg = PhaseGroup(obs, phases, table, ident, None, True)
        orders = pg.order_multiset
        if -1 not in orders:
            from .groups import classify_by_orders
            iso = classify_by_orders(orders)
    return PhaseGroup(obs, phases, table, ident, iso, complete)


def product_observable(a: ObservableStructure, b: ObservableStructure,
                       colour: Optional[str] = None) -> ObservableStructure:
    """Product structure on the tensor of the two carriers."""
    if a.semiring != b.semiring:
        raise ObservableError("mixed semirings")
    da, db = a.dim, b.dim
    sw = Tensor.permutation((da, db, da, db), (0, 2, 1, 3), a.semiring)
    mult = sw.then(a.mult.tensor(b.mult))
    comult = a.comult.tensor(b.comult).then(sw.dagger())
    unit = a.unit.tensor(b.unit)
    counit = a.counit.tensor(b.counit)
    # flatten carrier to one wire of dimension da*db
    mult = Tensor(mult.data, (da * db, da * db), (da * db,))
    comult = Tensor(comult.data, (da * db,), (da * db, da * db))
    unit = Tensor(unit.data, (), (da * db,))
    counit = Tensor(counit.data, (da * db,), ())
    return ObservableStructure(colour or f"{a.colour}*{b.colour}",
                               mult, unit, comult, counit)
