"""Dense tensors over the complex field or the boolean semiring.

A ``Tensor`` is the semantic value of a diagram: a matrix whose rows are
indexed by the output systems and whose columns are indexed by the input
systems, with dimensions tracked per wire.  Complex tensors compose by
ordinary matrix product, boolean tensors by saturating OR-AND arithmetic
(relational composition).
"""

from __future__ import annotations

from typing import Iterable, Literal, Sequence

import numpy as np

Semiring = Literal["complex", "bool"]

DEFAULT_TOL = 1e-9


class ShapeMismatch(ValueError):
    pass


def _prod(dims: Iterable[int]) -> int:
    n = 1
    for d in dims:
        n *= d
    return n


class Tensor:
    """Matrix with wire-structured boundary dimensions.

    ``data`` has shape ``(prod(cod), prod(dom))``; indices are flattened
    row-major, so wire 0 is the most significant digit.
    """

    __slots__ = ("data", "dom", "cod")

    def __init__(self, data, dom: Sequence[int], cod: Sequence[int]):
        self.dom = tuple(int(d) for d in dom)
        self.cod = tuple(int(d) for d in cod)
        arr = np.asarray(data)
        if arr.dtype != np.bool_:
            arr = arr.astype(np.complex128)
        arr = arr.reshape(_prod(self.cod), _prod(self.dom))
        self.data = arr

    # -- constructors ---------------------------------------------------

    @staticmethod
    def identity(dims: Sequence[int], semiring: Semiring = "complex") -> "Tensor":
        n = _prod(dims)
        eye = np.eye(n, dtype=np.bool_ if semiring == "bool" else np.complex128)
        return Tensor(eye, dims, dims)

    @staticmethod
    def scalar(value, semiring: Semiring = "complex") -> "Tensor":
        if semiring == "bool":
            return Tensor(np.array([[bool(value)]]), (), ())
        return Tensor(np.array([[value]], dtype=np.complex128), (), ())

    @staticmethod
    def point(values, semiring: Semiring = "complex") -> "Tensor":
        """Column vector I -> X."""
        arr = np.asarray(values)
        return Tensor(arr.reshape(-1, 1), (), (arr.size,))

    @staticmethod
    def permutation(dims: Sequence[int], order: Sequence[int],
                    semiring: Semiring = "complex") -> "Tensor":
        """Route wire ``order[j]`` of the input to position ``j`` of the output."""
        dims = tuple(dims)
        if sorted(order) != list(range(len(dims))):
            raise ValueError(f"not a permutation: {order}")
        n = _prod(dims)
        src = np.arange(n).reshape(dims).transpose(order).reshape(-1)
        dtype = np.bool_ if semiring == "bool" else np.complex128
        mat = np.zeros((n, n), dtype=dtype)
        mat[np.arange(n), src] = True if semiring == "bool" else 1.0
        out_dims = tuple(dims[i] for i in order)
        return Tensor(mat, dims, out_dims)

    @staticmethod
    def cup(dim: int, semiring: Semiring = "complex") -> "Tensor":
        """The basis cup I -> X x X, i.e. the name of the identity."""
        dtype = np.bool_ if semiring == "bool" else np.complex128
        v = np.zeros((dim * dim, 1), dtype=dtype)
        for i in range(dim):
            v[i * dim + i, 0] = True if semiring == "bool" else 1.0
        return Tensor(v, (), (dim, dim))

    @staticmethod
    def cap(dim: int, semiring: Semiring = "complex") -> "Tensor":
        return Tensor.cup(dim, semiring).dagger()

    # -- basic properties ------------------------------------------------

    @property
    def semiring(self) -> Semiring:
        return "bool" if self.data.dtype == np.bool_ else "complex"

    @property
    def is_scalar(self) -> bool:
        return self.dom == () and self.cod == ()

    def scalar_value(self):
        if not self.is_scalar:
            raise ShapeMismatch("tensor is not a scalar")
        v = self.data[0, 0]
        return bool(v) if self.semiring == "bool" else complex(v)

    # -- composition -----------------------------------------------------

    def then(self, other: "Tensor") -> "Tensor":
        """This tensor followed by ``other`` (i.e. ``other @ self``)."""
        if self.semiring != other.semiring:
            raise ShapeMismatch("mixed semirings")
        if self.cod != other.dom:
            raise ShapeMismatch(
                f"cannot plug {self.cod} into {other.dom}")
        if self.semiring == "bool":
            data = (other.data.astype(np.int64) @ self.data.astype(np.int64)) > 0
        else:
            data = other.data @ self.data
        return Tensor(data, self.dom, other.cod)

    def tensor(self, other: "Tensor") -> "Tensor":
        if self.semiring != other.semiring:
            raise ShapeMismatch("mixed semirings")
        if self.semiring == "bool":
            data = np.kron(self.data.astype(np.uint8), other.data.astype(np.uint8)) > 0
        else:
            data = np.kron(self.data, other.data)
        return Tensor(data, self.dom + other.dom, self.cod + other.cod)

    def dagger(self) -> "Tensor":
        if self.semiring == "bool":
            return Tensor(self.data.T.copy(), self.cod, self.dom)
        return Tensor(self.data.conj().T, self.cod, self.dom)

    def conjugate(self) -> "Tensor":
        if self.semiring == "bool":
            return Tensor(self.data.copy(), self.dom, self.cod)
        return Tensor(self.data.conj(), self.dom, self.cod)

    def transpose(self) -> "Tensor":
        return Tensor(self.data.T.copy(), self.cod, self.dom)

    def scale(self, factor) -> "Tensor":
        if self.semiring == "bool":
            raise ShapeMismatch("boolean tensors cannot be scaled")
        return Tensor(self.data * factor, self.dom, self.cod)

    def trace_value(self):
        if self.dom != self.cod:
            raise ShapeMismatch("trace needs equal input/output shape")
        if self.semiring == "bool":
            return bool(self.data.diagonal().any())
        return complex(self.data.trace())

    # -- comparison and printing -----------------------------------------

    def max_deviation(self, other: "Tensor") -> float:
        if self.semiring != other.semiring or self.dom != other.dom \
                or self.cod != other.cod:
            raise ShapeMismatch("comparing tensors of different shape")
        if self.semiring == "bool":
            return float(np.any(self.data != other.data))
        return float(np.abs(self.data - other.data).max(initial=0.0))

    def norm_inf(self) -> float:
        if self.semiring == "bool":
            return float(self.data.any())
        return float(np.abs(self.data).max(initial=0.0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return (self.semiring == other.semiring and self.dom == other.dom
                and self.cod == other.cod and np.array_equal(self.data, other.data))

    def __repr__(self) -> str:
        return f"Tensor({self.semiring}, dom={self.dom}, cod={self.cod})"

    def to_text(self) -> str:
        """Serialize: boolean tensors as 0/1 grids, complex ones as
        row-major (re, im) pairs at 17 significant digits."""
        lines = [f"tensor {self.semiring} dom={','.join(map(str, self.dom)) or '-'} "
                 f"cod={','.join(map(str, self.cod)) or '-'}"]
        if self.semiring == "bool":
            for row in self.data:
                lines.append("".join("1" if x else "0" for x in row))
        else:
            for row in self.data:
                lines.append(" ".join(
                    f"({format(x.real + 0.0, '.17g')},{format(x.imag + 0.0, '.17g')})"
                    for x in row))
        return "\n".join(lines)


def equal_tensors(a: Tensor, b: Tensor,
                  mode: str = "tolerance", tol: float = DEFAULT_TOL) -> bool:
    """Compare two tensors: ``exact``, ``tolerance`` (max-entry deviation)
    or ``up_to_global_scalar`` (some nonzero lambda with a ~ lambda*b)."""
    if a.semiring != b.semiring or a.dom != b.dom or a.cod != b.cod:
        raise ShapeMismatch("comparing tensors of different shape")
    if mode == "exact":
        return np.array_equal(a.data, b.data)
    if mode == "tolerance":
        return a.max_deviation(b) <= tol
    if mode == "up_to_global_scalar":
        return global_scalar(a, b, tol=tol) is not None
    raise ValueError(f"unknown comparison mode: {mode}")


def global_scalar(a: Tensor, b: Tensor, tol: float = DEFAULT_TOL):
    """Nonzero lambda with ||a - lambda*b||_inf <= tol, or None.

    For boolean tensors the only cancellable scalar is 1, so this reduces
    to equality.
    """
    if a.semiring != b.semiring or a.dom != b.dom or a.cod != b.cod:
        raise ShapeMismatch("comparing tensors of different shape")
    if a.semiring == "bool":
        return True if np.array_equal(a.data, b.data) else None
    flat_b = b.data.reshape(-1)
    k = int(np.argmax(np.abs(flat_b)))
    if abs(flat_b[k]) <= tol:
        return None  # b ~ 0: no cancellable scalar exists
    lam = complex(a.data.reshape(-1)[k] / flat_b[k])
    if lam == 0:
        return None
    if float(np.abs(a.data - lam * b.data).max(initial=0.0)) <= tol:
        return lam
    return None


def proportional_to(a: Tensor, b: Tensor, tol: float = DEFAULT_TOL) -> bool:
    return global_scalar(a, b, tol=tol) is not None


def tensor_many(ts: Sequence[Tensor], semiring: Semiring = "complex") -> Tensor:
    acc = Tensor.scalar(1.0 if semiring == "complex" else True, semiring)
    for t in ts:
        acc = acc.tensor(t)
    return acc
