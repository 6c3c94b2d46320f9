"""Dense operator algebra on truncated multi-mode Fock spaces.

Every operator carries the composite space it acts on, so dimension
mismatches surface as errors instead of silent broadcasting.  Mode 0 is
the leftmost Kronecker factor: for ``A = tensor(B, C)`` the matrix
element convention is ``A[i*dC + k, j*dC + l] = B[i, j] * C[k, l]``.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from functools import reduce
from math import prod

import numpy as np

from .errors import InvalidDimensionError, InvalidEmbeddingError, SpaceMismatchError

__all__ = [
    "ModeSpace",
    "CompositeSpace",
    "Operator",
    "annihilation",
    "creation",
    "number",
    "identity",
    "tensor",
    "embed",
    "adjoint",
    "basis_index",
    "basis_state",
]


@dataclass(frozen=True)
class ModeSpace:
    """A single bosonic mode keeping the Fock states |0> ... |dim-1>."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidDimensionError(
                f"a mode needs at least 2 Fock levels to host ladder operators, got {self.dim}"
            )


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered tensor product of truncated modes.

    Dimension-1 entries are allowed as padding for decoupled modes;
    ladder operators cannot be built on them.
    """

    mode_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.mode_dims)
        if not dims:
            raise InvalidDimensionError("a composite space needs at least one mode")
        if any(d < 1 for d in dims):
            raise InvalidDimensionError(f"mode dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "mode_dims", dims)

    @classmethod
    def single(cls, dim: int) -> "CompositeSpace":
        return cls((ModeSpace(dim).dim,))

    @property
    def dim(self) -> int:
        return prod(self.mode_dims)

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix tagged with its composite space."""

    space: CompositeSpace
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        d = self.space.dim
        if data.shape != (d, d):
            raise SpaceMismatchError(
                f"operator data has shape {data.shape}, space dimension is {d}"
            )
        object.__setattr__(self, "data", data)

    def dag(self) -> "Operator":
        return adjoint(self)

    def _same_space(self, other: "Operator"):
        if self.space != other.space:
            raise SpaceMismatchError(
                f"operands act on different spaces: "
                f"{self.space.mode_dims} vs {other.space.mode_dims}"
            )

    def __add__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        self._same_space(other)
        return Operator(self.space, self.data + other.data)

    def __sub__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        self._same_space(other)
        return Operator(self.space, self.data - other.data)

    def __neg__(self):
        return Operator(self.space, -self.data)

    def __mul__(self, scalar):
        if not isinstance(scalar, numbers.Number):
            return NotImplemented
        return Operator(self.space, self.data * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        self._same_space(other)
        return Operator(self.space, self.data @ other.data)


def annihilation(dim: int) -> Operator:
    """Single-mode lowering operator with <m-1| a |m> = sqrt(m)."""
    space = CompositeSpace.single(dim)
    return Operator(space, np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1))


def creation(dim: int) -> Operator:
    """Adjoint of :func:`annihilation`."""
    return adjoint(annihilation(dim))


def number(dim: int) -> Operator:
    """Occupation operator diag(0, 1, ..., dim-1)."""
    space = CompositeSpace.single(dim)
    return Operator(space, np.diag(np.arange(dim, dtype=float)))


def identity(dim: int) -> Operator:
    if dim < 1:
        raise InvalidDimensionError(f"identity needs dim >= 1, got {dim}")
    return Operator(CompositeSpace((dim,)), np.eye(dim, dtype=complex))


def adjoint(op: Operator) -> Operator:
    """Conjugate transpose."""
    return Operator(op.space, op.data.conj().T.copy())


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product; the result space concatenates the operand modes."""
    space = CompositeSpace(a.space.mode_dims + b.space.mode_dims)
    return Operator(space, np.kron(a.data, b.data))


def embed(op: Operator, mode_index: int, space: CompositeSpace) -> Operator:
    """Lift a single-mode operator to ``space``, acting as identity elsewhere."""
    if op.space.n_modes != 1:
        raise InvalidEmbeddingError(
            f"only single-mode operators can be embedded, got {op.space.n_modes} modes"
        )
    if not 0 <= mode_index < space.n_modes:
        raise InvalidEmbeddingError(
            f"mode index {mode_index} out of range for {space.n_modes} modes"
        )
    if op.space.mode_dims[0] != space.mode_dims[mode_index]:
        raise InvalidEmbeddingError(
            f"operator dimension {op.space.mode_dims[0]} does not match "
            f"mode {mode_index} dimension {space.mode_dims[mode_index]}"
        )
    factors = [
        op.data if k == mode_index else np.eye(d, dtype=complex)
        for k, d in enumerate(space.mode_dims)
    ]
    return Operator(space, reduce(np.kron, factors))


def basis_index(space: CompositeSpace, occupations) -> int:
    """Flat index of the basis state |n_0, n_1, ...> in ``space``."""
    occ = tuple(int(n) for n in occupations)
    if len(occ) != space.n_modes:
        raise InvalidEmbeddingError(
            f"expected {space.n_modes} occupation numbers, got {len(occ)}"
        )
    idx = 0
    for n, d in zip(occ, space.mode_dims):
        if not 0 <= n < d:
            raise InvalidEmbeddingError(f"occupation {n} outside truncation {d}")
        idx = idx * d + n
    return idx


def basis_state(space: CompositeSpace, occupations) -> np.ndarray:
    """Unit column vector for the basis state |n_0, n_1, ...>."""
    vec = np.zeros(space.dim, dtype=complex)
    vec[basis_index(space, occupations)] = 1.0
    return vec
