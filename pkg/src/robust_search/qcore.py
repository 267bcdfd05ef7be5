"""Dense complex linear algebra for small Hilbert spaces.

States, density matrices and unitaries are thin immutable wrappers around
read-only ``complex128`` numpy arrays. Their invariants are checked once at
construction, so every value that exists is valid.

Basis ordering: qubit 0 is the high-order bit, so ``|q0 q1>`` sits at index
``2*q0 + q1``. Rotations follow ``exp(-i * angle * sigma / 2)``.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .exceptions import DimensionMismatchError, KindMismatchError, NormalizationError

TOL = 1e-10

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


class _Array:
    __slots__ = ("_data",)

    def __init__(self, data):
        self._data = _frozen(data)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dimension(self) -> int:
        return self._data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._data if dtype is None else self._data.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}({np.array2string(self._data, precision=4)})"


class StateVector(_Array):
    """Normalized complex amplitude vector."""

    __slots__ = ()

    def __init__(self, amplitudes, *, atol: float = TOL):
        super().__init__(amplitudes)
        if self._data.ndim != 1 or self._data.size < 1:
            raise DimensionMismatchError("state must be a non-empty 1-d array")
        norm = np.linalg.norm(self._data)
        if abs(norm - 1.0) > atol:
            raise NormalizationError(f"state norm {norm!r} deviates from 1")

    @classmethod
    def basis(cls, index: int, dimension: int) -> StateVector:
        if not 0 <= index < dimension:
            raise IndexError(f"basis index {index} out of range for dimension {dimension}")
        v = np.zeros(dimension, dtype=complex)
        v[index] = 1.0
        return cls(v)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._data

    def probabilities(self) -> np.ndarray:
        return np.abs(self._data) ** 2

    def projector(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self._data, self._data.conj()))


class DensityMatrix(_Array):
    """Hermitian, unit-trace, positive-semidefinite matrix."""

    __slots__ = ()

    def __init__(self, entries, *, atol: float = TOL):
        super().__init__(entries)
        m = self._data
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatchError("density matrix must be square")
        if np.max(np.abs(m - m.conj().T)) > atol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > atol:
            raise ValueError(f"density matrix trace {np.trace(m).real!r} != 1")
        if np.linalg.eigvalsh(m).min() < -1e-9:
            raise ValueError("density matrix is not positive semidefinite")

    @property
    def entries(self) -> np.ndarray:
        return self._data

    def populations(self) -> np.ndarray:
        return np.diag(self._data).real.copy()

    def purity(self) -> float:
        return float(np.trace(self._data @ self._data).real)


class UnitaryOperator(_Array):
    """Square matrix with U^dagger U = 1.

    ``u @ v`` composes operators (``v`` acts first); ``u @ state`` applies.
    """

    __slots__ = ()

    def __init__(self, entries, *, atol: float = TOL):
        super().__init__(entries)
        m = self._data
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatchError("operator must be square")
        err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if err > atol:
            raise ValueError(f"operator is not unitary (max deviation {err:.3e})")

    @classmethod
    def identity(cls, dimension: int) -> UnitaryOperator:
        return cls(np.eye(dimension))

    @property
    def entries(self) -> np.ndarray:
        return self._data

    def __matmul__(self, other):
        if isinstance(other, UnitaryOperator):
            _check_dims(self, other)
            return UnitaryOperator(self._data @ other._data)
        if isinstance(other, StateVector):
            return apply(self, other)
        return NotImplemented

    def power(self, q: int) -> UnitaryOperator:
        return UnitaryOperator(np.linalg.matrix_power(self._data, q))


def _check_dims(a: _Array, b: _Array) -> None:
    if a.dimension != b.dimension:
        raise DimensionMismatchError(f"dimension {a.dimension} != {b.dimension}")


def tensor_product(a, b):
    """Kronecker product with ``a`` as the high-order factor."""
    if type(a) is not type(b) or not isinstance(a, (UnitaryOperator, StateVector)):
        raise KindMismatchError(
            f"cannot take tensor product of {type(a).__name__} and {type(b).__name__}"
        )
    return type(a)(np.kron(a.data, b.data))


def adjoint(u: UnitaryOperator) -> UnitaryOperator:
    return UnitaryOperator(u.data.conj().T)


def apply(u: UnitaryOperator, s: StateVector) -> StateVector:
    _check_dims(u, s)
    return StateVector(u.data @ s.data)


def conjugate(u: UnitaryOperator, rho: DensityMatrix) -> DensityMatrix:
    """Return ``u rho u^dagger``."""
    _check_dims(u, rho)
    m = u.data @ rho.data @ u.data.conj().T
    # Re-symmetrize so round-off never accumulates into non-Hermiticity.
    return DensityMatrix((m + m.conj().T) / 2)


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b>, antilinear in ``a``."""
    _check_dims(a, b)
    return complex(np.vdot(a.data, b.data))


def equal_up_to_global_phase(u, v, tol: float = TOL) -> bool:
    """True if ``u`` equals ``c * v`` entrywise within ``tol`` for some ``|c| = 1``.

    The scalar ``c`` is read off the largest-magnitude entry of ``v``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_dims(u, v)
    a, b = np.asarray(u.data), np.asarray(v.data)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape {a.shape} != {b.shape}")
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[k]) == 0:
        return bool(np.max(np.abs(a - b)) <= tol)
    c = a[k] / b[k]
    c /= abs(c)
    return bool(np.max(np.abs(a - c * b)) <= tol)


def rotation_2x2(axis: str, angle: float) -> np.ndarray:
    """Closed-form ``exp(-i angle sigma_axis / 2)`` for axis in x, y, -x, -y, z, -z."""
    sign = -1.0 if axis.startswith("-") else 1.0
    name = axis.lstrip("-")
    if name not in _PAULI:
        raise ValueError(f"unknown rotation axis {axis!r}")
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return c * np.eye(2, dtype=complex) - 1j * sign * s * _PAULI[name]


def embed(single: np.ndarray, target: int, n: int) -> UnitaryOperator:
    if not 0 <= target < n:
        raise IndexError(f"target qubit {target} out of range for {n} qubits")
    factors = [single if q == target else np.eye(2) for q in range(n)]
    return UnitaryOperator(reduce(np.kron, factors))


def single_qubit_rotation(axis: str, angle: float, target: int, n: int) -> UnitaryOperator:
    return embed(rotation_2x2(axis, angle), target, n)


def diagonal_phase_unitary(weights) -> UnitaryOperator:
    """``diag(exp(i w_0), exp(i w_1), ...)``."""
    w = np.asarray(weights, dtype=float)
    return UnitaryOperator(np.diag(np.exp(1j * w)))
