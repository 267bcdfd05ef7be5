"""Grover search and the error-cancelling modified search.

Operators are composed right to left: in ``I_s^phi @ I_t^varphi`` the
target rotation acts on the state first.

Because every operator here is built from rotations about ``|s>`` and
``|t>``, the dynamics never leave ``span{|s>, |t>}``. :class:`TwoLevelModel`
exploits that to run arbitrarily small overlaps exactly with 2x2 matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import DegeneratePhaseError, NormalizationError
from .qcore import StateVector, UnitaryOperator

ALGORITHMS = ("original", "modified")

# Oracle (I_t) applications per operator iteration.
ORACLE_CALLS = {"original": 1, "modified": 2}

TWO_PI = 2 * np.pi


def _check_algorithm(algorithm: str) -> None:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")


def _selective_phase_matrix(psi: np.ndarray, omega: float) -> np.ndarray:
    return np.eye(psi.size, dtype=complex) - (1 - np.exp(1j * omega)) * np.outer(psi, psi.conj())


def selective_phase(psi: StateVector, omega: float) -> UnitaryOperator:
    """Return ``1 - (1 - e^{i omega}) |psi><psi|``.

    Parameters
    ----------
    psi : StateVector
        State whose amplitude picks up the phase.
    omega : float
        Phase in radians; ``pi`` gives the usual selective inversion.
    """
    amps = np.asarray(psi.data if isinstance(psi, StateVector) else psi, dtype=complex)
    if abs(np.linalg.norm(amps) - 1) > 1e-8:
        raise NormalizationError("selective_phase needs a normalized state")
    return UnitaryOperator(_selective_phase_matrix(amps, omega))


def uniform_state(n: int) -> StateVector:
    if n < 1:
        raise ValueError("need at least one qubit")
    dim = 2**n
    return StateVector(np.full(dim, 1 / np.sqrt(dim)))


@dataclass(frozen=True)
class SearchProblem:
    """Source state, marked basis index, and the two implemented phases.

    ``phi`` is the phase actually applied by the source rotation and
    ``varphi`` the one applied by the target rotation.
    """

    source: StateVector
    target: int
    phi: float = np.pi
    varphi: float = np.pi

    def __post_init__(self):
        if not 0 <= self.target < self.source.dimension:
            raise IndexError(f"target {self.target} outside dimension {self.source.dimension}")
        a = self.alpha
        if not 0 < a < 1:
            raise ValueError(f"|<t|s>| = {a!r} must lie strictly between 0 and 1")
        for name in ("phi", "varphi"):
            value = getattr(self, name)
            if not 0 < value < TWO_PI:
                raise ValueError(f"{name} = {value!r} must lie in (0, 2*pi)")

    @property
    def alpha(self) -> float:
        return float(abs(self.source.data[self.target]))

    @property
    def target_state(self) -> StateVector:
        return StateVector.basis(self.target, self.source.dimension)


def grover_operator(p: SearchProblem) -> UnitaryOperator:
    return selective_phase(p.source, p.phi) @ selective_phase(p.target_state, p.varphi)


def tulsi_operator(p: SearchProblem) -> UnitaryOperator:
    """``I_s^{-phi} I_t^{-varphi} I_s^{phi} I_t^{varphi}``.

    Reversing the sign of both implemented phases on the second half undoes
    the systematic part of the phase error; at ``phi = varphi = pi`` this is
    exactly two Grover steps.
    """
    s, t = p.source, p.target_state
    return (
        selective_phase(s, -p.phi)
        @ selective_phase(t, -p.varphi)
        @ selective_phase(s, p.phi)
        @ selective_phase(t, p.varphi)
    )


def search_operator(p: SearchProblem, algorithm: str) -> UnitaryOperator:
    _check_algorithm(algorithm)
    return grover_operator(p) if algorithm == "original" else tulsi_operator(p)


def predicted_iterations(alpha: float, phi: float, varphi: float) -> float:
    """Iteration count ``pi / (4 alpha sin(phi/2) sin(varphi/2))``.

    The count is in Grover-operator equivalents (oracle calls): one modified
    iteration spends two of them, so the modified search peaks after about
    half this many applications of its own operator.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    denom = np.sin(phi / 2) * np.sin(varphi / 2)
    if abs(denom) < 1e-15:
        raise DegeneratePhaseError(f"sin(phi/2)*sin(varphi/2) = 0 for phi={phi}, varphi={varphi}")
    return float(np.pi / (4 * alpha * denom))


def phase_matching_satisfied(phi: float, varphi: float, alpha: float, c: float = 1.0) -> bool:
    """True if ``|phi - varphi| <= c * alpha``; ``c`` stands in for the O(.) constant."""
    if alpha <= 0 or c <= 0:
        raise ValueError("alpha and c must be positive")
    return bool(abs(phi - varphi) <= c * alpha)


def iterate_schedule(p: SearchProblem, algorithm: str, steps: int) -> list[tuple[int, float]]:
    """Target probability after ``q = 0..steps`` operator applications."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    op = search_operator(p, algorithm).data
    v = p.source.data.copy()
    out = [(0, float(abs(v[p.target]) ** 2))]
    for q in range(1, steps + 1):
        v = op @ v
        out.append((q, float(abs(v[p.target]) ** 2)))
    return out


@dataclass(frozen=True)
class TwoLevelModel:
    """Search dynamics restricted to the orthonormal pair ``{|t>, |s_perp>}``.

    ``state`` holds the amplitudes on ``|t>`` and ``|s_perp>``; the source
    is ``(alpha, sqrt(1 - alpha^2))`` in this basis.
    """

    alpha: float
    phi: float = np.pi
    varphi: float = np.pi
    state: tuple[complex, complex] = field(default=None)

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha = {self.alpha!r} must lie in (0, 1)")
        if self.state is None:
            object.__setattr__(self, "state", self.source)
        a_t, a_p = self.state
        norm = abs(a_t) ** 2 + abs(a_p) ** 2
        if abs(norm - 1) > 1e-12:
            raise NormalizationError(f"two-level state norm^2 {norm!r} != 1")

    @property
    def source(self) -> tuple[complex, complex]:
        return (complex(self.alpha), complex(np.sqrt(1 - self.alpha**2)))

    @property
    def target_probability(self) -> float:
        return float(abs(self.state[0]) ** 2)

    def operator(self, algorithm: str) -> np.ndarray:
        """2x2 restriction of the chosen search operator."""
        _check_algorithm(algorithm)
        s = np.array(self.source)
        t = np.array([1, 0], dtype=complex)
        g = _selective_phase_matrix(s, self.phi) @ _selective_phase_matrix(t, self.varphi)
        if algorithm == "original":
            return g
        return _selective_phase_matrix(s, -self.phi) @ _selective_phase_matrix(t, -self.varphi) @ g


def two_level_step(m: TwoLevelModel, algorithm: str) -> TwoLevelModel:
    v = m.operator(algorithm) @ np.array(m.state)
    # Renormalize away round-off so long runs keep the 1e-12 norm invariant.
    v = v / np.linalg.norm(v)
    return replace(m, state=(complex(v[0]), complex(v[1])))


def two_level_schedule(m: TwoLevelModel, algorithm: str, steps: int) -> np.ndarray:
    """Amplitude pairs for ``q = 0..steps``, shape ``(steps + 1, 2)``."""
    op = m.operator(algorithm)
    out = np.empty((steps + 1, 2), dtype=complex)
    out[0] = m.state
    for q in range(1, steps + 1):
        v = op @ out[q - 1]
        out[q] = v / np.linalg.norm(v)
    return out
