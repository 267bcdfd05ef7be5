"""Two-spin NMR realization of the search operators.

Spins are numbered 1 and 2 (spin 1 is the high-order qubit). Chemical-shift
evolution is assumed refocused, so free evolution is pure scalar coupling.
Pulse sequences read in time order: the first element acts first.

Phase conventions
-----------------
RF pulses rotate by ``exp(-i angle sigma/2)`` about their phase axis. Scalar
coupling for a time ``d`` propagates as ``exp(+i 2 pi J d Iz1 Iz2)``. With
this sign, a delay of ``phi / (2 pi J)`` supplies the ``phi Iz1 Iz2`` part of
the ``I_00^phi`` generator, and ``(4 pi - phi) / (2 pi J)`` supplies the
part for ``I_00^-phi``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError
from .qcore import (
    DensityMatrix,
    StateVector,
    UnitaryOperator,
    conjugate,
    single_qubit_rotation,
)

N_SPINS = 2
AXES = ("x", "y", "-x", "-y")
KINDS = ("rf_pulse", "j_delay", "crusher")

IZ = np.diag([0.5, -0.5]).astype(complex)
IZ1 = np.kron(IZ, np.eye(2))
IZ2 = np.kron(np.eye(2), IZ)
IZIZ = IZ1 @ IZ2


@dataclass(frozen=True)
class SpinSystem:
    # Larmor frequencies are recorded only; refocusing removes their dynamics.
    j_coupling: float = 209.0
    larmor_1: float = 500e6
    larmor_2: float = 125e6

    def __post_init__(self):
        if self.j_coupling <= 0:
            raise ValueError("j_coupling must be positive")

    def hamiltonian(self) -> np.ndarray:
        """Weak-coupling Hamiltonian in Hz (lab frame, not used for propagation)."""
        return self.larmor_1 * IZ1 + self.larmor_2 * IZ2 + self.j_coupling * IZIZ


CHLOROFORM = SpinSystem()


@dataclass(frozen=True)
class EquilibriumState:
    """High-temperature deviation density ``Iz_H + gamma_ratio * Iz_C``.

    Documents the thermal starting point; the algorithm runs start from an
    ideal pseudo-pure state instead.
    """

    gamma_ratio: float = 0.25

    @property
    def deviation(self) -> np.ndarray:
        return IZ1 + self.gamma_ratio * IZ2


@dataclass(frozen=True)
class PulseElement:
    kind: str
    flip_angle: float = 0.0
    phase_axis: str | None = None
    targets: tuple[int, ...] = ()
    duration: float = 0.0  # multiples of 1/J

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if self.kind == "rf_pulse":
            if not 0 < self.flip_angle <= 2 * math.pi + 1e-12:
                raise ValueError(f"flip angle {self.flip_angle!r} outside (0, 2pi]")
            if self.phase_axis not in AXES:
                raise ValueError(f"phase axis must be one of {AXES}")
            if not self.targets or any(t not in (1, 2) for t in self.targets):
                raise ValueError(f"rf targets must be a non-empty subset of (1, 2), got {self.targets}")
        if self.duration < 0:
            raise ValueError("delay duration must be non-negative")

    @property
    def is_unitary(self) -> bool:
        return self.kind != "crusher"

    def unitary(self) -> UnitaryOperator:
        if self.kind == "rf_pulse":
            u = UnitaryOperator.identity(2**N_SPINS)
            for spin in self.targets:
                u = single_qubit_rotation(self.phase_axis, self.flip_angle, spin - 1, N_SPINS) @ u
            return u
        if self.kind == "j_delay":
            return _coupling_unitary(2 * math.pi * self.duration)
        raise ValueError("a crusher has no unitary")


def rf(targets, flip_angle: float, axis: str) -> PulseElement:
    if isinstance(targets, int):
        targets = (targets,)
    return PulseElement("rf_pulse", flip_angle=flip_angle, phase_axis=axis, targets=tuple(targets))


def delay(multiple_of_inverse_j: float) -> PulseElement:
    return PulseElement("j_delay", duration=multiple_of_inverse_j)


CRUSH = PulseElement("crusher")


@dataclass(frozen=True)
class PulseSequence:
    elements: tuple[PulseElement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def __add__(self, other: PulseSequence) -> PulseSequence:
        return PulseSequence(self.elements + other.elements)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def unitary(self) -> UnitaryOperator:
        """Compile to a single operator; later elements multiply on the left."""
        u = UnitaryOperator.identity(2**N_SPINS)
        for el in self.elements:
            if not el.is_unitary:
                raise ValueError("sequence contains a crusher and has no unitary")
            u = el.unitary() @ u
        return u

    def delays(self) -> list[float]:
        return [el.duration for el in self.elements if el.kind == "j_delay"]


def _coupling_unitary(x: float) -> UnitaryOperator:
    return UnitaryOperator(np.diag(np.exp(1j * x * np.diag(IZIZ))))


def j_evolution(duration: float, system: SpinSystem = CHLOROFORM) -> UnitaryOperator:
    """Free evolution under scalar coupling for ``duration`` seconds."""
    if duration < 0:
        raise ValueError("duration must be non-negative")
    return _coupling_unitary(2 * math.pi * system.j_coupling * duration)


def pps_00() -> DensityMatrix:
    return StateVector.basis(0, 4).projector()


def theta_pulse(theta: float) -> PulseSequence:
    return PulseSequence([rf((1, 2), theta, "y")])


def theta_pulse_inverse(theta: float) -> PulseSequence:
    return PulseSequence([rf((1, 2), theta, "-y")])


def prepare_superposition(theta: float) -> StateVector:
    """Both spins rotated by ``theta`` about y, starting from ``|00>``.

    The ``|11>`` amplitude is ``sin^2(theta / 2)``.
    """
    if not 0 < theta < math.pi:
        raise ValueError(f"theta = {theta!r} must lie in (0, pi)")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return StateVector([c * c, s * c, c * s, s * s])


def composite_z(half_angle: float, sign: str, target: int) -> PulseSequence:
    """Three-pulse z rotation ``[pi/2]_y [half_angle]_(-x) [pi/2]_(-y)``.

    With ``sign='+'`` the result is ``exp(+i half_angle Iz)`` on ``target``;
    ``sign='-'`` moves the centre pulse to +x and gives the inverse. A zero
    ``half_angle`` drops the centre pulse.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if not 0 <= half_angle < 2 * math.pi:
        raise ValueError(f"half_angle {half_angle!r} outside [0, 2pi)")
    centre = [rf(target, half_angle, "-x" if sign == "+" else "x")] if half_angle > 0 else []
    return PulseSequence([rf(target, math.pi / 2, "y"), *centre, rf(target, math.pi / 2, "-y")])


def _check_phase(phi: float) -> None:
    if not 0 < phi < 2 * math.pi:
        raise ValueError(f"phase {phi!r} must lie in (0, 2pi)")


def compile_i00(phi: float) -> PulseSequence:
    """``diag(e^{i phi}, 1, 1, 1)`` up to global phase."""
    _check_phase(phi)
    return (
        composite_z(phi / 2, "+", 1)
        + composite_z(phi / 2, "+", 2)
        + PulseSequence([delay(phi / (2 * math.pi))])
    )


def compile_i00_inverse(phi: float) -> PulseSequence:
    """``diag(e^{-i phi}, 1, 1, 1)`` built from ``compile_i00(phi)``.

    The composite rotations and the delay swap places, each composite's
    centre pulse phase is shifted by pi, and the delay becomes
    ``(4 pi - phi) / (2 pi J)``.
    """
    _check_phase(phi)
    return (
        PulseSequence([delay((4 * math.pi - phi) / (2 * math.pi))])
        + composite_z(phi / 2, "-", 2)
        + composite_z(phi / 2, "-", 1)
    )


def compile_i11(varphi: float = math.pi) -> PulseSequence:
    """``diag(1, 1, 1, e^{i varphi})`` up to global phase; default is the inversion."""
    _check_phase(varphi)
    return (
        composite_z(varphi / 2, "-", 1)
        + composite_z(varphi / 2, "-", 2)
        + PulseSequence([delay(varphi / (2 * math.pi))])
    )


def compile_i11_inverse(varphi: float = math.pi) -> PulseSequence:
    _check_phase(varphi)
    # The inversion is its own inverse; keep its 1/2J delay.
    if math.isclose(varphi, math.pi):
        return compile_i11()
    return (
        PulseSequence([delay((4 * math.pi - varphi) / (2 * math.pi))])
        + composite_z(varphi / 2, "+", 2)
        + composite_z(varphi / 2, "+", 1)
    )


def search_sequence(theta: float, phi: float, varphi: float, algorithm: str) -> PulseSequence:
    """One iteration of the original or modified search as a pulse sequence."""
    prep, unprep = theta_pulse(theta), theta_pulse_inverse(theta)
    forward = compile_i11(varphi) + unprep + compile_i00(phi) + prep
    if algorithm == "original":
        return forward
    if algorithm == "modified":
        return forward + compile_i11_inverse(varphi) + unprep + compile_i00_inverse(phi) + prep
    raise ValueError(f"unknown algorithm {algorithm!r}")


def crusher(rho: DensityMatrix) -> DensityMatrix:
    """Gradient crusher: zero every off-diagonal element."""
    return DensityMatrix(np.diag(np.diag(rho.entries)))


def measure_populations(rho: DensityMatrix) -> np.ndarray:
    return crusher(rho).populations()


def run_sequence(seq: PulseSequence | Iterable[PulseElement], rho0: DensityMatrix) -> DensityMatrix:
    rho = rho0
    if rho.dimension != 2**N_SPINS:
        raise DimensionMismatchError(f"expected a {2**N_SPINS}-dim density matrix")
    for el in seq:
        rho = crusher(rho) if el.kind == "crusher" else conjugate(el.unitary(), rho)
    return rho


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def format_sequence(seq: PulseSequence) -> str:
    """Line format: ``RF <targets> <flip_deg> <axis>``, ``DELAY <n/J>``, ``CRUSH``."""
    lines = []
    for el in seq:
        if el.kind == "rf_pulse":
            targets = ",".join(str(t) for t in el.targets)
            lines.append(f"RF {targets} {_fmt(math.degrees(el.flip_angle))} {el.phase_axis}")
        elif el.kind == "j_delay":
            lines.append(f"DELAY {_fmt(el.duration)}")
        else:
            lines.append("CRUSH")
    return "\n".join(lines) + "\n"


def parse_sequence(text: str) -> PulseSequence:
    elements = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "RF" and len(parts) == 4:
                targets = tuple(int(t) for t in parts[1].split(","))
                elements.append(rf(targets, math.radians(float(parts[2])), parts[3]))
            elif parts[0] == "DELAY" and len(parts) == 2:
                elements.append(delay(float(parts[1])))
            elif parts == ["CRUSH"]:
                elements.append(CRUSH)
            else:
                raise ValueError("unrecognized element")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {raw!r}: {exc}") from None
    return PulseSequence(elements)

