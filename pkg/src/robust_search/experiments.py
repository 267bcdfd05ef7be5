"""Scenario presets, the multi-backend runner, and record emission."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import TextIO

import numpy as np

from . import amplify, nmr
from .exceptions import ConfigError, DegeneratePhaseError, InvariantViolation
from .qcore import conjugate

BACKENDS = ("two_level", "state_vector", "nmr_pulse")
FORMATS = ("csv", "json")
PRESETS = ("fig1a", "fig1b", "fig3a", "fig3b", "fig3c")
CSV_HEADER = ("iteration", "oracle_calls", "p00", "p01", "p10", "p11", "p_target")
DECIMALS = 9
TARGET_INDEX = 3  # |11>

PI = math.pi


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of one run (or an original/modified pair).

    Exactly one of ``theta`` (two-qubit preparation angle) and ``alpha``
    (direct overlap) is given.
    """

    phi: float
    varphi: float
    iterations: int
    algorithm: str = "both"
    backend: str = "state_vector"
    theta: float | None = None
    alpha: float | None = None
    output_format: str = "csv"
    name: str | None = None

    def __post_init__(self):
        if self.algorithm not in (*amplify.ALGORITHMS, "both"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if (self.theta is None) == (self.alpha is None):
            raise ConfigError("give exactly one of theta and alpha")
        if self.backend == "nmr_pulse" and self.theta is None:
            raise ConfigError("the nmr_pulse backend needs theta")
        if self.theta is not None and not 0 < self.theta < PI:
            raise ConfigError(f"theta = {self.theta!r} must lie in (0, pi)")
        if self.alpha is not None and not 0 < self.alpha < 1:
            raise ConfigError(f"alpha = {self.alpha!r} must lie in (0, 1)")
        for name in ("phi", "varphi"):
            if not 0 < getattr(self, name) < 2 * PI:
                raise ConfigError(f"{name} must lie in (0, 2pi)")
        if not isinstance(self.iterations, (int, np.integer)) or self.iterations < 1:
            raise ConfigError("iterations must be a positive integer")

    @property
    def overlap(self) -> float:
        """|<11|s>|, from alpha directly or sin^2(theta/2)."""
        if self.alpha is not None:
            return self.alpha
        return math.sin(self.theta / 2) ** 2

    @property
    def preparation_angle(self) -> float:
        """theta, or the angle whose preparation has overlap alpha."""
        if self.theta is not None:
            return self.theta
        return 2 * math.asin(math.sqrt(self.alpha))

    def algorithms(self) -> tuple[str, ...]:
        return amplify.ALGORITHMS if self.algorithm == "both" else (self.algorithm,)

    def to_dict(self) -> dict:
        return asdict(self)


def preset(name: str) -> ScenarioConfig:
    if name == "fig1a":
        alpha, phi, varphi = 0.00091, PI, 0.9 * PI
    elif name == "fig1b":
        alpha, phi, varphi = 0.00091, 0.9 * PI, 0.9 * PI
    elif name == "fig3a":
        theta, phi = PI / 4, PI
    elif name == "fig3b":
        theta, phi = PI / 6, 0.9 * PI
    elif name == "fig3c":
        theta, phi = PI / 9, 0.9 * PI
    else:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")

    if name.startswith("fig1"):
        steps = round(2 * amplify.predicted_iterations(alpha, phi, varphi))
        return ScenarioConfig(
            phi=phi, varphi=varphi, iterations=steps, alpha=alpha, backend="two_level", name=name
        )
    return ScenarioConfig(
        phi=phi, varphi=PI, iterations=14, theta=theta, backend="nmr_pulse", name=name
    )


@dataclass(frozen=True)
class Row:
    iteration: int
    oracle_calls: int
    p00: float | None
    p01: float | None
    p10: float | None
    p11: float | None
    p_target: float


@dataclass(frozen=True)
class RunRecord:
    rows: tuple[Row, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([r.p_target for r in self.rows])

    @property
    def algorithm(self) -> str:
        return self.metadata["algorithm"]

    @property
    def peak_probability(self) -> float:
        return self.metadata["peak_probability"]

    @property
    def argmax_iteration(self) -> int:
        return self.metadata["argmax_iteration"]

    def to_json_dict(self) -> dict:
        return {"metadata": self.metadata, "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_json_dict(cls, d: dict) -> RunRecord:
        return cls(rows=tuple(Row(**r) for r in d["rows"]), metadata=d["metadata"])


def first_peak(p: np.ndarray) -> int:
    """Index of the first local maximum of a probability curve."""
    for q in range(1, len(p) - 1):
        if p[q] >= p[q - 1] and p[q] > p[q + 1]:
            return q
    return int(np.argmax(p))


def _two_level_populations(cfg: ScenarioConfig, algorithm: str) -> np.ndarray:
    model = amplify.TwoLevelModel(cfg.overlap, cfg.phi, cfg.varphi)
    amps = amplify.two_level_schedule(model, algorithm, cfg.iterations)
    if cfg.theta is None:
        pops = np.full((len(amps), 4), np.nan)
        pops[:, TARGET_INDEX] = np.abs(amps[:, 0]) ** 2
        return pops
    # Lift back into the two-qubit space through |s_perp>.
    s = nmr.prepare_superposition(cfg.theta).data
    t = np.zeros(4, dtype=complex)
    t[TARGET_INDEX] = 1
    a = cfg.overlap
    s_perp = (s - a * t) / math.sqrt(1 - a * a)
    states = np.outer(amps[:, 0], t) + np.outer(amps[:, 1], s_perp)
    return np.abs(states) ** 2


def _state_vector_populations(cfg: ScenarioConfig, algorithm: str) -> np.ndarray:
    problem = amplify.SearchProblem(
        nmr.prepare_superposition(cfg.preparation_angle), TARGET_INDEX, cfg.phi, cfg.varphi
    )
    op = amplify.search_operator(problem, algorithm).data
    v = problem.source.data
    pops = [np.abs(v) ** 2]
    for _ in range(cfg.iterations):
        v = op @ v
        pops.append(np.abs(v) ** 2)
    return np.array(pops)


def _nmr_populations(cfg: ScenarioConfig, algorithm: str) -> np.ndarray:
    rho = nmr.run_sequence(nmr.theta_pulse(cfg.theta), nmr.pps_00())
    u = nmr.search_sequence(cfg.theta, cfg.phi, cfg.varphi, algorithm).unitary()
    # Every iteration count is a separate experiment: read out a crushed
    # copy and keep propagating the coherent state.
    pops = [nmr.measure_populations(rho)]
    for _ in range(cfg.iterations):
        rho = conjugate(u, rho)
        pops.append(nmr.measure_populations(rho))
    return np.array(pops)


_BACKENDS = {
    "two_level": _two_level_populations,
    "state_vector": _state_vector_populations,
    "nmr_pulse": _nmr_populations,
}


def _check_populations(pops: np.ndarray) -> None:
    p_target = pops[:, TARGET_INDEX]
    if np.any(p_target < -1e-12) or np.any(p_target > 1 + 1e-12):
        raise InvariantViolation("target probability left [0, 1]")
    full = ~np.isnan(pops).any(axis=1)
    if np.any(np.abs(pops[full].sum(axis=1) - 1) > 1e-9):
        raise InvariantViolation("populations do not sum to 1")


def _opt(x: float) -> float | None:
    return None if math.isnan(x) else float(x)


def _run_one(cfg: ScenarioConfig, algorithm: str) -> RunRecord:
    pops = _BACKENDS[cfg.backend](cfg, algorithm)
    _check_populations(pops)
    calls = amplify.ORACLE_CALLS[algorithm]
    rows = tuple(
        Row(q, q * calls, _opt(p[0]), _opt(p[1]), _opt(p[2]), _opt(p[3]), float(p[TARGET_INDEX]))
        for q, p in enumerate(pops)
    )
    probs = pops[:, TARGET_INDEX]
    argmax = int(np.argmax(probs))
    try:
        predicted = amplify.predicted_iterations(cfg.overlap, cfg.phi, cfg.varphi)
    except DegeneratePhaseError:
        predicted = None
    metadata = {
        "config": cfg.to_dict(),
        "algorithm": algorithm,
        "alpha": cfg.overlap,
        "predicted_iterations": predicted,
        "peak_probability": float(probs[argmax]),
        "argmax_iteration": argmax,
        "argmax_oracle_calls": argmax * calls,
        "first_peak_iteration": first_peak(probs),
    }
    return RunRecord(rows, metadata)


def run_scenario(cfg: ScenarioConfig) -> RunRecord | tuple[RunRecord, RunRecord]:
    """Run the configured algorithm(s); ``both`` returns ``(original, modified)``."""
    records = tuple(_run_one(cfg, alg) for alg in cfg.algorithms())
    return records if cfg.algorithm == "both" else records[0]


@dataclass(frozen=True)
class ComparisonReport:
    peak: tuple[float, float]
    argmax_iteration: tuple[int, int]
    argmax_oracle_calls: tuple[int, int]
    first_peak_oracle_calls: tuple[int, int]
    deltas: tuple[float, ...]
    phase_matching: bool

    @property
    def verdict(self) -> str:
        return "phase matching satisfied" if self.phase_matching else "phase matching violated"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d


def compare_report(a: RunRecord, b: RunRecord, c: float = 1.0) -> ComparisonReport:
    """Side-by-side summary of two records; deltas are ``b - a`` per iteration."""
    if len(a.rows) != len(b.rows):
        raise ValueError(f"records differ in length ({len(a.rows)} vs {len(b.rows)})")
    cfg = a.metadata["config"]
    calls = tuple(r.rows[1].oracle_calls if len(r.rows) > 1 else 1 for r in (a, b))
    first = tuple(r.metadata["first_peak_iteration"] * k for r, k in zip((a, b), calls))
    return ComparisonReport(
        peak=(a.peak_probability, b.peak_probability),
        argmax_iteration=(a.argmax_iteration, b.argmax_iteration),
        argmax_oracle_calls=(a.metadata["argmax_oracle_calls"], b.metadata["argmax_oracle_calls"]),
        first_peak_oracle_calls=first,
        deltas=tuple(float(d) for d in b.probabilities - a.probabilities),
        phase_matching=amplify.phase_matching_satisfied(cfg["phi"], cfg["varphi"], a.metadata["alpha"], c),
    )


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.{DECIMALS}f}"


def to_csv(record: RunRecord) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in record.rows:
        writer.writerow([_cell(getattr(row, f.name)) for f in fields(Row)])
    return buf.getvalue()


def to_json(record: RunRecord | tuple[RunRecord, RunRecord]) -> str:
    if isinstance(record, RunRecord):
        payload = record.to_json_dict()
    else:
        payload = {r.algorithm: r.to_json_dict() for r in record}
        payload["comparison"] = compare_report(*record).to_dict()
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def from_json(text: str) -> RunRecord | tuple[RunRecord, ...]:
    d = json.loads(text)
    if "rows" in d:
        return RunRecord.from_json_dict(d)
    return tuple(RunRecord.from_json_dict(d[alg]) for alg in amplify.ALGORITHMS if alg in d)


def render(record: RunRecord | tuple[RunRecord, RunRecord], fmt: str) -> str:
    if fmt == "json":
        return to_json(record)
    if fmt != "csv":
        raise ConfigError(f"unknown output format {fmt!r}")
    if isinstance(record, RunRecord):
        return to_csv(record)
    return "".join(f"# algorithm: {r.algorithm}\n{to_csv(r)}" for r in record)


def emit(record, fmt: str, destination: str | Path | TextIO) -> None:
    """Write ``record`` (or an original/modified pair) to a stream or path.

    A pair emitted as CSV to a path is split into ``<stem>.<algorithm>.csv``
    files so each one keeps the plain header.
    """
    if hasattr(destination, "write"):
        destination.write(render(record, fmt))
        return
    path = Path(destination)
    if fmt == "csv" and not isinstance(record, RunRecord):
        for r in record:
            path.with_name(f"{path.stem}.{r.algorithm}{path.suffix or '.csv'}").write_text(to_csv(r))
        return
    path.write_text(render(record, fmt))

