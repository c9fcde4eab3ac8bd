"""Parameter scans: final-time target population versus pulse area, and 2-D
maps versus (area, splitting).

The scan coordinate is the full Gaussian pulse area S0 in units of pi; the
peak amplitude of each point is omega0 = S0 / (sqrt(2 pi) tau0). Points are
propagated in fixed-size batches whose boundaries depend only on the scan
specification, so results are bitwise independent of the worker count and of
scheduling order.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .adiabatic import area_symmetric_tripod, generalized_area
from .hamiltonian import RwaHamiltonian
from .model import LevelScheme, PulseSpec, StateVector, TimeGrid
from .propagator import PropagationError, propagate_batch, recommended_steps_per_tau0
from .spectral import track_branches

# Batch width for propagation tasks. Fixed so that identical specs always
# produce identical arithmetic regardless of worker count.
CHUNK = 512

# Resolution of the quadrature/tracking grid used for adiabatic yields.
ADIABATIC_POINTS_PER_TAU0 = 400


@dataclass(frozen=True)
class AxisSpec:
    """Uniform scan axis with n >= 2 points on [minimum, maximum]."""

    minimum: float
    maximum: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"axis needs n >= 2 points, got {self.n}")
        if not self.minimum < self.maximum:
            raise ValueError(f"axis needs minimum < maximum, got [{self.minimum}, {self.maximum}]")

    def values(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.n)


@dataclass(frozen=True)
class ScanSpec:
    """What to scan: system template, pulse template, levels, axes, methods.

    area_axis is in units of pi. delta_axis (optional, units 1/tau0) turns
    the scan into a 2-D map over the ground splitting. detuning_factor, when
    set, ties the detuning to the splitting as detuning = factor * delta per
    delta row (used for configurations that keep e.g. detuning = -delta while
    delta varies). methods selects which yields to compute.
    """

    scheme: LevelScheme
    pulse: PulseSpec
    initial_level: int
    target_level: int
    area_axis: AxisSpec
    delta_axis: AxisSpec | None = None
    methods: tuple[str, ...] = ("tdse",)
    detuning_factor: float | None = None

    def __post_init__(self):
        if self.area_axis.minimum < 0:
            raise ValueError("pulse areas must be >= 0")
        bad = set(self.methods) - {"tdse", "adiabatic"}
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}; allowed: tdse, adiabatic")
        if "tdse" not in self.methods:
            raise ValueError("the tdse method is mandatory")
        dim = self.scheme.dimension
        for name, lvl in (("initial_level", self.initial_level), ("target_level", self.target_level)):
            if not 0 <= lvl < dim:
                raise ValueError(f"{name} {lvl} out of range for dimension {dim}")

    def to_dict(self) -> dict:
        return {
            "scheme": {
                "n_ground": self.scheme.n_ground,
                "n_excited": self.scheme.n_excited,
                "delta": self.scheme.delta,
                "delta_prime": self.scheme.delta_prime,
                "detuning": self.scheme.detuning,
                "coupling_weights": np.asarray(self.scheme.coupling_weights).tolist(),
            },
            "pulse": {
                "shape": self.pulse.shape,
                "tau0": self.pulse.tau0,
                "tc": self.pulse.tc,
                "t_start": self.pulse.t_start,
                "t_end": self.pulse.t_end,
            },
            "initial_level": self.initial_level,
            "target_level": self.target_level,
            "area_axis": [self.area_axis.minimum, self.area_axis.maximum, self.area_axis.n],
            "delta_axis": None
            if self.delta_axis is None
            else [self.delta_axis.minimum, self.delta_axis.maximum, self.delta_axis.n],
            "methods": list(self.methods),
            "detuning_factor": self.detuning_factor,
        }


@dataclass(frozen=True, eq=False)
class ScanGrid:
    """Scan results: area axis (S0/pi), optional delta axis, yields in [0, 1].

    yield_tdse (and yield_adiabatic when requested) is 1-D (n_area,) for area
    scans and 2-D (n_delta, n_area) for maps. metadata records the full scan
    specification, grid resolutions and tool version.
    """

    area_values: np.ndarray
    delta_values: np.ndarray | None
    yield_tdse: np.ndarray
    yield_adiabatic: np.ndarray | None
    metadata: dict = field(default_factory=dict)

    @property
    def is_2d(self) -> bool:
        return self.delta_values is not None

    def write_csv(self, path) -> None:
        """Long-format CSV: s0_over_pi[,delta_tau0],yield_tdse[,yield_adiabatic]."""
        header = ["s0_over_pi"]
        if self.is_2d:
            header.append("delta_tau0")
        header.append("yield_tdse")
        if self.yield_adiabatic is not None:
            header.append("yield_adiabatic")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            if self.is_2d:
                for r, d in enumerate(self.delta_values):
                    for c, a in enumerate(self.area_values):
                        row = [f"{a:.17g}", f"{d:.17g}", f"{self.yield_tdse[r, c]:.17g}"]
                        if self.yield_adiabatic is not None:
                            row.append(f"{self.yield_adiabatic[r, c]:.17g}")
                        writer.writerow(row)
            else:
                for c, a in enumerate(self.area_values):
                    row = [f"{a:.17g}", f"{self.yield_tdse[c]:.17g}"]
                    if self.yield_adiabatic is not None:
                        row.append(f"{self.yield_adiabatic[c]:.17g}")
                    writer.writerow(row)

    def write_metadata(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _scheme_for_delta(spec: ScanSpec, delta: float) -> LevelScheme:
    s = spec.scheme
    detuning = s.detuning if spec.detuning_factor is None else spec.detuning_factor * delta
    return LevelScheme(
        s.n_ground, s.n_excited, delta, s.delta_prime, detuning, np.asarray(s.coupling_weights)
    )


def _common_grid(spec: ScanSpec, steps_per_tau0: int | None) -> tuple[TimeGrid, int]:
    """One integration grid sized for the worst point of the whole scan."""
    pulse = spec.pulse
    omega_max = spec.area_axis.maximum * math.pi / (math.sqrt(2.0 * math.pi) * pulse.tau0)
    if steps_per_tau0 is None:
        candidates = [spec.scheme.delta]
        if spec.delta_axis is not None:
            candidates = [spec.delta_axis.minimum, spec.delta_axis.maximum]
        steps_per_tau0 = max(
            recommended_steps_per_tau0(
                RwaHamiltonian(_scheme_for_delta(spec, d), pulse), omega_max
            )
            for d in candidates
        )
    n = int(math.ceil((pulse.t_end - pulse.t_start) / pulse.tau0 * steps_per_tau0))
    return TimeGrid(pulse.t_start, pulse.t_end, n), steps_per_tau0


def _tdse_points(
    spec: ScanSpec,
    omega0s: np.ndarray,
    diagonals: np.ndarray | None,
    grid: TimeGrid,
    workers: int,
    point_name,
) -> np.ndarray:
    """Target-level TDSE yields for a flat list of scan points.

    omega0s is the flattened amplitude per point; diagonals (optional,
    (n, dim)) carries per-point bare energies when the splitting varies.
    Points are processed in fixed CHUNK-sized slices so the arithmetic, and
    therefore the output bits, cannot depend on the worker count.
    """
    h = RwaHamiltonian(spec.scheme, spec.pulse)
    psi0 = StateVector.basis(spec.scheme.dimension, spec.initial_level)
    out = np.empty(omega0s.size)

    def task(start: int) -> None:
        stop = min(start + CHUNK, omega0s.size)
        diag_slice = None if diagonals is None else diagonals[start:stop]
        try:
            finals, _ = propagate_batch(h, omega0s[start:stop], psi0, grid, diag_slice)
        except PropagationError as exc:
            raise PropagationError(
                f"scan aborted at points {point_name(start)}..{point_name(stop - 1)}: {exc}"
            ) from exc
        out[start:stop] = np.abs(finals[:, spec.target_level]) ** 2

    starts = range(0, omega0s.size, CHUNK)
    if workers <= 1:
        for s in starts:
            task(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(task, starts))
    return out


def _is_symmetric_tripod(scheme: LevelScheme) -> bool:
    return (
        scheme.n_ground == 3
        and scheme.n_excited == 1
        and scheme.detuning == 0.0
        and np.all(np.asarray(scheme.coupling_weights) == 1.0)
    )


def _adiabatic_row(scheme: LevelScheme, spec: ScanSpec, omega0s: np.ndarray) -> np.ndarray:
    """Area-theorem yields sin^2(A/2) over the populated branch pair.

    Requires a resonant initial/target arrangement: the initial level must
    populate exactly two dressed branches, whose gap integral is the
    generalized area. The symmetric tripod takes the closed-form gap instead
    of tracking.
    """
    quad_grid = TimeGrid.for_pulse(spec.pulse, ADIABATIC_POINTS_PER_TAU0)
    out = np.empty(omega0s.size)
    symmetric = _is_symmetric_tripod(scheme) and spec.initial_level == 1
    if symmetric:
        for k, om in enumerate(omega0s):
            area = area_symmetric_tripod(scheme.delta, spec.pulse.with_omega0(om), quad_grid)
            out[k] = math.sin(0.5 * area) ** 2
        return out
    psi0 = StateVector.basis(scheme.dimension, spec.initial_level)
    for k, om in enumerate(omega0s):
        if om == 0.0:
            out[k] = 0.0
            continue
        h = RwaHamiltonian(scheme, spec.pulse.with_omega0(om))
        branches = track_branches(h, quad_grid, psi0)
        pop = branches.populated_indices()
        if len(pop) != 2:
            raise ValueError(
                f"adiabatic yield needs exactly 2 populated branches, found {len(pop)} "
                f"(omega0 = {om:g}); the initial level is not part of a resonant pair"
            )
        area = abs(generalized_area(branches, int(pop[0]), int(pop[1]), quad_grid))
        out[k] = math.sin(0.5 * area) ** 2
    return out


def _metadata(spec: ScanSpec, steps_per_tau0: int) -> dict:
    return {
        "tool_version": __version__,
        "scan_spec": spec.to_dict(),
        "integrator_steps_per_tau0": steps_per_tau0,
        "adiabatic_points_per_tau0": ADIABATIC_POINTS_PER_TAU0,
        "area_points": spec.area_axis.n,
        "delta_points": None if spec.delta_axis is None else spec.delta_axis.n,
    }


def scan_area(spec: ScanSpec, workers: int = 1, steps_per_tau0: int | None = None) -> ScanGrid:
    """1-D scan of the final target population versus pulse area.

    Yields are evaluated at S0 = area_axis values (in pi units) by deriving
    omega0 per point from the Gaussian area relation. The adiabatic method,
    when requested, adds the area-theorem curve.
    """
    if spec.delta_axis is not None:
        raise ValueError("scan_area requires delta_axis to be absent; use scan_area_delta")
    grid, steps = _common_grid(spec, steps_per_tau0)
    s0_over_pi = spec.area_axis.values()
    omega0s = s0_over_pi * math.pi / (math.sqrt(2.0 * math.pi) * spec.pulse.tau0)

    yield_tdse = _tdse_points(
        spec, omega0s, None, grid, workers, lambda k: f"(S0 = {s0_over_pi[k]:g} pi)"
    )
    yield_adiabatic = None
    if "adiabatic" in spec.methods:
        yield_adiabatic = _adiabatic_row(spec.scheme, spec, omega0s)
    return ScanGrid(s0_over_pi, None, yield_tdse, yield_adiabatic, _metadata(spec, steps))


def scan_area_delta(
    spec: ScanSpec, workers: int = 1, steps_per_tau0: int | None = None
) -> ScanGrid:
    """2-D map of the TDSE target yield over (pulse area, ground splitting).

    Rows are delta values, columns are areas. Each (row, chunk) pair is an
    independent task; assembly is by index so the output is deterministic.
    """
    if spec.delta_axis is None:
        raise ValueError("scan_area_delta requires a delta_axis")
    grid, steps = _common_grid(spec, steps_per_tau0)
    s0_over_pi = spec.area_axis.values()
    omega0s = s0_over_pi * math.pi / (math.sqrt(2.0 * math.pi) * spec.pulse.tau0)
    deltas = spec.delta_axis.values()
    n_area = omega0s.size

    # flatten row-major (delta outer, area inner) into one chunked batch
    diag_rows = np.stack([_scheme_for_delta(spec, float(d)).bare_energies() for d in deltas])
    diag_flat = np.repeat(diag_rows, n_area, axis=0)
    omega_flat = np.tile(omega0s, deltas.size)

    def point_name(flat: int) -> str:
        r, c = divmod(flat, n_area)
        return f"(delta = {deltas[r]:g}, S0 = {s0_over_pi[c]:g} pi)"

    flat = _tdse_points(spec, omega_flat, diag_flat, grid, workers, point_name)
    out = flat.reshape(deltas.size, n_area)
    return ScanGrid(s0_over_pi, deltas, out, None, _metadata(spec, steps))


def visibility(grid: ScanGrid, window: tuple[float, float]) -> float:
    """Oscillation contrast (max - min) / (max + min) of a 1-D yield curve.

    window is an (area_min, area_max) interval in the same pi units as the
    area axis and must contain at least 5 grid points spanning at least one
    full oscillation.
    """
    if grid.is_2d:
        raise ValueError("visibility is defined for 1-D area scans")
    lo, hi = window
    mask = (grid.area_values >= lo) & (grid.area_values <= hi)
    if mask.sum() < 5:
        raise ValueError(f"window {window} contains {int(mask.sum())} points; need at least 5")
    y = grid.yield_tdse[mask]
    top, bottom = float(y.max()), float(y.min())
    if top + bottom == 0.0:
        return 0.0
    return (top - bottom) / (top + bottom)
