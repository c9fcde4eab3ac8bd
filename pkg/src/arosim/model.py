"""Core domain types: drive pulses, level schemes, state vectors, time grids.

Everything downstream (Hamiltonians, propagation, scans) consumes these.
All types are immutable after construction and safe to share across workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

PULSE_SHAPES = ("gaussian", "constant")

# Fraction of the analytic Gaussian area that may fall outside the
# integration window before pulse_area flags the result as truncated.
TRUNCATION_TOLERANCE = 1e-3


@dataclass(frozen=True)
class PulseSpec:
    """Shaped drive envelope Omega(t) >= 0.

    omega0 is the peak Rabi frequency, tau0 the Gaussian width, tc the pulse
    center and [t_start, t_end] the integration window. A 'gaussian' pulse is
    omega0 * exp(-(t - tc)^2 / (2 tau0^2)) everywhere; a 'constant' pulse is
    omega0 inside the window and 0 outside.
    """

    shape: str
    omega0: float
    tau0: float = 1.0
    tc: float = 5.0
    t_start: float = 0.0
    t_end: float = 10.0

    def __post_init__(self):
        if self.shape not in PULSE_SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}; expected one of {PULSE_SHAPES}")
        if not self.omega0 >= 0.0:
            raise ValueError(f"omega0 must be >= 0, got {self.omega0}")
        if not self.tau0 > 0.0:
            raise ValueError(f"tau0 must be > 0, got {self.tau0}")
        if not self.t_start < self.t_end:
            raise ValueError(f"window requires t_start < t_end, got [{self.t_start}, {self.t_end}]")

    @classmethod
    def gaussian(cls, omega0, tau0=1.0, tc=None, t_start=0.0, t_end=None):
        """Gaussian pulse with the default window [0, 2 tc], tc = 5 tau0."""
        if tc is None:
            tc = 5.0 * tau0
        if t_end is None:
            t_end = 2.0 * tc
        return cls("gaussian", float(omega0), float(tau0), float(tc), float(t_start), float(t_end))

    @classmethod
    def gaussian_with_area(cls, s0, tau0=1.0, tc=None, t_start=0.0, t_end=None):
        """Gaussian pulse whose full (untruncated) area equals s0."""
        omega0 = float(s0) / (math.sqrt(2.0 * math.pi) * tau0)
        return cls.gaussian(omega0, tau0, tc, t_start, t_end)

    @classmethod
    def constant(cls, omega0, t_start, t_end):
        return cls("constant", float(omega0), 1.0, 0.5 * (t_start + t_end), float(t_start), float(t_end))

    def with_omega0(self, omega0: float) -> "PulseSpec":
        """Same pulse with a different peak amplitude."""
        return PulseSpec(self.shape, float(omega0), self.tau0, self.tc, self.t_start, self.t_end)

    @property
    def analytic_area(self) -> float:
        """Closed-form area: sqrt(2 pi) omega0 tau0 (gaussian, full line) or omega0 * L."""
        if self.shape == "gaussian":
            return math.sqrt(2.0 * math.pi) * self.omega0 * self.tau0
        return self.omega0 * (self.t_end - self.t_start)

    def window_fraction(self) -> float:
        """Fraction of the analytic area that lies inside [t_start, t_end]."""
        if self.shape == "constant":
            return 1.0
        lo = (self.t_start - self.tc) / (self.tau0 * math.sqrt(2.0))
        hi = (self.t_end - self.tc) / (self.tau0 * math.sqrt(2.0))
        return 0.5 * (math.erf(hi) - math.erf(lo))


def pulse_value(pulse: PulseSpec, t):
    """Envelope Omega(t); accepts scalars or arrays, always >= 0."""
    t = np.asarray(t, dtype=float)
    if pulse.shape == "gaussian":
        out = pulse.omega0 * np.exp(-((t - pulse.tc) ** 2) / (2.0 * pulse.tau0**2))
    else:
        out = np.where((t >= pulse.t_start) & (t <= pulse.t_end), pulse.omega0, 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PulseArea:
    """Numerical pulse area with a truncation diagnostic.

    truncated is set when more than 0.1% of the analytic Gaussian area falls
    outside the integration window.
    """

    value: float
    truncated: bool

    def __float__(self) -> float:
        return self.value


def pulse_area(pulse: PulseSpec, grid: "TimeGrid") -> PulseArea:
    """Quadrature of Omega(t) over the grid (which must cover the pulse window)."""
    times = grid.times
    vals = pulse_value(pulse, times)
    area = float(simpson(vals, x=times))
    truncated = (1.0 - pulse.window_fraction()) > TRUNCATION_TOLERANCE
    return PulseArea(area, truncated)


@dataclass(frozen=True, eq=False)
class LevelScheme:
    """Ground/excited manifolds with linear splittings and a coupling mask.

    Ground level M has bare energy delta * M and excited level M' has energy
    delta_prime * M' + detuning, with M and M' integers centered on zero
    (manifold sizes must therefore be odd). coupling_weights[g, e] scales the
    drive coupling between ground level g and excited level e; a zero entry
    disables that transition. Defaults to all ones (fully coupled).
    """

    n_ground: int
    n_excited: int
    delta: float
    delta_prime: float = 0.0
    detuning: float = 0.0
    coupling_weights: np.ndarray | None = None

    def __post_init__(self):
        for name, n in (("n_ground", self.n_ground), ("n_excited", self.n_excited)):
            if n < 1:
                raise ValueError(f"{name} must be >= 1, got {n}")
            if n % 2 == 0:
                raise ValueError(
                    f"{name} must be odd (levels are indexed by M centered on zero), got {n}"
                )
        if self.coupling_weights is None:
            w = np.ones((self.n_ground, self.n_excited))
        else:
            w = np.asarray(self.coupling_weights, dtype=float)
            if w.shape != (self.n_ground, self.n_excited):
                raise ValueError(
                    f"coupling_weights shape {w.shape} != ({self.n_ground}, {self.n_excited})"
                )
            if not np.all(np.isfinite(w)):
                raise ValueError("coupling_weights must be finite")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "coupling_weights", w)

    @classmethod
    def tripod(cls, delta, detuning=0.0, coupling_weights=None):
        """Three ground sublevels coupled to a single excited state."""
        return cls(3, 1, float(delta), 0.0, float(detuning), coupling_weights)

    @property
    def dimension(self) -> int:
        return self.n_ground + self.n_excited

    @property
    def ground_m(self) -> np.ndarray:
        half = (self.n_ground - 1) // 2
        return np.arange(-half, half + 1)

    @property
    def excited_m(self) -> np.ndarray:
        half = (self.n_excited - 1) // 2
        return np.arange(-half, half + 1)

    def bare_energies(self) -> np.ndarray:
        """Diagonal of the RWA Hamiltonian, ground levels first."""
        return np.concatenate(
            [self.delta * self.ground_m, self.delta_prime * self.excited_m + self.detuning]
        )

    def level_index(self, m: int, excited: bool = False) -> int:
        """Index of ground level M (or excited level M') in the state ordering."""
        ms = self.excited_m if excited else self.ground_m
        hits = np.nonzero(ms == m)[0]
        if len(hits) == 0:
            raise ValueError(f"no {'excited' if excited else 'ground'} level with M={m}")
        return int(hits[0]) + (self.n_ground if excited else 0)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over all levels, ground (ascending M) then excited.

    The squared amplitudes must sum to 1 within 1e-12 at construction.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).copy()
        if a.ndim != 1 or a.size < 2:
            raise ValueError("amplitudes must be a 1-D array of length >= 2")
        norm2 = float(np.sum(np.abs(a) ** 2))
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"state norm^2 = {norm2!r} differs from 1 by more than 1e-12")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def basis(cls, dimension: int, index: int) -> "StateVector":
        if not 0 <= index < dimension:
            raise ValueError(f"basis index {index} out of range for dimension {dimension}")
        a = np.zeros(dimension, dtype=complex)
        a[index] = 1.0
        return cls(a)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of n_steps intervals over [t_start, t_end]."""

    t_start: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.t_start < self.t_end:
            raise ValueError(f"need t_start < t_end, got [{self.t_start}, {self.t_end}]")

    @classmethod
    def for_pulse(cls, pulse: PulseSpec, points_per_tau0: float = 400.0) -> "TimeGrid":
        """Grid spanning the pulse window at a given resolution per tau0."""
        n = int(math.ceil((pulse.t_end - pulse.t_start) / pulse.tau0 * points_per_tau0))
        return cls(pulse.t_start, pulse.t_end, max(n, 1))

    @property
    def h(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps

    @property
    def n_points(self) -> int:
        return self.n_steps + 1

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_steps + 1)
