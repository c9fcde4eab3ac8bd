"""RWA Hamiltonians for tripod and N+N ladder level schemes.

H(t) = diag(bare energies) - Omega(t)/2 * (coupling mask), where the mask
connects every ground-excited pair with its configured weight and there are
no ground-ground or excited-excited couplings. The matrix is real symmetric
(hence Hermitian) by construction at every time.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LevelScheme, PulseSpec, pulse_value


@dataclass(frozen=True)
class RwaHamiltonian:
    """Time-dependent RWA Hamiltonian for a level scheme driven by one pulse."""

    scheme: LevelScheme
    pulse: PulseSpec

    @property
    def dimension(self) -> int:
        return self.scheme.dimension

    def diagonal(self) -> np.ndarray:
        """Static diagonal: delta*M for ground, delta_prime*M' + detuning for excited."""
        return self.scheme.bare_energies()

    def coupling_matrix(self) -> np.ndarray:
        """Symmetric mask C with H(t) = diag - (Omega(t)/2) * C."""
        ng, ne = self.scheme.n_ground, self.scheme.n_excited
        c = np.zeros((ng + ne, ng + ne))
        c[:ng, ng:] = self.scheme.coupling_weights
        c[ng:, :ng] = self.scheme.coupling_weights.T
        return c

    def evaluate(self, t: float) -> np.ndarray:
        """Hamiltonian matrix at time t (real symmetric, energy units)."""
        chi = 0.5 * pulse_value(self.pulse, t)
        return np.diag(self.diagonal()) - chi * self.coupling_matrix()

    def evaluate_many(self, times) -> np.ndarray:
        """Stacked matrices at all given times, shape (n_times, dim, dim)."""
        times = np.asarray(times, dtype=float)
        chi = 0.5 * pulse_value(self.pulse, times)
        out = np.zeros((times.size,) + (self.dimension,) * 2)
        out[:] = np.diag(self.diagonal())
        out -= chi[:, None, None] * self.coupling_matrix()
        return out

    def spectral_bound(self, omega0: float | None = None) -> float:
        """Upper bound on the spectral radius of H(t) over the pulse.

        max |diagonal| plus the 2-norm of the coupling block at peak drive;
        used to size integration steps.
        """
        if omega0 is None:
            omega0 = self.pulse.omega0
        coupling_norm = float(np.linalg.norm(self.scheme.coupling_weights, ord=2))
        return float(np.max(np.abs(self.diagonal()))) + 0.5 * omega0 * coupling_norm


def build_tripod(delta: float, detuning: float, pulse: PulseSpec) -> RwaHamiltonian:
    """3+1 system: ground M in {-1, 0, 1}, one excited level at `detuning`.

    All three transitions carry the same coupling -Omega(t)/2.
    """
    return RwaHamiltonian(LevelScheme.tripod(delta, detuning), pulse)


def build_ladder(
    n_ground: int,
    n_excited: int,
    delta: float,
    delta_prime: float,
    detuning: float,
    pulse: PulseSpec,
    weights=None,
) -> RwaHamiltonian:
    """Two fully coupled manifolds of odd sizes (e.g. 5+5 ladders).

    Every ground-excited pair is coupled by -Omega(t)/2 times its weight.
    Even manifold sizes are rejected (levels are indexed symmetrically about
    M = 0).
    """
    scheme = LevelScheme(
        n_ground, n_excited, float(delta), float(delta_prime), float(detuning), weights
    )
    return RwaHamiltonian(scheme, pulse)


def evaluate(h: RwaHamiltonian, t: float) -> np.ndarray:
    """Module-level alias for RwaHamiltonian.evaluate."""
    return h.evaluate(t)
