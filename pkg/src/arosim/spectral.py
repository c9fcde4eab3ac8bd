"""Dressed-state analysis: eigendecomposition, closed-form tripod spectrum,
branch tracking with continuity across time, and the effective two-level gap.

Branch indexing follows the closed-form convention for the symmetric tripod:
eigenvalues come in an inner pair -/+inner and an outer pair -/+outer, where
the inner gap saturates at 2*delta/sqrt(3) for strong drive while the outer
gap keeps growing with the Rabi frequency.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .hamiltonian import RwaHamiltonian
from .model import StateVector, TimeGrid

# Squared initial-state overlap above which a branch is marked populated.
POPULATED_THRESHOLD = 1e-3

# Two candidate branch assignments closer than this are considered ambiguous.
ASSIGNMENT_MARGIN = 1e-6

MIN_CONTINUITY_OVERLAP = 0.5


class TrackingError(RuntimeError):
    """Branch continuity could not be established on the given grid."""


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each eigenvector real positive.

    Accepts a single (dim, dim) matrix of column vectors or a stack
    (..., dim, dim); returns the adjusted array (operates on a copy).
    """
    v = np.array(vecs)
    mags = np.abs(v)
    idx = np.argmax(mags, axis=-2)  # per column: row of the dominant component
    dominant = np.take_along_axis(v, idx[..., None, :], axis=-2)
    phase = dominant / np.where(np.abs(dominant) == 0.0, 1.0, np.abs(dominant))
    v = v * np.conj(phase)
    # strictly real dominant component for real-symmetric input
    if np.iscomplexobj(v) and np.allclose(v.imag, 0.0, atol=0.0):
        v = v.real
    return v


def dressed_spectrum(h: RwaHamiltonian, t: float):
    """Eigenvalues (ascending, real) and phase-fixed eigenvectors of H(t)."""
    w, v = np.linalg.eigh(h.evaluate(t))
    return w, _fix_phases(v)


def _d_squared(delta, chi):
    """Inner discriminant of the tripod quartic: sqrt(d^4 + 2 chi^2 d^2 + 9 chi^4)."""
    return np.sqrt(delta**4 + 2.0 * chi**2 * delta**2 + 9.0 * chi**4)


def analytic_tripod_eigenvalues(delta, chi):
    """Closed-form dressed energies of the symmetric tripod (detuning = 0).

    Returns (l1, l2, l3, l4) with l1,2 = -/+ the inner branch
    sqrt((delta^2 + 3 chi^2 - D^2) / 2) and l3,4 = -/+ the outer branch.
    Accepts scalars or broadcastable arrays.

    The inner radicand cancels catastrophically both for chi -> 0 and for
    chi >> delta, so it is evaluated through the exact identity
    (delta^2 + 3 chi^2)^2 - D^4 = 4 chi^2 delta^2, i.e.
    inner = chi * delta * sqrt(2 / (delta^2 + 3 chi^2 + D^2)), which is
    stable everywhere and needs no clamping.
    """
    delta = np.asarray(delta, dtype=float)
    chi = np.asarray(chi, dtype=float)
    d2 = _d_squared(delta, chi)
    s = delta**2 + 3.0 * chi**2
    # the max() only guards the delta = chi = 0 corner, where inner = 0 exactly
    inner = chi * delta * np.sqrt(2.0 / np.maximum(s + d2, 1e-300))
    outer = np.sqrt((s + d2) / 2.0)
    if inner.ndim == 0:
        return -float(inner), float(inner), -float(outer), float(outer)
    return -inner, inner, -outer, outer


def tlds_gap(delta, chi):
    """Gap of the populated inner pair, l2 - l1 = 2*l2.

    Grows like 2*chi for weak drive and saturates at 2*delta/sqrt(3) for
    strong drive; the saturation is what decouples the oscillation frequency
    from the pulse amplitude.
    """
    _, l2, _, _ = analytic_tripod_eigenvalues(delta, chi)
    return 2.0 * l2


@dataclass(frozen=True, eq=False)
class DressedBranches:
    """Continuity-ordered eigenvalue/eigenvector branches over a time grid.

    eigenvalues[k, b] and eigenvectors[k, :, b] belong to branch b at time
    times[k]; populated[b] marks branches whose squared overlap with the
    initial state at times[0] exceeds 1e-3.
    """

    times: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    populated: np.ndarray

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[1]

    def populated_indices(self) -> np.ndarray:
        return np.nonzero(self.populated)[0]

    def write_csv(self, path) -> None:
        """Columns: t, lambda_1..lambda_dim, populated_1..populated_dim."""
        dim = self.dimension
        header = (
            ["t"]
            + [f"lambda_{b + 1}" for b in range(dim)]
            + [f"populated_{b + 1}" for b in range(dim)]
        )
        flags = [int(f) for f in self.populated]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for k, t in enumerate(self.times):
                row = [f"{t:.17g}"] + [f"{x:.17g}" for x in self.eigenvalues[k]]
                writer.writerow(row + [str(f) for f in flags])


def _assign_branches(ov: np.ndarray) -> np.ndarray:
    """Map previous branches to new eigenvector columns by maximal overlap.

    ov[b, j] = |<branch b at the previous step | new column j>|. Greedy over
    descending magnitude with a uniqueness check: if two competing
    assignments are closer than 1e-6 the grid is too coarse to disambiguate
    and a TrackingError is raised. Returns perm with perm[b] = column index
    continuing branch b.
    """
    dim = ov.shape[0]

    # Fast path: the identity assignment dominates (no branch rearrangement).
    diag = np.diagonal(ov)
    off = ov - np.diag(diag)
    if (
        np.all(diag > MIN_CONTINUITY_OVERLAP)
        and np.all(diag >= off.max(axis=1) + ASSIGNMENT_MARGIN)
        and np.all(diag >= off.max(axis=0) + ASSIGNMENT_MARGIN)
    ):
        return np.arange(dim)

    order = np.argsort(ov, axis=None)[::-1]
    rows_used = np.zeros(dim, dtype=bool)
    cols_used = np.zeros(dim, dtype=bool)
    perm = np.full(dim, -1)
    assigned = 0
    for pos, flat in enumerate(order):
        i, j = divmod(int(flat), dim)
        if rows_used[i] or cols_used[j]:
            continue
        val = ov[i, j]
        # ambiguity: a conflicting candidate of nearly the same magnitude
        for flat2 in order[pos + 1 :]:
            i2, j2 = divmod(int(flat2), dim)
            if rows_used[i2] or cols_used[j2]:
                continue
            if val - ov[i2, j2] >= ASSIGNMENT_MARGIN:
                break
            if i2 == i or j2 == j:
                raise TrackingError(
                    "branch assignment ambiguous (competing overlaps within "
                    f"{ASSIGNMENT_MARGIN:g}); use a finer time grid"
                )
        perm[i] = j
        rows_used[i] = True
        cols_used[j] = True
        assigned += 1
        if assigned == dim:
            break

    gained = ov[np.arange(dim), perm]
    if np.any(gained <= MIN_CONTINUITY_OVERLAP):
        raise TrackingError(
            "consecutive eigenvector overlap dropped below 0.5; use a finer time grid"
        )
    return perm


def track_branches(h: RwaHamiltonian, grid: TimeGrid, initial: StateVector) -> DressedBranches:
    """Diagonalize H on the grid and order branches by continuity in time.

    Branch order at the first grid point is ascending in energy; afterwards
    each branch follows the eigenvector of maximal overlap with its previous
    step, so labels stay attached through rearrangements of the sorted order.
    """
    if initial.dimension != h.dimension:
        raise ValueError(
            f"initial state dimension {initial.dimension} != system dimension {h.dimension}"
        )
    times = grid.times
    stack = h.evaluate_many(times)
    w, v = np.linalg.eigh(stack)
    v = _fix_phases(v)

    # consecutive-step overlap magnitudes, batched: |V_k^dag V_{k+1}|
    overlap = np.abs(np.einsum("kij,kil->kjl", v[:-1].conj(), v[1:]))

    dim = h.dimension
    cols = np.empty((len(times), dim), dtype=int)
    cols[0] = np.arange(dim)
    for k in range(1, len(times)):
        # raw-column continuation at this step, composed onto the branch map
        cols[k] = _assign_branches(overlap[k - 1])[cols[k - 1]]

    rows = np.arange(len(times))[:, None]
    eigenvalues = w[rows, cols]
    eigenvectors = v[rows[..., None], np.arange(dim)[None, :, None], cols[:, None, :]]

    overlaps2 = np.abs(eigenvectors[0].conj().T @ initial.amplitudes) ** 2
    populated = overlaps2 > POPULATED_THRESHOLD
    return DressedBranches(times, eigenvalues, eigenvectors, populated)
