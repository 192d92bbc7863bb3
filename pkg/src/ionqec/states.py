"""Dense pure-state and mixed-state linear algebra for registers of two-level ions.

Conventions used throughout the package:

* Ions are numbered 1..n.  Basis index k encodes the register as
  k = S_n * 2**(n-1) + ... + S_1 * 2**0, i.e. ion 1 is the least
  significant bit and S_j = 1 means ion j is excited.
* States are compared by fidelity |<a|b>|**2, never amplitude-wise,
  because pulse conventions introduce physically irrelevant phases.
* Operations return new values; existing arrays are never mutated.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_IONS = 14

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
ANNIHILATION_TOL = 1e-300


class AnnihilationError(Exception):
    """A jump (or other non-unitary map) left the state with no support."""


def _check_ion(ion: int, n_ions: int) -> None:
    if not 1 <= ion <= n_ions:
        raise IndexError(f"ion {ion} out of range for {n_ions}-ion register")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes of an n-ion register, indexed by basis integer k."""

    n_ions: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n_ions <= MAX_IONS:
            raise ValueError(f"n_ions must be in [1, {MAX_IONS}], got {self.n_ions}")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_ions,):
            raise ValueError(
                f"expected {2**self.n_ions} amplitudes, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2**self.n_ions

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalize(self) -> "StateVector":
        n2 = self.norm_squared()
        if n2 < ANNIHILATION_TOL:
            raise AnnihilationError("cannot normalize a state with no support")
        return StateVector(self.n_ions, self.amplitudes / np.sqrt(n2))

    def probability(self, k: int) -> float:
        return float(abs(self.amplitudes[k]) ** 2)


def basis_state(n_ions: int, k: int) -> StateVector:
    """Computational basis state |k> with bit pattern S_n ... S_1."""
    dim = 2**n_ions
    if not 0 <= k < dim:
        raise IndexError(f"basis index {k} out of range for {n_ions} ions")
    amps = np.zeros(dim, dtype=complex)
    amps[k] = 1.0
    return StateVector(n_ions, amps)


def ground_register(n_ions: int) -> StateVector:
    """All ions in the ground level |0...0>."""
    return basis_state(n_ions, 0)


def complement_index(k: int, n_ions: int) -> int:
    """Bitwise complement of k modulo 2**n; an involution."""
    dim = 2**n_ions
    if not 0 <= k < dim:
        raise IndexError(f"basis index {k} out of range for {n_ions} ions")
    return (dim - 1) - k


@lru_cache(maxsize=None)
def hamming_weights(n_ions: int) -> np.ndarray:
    """Number of excited ions w(k) for every basis index, as a read-only array."""
    w = np.array([bin(k).count("1") for k in range(2**n_ions)], dtype=float)
    w.setflags(write=False)
    return w


@lru_cache(maxsize=None)
def bit_values(n_ions: int, ion: int) -> np.ndarray:
    """S_ion(k) for every basis index k, as a read-only 0/1 array."""
    _check_ion(ion, n_ions)
    k = np.arange(2**n_ions)
    bits = ((k >> (ion - 1)) & 1).astype(float)
    bits.setflags(write=False)
    return bits


def _apply_2x2(amps: np.ndarray, n_ions: int, ion: int, m: np.ndarray) -> np.ndarray:
    # axis 0 of the reshaped tensor is ion n (most significant bit)
    axis = n_ions - ion
    a = np.moveaxis(amps.reshape([2] * n_ions), axis, 0)
    out = np.empty_like(a)
    out[0] = m[0, 0] * a[0] + m[0, 1] * a[1]
    out[1] = m[1, 0] * a[0] + m[1, 1] * a[1]
    return np.moveaxis(out, 0, axis).reshape(-1)


def apply_single_ion(state: StateVector, ion: int, u: np.ndarray) -> StateVector:
    """Apply a unitary 2x2 matrix to one ion, identity on the rest."""
    _check_ion(ion, state.n_ions)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > UNITARY_TOL:
        raise ValueError("matrix is not unitary within tolerance")
    return StateVector(state.n_ions, _apply_2x2(state.amplitudes, state.n_ions, ion, u))


def apply_nonunitary_single_ion(
    state: StateVector, ion: int, m: np.ndarray
) -> tuple[StateVector, float]:
    """Apply an arbitrary 2x2 matrix to one ion.

    Returns the un-normalized result together with its squared norm; the
    caller decides whether to renormalize.  Raises AnnihilationError when
    the result has no support (e.g. a jump on an unexcited ion).
    """
    _check_ion(ion, state.n_ions)
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    amps = _apply_2x2(state.amplitudes, state.n_ions, ion, m)
    n2 = float(np.vdot(amps, amps).real)
    if n2 < ANNIHILATION_TOL:
        raise AnnihilationError(f"state has no support after the map on ion {ion}")
    return StateVector(state.n_ions, amps), n2


def excited_population(state: StateVector, ion: int) -> float:
    """Probability of finding the given ion in the excited level |1>."""
    bits = bit_values(state.n_ions, ion)
    p = np.abs(state.amplitudes) ** 2
    total = p.sum()
    return float((p * bits).sum() / total) if total > 0 else 0.0


def fidelity(a: StateVector, b: StateVector) -> float:
    """Squared overlap |<a|b>|**2 of two normalized states."""
    if a.n_ions != b.n_ions:
        raise ValueError(f"dimension mismatch: {a.n_ions} vs {b.n_ions} ions")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


# ---------------------------------------------------------------------------
# Density matrices (used only by the brute-force master-equation oracle)
# ---------------------------------------------------------------------------

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Exact mixed-state representation: Hermitian, unit trace, PSD."""

    n_ions: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n_ions <= MAX_IONS:
            raise ValueError(f"n_ions must be in [1, {MAX_IONS}], got {self.n_ions}")
        dim = 2**self.n_ions
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(rho).real - 1.0) > TRACE_TOL or abs(np.trace(rho).imag) > TRACE_TOL:
            raise ValueError("density matrix trace is not 1 within tolerance")
        if np.linalg.eigvalsh(rho).min() < PSD_TOL:
            raise ValueError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)


def pure_to_density(s: StateVector) -> DensityMatrix:
    """Outer product |s><s| of a normalized pure state."""
    a = s.normalize().amplitudes
    return DensityMatrix(s.n_ions, np.outer(a, a.conj()))


def mix(states: list[tuple[float, StateVector]]) -> DensityMatrix:
    """Convex combination of pure states with non-negative weights summing to 1."""
    if not states:
        raise ValueError("mix requires at least one (weight, state) pair")
    weights = np.array([w for w, _ in states], dtype=float)
    if weights.min() < 0:
        raise ValueError("weights must be non-negative")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError(f"weights sum to {weights.sum()}, expected 1 within 1e-9")
    n = states[0][1].n_ions
    rho = np.zeros((2**n, 2**n), dtype=complex)
    for w, s in states:
        a = s.normalize().amplitudes
        rho += w * np.outer(a, a.conj())
    return DensityMatrix(n, rho)


# ---------------------------------------------------------------------------
# State snapshot serialization
# ---------------------------------------------------------------------------

def state_to_json(state: StateVector) -> str:
    """Serialize as {"n_ions": n, "amplitudes": [[re, im], ...]} with k ascending."""
    payload = {
        "n_ions": state.n_ions,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
    }
    return json.dumps(payload, sort_keys=True)


def state_from_json(text: str) -> StateVector:
    payload = json.loads(text)
    amps = np.array([complex(re, im) for re, im in payload["amplitudes"]])
    return StateVector(int(payload["n_ions"]), amps)
