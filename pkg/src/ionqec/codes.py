"""Encoders and decoders for the four codeword families.

Families
--------
fourier_pair
    One logical qubit on two ions a, b in the Fourier-transformed (tilde)
    basis:  c0 |0~>_a |0~>_b + c1 |1~>_a |1~>_b.
fourier_symmetrized
    The pair codeword extended with a partner pair c, d so that every
    computational basis ket carries exactly two excitations; invariant
    under the no-jump drift between emission events.
number_state
    An m-qubit logical state on m ions, joined by one fresh ground-state
    ion and complemented:  sum_k c_k/sqrt2 (|k> + |kbar>) over m+1 ions.
number_state_symmetrized
    The number-state codeword paired with a complementary partner set, so
    every ket has excitation weight equal to the set size.

Logical amplitudes are given in the computational labeling of each
family's basis: the tilde basis for the Fourier schemes, the electronic
number-state basis for the number-state schemes.  Conversions are explicit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .states import (
    StateVector,
    apply_single_ion,
    excited_population,
    ground_register,
    hamming_weights,
)
from .gates import (
    Cnot,
    CircuitStep,
    HALF_PI,
    PI,
    PulseSpec,
    complement_steps,
    run_circuit,
)

CODE_SPACE_TOL = 1e-9
GROUND_TOL = 1e-9


class DecodeError(Exception):
    """The register is outside the expected code space."""


@dataclass(frozen=True, eq=False)
class LogicalState:
    """Normalized amplitudes c_k of an m-qubit logical state (length 2**m)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size & (amps.size - 1):
            raise ValueError(f"length must be a power of two, got {amps.shape}")
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-12:
            raise ValueError("logical amplitudes are not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.amplitudes.size))


SCHEME_KINDS = (
    "fourier_pair",
    "fourier_symmetrized",
    "number_state",
    "number_state_symmetrized",
)


@dataclass(frozen=True)
class CodeScheme:
    """Which codeword family a register is encoded in, plus ion roles.

    data_ions holds the primary codeword set; for the number-state kinds
    its last entry is the freshly added ion whose ground state seeds the
    complementing step.  partner_ions is the symmetrizing set, and ancilla
    the ion used by the complementing transformation.
    """

    kind: str
    data_ions: tuple[int, ...]
    partner_ions: tuple[int, ...] = ()
    ancilla: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "data_ions", tuple(self.data_ions))
        object.__setattr__(self, "partner_ions", tuple(self.partner_ions))
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind: {self.kind!r}")
        ions = list(self.data_ions) + list(self.partner_ions)
        if self.ancilla is not None:
            ions.append(self.ancilla)
        if any(i < 1 for i in ions) or len(set(ions)) != len(ions):
            raise ValueError("ion assignments must be distinct positive integers")
        if self.kind == "fourier_pair":
            if len(self.data_ions) != 2 or self.partner_ions or self.ancilla is not None:
                raise ValueError("fourier_pair takes exactly 2 data ions")
        elif self.kind == "fourier_symmetrized":
            if len(self.data_ions) != 2 or len(self.partner_ions) != 2:
                raise ValueError("fourier_symmetrized takes 2 data + 2 partner ions")
            if self.ancilla is None:
                raise ValueError("fourier_symmetrized needs a complementing ancilla")
        elif self.kind == "number_state":
            if len(self.data_ions) < 1 or self.partner_ions:
                raise ValueError("number_state takes >= 1 data ions and no partners")
            if self.ancilla is None:
                raise ValueError("number_state needs a complementing ancilla")
        else:
            if len(self.data_ions) < 1 or len(self.partner_ions) != len(self.data_ions):
                raise ValueError("number_state_symmetrized needs matched ion sets")
            if self.ancilla is None:
                raise ValueError("number_state_symmetrized needs a complementing ancilla")

    @property
    def codeword_ions(self) -> tuple[int, ...]:
        """Ions carrying codeword excitation (the ones a jump can strike)."""
        return self.data_ions + self.partner_ions

    @property
    def min_register_size(self) -> int:
        ions = self.codeword_ions + ((self.ancilla,) if self.ancilla else ())
        return max(ions)

    @property
    def n_logical(self) -> int:
        if self.kind in ("fourier_pair", "fourier_symmetrized"):
            return 1
        return len(self.data_ions) - 1


@dataclass(frozen=True)
class CodewordReport:
    in_code_space: bool
    excitation_weights: frozenset[int]
    projection_deficit: float


def random_logical(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random logical amplitudes (complex Gaussian, normalized)."""
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


def tilde_qubit(c0: complex, c1: complex) -> np.ndarray:
    """L-basis amplitudes of c0 |0~> + c1 |1~>."""
    s = np.sqrt(2.0)
    return np.array([(c0 + c1) / s, (c0 - c1) / s], dtype=complex)


def _require_ground(register: StateVector, ions: Sequence[int], what: str) -> None:
    for ion in ions:
        if excited_population(register, ion) > GROUND_TOL:
            raise ValueError(f"{what} ion {ion} is not in the ground state")


def _check_norm(amps: np.ndarray) -> np.ndarray:
    amps = np.asarray(amps, dtype=complex).reshape(-1)
    if abs(np.vdot(amps, amps).real - 1.0) > 1e-9:
        raise ValueError("logical amplitudes must be normalized")
    return amps


def inject_logical(
    register: StateVector, ions: Sequence[int], amplitudes: np.ndarray
) -> StateVector:
    """Load logical amplitudes onto ground-state ions (a tensor embedding)."""
    amplitudes = _check_norm(amplitudes)
    if amplitudes.size != 2 ** len(ions):
        raise ValueError(
            f"{len(ions)} ions need {2**len(ions)} amplitudes, got {amplitudes.size}"
        )
    _require_ground(register, ions, "target")
    out = np.zeros_like(register.amplitudes)
    base = register.amplitudes
    for k, c in enumerate(amplitudes):
        if c == 0:
            continue
        offset = sum(2 ** (ion - 1) for bit, ion in enumerate(ions) if (k >> bit) & 1)
        # base has no support where any target-ion bit is set, so adding the
        # offset is a plain shift of the flat index
        out[offset:] += c * base[: base.size - offset]
    return StateVector(register.n_ions, out)


def extract_logical(
    register: StateVector, ions: Sequence[int]
) -> tuple[np.ndarray, float]:
    """Read logical amplitudes back off the given ions.

    Returns (amplitudes, deficit), where deficit is the probability weight
    on basis states with excitation outside the given ions.
    """
    idx = []
    for k in range(2 ** len(ions)):
        idx.append(sum(2 ** (ion - 1) for bit, ion in enumerate(ions) if (k >> bit) & 1))
    amps = register.amplitudes[np.array(idx, dtype=int)]
    inside = float(np.vdot(amps, amps).real)
    total = register.norm_squared()
    return np.array(amps), max(0.0, 1.0 - inside / total)


# ---------------------------------------------------------------------------
# Scheme 1: Fourier-transformed (tilde) basis
# ---------------------------------------------------------------------------

def fourier_pair_steps(ion_a: int, ion_b: int) -> list[CircuitStep]:
    """Pulses and CNOT turning (c0|0> - c1|1>)_a (x) |0>_b into the pair codeword."""
    return [
        PulseSpec(ion_a, HALF_PI, -HALF_PI),
        PulseSpec(ion_b, HALF_PI, -HALF_PI),
        Cnot(ion_b, ion_a),
    ]


def encode_fourier_pair(
    c0: complex, c1: complex, ion_a: int, ion_b: int, register: StateVector
) -> StateVector:
    """Build c0 |0~0~> + c1 |1~1~> on ions a, b of a ground register."""
    c0, c1 = complex(c0), complex(c1)
    _check_norm(np.array([c0, c1]))
    _require_ground(register, [ion_a, ion_b], "codeword")
    # prepare ion a in c0|0> - c1|1>; the pi/2 pulse then yields c0|0~> + c1|1~>
    u = np.array([[c0, np.conj(c1)], [-c1, np.conj(c0)]])
    state = apply_single_ion(register, ion_a, u)
    state, _ = run_circuit(state, fourier_pair_steps(ion_a, ion_b))
    return state


def decode_fourier_pair(register: StateVector, ion_a: int, ion_b: int) -> StateVector:
    """Disentangle ion b; ion a is left carrying the tilde-basis qubit."""
    basis = [
        encode_fourier_pair(1, 0, ion_a, ion_b, ground_register(register.n_ions)),
        encode_fourier_pair(0, 1, ion_a, ion_b, ground_register(register.n_ions)),
    ]
    deficit = projection_deficit_from_basis(register, basis)
    if deficit >= CODE_SPACE_TOL:
        raise DecodeError(f"register outside the pair code space (deficit {deficit:.3g})")
    out, _ = run_circuit(register, [Cnot(ion_b, ion_a)])
    return out


def fourier_symmetrize_steps(a: int, b: int, c: int, d: int) -> list[CircuitStep]:
    return [
        PulseSpec(c, PI, -HALF_PI),
        PulseSpec(d, PI, -HALF_PI),
        Cnot(a, c),
        Cnot(b, d),
    ]


def encode_fourier_symmetrized(
    c0: complex,
    c1: complex,
    ion_a: int,
    ion_b: int,
    ion_c: int,
    ion_d: int,
    register: StateVector,
) -> StateVector:
    """Pair codeword on a, b extended with the complementary pair on c, d.

    Every basis ket of the result pairs a bit string on (a, b) with its
    complement on (c, d), so all kets have excitation weight exactly 2.
    """
    _require_ground(register, [ion_c, ion_d], "partner")
    state = encode_fourier_pair(c0, c1, ion_a, ion_b, register)
    state, _ = run_circuit(state, fourier_symmetrize_steps(ion_a, ion_b, ion_c, ion_d))
    return state


def decode_fourier_symmetrized(
    register: StateVector, ion_a: int, ion_b: int, ion_c: int, ion_d: int
) -> StateVector:
    """Inverse of the symmetrized encoding; ion a ends carrying the qubit."""
    basis = [
        encode_fourier_symmetrized(1, 0, ion_a, ion_b, ion_c, ion_d, ground_register(register.n_ions)),
        encode_fourier_symmetrized(0, 1, ion_a, ion_b, ion_c, ion_d, ground_register(register.n_ions)),
    ]
    deficit = projection_deficit_from_basis(register, basis)
    if deficit >= CODE_SPACE_TOL:
        raise DecodeError(
            f"register outside the symmetrized code space (deficit {deficit:.3g})"
        )
    inverse = [
        Cnot(ion_b, ion_d),
        Cnot(ion_a, ion_c),
        PulseSpec(ion_d, -PI, -HALF_PI),
        PulseSpec(ion_c, -PI, -HALF_PI),
        Cnot(ion_b, ion_a),
    ]
    out, _ = run_circuit(register, inverse)
    return out


# ---------------------------------------------------------------------------
# Scheme 2: complementary electronic number states
# ---------------------------------------------------------------------------

def number_state_steps(data_ions: Sequence[int], ancilla_x: int) -> list[CircuitStep]:
    """Complement a register whose last data ion is fresh (bit 0 everywhere),
    then reset the ancilla back to the ground state for reuse."""
    fresh = data_ions[-1]
    steps = complement_steps(data_ions, ancilla_x, fresh, control_value=0)
    steps.append(PulseSpec(ancilla_x, PI, -HALF_PI))
    return steps


def encode_number_state(
    logical: np.ndarray | LogicalState,
    data_ions: Sequence[int],
    ancilla_x: int,
    register: StateVector,
) -> StateVector:
    """Build sum_k c_k/sqrt2 (|k> + |kbar>) over the data ions.

    The logical amplitudes occupy data_ions[:-1]; data_ions[-1] is the
    freshly added ion and must be in the ground state, as must the ancilla.
    """
    amps = logical.amplitudes if isinstance(logical, LogicalState) else np.asarray(logical)
    data_ions = list(data_ions)
    if len(data_ions) < 1:
        raise ValueError("need at least the fresh ion")
    state = inject_logical(register, data_ions[:-1], amps)
    _require_ground(state, [data_ions[-1]], "fresh")
    _require_ground(state, [ancilla_x], "ancilla")
    state, _ = run_circuit(state, number_state_steps(data_ions, ancilla_x))
    return state


def decode_number_state(
    register: StateVector, data_ions: Sequence[int], ancilla_x: int
) -> LogicalState:
    """Run the encoding in reverse and read the logical amplitudes back."""
    data_ions = list(data_ions)
    fresh = data_ions[-1]
    inverse: list[CircuitStep] = [PulseSpec(ancilla_x, -PI, -HALF_PI)]
    inverse += [
        PulseSpec(fresh, PI, -HALF_PI),
        Cnot(fresh, ancilla_x),
        PulseSpec(fresh, -PI, -HALF_PI),
    ]
    inverse += [Cnot(ancilla_x, j) for j in reversed(data_ions)]
    inverse.append(PulseSpec(ancilla_x, -HALF_PI, -HALF_PI))
    out, _ = run_circuit(register, inverse)
    amps, deficit = extract_logical(out, data_ions[:-1])
    if deficit >= CODE_SPACE_TOL:
        raise DecodeError(f"register outside the code space (deficit {deficit:.3g})")
    return LogicalState(amps / np.linalg.norm(amps))


def number_symmetrize_steps(
    data_ions: Sequence[int], partner_ions: Sequence[int]
) -> list[CircuitStep]:
    """Excite the partner set, then copy each data ion's complement onto it."""
    steps: list[CircuitStep] = [PulseSpec(p, PI, -HALF_PI) for p in partner_ions]
    steps.extend(Cnot(i, p) for i, p in zip(data_ions, partner_ions))
    return steps


def encode_number_symmetrized(
    logical: np.ndarray | LogicalState,
    data_ions: Sequence[int],
    partner_ions: Sequence[int],
    ancilla_x: int,
    register: StateVector,
) -> StateVector:
    """Number-state codeword on the data set entangled with its complement
    on the partner set:  sum_k c_k/sqrt2 (|k>_1 |kbar>_2 + |kbar>_1 |k>_2).

    Every surviving basis ket has excitation weight equal to the set size,
    which makes the codeword an eigenstate of the no-jump drift.
    """
    if len(partner_ions) != len(data_ions):
        raise ValueError("partner set must match the data set in size")
    _require_ground(register, partner_ions, "partner")
    state = encode_number_state(logical, data_ions, ancilla_x, register)
    state, _ = run_circuit(state, number_symmetrize_steps(data_ions, partner_ions))
    return state


def decode_number_symmetrized(
    register: StateVector,
    data_ions: Sequence[int],
    partner_ions: Sequence[int],
    ancilla_x: int,
) -> LogicalState:
    inverse: list[CircuitStep] = [
        Cnot(i, p) for i, p in reversed(list(zip(data_ions, partner_ions)))
    ]
    inverse += [PulseSpec(p, -PI, -HALF_PI) for p in reversed(list(partner_ions))]
    out, _ = run_circuit(register, inverse)
    return decode_number_state(out, data_ions, ancilla_x)


# ---------------------------------------------------------------------------
# Generic dispatch, code-space projection, reports
# ---------------------------------------------------------------------------

def encode(
    scheme: CodeScheme,
    logical: np.ndarray | LogicalState | Sequence[complex],
    register: StateVector | None = None,
) -> StateVector:
    """Encode logical amplitudes into a register under the given scheme."""
    amps = logical.amplitudes if isinstance(logical, LogicalState) else np.asarray(logical, dtype=complex)
    if register is None:
        register = ground_register(scheme.min_register_size)
    if scheme.kind == "fourier_pair":
        return encode_fourier_pair(amps[0], amps[1], *scheme.data_ions, register)
    if scheme.kind == "fourier_symmetrized":
        return encode_fourier_symmetrized(
            amps[0], amps[1], *scheme.data_ions, *scheme.partner_ions, register
        )
    if scheme.kind == "number_state":
        return encode_number_state(amps, scheme.data_ions, scheme.ancilla, register)
    return encode_number_symmetrized(
        amps, scheme.data_ions, scheme.partner_ions, scheme.ancilla, register
    )


def decode(scheme: CodeScheme, register: StateVector) -> LogicalState:
    """Decode a register back to logical amplitudes (tilde basis for the
    Fourier schemes, number-state basis otherwise)."""
    if scheme.kind == "number_state":
        return decode_number_state(register, scheme.data_ions, scheme.ancilla)
    if scheme.kind == "number_state_symmetrized":
        return decode_number_symmetrized(
            register, scheme.data_ions, scheme.partner_ions, scheme.ancilla
        )
    a, b = scheme.data_ions
    if scheme.kind == "fourier_pair":
        out = decode_fourier_pair(register, a, b)
    else:
        out = decode_fourier_symmetrized(register, a, b, *scheme.partner_ions)
    # ion a carries the qubit in the tilde basis, ion b sits in |0~>; rotate
    # both back to the computational basis and read the amplitudes off
    out, _ = run_circuit(
        out, [PulseSpec(a, -HALF_PI, -HALF_PI), PulseSpec(b, -HALF_PI, -HALF_PI)]
    )
    amps, deficit = extract_logical(out, [a])
    if deficit >= CODE_SPACE_TOL:
        raise DecodeError(f"decoded register is not a product state (deficit {deficit:.3g})")
    v = np.array([amps[0], -amps[1]])  # inverse pulse maps |1~> to -|1>
    return LogicalState(v / np.linalg.norm(v))


@lru_cache(maxsize=None)
def code_space_basis(scheme: CodeScheme, n_ions: int) -> tuple[StateVector, ...]:
    """Orthonormal codewords spanning the scheme's code space (ancilla and
    any unassigned ions in the ground state)."""
    dim = 2**scheme.n_logical
    basis = []
    for k in range(dim):
        amps = np.zeros(dim, dtype=complex)
        amps[k] = 1.0
        basis.append(encode(scheme, amps, ground_register(n_ions)))
    return tuple(basis)


def projection_deficit_from_basis(
    state: StateVector, basis: Sequence[StateVector]
) -> float:
    total = state.norm_squared()
    inside = sum(abs(np.vdot(b.amplitudes, state.amplitudes)) ** 2 for b in basis)
    return max(0.0, 1.0 - inside / total)


def projection_deficit(state: StateVector, scheme: CodeScheme) -> float:
    return projection_deficit_from_basis(state, code_space_basis(scheme, state.n_ions))


def codeword_report(register: StateVector, scheme: CodeScheme) -> CodewordReport:
    """Code-space membership plus the excitation weights present."""
    if scheme.min_register_size > register.n_ions:
        raise ValueError("scheme refers to ions beyond the register")
    deficit = projection_deficit(register, scheme)
    probs = np.abs(register.amplitudes) ** 2
    probs = probs / probs.sum()
    w = hamming_weights(register.n_ions)
    weights = frozenset(
        int(wk) for wk in np.unique(w[probs > 1e-12])
    )
    return CodewordReport(
        in_code_space=deficit < CODE_SPACE_TOL,
        excitation_weights=weights,
        projection_deficit=deficit,
    )


def complement_pair_symmetric(state: StateVector, tol: float = 1e-12) -> bool:
    """True when amplitude(k) equals amplitude(kbar) for every k."""
    return bool(np.max(np.abs(state.amplitudes - state.amplitudes[::-1])) <= tol)


# ---------------------------------------------------------------------------
# Scheme descriptor serialization
# ---------------------------------------------------------------------------

def scheme_to_json(scheme: CodeScheme) -> str:
    payload = {
        "kind": scheme.kind,
        "data_ions": list(scheme.data_ions),
        "partner_ions": list(scheme.partner_ions),
        "ancilla": scheme.ancilla,
    }
    return json.dumps(payload, sort_keys=True)


def scheme_from_json(obj: str | dict) -> CodeScheme:
    payload = json.loads(obj) if isinstance(obj, str) else obj
    return CodeScheme(
        kind=payload["kind"],
        data_ions=tuple(payload["data_ions"]),
        partner_ions=tuple(payload.get("partner_ions") or ()),
        ancilla=payload.get("ancilla"),
    )
