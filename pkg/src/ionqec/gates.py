"""Elementary register operations: standing-wave pulses, CNOTs, complementing.

A standing-wave pulse of area k and laser phase phi acts on one ion as

    V(k, phi) = exp(-i k/2 (|1><0| e^{-i phi} + |0><1| e^{i phi}))

which has the closed form

    [[cos(k/2),                -i sin(k/2) e^{i phi}],
     [-i sin(k/2) e^{-i phi},   cos(k/2)            ]].

Useful special cases (exact, including phases):

    V(pi/2, -pi/2): |0> -> (|0>+|1>)/sqrt2,  |1> -> -(|0>-|1>)/sqrt2
    V(pi,   -pi/2): |0> -> |1>,              |1> -> -|0>
    V(pi/2, +pi/2): |0> -> (|0>-|1>)/sqrt2

The complementing transformation maps each surviving basis state |k> of a
set of data ions to (|k> + |kbar>)/sqrt2 using one ancilla ion: a pi/2
preparation pulse on the ancilla, one CNOT from the ancilla onto every data
ion, and a final CNOT from a designated data ion back onto the ancilla to
disentangle it.  The disentangling step requires every surviving basis
state to hold the same bit value at the designated control ion.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .states import (
    StateVector,
    apply_single_ion,
    bit_values,
    excited_population,
    _check_ion,
)


@dataclass(frozen=True)
class PulseSpec:
    """A standing-wave pulse: area (radians), laser phase (radians), target ion."""

    ion: int
    area_k: float
    phase_phi: float


@dataclass(frozen=True)
class Cnot:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("cnot control and target must differ")


CircuitStep = Union[PulseSpec, Cnot]


@dataclass(frozen=True)
class GateCount:
    rotations: int = 0
    cnots: int = 0

    def __add__(self, other: "GateCount") -> "GateCount":
        return GateCount(self.rotations + other.rotations, self.cnots + other.cnots)


def pulse_matrix(area_k: float, phase_phi: float) -> np.ndarray:
    """2x2 unitary of a standing-wave pulse with area k and phase phi."""
    c = math.cos(area_k / 2.0)
    s = math.sin(area_k / 2.0)
    return np.array(
        [
            [c, -1j * s * np.exp(1j * phase_phi)],
            [-1j * s * np.exp(-1j * phase_phi), c],
        ],
        dtype=complex,
    )


def apply_pulse(state: StateVector, pulse: PulseSpec) -> StateVector:
    return apply_single_ion(state, pulse.ion, pulse_matrix(pulse.area_k, pulse.phase_phi))


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """Controlled-NOT in the computational basis: target bit XOR control bit."""
    if control == target:
        raise ValueError("cnot control and target must differ")
    n = state.n_ions
    _check_ion(control, n)
    _check_ion(target, n)
    a = state.amplitudes.reshape([2] * n).copy()

    def block(c_val, t_val):
        sel = [slice(None)] * n
        sel[n - control] = c_val
        sel[n - target] = t_val
        return tuple(sel)

    a[block(1, 0)], a[block(1, 1)] = a[block(1, 1)].copy(), a[block(1, 0)].copy()
    return StateVector(n, a.reshape(-1))


def run_circuit(
    state: StateVector, steps: Sequence[CircuitStep]
) -> tuple[StateVector, GateCount]:
    """Apply steps in order; pulses with non-zero area count as rotations."""
    rotations = cnots = 0
    for step in steps:
        if isinstance(step, PulseSpec):
            state = apply_pulse(state, step)
            if step.area_k != 0.0:
                rotations += 1
        elif isinstance(step, Cnot):
            state = apply_cnot(state, step.control, step.target)
            cnots += 1
        else:
            raise TypeError(f"not a circuit step: {step!r}")
    return state, GateCount(rotations, cnots)


# ---------------------------------------------------------------------------
# Complementing transformation
# ---------------------------------------------------------------------------

HALF_PI = math.pi / 2.0
PI = math.pi

ANCILLA_GROUND_TOL = 1e-9


def complement_steps(
    data_ions: Sequence[int],
    ancilla_x: int,
    disentangle_control: int,
    control_value: int = 1,
) -> list[CircuitStep]:
    """Circuit realizing |k> -> (|k> + |kbar>)/sqrt2 over the data ions.

    control_value is the bit every surviving basis state must hold at the
    disentangling ion: 1 after a decay-plus-pi-pulse (the correction case),
    0 for a freshly added ground-state ion (the encoding case).  The
    control-on-zero variant conjugates the disentangling CNOT with a pulse
    pair of areas +pi and -pi on the control ion, which flips the control
    sense without any residual phase.
    """
    if disentangle_control not in data_ions:
        raise ValueError("disentangle_control must be one of the data ions")
    if control_value not in (0, 1):
        raise ValueError("control_value must be 0 or 1")
    steps: list[CircuitStep] = [PulseSpec(ancilla_x, HALF_PI, -HALF_PI)]
    steps.extend(Cnot(ancilla_x, j) for j in data_ions)
    if control_value == 1:
        steps.append(Cnot(disentangle_control, ancilla_x))
    else:
        steps.append(PulseSpec(disentangle_control, PI, -HALF_PI))
        steps.append(Cnot(disentangle_control, ancilla_x))
        steps.append(PulseSpec(disentangle_control, -PI, -HALF_PI))
    return steps


def complement_register(
    state: StateVector,
    data_ions: Sequence[int],
    ancilla_x: int,
    disentangle_control: int,
    control_value: int = 1,
) -> StateVector:
    """Complement the data ions' basis states through the ancilla circuit.

    The ancilla must start in |0>.  When the disentangling precondition
    holds, the ancilla ends in |1>, disentangled; violations are left for
    the caller to detect through the ancilla population (reported as a
    correction failure by the feedback layer, not raised here).
    """
    if excited_population(state, ancilla_x) > ANCILLA_GROUND_TOL:
        raise ValueError(f"ancilla ion {ancilla_x} is not in the ground state")
    out, _ = run_circuit(
        state, complement_steps(data_ions, ancilla_x, disentangle_control, control_value)
    )
    return out


def ancilla_disentangled_excited(state: StateVector, ancilla_x: int) -> bool:
    """True when the ancilla ion is in |1> (population > 1 - 1e-9)."""
    return excited_population(state, ancilla_x) > 1.0 - ANCILLA_GROUND_TOL


def surviving_bits_equal(state: StateVector, ion: int, value: int, tol: float = 1e-18) -> bool:
    """True when every basis state with non-negligible probability has the
    given bit value at the ion."""
    bits = bit_values(state.n_ions, ion)
    p = np.abs(state.amplitudes) ** 2
    off = p[bits != value].sum()
    return bool(off <= tol * max(p.sum(), 1.0))


# ---------------------------------------------------------------------------
# Circuit serialization
# ---------------------------------------------------------------------------

def steps_to_json(steps: Sequence[CircuitStep]) -> str:
    items = []
    for step in steps:
        if isinstance(step, PulseSpec):
            items.append(
                {"pulse": {"ion": step.ion, "k": step.area_k, "phi": step.phase_phi}}
            )
        elif isinstance(step, Cnot):
            items.append({"cnot": {"control": step.control, "target": step.target}})
        else:
            raise TypeError(f"not a circuit step: {step!r}")
    return json.dumps(items, sort_keys=True)


def steps_from_json(text: str) -> list[CircuitStep]:
    steps: list[CircuitStep] = []
    for item in json.loads(text):
        if "pulse" in item:
            p = item["pulse"]
            steps.append(PulseSpec(int(p["ion"]), float(p["k"]), float(p["phi"])))
        elif "cnot" in item:
            c = item["cnot"]
            steps.append(Cnot(int(c["control"]), int(c["target"])))
        else:
            raise ValueError(f"unrecognized circuit step: {item!r}")
    return steps
