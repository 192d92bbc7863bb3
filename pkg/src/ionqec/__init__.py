"""Spontaneous-emission error correction on trapped-ion registers.

State-vector simulation of two codeword families that survive continuous
photodetection monitoring: emission events are inverted by selective
coherent feedback, and symmetrized codewords are additionally invariant
under the no-jump drift between detections.
"""
from .states import (
    AnnihilationError,
    DensityMatrix,
    StateVector,
    apply_nonunitary_single_ion,
    apply_single_ion,
    basis_state,
    complement_index,
    excited_population,
    fidelity,
    ground_register,
    mix,
    pure_to_density,
    state_from_json,
    state_to_json,
)
from .gates import (
    Cnot,
    GateCount,
    PulseSpec,
    apply_cnot,
    apply_pulse,
    complement_register,
    complement_steps,
    pulse_matrix,
    run_circuit,
    steps_from_json,
    steps_to_json,
)
from .codes import (
    CodeScheme,
    CodewordReport,
    DecodeError,
    LogicalState,
    codeword_report,
    decode,
    decode_fourier_pair,
    decode_fourier_symmetrized,
    decode_number_state,
    decode_number_symmetrized,
    encode,
    encode_fourier_pair,
    encode_fourier_symmetrized,
    encode_number_state,
    encode_number_symmetrized,
    projection_deficit,
    random_logical,
    scheme_from_json,
    scheme_to_json,
)
from .feedback import (
    FeedbackPlan,
    apply_feedback,
    gate_count,
    plan_for,
    plan_fourier_pair,
    plan_fourier_symmetrized,
    plan_number_state,
    plans_for_scheme,
    quoted_gate_count,
)
from .trajectory import (
    DecayModel,
    DetectionModel,
    JumpRecord,
    TrajectoryResult,
    apply_jump,
    conditional_evolve,
    ensemble_density,
    master_equation_evolve,
    run_ensemble,
    run_trajectory,
    sample_jump,
    trajectory_stream,
)
from .harness import (
    ExperimentConfig,
    TimingModel,
    config_from_json,
    decoherence_time,
    feedback_wall_time,
    storage_experiment,
    time_to_threshold,
)
from .verify import run_suite

__version__ = "0.1.0"
