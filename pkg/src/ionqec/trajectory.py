"""Monte-Carlo quantum-jump engine and a brute-force master-equation oracle.

Between detected emission events an n-ion register drifts under the
non-unitary conditional propagator

    U_c(t) = exp(-t/2 * sum_j gamma_j |1>_j<1|),

which is diagonal in the computational basis: the amplitude of basis state
k picks up exp(-t/2 * W(k)) with W(k) the decay-rate-weighted excitation
of k.  Survival probabilities are therefore analytic, so jump times are
sampled by solving ||U_c(t)|psi>||^2 = r for uniform r by bisection, with
no time-stepping error.  The emitting ion is then drawn with probability
proportional to its excited population in the evolved state.

Trajectories are deterministic given a seed; each trajectory in an
ensemble derives its own random stream from (seed, trajectory index), so
ensembles can be evaluated in any order or in parallel.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .states import (
    DensityMatrix,
    StateVector,
    apply_nonunitary_single_ion,
    bit_values,
)
from .feedback import FeedbackPlan, apply_feedback

JUMP_OPERATOR = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|

BISECTION_REL_TOL = 1e-10


@dataclass(frozen=True)
class DecayModel:
    """Spontaneous-emission rates (1/time).  gamma applies to every ion
    unless per_ion_gamma overrides it."""

    gamma: float = 1.0
    per_ion_gamma: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.per_ion_gamma is not None:
            object.__setattr__(self, "per_ion_gamma", tuple(self.per_ion_gamma))
            if any(g <= 0 for g in self.per_ion_gamma):
                raise ValueError("all decay rates must be positive")
        elif self.gamma <= 0:
            raise ValueError("decay rate must be positive")

    def rates(self, n_ions: int) -> np.ndarray:
        if self.per_ion_gamma is None:
            return np.full(n_ions, self.gamma)
        if len(self.per_ion_gamma) != n_ions:
            raise ValueError(
                f"per_ion_gamma has {len(self.per_ion_gamma)} entries for "
                f"{n_ions} ions"
            )
        return np.array(self.per_ion_gamma)


@dataclass(frozen=True)
class DetectionModel:
    """Probability that an emission is seen, and the delay before the
    correction circuit runs."""

    efficiency: float = 1.0
    feedback_latency: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in [0, 1]")
        if self.feedback_latency < 0:
            raise ValueError("feedback latency must be non-negative")


@dataclass(frozen=True)
class JumpRecord:
    ion: int
    time: float


@dataclass
class TrajectoryResult:
    jumps: list[JumpRecord]
    missed_jumps: list[JumpRecord]
    correction_failures: list[JumpRecord]
    times: np.ndarray
    fidelities: np.ndarray
    final_state: StateVector

    @property
    def fidelity_timeline(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.fidelities.tolist()))


@lru_cache(maxsize=None)
def _weight_vector(n_ions: int, rates: tuple[float, ...]) -> np.ndarray:
    """W(k) = sum_j gamma_j S_j(k) for every basis index."""
    w = np.zeros(2**n_ions)
    for ion, g in enumerate(rates, start=1):
        w += g * bit_values(n_ions, ion)
    w.setflags(write=False)
    return w


def decay_weights(state: StateVector, model: DecayModel) -> np.ndarray:
    return _weight_vector(state.n_ions, tuple(model.rates(state.n_ions)))


def conditional_evolve(
    state: StateVector, dt: float, model: DecayModel
) -> tuple[StateVector, float]:
    """No-jump drift for a time dt.

    Returns the un-normalized evolved state and its squared norm, which is
    the no-jump survival probability when the input was normalized.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    w = decay_weights(state, model)
    amps = state.amplitudes * np.exp(-0.5 * dt * w)
    out = StateVector(state.n_ions, amps)
    return out, out.norm_squared()


def _survival_profile(state: StateVector, model: DecayModel):
    """Collapse the state to (unique weight values, their populations)."""
    w = decay_weights(state, model)
    p = np.abs(state.amplitudes) ** 2
    p = p / p.sum()
    uniq, inverse = np.unique(w, return_inverse=True)
    pw = np.bincount(inverse, weights=p)
    return uniq, pw


def sample_jump(
    state: StateVector,
    model: DecayModel,
    rng: np.random.Generator,
    t_max: float,
) -> tuple[float, int] | None:
    """Draw the next jump within t_max, or None if the state survives.

    The wait time solves survival(t) = r for one uniform r, by bisection
    to relative tolerance 1e-10 on the closed-form survival curve; the
    emitting ion is then drawn with probability proportional to its
    excited population in the conditionally evolved state.
    """
    uniq, pw = _survival_profile(state, model)

    def survival(t: float) -> float:
        return float(pw @ np.exp(-t * uniq))

    r = rng.random()
    if survival(t_max) >= r:
        return None
    lo, hi = 0.0, t_max
    while hi - lo > BISECTION_REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if survival(mid) > r:
            lo = mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)

    rates = model.rates(state.n_ions)
    damped = np.abs(state.amplitudes) ** 2 * np.exp(
        -t_star * decay_weights(state, model)
    )
    channel = np.array(
        [rates[j - 1] * float(damped @ bit_values(state.n_ions, j))
         for j in range(1, state.n_ions + 1)]
    )
    cdf = np.cumsum(channel)
    ion = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")) + 1
    return t_star, min(ion, state.n_ions)


def apply_jump(state: StateVector, ion: int) -> StateVector:
    """Project the ion onto |0><1| and renormalize (a detected emission)."""
    out, _ = apply_nonunitary_single_ion(state, ion, JUMP_OPERATOR)
    return out.normalize()


def trajectory_stream(seed: int, index: int) -> np.random.Generator:
    """Independent random stream for one trajectory of an ensemble."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _window_fidelities(
    ref: np.ndarray, amps: np.ndarray, w: np.ndarray, taus: np.ndarray
) -> np.ndarray:
    """Fidelity of the renormalized drifted state with ref at each lag."""
    if taus.size == 0:
        return np.empty(0)
    damp = np.exp(-0.5 * np.outer(taus, w))
    overlaps = np.abs(damp @ (np.conj(ref) * amps)) ** 2
    norms = (damp**2) @ np.abs(amps) ** 2
    return overlaps / norms


def run_trajectory(
    initial: StateVector,
    decay: DecayModel,
    detection: DetectionModel,
    t_max: float,
    feedback_policy: dict[int, FeedbackPlan] | None,
    rng: np.random.Generator,
    grid: int = 200,
) -> TrajectoryResult:
    """One stochastic trajectory with optional coherent feedback.

    Jumps alternate with conditional drift until t_max.  A detected jump
    schedules its correction after the detection latency; the state keeps
    drifting (and may jump again) while a correction is pending.  A
    correction that fails to restore the code space is recorded and the
    trajectory continues uncorrected.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    state = initial.normalize()
    ref = state.amplitudes
    w = decay_weights(state, decay)
    times = np.linspace(0.0, t_max, grid)
    fidelities = np.empty(grid)
    fidelities[0] = 1.0
    gi = 1

    jumps: list[JumpRecord] = []
    missed: list[JumpRecord] = []
    failures: list[JumpRecord] = []
    pending: list[tuple[float, int]] = []
    t = 0.0
    eps = 1e-12 * t_max

    def advance(state: StateVector, t0: float, dt: float) -> StateVector:
        nonlocal gi
        t1 = t0 + dt
        hi = gi
        while hi < grid and times[hi] <= t1 + eps:
            hi += 1
        if hi > gi:
            taus = times[gi:hi] - t0
            fidelities[gi:hi] = _window_fidelities(ref, state.amplitudes, w, taus)
            gi = hi
        if dt > 0:
            state, _ = conditional_evolve(state, dt, decay)
            state = state.normalize()
        return state

    while True:
        due = pending[0][0] if pending else math.inf
        horizon = min(due, t_max)
        window = horizon - t
        sampled = sample_jump(state, decay, rng, window) if window > 0 else None
        if sampled is None:
            state = advance(state, t, window)
            t = horizon
            if pending and pending[0][0] <= t + eps:
                _, ion = heapq.heappop(pending)
                state, ok = apply_feedback(state, feedback_policy[ion])
                if not ok:
                    failures.append(JumpRecord(ion, t))
                continue
            break
        wait, ion = sampled
        state = advance(state, t, wait)
        t = t + wait
        state = apply_jump(state, ion)
        jumps.append(JumpRecord(ion, t))
        if feedback_policy is not None:
            if rng.random() < detection.efficiency:
                heapq.heappush(pending, (t + detection.feedback_latency, ion))
            else:
                missed.append(JumpRecord(ion, t))

    return TrajectoryResult(jumps, missed, failures, times, fidelities, state)


def run_ensemble(
    initial: StateVector,
    decay: DecayModel,
    detection: DetectionModel,
    t_max: float,
    feedback_policy: dict[int, FeedbackPlan] | None,
    n_trajectories: int,
    seed: int,
    grid: int = 200,
) -> dict:
    """Average many trajectories onto a common fidelity grid.

    Returns times, mean fidelity, its standard error, the per-trajectory
    jump rate in each grid bin, and event totals.
    """
    times = np.linspace(0.0, t_max, grid)
    acc = np.zeros(grid)
    acc2 = np.zeros(grid)
    jump_times: list[float] = []
    total_jumps = total_missed = total_failures = 0
    for i in range(n_trajectories):
        rng = trajectory_stream(seed, i)
        result = run_trajectory(
            initial, decay, detection, t_max, feedback_policy, rng, grid
        )
        acc += result.fidelities
        acc2 += result.fidelities**2
        jump_times.extend(rec.time for rec in result.jumps)
        total_jumps += len(result.jumps)
        total_missed += len(result.missed_jumps)
        total_failures += len(result.correction_failures)
    mean = acc / n_trajectories
    var = np.maximum(acc2 / n_trajectories - mean**2, 0.0)
    stderr = np.sqrt(var / n_trajectories)
    rate = np.zeros(grid)
    if grid > 1 and jump_times:
        counts, _ = np.histogram(jump_times, bins=times)
        dt = times[1] - times[0]
        rate[1:] = counts / (n_trajectories * dt)
    return {
        "times": times,
        "mean_fidelity": mean,
        "stderr_fidelity": stderr,
        "jump_rate": rate,
        "trajectories": n_trajectories,
        "total_jumps": total_jumps,
        "missed_jumps": total_missed,
        "correction_failures": total_failures,
    }


def ensemble_density(
    initial: StateVector,
    decay: DecayModel,
    snapshot_times: list[float],
    n_trajectories: int,
    seed: int,
) -> tuple[list[np.ndarray], list[np.ndarray], list[np.ndarray]]:
    """Trajectory-averaged density matrices without feedback.

    Returns, per snapshot time, the mean of |psi><psi| over trajectories
    plus the standard errors of the real and imaginary parts entrywise.
    """
    snapshot_times = sorted(snapshot_times)
    dim = initial.dim
    n_snap = len(snapshot_times)
    mean = [np.zeros((dim, dim), dtype=complex) for _ in range(n_snap)]
    sq_re = [np.zeros((dim, dim)) for _ in range(n_snap)]
    sq_im = [np.zeros((dim, dim)) for _ in range(n_snap)]
    for i in range(n_trajectories):
        rng = trajectory_stream(seed, i)
        state = initial.normalize()
        t = 0.0
        for s, t_snap in enumerate(snapshot_times):
            while True:
                sampled = sample_jump(state, decay, rng, t_snap - t)
                if sampled is None:
                    state, _ = conditional_evolve(state, t_snap - t, decay)
                    state = state.normalize()
                    t = t_snap
                    break
                wait, ion = sampled
                state, _ = conditional_evolve(state, wait, decay)
                state = apply_jump(state.normalize(), ion)
                t += wait
            rho = np.outer(state.amplitudes, state.amplitudes.conj())
            mean[s] += rho
            sq_re[s] += rho.real**2
            sq_im[s] += rho.imag**2
    se_re, se_im = [], []
    for s in range(n_snap):
        mean[s] /= n_trajectories
        var_re = np.maximum(sq_re[s] / n_trajectories - mean[s].real ** 2, 0.0)
        var_im = np.maximum(sq_im[s] / n_trajectories - mean[s].imag ** 2, 0.0)
        se_re.append(np.sqrt(var_re / n_trajectories))
        se_im.append(np.sqrt(var_im / n_trajectories))
    return mean, se_re, se_im


# ---------------------------------------------------------------------------
# Master-equation oracle (dense, small registers only)
# ---------------------------------------------------------------------------

ORACLE_MAX_IONS = 6
ORACLE_REL_TOL = 1e-9


def _lindblad_rhs(n_ions: int, rates: np.ndarray):
    dim = 2**n_ions
    lowers = []
    for ion in range(1, n_ions + 1):
        op = np.array([[1.0]])
        for j in range(n_ions, 0, -1):
            op = np.kron(op, JUMP_OPERATOR if j == ion else np.eye(2))
        lowers.append(np.sqrt(rates[ion - 1]) * op)
    anti = sum(op.conj().T @ op for op in lowers)

    def rhs(rho: np.ndarray) -> np.ndarray:
        out = np.zeros((dim, dim), dtype=complex)
        for op in lowers:
            out += op @ rho @ op.conj().T
        out -= 0.5 * (anti @ rho + rho @ anti)
        return out

    return rhs


def master_equation_evolve(
    rho0: DensityMatrix, decay: DecayModel, t: float
) -> DensityMatrix:
    """Exact dissipative evolution of a density matrix for a time t.

    Integrates the Lindblad generator with jump operators sqrt(gamma_j)
    |0>_j<1| by adaptive fourth-order stepping with step doubling, to a
    relative tolerance of 1e-9.  Registers above 6 ions are rejected; the
    oracle exists for cross-validation, not production use.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if rho0.n_ions > ORACLE_MAX_IONS:
        raise ValueError(
            f"oracle limited to {ORACLE_MAX_IONS} ions, got {rho0.n_ions}"
        )
    if t == 0:
        return rho0
    rhs = _lindblad_rhs(rho0.n_ions, decay.rates(rho0.n_ions))

    def rk4(y: np.ndarray, h: float) -> np.ndarray:
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    y = np.array(rho0.entries, dtype=complex)
    elapsed = 0.0
    h = t / 8.0
    scale = max(1.0, float(np.max(np.abs(y))))
    while elapsed < t:
        h = min(h, t - elapsed)
        full = rk4(y, h)
        half = rk4(rk4(y, 0.5 * h), 0.5 * h)
        err = float(np.max(np.abs(full - half))) / scale
        tol = ORACLE_REL_TOL * max(h / t, 1e-6)
        if err <= tol:
            # Richardson extrapolation: the halved solution plus the
            # leading-order correction is fifth-order accurate
            y = half + (half - full) / 15.0
            elapsed += h
        growth = 0.9 * (tol / err) ** 0.2 if err > 0 else 5.0
        h *= min(5.0, max(0.2, growth))
    y = 0.5 * (y + y.conj().T)
    return DensityMatrix(rho0.n_ions, y)
