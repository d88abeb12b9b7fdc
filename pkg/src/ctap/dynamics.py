"""Time-dependent transfer protocol: schedules, H(t) = F(t) A F(t), propagation.

Units: hbar = 1, weights set the energy scale, times are in inverse weight units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DarkStateUndefined,
    DegenerateKernel,
    IntegrationUnstable,
    InvalidSchedule,
    PartyPlacement,
    PartyUnsupported,
    SameEndpoints,
    TStarNotFound,
)
from .graph import WeightedGraph, adjacency
from .viability import SUPPORT_TOL, ZERO_TOL, graph_kernel, zero_eigenvector, zero_threshold

SHAPES = ("constant", "ramp_up", "ramp_down", "half_ramp_up", "half_ramp_down", "tabulated")
VALIDATION_SAMPLES = 1000
UNITARITY_LIMIT = 1e-6


@dataclass(frozen=True)
class Control:
    """One V1 control ``f_v(t)`` on ``[0, T]``.

    ``ramp_up`` is ``value * t/T``, ``ramp_down`` is ``value * (1 - t/T)``,
    ``half_ramp_up`` is ``value * min(2t/T, 1)``, ``half_ramp_down`` is
    ``value * max(0, min(1 - 2t/T, 1))``; ``tabulated`` interpolates
    ``samples = (fractions of T, values)`` linearly.
    """

    shape: str = "constant"
    value: float = 1.0
    samples: tuple | None = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InvalidSchedule(f"unknown control shape {self.shape!r}")
        if self.shape == "tabulated":
            if self.samples is None or len(self.samples) != 2:
                raise InvalidSchedule("tabulated control needs samples=(fractions, values)")
            x, y = (tuple(float(v) for v in arr) for arr in self.samples)
            if len(x) != len(y) or len(x) < 2 or x[0] != 0.0 or x[-1] != 1.0 or \
                    any(b <= a for a, b in zip(x, x[1:])):
                raise InvalidSchedule("tabulated samples must be increasing fractions from 0 to 1")
            object.__setattr__(self, "samples", (x, y))

    def __call__(self, t, T: float, straddle: float = 1.0):
        u = np.asarray(t, dtype=float) / T
        if self.shape == "constant":
            out = np.full_like(u, self.value * straddle)
        elif self.shape == "ramp_up":
            out = self.value * u
        elif self.shape == "ramp_down":
            out = self.value * (1.0 - u)
        elif self.shape == "half_ramp_up":
            out = self.value * np.minimum(2.0 * u, 1.0)
        elif self.shape == "half_ramp_down":
            out = self.value * np.clip(1.0 - 2.0 * u, 0.0, 1.0)
        else:
            out = np.interp(u, *self.samples)
        return out if out.ndim else float(out)

    def zero_set(self, T: float, straddle: float = 1.0) -> list[tuple[float, float]] | None:
        """Closed intervals where the control vanishes; ``None`` if only sampling can tell."""
        if self.shape == "tabulated":
            return None
        if self.value == 0 or (self.shape == "constant" and straddle == 0):
            return [(0.0, T)]
        return {
            "constant": [],
            "ramp_up": [(0.0, 0.0)],
            "ramp_down": [(T, T)],
            "half_ramp_up": [(0.0, 0.0)],
            "half_ramp_down": [(T / 2, T)],
        }[self.shape]


@dataclass(frozen=True)
class ControlSchedule:
    """Controls for every V1 vertex, plus the sender/receiver pair."""

    total_time: float
    controls: tuple[Control, ...]
    sender: int
    receiver: int
    parties: tuple[int, ...]
    straddle: float = 1.0

    @property
    def n1(self) -> int:
        return len(self.controls)

    def values(self, t: float) -> np.ndarray:
        """Control values of all V1 vertices at time ``t``."""
        return np.array([c(t, self.total_time, self.straddle) for c in self.controls])

    def sample(self, times: np.ndarray) -> np.ndarray:
        """Array of shape ``(len(times), n1)``."""
        return np.stack([c(times, self.total_time, self.straddle) for c in self.controls], axis=1)


def _endpoints(graph: WeightedGraph, a: int, b: int, T: float) -> None:
    if a == b:
        raise SameEndpoints(f"sender and receiver are both vertex {a}")
    for p in (a, b):
        if p not in graph.parties:
            raise PartyPlacement(f"vertex {p} is not a party")
    if not T > 0:
        raise InvalidSchedule(f"total time must be positive, got {T}")


def default_schedule(graph: WeightedGraph, a: int, b: int, T: float, s: float = 1.0) -> ControlSchedule:
    """``f_a = t/T``, ``f_b = 1 - t/T``, every other V1 control held at ``s``."""
    _endpoints(graph, a, b, T)
    controls = [Control("constant", 1.0)] * graph.n1
    controls[a] = Control("ramp_up")
    controls[b] = Control("ramp_down")
    schedule = ControlSchedule(float(T), tuple(controls), a, b, graph.parties, float(s))
    validate_schedule(schedule)
    return schedule


def sequential_schedule(graph: WeightedGraph, a: int, b: int, T: float, s: float = 1.0) -> ControlSchedule:
    """``f_a = min(2t/T, 1)``, ``f_b = min(1 - 2t/T, 1)`` clipped at 0, others ``s``."""
    _endpoints(graph, a, b, T)
    controls = [Control("constant", 1.0)] * graph.n1
    controls[a] = Control("half_ramp_up")
    controls[b] = Control("half_ramp_down")
    schedule = ControlSchedule(float(T), tuple(controls), a, b, graph.parties, float(s))
    validate_schedule(schedule)
    return schedule


def validate_schedule(schedule: ControlSchedule) -> None:
    """Enforce the control rules; raises :class:`InvalidSchedule`.

    The sender starts at zero, the receiver ends at zero, non-party controls
    never vanish, and no two controls vanish at the same time.  Built-in
    shapes are checked through their exact zero sets, tabulated ones (and all
    shapes, as a backstop) on a uniform grid of sample times.
    """
    T, s = schedule.total_time, schedule.straddle
    ctrl = schedule.controls
    a, b = schedule.sender, schedule.receiver
    if ctrl[a](0.0, T, s) != 0:
        raise InvalidSchedule(f"sender control f_{a}(0) must be 0")
    if ctrl[b](T, T, s) != 0:
        raise InvalidSchedule(f"receiver control f_{b}(T) must be 0")

    zero_sets = [c.zero_set(T, s) for c in ctrl]
    parties = set(schedule.parties)
    for v, zs in enumerate(zero_sets):
        if v not in parties and zs:
            raise InvalidSchedule(f"non-party control f_{v} vanishes on {zs}")
    known = [(v, zs) for v, zs in enumerate(zero_sets) if zs]
    for i, (v, zv) in enumerate(known):
        for w, zw in known[i + 1:]:
            for lo1, hi1 in zv:
                for lo2, hi2 in zw:
                    if max(lo1, lo2) <= min(hi1, hi2):
                        raise InvalidSchedule(f"controls f_{v} and f_{w} vanish together "
                                              f"at t = {max(lo1, lo2):g}")

    times = np.linspace(0.0, T, VALIDATION_SAMPLES)
    vals = schedule.sample(times)
    zero = vals == 0
    for v in range(schedule.n1):
        if v not in parties and zero[:, v].any():
            raise InvalidSchedule(f"non-party control f_{v} vanishes at sampled times")
    clash = np.flatnonzero(zero.sum(axis=1) > 1)
    if clash.size:
        raise InvalidSchedule(f"two controls vanish together at t = {times[clash[0]]:g}")


def hamiltonian_at(schedule: ControlSchedule, A: np.ndarray, t: float) -> np.ndarray:
    """``F(t) A F(t)`` with ``F = diag(f_1, ..., f_n1, 1, ..., 1)``."""
    if not 0.0 <= t <= schedule.total_time:
        raise ValueError(f"t = {t} outside [0, {schedule.total_time}]")
    d = np.ones(A.shape[0])
    d[:schedule.n1] = schedule.values(t)
    return d[:, None] * A * d[None, :]


def dark_state_at(schedule: ControlSchedule, A: np.ndarray, t: float,
                  z: np.ndarray | None = None) -> np.ndarray:
    """Instantaneous zero-energy state ``F(t)^-1 z``, normalised.

    Where a single party control vanishes the state is that party's basis
    vector, carrying the phase of the kernel amplitude (the limit of
    ``F^-1 z``).  ``z`` may be passed in to avoid recomputing the kernel.
    """
    if z is None:
        z = zero_eigenvector(A, n1=schedule.n1)
    return _dark_state(schedule.values(t), z, t)


def _dark_state(f: np.ndarray, z: np.ndarray, t: float) -> np.ndarray:
    n1 = f.shape[0]
    off = np.flatnonzero(f == 0)
    y = np.zeros_like(z)
    if off.size == 0:
        y[:n1] = z[:n1] / f
        return y / np.linalg.norm(y)
    if off.size == 1 and abs(z[off[0]]) > SUPPORT_TOL:
        y[off[0]] = z[off[0]] / abs(z[off[0]])
        return y
    raise DarkStateUndefined(f"controls of vertices {off.tolist()} vanish at t = {t:g}")


def _phase_from_kernel(z: np.ndarray, a: int, b: int) -> float:
    # z solves A^T z = 0 (i.e. B^T z_1 = 0), the complex conjugate of the A-kernel
    return float(np.angle(np.conj(z[a]) / np.conj(z[b])))


def transfer_phase_prediction(graph: WeightedGraph, a: int, b: int) -> float:
    """Phase picked up moving amplitude from ``a`` to ``b``: ``arg(z_a / z_b)``.

    Here ``z`` solves ``B^T z_1 = 0`` with a plain transpose, which for
    complex weights is the conjugate of the kernel vector of the hermitian
    ``A_G``.  This is the phase of ``<b|U_T|a>`` in the adiabatic limit.
    """
    z = graph_kernel(graph)
    for p in (a, b):
        if abs(z[p]) <= SUPPORT_TOL:
            raise PartyUnsupported(f"kernel vector vanishes on vertex {p}")
    return _phase_from_kernel(z, a, b)


@dataclass
class TransferResult:
    final_state: np.ndarray
    error: float
    acquired_phase: float
    predicted_phase: float
    v2_population_max: float
    unitarity_defect: float
    zero_energy_residual: float
    kernel_unique: bool
    steps: int
    total_time: float
    trace: dict | None = field(default=None, repr=False)


def evolve(schedule: ControlSchedule, A: np.ndarray, steps: int | None = None,
           steps_per_unit_time: float = 20.0, trace: bool = False) -> TransferResult:
    """Propagate ``|a>`` under ``i d/dt psi = H(t) psi`` over ``[0, T]``.

    Each step applies the exact exponential of ``H`` at the step midpoint
    (via a hermitian eigendecomposition), so the propagator is unitary up to
    round-off and second-order accurate in the step size.  Without a unique
    kernel the run still happens but ``kernel_unique`` is false and the phase
    and zero-energy diagnostics are NaN.
    """
    T = schedule.total_time
    n, n1 = A.shape[0], schedule.n1
    a, b = schedule.sender, schedule.receiver
    if steps is None:
        steps = max(1, math.ceil(steps_per_unit_time * T))
    if steps < 1:
        raise ValueError("steps must be >= 1")
    dt = T / steps

    lam0 = np.linalg.eigvalsh(A) if n else np.zeros(0)
    kernel_unique = int(np.sum(np.abs(lam0) < zero_threshold(lam0, ZERO_TOL))) == 1
    z = predicted = None
    if kernel_unique:
        z = zero_eigenvector(A, n1=n1)
        if abs(z[a]) > SUPPORT_TOL and abs(z[b]) > SUPPORT_TOL:
            predicted = _phase_from_kernel(z, a, b)

    U = np.eye(n, dtype=complex)
    v2_max = 0.0
    residual = 0.0 if z is not None else float("nan")
    rec = None
    if trace:
        rec = {"t": np.empty(steps + 1), "population": np.empty((steps + 1, n)),
               "gap": np.empty(steps + 1), "controls": np.empty((steps + 1, n1))}
        _record(rec, 0, schedule, A, 0.0, U[:, a])

    mids = (np.arange(steps) + 0.5) * dt
    controls = schedule.sample(mids)
    d = np.ones(n)
    for k in range(steps):
        d[:n1] = controls[k]
        H = d[:, None] * A * d[None, :]
        lam, V = np.linalg.eigh(H)
        U = V @ (np.exp(-1j * lam * dt)[:, None] * (V.conj().T @ U))
        psi = U[:, a]
        v2_max = max(v2_max, float(np.sum(np.abs(psi[n1:]) ** 2)))
        if z is not None:
            residual = max(residual, _zero_energy_residual(controls[k], z, H, lam, mids[k]))
        if rec is not None:
            _record(rec, k + 1, schedule, A, (k + 1) * dt, psi)

    if z is not None:
        for t in (0.0, T):
            H = hamiltonian_at(schedule, A, t)
            residual = max(residual, _zero_energy_residual(schedule.values(t), z, H,
                                                           np.linalg.eigvalsh(H), t))

    defect = float(np.max(np.abs(U.conj().T @ U - np.eye(n)))) if n else 0.0
    if defect > UNITARITY_LIMIT:
        raise IntegrationUnstable(f"unitarity defect {defect:.3g} exceeds {UNITARITY_LIMIT:g}")
    amp = U[b, a]
    return TransferResult(
        final_state=U[:, a].copy(),
        error=float(1.0 - abs(amp)),
        acquired_phase=float(np.angle(amp)),
        predicted_phase=float("nan") if predicted is None else predicted,
        v2_population_max=v2_max,
        unitarity_defect=defect,
        zero_energy_residual=residual,
        kernel_unique=kernel_unique,
        steps=steps,
        total_time=T,
        trace=rec,
    )


def _zero_energy_residual(f, z, H, lam, t) -> float:
    """``||H y|| / ||H||`` for the instantaneous dark state ``y``."""
    scale = float(np.max(np.abs(lam))) if lam.size else 0.0
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(H @ _dark_state(f, z, t))) / scale


def _record(rec, i, schedule, A, t, psi):
    H = hamiltonian_at(schedule, A, t)
    lam = np.abs(np.linalg.eigvalsh(H))
    nonzero = lam[lam >= zero_threshold(lam, ZERO_TOL)]
    rec["t"][i] = t
    rec["population"][i] = np.abs(psi) ** 2
    rec["gap"][i] = nonzero.min() if nonzero.size else np.nan
    rec["controls"][i] = schedule.values(t)


def simulate(graph: WeightedGraph, a: int, b: int, T: float, s: float = 1.0,
             steps: int | None = None, steps_per_unit_time: float = 20.0,
             trace: bool = False) -> TransferResult:
    """Default schedule on ``graph`` followed by :func:`evolve`."""
    schedule = default_schedule(graph, a, b, T, s)
    return evolve(schedule, adjacency(graph), steps, steps_per_unit_time, trace)


@dataclass(frozen=True)
class TStarResult:
    tstar: float
    error: float
    probes: tuple[tuple[float, float], ...]
    max_unitarity_defect: float = 0.0
    max_zero_energy_residual: float = 0.0


def find_tstar(graph: WeightedGraph, a: int, b: int, s: float = 1.0, threshold: float = 0.05,
               steps_per_unit_time: float = 20.0, cap: float = 1e5, start: float = 1.0,
               rel_resolution: float = 0.01,
               schedule_factory: Callable = default_schedule) -> TStarResult:
    """Smallest protocol time with transfer error below ``threshold``.

    Doubles ``T`` from ``start`` until two consecutive probes pass, then
    bisects between the last failing probe and the first of those two passing
    probes down to ``rel_resolution``.
    """
    A = adjacency(graph)
    probes = []
    defects, residuals = [], []

    def error(T):
        res = evolve(schedule_factory(graph, a, b, T, s), A, steps_per_unit_time=steps_per_unit_time)
        probes.append((T, res.error))
        defects.append(res.unitarity_defect)
        residuals.append(res.zero_energy_residual)
        return res.error

    T, lo, first_pass, streak = start, None, None, 0
    while True:
        if T > cap:
            raise TStarNotFound(cap, min(e for _, e in probes))
        if error(T) < threshold:
            streak += 1
            if streak == 1:
                first_pass = T
            if streak == 2:
                break
        else:
            streak, lo = 0, T
        T *= 2

    hi = first_pass
    if lo is not None:
        while hi - lo > rel_resolution * hi:
            mid = 0.5 * (lo + hi)
            if error(mid) < threshold:
                hi = mid
            else:
                lo = mid
    err = dict(probes)[hi]
    return TStarResult(hi, err, tuple(probes), float(np.max(defects)),
                       float(np.max(residuals)))  # NaN propagates
