"""Fixed-step DDE integration with a dense history buffer.

The integrator stores every accepted step (unbounded delays need the whole
history) and resolves delayed states by linear interpolation.  Discontinuous
sign feedback is handled by a zero-band projection: a component whose sign
flipped during a step and whose magnitude stayed inside the one-step sliding
band is set to exactly 0, emulating the ideal sliding mode.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .delays import DelayProfile

_GRID_SNAP = 1e-9  # fraction of h below which a query snaps to the grid point


class DivergenceError(RuntimeError):
    """Non-finite or runaway state detected during integration."""

    def __init__(self, t: float):
        super().__init__(f"state diverged at t={t:.6g}")
        self.blow_up_time = t


class HistoryWindowError(ValueError):
    """Delayed query before the available history."""


@dataclass
class IntegratorConfig:
    horizon: float
    h: float = 1e-3
    method: str = "euler"  # "euler" | "rk4_frozen"
    zero_band: Optional[float] = None  # None -> sign_gain * h (auto)
    zero_tol: float = 1e-9
    divergence_limit: float = 1e12

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError(f"step size must be > 0, got {self.h}")
        if self.zero_band is not None and self.zero_band < 0.0:
            raise ValueError(f"zero_band must be >= 0, got {self.zero_band}")
        if self.zero_tol <= 0.0:
            raise ValueError(f"zero_tol must be > 0, got {self.zero_tol}")
        if self.method not in ("euler", "rk4_frozen"):
            raise ValueError(f"unknown method {self.method!r}")


class HistoryTrajectory:
    """Dense grid record of a state trajectory with linear interpolation.

    Queries at t < t0 fall back to the initial history function (constant
    extension of the initial state by default), which is how constant-delay
    problems resolve pre-history lookups.
    """

    def __init__(self, t0: float, h: float, initial_state, capacity: int,
                 initial_history: Optional[Callable[[float], np.ndarray]] = None,
                 gain_names: Optional[Sequence[str]] = None):
        x0 = np.atleast_1d(np.asarray(initial_state, dtype=float))
        self.t0 = float(t0)
        self.h = float(h)
        self.dim = x0.size
        self._states = np.empty((capacity + 1, self.dim))
        self._states[0] = x0
        self._filled = 0
        self.initial_history = initial_history
        self.gain_names = tuple(gain_names) if gain_names else ()
        self._gains = (np.empty((capacity + 1, len(self.gain_names)))
                       if self.gain_names else None)

    @classmethod
    def from_arrays(cls, t0: float, h: float, states: np.ndarray,
                    gain_names: Optional[Sequence[str]] = None,
                    gains: Optional[np.ndarray] = None) -> "HistoryTrajectory":
        states = np.atleast_2d(np.asarray(states, dtype=float))
        traj = cls(t0, h, states[0], states.shape[0] - 1, gain_names=gain_names)
        traj._states[:] = states
        traj._filled = states.shape[0] - 1
        if gains is not None:
            traj._gains[:] = gains
        return traj

    # -- bookkeeping -------------------------------------------------------

    @property
    def current_time(self) -> float:
        return self.t0 + self._filled * self.h

    @property
    def states(self) -> np.ndarray:
        return self._states[:self._filled + 1]

    @property
    def gains(self) -> Optional[np.ndarray]:
        if self._gains is None:
            return None
        return self._gains[:self._filled + 1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self._filled + 1)

    def append(self, state: np.ndarray, gains: Optional[np.ndarray] = None):
        self._filled += 1
        self._states[self._filled] = state
        if self._gains is not None:
            self._gains[self._filled] = gains

    # -- interpolation -----------------------------------------------------

    def _pre_history(self, t: float) -> np.ndarray:
        if self.initial_history is not None:
            return np.atleast_1d(np.asarray(self.initial_history(t), dtype=float))
        return self._states[0]

    def query(self, t: float) -> np.ndarray:
        """Linearly interpolated state at time t <= current_time."""
        if t < self.t0:
            return self._pre_history(t).copy()
        u = (t - self.t0) / self.h
        if u > self._filled + _GRID_SNAP:
            raise HistoryWindowError(
                f"query at t={t:.6g} beyond recorded history (current "
                f"time {self.current_time:.6g})")
        k = int(math.floor(u))
        k = min(k, self._filled)
        frac = u - k
        if frac < _GRID_SNAP:
            return self._states[k].copy()
        if frac > 1.0 - _GRID_SNAP and k + 1 <= self._filled:
            return self._states[k + 1].copy()
        return (1.0 - frac) * self._states[k] + frac * self._states[min(k + 1, self._filled)]

    def query_diag(self, times: np.ndarray) -> np.ndarray:
        """Component i of the state at its own delayed time times[i]."""
        times = np.asarray(times, dtype=float)
        out = np.empty(self.dim)
        u = (times - self.t0) / self.h
        pre = u < 0.0
        k = np.floor(u).astype(int)
        np.clip(k, 0, self._filled, out=k)
        frac = u - k
        kp1 = np.minimum(k + 1, self._filled)
        idx = np.arange(self.dim)
        out = ((1.0 - frac) * self._states[k, idx] + frac * self._states[kp1, idx])
        if pre.any():
            for i in np.nonzero(pre)[0]:
                out[i] = self._pre_history(times[i])[i]
        return out


# -- windowed suprema ------------------------------------------------------

def sq_norm2(x) -> float:
    x = np.asarray(x)
    return float(np.dot(x.ravel(), x.ravel()))


def norm1(x) -> float:
    return float(np.abs(x).sum())


def norm_inf(x) -> float:
    return float(np.abs(x).max())


def weighted_sq(weights) -> Callable[[np.ndarray], float]:
    """Sum_k w_k x_k**2; use np.repeat(xi, n) for node-weighted errors."""
    w = np.asarray(weights, dtype=float)

    def fn(x) -> float:
        x = np.asarray(x).ravel()
        return float(np.dot(w, x * x))

    return fn


def window_sup(traj: HistoryTrajectory, t: float, profile: DelayProfile,
               functional: Callable[[np.ndarray], float],
               allow_prehistory: bool = True) -> float:
    """Supremum of `functional` over [t - pi(t), t].

    Grid points inside the window plus the two boundary interpolants.  A left
    boundary before t0 resolves through the trajectory's initial history
    (constant extension by default) unless `allow_prehistory` is False.
    """
    a = t - float(profile.envelope(t))
    if a < traj.t0 - _GRID_SNAP * traj.h and not allow_prehistory:
        raise HistoryWindowError(f"window [{a:.6g}, {t:.6g}] precedes history start {traj.t0}")
    k_lo = max(0, int(math.ceil((a - traj.t0) / traj.h - 1e-12)))
    k_hi = int(math.floor((t - traj.t0) / traj.h + 1e-12))
    k_hi = min(k_hi, traj._filled)
    best = -math.inf
    if k_hi >= k_lo:
        vals = [functional(traj._states[k]) for k in range(k_lo, k_hi + 1)]
        best = max(vals)
    best = max(best, functional(traj.query(a)), functional(traj.query(t)))
    return best


class RunningWindowSup:
    """Incremental sup of a grid series over the sliding window [t-pi(t), t].

    Both window ends are nondecreasing in t, so a monotone deque gives O(1)
    amortised updates.  The left boundary contributes a linear interpolant of
    the series; values before t0 take the series value at t0 (constant
    pre-history).
    """

    def __init__(self, t0: float, h: float, profile: DelayProfile):
        self.t0 = t0
        self.h = h
        self.profile = profile
        self.values: list = []
        self._dq: deque = deque()  # indices, values strictly decreasing

    def push(self, value: float):
        k = len(self.values)
        self.values.append(value)
        while self._dq and self.values[self._dq[-1]] <= value:
            self._dq.pop()
        self._dq.append(k)

    def sup(self, k: int) -> float:
        """Window sup at grid time t0 + k*h; values[0..k] must be pushed."""
        t = self.t0 + k * self.h
        a = t - float(self.profile.envelope(t))
        u = (a - self.t0) / self.h
        k_lo = max(0, int(math.ceil(u - 1e-12)))
        while self._dq and self._dq[0] < k_lo:
            self._dq.popleft()
        best = self.values[self._dq[0]] if self._dq else -math.inf
        if u <= 0.0:
            boundary = self.values[0]
        else:
            kb = int(math.floor(u))
            frac = u - kb
            if frac <= 1e-12:
                boundary = self.values[kb]
            else:
                boundary = (1.0 - frac) * self.values[kb] + frac * self.values[min(kb + 1, k)]
        return max(best, boundary)


# -- integration -----------------------------------------------------------

def _project_zero_band(x_old: np.ndarray, x_new: np.ndarray, band: float) -> np.ndarray:
    if band <= 0.0:
        return x_new
    flipped = (x_old * x_new < 0.0) | ((x_old == 0.0) & (x_new != 0.0))
    hit = flipped & (np.abs(x_new) <= band)
    if hit.any():
        x_new = x_new.copy()
        x_new[hit] = 0.0
    return x_new


def integrate(rhs, initial_state, profile: DelayProfile, config: IntegratorConfig,
              gain_hook=None, t0: float = 0.0,
              initial_history: Optional[Callable[[float], np.ndarray]] = None) -> HistoryTrajectory:
    """Integrate x' = rhs(t, x, traj) on [t0, horizon] with fixed step h.

    `rhs` resolves delayed states by querying `traj` (covering history up to
    the current step start).  `gain_hook`, when given, is an object with
    attributes `names`, `gains`, `sign_gain` and a method
    `step(t, x, traj)`; it is invoked once per accepted step and its gain
    trajectory is recorded alongside the states.

    rk4_frozen freezes the step-start time inside all internal stages, so
    delayed arguments are evaluated at the step's start.
    """
    x = np.atleast_1d(np.asarray(initial_state, dtype=float)).copy()
    h = config.h
    n_steps = int(round((config.horizon - t0) / h))
    if n_steps <= 0:
        raise ValueError("horizon must exceed start time by at least one step")
    gain_names = gain_hook.names if gain_hook is not None else None
    traj = HistoryTrajectory(t0, h, x, n_steps, initial_history=initial_history,
                             gain_names=gain_names)
    if gain_hook is not None:
        traj._gains[0] = gain_hook.gains

    limit = config.divergence_limit
    for k in range(n_steps):
        t = t0 + k * h
        if config.method == "euler":
            dx = rhs(t, x, traj)
            x_new = x + h * np.asarray(dx, dtype=float)
        else:  # rk4_frozen: time (hence delays) frozen at step start
            k1 = np.asarray(rhs(t, x, traj), dtype=float)
            k2 = np.asarray(rhs(t, x + 0.5 * h * k1, traj), dtype=float)
            k3 = np.asarray(rhs(t, x + 0.5 * h * k2, traj), dtype=float)
            k4 = np.asarray(rhs(t, x + h * k3, traj), dtype=float)
            x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        if config.zero_band is not None:
            band = config.zero_band
        elif gain_hook is not None:
            band = gain_hook.sign_gain * h
        else:
            band = 0.0
        x_new = _project_zero_band(x, x_new, band)

        if not np.isfinite(x_new).all() or np.abs(x_new).max() > limit:
            raise DivergenceError(t + h)

        gains = None
        if gain_hook is not None:
            gain_hook.step(t, x, traj)
            gains = gain_hook.gains
        traj.append(x_new, gains)
        x = x_new
    return traj


def delayed_linear_rhs(c1: float, c2: float, profile: DelayProfile,
                       control: Optional[Callable[[float, np.ndarray], np.ndarray]] = None):
    """Right-hand side p' = c1*p + c2*p(t - Pi(t)) + u(t, p)."""

    def rhs(t, p, traj):
        delayed = traj.query_diag(t - profile.delays_at(t))
        dp = c1 * p + c2 * delayed
        if control is not None:
            dp = dp + control(t, p)
        return dp

    return rhs
