"""Feasibility checks for the finite-time stability sufficient conditions.

Each theorem splits into an epsilon-tradeoff condition (left-hand side must
be negative, minimised over eps1 > 0 in closed form) and a sign-gain margin
condition (the sign gain must dominate the delayed coupling).  A
ConditionReport bundles the verdict, the optimal eps1, and the admissible
eps2 margin that bounds the phase-II settling time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .control import StaticScalarGains
from .delays import DelayProfile, RateFunction, asymptotics

METZLER_TOL = 1e-12


class InfeasibleError(ValueError):
    """A bound was requested from an infeasible condition report."""


@dataclass
class ConditionReport:
    theorem_id: str
    lhs: float
    feasible: bool
    eps1_used: float
    eps1_optimal: float
    margin: float               # -lhs
    epsilon2_max: float         # violation margin of the sign-gain condition
    c4_threshold: Optional[float] = None  # linear-gain boundary at eps1_used
    details: dict = field(default_factory=dict)


def optimal_eps1(a: float, b: float):
    """Minimiser of a*eps + b/eps over eps > 0: eps* = sqrt(b/a), min 2*sqrt(ab)."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"optimal_eps1 needs a > 0 and b > 0, got a={a}, b={b}")
    return math.sqrt(b / a), 2.0 * math.sqrt(a * b)


def check_scalar_theorem(gains: StaticScalarGains, m: int, beta: float,
                         eta: float, norm: str = "two",
                         eps1: Optional[float] = None) -> ConditionReport:
    """Feasibility of the scalar theorem in the requested norm.

    two:  beta + 2(c1-c4) + |c2| eps1 + |c2| m (1+eta)/eps1 < 0
    one:  beta + (c1-c4) + |c2| m (1+eta) < 0      (no eps1 trade-off)
    inf:  beta + (c1-c4) + |c2| (1+eta) < 0
    plus |c2| - c3 < 0 in every norm; the 1-norm settling margin carries the
    extra factor m.
    """
    if m < 1:
        raise ValueError(f"dimension m must be >= 1, got {m}")
    if eta < 0.0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    c1, c2, c3, c4 = gains.c1, gains.c2, gains.c3, gains.c4
    ac2 = abs(c2)

    if norm == "two":
        if ac2 == 0.0:
            eps_opt = eps_used = math.nan
            delay_term = 0.0
        else:
            a = ac2
            b = ac2 * m * (1.0 + eta)
            eps_opt, min_term = optimal_eps1(a, b)
            eps_used = eps_opt if eps1 is None else float(eps1)
            delay_term = (a * eps_used + b / eps_used) if eps1 is not None else min_term
        lhs = beta + 2.0 * (c1 - c4) + delay_term
        c4_threshold = c1 + 0.5 * (beta + delay_term)
        sign_margin = c3 - ac2
    elif norm == "one":
        eps_opt = eps_used = math.nan
        lhs = beta + (c1 - c4) + ac2 * m * (1.0 + eta)
        c4_threshold = c1 + beta + ac2 * m * (1.0 + eta)
        sign_margin = m * (c3 - ac2)
    elif norm == "inf":
        eps_opt = eps_used = math.nan
        lhs = beta + (c1 - c4) + ac2 * (1.0 + eta)
        c4_threshold = c1 + beta + ac2 * (1.0 + eta)
        sign_margin = c3 - ac2
    else:
        raise ValueError(f"unknown norm {norm!r}")

    sign_ok = (c3 - ac2) > 0.0  # condition |c2| - c3 < 0 in all norms
    feasible = lhs < 0.0 and sign_ok
    return ConditionReport(theorem_id=f"scalar_{norm}_norm", lhs=lhs,
                           feasible=feasible, eps1_used=eps_used,
                           eps1_optimal=eps_opt, margin=-lhs,
                           epsilon2_max=sign_margin,
                           c4_threshold=c4_threshold,
                           details={"beta": beta, "eta": eta, "m": m})


def check_corollary(gains: StaticScalarGains, m: int, delay: DelayProfile,
                    rate: RateFunction, eps1: Optional[float] = None) -> ConditionReport:
    """Delay-class corollaries: compute (beta, eta) analytically, then delegate."""
    beta, eta = asymptotics(rate, delay)
    report = check_scalar_theorem(gains, m, beta, eta, norm="two", eps1=eps1)
    tag = "proportional" if delay.envelope_kind == "proportional" else "bounded"
    report.theorem_id = f"corollary_{tag}_delay"
    return report


def _validate_coupling_matrix(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"coupling matrix must be square, got shape {A.shape}")
    off = A - np.diag(np.diag(A))
    if off.min() < -METZLER_TOL:
        raise ValueError("coupling matrix is not Metzler (negative off-diagonal entry)")
    row_sums = A.sum(axis=1)
    if np.abs(row_sums).max() > METZLER_TOL * max(1.0, np.abs(A).max()):
        raise ValueError(f"coupling matrix row sums are not zero (max |sum| = {np.abs(row_sums).max():.3g})")
    return A


def left_eigenvector(A: np.ndarray) -> np.ndarray:
    """Positive left null vector xi of a Metzler zero-row-sum matrix, sum 1.

    Computed from the SVD null space of A^T; a non-positive component signals
    a reducible matrix.
    """
    A = _validate_coupling_matrix(A)
    _, s, vt = np.linalg.svd(A.T)
    xi = vt[-1]
    if abs(xi.sum()) < 1e-12:
        raise ValueError("degenerate null vector; coupling matrix likely reducible")
    xi = xi / xi.sum()
    if xi.min() <= 1e-10:
        raise ValueError("left eigenvector has a non-positive component; "
                         "coupling matrix is reducible")
    residual = np.abs(xi @ A).max()
    if residual > 1e-10:
        raise ValueError(f"left eigenvector residual too large: {residual:.3g}")
    return xi


def lambda_max_sym(A: np.ndarray, xi: np.ndarray, sigma: float = 1.0,
                   theta1: float = 0.0, theta4: float = 0.0,
                   which: str = "tilde") -> float:
    """Largest eigenvalue of the symmetric part of Xi*M.

    tilde: M = A - diag(sigma, 0, ..., 0) (pinned coupling)
    hat:   M = theta1*A + theta4*I        (full-node feedback)
    """
    A = np.asarray(A, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if xi.shape[0] != A.shape[0]:
        raise ValueError("dimension mismatch between xi and A")
    if which == "tilde":
        M = A.copy()
        M[0, 0] -= sigma
    elif which == "hat":
        M = theta1 * A + theta4 * np.eye(A.shape[0])
    else:
        raise ValueError(f"unknown variant {which!r}")
    XiM = xi[:, None] * M
    S = 0.5 * (XiM + XiM.T)
    return float(np.linalg.eigvalsh(S)[-1])


@dataclass
class NetworkConditionParams:
    L_f: float
    L_g: float
    theta1: float
    theta2: float
    theta3: float
    N: int
    n: int
    B: np.ndarray
    xi: np.ndarray
    beta: float
    eta: float
    theta4: float = 0.0
    sigma: float = 1.0
    A: Optional[np.ndarray] = None


def check_network_theorem(params: NetworkConditionParams, variant: str = "pinning",
                          eps1: Optional[float] = None,
                          synchronous_delays: bool = False) -> ConditionReport:
    """Feasibility of the network synchronization theorems.

    lhs = beta + 2 L_f + th2 bmax N eps1 + 2 lam + th2 bmax N^2 n L_g^2
          / (eps1 min_i xi_i) * (1+eta)
    with lam = theta1 * lambda_max({Xi Atilde}^s) for pinning and
    lam = lambda_max({Xi Ahat}^s) for full-node control; the sign condition
    is th2 bmax N L_g - theta3 < 0.  `synchronous_delays` tightens the
    delayed factor from N^2 n to N n (all pair delays equal).
    """
    B = np.asarray(params.B, dtype=float)
    bmax = float(np.abs(B).max())
    xi_min = float(np.asarray(params.xi).min())
    N, n = params.N, params.n
    if variant == "pinning":
        lam_term = 2.0 * params.theta1 * lambda_max_sym(
            params.A, params.xi, sigma=params.sigma, which="tilde")
    elif variant == "full":
        lam_term = 2.0 * lambda_max_sym(params.A, params.xi, theta1=params.theta1,
                                        theta4=params.theta4, which="hat")
    else:
        raise ValueError(f"unknown variant {variant!r}")

    delay_nodes = N if synchronous_delays else N * N
    base = params.beta + 2.0 * params.L_f + lam_term
    if params.theta2 == 0.0 or bmax == 0.0:
        lhs = base
        eps_opt = eps_used = math.nan
    else:
        a = params.theta2 * bmax * N
        b = params.theta2 * bmax * delay_nodes * n * params.L_g ** 2 * (1.0 + params.eta) / xi_min
        eps_opt, min_term = optimal_eps1(a, b)
        eps_used = eps_opt if eps1 is None else float(eps1)
        lhs = base + (a * eps_used + b / eps_used if eps1 is not None else min_term)

    sign_margin = params.theta3 - params.theta2 * bmax * N * params.L_g
    feasible = lhs < 0.0 and sign_margin > 0.0
    return ConditionReport(theorem_id=f"network_{variant}", lhs=lhs,
                           feasible=feasible, eps1_used=eps_used,
                           eps1_optimal=eps_opt, margin=-lhs,
                           epsilon2_max=sign_margin,
                           details={"lambda_term": lam_term, "bmax": bmax,
                                    "xi_min": xi_min,
                                    "theta3_required": params.theta2 * bmax * N * params.L_g})


def settling_bound(report: ConditionReport, T1: float, kappa: float = 0.9) -> float:
    """Phase-II settling bound T2 = T1 + 1/eps2 with eps2 = kappa * margin.

    kappa must lie strictly inside (0, 1): the proofs require eps2 strictly
    smaller than the sign-gain margin.
    """
    if not report.feasible:
        raise InfeasibleError(f"condition {report.theorem_id} is infeasible "
                              f"(lhs={report.lhs:.4g}, epsilon2_max={report.epsilon2_max:.4g})")
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0,1), got {kappa}")
    if not math.isfinite(T1):
        raise ValueError("T1 must be finite")
    eps2 = kappa * report.epsilon2_max
    return T1 + 1.0 / eps2


def adaptive_settling_bound(report: ConditionReport, T3: float, c3_star: float,
                            c4_star: float, d1: float, d3: float,
                            kappa: float = 0.9) -> float:
    """Adaptive-case diagnostic bound using user-supplied limiting gains."""
    if not report.feasible:
        raise InfeasibleError(f"condition {report.theorem_id} is infeasible")
    eps2 = kappa * report.epsilon2_max
    return T3 + (1.0 + c3_star ** 2 / (2.0 * d1) + c4_star ** 2 / (2.0 * d3)) / eps2
