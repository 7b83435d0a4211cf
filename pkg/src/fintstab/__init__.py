"""Finite-time stabilization of delayed systems and network synchronization.

Simulation (fixed-step DDE integration with sign feedback), feasibility
checks of the sufficient stability conditions, adaptive gain rules, Lyapunov
functional monitors, and a three-node Lorenz network preset.
"""

from .conditions import (ConditionReport, InfeasibleError,
                         NetworkConditionParams, adaptive_settling_bound,
                         check_corollary, check_network_theorem,
                         check_scalar_theorem, lambda_max_sym,
                         left_eigenvector, optimal_eps1, settling_bound)
from .config import ConfigError, ExperimentConfig, load_config, load_config_file
from .control import (AdaptiveGainState, NetworkAdaptiveHook,
                      NetworkControlSpec, ScalarAdaptiveHook,
                      StaticScalarGains, adaptive_network_update,
                      adaptive_scalar_update, full_node_control,
                      network_gain_rates, pinning_control, scalar_gain_rates,
                      static_scalar_control)
from .delays import (DelayProfile, NoClosedFormError, RateFunction,
                     asymptotics)
from .integrate import (DivergenceError, HistoryTrajectory,
                        HistoryWindowError, IntegratorConfig,
                        RunningWindowSup, delayed_linear_rhs, integrate,
                        norm1, norm_inf, sq_norm2, weighted_sq, window_sup)
from .monitors import (ContactPoint, LyapunovTrace, PhaseReport,
                       contact_point_decrease, detect_phases,
                       functional_series, trace_functional)
from .network import (NetworkModel, SyncExperiment, SyncResult,
                      error_index_series, error_indices,
                      estimate_lipschitz, inner_sync_residual,
                      lorenz_lipschitz_bound, lorenz_preset, lorenz_rhs,
                      simulate_response_directly, simulate_sync,
                      sin_plus_linear)

__version__ = "0.1.0"
