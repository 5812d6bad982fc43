"""Diffusively coupled oscillator networks: simulation, Floquet analysis and
master stability functions, with a two-cluster remote-synchronization setup."""
from .errors import ConfigError, NumericalFailure, OscnetError, UnsupportedCase
from .graph import CLUSTER_NODE_NAMES, Graph, from_edge_list, laplacian, paper_network, spectrum
from .models import CouplingSpec, NetworkField, VdpParams, kappa_at, network_rhs, vdp_jacobian, vdp_rhs
from .integrate import IntegratorConfig, LimitCycle, Trajectory, find_limit_cycle, integrate, rk4_step
from .floquet import (build_transform, apply_transform, msf_scan, msf_value, multipliers,
                      stability_verdict, state_transition)
from .sync import run_remote_sync_experiment, sync_error, sync_time

__version__ = "0.1.0"
