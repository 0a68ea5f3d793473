"""Statevector simulation of walk oracles, walk operators and phase estimation."""
from .oracles import (CircuitOracle, mh_u_from_components, oracle_basis, ow_oracle,
                      ow_via_array_queries, weighted_ow_oracle)
from .phase import PhaseEstimate, fejer_distribution, phase_estimation, zero_branch
from .state import Basis, StateVector, UnitaryAction, random_state
from .szegedy import (a_subspace, pair_basis, reflection_walk, stationary_pair_state,
                      szegedy_operator)

__all__ = [
    "Basis", "StateVector", "UnitaryAction", "random_state",
    "CircuitOracle", "oracle_basis", "ow_oracle", "ow_via_array_queries",
    "weighted_ow_oracle", "mh_u_from_components",
    "pair_basis", "szegedy_operator", "reflection_walk", "stationary_pair_state", "a_subspace",
    "PhaseEstimate", "phase_estimation", "zero_branch", "fejer_distribution",
]
