"""Seed sets, weighted sample sets, inverse walk search and the SWAP-test decider."""
from .algorithm import (SeedSet, TradeoffDecider, seed_set, swap_probability, swap_test,
                        swap_test_joint, ustcon_tradeoff, ustcon_tradeoff_amplified)
from .invqws import PreparedState, inverse_qws
from .wset import WeightedSampleSet, wset_contains, wset_prepare_state, wset_update

__all__ = [
    "SeedSet", "TradeoffDecider", "seed_set", "swap_probability", "swap_test", "swap_test_joint",
    "ustcon_tradeoff", "ustcon_tradeoff_amplified", "PreparedState", "inverse_qws",
    "WeightedSampleSet", "wset_contains", "wset_prepare_state", "wset_update",
]
