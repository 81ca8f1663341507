"""Discrete-bidding games on graphs: determinacy of reveal-first bidding,
random and advantage tie-breaking, reductions and simulation."""
from .advantage import Threshold, ThresholdFrontier, threshold_frontier, validate_advantage_monotonicity
from .arena import (
    AdvantageTie,
    BiddingArena,
    Buchi,
    GameSpec,
    Muller,
    Parity,
    RandomTie,
    Reachability,
    TieTransducer,
    TransducerRule,
    TransducerTie,
    load_game,
    make_game,
    parse_game,
    serialize_game,
    validate_spec,
)
from .configgraph import (
    Configuration,
    build_alternating_transducer,
    build_config_graph,
    build_reveal_first,
    configurations,
    constant_transducer,
    reduce_turn_based,
    reduction,
)
from .determinacy import (
    Determined,
    NotDetermined,
    RevealFirstAnalysis,
    analyze,
    bidding_matrix,
    classify_matrix,
    global_determinacy,
    validate_matrix_lemmas,
)
from .errors import (
    BidGameError,
    GameReferenceError,
    GameSemanticError,
    GameSyntaxError,
    IllegalBidError,
    InternalConsistencyError,
    NodeCapExceeded,
    SizeLimitExceeded,
    StrategyError,
    UnsupportedMechanismError,
)
from .randomtie import dominant_bid, unroll_horizon, value_bounds, value_matrix
from .sim import SplitMix64, play_deterministic, play_random, play_steps
from .tbsolve import TurnBasedGame, parse_turn_based, solve_turn_based

__version__ = "0.1.0"
