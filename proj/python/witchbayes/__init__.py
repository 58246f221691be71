"""Exact discrete Bayesian inference and decisions for the witches of the cave."""

from ._core import (
    SessionService,
    WitchBayesError,
    anger_probability,
    builtin_scenario,
    chessboard_oracle,
    export_net,
    laplace_succession,
    optimal_strategy,
    posterior,
    predictive,
    second_layer_predictive,
    simulate,
    to_decimal,
)

__all__ = [
    "SessionService",
    "WitchBayesError",
    "anger_probability",
    "builtin_scenario",
    "chessboard_oracle",
    "export_net",
    "laplace_succession",
    "optimal_strategy",
    "posterior",
    "predictive",
    "second_layer_predictive",
    "simulate",
    "to_decimal",
]
