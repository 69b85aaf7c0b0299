"""Scenario fuzzing for decision-making policies."""

from ._scenfuzz import (
    Error,
    classify_potential,
    default_config,
    diversity_counts,
    environments,
    parse_response,
    percentile,
    replay_failure,
    resolve_config,
    run_campaign,
    run_episode,
    sensitivity_from_rewards,
    space,
)

__all__ = [
    "Error",
    "classify_potential",
    "default_config",
    "diversity_counts",
    "environments",
    "parse_response",
    "percentile",
    "replay_failure",
    "resolve_config",
    "run_campaign",
    "run_episode",
    "sensitivity_from_rewards",
    "space",
]
