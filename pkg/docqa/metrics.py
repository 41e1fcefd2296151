# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""This module contains all prometheus metrics."""
from pathlib import Path

from prometheus_client import Counter
from prometheus_client import Histogram
from prometheus_client import REGISTRY
from prometheus_client import write_to_textfile

# ------------- #
# Registrations #
# ------------- #

eval_funcs_registered = Counter(
    "docqa_eval_funcs_registered",
    "Number of evaluation functions registered",
    ["eval_func"],
)

# --------------- #
# Gateway metrics #
# --------------- #

gateway_calls = Counter(
    "docqa_gateway_calls",
    "Number of calls made to the LLM gateway",
    ["kind", "outcome"],
)
gateway_retries = Counter(
    "docqa_gateway_retries",
    "Number of retried LLM gateway calls",
    ["kind"],
)
gateway_tokens = Counter(
    "docqa_gateway_tokens",
    "Number of prompt and completion tokens reported by the gateway",
    ["direction"],
)

# ----------------- #
# Execution metrics #
# ----------------- #

actions_executed = Counter(
    "docqa_actions",
    "Number of executed agent actions",
    ["action_type", "outcome"],
)
sql_exceptions = Counter(
    "docqa_sql_exceptions",
    "Number of agent SQL queries that failed",
    ["error"],
)
sql_time = Histogram(
    "docqa_sql_seconds",
    "Time spent executing agent SQL",
)
search_time = Histogram(
    "docqa_search_seconds",
    "Time spent on vectorstore searches",
    ["collection"],
)

# --------------- #
# Episode metrics #
# --------------- #

episodes = Counter(
    "docqa_episodes",
    "Number of finished episodes",
    ["method", "status"],
)
episode_turns = Histogram(
    "docqa_episode_turns",
    "Interaction turns per episode",
    ["method"],
    buckets=(0, 1, 2, 3, 5, 8, 12, 16, 20, 30),
)


def write_metrics(path: Path) -> None:
    """Dump the default registry in the node-exporter textfile format."""
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)
