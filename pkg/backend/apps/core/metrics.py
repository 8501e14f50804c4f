"""
Prometheus metrics shared across the ingest pipeline and the tool server.
"""

from prometheus_client import Counter, Histogram

TOOL_CALLS = Counter(
    "scene_memory_tool_calls_total",
    "Tool dispatches by tool name and outcome",
    ["tool", "outcome"],
)

INGEST_STAGE_SECONDS = Histogram(
    "scene_memory_ingest_stage_seconds",
    "Wall time of each ingest stage",
    ["stage"],
)

AGENT_STEPS = Histogram(
    "scene_memory_agent_steps",
    "Model actions per query session",
    buckets=(1, 2, 3, 5, 8, 13, 20, 40),
)
