"""
Parsing of model output: tool-call blocks and component tags.
"""

import re
from collections.abc import Collection

import pydantic

from apps.core.serialization import loads
from apps.tools.schemas import ToolCall

from .schemas import Action, ComponentTag, FinalAnswer, GroundedAnswer, ParseFeedback

TOOL_BLOCK_RE = re.compile(r"```tool(.*?)```", re.DOTALL)

# no nesting: an opening tag inside the body disqualifies the outer span
COMPONENT_TAG_RE = re.compile(
    r"<component_(0|[1-9]\d*)>((?:(?!<component_\d+>).)*?)</component_\1>",
    re.DOTALL,
)


def parse_model_action(text: str, step: int = 0) -> Action:
    """The first ```tool block becomes a call; text without one is the final answer."""
    match = TOOL_BLOCK_RE.search(text)
    if match is None:
        return FinalAnswer(text)
    body = match.group(1).strip()
    try:
        raw = loads(body)
    except ValueError as e:
        return ParseFeedback(f"tool block is not valid JSON: {e}")
    if not isinstance(raw, dict):
        return ParseFeedback("tool block must hold a JSON object with 'name' and 'arguments'")
    if raw.get("call_id") is None:
        raw = {**raw, "call_id": f"call_{step}"}
    try:
        return ToolCall.model_validate(raw)
    except pydantic.ValidationError as e:
        fields = sorted({".".join(str(p) for p in err["loc"]) or "(root)" for err in e.errors()})
        return ParseFeedback(f"tool block is malformed: {', '.join(fields)}")


def parse_component_tags(text: str, known_ids: Collection[int] | None = None) -> GroundedAnswer:
    """Extract well-formed tags in order; malformed ones stay plain text.

    With ``known_ids`` each tag whose id is absent is marked dangling.
    """
    tags = []
    for match in COMPONENT_TAG_RE.finditer(text):
        component_id = int(match.group(1))
        tags.append(
            ComponentTag(
                component_id=component_id,
                text=match.group(2),
                start=len(text[: match.start()].encode("utf-8")),
                end=len(text[: match.end()].encode("utf-8")),
                dangling=known_ids is not None and component_id not in known_ids,
            )
        )
    return GroundedAnswer(text=text, tags=tags)
