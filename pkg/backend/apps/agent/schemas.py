"""
Agent session records: grounded answers, actions and transcripts.
"""

from dataclasses import dataclass
from enum import StrEnum
from typing import Any

from ninja import Schema
from pydantic import ConfigDict, Field

from apps.core.config import SettingsConfig
from apps.core.exceptions import SceneMemoryError
from apps.tools.schemas import ToolCall


class AgentConfig(SettingsConfig):
    settings_name = "AGENT_CONFIG"

    max_steps: int = Field(default=20, ge=1)
    result_truncate_bytes: int = Field(default=8 * 1024, ge=64)
    client_attempts: int = Field(default=3, ge=1)
    backoff_base: float = Field(default=1.0, ge=0)
    tool_preset: str = "full"


class TranscriptError(SceneMemoryError):
    code = "transcript_invalid"


# =============================================================================
# GROUNDED ANSWERS
# =============================================================================


class ComponentTag(Schema):
    """One ``<component_N>text</component_N>`` span; offsets are UTF-8 bytes into the answer."""

    model_config = ConfigDict(frozen=True)

    component_id: int
    text: str
    start: int
    end: int
    dangling: bool = False

    def render(self) -> str:
        return f"<component_{self.component_id}>{self.text}</component_{self.component_id}>"


class GroundedAnswer(Schema):
    text: str = ""
    tags: list[ComponentTag] = Field(default_factory=list)

    @property
    def component_ids(self) -> set[int]:
        return {tag.component_id for tag in self.tags}

    @property
    def dangling_count(self) -> int:
        return sum(1 for tag in self.tags if tag.dangling)

    def render(self) -> str:
        """Rebuild the text from the untagged gaps and the rendered tags."""
        raw = self.text.encode("utf-8")
        parts, cursor = [], 0
        for tag in self.tags:
            parts.append(raw[cursor : tag.start].decode("utf-8"))
            parts.append(tag.render())
            cursor = tag.end
        parts.append(raw[cursor:].decode("utf-8"))
        return "".join(parts)


# =============================================================================
# MODEL ACTIONS
# =============================================================================


@dataclass(frozen=True)
class FinalAnswer:
    text: str


@dataclass(frozen=True)
class ParseFeedback:
    """A malformed tool block; ``message`` is sent back to the model."""

    message: str


Action = ToolCall | FinalAnswer | ParseFeedback


# =============================================================================
# TRANSCRIPTS
# =============================================================================


class EntryKind(StrEnum):
    USER_QUERY = "user_query"
    MODEL_ACTION = "model_action"
    TOOL_CALL = "tool_call"
    TOOL_RESULT = "tool_result"
    FEEDBACK = "feedback"
    FINAL_ANSWER = "final_answer"
    ABORT = "abort"


TERMINAL_KINDS = (EntryKind.FINAL_ANSWER, EntryKind.ABORT)


class TranscriptEntry(Schema):
    kind: EntryKind
    step: int
    text: str | None = None
    call: ToolCall | None = None
    result: dict[str, Any] | None = None


class Transcript(Schema):
    entries: list[TranscriptEntry] = Field(default_factory=list)

    def append(self, kind: EntryKind, step: int, **fields: Any) -> TranscriptEntry:
        entry = TranscriptEntry(kind=kind, step=step, **fields)
        self.entries.append(entry)
        return entry

    @property
    def tool_calls(self) -> list[ToolCall]:
        return [entry.call for entry in self.entries if entry.kind == EntryKind.TOOL_CALL]

    @property
    def aborted(self) -> bool:
        return bool(self.entries) and self.entries[-1].kind == EntryKind.ABORT

    def audit(self, *, finished: bool = False) -> None:
        """Check well-formedness; ``finished`` also requires a terminal last entry."""
        seen_calls: set[str | None] = set()
        for index, entry in enumerate(self.entries):
            if index == 0 and entry.kind != EntryKind.USER_QUERY:
                raise TranscriptError("transcript must start with the user query")
            if entry.kind in TERMINAL_KINDS and index != len(self.entries) - 1:
                raise TranscriptError(f"entry {index} ({entry.kind}) is terminal but not last")
            if entry.kind == EntryKind.TOOL_CALL:
                seen_calls.add(entry.call.call_id)
            elif entry.kind == EntryKind.TOOL_RESULT:
                call_id = (entry.result or {}).get("call_id")
                if call_id not in seen_calls:
                    raise TranscriptError(f"tool result {call_id!r} has no matching call")
        if finished and (not self.entries or self.entries[-1].kind not in TERMINAL_KINDS):
            raise TranscriptError("transcript must end with a final answer or an abort record")

    def to_wire(self) -> list[dict[str, Any]]:
        return [entry.model_dump(mode="json", exclude_none=True) for entry in self.entries]
