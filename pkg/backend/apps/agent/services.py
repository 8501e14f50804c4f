"""
The question-answering loop over the scene tools.
"""

import logging
from typing import Any

from apps.core.exceptions import ClientError, InvalidArgumentError
from apps.core.metrics import AGENT_STEPS
from apps.core.retry import call_with_retries
from apps.core.serialization import dumps
from apps.memory.services import SceneMemory
from apps.tools.registry import ToolRegistry
from apps.tools.schemas import ToolCall, ToolResult
from libs.modelsdk.contracts import ModelClient

from .parsing import parse_component_tags, parse_model_action
from .prompts import render_system_prompt
from .schemas import AgentConfig, EntryKind, FinalAnswer, GroundedAnswer, ParseFeedback, Transcript

logger = logging.getLogger(__name__)

TRUNCATION_MARKER = "\n[truncated: showing {shown} of {total} bytes]"


def render_tool_result(result: ToolResult, limit: int) -> str:
    """Compact JSON of the wire result, cut to ``limit`` bytes with a marker."""
    raw = dumps(result.to_wire())
    if len(raw) <= limit:
        return raw.decode("utf-8")
    shown = raw[:limit].decode("utf-8", errors="ignore")
    return shown + TRUNCATION_MARKER.format(shown=len(shown.encode("utf-8")), total=len(raw))


def feedback_message(feedback: ParseFeedback) -> str:
    return f"Your tool call could not be parsed: {feedback.message}. Reply with one valid ```tool block or a final answer."


class AgentService:
    @classmethod
    def run_query(
        cls,
        question: str,
        memory: SceneMemory,
        registry: ToolRegistry,
        client: ModelClient,
        max_steps: int | None = None,
        *,
        config: AgentConfig | None = None,
    ) -> tuple[GroundedAnswer, Transcript]:
        """Ask ``question``; each step is one model action.

        Ends at the first final answer, or with an abort record after
        ``max_steps`` actions or a client failure.
        """
        config = config or AgentConfig.from_settings()
        if max_steps is None:
            max_steps = config.max_steps
        elif max_steps < 1:
            raise InvalidArgumentError(f"max_steps must be at least 1, got {max_steps}")
        system_prompt = render_system_prompt(registry, memory.summary())
        known_ids = {c.component_id for c in memory.components()}

        transcript = Transcript()
        transcript.append(EntryKind.USER_QUERY, 0, text=question)
        messages: list[dict[str, str]] = [{"role": "user", "content": question}]
        answer = GroundedAnswer()
        steps = 0

        for step in range(1, max_steps + 1):
            steps = step
            try:
                text = call_with_retries(
                    lambda: client.complete(system_prompt, list(messages)),
                    attempts=config.client_attempts,
                    backoff_base=config.backoff_base,
                    what="model completion",
                )
            except ClientError as e:
                logger.warning(f"Query aborted at step {step}: {e.message}")
                transcript.append(EntryKind.ABORT, step, text=f"{e.code}: {e.message}")
                break

            transcript.append(EntryKind.MODEL_ACTION, step, text=text)
            messages.append({"role": "assistant", "content": text})
            action = parse_model_action(text, step)

            if isinstance(action, FinalAnswer):
                transcript.append(EntryKind.FINAL_ANSWER, step, text=action.text)
                answer = parse_component_tags(action.text, known_ids)
                break
            if isinstance(action, ParseFeedback):
                transcript.append(EntryKind.FEEDBACK, step, text=action.message)
                messages.append({"role": "user", "content": feedback_message(action)})
            else:
                messages.append({"role": "user", "content": cls._dispatch(registry, action, transcript, step, config)})
            transcript.audit()
        else:
            logger.info(f"Query aborted: no final answer within {max_steps} steps")
            transcript.append(EntryKind.ABORT, max_steps, text=f"step limit of {max_steps} reached without a final answer")

        transcript.audit(finished=True)
        AGENT_STEPS.observe(steps)
        logger.info(
            f"Query finished after {steps} steps with {len(transcript.tool_calls)} tool calls",
            extra={"aborted": transcript.aborted, "tags": len(answer.tags)},
        )
        return answer, transcript

    @staticmethod
    def _dispatch(
        registry: ToolRegistry, call: ToolCall, transcript: Transcript, step: int, config: AgentConfig
    ) -> str:
        transcript.append(EntryKind.TOOL_CALL, step, call=call)
        result = registry.dispatch(call)
        transcript.append(EntryKind.TOOL_RESULT, step, result=result.to_wire())
        return render_tool_result(result, config.result_truncate_bytes)

    @staticmethod
    def response(answer: GroundedAnswer, transcript: Transcript) -> dict[str, Any]:
        """``{answer, tags, transcript}`` as served by ``POST /query``."""
        return {
            "answer": answer.text,
            "tags": [tag.model_dump() for tag in answer.tags],
            "transcript": transcript.to_wire(),
        }
