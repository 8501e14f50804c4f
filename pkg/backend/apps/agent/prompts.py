"""
System prompt rendering. Output is deterministic for a given registry and
memory summary.
"""

from typing import Any

from apps.tools.registry import ToolRegistry
from apps.tools.schemas import ToolSpec

INTRO = (
    "You answer questions about a 3D scene. The scene is stored in a memory of components: "
    "physical objects, each with an integer id, a centroid and an axis-aligned bounding box "
    "in meters, a caption, representative image crops and optional key/value attributes."
)

CALLING = """To call a tool, reply with exactly one fenced block and nothing else:
```tool
{"name": "<tool name>", "arguments": {...}, "call_id": "<any id>"}
```
The result comes back in the next message as JSON. Plan a sequence of tool calls: find the relevant components first, then measure or inspect them, and combine the results before answering."""

ANSWERING = """When you have enough information, reply in plain text with no tool block. Wrap every mention of a scene object in its component tag, <component_ID>text</component_ID>, for example <component_12>the red chair</component_12>. Only use ids you have seen in tool results."""

NO_TOOLS = "No tools are available. Answer from the question alone."


def render_tool(spec: ToolSpec) -> list[str]:
    lines = [f"### {spec.name}", spec.description]
    if spec.parameters:
        lines.append("Parameters:")
        for name, param in spec.parameters.items():
            flag = "required" if param.required else "optional"
            line = f"- {name} ({param.type}, {flag})"
            if param.description:
                line += f": {param.description}"
            lines.append(line)
    else:
        lines.append("Parameters: none")
    return lines


def render_system_prompt(registry: ToolRegistry, summary: dict[str, Any]) -> str:
    keys = summary.get("attribute_keys") or []
    sections = [
        INTRO,
        "## Scene memory\n"
        f"Components: {summary.get('component_count', 0)}\n"
        f"Attribute keys: {', '.join(keys) if keys else 'none'}",
    ]
    specs = registry.specs()
    if specs:
        sections.append("## Tools\n" + "\n\n".join("\n".join(render_tool(spec)) for spec in specs))
        sections.append("## Calling tools\n" + CALLING)
    else:
        sections.append("## Tools\n" + NO_TOOLS)
    sections.append("## Answering\n" + ANSWERING)
    return "\n\n".join(sections) + "\n"
