"""
Entry points for the ``execute`` tool.
"""

import logging
from typing import Any

from apps.tools.services import SceneTools

from . import ast
from .evaluator import Evaluator
from .exceptions import ResourceLimitError
from .parser import parse
from .schemas import SmqlLimits
from .values import to_wire

logger = logging.getLogger(__name__)


class SmqlService:
    @staticmethod
    def parse(source: str, limits: SmqlLimits | None = None) -> ast.Program:
        limits = limits or SmqlLimits.from_settings()
        size = len(source.encode("utf-8", errors="surrogatepass"))
        if size > limits.max_source_bytes:
            raise ResourceLimitError(
                "max_source_bytes", f"program of {size} bytes exceeds the limit of {limits.max_source_bytes}"
            )
        try:
            return parse(source)
        except RecursionError:
            raise ResourceLimitError("nesting", "program nested too deeply")

    @classmethod
    def evaluate(
        cls, program: ast.Program, tools: SceneTools, limits: SmqlLimits | None = None
    ) -> tuple[Any, list[str]]:
        """Run a parsed program; returns the raw value and the warnings."""
        evaluator = Evaluator(tools, limits or SmqlLimits.from_settings())
        try:
            value = evaluator.run(program)
        except RecursionError:
            raise ResourceLimitError("max_call_depth", "evaluation nested too deeply")
        logger.debug(
            f"Evaluated program in {evaluator.steps} steps with {len(evaluator.warnings)} warnings"
        )
        return value, evaluator.warnings

    @classmethod
    def execute(cls, source: str, tools: SceneTools, limits: SmqlLimits | None = None) -> dict[str, Any]:
        """Parse and run ``source``; the result is ``{"value", "warnings"}`` in wire form."""
        limits = limits or SmqlLimits.from_settings()
        program = cls.parse(source, limits)
        value, warnings = cls.evaluate(program, tools, limits)
        warnings = list(warnings)
        wire = to_wire(value, warnings)
        return {"value": wire, "warnings": warnings}
