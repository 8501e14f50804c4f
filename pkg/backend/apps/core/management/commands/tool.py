from django.core.management.base import CommandError

from apps.core.cli import EXIT_RUNTIME, EXIT_USAGE
from apps.core.management.base import SceneCommand
from apps.core.serialization import loads
from apps.memory.services import SceneMemory
from apps.tools.registry import ToolPreset, build_registry
from apps.tools.schemas import ToolCall


class Command(SceneCommand):
    help = "Call one tool against a scene memory"

    def add_arguments(self, parser):
        parser.add_argument("memory_dir")
        parser.add_argument("name")
        parser.add_argument("--args", default="{}", help="tool arguments as a JSON object")
        self.add_preset_argument(parser)

    def handle(self, *args, **options):
        try:
            arguments = loads(options["args"])
        except ValueError as e:
            raise CommandError(f"--args is not valid JSON: {e}", returncode=EXIT_USAGE)
        if not isinstance(arguments, dict):
            raise CommandError("--args must be a JSON object", returncode=EXIT_USAGE)

        memory = SceneMemory.load(options["memory_dir"])
        registry = build_registry(memory, options["tools"] or ToolPreset.FULL)
        result = registry.dispatch(ToolCall(name=options["name"], arguments=arguments))
        self.emit(result.to_wire())
        if not result.ok:
            raise CommandError(f"{result.error_code}: {result.error['message']}", returncode=EXIT_RUNTIME)
