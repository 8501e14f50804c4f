from apps.agent.schemas import AgentConfig
from apps.agent.services import AgentService
from apps.core.clients import ClientService
from apps.core.exceptions import ServiceUnavailableError
from apps.core.management.base import SceneCommand
from apps.memory.services import SceneMemory
from apps.tools.registry import build_registry


class Command(SceneCommand):
    help = "Answer one question about a scene memory"

    def add_arguments(self, parser):
        parser.add_argument("memory_dir")
        parser.add_argument("question")
        parser.add_argument("--scripted", help="JSON file of model replies to replay instead of a live model")
        parser.add_argument("--max-steps", type=int, default=None)
        self.add_preset_argument(parser)

    def handle(self, *args, **options):
        config = AgentConfig.from_settings(max_steps=options["max_steps"], tool_preset=options["tools"])
        client = ClientService.model_client(options["scripted"])
        if client is None:
            raise ServiceUnavailableError("no model client: pass --scripted or set MODEL_BASE_URL and MODEL_NAME")
        memory = SceneMemory.load(options["memory_dir"])
        registry = build_registry(memory, config.tool_preset)
        answer, transcript = AgentService.run_query(options["question"], memory, registry, client, config=config)
        self.emit(AgentService.response(answer, transcript))
