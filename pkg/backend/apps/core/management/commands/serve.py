from apps.api.server import serve
from apps.api.state import ServerConfig
from apps.core.management.base import SceneCommand


class Command(SceneCommand):
    help = "Serve a scene memory over HTTP"

    def add_arguments(self, parser):
        parser.add_argument("memory_dir")
        parser.add_argument("--bind", default=None, help="host:port (default from settings)")
        parser.add_argument("--threads", type=int, default=None)
        parser.add_argument("--scripted", default=None, help="JSON file of model replies for POST /query")
        self.add_preset_argument(parser)

    def handle(self, *args, **options):
        config = ServerConfig.from_settings(
            memory_dir=options["memory_dir"],
            bind=options["bind"],
            threads=options["threads"],
            scripted=options["scripted"],
            tool_preset=options["tools"],
        )
        serve(config)
