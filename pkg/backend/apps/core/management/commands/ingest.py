from apps.core.clients import ClientService
from apps.core.management.base import SceneCommand
from apps.pipeline.services import PipelineService


class Command(SceneCommand):
    help = "Build a scene memory from an ingest bundle"

    def add_arguments(self, parser):
        parser.add_argument("bundle_dir")
        parser.add_argument("-o", "--out", required=True, help="output memory directory")
        fixtures = parser.add_mutually_exclusive_group()
        fixtures.add_argument(
            "--fixtures", dest="fixtures", action="store_true", default=None, help="use the bundle's client sidecars"
        )
        fixtures.add_argument("--live", dest="fixtures", action="store_false", help="use the live model clients")

    def handle(self, *args, **options):
        clients = ClientService.ingest_clients(options["bundle_dir"], fixtures=options["fixtures"])
        _, stats = PipelineService.ingest_pipeline(options["bundle_dir"], options["out"], clients=clients)
        self.emit(stats.model_dump())
