from pathlib import Path

from apps.core.clients import ClientService
from apps.core.management.base import SceneCommand
from apps.core.serialization import dumps
from apps.evaluation.services import EvalService


class Command(SceneCommand):
    help = "Evaluate grounded answers over a QA file"

    def add_arguments(self, parser):
        parser.add_argument("qa_path")
        parser.add_argument("memories_root", help="directory holding one memory directory per scene id")
        parser.add_argument("--cached", help="JSONL of cached answers; no model is called")
        parser.add_argument("--scripted", help="JSON file of model replies to replay instead of a live model")
        parser.add_argument("-o", "--out", help="also write the JSON report to this file")
        self.add_preset_argument(parser)

    def handle(self, *args, **options):
        client = None if options["cached"] else ClientService.model_client(options["scripted"])
        report = EvalService.run_eval(
            options["qa_path"],
            options["memories_root"],
            answers_path=options["cached"],
            client=client,
            preset=options["tools"],
        )
        if options["out"]:
            Path(options["out"]).write_bytes(dumps(report.to_wire()))
        self.emit(report.to_wire())
        self.stderr.write(EvalService.table(report))
