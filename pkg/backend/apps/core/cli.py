"""
``scene-memory`` console entry point.

    scene-memory ingest <bundle_dir> -o <memory_dir>
    scene-memory query <memory_dir> "question" [--scripted actions.json]
    scene-memory serve <memory_dir> [--bind host:port]
    scene-memory eval <qa.jsonl> <memories_root> [--cached answers.jsonl]
    scene-memory tool <memory_dir> <name> --args '{...}'

Exit status: 0 success, 1 usage error, 2 runtime error.
"""

import logging
import os
import sys

import django
from django.core.management import call_command
from django.core.management.base import CommandError

from apps.core.exceptions import SceneMemoryError

EXIT_USAGE = 1
EXIT_RUNTIME = 2

SUBCOMMANDS = ("ingest", "query", "serve", "eval", "tool")
USAGE = f"usage: scene-memory {{{','.join(SUBCOMMANDS)}}} [options]\n"

logger = logging.getLogger(__name__)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        sys.stderr.write(USAGE)
        return EXIT_USAGE

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "apps.core.settings.dev")
    django.setup()

    try:
        call_command(argv[0], *argv[1:], stdout=sys.stdout, stderr=sys.stderr)
    except CommandError as e:
        sys.stderr.write(f"{e}\n")
        return e.returncode
    except SceneMemoryError as e:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"error: {e.code}: {e.message}\n")
        return EXIT_RUNTIME
    except SystemExit as e:
        # argparse --help
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
