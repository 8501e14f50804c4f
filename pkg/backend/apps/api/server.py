"""
Gunicorn host for the tool server. The memory is loaded in the master
before workers fork.
"""

import logging

from gunicorn.app.base import BaseApplication

from .state import ServerConfig, ServerState

logger = logging.getLogger(__name__)


class ToolServerApplication(BaseApplication):
    def __init__(self, config: ServerConfig):
        self.config = config
        self.application = None
        super().__init__()

    def load_config(self):
        options = {
            "bind": self.config.bind,
            "workers": 1,
            "worker_class": "gthread",
            "threads": self.config.threads,
            "timeout": self.config.timeout,
            "preload_app": True,
            "accesslog": None,
        }
        for key, value in options.items():
            self.cfg.set(key, value)

    def load(self):
        if self.application is None:
            ServerState.install(ServerState.load(self.config))
            from django.core.wsgi import get_wsgi_application

            self.application = get_wsgi_application()
        return self.application


def serve(config: ServerConfig) -> None:
    logger.info(f"Starting tool server on {config.bind}")
    ToolServerApplication(config).run()
