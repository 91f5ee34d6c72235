"""HTTP service for the interactive modeling loop."""
from .app import UNDO_DEPTH, ServiceError, Session, create_app, run
from .config import ServiceConfig

__all__ = ["UNDO_DEPTH", "ServiceConfig", "ServiceError", "Session",
           "create_app", "run"]
