from .logs import setup_logging
from .tracker import RunTracker, StageRecord

__all__ = ["RunTracker", "StageRecord", "setup_logging"]
