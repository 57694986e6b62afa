"""Services layer - facades tussen systems en de command-line."""

from .pipeline import CommandResult, PipelineService

__all__ = ["CommandResult", "PipelineService"]
