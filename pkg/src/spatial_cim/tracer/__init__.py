from .tracer import StageTracer
from .tracer_instance import tracer
from .tracing import get_stage_stats, trace_stage

__all__ = ["StageTracer", "get_stage_stats", "trace_stage", "tracer"]
