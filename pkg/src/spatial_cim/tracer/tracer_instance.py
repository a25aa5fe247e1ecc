from .tracer import StageTracer

# Global singleton instance
tracer = StageTracer()
