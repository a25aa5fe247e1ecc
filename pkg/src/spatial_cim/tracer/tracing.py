import functools
import time

from .tracer_instance import tracer


def trace_stage(stage_name: str):
    """Decorator to time a pipeline stage; a ``seed`` keyword is recorded when given."""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            seed = kwargs.get("seed")
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                tracer.add_trace(stage_name, (time.perf_counter() - start) * 1000, seed, "error", str(e))
                raise
            tracer.add_trace(stage_name, (time.perf_counter() - start) * 1000, seed)
            return result
        return wrapper
    return decorator


def get_stage_stats():
    return tracer.get_stats()
