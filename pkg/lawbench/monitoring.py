from prometheus_client import Counter, Histogram, Gauge, REGISTRY, generate_latest
from functools import wraps
from pathlib import Path
import time
from typing import Callable, Any, Union
from loguru import logger

# Prometheus metrics
OPERATIONS = Counter(
    'lawbench_operations_total',
    'Total number of engine operations started',
    ['component', 'operation']
)

OPERATION_ERRORS = Counter(
    'lawbench_operation_errors_total',
    'Total number of failed engine operations',
    ['component', 'operation', 'error_type']
)

OPERATION_DURATION = Histogram(
    'lawbench_operation_duration_seconds',
    'Time spent in engine operations',
    ['component', 'operation'],
    buckets=(0.01, 0.1, 0.5, 1.0, 5.0, 30.0, 120.0, 600.0, float('inf'))
)

ACTIVE_OPERATIONS = Gauge(
    'lawbench_active_operations',
    'Number of currently active operations',
    ['component']
)

WORD_EVALUATIONS = Counter(
    'lawbench_word_evaluations_total',
    'Word-map evaluations performed',
    ['backend']
)


def monitor(component: str, operation: str) -> Callable:
    """Decorator to monitor engine operations"""
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start_time = time.time()
            ACTIVE_OPERATIONS.labels(component=component).inc()
            OPERATIONS.labels(component=component, operation=operation).inc()

            try:
                result = func(*args, **kwargs)
                OPERATION_DURATION.labels(
                    component=component,
                    operation=operation
                ).observe(time.time() - start_time)
                return result
            except Exception as e:
                OPERATION_ERRORS.labels(
                    component=component,
                    operation=operation,
                    error_type=type(e).__name__
                ).inc()
                logger.debug(f"Operation {operation} in {component} raised {type(e).__name__}: {e}")
                raise
            finally:
                ACTIVE_OPERATIONS.labels(component=component).dec()

        return wrapper
    return decorator


def count_evaluations(backend: str, amount: int) -> None:
    if amount > 0:
        WORD_EVALUATIONS.labels(backend=backend).inc(amount)


def write_metrics(path: Union[str, Path]) -> Path:
    """Writes the Prometheus text exposition of every lawbench metric."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(generate_latest(REGISTRY))
    logger.info(f"Metrics written to {path}")
    return path
