import importlib
import logging
from collections.abc import Callable

from symtens.config import SolverConfig, settings
from symtens.demos.models import DemoResult

log = logging.getLogger(__name__)

_REGISTRY: dict[str, Callable[[dict, SolverConfig], DemoResult]] = {}

# Demo module names, imported at bottom to auto-register
_MODULES = [
    "symtens.demos.border_rank",
    "symtens.demos.nonuniqueness",
    "symtens.demos.improvement",
]


def register(name: str):
    """Decorator to register a demo construction."""

    def decorator(fn):
        _REGISTRY[name] = fn
        return fn

    return decorator


def available() -> list[str]:
    return sorted(_REGISTRY)


def run_demo(name: str, params: dict, cfg: SolverConfig | None = None) -> DemoResult:
    """Dispatch to the registered demo."""
    fn = _REGISTRY.get(name)
    if not fn:
        raise ValueError(f"Unknown demo: {name}. Available: {', '.join(available())}")
    log.info("Running demo: %s with params %s", name, params)
    return fn(params, cfg if cfg is not None else settings.solver)


# Auto-import modules to trigger @register decorators
for _mod in _MODULES:
    importlib.import_module(_mod)
