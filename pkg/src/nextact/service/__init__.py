"""Runtime recommendation service: artifact loading, state resolution, HTTP API."""
from .resolve import (
    RankedAction,
    Recommendation,
    ResolutionError,
    ResolvedState,
    rank_actions,
    recommend,
    resolve_state,
)
from .bundle import BundleError, BundleHolder, ServiceBundle, load_bundle
from .app import create_app

__all__ = [
    "BundleError", "BundleHolder", "RankedAction", "Recommendation",
    "ResolutionError", "ResolvedState", "ServiceBundle", "create_app",
    "load_bundle", "rank_actions", "recommend", "resolve_state",
]
