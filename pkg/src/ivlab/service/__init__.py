"""HTTP service exposing the toolkit as JSON endpoints.

The command-line interface is a thin client of this service; both speak the
same request dictionaries (SI units throughout), so the service's config
echo is the single reproducibility record.
"""

from .app import app, create_app

__all__ = ["app", "create_app"]
