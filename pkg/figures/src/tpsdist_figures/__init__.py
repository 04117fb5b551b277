from .render import (FigureSpec, SchemaError, discover_specs, main, read_csv,
                     render, render_clustering, render_scaling,
                     render_timeseries)

__all__ = [
    "FigureSpec",
    "SchemaError",
    "discover_specs",
    "main",
    "read_csv",
    "render",
    "render_clustering",
    "render_scaling",
    "render_timeseries",
]

__version__ = "0.1.0"
