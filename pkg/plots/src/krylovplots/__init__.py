"""Vector figure rendering for block Krylov experiment CSV datasets."""

from .figspec import FigureSpec, SpecError, load_manifest, load_spec, spec_from_dict
from .readers import SCHEMAS, read_column_pair, read_table
from .render import RenderResult, render

__all__ = [
    "FigureSpec",
    "RenderResult",
    "SCHEMAS",
    "SpecError",
    "load_manifest",
    "load_spec",
    "read_column_pair",
    "read_table",
    "render",
    "spec_from_dict",
]
